//! Search nodes over layer-list prefixes and the partition rule.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::rc::Rc;

use super::store::{self, ClauseId, ClauseStore, IdSet};
use crate::cnf::Clause;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Ascending,
    Descending,
}

/// How the derivable clauses of a subproblem are ordered and cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchParams {
    pub length_order: Direction,
    pub frequency_order: Direction,
    pub branch_width: Option<usize>,
    /// Resolve only frontier clauses of the previous and current layers.
    pub frontier_branching: bool,
}

impl Default for BranchParams {
    fn default() -> BranchParams {
        BranchParams {
            length_order: Direction::Descending,
            frequency_order: Direction::Descending,
            branch_width: None,
            frontier_branching: true,
        }
    }
}

/// The fixed part of a layer-list prefix, shared by siblings.
#[derive(Debug)]
pub struct Layer {
    pub previous: IdSet,
    pub current: IdSet,
    /// `previous ∪ current`.
    pub pool: IdSet,
    /// Clauses allowed as premises when opening the next layer.
    pub premises: IdSet,
    /// All premise pairs from `current × pool` for each candidate.
    pub options: HashMap<ClauseId, Vec<(ClauseId, ClauseId)>>,
    /// The pair used when writing out a proof.
    pub chosen: HashMap<ClauseId, (ClauseId, ClauseId)>,
}

#[derive(Debug)]
pub struct Derivation {
    pub clause: ClauseId,
    pub left: ClauseId,
    pub right: ClauseId,
    pub parent: Option<Rc<Derivation>>,
}

#[derive(Debug)]
pub struct Lineage {
    pub tick: u64,
    pub parent: Option<Rc<Lineage>>,
}

/// A search node: previous, current and next layer clauses plus the
/// forgotten clauses that may never appear.
#[derive(Clone, Debug)]
pub struct Subproblem {
    pub layer: Rc<Layer>,
    pub next: IdSet,
    pub forgotten: IdSet,
    /// `previous ∪ current ∪ next`.
    pub known: IdSet,
    pub known_frontier: IdSet,
    /// Derivable clauses not yet decided, before ordering and truncation.
    pub candidates: IdSet,
    /// Clauses that may serve as a premise of some known derived clause.
    pub used: IdSet,
    /// Axioms every derivation of the known clauses relies on.
    pub required_axioms: IdSet,
    pub derivations: Option<Rc<Derivation>>,
    pub depth: usize,
    pub tick: u64,
    /// Ticks of all ancestors.
    pub lineage: Option<Rc<Lineage>>,
}

fn open_layer(
    store: &mut ClauseStore,
    previous: IdSet,
    current: IdSet,
    forgotten: &IdSet,
    known: &IdSet,
    frontier_branching: bool,
) -> (Rc<Layer>, IdSet) {
    let pool = store::union(&previous, &current);
    let premises = if frontier_branching { store.frontier(&pool) } else { pool.clone() };
    let mut chosen: HashMap<ClauseId, (ClauseId, ClauseId)> = HashMap::new();
    let mut candidates = IdSet::new();
    for &x in &current {
        if !store::contains(&premises, x) {
            continue;
        }
        for &y in &premises {
            let Some(r) = store.resolve(x, y) else { continue };
            if store::contains(forgotten, r) || store::contains(known, r) {
                continue;
            }
            chosen.entry(r).or_insert((x, y));
            store::insert(&mut candidates, r);
        }
    }
    let mut options: HashMap<ClauseId, Vec<(ClauseId, ClauseId)>> = HashMap::new();
    for &x in &current {
        for &y in &pool {
            if x == y {
                continue;
            }
            if let Some(r) = store.resolve(x, y) {
                if chosen.contains_key(&r) {
                    let pair = (x.min(y), x.max(y));
                    let list = options.entry(r).or_default();
                    if !list.contains(&pair) {
                        list.push(pair);
                    }
                }
            }
        }
    }
    let layer = Layer { previous, current, pool, premises, options, chosen };
    (Rc::new(layer), candidates)
}

fn literal_counts(store: &ClauseStore, ids: &[ClauseId]) -> HashMap<u32, u32> {
    let mut counts = HashMap::new();
    for &i in ids {
        for l in store.get(i).lits() {
            *counts.entry(l.code() as u32).or_insert(0) += 1;
        }
    }
    counts
}

/// Orders candidate clauses by length, then literal frequency over the
/// frontier of the known clauses, then canonical order.
pub fn order_candidates(
    store: &ClauseStore,
    candidates: &[ClauseId],
    known_frontier: &[ClauseId],
    params: &BranchParams,
) -> Vec<ClauseId> {
    let counts = literal_counts(store, known_frontier);
    let score = |c: &Clause| -> u64 {
        c.lits()
            .iter()
            .map(|l| *counts.get(&(l.code() as u32)).unwrap_or(&0) as u64)
            .sum()
    };
    let mut keyed: Vec<(usize, u64, ClauseId)> = candidates
        .iter()
        .map(|&id| {
            let c = store.get(id);
            (c.len(), score(c), id)
        })
        .collect();
    let directed = |o: Ordering, d: Direction| match d {
        Direction::Ascending => o,
        Direction::Descending => o.reverse(),
    };
    keyed.sort_by(|a, b| {
        directed(a.0.cmp(&b.0), params.length_order)
            .then(directed(a.1.cmp(&b.1), params.frequency_order))
            .then_with(|| store.get(a.2).cmp(store.get(b.2)))
    });
    keyed.into_iter().map(|k| k.2).collect()
}

/// Children of one partition step.
pub struct Partition {
    pub children: Vec<Subproblem>,
    /// Some derivable clause was cut by the branch width.
    pub truncated: bool,
}

impl Subproblem {
    pub fn root(store: &mut ClauseStore, frontier_branching: bool) -> Subproblem {
        let axioms: IdSet = (0..store.num_axioms() as ClauseId).collect();
        let known_frontier = store.frontier(&axioms);
        let forgotten = IdSet::new();
        let (layer, candidates) =
            open_layer(store, axioms.clone(), axioms.clone(), &forgotten, &axioms, frontier_branching);
        Subproblem {
            layer,
            next: IdSet::new(),
            forgotten,
            known: axioms,
            known_frontier,
            candidates,
            used: IdSet::new(),
            required_axioms: IdSet::new(),
            derivations: None,
            depth: 0,
            tick: 0,
            lineage: None,
        }
    }

    pub fn previous(&self) -> &IdSet {
        &self.layer.previous
    }

    pub fn current(&self) -> &IdSet {
        &self.layer.current
    }

    pub fn known_count(&self) -> usize {
        self.known.len()
    }

    pub fn derived_count(&self, store: &ClauseStore) -> usize {
        self.known.iter().filter(|&&i| !store.is_axiom(i)).count()
    }

    pub fn contains_empty(&self, store: &ClauseStore) -> bool {
        self.known.iter().any(|&i| store.get(i).is_empty())
    }

    /// Ordered derivable clauses, cut to the branch width.
    pub fn derivable(&self, store: &ClauseStore, params: &BranchParams) -> Vec<ClauseId> {
        let mut order = order_candidates(store, &self.candidates, &self.known_frontier, params);
        if let Some(w) = params.branch_width {
            order.truncate(w);
        }
        order
    }

    /// Frontier clauses of the known set never used as a premise.
    pub fn unused_frontier(&self) -> IdSet {
        store::difference(&self.known_frontier, &self.used)
    }

    /// A derived clause that is subsumed and unused makes the node redundant.
    pub fn prune_unused(&self, store: &ClauseStore) -> bool {
        self.known.iter().any(|&i| {
            !store.is_axiom(i) && !store::contains(&self.known_frontier, i) && !store::contains(&self.used, i)
        })
    }

    pub fn is_ancestor(&self, tick: u64) -> bool {
        let mut cur = self.lineage.as_ref();
        while let Some(link) = cur {
            if link.tick == tick {
                return true;
            }
            cur = link.parent.as_ref();
        }
        false
    }

    /// Derivations of every known derived clause.
    pub fn derivation_map(&self) -> HashMap<ClauseId, (ClauseId, ClauseId)> {
        let mut map = HashMap::new();
        let mut cur = self.derivations.as_ref();
        while let Some(d) = cur {
            map.insert(d.clause, (d.left, d.right));
            cur = d.parent.as_ref();
        }
        map
    }

    /// One child per derivable clause taken into the next layer, plus the
    /// commit child that closes the next layer when it is non-empty.
    pub fn partition(&self, store: &mut ClauseStore, params: &BranchParams, ticks: &mut u64) -> Partition {
        let order = self.derivable(store, params);
        let truncated = order.len() < self.candidates.len();
        let lineage = Some(Rc::new(Lineage { tick: self.tick, parent: self.lineage.clone() }));
        let mut children = Vec::with_capacity(order.len() + 1);
        let mut forgotten = self.forgotten.clone();
        let mut remaining = self.candidates.clone();
        for &w in &order {
            remaining.retain(|&c| c != w);
            let options = &self.layer.options[&w];
            let mut used = self.used.clone();
            let mut required: Option<IdSet> = None;
            for &(a, b) in options {
                store::insert(&mut used, a);
                store::insert(&mut used, b);
                let axioms = store::from_unsorted([a, b].into_iter().filter(|&i| store.is_axiom(i)).collect());
                required = Some(match required {
                    None => axioms,
                    Some(r) => r.into_iter().filter(|i| axioms.contains(i)).collect(),
                });
            }
            let (left, right) = self.layer.chosen[&w];
            let mut next = self.next.clone();
            store::insert(&mut next, w);
            let mut known = self.known.clone();
            store::insert(&mut known, w);
            *ticks += 1;
            children.push(Subproblem {
                layer: Rc::clone(&self.layer),
                next,
                forgotten: forgotten.clone(),
                known,
                known_frontier: store.frontier_with(&self.known_frontier, w),
                candidates: remaining.clone(),
                used,
                required_axioms: store::union(&self.required_axioms, &required.unwrap_or_default()),
                derivations: Some(Rc::new(Derivation {
                    clause: w,
                    left,
                    right,
                    parent: self.derivations.clone(),
                })),
                depth: self.depth,
                tick: *ticks,
                lineage: lineage.clone(),
            });
            store::insert(&mut forgotten, w);
        }
        if !self.next.is_empty() {
            let forgotten = store::union(&self.forgotten, &self.candidates);
            let (layer, candidates) = open_layer(
                store,
                self.layer.pool.clone(),
                self.next.clone(),
                &forgotten,
                &self.known,
                params.frontier_branching,
            );
            *ticks += 1;
            children.push(Subproblem {
                layer,
                next: IdSet::new(),
                forgotten,
                known: self.known.clone(),
                known_frontier: self.known_frontier.clone(),
                candidates,
                used: self.used.clone(),
                required_axioms: self.required_axioms.clone(),
                derivations: self.derivations.clone(),
                depth: self.depth + 1,
                tick: *ticks,
                lineage,
            });
        }
        Partition { children, truncated }
    }

    /// Rough heap footprint in bytes.
    pub fn estimated_bytes(&self) -> usize {
        let ids = self.next.len()
            + self.forgotten.len()
            + self.known.len()
            + self.known_frontier.len()
            + self.candidates.len()
            + self.used.len()
            + self.required_axioms.len();
        std::mem::size_of::<Subproblem>() + 4 * ids + 48
    }
}
