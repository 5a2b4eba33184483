//! Best-first search for short and shortest resolution proofs.
//!
//! Nodes fix a prefix of a layer list: every clause derivable from the
//! current layer is either taken into the next layer or forgotten. Each new
//! node is completed to a full proof by the DPLL solver, which keeps an
//! incumbent; nodes are discarded by lower bounds, by dominance against
//! already expanded nodes and by the unused-clause rule.

mod dominance;
mod store;
mod subproblem;

pub use dominance::{dominates, DominanceCache, DominanceEntry};
pub use store::{ClauseId, ClauseStore, IdSet};
pub use subproblem::{BranchParams, Direction, Partition, Subproblem};

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bounds::{general_bound, Provenance, mus_subproblem_bound, smus_lower_bound, BoundResult, SmusLimits, SmusResult};
use crate::cnf::{Clause, Formula};
use crate::proof::{verify_proof, Premises, Proof, ProofBuilder};
use crate::sat::{complete, correcting_indices, is_sat_within, Budget, CompleteError, SatStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Exhaustive search for a shortest proof.
    Optimal,
    /// Same search with short clauses branched on first.
    Short,
    /// Bounded queue and branching, no lower bounds.
    Competition,
}

/// Seeds for the DPLL completions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Seeding {
    Static(u64),
    /// Fresh seed per completion from a time-seeded generator.
    Dynamic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub mode: Mode,
    pub length_order: Direction,
    pub frequency_order: Direction,
    pub m_switch: usize,
    /// Iterations a dominance entry survives without being hit.
    pub cache_lifetime: u64,
    pub queue_limit: Option<usize>,
    pub branch_width: Option<usize>,
    pub seeding: Seeding,
    pub time_limit: Option<Duration>,
    pub bound_pruning: bool,
    pub dominance_pruning: bool,
    pub unused_pruning: bool,
    pub frontier_branching: bool,
    /// The input is known to be minimally unsatisfiable.
    pub mus: bool,
    pub smus_time: Duration,
    pub smus_node_limit: Option<u64>,
    pub memory_cap_bytes: Option<usize>,
    pub max_nodes: Option<u64>,
}

impl SearchConfig {
    pub fn optimal() -> SearchConfig {
        SearchConfig {
            mode: Mode::Optimal,
            length_order: Direction::Descending,
            frequency_order: Direction::Descending,
            m_switch: 28,
            cache_lifetime: 100_000,
            queue_limit: None,
            branch_width: None,
            seeding: Seeding::Static(0),
            time_limit: None,
            bound_pruning: true,
            dominance_pruning: true,
            unused_pruning: true,
            frontier_branching: true,
            mus: false,
            smus_time: Duration::from_secs(1),
            smus_node_limit: None,
            memory_cap_bytes: None,
            max_nodes: None,
        }
    }

    pub fn short() -> SearchConfig {
        SearchConfig { mode: Mode::Short, length_order: Direction::Ascending, ..SearchConfig::optimal() }
    }

    pub fn competition() -> SearchConfig {
        SearchConfig {
            mode: Mode::Competition,
            length_order: Direction::Ascending,
            queue_limit: Some(10_000),
            branch_width: Some(10),
            bound_pruning: false,
            dominance_pruning: false,
            ..SearchConfig::optimal()
        }
    }

    fn branch_params(&self) -> BranchParams {
        BranchParams {
            length_order: self.length_order,
            frequency_order: self.frequency_order,
            branch_width: self.branch_width,
            frontier_branching: self.frontier_branching,
        }
    }
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig::optimal()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub pruned_bound: u64,
    pub pruned_dominance: u64,
    pub pruned_unused: u64,
    pub cache_size: usize,
    pub completions: u64,
    /// Nodes dropped by the queue or memory limit.
    pub dropped: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// The queue ran empty.
    Exhausted,
    /// The best open lower bound met the incumbent.
    BoundMet,
    TimeLimit,
    NodeLimit,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub incumbent: Proof,
    pub incumbent_length: usize,
    pub best_lower_bound: usize,
    /// The incumbent is a shortest proof.
    pub optimal: bool,
    pub termination: Termination,
    /// Some node was dropped for the queue or memory limit.
    pub memory_limited: bool,
    pub stats: SearchStats,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("formula is satisfiable")]
    Satisfiable,
    #[error("no proof found within the limits")]
    NoProof,
}

/// Snapshot reported to the progress callback.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Progress {
    pub elapsed: Duration,
    pub incumbent: usize,
    pub bound: usize,
    pub nodes: u64,
}

impl fmt::Display for Progress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={:.3} incumbent={} bound={} nodes={}",
            self.elapsed.as_secs_f64(),
            self.incumbent,
            self.bound,
            self.nodes
        )
    }
}

pub fn minimize(formula: &Formula, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    minimize_with_progress(formula, cfg, &mut |_| {})
}

pub fn minimize_with_progress(
    formula: &Formula,
    cfg: &SearchConfig,
    progress: &mut dyn FnMut(&Progress),
) -> Result<SearchOutcome, SearchError> {
    Search::new(formula, cfg, progress).run()
}

struct Bounder {
    limits: SmusLimits,
    memo: HashMap<(IdSet, IdSet), SmusResult>,
    axioms: IdSet,
    corr: IdSet,
    mus: bool,
}

impl Bounder {
    fn new(f: &Formula, assume_mus: bool, limits: SmusLimits) -> Bounder {
        let axioms: IdSet = (0..f.len() as ClauseId).collect();
        let corr: IdSet = if assume_mus {
            axioms.clone()
        } else {
            let refs: Vec<&Clause> = f.iter().collect();
            correcting_indices(&refs, 1_000_000).into_iter().map(|i| i as ClauseId).collect()
        };
        let mus = assume_mus || corr.len() == f.len();
        Bounder { limits, memo: HashMap::new(), axioms, corr, mus }
    }

    fn smus(&mut self, store: &ClauseStore, universe: &IdSet, fixed: &IdSet, deadline: Option<Instant>) -> SmusResult {
        let front = store.frontier(universe);
        let universe = if store::is_subset(fixed, &front) { front } else { universe.clone() };
        let key = (universe, fixed.clone());
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let (universe, fixed) = &key;
        let mut limits = self.limits;
        if let Some(d) = deadline {
            limits.time = limits.time.min(d.saturating_duration_since(Instant::now()));
        }
        let refs = store.clauses_of(universe);
        let positions: Vec<usize> = fixed.iter().filter_map(|f| universe.binary_search(f).ok()).collect();
        let r = smus_lower_bound(&refs, &positions, &limits)
            .unwrap_or(SmusResult { lower: fixed.len().max(1), exact: false });
        if r.exact || limits.time == self.limits.time {
            self.memo.insert(key, r);
        }
        r
    }

    fn bound(&mut self, store: &ClauseStore, node: &Subproblem, deadline: Option<Instant>) -> BoundResult {
        if self.mus {
            let unused = node.unused_frontier();
            let s = self.smus(store, &node.known_frontier, &unused, deadline);
            return mus_subproblem_bound(node.known_count(), s);
        }
        let fixed = store::union(&node.required_axioms, &self.corr);
        let axioms = self.axioms.clone();
        let t1 = self.smus(store, &axioms, &fixed, deadline);
        let derived_unused: IdSet = node.unused_frontier().into_iter().filter(|&i| !store.is_axiom(i)).collect();
        let t2 = self.smus(store, &node.known, &derived_unused, deadline);
        general_bound(t1, node.derived_count(store), t2)
    }
}

/// Lower bound on the length of every proof of `formula`.
///
/// With `assume_mus` the formula is taken to be minimally unsatisfiable.
pub fn root_bound(formula: &Formula, assume_mus: bool, limits: SmusLimits) -> Result<BoundResult, SearchError> {
    let refs: Vec<&Clause> = formula.iter().collect();
    if formula.contains_empty() {
        return Ok(BoundResult { value: 1, exact: true, provenance: Provenance::MusCount });
    }
    if is_sat_within(&refs, Budget::unlimited()) == SatStatus::Sat {
        return Err(SearchError::Satisfiable);
    }
    let mut store = ClauseStore::new(formula);
    let root = Subproblem::root(&mut store, true);
    let mut bounder = Bounder::new(formula, assume_mus, limits);
    Ok(bounder.bound(&store, &root, None))
}

struct Item {
    node: Subproblem,
    bound: Option<BoundResult>,
    bytes: usize,
}

struct Search<'a> {
    formula: &'a Formula,
    cfg: &'a SearchConfig,
    progress: &'a mut dyn FnMut(&Progress),
    start: Instant,
    deadline: Option<Instant>,
    store: ClauseStore,
    rng: ChaCha8Rng,
    incumbent: Proof,
    stats: SearchStats,
    last_report: Instant,
    lower: usize,
}

impl<'a> Search<'a> {
    fn new(formula: &'a Formula, cfg: &'a SearchConfig, progress: &'a mut dyn FnMut(&Progress)) -> Search<'a> {
        let start = Instant::now();
        let seed = match cfg.seeding {
            Seeding::Static(s) => s,
            Seeding::Dynamic => SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos() as u64).unwrap_or(0),
        };
        Search {
            formula,
            cfg,
            progress,
            start,
            deadline: cfg.time_limit.map(|t| start + t),
            store: ClauseStore::new(formula),
            rng: ChaCha8Rng::seed_from_u64(seed),
            incumbent: Proof::default(),
            stats: SearchStats::default(),
            last_report: start,
            lower: 1,
        }
    }

    fn completion_seed(&mut self) -> u64 {
        match self.cfg.seeding {
            Seeding::Static(s) => s,
            Seeding::Dynamic => self.rng.gen(),
        }
    }

    fn timed_out(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn report(&mut self) {
        let p = Progress {
            elapsed: self.start.elapsed(),
            incumbent: self.incumbent.len(),
            bound: self.lower.min(self.incumbent.len()),
            nodes: self.stats.nodes_expanded,
        };
        self.last_report = Instant::now();
        (self.progress)(&p);
    }

    fn outcome(&self, termination: Termination, optimal: bool, memory_limited: bool, cache_size: usize) -> SearchOutcome {
        let len = self.incumbent.len();
        let mut stats = self.stats;
        stats.cache_size = cache_size;
        SearchOutcome {
            incumbent: self.incumbent.clone(),
            incumbent_length: len,
            best_lower_bound: if optimal { len } else { self.lower.min(len) },
            optimal,
            termination,
            memory_limited,
            stats,
        }
    }

    /// Writes the known derived clauses of `node` followed by `tail`.
    fn compose(&self, node: &Subproblem, tail: &Proof) -> Proof {
        let derivs = node.derivation_map();
        let mut b = ProofBuilder::new();
        let mut emitted: HashMap<ClauseId, usize> = HashMap::new();
        let mut map = Vec::with_capacity(tail.len());
        for step in tail.steps() {
            let idx = match step.premises {
                Premises::Axiom => {
                    let id = self.store.find(&step.clause).expect("completion axioms are known clauses");
                    self.emit(id, &derivs, &mut b, &mut emitted)
                }
                Premises::Resolvent { left, right } => b.resolvent_with(step.clause.clone(), map[left], map[right]),
            };
            map.push(idx);
        }
        let root = *map.last().expect("a completion has a last step");
        b.finish_at(root)
    }

    fn emit(
        &self,
        id: ClauseId,
        derivs: &HashMap<ClauseId, (ClauseId, ClauseId)>,
        b: &mut ProofBuilder,
        emitted: &mut HashMap<ClauseId, usize>,
    ) -> usize {
        if let Some(&i) = emitted.get(&id) {
            return i;
        }
        let idx = if self.store.is_axiom(id) {
            b.axiom(self.store.get(id))
        } else {
            let (l, r) = derivs[&id];
            let li = self.emit(l, derivs, b, emitted);
            let ri = self.emit(r, derivs, b, emitted);
            b.resolvent_with(self.store.get(id).clone(), li, ri)
        };
        emitted.insert(id, idx);
        idx
    }

    /// Completes `node` and keeps the result if it beats the incumbent.
    fn try_complete(&mut self, node: &Subproblem) {
        let seed = self.completion_seed();
        let known: Vec<&Clause> = self.store.clauses_of(&node.known);
        let budget = Budget { max_steps: None, deadline: self.deadline };
        let Ok(tail) = complete(&known, seed, budget) else { return };
        self.stats.completions += 1;
        let proof = self.compose(node, &tail);
        if proof.len() < self.incumbent.len() && verify_proof(self.formula, &proof).is_valid() {
            self.incumbent = proof;
            self.report();
        }
    }

    fn key_of(&self, node: &Subproblem, inherited: usize) -> usize {
        if self.cfg.mode == Mode::Competition {
            node.known.iter().map(|&i| self.store.get(i).len()).min().unwrap_or(0)
        } else {
            inherited
        }
    }

    fn run(mut self) -> Result<SearchOutcome, SearchError> {
        let f = self.formula;
        if f.contains_empty() {
            let mut b = ProofBuilder::new();
            let i = b.axiom(&Clause::empty());
            self.incumbent = b.finish_at(i);
            self.lower = 1;
            return Ok(self.outcome(Termination::Exhausted, true, false, 0));
        }
        let refs: Vec<&Clause> = f.iter().collect();
        let base_seed = match self.cfg.seeding {
            Seeding::Static(s) => s,
            Seeding::Dynamic => 0,
        };
        self.incumbent = match complete(&refs, base_seed, Budget { max_steps: None, deadline: self.deadline }) {
            Ok(p) => p.trimmed(),
            Err(CompleteError::Satisfiable) => return Err(SearchError::Satisfiable),
            Err(CompleteError::Timeout) => return Err(SearchError::NoProof),
        };
        self.stats.completions += 1;
        self.report();

        let limits = SmusLimits {
            time: self.cfg.smus_time,
            max_nodes: self.cfg.smus_node_limit,
            m_switch: self.cfg.m_switch,
        };
        let mut bounder = Bounder::new(f, self.cfg.mus, limits);
        let corr = bounder.corr.clone();
        let mus = bounder.mus;
        let params = self.cfg.branch_params();
        let mut cache = DominanceCache::new(self.cfg.cache_lifetime);
        let mut queue: BTreeMap<(usize, Reverse<u64>), Item> = BTreeMap::new();
        let mut queue_bytes = 0usize;
        let mut ticks = 0u64;
        let mut incomplete = false;
        let mut memory_limited = false;

        let root = Subproblem::root(&mut self.store, self.cfg.frontier_branching);
        let root_bound = if self.cfg.bound_pruning || self.cfg.mode != Mode::Competition {
            let b = bounder.bound(&self.store, &root, self.deadline);
            self.lower = b.value.max(1);
            Some(b)
        } else {
            None
        };
        let root_key = self.key_of(&root, self.lower);
        let bytes = root.estimated_bytes();
        queue_bytes += bytes;
        queue.insert((root_key, Reverse(root.tick)), Item { node: root, bound: root_bound, bytes });

        let termination = loop {
            if self.timed_out() {
                break Termination::TimeLimit;
            }
            if self.cfg.max_nodes.is_some_and(|m| self.stats.nodes_expanded >= m) {
                break Termination::NodeLimit;
            }
            let Some(((key, tick), item)) = queue.pop_first() else {
                break Termination::Exhausted;
            };
            queue_bytes -= item.bytes;
            let Item { node, bound, bytes } = item;
            let now = self.stats.nodes_expanded;
            if self.cfg.bound_pruning {
                if key >= self.incumbent.len() {
                    break Termination::BoundMet;
                }
                if !incomplete {
                    self.lower = self.lower.max(key);
                }
            }
            if node.contains_empty(&self.store) {
                continue;
            }
            let node_axioms = store::union(&node.required_axioms, &corr);
            if self.cfg.dominance_pruning && cache.lookup(&node, &node_axioms, !mus, now) {
                self.stats.pruned_dominance += 1;
                continue;
            }
            if self.cfg.unused_pruning && node.prune_unused(&self.store) {
                self.stats.pruned_unused += 1;
                continue;
            }
            let mut node_key = key;
            if self.cfg.bound_pruning {
                let b = match bound {
                    Some(b) => b,
                    None => bounder.bound(&self.store, &node, self.deadline),
                };
                if b.value >= self.incumbent.len() {
                    self.stats.pruned_bound += 1;
                    continue;
                }
                if b.value > key {
                    queue_bytes += bytes;
                    queue.insert((b.value, tick), Item { node, bound: Some(b), bytes });
                    continue;
                }
                node_key = key.max(b.value);
            }
            if self.cfg.dominance_pruning {
                let possible: IdSet = node.used.iter().copied().filter(|&i| self.store.is_axiom(i)).collect();
                let entry = DominanceEntry::from_subproblem(&node, store::union(&possible, &corr), now);
                cache.insert(entry, now);
            }
            self.stats.nodes_expanded += 1;
            let part = node.partition(&mut self.store, &params, &mut ticks);
            incomplete |= part.truncated;
            for child in part.children {
                if self.timed_out() {
                    break;
                }
                if child.known.len() > node.known.len() {
                    self.try_complete(&child);
                }
                let k = self.key_of(&child, node_key);
                let bytes = child.estimated_bytes();
                queue_bytes += bytes;
                queue.insert((k, Reverse(child.tick)), Item { node: child, bound: None, bytes });
            }
            while self.cfg.queue_limit.is_some_and(|l| queue.len() > l)
                || self.cfg.memory_cap_bytes.is_some_and(|cap| queue_bytes > cap && queue.len() > 1)
            {
                let Some((_, dropped)) = queue.pop_last() else { break };
                queue_bytes -= dropped.bytes;
                self.stats.dropped += 1;
                incomplete = true;
                if self.cfg.memory_cap_bytes.is_some_and(|cap| queue_bytes + dropped.bytes > cap) {
                    memory_limited = true;
                }
            }
            if self.last_report.elapsed() >= Duration::from_secs(1) {
                self.report();
            }
        };
        let optimal = match termination {
            Termination::BoundMet | Termination::Exhausted => !incomplete,
            Termination::TimeLimit | Termination::NodeLimit => false,
        };
        let optimal = optimal || self.lower >= self.incumbent.len();
        if optimal {
            self.lower = self.incumbent.len();
        }
        self.report();
        Ok(self.outcome(termination, optimal, memory_limited, cache.len()))
    }
}
