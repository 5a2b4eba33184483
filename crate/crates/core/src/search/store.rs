//! Clause interning and sorted id sets.

use std::collections::HashMap;

use crate::cnf::{frontier_indices, resolve, subsumes, Clause, Formula};

pub type ClauseId = u32;

/// Sorted, duplicate-free list of clause ids.
pub type IdSet = Vec<ClauseId>;

/// Interns every clause the search touches.
///
/// The axioms of the input formula take ids `0..#F` in canonical order.
#[derive(Debug, Default)]
pub struct ClauseStore {
    clauses: Vec<Clause>,
    index: HashMap<Clause, ClauseId>,
    resolvents: HashMap<(ClauseId, ClauseId), Option<ClauseId>>,
    num_axioms: usize,
}

impl ClauseStore {
    pub fn new(formula: &Formula) -> ClauseStore {
        let mut store = ClauseStore::default();
        for c in formula {
            store.intern(c.clone());
        }
        store.num_axioms = formula.len();
        store
    }

    pub fn intern(&mut self, clause: Clause) -> ClauseId {
        if let Some(&id) = self.index.get(&clause) {
            return id;
        }
        let id = self.clauses.len() as ClauseId;
        self.index.insert(clause.clone(), id);
        self.clauses.push(clause);
        id
    }

    pub fn get(&self, id: ClauseId) -> &Clause {
        &self.clauses[id as usize]
    }

    pub fn find(&self, clause: &Clause) -> Option<ClauseId> {
        self.index.get(clause).copied()
    }

    pub fn is_axiom(&self, id: ClauseId) -> bool {
        (id as usize) < self.num_axioms
    }

    pub fn num_axioms(&self) -> usize {
        self.num_axioms
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Memoized resolvent of two interned clauses.
    pub fn resolve(&mut self, a: ClauseId, b: ClauseId) -> Option<ClauseId> {
        let key = (a.min(b), a.max(b));
        if let Some(&r) = self.resolvents.get(&key) {
            return r;
        }
        let r = resolve(self.get(a), self.get(b)).map(|c| self.intern(c));
        self.resolvents.insert(key, r);
        r
    }

    /// Frontier of a set of ids, as a sorted id set.
    pub fn frontier(&self, ids: &[ClauseId]) -> IdSet {
        let refs: Vec<&Clause> = ids.iter().map(|&i| self.get(i)).collect();
        frontier_indices(&refs).into_iter().map(|k| ids[k]).collect()
    }

    /// `frontier(set ∪ {id})` given `frontier(set)`.
    pub fn frontier_with(&self, front: &[ClauseId], id: ClauseId) -> IdSet {
        let c = self.get(id);
        let covered = front.iter().any(|&f| {
            let d = self.get(f);
            d.len() < c.len() && subsumes(d, c)
        });
        if covered || front.binary_search(&id).is_ok() {
            return front.to_vec();
        }
        let mut out: IdSet = front
            .iter()
            .copied()
            .filter(|&f| {
                let d = self.get(f);
                !(c.len() < d.len() && subsumes(c, d))
            })
            .collect();
        insert(&mut out, id);
        out
    }

    pub fn clauses_of<'a>(&'a self, ids: &[ClauseId]) -> Vec<&'a Clause> {
        ids.iter().map(|&i| self.get(i)).collect()
    }
}

pub fn insert(set: &mut IdSet, id: ClauseId) -> bool {
    match set.binary_search(&id) {
        Ok(_) => false,
        Err(pos) => {
            set.insert(pos, id);
            true
        }
    }
}

pub fn contains(set: &[ClauseId], id: ClauseId) -> bool {
    set.binary_search(&id).is_ok()
}

pub fn union(a: &[ClauseId], b: &[ClauseId]) -> IdSet {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub fn difference(a: &[ClauseId], b: &[ClauseId]) -> IdSet {
    a.iter().copied().filter(|&x| !contains(b, x)).collect()
}

pub fn is_subset(a: &[ClauseId], b: &[ClauseId]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

pub fn from_unsorted(mut ids: Vec<ClauseId>) -> IdSet {
    ids.sort_unstable();
    ids.dedup();
    ids
}
