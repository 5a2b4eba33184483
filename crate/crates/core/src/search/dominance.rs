//! Cache of expanded subproblems for dominance pruning.

use std::collections::HashMap;

use super::store::{self, IdSet};
use super::subproblem::Subproblem;

/// What the cache remembers about an expanded subproblem.
#[derive(Clone, Debug)]
pub struct DominanceEntry {
    pub frontier: IdSet,
    pub forgotten: IdSet,
    /// Axioms that may be used by the known clauses, plus the correcting set.
    pub axioms: IdSet,
    pub derivable: IdSet,
    pub known_count: usize,
    pub tick: u64,
    pub last_access: u64,
}

impl DominanceEntry {
    pub fn from_subproblem(p: &Subproblem, axioms: IdSet, now: u64) -> DominanceEntry {
        DominanceEntry {
            frontier: p.known_frontier.clone(),
            forgotten: p.forgotten.clone(),
            axioms,
            derivable: p.candidates.clone(),
            known_count: p.known_count(),
            tick: p.tick,
            last_access: now,
        }
    }
}

/// `entry` dominates `p`, whose definitely used axioms plus the correcting
/// set are `p_axioms`. With `check_axioms` false the axiom condition is skipped.
pub fn dominates(entry: &DominanceEntry, p: &Subproblem, p_axioms: &IdSet, check_axioms: bool) -> bool {
    (!check_axioms || store::is_subset(&entry.axioms, p_axioms))
        && store::is_subset(&p.candidates, &entry.derivable)
        && store::is_subset(&p.known_frontier, &entry.frontier)
        && store::is_subset(&entry.forgotten, &p.forgotten)
        && entry.known_count <= p.known_count()
}

/// Entries keyed by the frontier of their known clauses.
#[derive(Debug)]
pub struct DominanceCache {
    buckets: HashMap<IdSet, Vec<DominanceEntry>>,
    lifetime: u64,
    len: usize,
    inserts: u64,
}

impl DominanceCache {
    pub fn new(lifetime: u64) -> DominanceCache {
        DominanceCache { buckets: HashMap::new(), lifetime, len: 0, inserts: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn alive(&self, e: &DominanceEntry, now: u64) -> bool {
        now.saturating_sub(e.last_access) <= self.lifetime
    }

    /// Some live entry that is not an ancestor of `p` dominates it.
    pub fn lookup(&mut self, p: &Subproblem, p_axioms: &IdSet, check_axioms: bool, now: u64) -> bool {
        let lifetime = self.lifetime;
        let Some(bucket) = self.buckets.get_mut(&p.known_frontier) else {
            return false;
        };
        for e in bucket.iter_mut() {
            if now.saturating_sub(e.last_access) > lifetime {
                continue;
            }
            if dominates(e, p, p_axioms, check_axioms) && !p.is_ancestor(e.tick) {
                e.last_access = now;
                return true;
            }
        }
        false
    }

    pub fn insert(&mut self, entry: DominanceEntry, now: u64) {
        self.inserts += 1;
        if self.inserts.is_multiple_of(4096) {
            self.sweep(now);
        }
        self.buckets.entry(entry.frontier.clone()).or_default().push(entry);
        self.len += 1;
    }

    fn sweep(&mut self, now: u64) {
        let mut kept = 0;
        let lifetime = self.lifetime;
        self.buckets.retain(|_, bucket| {
            bucket.retain(|e| now.saturating_sub(e.last_access) <= lifetime);
            kept += bucket.len();
            !bucket.is_empty()
        });
        self.len = kept;
    }

    /// Number of live entries.
    pub fn live(&self, now: u64) -> usize {
        self.buckets.values().flatten().filter(|e| self.alive(e, now)).count()
    }
}
