//! Smallest unsatisfiable subsets containing a mandatory set.
//!
//! Small inputs use a best-first branch-and-bound over (clauses, mandatory)
//! pairs whose bound is the number of mandatory clauses. Larger inputs use
//! an implicit hitting-set loop over correction sets, which also yields a
//! lower bound at every iteration.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cnf::Clause;
use crate::sat::{is_sat_within, Budget, SatStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmusLimits {
    pub time: Duration,
    /// Node cap for the branch-and-bound, for reproducible runs.
    pub max_nodes: Option<u64>,
    /// Largest input handled by the branch-and-bound route.
    pub m_switch: usize,
}

impl Default for SmusLimits {
    fn default() -> SmusLimits {
        SmusLimits { time: Duration::from_secs(1), max_nodes: None, m_switch: 28 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmusResult {
    pub lower: usize,
    pub exact: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SmusError {
    #[error("clause set is satisfiable")]
    SatInput,
    #[error("mandatory clause index {0} is out of range")]
    FixedOutOfRange(usize),
}

struct Oracle<'a> {
    clauses: &'a [&'a Clause],
    deadline: Instant,
    memo: HashMap<Vec<u64>, bool>,
    scratch: Vec<&'a Clause>,
    timed_out: bool,
}

impl<'a> Oracle<'a> {
    /// `Some(true)` if the masked subset is unsatisfiable.
    fn unsat(&mut self, mask: &Mask) -> Option<bool> {
        if let Some(&u) = self.memo.get(&mask.0) {
            return Some(u);
        }
        if Instant::now() >= self.deadline {
            self.timed_out = true;
            return None;
        }
        self.scratch.clear();
        self.scratch.extend(mask.iter().map(|i| self.clauses[i]));
        let budget = Budget { max_steps: None, deadline: Some(self.deadline) };
        let u = match is_sat_within(&self.scratch, budget) {
            SatStatus::Unsat => true,
            SatStatus::Sat => false,
            SatStatus::Unknown => {
                self.timed_out = true;
                return None;
            }
        };
        self.memo.insert(mask.0.clone(), u);
        Some(u)
    }

    /// Members of `set` whose removal makes it satisfiable.
    fn correcting(&mut self, set: &Mask) -> Option<Mask> {
        let mut out = Mask::empty(set.universe());
        for i in set.iter() {
            let mut rest = set.clone();
            rest.remove(i);
            if !self.unsat(&rest)? {
                out.insert(i);
            }
        }
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Mask(Vec<u64>);

impl Mask {
    fn empty(n: usize) -> Mask {
        Mask(vec![0; n.div_ceil(64).max(1)])
    }

    fn full(n: usize) -> Mask {
        let mut m = Mask::empty(n);
        for i in 0..n {
            m.insert(i);
        }
        m
    }

    fn universe(&self) -> usize {
        self.0.len() * 64
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn union(&self, other: &Mask) -> Mask {
        Mask(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}

/// Lower bound on the size of the smallest unsatisfiable subset of
/// `clauses` that contains every clause indexed by `fixed`.
///
/// `exact` is true when the bound is the optimum. The bound only grows with
/// a larger budget.
pub fn smus_lower_bound(clauses: &[&Clause], fixed: &[usize], limits: &SmusLimits) -> Result<SmusResult, SmusError> {
    let n = clauses.len();
    if let Some(&bad) = fixed.iter().find(|&&i| i >= n) {
        return Err(SmusError::FixedOutOfRange(bad));
    }
    let mut fixed_mask = Mask::empty(n);
    for &i in fixed {
        fixed_mask.insert(i);
    }
    let floor = fixed_mask.count().max(1);
    let mut oracle = Oracle {
        clauses,
        deadline: Instant::now() + limits.time,
        memo: HashMap::new(),
        scratch: Vec::with_capacity(n),
        timed_out: false,
    };
    let all = Mask::full(n);
    match oracle.unsat(&all) {
        Some(true) => {}
        Some(false) => return Err(SmusError::SatInput),
        None => return Ok(SmusResult { lower: floor, exact: false }),
    }
    let Some(corr) = oracle.correcting(&all) else {
        return Ok(SmusResult { lower: floor, exact: false });
    };
    let mandatory = fixed_mask.union(&corr);
    let result = if n <= limits.m_switch {
        branch_and_bound(&mut oracle, clauses, all, mandatory, limits.max_nodes)
    } else {
        hitting_sets(&mut oracle, n, mandatory)
    };
    Ok(SmusResult { lower: result.lower.max(floor), exact: result.exact })
}

fn branch_and_bound(
    oracle: &mut Oracle<'_>,
    clauses: &[&Clause],
    all: Mask,
    mandatory: Mask,
    max_nodes: Option<u64>,
) -> SmusResult {
    // Longest clauses first, then canonical order.
    let mut rank: Vec<usize> = (0..clauses.len()).collect();
    rank.sort_by(|&a, &b| clauses[b].len().cmp(&clauses[a].len()).then(clauses[a].cmp(clauses[b])));

    let mut heap: BinaryHeap<(Reverse<usize>, u64, Mask, Mask)> = BinaryHeap::new();
    let mut tick = 0u64;
    heap.push((Reverse(mandatory.count()), tick, all, mandatory));
    let mut popped = 0u64;
    while let Some((Reverse(key), _, set, must)) = heap.pop() {
        if max_nodes.is_some_and(|m| popped >= m) {
            return SmusResult { lower: key, exact: false };
        }
        popped += 1;
        let Some(done) = oracle.unsat(&must) else {
            return SmusResult { lower: key, exact: false };
        };
        if done {
            return SmusResult { lower: key, exact: true };
        }
        let Some(pick) = rank.iter().copied().find(|&i| set.contains(i) && !must.contains(i)) else {
            continue;
        };
        let mut taken = must.clone();
        taken.insert(pick);
        tick += 1;
        heap.push((Reverse(taken.count()), tick, set.clone(), taken));

        let mut rest = set;
        rest.remove(pick);
        let Some(rest_unsat) = oracle.unsat(&rest) else {
            return SmusResult { lower: key, exact: false };
        };
        if rest_unsat {
            let Some(corr) = oracle.correcting(&rest) else {
                return SmusResult { lower: key, exact: false };
            };
            let must = must.union(&corr);
            tick += 1;
            heap.push((Reverse(must.count()), tick, rest, must));
        }
    }
    unreachable!("the full clause set is unsatisfiable, so some node is a solution")
}

fn hitting_sets(oracle: &mut Oracle<'_>, n: usize, mandatory: Mask) -> SmusResult {
    let mut cores: Vec<Vec<usize>> = Vec::new();
    let mut lower = mandatory.count();
    loop {
        let Some(hs) = min_hitting_set(&cores, &mandatory, oracle.deadline) else {
            return SmusResult { lower, exact: false };
        };
        lower = lower.max(hs.count());
        let Some(unsat) = oracle.unsat(&hs) else {
            return SmusResult { lower, exact: false };
        };
        if unsat {
            return SmusResult { lower, exact: true };
        }
        let mut grown = hs;
        for i in 0..n {
            if grown.contains(i) {
                continue;
            }
            grown.insert(i);
            match oracle.unsat(&grown) {
                Some(false) => {}
                Some(true) => grown.remove(i),
                None => return SmusResult { lower, exact: false },
            }
        }
        let complement: Vec<usize> = (0..n).filter(|&i| !grown.contains(i)).collect();
        debug_assert!(!complement.is_empty());
        cores.push(complement);
    }
}

/// Smallest superset of `base` meeting every set in `sets`.
fn min_hitting_set(sets: &[Vec<usize>], base: &Mask, deadline: Instant) -> Option<Mask> {
    struct Ctx<'a> {
        sets: &'a [Vec<usize>],
        best: Option<Mask>,
        deadline: Instant,
        visits: u64,
        timed_out: bool,
    }
    fn disjoint_lower(ctx: &Ctx<'_>, chosen: &Mask) -> usize {
        let mut used = Mask::empty(chosen.universe());
        let mut count = 0;
        let mut open: Vec<&Vec<usize>> = ctx.sets.iter().filter(|s| !s.iter().any(|&i| chosen.contains(i))).collect();
        open.sort_by_key(|s| s.len());
        for s in open {
            if s.iter().all(|&i| !used.contains(i)) {
                count += 1;
                for &i in s {
                    used.insert(i);
                }
            }
        }
        count
    }
    fn rec(ctx: &mut Ctx<'_>, chosen: &mut Mask) {
        ctx.visits += 1;
        if ctx.visits.is_multiple_of(1024) && Instant::now() >= ctx.deadline {
            ctx.timed_out = true;
        }
        if ctx.timed_out {
            return;
        }
        let size = chosen.count();
        if ctx.best.as_ref().is_some_and(|b| size + disjoint_lower(ctx, chosen) >= b.count()) {
            return;
        }
        let open = ctx
            .sets
            .iter()
            .filter(|s| !s.iter().any(|&i| chosen.contains(i)))
            .min_by_key(|s| s.len());
        let Some(open) = open else {
            ctx.best = Some(chosen.clone());
            return;
        };
        for &i in open {
            chosen.insert(i);
            rec(ctx, chosen);
            chosen.remove(i);
        }
    }
    let mut ctx = Ctx { sets, best: None, deadline, visits: 0, timed_out: false };
    let mut chosen = base.clone();
    rec(&mut ctx, &mut chosen);
    if ctx.timed_out {
        None
    } else {
        ctx.best
    }
}
