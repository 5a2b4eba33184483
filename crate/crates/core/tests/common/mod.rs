//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls into the library except for conversions, so the
//! values computed are independent of the code under test.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resmin::cnf::{Clause, Formula};

/// DIMACS literals sorted by variable, no repeats.
pub type RawClause = Vec<i32>;

pub fn normalize(lits: &[i32]) -> Option<RawClause> {
    let mut v: Vec<i32> = lits.to_vec();
    v.sort_by_key(|&l| (l.abs(), l));
    v.dedup();
    if v.windows(2).any(|w| w[0] == -w[1]) {
        return None;
    }
    Some(v)
}

/// Resolvent when exactly one variable clashes.
pub fn resolvent(a: &RawClause, b: &RawClause) -> Option<RawClause> {
    let clashes: Vec<i32> = a.iter().copied().filter(|l| b.contains(&-l)).collect();
    if clashes.len() != 1 {
        return None;
    }
    let p = clashes[0];
    let mut out: Vec<i32> = a.iter().copied().filter(|&l| l != p).collect();
    out.extend(b.iter().copied().filter(|&l| l != -p));
    normalize(&out)
}

pub fn to_raw(f: &Formula) -> Vec<RawClause> {
    f.iter().map(|c| c.lits().iter().map(|l| l.to_dimacs()).collect::<Vec<_>>()).map(|v| normalize(&v).unwrap()).collect()
}

pub fn to_formula(clauses: &[RawClause]) -> Formula {
    let refs: Vec<&[i32]> = clauses.iter().map(|c| c.as_slice()).collect();
    Formula::from_dimacs(&refs)
}

pub fn clause(lits: &[i32]) -> Clause {
    Clause::from_dimacs(lits).unwrap()
}

/// Exhaustive satisfiability over every assignment.
pub fn brute_sat(clauses: &[RawClause]) -> bool {
    let n = clauses.iter().flatten().map(|l| l.unsigned_abs()).max().unwrap_or(0);
    assert!(n <= 20, "too many variables for enumeration");
    (0u32..1 << n).any(|m| {
        clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let bit = m >> (l.unsigned_abs() - 1) & 1 == 1;
                bit == (l > 0)
            })
        })
    })
}

/// Smallest unsatisfiable subset containing `fixed`, by enumeration.
pub fn brute_smus(clauses: &[RawClause], fixed: &[usize]) -> Option<usize> {
    let n = clauses.len();
    assert!(n <= 20);
    let fixed_mask: u32 = fixed.iter().map(|&i| 1u32 << i).sum();
    (0u32..1 << n)
        .filter(|m| m & fixed_mask == fixed_mask)
        .filter(|&m| {
            let sub: Vec<RawClause> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| clauses[i].clone()).collect();
            !brute_sat(&sub)
        })
        .map(|m| m.count_ones() as usize)
        .min()
}

/// Length of a shortest resolution proof, or `None` when satisfiable.
///
/// For every unsatisfiable axiom subset, layer lists are enumerated by
/// iterative deepening on their total size; the first size reachable is
/// the optimum.
pub fn shortest_proof_length(clauses: &[RawClause]) -> Option<usize> {
    let axioms: Vec<RawClause> = clauses.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if brute_sat(&axioms) {
        return None;
    }
    if axioms.iter().any(|c| c.is_empty()) {
        return Some(1);
    }
    let n = axioms.len();
    let mut cores: Vec<Vec<RawClause>> = (1u32..1 << n)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| axioms[i].clone()).collect::<Vec<_>>())
        .filter(|s| !brute_sat(s))
        .collect();
    cores.sort_by_key(|s| s.len());
    for target in 1.. {
        for a in &cores {
            if a.len() >= target {
                continue;
            }
            let all: BTreeSet<RawClause> = a.iter().cloned().collect();
            if layers_reach(&all, a, &BTreeSet::new(), target) {
                return Some(target);
            }
        }
    }
    unreachable!()
}

fn resolvents_between(xs: &[RawClause], ys: &BTreeSet<RawClause>) -> BTreeSet<RawClause> {
    let mut out = BTreeSet::new();
    for x in xs {
        for y in ys {
            if let Some(r) = resolvent(x, y) {
                out.insert(r);
            }
        }
    }
    out
}

/// Whether some layer list extending (`all`, last layer `last`) reaches the
/// empty clause with at most `target` clauses in total.
fn layers_reach(all: &BTreeSet<RawClause>, last: &[RawClause], before_last: &BTreeSet<RawClause>, target: usize) -> bool {
    let earlier: Vec<RawClause> = before_last.iter().cloned().collect();
    let forgotten = resolvents_between(&earlier, before_last);
    let open: Vec<RawClause> = resolvents_between(last, all)
        .into_iter()
        .filter(|r| !all.contains(r) && !forgotten.contains(r))
        .collect();
    if open.iter().any(|c| c.is_empty()) {
        return all.len() < target;
    }
    // The next layer plus a final layer holding only the empty clause.
    let budget = target.saturating_sub(all.len() + 1);
    if budget == 0 {
        return false;
    }
    let mut chosen = Vec::new();
    subsets_reach(all, &open, 0, budget, &mut chosen, target)
}

fn subsets_reach(
    all: &BTreeSet<RawClause>,
    open: &[RawClause],
    start: usize,
    budget: usize,
    chosen: &mut Vec<RawClause>,
    target: usize,
) -> bool {
    if !chosen.is_empty() {
        let mut next_all = all.clone();
        next_all.extend(chosen.iter().cloned());
        if layers_reach(&next_all, chosen, all, target) {
            return true;
        }
    }
    if chosen.len() == budget {
        return false;
    }
    for i in start..open.len() {
        chosen.push(open[i].clone());
        if subsets_reach(all, open, i + 1, budget, chosen, target) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Random formula with clause widths 1 to 3 over `vars` variables.
pub fn random_small_cnf(rng: &mut ChaCha8Rng, vars: i32, max_clauses: usize) -> Vec<RawClause> {
    let m = rng.gen_range(2..=max_clauses);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < m && attempts < 1000 {
        attempts += 1;
        let w = rng.gen_range(1..=3usize.min(vars as usize));
        let mut vs: Vec<i32> = (1..=vars).collect();
        for i in 0..w {
            let j = rng.gen_range(i..vs.len());
            vs.swap(i, j);
        }
        let lits: Vec<i32> = vs[..w].iter().map(|&v| if rng.gen() { v } else { -v }).collect();
        let c = normalize(&lits).unwrap();
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    out
}

/// Unsatisfiable random formulas, filtered by the library's solver and
/// cross-checked by enumeration.
pub fn unsat_corpus(seed: u64, count: usize, vars: i32, max_clauses: usize) -> Vec<Vec<RawClause>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let f = random_small_cnf(&mut rng, vars, max_clauses);
        let formula = to_formula(&f);
        let unsat = matches!(resmin::sat::solve(&formula, 0), resmin::sat::SolveResult::Unsat(_));
        assert_eq!(unsat, !brute_sat(&f), "solver disagrees with enumeration on {f:?}");
        if unsat {
            out.push(f);
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
