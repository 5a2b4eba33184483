//! Seed-keyed generators for synthetic benchmark families.
//!
//! Clause schemas:
//!
//! * `php(n)`: `n + 1` pigeons, `n` holes. Variable `p(i, j)` says pigeon `i`
//!   sits in hole `j`. One at-least-one clause per pigeon and a binary
//!   at-most-one clause per hole and pair of pigeons.
//! * `parity(n)`: perfect matching on `2n + 1` elements. One variable per
//!   unordered pair; every element is matched at least once and at most once.
//! * `ordering(n)`: a strict order on `n + 1` elements without a minimum.
//!   Antisymmetry, transitivity and, for each element, a clause saying some
//!   other element precedes it.
//! * `random3cnf(n, m)`: `m` distinct clauses over three distinct variables.
//! * `subset_cardinality(n)`: a random 4-regular bipartite graph with `n`
//!   vertices per side plus one extra edge, one variable per edge. Each row
//!   has at least half of its edges true, each column at most half.
//! * `graph_coloring(k, v)`: `k`-coloring of a random `2(k − 1)`-regular graph
//!   on `v` vertices. The clique variant adds a random `(k + 1)`-clique.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{Clause, Formula, Lit};
use crate::sat::{is_sat, SatStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceSpec {
    Php { holes: u32 },
    Parity { n: u32 },
    Ordering { n: u32 },
    Random3Cnf { vars: u32, clauses: usize, seed: u64 },
    SubsetCardinality { n: u32, seed: u64 },
    GraphColoring { colors: u32, vertices: u32, seed: u64 },
    GraphColoringClique { colors: u32, vertices: u32, seed: u64 },
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InstanceSpec::Php { holes } => write!(f, "family=php holes={holes}"),
            InstanceSpec::Parity { n } => write!(f, "family=parity n={n}"),
            InstanceSpec::Ordering { n } => write!(f, "family=ordering n={n}"),
            InstanceSpec::Random3Cnf { vars, clauses, seed } => {
                write!(f, "family=random3cnf vars={vars} clauses={clauses} seed={seed}")
            }
            InstanceSpec::SubsetCardinality { n, seed } => {
                write!(f, "family=subset_cardinality n={n} seed={seed}")
            }
            InstanceSpec::GraphColoring { colors, vertices, seed } => {
                write!(f, "family=graph_coloring colors={colors} vertices={vertices} seed={seed}")
            }
            InstanceSpec::GraphColoringClique { colors, vertices, seed } => write!(
                f,
                "family=graph_coloring_clique colors={colors} vertices={vertices} seed={seed}"
            ),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("formula is satisfiable")]
    SatInput,
}

fn bad(msg: impl Into<String>) -> GenError {
    GenError::Params(msg.into())
}

pub fn generate(spec: &InstanceSpec) -> Result<Formula, GenError> {
    match *spec {
        InstanceSpec::Php { holes } => {
            if holes == 0 {
                return Err(bad("php needs at least one hole"));
            }
            Ok(php(holes))
        }
        InstanceSpec::Parity { n } => {
            if n == 0 {
                return Err(bad("parity needs n >= 1"));
            }
            Ok(parity(n))
        }
        InstanceSpec::Ordering { n } => {
            if n == 0 {
                return Err(bad("ordering needs n >= 1"));
            }
            Ok(ordering(n))
        }
        InstanceSpec::Random3Cnf { vars, clauses, seed } => random3cnf(vars, clauses, seed),
        InstanceSpec::SubsetCardinality { n, seed } => subset_cardinality(n, seed),
        InstanceSpec::GraphColoring { colors, vertices, seed } => graph_coloring(colors, vertices, seed, false),
        InstanceSpec::GraphColoringClique { colors, vertices, seed } => {
            graph_coloring(colors, vertices, seed, true)
        }
    }
}

fn clause(lits: impl IntoIterator<Item = Lit>) -> Clause {
    Clause::new(lits).expect("generated clauses are not tautologies")
}

/// Pigeonhole principle with `holes + 1` pigeons.
pub fn php(holes: u32) -> Formula {
    let n = holes;
    let var = |pigeon: u32, hole: u32| pigeon * n + hole + 1;
    let mut out = Vec::new();
    for i in 0..=n {
        out.push(clause((0..n).map(|j| Lit::new(var(i, j), true))));
    }
    for j in 0..n {
        for i in 0..=n {
            for k in i + 1..=n {
                out.push(clause([Lit::new(var(i, j), false), Lit::new(var(k, j), false)]));
            }
        }
    }
    Formula::new(out, n * (n + 1))
}

/// Parity principle on `2n + 1` elements.
pub fn parity(n: u32) -> Formula {
    let m = 2 * n + 1;
    let mut index = vec![vec![0u32; m as usize]; m as usize];
    let mut next = 1;
    for i in 0..m {
        for j in i + 1..m {
            index[i as usize][j as usize] = next;
            index[j as usize][i as usize] = next;
            next += 1;
        }
    }
    let mut out = Vec::new();
    for (i, row) in index.iter().enumerate() {
        let others: Vec<usize> = (0..m as usize).filter(|&j| j != i).collect();
        out.push(clause(others.iter().map(|&j| Lit::new(row[j], true))));
        for (a, &j) in others.iter().enumerate() {
            for &k in &others[a + 1..] {
                out.push(clause([Lit::new(row[j], false), Lit::new(row[k], false)]));
            }
        }
    }
    Formula::new(out, next - 1)
}

/// Ordering principle on `n + 1` elements.
pub fn ordering(n: u32) -> Formula {
    let m = n + 1;
    // x(i, j): i precedes j
    let var = |i: u32, j: u32| i * m + j + 1;
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            out.push(clause([Lit::new(var(i, j), false), Lit::new(var(j, i), false)]));
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if i != j && j != k && i != k {
                    out.push(clause([
                        Lit::new(var(i, j), false),
                        Lit::new(var(j, k), false),
                        Lit::new(var(i, k), true),
                    ]));
                }
            }
        }
    }
    for j in 0..m {
        out.push(clause((0..m).filter(|&i| i != j).map(|i| Lit::new(var(i, j), true))));
    }
    Formula::new(out, m * m)
}

/// `clauses` distinct width-3 clauses over variables `1..=vars`.
pub fn random3cnf(vars: u32, clauses: usize, seed: u64) -> Result<Formula, GenError> {
    if vars < 3 {
        return Err(bad("random3cnf needs at least 3 variables"));
    }
    let v = vars as u128;
    let available = v * (v - 1) * (v - 2) / 6 * 8;
    if clauses as u128 > available {
        return Err(bad(format!("only {available} distinct width-3 clauses exist over {vars} variables")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(clauses);
    let pool: Vec<u32> = (1..=vars).collect();
    while out.len() < clauses {
        let picked = pool.choose_multiple(&mut rng, 3);
        let c = clause(picked.map(|&x| Lit::new(x, rng.gen())).collect::<Vec<_>>());
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    Ok(Formula::new(out, vars))
}

/// Union of `degree` random perfect matchings without repeated edges.
fn random_regular_bipartite(n: usize, degree: usize, rng: &mut ChaCha8Rng) -> BTreeSet<(usize, usize)> {
    'retry: loop {
        let mut edges = BTreeSet::new();
        for _ in 0..degree {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            for (r, &c) in perm.iter().enumerate() {
                if !edges.insert((r, c)) {
                    continue 'retry;
                }
            }
        }
        return edges;
    }
}

fn subsets(items: &[u32], size: usize, out: &mut Vec<Vec<u32>>) {
    fn rec(items: &[u32], size: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, size, 0, &mut Vec::new(), out);
}

pub fn subset_cardinality(n: u32, seed: u64) -> Result<Formula, GenError> {
    if n < 5 {
        return Err(bad("subset_cardinality needs n >= 5"));
    }
    let n = n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = random_regular_bipartite(n, 4, &mut rng);
    loop {
        let e = (rng.gen_range(0..n), rng.gen_range(0..n));
        if edges.insert(e) {
            break;
        }
    }
    let ids: Vec<(usize, usize)> = edges.into_iter().collect();
    let var_of = |e: (usize, usize)| ids.binary_search(&e).unwrap() as u32 + 1;
    let mut out = Vec::new();
    let mut sets = Vec::new();
    for r in 0..n {
        let vars: Vec<u32> = ids.iter().filter(|e| e.0 == r).map(|&e| var_of(e)).collect();
        let d = vars.len();
        sets.clear();
        subsets(&vars, d - d.div_ceil(2) + 1, &mut sets);
        out.extend(sets.iter().map(|s| clause(s.iter().map(|&x| Lit::new(x, true)))));
    }
    for c in 0..n {
        let vars: Vec<u32> = ids.iter().filter(|e| e.1 == c).map(|&e| var_of(e)).collect();
        let d = vars.len();
        sets.clear();
        subsets(&vars, d / 2 + 1, &mut sets);
        out.extend(sets.iter().map(|s| clause(s.iter().map(|&x| Lit::new(x, false)))));
    }
    Ok(Formula::new(out, ids.len() as u32))
}

/// Random `degree`-regular simple graph by the configuration model.
fn random_regular_graph(v: usize, degree: usize, rng: &mut ChaCha8Rng) -> Option<BTreeSet<(usize, usize)>> {
    for _ in 0..10_000 {
        let mut stubs: Vec<usize> = (0..v).flat_map(|x| std::iter::repeat_n(x, degree)).collect();
        stubs.shuffle(rng);
        let mut edges = BTreeSet::new();
        let ok = stubs.chunks(2).all(|p| {
            let (a, b) = (p[0].min(p[1]), p[0].max(p[1]));
            a != b && edges.insert((a, b))
        });
        if ok {
            return Some(edges);
        }
    }
    None
}

pub fn graph_coloring(colors: u32, vertices: u32, seed: u64, clique: bool) -> Result<Formula, GenError> {
    if colors < 2 {
        return Err(bad("graph coloring needs at least 2 colors"));
    }
    let k = colors as usize;
    let v = vertices as usize;
    let degree = 2 * (k - 1);
    if v <= degree {
        return Err(bad(format!("a {degree}-regular graph needs more than {degree} vertices")));
    }
    if clique && v < k + 1 {
        return Err(bad("the planted clique does not fit"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = random_regular_graph(v, degree, &mut rng)
        .ok_or_else(|| bad("failed to sample a simple regular graph"))?;
    if clique {
        let mut members: Vec<usize> = (0..v).collect::<Vec<_>>();
        members.shuffle(&mut rng);
        members.truncate(k + 1);
        members.sort_unstable();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                edges.insert((a, b));
            }
        }
    }
    let var = |u: usize, c: usize| (u * k + c + 1) as u32;
    let mut out = Vec::new();
    for u in 0..v {
        out.push(clause((0..k).map(|c| Lit::new(var(u, c), true))));
        for c in 0..k {
            for d in c + 1..k {
                out.push(clause([Lit::new(var(u, c), false), Lit::new(var(u, d), false)]));
            }
        }
    }
    for &(a, b) in &edges {
        for c in 0..k {
            out.push(clause([Lit::new(var(a, c), false), Lit::new(var(b, c), false)]));
        }
    }
    Ok(Formula::new(out, (v * k) as u32))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MusVariant {
    pub formula: Formula,
    /// Every single-clause deletion was proven satisfiable.
    pub exact: bool,
}

/// Destructive deletion: drops each clause whose removal keeps the formula
/// provably unsatisfiable within `max_steps` per test.
pub fn generate_mus_variant(f: &Formula, max_steps: u64) -> Result<MusVariant, GenError> {
    let all: Vec<&Clause> = f.iter().collect();
    match is_sat(&all, max_steps) {
        SatStatus::Unsat => {}
        SatStatus::Sat => return Err(GenError::SatInput),
        SatStatus::Unknown => return Err(bad("could not establish unsatisfiability within the budget")),
    }
    let mut keep = vec![true; all.len()];
    let mut exact = true;
    for i in 0..all.len() {
        keep[i] = false;
        let rest: Vec<&Clause> = all.iter().zip(&keep).filter(|(_, &k)| k).map(|(c, _)| *c).collect();
        match is_sat(&rest, max_steps) {
            SatStatus::Unsat => {}
            SatStatus::Sat => keep[i] = true,
            SatStatus::Unknown => {
                keep[i] = true;
                exact = false;
            }
        }
    }
    let kept = all.iter().zip(&keep).filter(|(_, &k)| k).map(|(c, _)| (*c).clone());
    Ok(MusVariant { formula: Formula::new(kept, f.num_vars()), exact })
}
