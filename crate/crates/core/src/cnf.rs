//! Literals, clauses and formulas in canonical form, together with the
//! resolution rule, subsumption and frontier computation.

use std::fmt;

/// A propositional literal.
///
/// Encoded as `2 * variable + polarity`, so the derived ordering sorts by
/// variable index first and puts the negative literal before the positive one.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    /// Builds a literal. Panics if `var` is zero.
    pub fn new(var: u32, positive: bool) -> Lit {
        assert!(var >= 1, "variable indices start at 1");
        Lit(var * 2 + positive as u32)
    }

    /// Converts a non-zero DIMACS integer.
    pub fn from_dimacs(value: i32) -> Lit {
        assert!(value != 0, "0 is not a literal");
        Lit::new(value.unsigned_abs(), value > 0)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var() as i32;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    /// Dense index usable for per-literal tables: `2 * var + polarity`.
    pub fn code(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A clause: a sorted, duplicate-free, non-tautological set of literals.
///
/// The empty clause is the falsum. Equality, hashing and ordering all come
/// from the canonical literal sequence.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// The empty clause.
    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    /// Canonicalizes `lits`. Returns `None` for tautologies.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Option<Clause> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return None;
        }
        Some(Clause { lits })
    }

    /// Canonicalizes a list of DIMACS integers (no terminating zero).
    pub fn from_dimacs(values: &[i32]) -> Option<Clause> {
        Clause::new(values.iter().map(|&v| Lit::from_dimacs(v)))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    pub fn max_var(&self) -> u32 {
        self.lits.last().map_or(0, |l| l.var())
    }

    /// True iff every literal of `self` occurs in `other`.
    pub fn subsumes(&self, other: &Clause) -> bool {
        subsumes(self, other)
    }

    /// Whether the clause is satisfied by `model`, indexed by variable.
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.lits
            .iter()
            .any(|l| model.get(l.var() as usize).copied() == Some(l.is_positive()))
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.lits.iter()).finish()
    }
}

impl fmt::Display for Clause {
    /// Space-separated DIMACS literals, without the terminating zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Resolves two clauses.
///
/// Returns the resolvent when the clauses clash on exactly one variable.
/// Clauses with no clash, or with two or more clashes (whose resolvent would
/// be a tautology), yield `None`.
pub fn resolve(a: &Clause, b: &Clause) -> Option<Clause> {
    let (x, y) = (&a.lits, &b.lits);
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    let mut clashes = 0;
    while i < x.len() && j < y.len() {
        let (l, r) = (x[i], y[j]);
        if l.var() < r.var() {
            out.push(l);
            i += 1;
        } else if r.var() < l.var() {
            out.push(r);
            j += 1;
        } else {
            if l == r {
                out.push(l);
            } else {
                clashes += 1;
                if clashes > 1 {
                    return None;
                }
            }
            i += 1;
            j += 1;
        }
    }
    if clashes != 1 {
        return None;
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    Some(Clause { lits: out })
}

/// The pivot variable of `resolve(a, b)` if the clauses are resolvable.
pub fn pivot(a: &Clause, b: &Clause) -> Option<u32> {
    let mut found = None;
    for &l in &a.lits {
        if b.contains(!l) {
            if found.is_some() {
                return None;
            }
            found = Some(l.var());
        }
    }
    found
}

/// `a ⊆ b` as literal sets.
pub fn subsumes(a: &Clause, b: &Clause) -> bool {
    if a.lits.len() > b.lits.len() {
        return false;
    }
    let mut j = 0;
    for &l in &a.lits {
        while j < b.lits.len() && b.lits[j] < l {
            j += 1;
        }
        if j == b.lits.len() || b.lits[j] != l {
            return false;
        }
        j += 1;
    }
    true
}

/// Indices of the clauses that strictly contain no other clause of the input.
///
/// Equal clauses do not exclude each other.
pub fn frontier_indices(clauses: &[&Clause]) -> Vec<usize> {
    let mut by_len: Vec<usize> = (0..clauses.len()).collect();
    by_len.sort_by_key(|&i| clauses[i].len());
    let mut keep = Vec::new();
    for (pos, &i) in by_len.iter().enumerate() {
        let c = clauses[i];
        let dominated = by_len[..pos]
            .iter()
            .map(|&k| clauses[k])
            .any(|d| d.len() < c.len() && subsumes(d, c));
        if !dominated {
            keep.push(i);
        }
    }
    keep.sort_unstable();
    keep
}

/// The frontier of a clause set: its members with no proper subset in the set.
pub fn frontier(clauses: &[Clause]) -> Vec<Clause> {
    let refs: Vec<&Clause> = clauses.iter().collect();
    frontier_indices(&refs)
        .into_iter()
        .map(|i| clauses[i].clone())
        .collect()
}

/// A CNF formula: a set of distinct clauses, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Formula {
    clauses: Vec<Clause>,
    num_vars: u32,
}

impl Formula {
    /// Builds a formula, merging duplicate clauses. `num_vars` is raised to
    /// the largest variable that occurs.
    pub fn new(clauses: impl IntoIterator<Item = Clause>, num_vars: u32) -> Formula {
        let mut clauses: Vec<Clause> = clauses.into_iter().collect();
        clauses.sort_unstable();
        clauses.dedup();
        let max_seen = clauses.iter().map(Clause::max_var).max().unwrap_or(0);
        Formula {
            clauses,
            num_vars: num_vars.max(max_seen),
        }
    }

    /// Builds a formula from DIMACS integer lists, dropping tautologies.
    pub fn from_dimacs(clauses: &[&[i32]]) -> Formula {
        Formula::new(clauses.iter().filter_map(|c| Clause::from_dimacs(c)), 0)
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.clauses.binary_search(clause).is_ok()
    }

    pub fn contains_empty(&self) -> bool {
        self.clauses.first().is_some_and(Clause::is_empty)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Clause> {
        self.clauses.iter()
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.clauses.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a Formula {
    type Item = &'a Clause;
    type IntoIter = std::slice::Iter<'a, Clause>;

    fn into_iter(self) -> Self::IntoIter {
        self.clauses.iter()
    }
}
