//! DPLL with unit propagation and resolution-proof extraction.
//!
//! No clause learning. The branching order is a random permutation of the
//! occurring variables keyed by the seed; the positive polarity is tried
//! first. A refutation is assembled bottom-up: a conflict clause is resolved
//! against the reasons of propagated literals in reverse trail order, and the
//! refutations of the two branches of a decision are resolved on the
//! decision variable.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{resolve, Clause, Formula, Lit};
use crate::proof::{Proof, ProofBuilder};

/// Resource limits for one solver call.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    /// Maximum number of literal assignments.
    pub max_steps: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn steps(n: u64) -> Budget {
        Budget { max_steps: Some(n), deadline: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// Model indexed by variable; index 0 is unused.
    Sat(Vec<bool>),
    Unsat(Proof),
    Timeout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatStatus {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompleteError {
    #[error("clause set is satisfiable")]
    Satisfiable,
    #[error("solver budget exhausted")]
    Timeout,
}

enum Outcome {
    Sat,
    /// Builder index of the refutation clause, when proofs are logged.
    Refuted(Option<usize>),
    Timeout,
}

struct Dpll<'a> {
    clauses: &'a [&'a Clause],
    occurs: Vec<Vec<u32>>,
    value: Vec<i8>,
    trail: Vec<(Lit, Option<u32>)>,
    order: Vec<u32>,
    steps: u64,
    decisions: u64,
    budget: Budget,
    proof: Option<ProofBuilder>,
    axiom_step: Vec<Option<usize>>,
}

impl<'a> Dpll<'a> {
    fn new(clauses: &'a [&'a Clause], seed: u64, budget: Budget, prove: bool) -> Dpll<'a> {
        let num_vars = clauses.iter().map(|c| c.max_var()).max().unwrap_or(0) as usize;
        let mut occurs = vec![Vec::new(); 2 * num_vars + 2];
        let mut present = vec![false; num_vars + 1];
        for (i, c) in clauses.iter().enumerate() {
            for &l in c.lits() {
                occurs[l.code()].push(i as u32);
                present[l.var() as usize] = true;
            }
        }
        let mut order: Vec<u32> = (1..=num_vars as u32).filter(|&v| present[v as usize]).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Dpll {
            clauses,
            occurs,
            value: vec![0; num_vars + 1],
            trail: Vec::new(),
            order,
            steps: 0,
            decisions: 0,
            budget,
            proof: prove.then(ProofBuilder::new),
            axiom_step: vec![None; clauses.len()],
        }
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.var() as usize];
        if l.is_positive() {
            v
        } else {
            -v
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.budget.max_steps.is_some_and(|m| self.steps >= m) {
            return true;
        }
        self.decisions += 1;
        self.decisions.is_multiple_of(64) && self.budget.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn assign(&mut self, l: Lit, reason: Option<u32>) {
        self.steps += 1;
        self.value[l.var() as usize] = if l.is_positive() { 1 } else { -1 };
        self.trail.push((l, reason));
    }

    fn undo(&mut self, mark: usize) {
        for &(l, _) in &self.trail[mark..] {
            self.value[l.var() as usize] = 0;
        }
        self.trail.truncate(mark);
    }

    /// Status of a clause: `Err(())` if falsified, `Ok(Some(l))` if unit on
    /// `l`, `Ok(None)` otherwise.
    fn status(&self, ci: u32) -> Result<Option<Lit>, ()> {
        let mut unit = None;
        for &l in self.clauses[ci as usize].lits() {
            match self.lit_value(l) {
                1 => return Ok(None),
                0 => {
                    if unit.is_some() {
                        return Ok(None);
                    }
                    unit = Some(l);
                }
                _ => {}
            }
        }
        unit.map(Some).ok_or(())
    }

    /// Propagates from trail position `head`; returns a falsified clause.
    fn propagate(&mut self, mut head: usize) -> Option<u32> {
        while head < self.trail.len() {
            let falsified = !self.trail[head].0;
            head += 1;
            for k in 0..self.occurs[falsified.code()].len() {
                let ci = self.occurs[falsified.code()][k];
                match self.status(ci) {
                    Err(()) => return Some(ci),
                    Ok(Some(l)) => self.assign(l, Some(ci)),
                    Ok(None) => {}
                }
            }
        }
        None
    }

    fn initial_propagation(&mut self) -> Option<u32> {
        for ci in 0..self.clauses.len() as u32 {
            match self.status(ci) {
                Err(()) => return Some(ci),
                Ok(Some(l)) if self.clauses[ci as usize].len() == 1 => self.assign(l, Some(ci)),
                _ => {}
            }
        }
        self.propagate(0)
    }

    fn axiom(&mut self, ci: u32) -> usize {
        if let Some(s) = self.axiom_step[ci as usize] {
            return s;
        }
        let s = self
            .proof
            .as_mut()
            .expect("proof logging enabled")
            .axiom(self.clauses[ci as usize]);
        self.axiom_step[ci as usize] = Some(s);
        s
    }

    /// Resolves a falsified clause down to negated decisions.
    fn analyze(&mut self, conflict: u32) -> Option<usize> {
        self.proof.as_ref()?;
        let mut cur = self.axiom(conflict);
        for t in (0..self.trail.len()).rev() {
            let (l, reason) = self.trail[t];
            let Some(reason) = reason else { continue };
            if !self.proof.as_ref().unwrap().clause(cur).contains(!l) {
                continue;
            }
            let r = self.axiom(reason);
            let pb = self.proof.as_mut().unwrap();
            let res = resolve(pb.clause(cur), pb.clause(r)).expect("reason clashes with conflict on one literal");
            cur = pb.resolvent_with(res, cur, r);
        }
        Some(cur)
    }

    fn search(&mut self) -> Outcome {
        let Some(var) = self.order.iter().copied().find(|&v| self.value[v as usize] == 0) else {
            return Outcome::Sat;
        };
        let mut first: Option<usize> = None;
        for positive in [true, false] {
            if self.out_of_budget() {
                return Outcome::Timeout;
            }
            let lit = Lit::new(var, positive);
            let mark = self.trail.len();
            self.assign(lit, None);
            let result = match self.propagate(mark) {
                Some(c) => Outcome::Refuted(self.analyze(c)),
                None => self.search(),
            };
            let refutation = match result {
                Outcome::Refuted(r) => r,
                other => return other,
            };
            self.undo(mark);
            let Some(r) = refutation else {
                continue;
            };
            let pb = self.proof.as_ref().unwrap();
            if !pb.clause(r).contains(!lit) {
                return Outcome::Refuted(Some(r));
            }
            match first {
                None => first = Some(r),
                Some(r1) => {
                    let pb = self.proof.as_mut().unwrap();
                    let res = resolve(pb.clause(r1), pb.clause(r)).expect("branch refutations clash on the decision");
                    return Outcome::Refuted(Some(pb.resolvent_with(res, r1, r)));
                }
            }
        }
        Outcome::Refuted(None)
    }

    fn run(mut self) -> SolveResult {
        if self.budget.max_steps == Some(0) {
            return SolveResult::Timeout;
        }
        let outcome = match self.initial_propagation() {
            Some(c) => Outcome::Refuted(self.analyze(c)),
            None => self.search(),
        };
        match outcome {
            Outcome::Sat => {
                let model = self.value.iter().map(|&v| v > 0).collect();
                SolveResult::Sat(model)
            }
            Outcome::Timeout => SolveResult::Timeout,
            Outcome::Refuted(root) => match (self.proof, root) {
                (Some(pb), Some(root)) => SolveResult::Unsat(pb.finish_at(root)),
                _ => SolveResult::Unsat(Proof::default()),
            },
        }
    }
}

/// Solves a formula without resource limits.
pub fn solve(formula: &Formula, seed: u64) -> SolveResult {
    let refs: Vec<&Clause> = formula.iter().collect();
    solve_clauses(&refs, seed, Budget::unlimited(), true)
}

/// Solves an arbitrary clause list under `budget`.
///
/// With `prove` false the `Unsat` proof is empty.
pub fn solve_clauses(clauses: &[&Clause], seed: u64, budget: Budget, prove: bool) -> SolveResult {
    Dpll::new(clauses, seed, budget, prove).run()
}

/// A refutation of `known` in which every clause of `known` counts as an axiom.
pub fn complete(known: &[&Clause], seed: u64, budget: Budget) -> Result<Proof, CompleteError> {
    match solve_clauses(known, seed, budget, true) {
        SolveResult::Unsat(p) => Ok(p),
        SolveResult::Sat(_) => Err(CompleteError::Satisfiable),
        SolveResult::Timeout => Err(CompleteError::Timeout),
    }
}

/// Decision-only satisfiability test with a step budget.
pub fn is_sat(clauses: &[&Clause], max_steps: u64) -> SatStatus {
    is_sat_within(clauses, Budget::steps(max_steps))
}

pub fn is_sat_within(clauses: &[&Clause], budget: Budget) -> SatStatus {
    match solve_clauses(clauses, 0, budget, false) {
        SolveResult::Sat(_) => SatStatus::Sat,
        SolveResult::Unsat(_) => SatStatus::Unsat,
        SolveResult::Timeout => SatStatus::Unknown,
    }
}

/// Clauses whose removal provably makes `clauses` satisfiable.
///
/// Returns positions into `clauses`. Removals whose status stays unknown
/// within `max_steps` are left out.
pub fn correcting_indices(clauses: &[&Clause], max_steps: u64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut rest: Vec<&Clause> = Vec::with_capacity(clauses.len());
    for i in 0..clauses.len() {
        rest.clear();
        rest.extend(clauses.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, c)| *c));
        if is_sat(&rest, max_steps) == SatStatus::Sat {
            out.push(i);
        }
    }
    out
}

pub fn correcting_clauses(clauses: &[&Clause], max_steps: u64) -> Vec<Clause> {
    correcting_indices(clauses, max_steps)
        .into_iter()
        .map(|i| clauses[i].clone())
        .collect()
}
