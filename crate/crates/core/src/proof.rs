//! Resolution proofs: representation, checking, trimming and the line-based
//! text format.
//!
//! A proof is a sequence of steps. Each step is either an axiom taken from the
//! formula or the resolvent of two earlier steps, and the last step must be
//! the empty clause. Its length is the number of steps.
//!
//! Text format, one step per line with 1-based ascending ids:
//!
//! ```text
//! <id> <lit>* 0 <left> <right> 0     resolvent of steps <left> and <right>
//! <id> <lit>* 0 0                    axiom
//! ```

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::cnf::{resolve, Clause, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Premises {
    Axiom,
    /// 0-based indices of earlier steps.
    Resolvent { left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProofStep {
    pub clause: Clause,
    pub premises: Premises,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Proof {
    steps: Vec<ProofStep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvalidReason {
    AxiomNotInFormula,
    BadResolvent,
    PremiseOutOfOrder,
    MissingEmptyClause,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvalidReason::AxiomNotInFormula => "axiom-not-in-formula",
            InvalidReason::BadResolvent => "bad-resolvent",
            InvalidReason::PremiseOutOfOrder => "premise-out-of-order",
            InvalidReason::MissingEmptyClause => "missing-empty-clause",
        })
    }
}

/// Outcome of [`verify_proof`]. `step` is the 1-based id of the first bad
/// step (0 for an empty proof).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid { step: usize, reason: InvalidReason },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Checks `proof` against `formula`.
///
/// Redundant steps (never used later) are accepted.
pub fn verify_proof(formula: &Formula, proof: &Proof) -> Verdict {
    for (i, step) in proof.steps.iter().enumerate() {
        let invalid = |reason| Verdict::Invalid { step: i + 1, reason };
        match step.premises {
            Premises::Axiom => {
                if !formula.contains(&step.clause) {
                    return invalid(InvalidReason::AxiomNotInFormula);
                }
            }
            Premises::Resolvent { left, right } => {
                if left >= i || right >= i {
                    return invalid(InvalidReason::PremiseOutOfOrder);
                }
                let derived = resolve(&proof.steps[left].clause, &proof.steps[right].clause);
                if derived.as_ref() != Some(&step.clause) {
                    return invalid(InvalidReason::BadResolvent);
                }
            }
        }
    }
    match proof.steps.last() {
        Some(last) if last.clause.is_empty() => Verdict::Valid,
        _ => Verdict::Invalid {
            step: proof.steps.len(),
            reason: InvalidReason::MissingEmptyClause,
        },
    }
}

impl Proof {
    pub fn from_steps(steps: Vec<ProofStep>) -> Proof {
        Proof { steps }
    }

    pub fn steps(&self) -> &[ProofStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn axiom_count(&self) -> usize {
        self.steps.iter().filter(|s| s.premises == Premises::Axiom).count()
    }

    /// Clauses introduced by resolution, in step order.
    pub fn derived_clauses(&self) -> Vec<Clause> {
        self.steps
            .iter()
            .filter(|s| s.premises != Premises::Axiom)
            .map(|s| s.clause.clone())
            .collect()
    }

    /// Keeps only the steps the last step depends on, preserving order.
    pub fn trimmed(&self) -> Proof {
        let Some(last) = self.steps.len().checked_sub(1) else {
            return Proof::default();
        };
        let mut needed = vec![false; self.steps.len()];
        needed[last] = true;
        for i in (0..=last).rev() {
            if !needed[i] {
                continue;
            }
            if let Premises::Resolvent { left, right } = self.steps[i].premises {
                needed[left] = true;
                needed[right] = true;
            }
        }
        let mut remap = vec![usize::MAX; self.steps.len()];
        let mut steps = Vec::new();
        for (i, step) in self.steps.iter().enumerate() {
            if !needed[i] {
                continue;
            }
            remap[i] = steps.len();
            let premises = match step.premises {
                Premises::Axiom => Premises::Axiom,
                Premises::Resolvent { left, right } => Premises::Resolvent {
                    left: remap[left],
                    right: remap[right],
                },
            };
            steps.push(ProofStep { clause: step.clause.clone(), premises });
        }
        Proof { steps }
    }

    /// Serializes into the line-based text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            let _ = write!(out, "{}", i + 1);
            for l in step.clause.lits() {
                let _ = write!(out, " {l}");
            }
            match step.premises {
                Premises::Axiom => out.push_str(" 0 0\n"),
                Premises::Resolvent { left, right } => {
                    let _ = writeln!(out, " 0 {} {} 0", left + 1, right + 1);
                }
            }
        }
        out
    }

    /// Parses the line-based text format.
    pub fn parse_text(text: &str) -> Result<Proof, ProofParseError> {
        let mut steps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let err = |msg: &str| ProofParseError { line, msg: msg.to_string() };
            let nums: Vec<i64> = trimmed
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| err("non-integer token")))
                .collect::<Result<_, _>>()?;
            let id = *nums.first().ok_or_else(|| err("missing id"))?;
            if id != steps.len() as i64 + 1 {
                return Err(err("ids must be consecutive starting at 1"));
            }
            let rest = &nums[1..];
            let zero = rest.iter().position(|&v| v == 0).ok_or_else(|| err("missing 0 after literals"))?;
            let lits: Vec<i32> = rest[..zero]
                .iter()
                .map(|&v| i32::try_from(v).map_err(|_| err("literal out of range")))
                .collect::<Result<_, _>>()?;
            let clause = Clause::from_dimacs(&lits).ok_or_else(|| err("tautological clause"))?;
            let premises = match &rest[zero + 1..] {
                [0] => Premises::Axiom,
                [l, r, 0] if *l >= 1 && *r >= 1 => Premises::Resolvent {
                    left: (*l - 1) as usize,
                    right: (*r - 1) as usize,
                },
                _ => return Err(err("expected `0` or `<left> <right> 0` after the literals")),
            };
            steps.push(ProofStep { clause, premises });
        }
        Ok(Proof { steps })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ProofParseError {
    pub line: usize,
    pub msg: String,
}

/// Incremental proof construction that never repeats a clause.
///
/// Adding a clause that is already present returns the index of the
/// existing step.
#[derive(Debug, Default, Clone)]
pub struct ProofBuilder {
    steps: Vec<ProofStep>,
    index: HashMap<Clause, usize>,
}

impl ProofBuilder {
    pub fn new() -> ProofBuilder {
        ProofBuilder::default()
    }

    pub fn find(&self, clause: &Clause) -> Option<usize> {
        self.index.get(clause).copied()
    }

    pub fn clause(&self, idx: usize) -> &Clause {
        &self.steps[idx].clause
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn axiom(&mut self, clause: &Clause) -> usize {
        if let Some(i) = self.find(clause) {
            return i;
        }
        self.push(clause.clone(), Premises::Axiom)
    }

    /// Adds `resolve(left, right)`; the pair must be resolvable.
    pub fn resolvent(&mut self, left: usize, right: usize) -> usize {
        let clause = resolve(&self.steps[left].clause, &self.steps[right].clause)
            .expect("premises must clash on exactly one variable");
        self.resolvent_with(clause, left, right)
    }

    /// Adds a resolvent the caller already computed.
    pub fn resolvent_with(&mut self, clause: Clause, left: usize, right: usize) -> usize {
        if let Some(i) = self.find(&clause) {
            return i;
        }
        self.push(clause, Premises::Resolvent { left, right })
    }

    fn push(&mut self, clause: Clause, premises: Premises) -> usize {
        let i = self.steps.len();
        self.index.insert(clause.clone(), i);
        self.steps.push(ProofStep { clause, premises });
        i
    }

    /// Finishes with the proof trimmed to the dependencies of step `root`.
    pub fn finish_at(mut self, root: usize) -> Proof {
        self.steps.truncate(root + 1);
        Proof { steps: self.steps }.trimmed()
    }

    pub fn into_proof(self) -> Proof {
        Proof { steps: self.steps }
    }
}
