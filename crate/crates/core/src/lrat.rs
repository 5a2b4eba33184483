//! LRAT certificates expanded into resolution proofs.
//!
//! Every addition line is replayed by resolving its hint clauses from the
//! last one backwards. The number of resolvents is counted twice: once
//! for every step and once skipping clauses seen before.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{pivot, resolve, Clause, Lit};
use crate::dimacs::DimacsCnf;
use crate::proof::{Proof, ProofBuilder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LratLine {
    pub id: u64,
    /// `None` on deletion lines.
    pub clause: Option<Clause>,
    pub hints: Vec<u64>,
    pub is_deletion: bool,
    pub deleted_ids: Vec<u64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LratError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: RAT hints are not supported")]
    UnsupportedRat { line: usize },
    #[error("clause {id}: {msg}")]
    InvalidCertificate { id: u64, msg: String },
}

/// Lengths measured on one certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureReport {
    pub raw_length: usize,
    pub dedup_length: usize,
    pub axioms_used: usize,
}

impl MeasureReport {
    pub fn to_key_value(&self) -> String {
        format!("raw={} dedup={} axioms={}", self.raw_length, self.dedup_length, self.axioms_used)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub proof: Proof,
    pub raw_steps: usize,
    pub dedup_steps: usize,
}

pub fn parse_lrat(text: &[u8]) -> Result<Vec<LratLine>, LratError> {
    let text = std::str::from_utf8(text).map_err(|_| LratError::Malformed { line: 0, msg: "not UTF-8".into() })?;
    let mut out = Vec::new();
    let mut last_id = 0u64;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let bad = |msg: &str| LratError::Malformed { line, msg: msg.to_string() };
        let mut tokens = trimmed.split_whitespace();
        let id: u64 = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("missing clause id"))?;
        let rest: Vec<&str> = tokens.collect();
        if rest.first() == Some(&"d") {
            let ids = parse_ids(&rest[1..], line)?;
            let (deleted, tail) = split_at_zero(&ids).ok_or_else(|| bad("deletion list not terminated by 0"))?;
            if !tail.is_empty() {
                return Err(bad("trailing tokens after deletion list"));
            }
            out.push(LratLine {
                id,
                clause: None,
                hints: vec![],
                is_deletion: true,
                deleted_ids: deleted.iter().map(|&v| v as u64).collect(),
            });
            continue;
        }
        let values = parse_ids(&rest, line)?;
        let (lits, tail) = split_at_zero(&values).ok_or_else(|| bad("clause not terminated by 0"))?;
        let (hints, tail) = split_at_zero(tail).ok_or_else(|| bad("hint list not terminated by 0"))?;
        if !tail.is_empty() {
            return Err(bad("trailing tokens after hint list"));
        }
        if hints.iter().any(|&h| h < 0) {
            return Err(LratError::UnsupportedRat { line });
        }
        if id <= last_id {
            return Err(bad("clause ids must increase"));
        }
        last_id = id;
        let lits: Vec<i32> = lits
            .iter()
            .map(|&v| i32::try_from(v).map_err(|_| bad("literal out of range")))
            .collect::<Result<_, _>>()?;
        let clause = Clause::from_dimacs(&lits).ok_or_else(|| bad("tautological clause"))?;
        out.push(LratLine {
            id,
            clause: Some(clause),
            hints: hints.iter().map(|&h| h as u64).collect(),
            is_deletion: false,
            deleted_ids: vec![],
        });
    }
    Ok(out)
}

fn parse_ids(tokens: &[&str], line: usize) -> Result<Vec<i64>, LratError> {
    tokens
        .iter()
        .map(|t| t.parse::<i64>().map_err(|_| LratError::Malformed { line, msg: format!("invalid token `{t}`") }))
        .collect()
}

fn split_at_zero(values: &[i64]) -> Option<(&[i64], &[i64])> {
    let pos = values.iter().position(|&v| v == 0)?;
    Some((&values[..pos], &values[pos + 1..]))
}

struct Expander<'a> {
    cnf: &'a DimacsCnf,
    derived: HashMap<u64, Clause>,
    steps: HashMap<u64, usize>,
    builder: ProofBuilder,
    seen: HashSet<Clause>,
    axioms: HashSet<Clause>,
    raw: usize,
    dedup: usize,
}

impl Expander<'_> {
    fn clause(&self, id: u64, at: u64) -> Result<Clause, LratError> {
        if let Some(c) = self.derived.get(&id) {
            return Ok(c.clone());
        }
        let axiom = (id as usize)
            .checked_sub(1)
            .and_then(|i| self.cnf.clauses.get(i))
            .ok_or_else(|| LratError::InvalidCertificate { id: at, msg: format!("unknown hint {id}") })?;
        axiom
            .clone()
            .ok_or_else(|| LratError::InvalidCertificate { id: at, msg: format!("hint {id} is tautological") })
    }

    fn step(&mut self, id: u64, clause: &Clause) -> usize {
        if let Some(&s) = self.steps.get(&id) {
            return s;
        }
        let s = self.builder.axiom(clause);
        self.seen.insert(clause.clone());
        self.steps.insert(id, s);
        s
    }

    fn replay(&mut self, line: &LratLine) -> Result<usize, LratError> {
        let invalid = |msg: String| LratError::InvalidCertificate { id: line.id, msg };
        let stated = line.clause.as_ref().expect("addition line");
        let (&last, earlier) = line.hints.split_last().ok_or_else(|| invalid("empty hint list".into()))?;
        let mut acc = self.clause(last, line.id)?;
        let mut acc_step = self.step(last, &acc);
        for &h in earlier.iter().rev() {
            let hint = self.clause(h, line.id)?;
            let clashes = acc.lits().iter().filter(|&&l| hint.contains(!l)).count();
            if clashes == 0 {
                continue;
            }
            if clashes > 1 || pivot(&acc, &hint).is_none() {
                return Err(invalid(format!("hint {h} clashes on more than one variable")));
            }
            let r = resolve(&acc, &hint).ok_or_else(|| invalid(format!("hint {h} does not resolve")))?;
            let hint_step = self.step(h, &hint);
            self.raw += 1;
            let is_axiom = self.axioms.contains(&r);
            if self.seen.insert(r.clone()) && !is_axiom {
                self.dedup += 1;
            }
            acc_step = if is_axiom {
                self.builder.axiom(&r)
            } else {
                self.builder.resolvent_with(r.clone(), acc_step, hint_step)
            };
            acc = r;
        }
        if !acc.lits().iter().all(|&l: &Lit| stated.contains(l)) {
            return Err(invalid(format!("hints derive {acc}, not a subset of the stated clause")));
        }
        self.derived.insert(line.id, acc);
        self.steps.insert(line.id, acc_step);
        Ok(acc_step)
    }
}

/// Replays a certificate up to its first empty clause.
///
/// With `strict` set every hint must name a clause that is still alive.
pub fn expand_to_resolution(cnf: &DimacsCnf, lines: &[LratLine], strict: bool) -> Result<Expansion, LratError> {
    let mut ex = Expander {
        cnf,
        derived: HashMap::new(),
        steps: HashMap::new(),
        builder: ProofBuilder::new(),
        seen: HashSet::new(),
        axioms: cnf.clauses.iter().flatten().cloned().collect(),
        raw: 0,
        dedup: 0,
    };
    if let Some(pos) = cnf.clauses.iter().position(|c| c.as_ref().is_some_and(Clause::is_empty)) {
        let root = ex.step(pos as u64 + 1, &Clause::empty());
        return Ok(Expansion { proof: ex.builder.finish_at(root), raw_steps: 0, dedup_steps: 0 });
    }
    let mut alive: HashSet<u64> = (1..=cnf.clauses.len() as u64).collect();
    for line in lines {
        if line.is_deletion {
            if strict {
                for d in &line.deleted_ids {
                    if !alive.remove(d) {
                        return Err(LratError::InvalidCertificate { id: line.id, msg: format!("deletes dead clause {d}") });
                    }
                }
            }
            continue;
        }
        if strict {
            if let Some(h) = line.hints.iter().find(|h| !alive.contains(h)) {
                return Err(LratError::InvalidCertificate { id: line.id, msg: format!("hint {h} is not alive") });
            }
            alive.insert(line.id);
        }
        let step = ex.replay(line)?;
        if ex.builder.clause(step).is_empty() {
            let proof = ex.builder.into_proof();
            return Ok(Expansion { proof, raw_steps: ex.raw, dedup_steps: ex.dedup });
        }
    }
    Err(LratError::InvalidCertificate { id: lines.last().map_or(0, |l| l.id), msg: "no empty clause derived".into() })
}

pub fn measure(cnf: &DimacsCnf, lrat: &[u8]) -> Result<MeasureReport, LratError> {
    let lines = parse_lrat(lrat)?;
    let ex = expand_to_resolution(cnf, &lines, false)?;
    let axioms_used = ex.proof.axiom_count();
    Ok(MeasureReport {
        raw_length: axioms_used + ex.raw_steps,
        dedup_length: axioms_used + ex.dedup_steps,
        axioms_used,
    })
}
