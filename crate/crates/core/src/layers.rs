//! Layer lists: the canonical, order-free grouping of a proof's clauses.
//!
//! Layer 0 is the formula. Every clause of layer `j ≥ 1` is a resolvent of a
//! clause from layer `j − 1` with a clause from some layer `< j`, and no
//! clause could have been placed in an earlier layer. Given the set of
//! derived clauses there is exactly one such list.

use std::collections::HashSet;

use thiserror::Error;

use crate::cnf::{resolve, Clause, Formula};
use crate::proof::{Premises, Proof, ProofStep};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LayerList {
    layers: Vec<Vec<Clause>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayerError {
    #[error("{remaining} derived clauses cannot be placed in layer {layer}")]
    NotAProofSet { layer: usize, remaining: usize },
}

/// Which layer-list property a candidate violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerViolation {
    Initialization,
    EmptyLayer { layer: usize },
    Duplicate { layer: usize },
    Consistency { layer: usize },
    TakeItOrLeaveIt { layer: usize },
}

impl LayerList {
    pub fn layers(&self) -> &[Vec<Clause>] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Total number of clauses over all layers.
    pub fn clause_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Builds a layer list without checking its properties.
    pub fn from_layers_unchecked(layers: Vec<Vec<Clause>>) -> LayerList {
        let layers = layers
            .into_iter()
            .map(|mut l| {
                l.sort();
                l
            })
            .collect();
        LayerList { layers }
    }

    /// Checks all layer-list properties against `formula`.
    pub fn validate(&self, formula: &Formula) -> Result<(), LayerViolation> {
        let Some(first) = self.layers.first() else {
            return Err(LayerViolation::Initialization);
        };
        if first.as_slice() != formula.clauses() {
            return Err(LayerViolation::Initialization);
        }
        let mut seen: HashSet<&Clause> = first.iter().collect();
        let mut earlier: Vec<&Clause> = first.iter().collect();
        let mut delta: HashSet<Clause> = HashSet::new();
        for (j, layer) in self.layers.iter().enumerate().skip(1) {
            if layer.is_empty() {
                return Err(LayerViolation::EmptyLayer { layer: j });
            }
            let prev = &self.layers[j - 1];
            let reach = resolvents(prev.iter(), &earlier);
            for c in layer {
                if !seen.insert(c) {
                    return Err(LayerViolation::Duplicate { layer: j });
                }
                if delta.contains(c) {
                    return Err(LayerViolation::TakeItOrLeaveIt { layer: j });
                }
                if !reach.contains(c) {
                    return Err(LayerViolation::Consistency { layer: j });
                }
            }
            delta.extend(reach);
            earlier.extend(layer.iter());
        }
        Ok(())
    }
}

fn resolvents<'a>(left: impl Iterator<Item = &'a Clause>, right: &[&Clause]) -> HashSet<Clause> {
    let mut out = HashSet::new();
    for a in left {
        for b in right {
            if let Some(r) = resolve(a, b) {
                out.insert(r);
            }
        }
    }
    out
}

/// Arranges `derived` into its unique layer list over `formula`.
///
/// Clauses of `derived` that are already axioms are ignored.
pub fn canonical_layer_list(formula: &Formula, derived: &[Clause]) -> Result<LayerList, LayerError> {
    let mut remaining: HashSet<Clause> = derived
        .iter()
        .filter(|c| !formula.contains(c))
        .cloned()
        .collect();
    let mut layers = vec![formula.clauses().to_vec()];
    let mut earlier: Vec<Clause> = formula.clauses().to_vec();
    while !remaining.is_empty() {
        let prev = layers.last().expect("layer 0 exists");
        let mut next = Vec::new();
        for a in prev {
            for b in &earlier {
                if let Some(r) = resolve(a, b) {
                    if remaining.remove(&r) {
                        next.push(r);
                    }
                }
            }
        }
        if next.is_empty() {
            return Err(LayerError::NotAProofSet {
                layer: layers.len(),
                remaining: remaining.len(),
            });
        }
        next.sort();
        earlier.extend(next.iter().cloned());
        layers.push(next);
    }
    Ok(LayerList { layers })
}

/// Writes a layer list out as a proof, layer by layer.
///
/// Each derived clause takes the lexicographically smallest pair of earlier
/// step indices that resolves to it.
pub fn layers_to_proof(list: &LayerList) -> Proof {
    let mut steps: Vec<ProofStep> = Vec::with_capacity(list.clause_count());
    if let Some(first) = list.layers.first() {
        for c in first {
            steps.push(ProofStep { clause: c.clone(), premises: Premises::Axiom });
        }
    }
    for layer in list.layers.iter().skip(1) {
        let base = steps.len();
        let mut placed = Vec::with_capacity(layer.len());
        for c in layer {
            let premises = first_derivation(&steps[..base], c)
                .expect("layer clause must be a resolvent of earlier clauses");
            placed.push(ProofStep { clause: c.clone(), premises });
        }
        steps.extend(placed);
    }
    Proof::from_steps(steps)
}

fn first_derivation(steps: &[ProofStep], target: &Clause) -> Option<Premises> {
    for (l, a) in steps.iter().enumerate() {
        for (r, b) in steps.iter().enumerate().skip(l + 1) {
            if resolve(&a.clause, &b.clause).as_ref() == Some(target) {
                return Some(Premises::Resolvent { left: l, right: r });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::verify_proof;

    fn c(v: &[i32]) -> Clause {
        Clause::from_dimacs(v).unwrap()
    }

    // x=1 y=2 z=3 t=4
    fn seven_axioms() -> Formula {
        Formula::from_dimacs(&[
            &[2, -4],
            &[1, 2, 3, 4],
            &[-1, 2],
            &[-2, 3],
            &[-3, 4],
            &[-1, -4],
            &[1, -2],
        ])
    }

    fn seven_axioms_derived() -> Vec<Clause> {
        vec![
            c(&[-1, 3]),
            c(&[2, 3, 4]),
            c(&[-1, 4]),
            c(&[2, 4]),
            c(&[2]),
            c(&[-1]),
            c(&[-2]),
            Clause::empty(),
        ]
    }

    #[test]
    fn seven_axiom_layers() {
        let f = seven_axioms();
        let list = canonical_layer_list(&f, &seven_axioms_derived()).unwrap();
        let expected = vec![
            f.clauses().to_vec(),
            vec![c(&[-1, 3]), c(&[2, 3, 4])],
            vec![c(&[-1, 4]), c(&[2, 4])],
            vec![c(&[-1]), c(&[2])],
            vec![c(&[-2])],
            vec![Clause::empty()],
        ];
        let expected = LayerList::from_layers_unchecked(expected);
        assert_eq!(list, expected);
        assert_eq!(list.validate(&f), Ok(()));
        let proof = layers_to_proof(&list);
        assert_eq!(proof.len(), 15);
        assert!(verify_proof(&f, &proof).is_valid());
    }

    #[test]
    fn two_step_example() {
        let f = Formula::from_dimacs(&[&[1, -2], &[-1], &[2]]);
        let list = canonical_layer_list(&f, &[Clause::empty(), c(&[-2])]).unwrap();
        assert_eq!(list.layers()[1], vec![c(&[-2])]);
        assert_eq!(list.layers()[2], vec![Clause::empty()]);
        let proof = layers_to_proof(&list);
        assert_eq!(proof.len(), 5);
        assert!(verify_proof(&f, &proof).is_valid());
    }

    #[test]
    fn empty_derivations_give_single_layer() {
        let f = Formula::from_dimacs(&[&[], &[1]]);
        let list = canonical_layer_list(&f, &[]).unwrap();
        assert_eq!(list.depth(), 1);
    }

    #[test]
    fn unreachable_clause_is_rejected() {
        let f = Formula::from_dimacs(&[&[1, -2], &[-1], &[2]]);
        assert_eq!(
            canonical_layer_list(&f, &[c(&[5])]),
            Err(LayerError::NotAProofSet { layer: 1, remaining: 1 })
        );
    }

    #[test]
    fn late_placement_violates_take_it_or_leave_it() {
        let f = seven_axioms();
        let mut layers = canonical_layer_list(&f, &seven_axioms_derived()).unwrap().layers;
        let moved = layers[1].pop().unwrap();
        layers[2].push(moved);
        let bad = LayerList::from_layers_unchecked(layers);
        assert!(matches!(
            bad.validate(&f),
            Err(LayerViolation::TakeItOrLeaveIt { layer: 2 }) | Err(LayerViolation::Consistency { .. })
        ));
    }
}
