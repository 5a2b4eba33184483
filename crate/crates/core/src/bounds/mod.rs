//! Lower bounds on the length of proofs compatible with a subproblem.

mod smus;

pub use smus::{smus_lower_bound, SmusError, SmusLimits, SmusResult};

use crate::cnf::Formula;

/// Which expression produced a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// `2·#F − 1` for a minimally unsatisfiable formula.
    MusCount,
    /// `#Known + SMUS(Known; U) − 1`, minimally unsatisfiable input.
    MusSubproblem,
    /// `SMUS(F; F_used ∪ F_corr) + #(Known ∖ F) + SMUS(Known; U) − 1`.
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundResult {
    pub value: usize,
    /// Every SMUS term was computed to optimality.
    pub exact: bool,
    pub provenance: Provenance,
}

/// Length lower bound for a minimally unsatisfiable formula.
pub fn mus_bound(f: &Formula) -> usize {
    (2 * f.len()).saturating_sub(1)
}

/// `#Known + SMUS(Known; U) − 1`.
pub fn mus_subproblem_bound(known_count: usize, known_smus: SmusResult) -> BoundResult {
    BoundResult {
        value: (known_count + known_smus.lower).saturating_sub(1),
        exact: known_smus.exact,
        provenance: Provenance::MusSubproblem,
    }
}

/// `SMUS(F; F_used ∪ F_corr) + #(Known ∖ F) + SMUS(Known; U) − 1`.
pub fn general_bound(axiom_smus: SmusResult, derived_count: usize, known_smus: SmusResult) -> BoundResult {
    BoundResult {
        value: (axiom_smus.lower + derived_count + known_smus.lower).saturating_sub(1),
        exact: axiom_smus.exact && known_smus.exact,
        provenance: Provenance::General,
    }
}
