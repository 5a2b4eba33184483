//! Short and shortest resolution proofs of unsatisfiability.
//!
//! The crate searches over layer-list prefixes of resolution proofs with a
//! best-first branch-and-bound, pruning by frontier restriction, dominance
//! and lower bounds derived from smallest unsatisfiable subsets. It also
//! verifies resolution proofs, measures the resolution length of LRAT
//! certificates and generates synthetic benchmark formulas.
//!
//! ```
//! use resmin::cnf::Formula;
//! use resmin::search::{minimize, SearchConfig};
//!
//! let f = Formula::from_dimacs(&[&[1, -2], &[-1], &[2]]);
//! let outcome = minimize(&f, &SearchConfig::optimal()).unwrap();
//! assert_eq!(outcome.incumbent_length, 5);
//! assert!(outcome.optimal);
//! ```

pub mod bounds;
pub mod cli;
pub mod cnf;
pub mod dimacs;
pub mod generators;
pub mod layers;
pub mod lrat;
pub mod proof;
pub mod sat;
pub mod search;

pub use cnf::{Clause, Formula, Lit};
pub use proof::{verify_proof, Proof, Verdict};
