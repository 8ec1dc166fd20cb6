//! Exact invariants of finitely presented groups.
//!
//! The crate computes rational lower-central-series data through a truncated
//! Magnus algebra, level-one ranks of the torsion-free derived series through
//! Fox calculus over Laurent rings, Dwyer-quotient dimensions through the
//! Chevalley–Eilenberg homology of the associated graded Lie algebra, and
//! Milnor μ̄-invariants of links. Every number is exact: integers are
//! arbitrary precision and linear algebra runs over ℚ or over the fraction
//! field of a Laurent polynomial ring.
//!
//! Theorem-style checks (Stallings, Dwyer, Strebel-type rank inequalities)
//! are exposed as verdict reports that separate checked hypotheses from
//! user-assumed ones and raise a `falsification` flag if a conclusion fails
//! under verified hypotheses.

pub mod cclab;
pub mod error;
pub mod exactlin;
pub mod fox;
pub mod freesolv;
pub mod laurent;
pub mod liehom;
pub mod milnor;
pub mod nilq;
pub mod par;
pub mod presentations;
pub mod report;

pub use error::{Error, ParseError, Result};
pub use nilq::Bounds;
pub use par::Exec;
pub use presentations::{GroupHom, Presentation, Word};
