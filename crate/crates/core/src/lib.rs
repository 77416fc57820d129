//! Exact-arithmetic tensor calculus for curvature-type obstructions to local
//! equivalence.
//!
//! Every field is a polynomial over ℚ, so the classical identities
//! (d² = 0, Bianchi, gauge covariance, Weyl trace-freeness, ...) hold as exact
//! equalities. On top of the field-level operators sit jets at a point, the
//! group actions on those jets, and the normal-form reductions whose
//! invariants are the curvature tensors themselves.

pub mod curvature;
pub mod error;
pub mod fd;
pub mod gen;
pub mod jets;
pub mod linalg;
pub mod orbits;
pub mod polyfield;
pub mod supergeometry;

pub use error::{Error, Result};
pub use linalg::QMatrix;
pub use polyfield::{GaugeElement, Limits, Poly, PolyMap, PolyMatrix, Slot, SlotKind, SlotSymmetry, TensorField};

/// Exact rational scalar.
pub type Q = num_rational::BigRational;
