//! Exact polynomial arithmetic and the matrix/tensor containers built on it.

pub mod matrix;
pub mod parse;
pub mod poly;
pub mod tensor;

pub use matrix::{GaugeElement, PolyMap, PolyMatrix};
pub use parse::ParsePolyError;
pub use poly::{fmt_q, q, q_to_f64, qr, Exponent, Poly};
pub use tensor::{index_tuples, Slot, SlotKind, SlotSymmetry, TensorField};

use crate::error::{Error, Result};

/// Size caps for user-supplied fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_base_dim: usize,
    pub max_fiber_dim: usize,
    pub max_degree: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_base_dim: 8, max_fiber_dim: 8, max_degree: 8 }
    }
}

impl Limits {
    /// Default caps, with the degree cap lowered (never raised) to `degree`.
    pub fn with_degree_cap(degree: Option<u32>) -> Self {
        let mut l = Limits::default();
        if let Some(d) = degree {
            l.max_degree = l.max_degree.min(d);
        }
        l
    }

    pub fn check_base_dim(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.max_base_dim {
            return Err(Error::Limit(format!("base dimension {m} outside 1..={}", self.max_base_dim)));
        }
        Ok(())
    }

    pub fn check_fiber_dim(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.max_fiber_dim {
            return Err(Error::Limit(format!("fiber dimension {n} outside 1..={}", self.max_fiber_dim)));
        }
        Ok(())
    }

    pub fn check_degree(&self, p: &Poly) -> Result<()> {
        if p.degree() > self.max_degree {
            return Err(Error::Limit(format!("polynomial degree {} exceeds cap {}", p.degree(), self.max_degree)));
        }
        Ok(())
    }
}
