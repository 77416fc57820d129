//! Differential forms, linear connections and their curvature.
//!
//! Form components are stored for every index tuple (no 1/k! factors), and
//! the exterior derivative uses the alternating sum
//! (dω)_{μ₀…μ_k} = Σ_j (−1)^j ∂_{μ_j} ω_{μ₀…μ̂_j…μ_k}.

use crate::error::{arg_err, Error, Result};
use crate::polyfield::{index_tuples, Poly, PolyMatrix, Slot, SlotKind, SlotSymmetry, TensorField};

fn omit(idx: &[usize], j: usize) -> Vec<usize> {
    idx.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v).collect()
}

fn sign(j: usize) -> bool {
    j % 2 == 1
}

/// Checks that a tensor is a k-form on an m-dimensional base: every slot
/// base-covariant of dimension m and alternating.
fn check_form(omega: &TensorField) -> Result<()> {
    let m = omega.nvars();
    if omega.slots().iter().any(|s| s.kind != SlotKind::BaseCovariant || s.dim != m) {
        return arg_err("a differential form needs base-covariant slots of the base dimension");
    }
    for a in 1..omega.rank() {
        if let Some(idx) = omega.symmetry_violation(SlotSymmetry::Antisymmetric(a - 1, a)) {
            return Err(Error::InvalidSection(format!("form is not antisymmetric at component {idx:?}")));
        }
    }
    Ok(())
}

fn declare_alternating(mut t: TensorField) -> TensorField {
    for a in 1..t.rank() {
        t = t.with_symmetry(SlotSymmetry::Antisymmetric(a - 1, a)).expect("alternating by construction");
    }
    t
}

/// Exterior derivative of a k-form (k = 0 is a scalar field).
pub fn exterior_derivative(omega: &TensorField) -> Result<TensorField> {
    check_form(omega)?;
    let m = omega.nvars();
    let k = omega.rank();
    let out = TensorField::try_from_fn(m, vec![Slot::cov(m); k + 1], |idx| {
        let mut acc = Poly::zero(m);
        for j in 0..=k {
            let d = omega.get(&omit(idx, j)).partial(idx[j])?;
            acc = if sign(j) { acc - d } else { acc + d };
        }
        Ok(acc)
    })?;
    Ok(declare_alternating(out))
}

/// Linear connection ∇_μ = ∂_μ + A_μ on a trivial rank-n bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionField {
    fiber_dim: usize,
    a: Vec<PolyMatrix>,
}

impl ConnectionField {
    pub fn new(a: Vec<PolyMatrix>) -> Result<Self> {
        let m = a.len();
        if m == 0 {
            return arg_err("connection needs at least one coefficient matrix");
        }
        let n = a[0].rows();
        if a.iter().any(|am| am.shape() != (n, n) || am.nvars() != m) {
            return arg_err(format!("connection coefficients must be {n}x{n} polynomial matrices in {m} variables"));
        }
        Ok(ConnectionField { fiber_dim: n, a })
    }

    pub fn zero(base_dim: usize, fiber_dim: usize) -> Self {
        ConnectionField { fiber_dim, a: vec![PolyMatrix::zeros(fiber_dim, fiber_dim, base_dim); base_dim] }
    }

    pub fn base_dim(&self) -> usize {
        self.a.len()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn coefficient(&self, mu: usize) -> &PolyMatrix {
        &self.a[mu]
    }

    pub fn coefficients(&self) -> &[PolyMatrix] {
        &self.a
    }

    pub fn degree(&self) -> u32 {
        self.a.iter().map(PolyMatrix::degree).max().unwrap_or(0)
    }

    /// (∇ψ)_μ = ∂_μψ + A_μψ for a section given as an n×c matrix.
    pub fn apply(&self, psi: &PolyMatrix) -> Result<Vec<PolyMatrix>> {
        if psi.rows() != self.fiber_dim || psi.nvars() != self.base_dim() {
            return arg_err("section does not match the bundle");
        }
        (0..self.base_dim()).map(|mu| Ok(&psi.partial(mu)? + &self.a[mu].checked_mul(psi)?)).collect()
    }
}

/// Value type of a fiber-valued form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    /// Ω^k(ξ): components are n×c matrices acted on from the left.
    Vector,
    /// Ω^k(ξ*⊗ξ): components are n×n matrices, acted on by commutator.
    Endomorphism,
}

/// Matrix-valued k-form: one polynomial matrix per index tuple (μ₁…μ_k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatForm {
    base_dim: usize,
    degree: usize,
    rows: usize,
    cols: usize,
    comps: Vec<PolyMatrix>,
}

impl MatForm {
    pub fn zeros(base_dim: usize, degree: usize, rows: usize, cols: usize) -> Self {
        let count = base_dim.pow(degree as u32);
        MatForm { base_dim, degree, rows, cols, comps: vec![PolyMatrix::zeros(rows, cols, base_dim); count] }
    }

    pub fn try_from_fn(
        base_dim: usize,
        degree: usize,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(&[usize]) -> Result<PolyMatrix>,
    ) -> Result<Self> {
        let comps = index_tuples(&vec![base_dim; degree])
            .iter()
            .map(|i| {
                let c = f(i)?;
                if c.shape() != (rows, cols) || c.nvars() != base_dim {
                    return arg_err("form component has the wrong shape");
                }
                Ok(c)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MatForm { base_dim, degree, rows, cols, comps })
    }

    /// A 0-form wrapping a single section/endomorphism field.
    pub fn scalar(value: PolyMatrix) -> Self {
        MatForm { base_dim: value.nvars(), degree: 0, rows: value.rows(), cols: value.cols(), comps: vec![value] }
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.degree, "index tuple length differs from form degree");
        idx.iter().fold(0, |acc, &i| {
            assert!(i < self.base_dim, "form index out of range");
            acc * self.base_dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &PolyMatrix {
        &self.comps[self.offset(idx)]
    }

    pub fn components(&self) -> &[PolyMatrix] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(PolyMatrix::is_zero)
    }

    pub fn is_alternating(&self) -> bool {
        index_tuples(&vec![self.base_dim; self.degree]).iter().all(|idx| {
            (1..self.degree).all(|a| {
                let mut sw = idx.clone();
                sw.swap(a - 1, a);
                (self.get(idx) + self.get(&sw)).is_zero()
            })
        })
    }

    pub fn map(&self, f: impl Fn(&PolyMatrix) -> Result<PolyMatrix>) -> Result<Self> {
        let comps = self.comps.iter().map(f).collect::<Result<Vec<_>>>()?;
        let (rows, cols) = comps.first().map_or((self.rows, self.cols), PolyMatrix::shape);
        Ok(MatForm { base_dim: self.base_dim, degree: self.degree, rows, cols, comps })
    }

    /// Left multiplication of every component by an endomorphism-valued 0-form.
    pub fn left_mul(&self, m: &PolyMatrix) -> Result<Self> {
        self.map(|c| m.checked_mul(c))
    }

    /// Componentwise action of this (endomorphism-valued) form on a section:
    /// (Fψ)_{μ…} = F_{μ…}·ψ.
    pub fn act_on(&self, psi: &PolyMatrix) -> Result<Self> {
        self.map(|c| c.checked_mul(psi))
    }

    /// Conjugation φ⁻¹·F·φ of every component.
    pub fn conjugate(&self, phi: &PolyMatrix, phi_inv: &PolyMatrix) -> Result<Self> {
        self.map(|c| phi_inv.checked_mul(c)?.checked_mul(phi))
    }

    pub fn eval_at(&self, point: &[crate::Q]) -> Result<Self> {
        self.map(|c| Ok(PolyMatrix::constant(&c.eval(point)?, self.base_dim)))
    }

    /// As a tensor with slots (base_cov)^k, fiber_out, and fiber_in unless
    /// the value kind is a vector with a single column.
    pub fn to_tensor(&self, kind: ValueKind) -> TensorField {
        let m = self.base_dim;
        let mut slots = vec![Slot::cov(m); self.degree];
        slots.push(Slot::fiber_out(self.rows));
        let vector = kind == ValueKind::Vector && self.cols == 1;
        if !vector {
            slots.push(Slot::fiber_in(self.cols));
        }
        let k = self.degree;
        TensorField::from_fn(m, slots, |idx| {
            let c = self.get(&idx[..k]);
            if vector {
                c[(idx[k], 0)].clone()
            } else {
                c[(idx[k], idx[k + 1])].clone()
            }
        })
    }
}

/// Covariant exterior differential d^∇ on Ω^k(ξ) or Ω^k(ξ*⊗ξ).
pub fn covariant_differential(conn: &ConnectionField, s: &MatForm, kind: ValueKind) -> Result<MatForm> {
    let m = conn.base_dim();
    let n = conn.fiber_dim();
    if s.base_dim != m {
        return arg_err("form and connection live on different bases");
    }
    match kind {
        ValueKind::Vector if s.rows != n => return arg_err("vector-valued form has the wrong fiber dimension"),
        ValueKind::Endomorphism if s.rows != n || s.cols != n => {
            return arg_err("endomorphism-valued form must be n×n")
        }
        _ => {}
    }
    let k = s.degree;
    MatForm::try_from_fn(m, k + 1, s.rows, s.cols, |idx| {
        let mut acc = PolyMatrix::zeros(s.rows, s.cols, m);
        for j in 0..=k {
            let mu = idx[j];
            let inner = s.get(&omit(idx, j));
            let a = conn.coefficient(mu);
            let mut term = &inner.partial(mu)? + &a.checked_mul(inner)?;
            if kind == ValueKind::Endomorphism {
                term = &term - &inner.checked_mul(a)?;
            }
            acc = if sign(j) { &acc - &term } else { &acc + &term };
        }
        Ok(acc)
    })
}

/// F_{μν} = ∂_μA_ν − ∂_νA_μ + [A_μ, A_ν].
pub fn yang_mills_curvature(conn: &ConnectionField) -> Result<MatForm> {
    let m = conn.base_dim();
    if m < 2 {
        return arg_err("curvature needs a base of dimension at least 2");
    }
    let n = conn.fiber_dim();
    MatForm::try_from_fn(m, 2, n, n, |idx| {
        let (mu, nu) = (idx[0], idx[1]);
        let a_mu = conn.coefficient(mu);
        let a_nu = conn.coefficient(nu);
        let d = a_nu.partial(mu)?.checked_sub(&a_mu.partial(nu)?)?;
        d.checked_add(&a_mu.commutator(a_nu)?)
    })
}
