use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{arg_err, Error, Result};
use crate::linalg::QMatrix;
use crate::polyfield::poly::Poly;
use crate::Q;

/// Dense matrix of polynomials sharing one variable count.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix { rows, cols, nvars, entries: vec![Poly::zero(nvars); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(n, n, nvars);
        for i in 0..n {
            m.entries[i * n + i] = Poly::one(nvars);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, nvars: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let p = f(i, j);
                assert_eq!(p.nvars(), nvars, "entry ({i},{j}) has the wrong variable count");
                entries.push(p);
            }
        }
        PolyMatrix { rows, cols, nvars, entries }
    }

    pub fn from_entries(rows: usize, cols: usize, nvars: usize, entries: Vec<Poly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return arg_err(format!("{} entries for a {rows}x{cols} matrix", entries.len()));
        }
        if entries.iter().any(|p| p.nvars() != nvars) {
            return arg_err("matrix entries disagree on variable count");
        }
        Ok(PolyMatrix { rows, cols, nvars, entries })
    }

    /// Constant polynomial matrix with the entries of `m`.
    pub fn constant(m: &QMatrix, nvars: usize) -> Self {
        Self::from_fn(m.rows(), m.cols(), nvars, |i, j| Poly::constant(nvars, m[(i, j)].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows, self.nvars)
    }

    pub fn degree(&self) -> u32 {
        self.entries.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        PolyMatrix { rows: self.rows, cols: self.cols, nvars: self.nvars, entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Poly) -> Result<Poly>) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        let nvars = entries.first().map_or(self.nvars, Poly::nvars);
        PolyMatrix::from_entries(self.rows, self.cols, nvars, entries)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.nvars, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map(|p| p.scale(c))
    }

    pub fn scale_poly(&self, f: &Poly) -> Self {
        self.map(|p| p * f)
    }

    pub fn partial(&self, dir: usize) -> Result<Self> {
        self.try_map(|p| p.partial(dir))
    }

    pub fn eval(&self, point: &[Q]) -> Result<QMatrix> {
        let vals = self.entries.iter().map(|p| p.eval(point)).collect::<Result<Vec<_>>>()?;
        Ok(QMatrix::from_fn(self.rows, self.cols, |i, j| vals[i * self.cols + j].clone()))
    }

    pub fn substitute(&self, subs: &[Poly]) -> Result<Self> {
        self.try_map(|p| p.substitute(subs))
    }

    pub fn checked_add(&self, rhs: &PolyMatrix) -> Result<Self> {
        self.check_same(rhs, "add")?;
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, rhs: &PolyMatrix) -> Result<Self> {
        self.check_same(rhs, "subtract")?;
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        })
    }

    fn check_same(&self, rhs: &PolyMatrix, what: &str) -> Result<()> {
        if self.shape() != rhs.shape() || self.nvars != rhs.nvars {
            return arg_err(format!("cannot {what} {:?} and {:?}", self.shape(), rhs.shape()));
        }
        Ok(())
    }

    pub fn checked_mul(&self, rhs: &PolyMatrix) -> Result<Self> {
        if self.cols != rhs.rows || self.nvars != rhs.nvars {
            return arg_err(format!("cannot multiply {:?} by {:?}", self.shape(), rhs.shape()));
        }
        let mut out = Self::zeros(self.rows, rhs.cols, self.nvars);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// ab − ba.
    pub fn commutator(&self, rhs: &PolyMatrix) -> Result<Self> {
        self.checked_mul(rhs)?.checked_sub(&rhs.checked_mul(self)?)
    }

    /// Inverse of a unipotent matrix I + N with N nilpotent, via the
    /// terminating series Σ (−N)^k.
    pub fn unipotent_inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return arg_err("inverse of a non-square matrix");
        }
        let n = self.rows;
        let id = Self::identity(n, self.nvars);
        let nil = self.checked_sub(&id)?;
        let neg = -&nil;
        let mut term = id.clone();
        let mut sum = id.clone();
        for _ in 0..n {
            term = &term * &neg;
            if term.is_zero() {
                return Ok(sum);
            }
            sum = &sum + &term;
        }
        Err(Error::Unsupported(
            "matrix is not identity plus a nilpotent part; supply an explicit inverse".into(),
        ))
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.entries.iter().map(Poly::max_abs_coefficient).fold(0.0, f64::max)
    }

    /// Determinant as a polynomial, by row expansion memoized over column
    /// subsets (O(2^n·n) products).
    pub fn det(&self) -> Result<Poly> {
        if self.rows != self.cols {
            return arg_err("determinant of a non-square matrix");
        }
        let rows: Vec<usize> = (0..self.rows).collect();
        let cols: Vec<usize> = (0..self.cols).collect();
        Ok(self.minor_det(&rows, &cols))
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Poly {
        let k = cols.len();
        let mut dp: Vec<Option<Poly>> = vec![None; 1 << k];
        dp[0] = Some(Poly::one(self.nvars));
        for mask in 0usize..(1 << k) {
            let Some(cur) = dp[mask].take() else { continue };
            let r = mask.count_ones() as usize;
            if r == k {
                dp[mask] = Some(cur);
                continue;
            }
            for c in 0..k {
                if mask & (1 << c) != 0 {
                    continue;
                }
                let a = &self[(rows[r], cols[c])];
                if a.is_zero() {
                    continue;
                }
                let above = (mask >> (c + 1)).count_ones();
                let term = a * &cur;
                let next = mask | (1 << c);
                let prev = dp[next].take().unwrap_or_else(|| Poly::zero(self.nvars));
                dp[next] = Some(if above % 2 == 1 { prev - term } else { prev + term });
            }
            dp[mask] = Some(cur);
        }
        dp[(1 << k) - 1].take().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    /// Adjugate, so that self · adj = det · I.
    pub fn adjugate(&self) -> Result<Self> {
        if self.rows != self.cols {
            return arg_err("adjugate of a non-square matrix");
        }
        let n = self.rows;
        Ok(Self::from_fn(n, n, self.nvars, |i, j| {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let d = self.minor_det(&rows, &cols);
            if (i + j) % 2 == 1 {
                -d
            } else {
                d
            }
        }))
    }
}

impl std::ops::Index<(usize, usize)> for PolyMatrix {
    type Output = Poly;
    fn index(&self, (i, j): (usize, usize)) -> &Poly {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for PolyMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Poly {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.entries[i * self.cols + j]
    }
}

impl<'a> Add<&'a PolyMatrix> for &'a PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_add(rhs).expect("shape mismatch in matrix addition")
    }
}

impl<'a> Sub<&'a PolyMatrix> for &'a PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_sub(rhs).expect("shape mismatch in matrix subtraction")
    }
}

impl<'a> Mul<&'a PolyMatrix> for &'a PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_mul(rhs).expect("shape mismatch in matrix product")
    }
}

impl Neg for &PolyMatrix {
    type Output = PolyMatrix;
    fn neg(self) -> PolyMatrix {
        self.map(|p| -p)
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A vertical automorphism φ(x) ∈ GL(n) carried together with a verified
/// polynomial inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeElement {
    phi: PolyMatrix,
    phi_inv: PolyMatrix,
}

impl GaugeElement {
    /// Accepts `phi` with an explicit inverse witness, checking φ·φ⁻¹ = φ⁻¹·φ = 1.
    pub fn with_inverse(phi: PolyMatrix, phi_inv: PolyMatrix) -> Result<Self> {
        if phi.rows() != phi.cols() || phi.shape() != phi_inv.shape() || phi.nvars() != phi_inv.nvars() {
            return arg_err("gauge element and inverse must be square of equal shape");
        }
        if !phi.checked_mul(&phi_inv)?.is_identity() || !phi_inv.checked_mul(&phi)?.is_identity() {
            return Err(Error::InvalidSection("inverse witness does not satisfy phi * phi_inv = 1".into()));
        }
        Ok(GaugeElement { phi, phi_inv })
    }

    /// Builds the inverse of a unipotent `phi` directly.
    pub fn unipotent(phi: PolyMatrix) -> Result<Self> {
        let phi_inv = phi.unipotent_inverse()?;
        Ok(GaugeElement { phi, phi_inv })
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        GaugeElement { phi: PolyMatrix::identity(n, nvars), phi_inv: PolyMatrix::identity(n, nvars) }
    }

    pub fn phi(&self) -> &PolyMatrix {
        &self.phi
    }

    pub fn inverse(&self) -> &PolyMatrix {
        &self.phi_inv
    }

    pub fn dim(&self) -> usize {
        self.phi.rows()
    }

    /// Pointwise product (self · other).
    pub fn compose(&self, other: &GaugeElement) -> Result<Self> {
        Ok(GaugeElement { phi: self.phi.checked_mul(&other.phi)?, phi_inv: other.phi_inv.checked_mul(&self.phi_inv)? })
    }
}

/// Polynomial map φ: ℝ^m → ℝ^m, components φ^μ(x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    comps: Vec<Poly>,
}

impl PolyMap {
    pub fn new(comps: Vec<Poly>) -> Result<Self> {
        let m = comps.len();
        if comps.iter().any(|p| p.nvars() != m) {
            return arg_err("map components must be polynomials in as many variables as components");
        }
        Ok(PolyMap { comps })
    }

    pub fn identity(m: usize) -> Self {
        PolyMap { comps: (0..m).map(|i| Poly::var(m, i).expect("in range")).collect() }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    /// Jacobian Dφ with entries ∂_ν φ^μ (row μ, column ν).
    pub fn jacobian(&self) -> PolyMatrix {
        let m = self.dim();
        PolyMatrix::from_fn(m, m, m, |mu, nu| self.comps[mu].partial(nu).expect("in range"))
    }

    /// (self ∘ inner)(x) = self(inner(x)).
    pub fn compose(&self, inner: &PolyMap) -> Result<Self> {
        if self.dim() != inner.dim() {
            return arg_err("maps of different dimension");
        }
        let comps = self.comps.iter().map(|p| p.substitute(&inner.comps)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMap { comps })
    }

    pub fn eval(&self, point: &[Q]) -> Result<Vec<Q>> {
        self.comps.iter().map(|p| p.eval(point)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::poly::q;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i).unwrap()
    }

    #[test]
    fn unipotent_inverse_of_elementary_shear() {
        // I + x3 E12 on four coordinates has inverse I − x3 E12
        let mut m = PolyMatrix::identity(2, 4);
        m[(0, 1)] = x(4, 2).pow(3);
        let inv = m.unipotent_inverse().unwrap();
        let mut expected = PolyMatrix::identity(2, 4);
        expected[(0, 1)] = -x(4, 2).pow(3);
        assert_eq!(inv, expected);
        assert!((&m * &inv).is_identity());
    }

    #[test]
    fn non_unipotent_inverse_is_unsupported() {
        let m = PolyMatrix::constant(&QMatrix::identity(2).scale(&q(2)), 1);
        assert!(matches!(m.unipotent_inverse(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn commutator_with_itself_vanishes() {
        let m = PolyMatrix::from_fn(2, 2, 2, |i, j| &x(2, i) * &x(2, j));
        assert!(m.commutator(&m).unwrap().is_zero());
    }

    #[test]
    fn shape_mismatch_is_argument_error() {
        let a = PolyMatrix::zeros(2, 3, 1);
        assert!(matches!(a.checked_mul(&a), Err(Error::Argument(_))));
        assert!(matches!(a.checked_add(&PolyMatrix::zeros(3, 2, 1)), Err(Error::Argument(_))));
    }

    #[test]
    fn polynomial_det_and_adjugate() {
        let m = PolyMatrix::from_fn(3, 3, 2, |i, j| {
            if i == j {
                &Poly::one(2) + &x(2, i % 2)
            } else {
                Poly::from_int(2, (i + 2 * j) as i64)
            }
        });
        let d = m.det().unwrap();
        let p = [q(2), q(-3)];
        assert_eq!(d.eval(&p).unwrap(), m.eval(&p).unwrap().det().unwrap());
        let adj = m.adjugate().unwrap();
        let prod = m.checked_mul(&adj).unwrap();
        assert_eq!(prod, PolyMatrix::identity(3, 2).scale_poly(&d));
    }

    #[test]
    fn gauge_witness_is_checked() {
        let mut phi = PolyMatrix::identity(2, 1);
        phi[(0, 1)] = x(1, 0);
        let good = phi.unipotent_inverse().unwrap();
        assert!(GaugeElement::with_inverse(phi.clone(), good).is_ok());
        let bad = PolyMatrix::identity(2, 1);
        assert!(matches!(GaugeElement::with_inverse(phi, bad), Err(Error::InvalidSection(_))));
    }
}
