//! Jets of sections and of group elements at a point.
//!
//! A jet is stored in coordinates centered at the point: a section's 1-jet is
//! its value and first derivatives there, a group element's 2-jet also
//! carries second derivatives (so the Taylor polynomial is
//! B0 + B_α x^α + ½B_{αβ} x^α x^β).

use std::fmt;

use num_traits::Zero;

use crate::curvature::{AlmostComplex, ConnectionField};
use crate::error::{arg_err, Error, Result};
use crate::linalg::QMatrix;
use crate::polyfield::{fmt_q, GaugeElement, PolyMap, PolyMatrix};
use crate::Q;

fn check_point(m: usize, point: &[Q]) -> Result<()> {
    if point.len() != m {
        return arg_err(format!("point has {} coordinates, expected {m}", point.len()));
    }
    Ok(())
}

fn check_shapes(ms: &[QMatrix], shape: (usize, usize), what: &str) -> Result<()> {
    if ms.iter().any(|a| a.shape() != shape) {
        return arg_err(format!("{what} blocks must be {}x{}", shape.0, shape.1));
    }
    Ok(())
}

/// Rank-3 array C^μ_{νρ} on ℝ^m (value C(u, v)^μ = C^μ_{νρ}u^νv^ρ).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bilinear {
    m: usize,
    data: Vec<Q>,
}

impl Bilinear {
    pub fn zeros(m: usize) -> Self {
        Bilinear { m, data: vec![Q::zero(); m * m * m] }
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(m * m * m);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    data.push(f(a, b, c));
                }
            }
        }
        Bilinear { m, data }
    }

    pub fn from_vec(m: usize, data: Vec<Q>) -> Result<Self> {
        if data.len() != m * m * m {
            return arg_err("bilinear map needs m³ coefficients");
        }
        Ok(Bilinear { m, data })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, mu: usize, nu: usize, rho: usize) -> &Q {
        &self.data[(mu * self.m + nu) * self.m + rho]
    }

    pub fn set(&mut self, mu: usize, nu: usize, rho: usize, v: Q) {
        let m = self.m;
        self.data[(mu * m + nu) * m + rho] = v;
    }

    pub fn coefficients(&self) -> &[Q] {
        &self.data
    }

    /// The matrix (C^μ_{νρ})_{μν} for fixed ρ.
    pub fn slice(&self, rho: usize) -> QMatrix {
        QMatrix::from_fn(self.m, self.m, |mu, nu| self.get(mu, nu, rho).clone())
    }

    pub fn from_slices(slices: &[QMatrix]) -> Result<Self> {
        let m = slices.len();
        check_shapes(slices, (m, m), "bilinear slice")?;
        Ok(Bilinear::from_fn(m, |mu, nu, rho| slices[rho][(mu, nu)].clone()))
    }

    pub fn apply(&self, u: &[Q], v: &[Q]) -> Vec<Q> {
        let m = self.m;
        (0..m)
            .map(|mu| {
                let mut acc = Q::zero();
                for (nu, un) in u.iter().enumerate() {
                    if un.is_zero() {
                        continue;
                    }
                    for (rho, vr) in v.iter().enumerate() {
                        acc += self.get(mu, nu, rho) * un * vr;
                    }
                }
                acc
            })
            .collect()
    }

    /// Symmetric in the lower pair (ν, ρ).
    pub fn is_symmetric(&self) -> bool {
        let m = self.m;
        (0..m).all(|a| (0..m).all(|b| (b + 1..m).all(|c| self.get(a, b, c) == self.get(a, c, b))))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Bilinear) -> Bilinear {
        assert_eq!(self.m, o.m, "bilinear dimension mismatch");
        Bilinear { m: self.m, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Bilinear) -> Bilinear {
        assert_eq!(self.m, o.m, "bilinear dimension mismatch");
        Bilinear { m: self.m, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Q) -> Bilinear {
        Bilinear { m: self.m, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// Left composition with a linear map: (L·C)^μ_{νρ} = L^μ_α C^α_{νρ}.
    pub fn left(&self, l: &QMatrix) -> Bilinear {
        let m = self.m;
        Bilinear::from_fn(m, |mu, nu, rho| {
            let mut acc = Q::zero();
            for a in 0..m {
                let (x, y) = (&l[(mu, a)], self.get(a, nu, rho));
                if !x.is_zero() && !y.is_zero() {
                    acc += x * y;
                }
            }
            acc
        })
    }

    /// Precomposition in both arguments: C(Pu, Qv).
    pub fn precompose(&self, p: &QMatrix, q: &QMatrix) -> Bilinear {
        let m = self.m;
        let contract = |c: &Bilinear, t: &QMatrix, first: bool| {
            Bilinear::from_fn(m, |mu, nu, rho| {
                let mut acc = Q::zero();
                for g in 0..m {
                    let (coef, val) = if first { (&t[(g, nu)], c.get(mu, g, rho)) } else { (&t[(g, rho)], c.get(mu, nu, g)) };
                    if !coef.is_zero() && !val.is_zero() {
                        acc += val * coef;
                    }
                }
                acc
            })
        };
        let once = if p.is_identity() { self.clone() } else { contract(self, p, true) };
        if q.is_identity() {
            once
        } else {
            contract(&once, q, false)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| crate::polyfield::q_to_f64(v).abs()).fold(0.0, f64::max)
    }
}

impl fmt::Debug for Bilinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.m;
        write!(f, "Bilinear{{")?;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let v = self.get(a, b, c);
                    if !v.is_zero() {
                        write!(f, " ({a},{b},{c}): {};", fmt_q(v))?;
                    }
                }
            }
        }
        write!(f, " }}")
    }
}

/// 1-jet of a connection: A_μ(x₀) and ∂_αA_μ(x₀), the latter indexed [μ][α].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Jet1Connection {
    base_dim: usize,
    fiber_dim: usize,
    a: Vec<QMatrix>,
    da: Vec<QMatrix>,
}

impl Jet1Connection {
    pub fn new(a: Vec<QMatrix>, da: Vec<QMatrix>) -> Result<Self> {
        let m = a.len();
        if m == 0 {
            return arg_err("connection jet needs a nonempty base");
        }
        let n = a[0].rows();
        check_shapes(&a, (n, n), "connection value")?;
        check_shapes(&da, (n, n), "connection derivative")?;
        if da.len() != m * m {
            return arg_err("connection jet needs m² derivative blocks");
        }
        Ok(Jet1Connection { base_dim: m, fiber_dim: n, a, da })
    }

    pub fn zero(base_dim: usize, fiber_dim: usize) -> Self {
        let z = QMatrix::zeros(fiber_dim, fiber_dim);
        Jet1Connection { base_dim, fiber_dim, a: vec![z.clone(); base_dim], da: vec![z; base_dim * base_dim] }
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn a(&self, mu: usize) -> &QMatrix {
        &self.a[mu]
    }

    /// ∂_αA_μ(x₀).
    pub fn da(&self, mu: usize, alpha: usize) -> &QMatrix {
        &self.da[mu * self.base_dim + alpha]
    }

    pub fn values(&self) -> &[QMatrix] {
        &self.a
    }

    pub fn derivatives(&self) -> &[QMatrix] {
        &self.da
    }

    /// The first-order Taylor polynomial A_μ(x₀) + ∂_αA_μ(x₀)x^α, centered at 0.
    pub fn to_field(&self) -> ConnectionField {
        let m = self.base_dim;
        let coeffs = (0..m)
            .map(|mu| {
                let mut f = PolyMatrix::constant(&self.a[mu], m);
                for alpha in 0..m {
                    let x = crate::Poly::var(m, alpha).expect("in range");
                    f = &f + &PolyMatrix::constant(self.da(mu, alpha), m).scale_poly(&x);
                }
                f
            })
            .collect();
        ConnectionField::new(coeffs).expect("shapes consistent")
    }
}

/// 2-jet of a vertical automorphism φ at x₀: B0 = φ(x₀), B_α = ∂_αφ(x₀),
/// B_{αβ} = ∂_α∂_βφ(x₀) (indexed [α][β], symmetric).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Jet2VertAut {
    b0: QMatrix,
    b: Vec<QMatrix>,
    b2: Vec<QMatrix>,
}

impl Jet2VertAut {
    pub fn new(b0: QMatrix, b: Vec<QMatrix>, b2: Vec<QMatrix>) -> Result<Self> {
        let n = b0.rows();
        let m = b.len();
        check_shapes(std::slice::from_ref(&b0), (n, n), "automorphism value")?;
        check_shapes(&b, (n, n), "automorphism first-order")?;
        check_shapes(&b2, (n, n), "automorphism second-order")?;
        if b2.len() != m * m {
            return arg_err("automorphism jet needs m² second-order blocks");
        }
        if b0.det()?.is_zero() {
            return Err(Error::InvalidSection("automorphism jet has singular value B0".into()));
        }
        for a in 0..m {
            for c in a + 1..m {
                if b2[a * m + c] != b2[c * m + a] {
                    return Err(Error::InvalidSection(format!(
                        "second-order automorphism coefficients not symmetric at ({},{})",
                        a + 1,
                        c + 1
                    )));
                }
            }
        }
        Ok(Jet2VertAut { b0, b, b2 })
    }

    /// Normalized jet 1 + B_αx^α + ½B_{αβ}x^αx^β.
    pub fn normalized(b: Vec<QMatrix>, b2: Vec<QMatrix>) -> Result<Self> {
        let n = b.first().map_or(0, QMatrix::rows);
        Jet2VertAut::new(QMatrix::identity(n), b, b2)
    }

    pub fn identity(base_dim: usize, fiber_dim: usize) -> Self {
        let z = QMatrix::zeros(fiber_dim, fiber_dim);
        Jet2VertAut { b0: QMatrix::identity(fiber_dim), b: vec![z.clone(); base_dim], b2: vec![z; base_dim * base_dim] }
    }

    pub fn base_dim(&self) -> usize {
        self.b.len()
    }

    pub fn fiber_dim(&self) -> usize {
        self.b0.rows()
    }

    pub fn b0(&self) -> &QMatrix {
        &self.b0
    }

    pub fn b(&self, alpha: usize) -> &QMatrix {
        &self.b[alpha]
    }

    pub fn b2(&self, alpha: usize, beta: usize) -> &QMatrix {
        &self.b2[alpha * self.base_dim() + beta]
    }

    pub fn is_normalized(&self) -> bool {
        self.b0.is_identity()
    }

    /// 2-jet of the pointwise product self·other.
    pub fn compose(&self, other: &Jet2VertAut) -> Result<Self> {
        let m = self.base_dim();
        if other.base_dim() != m || other.fiber_dim() != self.fiber_dim() {
            return arg_err("automorphism jets of different shape");
        }
        let b0 = &self.b0 * &other.b0;
        let b = (0..m).map(|a| &(&self.b0 * &other.b[a]) + &(&self.b[a] * &other.b0)).collect();
        let mut b2 = Vec::with_capacity(m * m);
        for a in 0..m {
            for c in 0..m {
                let t = &(&self.b0 * other.b2(a, c)) + &(&self.b[a] * &other.b[c]);
                let t = &(&t + &(&self.b[c] * &other.b[a])) + &(self.b2(a, c) * &other.b0);
                b2.push(t);
            }
        }
        Jet2VertAut::new(b0, b, b2)
    }

    /// 2-jet of the pointwise inverse φ⁻¹.
    pub fn inverse(&self) -> Result<Self> {
        let m = self.base_dim();
        let c0 = self.b0.inverse().ok_or_else(|| Error::Internal("singular B0 passed validation".into()))?;
        // differentiate φ·φ⁻¹ = 1 twice
        let c: Vec<QMatrix> = (0..m).map(|a| -&(&(&c0 * &self.b[a]) * &c0)).collect();
        let mut c2 = Vec::with_capacity(m * m);
        for a in 0..m {
            for d in 0..m {
                let t = &(self.b2(a, d) * &c0) + &(&self.b[a] * &c[d]);
                let t = &t + &(&self.b[d] * &c[a]);
                c2.push(-&(&c0 * &t));
            }
        }
        Jet2VertAut::new(c0, c, c2)
    }
}

/// 1-jet of an almost complex structure: 𝐉 = J(x₀), C^μ_{νρ} = ∂_ρJ^μ_ν(x₀).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Jet1Acs {
    j: QMatrix,
    c: Bilinear,
}

impl Jet1Acs {
    /// Validates 𝐉² = −1 and J·C_ρ + C_ρ·J = 0 for every ρ (the derivative of
    /// J² = −1).
    pub fn new(j: QMatrix, c: Bilinear) -> Result<Self> {
        let m = j.rows();
        if j.shape() != (m, m) || c.dim() != m {
            return arg_err("acs jet dimensions disagree");
        }
        let sq = &(&j * &j) + &QMatrix::identity(m);
        if !sq.is_zero() {
            return Err(Error::InvalidSection("acs jet value does not square to −1".into()));
        }
        for rho in 0..m {
            let s = c.slice(rho);
            let anti = &(&j * &s) + &(&s * &j);
            if let Some(pos) = anti.entries().iter().position(|v| !v.is_zero()) {
                return Err(Error::InvalidSection(format!(
                    "acs jet violates J·C + C·J = 0 at (μ,ν,ρ) = ({},{},{})",
                    pos / m + 1,
                    pos % m + 1,
                    rho + 1
                )));
            }
        }
        Ok(Jet1Acs { j, c })
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    pub fn j(&self) -> &QMatrix {
        &self.j
    }

    pub fn c(&self) -> &Bilinear {
        &self.c
    }
}

/// 2-jet of a diffeomorphism fixing x₀: B^μ_α = ∂_αφ^μ(x₀) and
/// B^μ_{αβ} = ∂_α∂_βφ^μ(x₀).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Jet2Diffeo {
    b: QMatrix,
    b2: Bilinear,
}

impl Jet2Diffeo {
    pub fn new(b: QMatrix, b2: Bilinear) -> Result<Self> {
        let m = b.rows();
        if b.shape() != (m, m) || b2.dim() != m {
            return arg_err("diffeomorphism jet dimensions disagree");
        }
        if b.det()?.is_zero() {
            return Err(Error::InvalidSection("diffeomorphism jet has singular linear part".into()));
        }
        if !b2.is_symmetric() {
            return Err(Error::InvalidSection("second-order diffeomorphism coefficients not symmetric".into()));
        }
        Ok(Jet2Diffeo { b, b2 })
    }

    pub fn normalized(b2: Bilinear) -> Result<Self> {
        Jet2Diffeo::new(QMatrix::identity(b2.dim()), b2)
    }

    pub fn identity(m: usize) -> Self {
        Jet2Diffeo { b: QMatrix::identity(m), b2: Bilinear::zeros(m) }
    }

    pub fn dim(&self) -> usize {
        self.b.rows()
    }

    pub fn b(&self) -> &QMatrix {
        &self.b
    }

    pub fn b2(&self) -> &Bilinear {
        &self.b2
    }

    pub fn is_normalized(&self) -> bool {
        self.b.is_identity()
    }

    /// 2-jet of self ∘ inner.
    pub fn compose(&self, inner: &Jet2Diffeo) -> Result<Self> {
        if self.dim() != inner.dim() {
            return arg_err("diffeomorphism jets of different dimension");
        }
        let b = &self.b * &inner.b;
        let b2 = inner.b2.left(&self.b).add(&self.b2.precompose(&inner.b, &inner.b));
        Jet2Diffeo::new(b, b2)
    }

    pub fn inverse(&self) -> Result<Self> {
        let bi = self.b.inverse().ok_or_else(|| Error::Internal("singular jet passed validation".into()))?;
        let b2 = self.b2.precompose(&bi, &bi).left(&bi).scale(&-Q::from_integer(1.into()));
        Jet2Diffeo::new(bi, b2)
    }
}

/// 1-jet of a superconnection: the two graded connection jets and the odd
/// blocks χ_{+−} (n₊×n₋), χ_{−+} (n₋×n₊) with their first derivatives.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Jet1Super {
    pub plus: Jet1Connection,
    pub minus: Jet1Connection,
    pub chi_pm: QMatrix,
    pub chi_mp: QMatrix,
    /// ∂_μχ_{+−}(x₀), indexed by μ.
    pub dchi_pm: Vec<QMatrix>,
    /// ∂_μχ_{−+}(x₀), indexed by μ.
    pub dchi_mp: Vec<QMatrix>,
}

impl Jet1Super {
    pub fn new(
        plus: Jet1Connection,
        minus: Jet1Connection,
        chi_pm: QMatrix,
        chi_mp: QMatrix,
        dchi_pm: Vec<QMatrix>,
        dchi_mp: Vec<QMatrix>,
    ) -> Result<Self> {
        let m = plus.base_dim();
        let (np, nm) = (plus.fiber_dim(), minus.fiber_dim());
        if minus.base_dim() != m || dchi_pm.len() != m || dchi_mp.len() != m {
            return arg_err("super jet blocks disagree on the base dimension");
        }
        check_shapes(std::slice::from_ref(&chi_pm), (np, nm), "χ₊₋")?;
        check_shapes(std::slice::from_ref(&chi_mp), (nm, np), "χ₋₊")?;
        check_shapes(&dchi_pm, (np, nm), "∂χ₊₋")?;
        check_shapes(&dchi_mp, (nm, np), "∂χ₋₊")?;
        Ok(Jet1Super { plus, minus, chi_pm, chi_mp, dchi_pm, dchi_mp })
    }

    pub fn base_dim(&self) -> usize {
        self.plus.base_dim()
    }

    pub fn grading(&self) -> (usize, usize) {
        (self.plus.fiber_dim(), self.minus.fiber_dim())
    }
}

/// 1-jet of a connection at `point`.
pub fn prolong_connection(conn: &ConnectionField, point: &[Q]) -> Result<Jet1Connection> {
    let m = conn.base_dim();
    check_point(m, point)?;
    let a = conn.coefficients().iter().map(|c| c.eval(point)).collect::<Result<Vec<_>>>()?;
    let mut da = Vec::with_capacity(m * m);
    for c in conn.coefficients() {
        for alpha in 0..m {
            da.push(c.partial(alpha)?.eval(point)?);
        }
    }
    Jet1Connection::new(a, da)
}

/// 1-jet of an almost complex structure at `point`.
pub fn prolong_acs(acs: &AlmostComplex, point: &[Q]) -> Result<Jet1Acs> {
    let m = acs.dim();
    check_point(m, point)?;
    let j = acs.matrix().eval(point)?;
    let slices = (0..m).map(|rho| acs.matrix().partial(rho)?.eval(point)).collect::<Result<Vec<_>>>()?;
    Jet1Acs::new(j, Bilinear::from_slices(&slices)?)
}

/// 2-jet of a gauge element at `point`.
pub fn prolong_gauge(g: &GaugeElement, point: &[Q]) -> Result<Jet2VertAut> {
    let phi = g.phi();
    let m = phi.nvars();
    check_point(m, point)?;
    let b0 = phi.eval(point)?;
    let d1 = (0..m).map(|a| phi.partial(a)).collect::<Result<Vec<_>>>()?;
    let b = d1.iter().map(|d| d.eval(point)).collect::<Result<Vec<_>>>()?;
    let mut b2 = Vec::with_capacity(m * m);
    for d in &d1 {
        for beta in 0..m {
            b2.push(d.partial(beta)?.eval(point)?);
        }
    }
    Jet2VertAut::new(b0, b, b2)
}

/// 2-jet at `point` of a polynomial diffeomorphism fixing it.
pub fn prolong_diffeo(phi: &PolyMap, point: &[Q]) -> Result<Jet2Diffeo> {
    let m = phi.dim();
    check_point(m, point)?;
    if phi.eval(point)? != point {
        return arg_err("diffeomorphism does not fix the jet point");
    }
    let jac = phi.jacobian();
    let b = jac.eval(point)?;
    let slices = (0..m).map(|beta| jac.partial(beta)?.eval(point)).collect::<Result<Vec<_>>>()?;
    // slice β holds ∂_β∂_αφ^μ at (μ, α)
    Jet2Diffeo::new(b, Bilinear::from_slices(&slices)?)
}
