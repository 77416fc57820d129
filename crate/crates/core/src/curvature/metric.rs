//! Levi-Civita curvature of polynomial metrics.
//!
//! Three pipelines share one assembly routine:
//! - exact polynomial, when det g is a nonzero constant and g⁻¹ = adj(g)/det g
//!   is polynomial;
//! - pointwise rational, from g, ∂g and ∂²g at a point;
//! - cleared denominators, R = R̂/D² and W = Ŵ/D³ with D = det g, for
//!   identically-zero checks on metrics whose inverse is not polynomial.

use num_traits::Zero;

use crate::error::{arg_err, Error, Result};
use crate::polyfield::{index_tuples, Poly, PolyMatrix, Slot, SlotSymmetry, TensorField};
use crate::Q;

/// Minimal commutative-ring interface shared by ℚ and ℚ[x].
trait Ring: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: &Q) -> Self;
}

impl Ring for Q {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Q) -> Self {
        self * c
    }
}

impl Ring for Poly {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Q) -> Self {
        Poly::scale(self, c)
    }
}

/// Dense array with m^rank entries in row-major order.
#[derive(Clone)]
struct Arr<T> {
    m: usize,
    data: Vec<T>,
}

impl<T: Ring> Arr<T> {
    fn build(m: usize, rank: usize, mut f: impl FnMut(&[usize]) -> T) -> Self {
        Arr { m, data: index_tuples(&vec![m; rank]).iter().map(|i| f(i)).collect() }
    }

    fn at(&self, idx: &[usize]) -> &T {
        &self.data[idx.iter().fold(0, |a, &i| a * self.m + i)]
    }
}

fn sum<T: Ring>(zero: &T, m: usize, f: impl Fn(usize) -> T) -> T {
    (0..m).fold(zero.clone(), |acc, l| acc.add(&f(l)))
}

/// R^ρ_{σμν} from Γ^ρ_{μν} = gamma[ρ,μ,ν] and ∂_κΓ^ρ_{μν} = dgamma[κ,ρ,μ,ν].
fn assemble_riemann<T: Ring>(zero: &T, gamma: &Arr<T>, dgamma: &Arr<T>) -> Arr<T> {
    let m = gamma.m;
    Arr::build(m, 4, |i| {
        let (r, s, mu, nu) = (i[0], i[1], i[2], i[3]);
        let lin = dgamma.at(&[mu, r, nu, s]).sub(dgamma.at(&[nu, r, mu, s]));
        let quad = sum(zero, m, |l| {
            gamma.at(&[r, mu, l]).mul(gamma.at(&[l, nu, s])).sub(&gamma.at(&[r, nu, l]).mul(gamma.at(&[l, mu, s])))
        });
        lin.add(&quad)
    })
}

fn ricci_of<T: Ring>(zero: &T, riemann: &Arr<T>) -> Arr<T> {
    let m = riemann.m;
    Arr::build(m, 2, |i| sum(zero, m, |mu| riemann.at(&[mu, i[0], mu, i[1]]).clone()))
}

fn trace2<T: Ring>(zero: &T, inv: &Arr<T>, t: &Arr<T>) -> T {
    let m = t.m;
    sum(zero, m, |a| sum(zero, m, |b| inv.at(&[a, b]).mul(t.at(&[a, b]))))
}

fn lower_first<T: Ring>(zero: &T, g: &Arr<T>, t: &Arr<T>) -> Arr<T> {
    let m = t.m;
    Arr::build(m, 4, |i| sum(zero, m, |l| g.at(&[i[0], l]).mul(t.at(&[l, i[1], i[2], i[3]]))))
}

/// (h ∧ k)_{ρσμν} = h_{ρμ}k_{σν} + h_{σν}k_{ρμ} − h_{ρν}k_{σμ} − h_{σμ}k_{ρν}.
fn kulkarni_nomizu<T: Ring>(h: &Arr<T>, k: &Arr<T>) -> Arr<T> {
    Arr::build(h.m, 4, |i| {
        let (r, s, mu, nu) = (i[0], i[1], i[2], i[3]);
        h.at(&[r, mu])
            .mul(k.at(&[s, nu]))
            .add(&h.at(&[s, nu]).mul(k.at(&[r, mu])))
            .sub(&h.at(&[r, nu]).mul(k.at(&[s, mu])))
            .sub(&h.at(&[s, mu]).mul(k.at(&[r, nu])))
    })
}

/// Covariant Weyl tensor given covariant Riemann, Ricci, r, g, with the
/// Schouten-type tensor h = (Ric − r/(2(m−1))·g)/(m−2).
fn assemble_weyl<T: Ring>(riem_cov: &Arr<T>, ric: &Arr<T>, scalar: &T, g: &Arr<T>) -> Arr<T> {
    let m = g.m;
    let c_r = Q::new(1.into(), (2 * (m as i64 - 1)).into());
    let c_h = Q::new(1.into(), (m as i64 - 2).into());
    let h = Arr::build(m, 2, |i| ric.at(i).sub(&g.at(i).mul(scalar).scale(&c_r)).scale(&c_h));
    let kn = kulkarni_nomizu(&h, g);
    Arr { m, data: riem_cov.data.iter().zip(&kn.data).map(|(a, b)| a.sub(b)).collect() }
}

fn raise_first<T: Ring>(zero: &T, inv: &Arr<T>, t: &Arr<T>) -> Arr<T> {
    lower_first(zero, inv, t)
}

/// Symmetric polynomial metric g_{μν}, with g⁻¹ cached when it is polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricField {
    g: PolyMatrix,
    det: Poly,
    inverse: Option<PolyMatrix>,
}

impl MetricField {
    pub fn new(g: PolyMatrix) -> Result<Self> {
        let m = g.rows();
        if g.cols() != m || g.nvars() != m {
            return arg_err("metric must be m×m in m coordinates");
        }
        for i in 0..m {
            for j in i + 1..m {
                if g[(i, j)] != g[(j, i)] {
                    return Err(Error::InvalidSection(format!("metric not symmetric at ({},{})", i + 1, j + 1)));
                }
            }
        }
        let det = g.det()?;
        let inverse = if det.is_constant() && !det.is_zero() {
            Some(g.adjugate()?.scale(&det.constant_term().recip()))
        } else {
            None
        };
        Ok(MetricField { g, det, inverse })
    }

    pub fn from_tensor(t: &TensorField) -> Result<Self> {
        let m = t.nvars();
        if t.slots() != [Slot::cov(m), Slot::cov(m)] {
            return arg_err("metric needs two base-covariant slots");
        }
        MetricField::new(PolyMatrix::from_fn(m, m, m, |i, j| t.get(&[i, j]).clone()))
    }

    pub fn flat(m: usize) -> Self {
        MetricField::new(PolyMatrix::identity(m, m)).expect("identity is a metric")
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.g
    }

    pub fn det(&self) -> &Poly {
        &self.det
    }

    /// Polynomial inverse, present only when det g is a nonzero constant.
    pub fn inverse(&self) -> Option<&PolyMatrix> {
        self.inverse.as_ref()
    }

    pub fn to_tensor(&self) -> TensorField {
        let m = self.dim();
        TensorField::from_fn(m, vec![Slot::cov(m); 2], |i| self.g[(i[0], i[1])].clone())
            .with_symmetry(SlotSymmetry::Symmetric(0, 1))
            .expect("symmetry checked on construction")
    }

    /// f·g for a polynomial conformal factor f.
    pub fn conformal(&self, f: &Poly) -> Result<Self> {
        MetricField::new(self.g.scale_poly(f))
    }
}

/// Riemann (1,3), Ricci and scalar curvature, either as polynomial fields or
/// as constants evaluated at `point`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvaturePack {
    /// R^ρ_{σμν}.
    pub riemann: TensorField,
    /// Ric_{σν} = R^μ_{σμν}.
    pub ricci: TensorField,
    /// r = g^{σν}Ric_{σν}, a rank-0 tensor.
    pub scalar: TensorField,
    /// g and g⁻¹ in the same representation (constant at `point`).
    pub metric: PolyMatrix,
    pub inverse: PolyMatrix,
    pub point: Option<Vec<Q>>,
}

impl CurvaturePack {
    /// R_{ρσμν} = g_{ρλ}R^λ_{σμν}.
    pub fn riemann_lowered(&self) -> TensorField {
        let m = self.metric.rows();
        TensorField::from_fn(m, vec![Slot::cov(m); 4], |i| {
            (0..m).fold(Poly::zero(m), |acc, l| acc + &self.metric[(i[0], l)] * self.riemann.get(&[l, i[1], i[2], i[3]]))
        })
    }
}

/// Covariant (0,4) and mixed (1,3) Weyl tensors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylTensor {
    /// W_{ρσμν}.
    pub covariant: TensorField,
    /// W^ρ_{σμν}.
    pub mixed: TensorField,
}

fn poly_arr(m: &PolyMatrix) -> Arr<Poly> {
    Arr::build(m.rows(), 2, |i| m[(i[0], i[1])].clone())
}

fn q_arr(m: &crate::QMatrix) -> Arr<Q> {
    Arr::build(m.rows(), 2, |i| m[(i[0], i[1])].clone())
}

fn riemann_slots(m: usize) -> Vec<Slot> {
    vec![Slot::contra(m), Slot::cov(m), Slot::cov(m), Slot::cov(m)]
}

fn tensor_from_poly(m: usize, slots: Vec<Slot>, a: Arr<Poly>) -> TensorField {
    TensorField::from_components(m, slots, a.data).expect("dense array matches slots")
}

fn tensor_from_q(m: usize, slots: Vec<Slot>, a: Arr<Q>) -> TensorField {
    let comps = a.data.into_iter().map(|c| Poly::constant(m, c)).collect();
    TensorField::from_components(m, slots, comps).expect("dense array matches slots")
}

/// Γ^ρ_{μν} = ½ ginv^{ρλ}(∂_μ g_{λν} + ∂_ν g_{λμ} − ∂_λ g_{μν}) over polynomials,
/// with `ginv` any matrix (adjugate for the cleared pipeline).
fn christoffel_poly(g: &PolyMatrix, ginv: &PolyMatrix) -> Result<Arr<Poly>> {
    let m = g.rows();
    let dg = (0..m).map(|k| g.partial(k)).collect::<Result<Vec<_>>>()?;
    let zero = Poly::zero(m);
    let half = Q::new(1.into(), 2.into());
    Ok(Arr::build(m, 3, |i| {
        let (r, mu, nu) = (i[0], i[1], i[2]);
        sum(&zero, m, |l| {
            let first = &(&dg[mu][(l, nu)] + &dg[nu][(l, mu)]) - &dg[l][(mu, nu)];
            &ginv[(r, l)] * &first
        })
        .scale(&half)
    }))
}

fn partial_arr(a: &Arr<Poly>, rank: usize) -> Result<Arr<Poly>> {
    let m = a.m;
    let mut data = Vec::with_capacity(m * a.data.len());
    for k in 0..m {
        for p in &a.data {
            data.push(p.partial(k)?);
        }
    }
    debug_assert_eq!(data.len(), m.pow(rank as u32 + 1));
    Ok(Arr { m, data })
}

fn polynomial_inverse(g: &MetricField) -> Result<&PolyMatrix> {
    if g.det.is_zero() {
        return Err(Error::DegenerateMetric("det g vanishes identically".into()));
    }
    g.inverse().ok_or_else(|| {
        Error::Unsupported("det g is not constant, so g⁻¹ is not polynomial; evaluate at a point".into())
    })
}

/// Exact polynomial curvature; requires det g to be a nonzero constant.
pub fn metric_curvature(g: &MetricField) -> Result<CurvaturePack> {
    let ginv = polynomial_inverse(g)?.clone();
    let m = g.dim();
    let zero = Poly::zero(m);
    let gamma = christoffel_poly(&g.g, &ginv)?;
    let dgamma = partial_arr(&gamma, 3)?;
    let riem = assemble_riemann(&zero, &gamma, &dgamma);
    let ric = ricci_of(&zero, &riem);
    let r = trace2(&zero, &poly_arr(&ginv), &ric);
    Ok(CurvaturePack {
        riemann: tensor_from_poly(m, riemann_slots(m), riem),
        ricci: tensor_from_poly(m, vec![Slot::cov(m); 2], ric),
        scalar: TensorField::from_components(m, vec![], vec![r])?,
        metric: g.g.clone(),
        inverse: ginv,
        point: None,
    })
}

struct PointData {
    g0: crate::QMatrix,
    ginv: crate::QMatrix,
    gamma: Arr<Q>,
    dgamma: Arr<Q>,
}

fn point_data(g: &MetricField, point: &[Q]) -> Result<PointData> {
    let m = g.dim();
    if point.len() != m {
        return arg_err(format!("point has {} coordinates, expected {m}", point.len()));
    }
    let g0 = g.g.eval(point)?;
    let ginv = g0.inverse().ok_or_else(|| Error::DegenerateMetric(format!("det g = 0 at {point:?}")))?;
    let dg = (0..m).map(|k| g.g.partial(k)?.eval(point)).collect::<Result<Vec<_>>>()?;
    let mut ddg = Vec::with_capacity(m * m);
    for k in 0..m {
        let gk = g.g.partial(k)?;
        for l in 0..m {
            ddg.push(gk.partial(l)?.eval(point)?);
        }
    }
    let half = Q::new(1.into(), 2.into());
    // first-kind symbols Γ_{λμν} and their derivatives ∂_κΓ_{λμν}
    let first = Arr::build(m, 3, |i| {
        let (l, mu, nu) = (i[0], i[1], i[2]);
        (&dg[mu][(l, nu)] + &dg[nu][(l, mu)] - &dg[l][(mu, nu)]) * &half
    });
    let dfirst = Arr::build(m, 4, |i| {
        let (k, l, mu, nu) = (i[0], i[1], i[2], i[3]);
        (&ddg[k * m + mu][(l, nu)] + &ddg[k * m + nu][(l, mu)] - &ddg[k * m + l][(mu, nu)]) * &half
    });
    // ∂_κ g⁻¹ = −g⁻¹ (∂_κ g) g⁻¹
    let dinv: Vec<crate::QMatrix> = dg.iter().map(|d| -&(&(&ginv * d) * &ginv)).collect();
    let zero = Q::zero();
    let gamma = Arr::build(m, 3, |i| sum(&zero, m, |l| &ginv[(i[0], l)] * first.at(&[l, i[1], i[2]])));
    let dgamma = Arr::build(m, 4, |i| {
        let (k, r, mu, nu) = (i[0], i[1], i[2], i[3]);
        sum(&zero, m, |l| &dinv[k][(r, l)] * first.at(&[l, mu, nu]) + &ginv[(r, l)] * dfirst.at(&[k, l, mu, nu]))
    });
    Ok(PointData { g0, ginv, gamma, dgamma })
}

/// Curvature evaluated exactly at a rational point.
pub fn metric_curvature_at(g: &MetricField, point: &[Q]) -> Result<CurvaturePack> {
    let m = g.dim();
    let pd = point_data(g, point)?;
    let zero = Q::zero();
    let riem = assemble_riemann(&zero, &pd.gamma, &pd.dgamma);
    let ric = ricci_of(&zero, &riem);
    let r = trace2(&zero, &q_arr(&pd.ginv), &ric);
    Ok(CurvaturePack {
        riemann: tensor_from_q(m, riemann_slots(m), riem),
        ricci: tensor_from_q(m, vec![Slot::cov(m); 2], ric),
        scalar: TensorField::from_components(m, vec![], vec![Poly::constant(m, r)])?,
        metric: PolyMatrix::constant(&pd.g0, m),
        inverse: PolyMatrix::constant(&pd.ginv, m),
        point: Some(point.to_vec()),
    })
}

/// (D, R̂) with D = det g and R^ρ_{σμν} = R̂^ρ_{σμν}/D² as rational functions.
pub fn riemann_numerator(g: &MetricField) -> Result<(Poly, TensorField)> {
    let m = g.dim();
    if g.det.is_zero() {
        return Err(Error::DegenerateMetric("det g vanishes identically".into()));
    }
    let (_, riem) = cleared_riemann(g)?;
    Ok((g.det.clone(), tensor_from_poly(m, riemann_slots(m), riem)))
}

fn cleared_riemann(g: &MetricField) -> Result<(PolyMatrix, Arr<Poly>)> {
    let m = g.dim();
    let zero = Poly::zero(m);
    let adj = g.g.adjugate()?;
    let d = &g.det;
    let dd = (0..m).map(|k| d.partial(k)).collect::<Result<Vec<_>>>()?;
    // Γ = Γ̂/D, ∂_κΓ = (D∂_κΓ̂ − Γ̂∂_κD)/D²
    let gh = christoffel_poly(&g.g, &adj)?;
    let dgh = partial_arr(&gh, 3)?;
    let dgamma = Arr::build(m, 4, |i| {
        let (k, r, mu, nu) = (i[0], i[1], i[2], i[3]);
        &(d * dgh.at(&[k, r, mu, nu])) - &(gh.at(&[r, mu, nu]) * &dd[k])
    });
    Ok((adj, assemble_riemann(&zero, &gh, &dgamma)))
}

/// (D, Ŵ) with D = det g and W_{ρσμν} = Ŵ_{ρσμν}/D³ as rational functions.
pub fn weyl_numerator(g: &MetricField) -> Result<(Poly, TensorField)> {
    let m = g.dim();
    check_weyl_dim(m)?;
    if g.det.is_zero() {
        return Err(Error::DegenerateMetric("det g vanishes identically".into()));
    }
    let zero = Poly::zero(m);
    let d = &g.det;
    let (adj, riem_hat) = cleared_riemann(g)?;
    let garr = poly_arr(&g.g);
    // over D²: R_cov, Ric; over D³: r, h, W
    let riem_cov = lower_first(&zero, &garr, &riem_hat);
    let ric = ricci_of(&zero, &riem_hat);
    let r = trace2(&zero, &poly_arr(&adj), &ric);
    let ric_d = Arr { m, data: ric.data.iter().map(|p| p * d).collect() };
    let riem_d = Arr { m, data: riem_cov.data.iter().map(|p| p * d).collect() };
    let w = assemble_weyl(&riem_d, &ric_d, &r, &garr);
    Ok((d.clone(), tensor_from_poly(m, vec![Slot::cov(m); 4], w)))
}

fn check_weyl_dim(m: usize) -> Result<()> {
    if m <= 2 {
        return arg_err(format!("Weyl tensor needs dimension at least 3, got {m}"));
    }
    Ok(())
}

fn weyl_from_pack<T: Ring>(zero: &T, g: &Arr<T>, ginv: &Arr<T>, riem: &Arr<T>) -> (Arr<T>, Arr<T>) {
    let ric = ricci_of(zero, riem);
    let r = trace2(zero, ginv, &ric);
    let riem_cov = lower_first(zero, g, riem);
    let w = assemble_weyl(&riem_cov, &ric, &r, g);
    let mixed = raise_first(zero, ginv, &w);
    (w, mixed)
}

/// Weyl tensor over polynomials; requires det g to be a nonzero constant.
pub fn weyl(g: &MetricField) -> Result<WeylTensor> {
    let m = g.dim();
    check_weyl_dim(m)?;
    let ginv = polynomial_inverse(g)?.clone();
    let zero = Poly::zero(m);
    let gamma = christoffel_poly(&g.g, &ginv)?;
    let dgamma = partial_arr(&gamma, 3)?;
    let riem = assemble_riemann(&zero, &gamma, &dgamma);
    let (w, mixed) = weyl_from_pack(&zero, &poly_arr(&g.g), &poly_arr(&ginv), &riem);
    Ok(WeylTensor {
        covariant: tensor_from_poly(m, vec![Slot::cov(m); 4], w),
        mixed: tensor_from_poly(m, riemann_slots(m), mixed),
    })
}

/// Weyl tensor evaluated exactly at a rational point.
pub fn weyl_at(g: &MetricField, point: &[Q]) -> Result<WeylTensor> {
    let m = g.dim();
    check_weyl_dim(m)?;
    let pd = point_data(g, point)?;
    let zero = Q::zero();
    let riem = assemble_riemann(&zero, &pd.gamma, &pd.dgamma);
    let (w, mixed) = weyl_from_pack(&zero, &q_arr(&pd.g0), &q_arr(&pd.ginv), &riem);
    Ok(WeylTensor {
        covariant: tensor_from_q(m, vec![Slot::cov(m); 4], w),
        mixed: tensor_from_q(m, riemann_slots(m), mixed),
    })
}

/// Contraction of two covariant slots `a < b` of `t` with an inverse metric.
pub fn trace_with(t: &TensorField, inverse: &PolyMatrix, a: usize, b: usize) -> Result<TensorField> {
    let r = t.rank();
    if a >= b || b >= r {
        return arg_err("trace slots must satisfy a < b < rank");
    }
    let m = inverse.rows();
    let slots: Vec<Slot> = t.slots().iter().enumerate().filter(|&(i, _)| i != a && i != b).map(|(_, s)| *s).collect();
    Ok(TensorField::from_fn(t.nvars(), slots, |rest| {
        let mut acc = Poly::zero(t.nvars());
        for i in 0..m {
            for j in 0..m {
                if inverse[(i, j)].is_zero() {
                    continue;
                }
                let mut full = rest.to_vec();
                full.insert(a, i);
                full.insert(b, j);
                acc = acc + &inverse[(i, j)] * t.get(&full);
            }
        }
        acc
    }))
}

/// Scalar value of a rank-0 tensor.
pub fn scalar_value(t: &TensorField) -> Option<&Poly> {
    (t.rank() == 0).then(|| t.get(&[]))
}
