//! Diffeomorphism 2-jets acting on 1-jets of almost complex structures, the
//! map K, the symmetrization s and the projection along ker s.

use num_traits::Zero;

use crate::error::{arg_err, Error, Result};
use crate::jets::{Bilinear, Jet1Acs, Jet2Diffeo};
use crate::linalg::QMatrix;
use crate::polyfield::qr;
use crate::Q;

fn check_match(d: &Jet2Diffeo, j: &Jet1Acs) -> Result<()> {
    if d.dim() != j.dim() {
        return arg_err("diffeomorphism jet and acs jet have different dimensions");
    }
    Ok(())
}

/// K(B)^μ_{νρ} = J^μ_αB^α_{νρ} − B^μ_{αρ}J^α_ν, i.e. K(B)(u, v) = J·B(u, v) − B(Ju, v).
pub fn k_map(b: &Bilinear, j: &QMatrix) -> Result<Bilinear> {
    if !b.is_symmetric() {
        return arg_err("K is defined on bilinear maps symmetric in their arguments");
    }
    Ok(k_unchecked(b, j))
}

fn k_unchecked(b: &Bilinear, j: &QMatrix) -> Bilinear {
    b.left(j).sub(&b.precompose(j, &QMatrix::identity(j.rows())))
}

/// s(C)(u, v) = ½(C(u, v) + C(v, u)).
pub fn symmetrize(c: &Bilinear) -> Bilinear {
    let h = qr(1, 2);
    Bilinear::from_fn(c.dim(), |mu, nu, rho| (c.get(mu, nu, rho) + c.get(mu, rho, nu)) * &h)
}

/// W-membership: J·C(u, v) + C(Ju, v) = 0 for all u, v.
pub fn in_w(c: &Bilinear, j: &QMatrix) -> bool {
    c.left(j).add(&c.precompose(j, &QMatrix::identity(j.rows()))).is_zero()
}

/// Normalized action C ↦ C + K(B₂), J unchanged.
pub fn act_on_acs_jet(d: &Jet2Diffeo, j: &Jet1Acs) -> Result<Jet1Acs> {
    check_match(d, j)?;
    if !d.is_normalized() {
        return Err(Error::Unsupported(
            "diffeomorphism jet must have identity linear part; use act_on_acs_jet_general".into(),
        ));
    }
    Jet1Acs::new(j.j().clone(), j.c().add(&k_map(d.b2(), j.j())?))
}

/// Action of an arbitrary fixed-point 2-jet (pullback φ*J = Dφ⁻¹·J∘φ·Dφ).
pub fn act_on_acs_jet_general(d: &Jet2Diffeo, j: &Jet1Acs) -> Result<Jet1Acs> {
    check_match(d, j)?;
    let m = j.dim();
    let b = d.b();
    let bi = b.inverse().ok_or_else(|| Error::Internal("singular jet passed validation".into()))?;
    let jm = j.j();
    let j_new = &(&bi * jm) * b;
    let slices: Vec<QMatrix> = (0..m)
        .map(|rho| {
            let mut moved = QMatrix::zeros(m, m);
            for s in 0..m {
                if !b[(s, rho)].is_zero() {
                    moved = &moved + &j.c().slice(s).scale(&b[(s, rho)]);
                }
            }
            let b2r = d.b2().slice(rho);
            let t1 = &(&bi * &moved) * b;
            let t2 = &(&(&(&bi * &b2r) * &bi) * jm) * b;
            let t3 = &(&bi * jm) * &b2r;
            &(&t1 - &t2) + &t3
        })
        .collect();
    Jet1Acs::new(j_new, Bilinear::from_slices(&slices)?)
}

/// Index pairs ν ≤ ρ enumerating a basis of symmetric arguments.
fn sym_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|a| (a..m).map(move |b| (a, b))).collect()
}

fn sym_basis(m: usize, mu: usize, a: usize, b: usize) -> Bilinear {
    let mut e = Bilinear::zeros(m);
    e.set(mu, a, b, Q::from_integer(1.into()));
    e.set(mu, b, a, Q::from_integer(1.into()));
    e
}

fn sym_coords(c: &Bilinear) -> Vec<Q> {
    let m = c.dim();
    (0..m).flat_map(|mu| sym_pairs(m).into_iter().map(move |(a, b)| (mu, a, b))).map(|(mu, a, b)| c.get(mu, a, b).clone()).collect()
}

/// Matrix of s∘K on S²L*⊗L in the basis (μ; ν ≤ ρ).
pub fn s_k_matrix(j: &QMatrix) -> QMatrix {
    let m = j.rows();
    let basis: Vec<Bilinear> =
        (0..m).flat_map(|mu| sym_pairs(m).into_iter().map(move |(a, b)| sym_basis(m, mu, a, b))).collect();
    let cols: Vec<Vec<Q>> = basis.iter().map(|e| sym_coords(&symmetrize(&k_unchecked(e, j)))).collect();
    let n = basis.len();
    QMatrix::from_fn(n, n, |r, c| cols[c][r].clone())
}

/// Output of the projection of an acs jet along ker s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcsProjection {
    /// Symmetric B with s(K(B)) = s(C) (free coordinates set to zero).
    pub b: Bilinear,
    /// P(C) = K(B), the part removable by a normalized diffeomorphism jet.
    pub gauge_part: Bilinear,
    /// (1 − P)(C) ∈ ker s.
    pub ker_s_part: Bilinear,
    /// ¼(C(u,v) − C(v,u) + J·C(u,Jv) − J·C(v,Ju)).
    pub closed_form: Bilinear,
    /// ½(C(u,v) − C(v,u) − J·C(u,Jv) + J·C(v,Ju)), kept for comparison.
    pub printed_closed_form: Bilinear,
    /// −¼ J·N(J)(x₀) from the jet.
    pub quarter_jn: Bilinear,
    /// −½ J·N(J)(x₀) from the jet.
    pub half_jn: Bilinear,
    /// rank of s∘K on S²L*⊗L and the dimension of that space.
    pub rank_s_k: usize,
    pub dim_s2: usize,
}

/// N^ρ_{μν}(x₀) from the jet: J^α_μC^ρ_{να} − J^α_νC^ρ_{μα} − J^ρ_αC^α_{νμ} + J^ρ_αC^α_{μν}.
pub fn nijenhuis_from_jet(j: &Jet1Acs) -> Bilinear {
    let m = j.dim();
    let (jm, c) = (j.j(), j.c());
    Bilinear::from_fn(m, |r, mu, nu| {
        let mut acc = Q::zero();
        for a in 0..m {
            acc += &jm[(a, mu)] * c.get(r, nu, a) - &jm[(a, nu)] * c.get(r, mu, a) - &jm[(r, a)] * c.get(a, nu, mu)
                + &jm[(r, a)] * c.get(a, mu, nu);
        }
        acc
    })
}

fn swap_args(c: &Bilinear) -> Bilinear {
    Bilinear::from_fn(c.dim(), |mu, nu, rho| c.get(mu, rho, nu).clone())
}

/// Splits C = P(C) + (1 − P)(C) with P(C) ∈ K(S²L*⊗L) and (1 − P)(C) ∈ ker s,
/// by solving s∘K(B) = s(C) exactly.
pub fn acs_projection(j: &Jet1Acs) -> Result<AcsProjection> {
    let m = j.dim();
    let jm = j.j();
    let c = j.c();
    let a = s_k_matrix(jm);
    let rhs = sym_coords(&symmetrize(c));
    let (sol, rank_s_k) = a.solve_with_rank(&rhs)?;
    let sol = sol.ok_or_else(|| Error::Internal("s(C) outside s(K(S²)) for a valid jet".into()))?;
    let basis: Vec<Bilinear> =
        (0..m).flat_map(|mu| sym_pairs(m).into_iter().map(move |(p, q)| sym_basis(m, mu, p, q))).collect();
    let mut b = Bilinear::zeros(m);
    for (coef, e) in sol.iter().zip(&basis) {
        if !coef.is_zero() {
            b = b.add(&e.scale(coef));
        }
    }
    let gauge_part = k_unchecked(&b, jm);
    let ker_s_part = c.sub(&gauge_part);
    let id = QMatrix::identity(m);
    let c_uv = c.clone();
    let c_vu = swap_args(c);
    let jc_u_jv = c.precompose(&id, jm).left(jm);
    let jc_v_ju = swap_args(&c.precompose(&id, jm)).left(jm);
    let closed_form = c_uv.sub(&c_vu).add(&jc_u_jv).sub(&jc_v_ju).scale(&qr(1, 4));
    let printed_closed_form = c_uv.sub(&c_vu).sub(&jc_u_jv).add(&jc_v_ju).scale(&qr(1, 2));
    let jn = nijenhuis_from_jet(j).left(jm);
    Ok(AcsProjection {
        b,
        gauge_part,
        ker_s_part,
        closed_form,
        printed_closed_form,
        quarter_jn: jn.scale(&qr(-1, 4)),
        half_jn: jn.scale(&qr(-1, 2)),
        rank_s_k,
        dim_s2: a.rows(),
    })
}

/// Dimension counts of the splitting W = K(S²L*⊗L) ⊕ (ker s ∩ W).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplittingDims {
    pub dim_w: usize,
    pub dim_image_k: usize,
    pub dim_ker_s_in_w: usize,
    pub dim_s2: usize,
    pub rank_s_k: usize,
}

impl SplittingDims {
    pub fn is_direct_sum(&self) -> bool {
        self.dim_w == self.dim_image_k + self.dim_ker_s_in_w
    }
}

fn coord_matrix(rows: Vec<Vec<Q>>, cols: usize) -> QMatrix {
    if rows.is_empty() {
        return QMatrix::zeros(0, cols);
    }
    QMatrix::from_rows(rows).expect("rectangular")
}

/// Ranks over ℚ of the spaces in the splitting, for a constant J.
pub fn splitting_dimensions(j: &QMatrix) -> SplittingDims {
    let m = j.rows();
    let n3 = m * m * m;
    let unit = |k: usize| {
        let mut v = vec![Q::zero(); n3];
        v[k] = Q::from_integer(1.into());
        Bilinear::from_vec(m, v).expect("m³ entries")
    };
    // W constraints: rows are linear functionals C ↦ (J·C + C(J·, ·))^μ_{νρ}
    let w_images: Vec<Bilinear> = (0..n3).map(|k| {
        let e = unit(k);
        e.left(j).add(&e.precompose(j, &QMatrix::identity(m)))
    }).collect();
    let s_images: Vec<Bilinear> = (0..n3).map(|k| symmetrize(&unit(k))).collect();
    let to_rows = |imgs: &[Bilinear]| -> Vec<Vec<Q>> {
        (0..n3).map(|r| imgs.iter().map(|b| b.coefficients()[r].clone()).collect()).collect()
    };
    let w_rows = to_rows(&w_images);
    let s_rows = to_rows(&s_images);
    let dim_w = n3 - coord_matrix(w_rows.clone(), n3).rank();
    let stacked: Vec<Vec<Q>> = w_rows.into_iter().chain(s_rows).collect();
    let dim_ker_s_in_w = n3 - coord_matrix(stacked, n3).rank();
    let k_cols: Vec<Vec<Q>> = (0..m)
        .flat_map(|mu| sym_pairs(m).into_iter().map(move |(a, b)| (mu, a, b)))
        .map(|(mu, a, b)| k_unchecked(&sym_basis(m, mu, a, b), j).coefficients().to_vec())
        .collect();
    let dim_image_k = coord_matrix(k_cols, n3).rank();
    let a = s_k_matrix(j);
    SplittingDims { dim_w, dim_image_k, dim_ker_s_in_w, dim_s2: a.rows(), rank_s_k: a.rank() }
}
