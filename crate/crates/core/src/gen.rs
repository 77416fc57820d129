//! Seeded random instances for property suites: small-coefficient
//! polynomials, valid sections (connections, metrics, almost complex
//! structures, superconnections), group elements and jets.

use num_traits::Zero;
use rand::Rng;

use crate::curvature::{AlmostComplex, ConnectionField, MetricField};
use crate::jets::{Bilinear, Jet1Acs, Jet1Connection, Jet1Super, Jet2Diffeo, Jet2VertAut};
use crate::linalg::QMatrix;
use crate::orbits::SuperAut;
use crate::polyfield::{q, qr, GaugeElement, Poly, PolyMap, PolyMatrix, Slot, SlotSymmetry, TensorField};
use crate::supergeometry::SuperconnectionField;
use crate::Q;

/// Nonzero rational with small numerator and denominator.
pub fn nonzero_rational<R: Rng + ?Sized>(rng: &mut R) -> Q {
    let n = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
    qr(n, rng.gen_range(1..=3))
}

/// Rational in [−3, 3] with denominator ≤ 3, zero about one time in five.
pub fn rational<R: Rng + ?Sized>(rng: &mut R) -> Q {
    if rng.gen_ratio(1, 5) {
        Q::zero()
    } else {
        nonzero_rational(rng)
    }
}

pub fn point<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<Q> {
    (0..m).map(|_| rational(rng)).collect()
}

/// Up to `max_terms` monomials of total degree ≤ `max_degree`.
pub fn poly<R: Rng + ?Sized>(rng: &mut R, nvars: usize, max_degree: u32, max_terms: usize) -> Poly {
    let n = rng.gen_range(0..=max_terms);
    let terms = (0..n).map(|_| {
        let mut e = vec![0u32; nvars];
        let deg = rng.gen_range(0..=max_degree);
        for _ in 0..deg {
            if nvars > 0 {
                e[rng.gen_range(0..nvars)] += 1;
            }
        }
        (e, nonzero_rational(rng))
    });
    Poly::from_terms(nvars, terms).expect("exponents sized to nvars")
}

/// Like `poly`, restricted to the variables listed in `vars`.
pub fn poly_in<R: Rng + ?Sized>(rng: &mut R, nvars: usize, vars: &[usize], max_degree: u32, max_terms: usize) -> Poly {
    if vars.is_empty() {
        return Poly::constant(nvars, rational(rng));
    }
    let n = rng.gen_range(0..=max_terms);
    let terms = (0..n).map(|_| {
        let mut e = vec![0u32; nvars];
        for _ in 0..rng.gen_range(0..=max_degree) {
            e[vars[rng.gen_range(0..vars.len())]] += 1;
        }
        (e, nonzero_rational(rng))
    });
    Poly::from_terms(nvars, terms).expect("exponents sized to nvars")
}

pub fn qmatrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| rational(rng))
}

/// Invertible constant matrix S·D with S unimodular and D a nonzero
/// rational diagonal, returned with its exact inverse.
pub fn invertible_qmatrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (QMatrix, QMatrix) {
    let d = QMatrix::from_fn(n, n, |i, j| if i == j { nonzero_rational(rng) } else { Q::zero() });
    let (s, _) = unimodular_qmatrix(rng, n);
    let a = &s * &d;
    let inv = a.inverse().expect("product of invertible factors");
    (a, inv)
}

/// Integer matrix L·U with unit triangular factors and entries of L, U in
/// {−1, 0, 1}, returned with its (integer) inverse.
pub fn unimodular_qmatrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (QMatrix, QMatrix) {
    let mut small = || q(rng.gen_range(-1..=1));
    let l = QMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => q(1),
        std::cmp::Ordering::Greater => small(),
        std::cmp::Ordering::Less => Q::zero(),
    });
    let u = QMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => q(1),
        std::cmp::Ordering::Less => small(),
        std::cmp::Ordering::Greater => Q::zero(),
    });
    let a = &l * &u;
    let inv = a.inverse().expect("unit triangular factors");
    (a, inv)
}

pub fn poly_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    nvars: usize,
    max_degree: u32,
    max_terms: usize,
) -> PolyMatrix {
    PolyMatrix::from_fn(rows, cols, nvars, |_, _| poly(rng, nvars, max_degree, max_terms))
}

pub fn connection<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, max_degree: u32) -> ConnectionField {
    ConnectionField::new((0..m).map(|_| poly_matrix(rng, n, n, m, max_degree, 2)).collect())
        .expect("consistent shapes")
}

/// I + strictly upper triangular polynomial part.
pub fn upper_unipotent<R: Rng + ?Sized>(rng: &mut R, n: usize, nvars: usize, max_degree: u32) -> PolyMatrix {
    PolyMatrix::from_fn(n, n, nvars, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Poly::one(nvars),
        std::cmp::Ordering::Less => poly(rng, nvars, max_degree, 2),
        std::cmp::Ordering::Greater => Poly::zero(nvars),
    })
}

/// Unipotent gauge element I + N with N strictly upper triangular.
pub fn unipotent_gauge<R: Rng + ?Sized>(rng: &mut R, n: usize, nvars: usize, max_degree: u32) -> GaugeElement {
    GaugeElement::unipotent(upper_unipotent(rng, n, nvars, max_degree)).expect("unipotent by construction")
}

/// Unipotent gauge element equal to the identity at the origin.
pub fn origin_normalized_gauge<R: Rng + ?Sized>(rng: &mut R, n: usize, nvars: usize, max_degree: u32) -> GaugeElement {
    let mut p = PolyMatrix::identity(n, nvars);
    for i in 0..n {
        for k in i + 1..n {
            let c = poly(rng, nvars, max_degree, 2);
            p[(i, k)] = &c - &Poly::constant(nvars, c.constant_term());
        }
    }
    GaugeElement::unipotent(p).expect("unipotent by construction")
}

/// Gauge element S·U·Lᵀ with constant invertible S and polynomial unit
/// triangular U (upper) and L (lower), carried with its exact inverse.
pub fn gauge<R: Rng + ?Sized>(rng: &mut R, n: usize, nvars: usize, max_degree: u32) -> GaugeElement {
    let (s, s_inv) = invertible_qmatrix(rng, n);
    let u = upper_unipotent(rng, n, nvars, max_degree);
    let l = upper_unipotent(rng, n, nvars, max_degree).transpose();
    let u_inv = u.unipotent_inverse().expect("unipotent");
    let l_inv = l.unipotent_inverse().expect("unipotent");
    let s_p = PolyMatrix::constant(&s, nvars);
    let s_inv_p = PolyMatrix::constant(&s_inv, nvars);
    let phi = s_p.checked_mul(&u).and_then(|x| x.checked_mul(&l)).expect("square");
    let phi_inv = l_inv.checked_mul(&u_inv).and_then(|x| x.checked_mul(&s_inv_p)).expect("square");
    GaugeElement::with_inverse(phi, phi_inv).expect("inverse by construction")
}

/// Triangular map x^μ ↦ x^μ + f_μ(x^{μ+1}, …) with f_μ vanishing at
/// `fixed`, so the map fixes that point and has unipotent Jacobian.
pub fn triangular_diffeo<R: Rng + ?Sized>(rng: &mut R, fixed: &[Q], max_degree: u32) -> PolyMap {
    let m = fixed.len();
    let comps = (0..m)
        .map(|mu| {
            let later: Vec<usize> = (mu + 1..m).collect();
            let f = if later.is_empty() { Poly::zero(m) } else { poly_in(rng, m, &later, max_degree, 2) };
            let shift = f.eval(fixed).expect("point sized to m");
            &(&Poly::var(m, mu).expect("in range") + &f) - &Poly::constant(m, shift)
        })
        .collect();
    PolyMap::new(comps).expect("m components in m variables")
}

/// Pᵀ·D·P with P polynomial unipotent and D constant positive diagonal;
/// det is the constant det D.
pub fn metric_constant_det<R: Rng + ?Sized>(rng: &mut R, m: usize, max_degree: u32) -> MetricField {
    let p = upper_unipotent(rng, m, m, max_degree);
    let d = PolyMatrix::from_fn(m, m, m, |i, j| {
        if i == j {
            Poly::constant(m, qr(rng.gen_range(1..=3), rng.gen_range(1..=2)))
        } else {
            Poly::zero(m)
        }
    });
    let g = p.transpose().checked_mul(&d).and_then(|x| x.checked_mul(&p)).expect("square");
    MetricField::new(g).expect("symmetric by construction")
}

/// c·I plus a symmetric polynomial perturbation; det is generally a
/// nonconstant polynomial.
pub fn metric_general<R: Rng + ?Sized>(rng: &mut R, m: usize, max_degree: u32) -> MetricField {
    let c = q(rng.gen_range(2..=4));
    let mut g = PolyMatrix::zeros(m, m, m);
    for i in 0..m {
        for j in i..m {
            let mut p = poly(rng, m, max_degree, 2).scale(&qr(1, 4));
            if i == j {
                p = &p + &Poly::constant(m, c.clone());
            }
            g[(i, j)] = p.clone();
            g[(j, i)] = p;
        }
    }
    MetricField::new(g).expect("symmetric by construction")
}

/// The canonical structure conjugated by a constant invertible S and a
/// polynomial unipotent U: S·U·J₀·U⁻¹·S⁻¹.
pub fn acs<R: Rng + ?Sized>(rng: &mut R, m: usize, max_degree: u32) -> AlmostComplex {
    let j0 = AlmostComplex::canonical(m).expect("even dimension");
    let u = upper_unipotent(rng, m, m, max_degree);
    let u_inv = u.unipotent_inverse().expect("unipotent");
    let (s, s_inv) = unimodular_qmatrix(rng, m);
    let j = PolyMatrix::constant(&s, m)
        .checked_mul(&u)
        .and_then(|x| x.checked_mul(j0.matrix()))
        .and_then(|x| x.checked_mul(&u_inv))
        .and_then(|x| x.checked_mul(&PolyMatrix::constant(&s_inv, m)))
        .expect("square");
    AlmostComplex::new(j).expect("conjugate of a complex structure")
}

pub fn superconnection<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n_plus: usize,
    n_minus: usize,
    max_degree: u32,
) -> SuperconnectionField {
    SuperconnectionField::new(
        connection(rng, m, n_plus, max_degree),
        connection(rng, m, n_minus, max_degree),
        poly_matrix(rng, n_plus, n_minus, m, max_degree, 2),
        poly_matrix(rng, n_minus, n_plus, m, max_degree, 2),
    )
    .expect("consistent shapes")
}

pub fn jet1_connection<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Jet1Connection {
    Jet1Connection::new((0..m).map(|_| qmatrix(rng, n, n)).collect(), (0..m * m).map(|_| qmatrix(rng, n, n)).collect())
        .expect("consistent shapes")
}

fn symmetric_family<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Vec<QMatrix> {
    let mut out = vec![QMatrix::zeros(n, n); m * m];
    for a in 0..m {
        for b in a..m {
            let x = qmatrix(rng, n, n);
            out[a * m + b] = x.clone();
            out[b * m + a] = x;
        }
    }
    out
}

/// 2-jet 1 + B_αx^α + ½B_{αβ}x^αx^β.
pub fn jet2_vert_aut_normalized<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Jet2VertAut {
    let b = (0..m).map(|_| qmatrix(rng, n, n)).collect();
    Jet2VertAut::normalized(b, symmetric_family(rng, m, n)).expect("symmetric second derivatives")
}

/// 2-jet with an arbitrary invertible leading term.
pub fn jet2_vert_aut<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Jet2VertAut {
    let (b0, _) = invertible_qmatrix(rng, n);
    let b = (0..m).map(|_| qmatrix(rng, n, n)).collect();
    Jet2VertAut::new(b0, b, symmetric_family(rng, m, n)).expect("invertible leading term")
}

/// Random bilinear map symmetric in its two arguments.
pub fn symmetric_bilinear<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Bilinear {
    let mut b = Bilinear::zeros(m);
    for mu in 0..m {
        for nu in 0..m {
            for rho in nu..m {
                let v = rational(rng);
                b.set(mu, nu, rho, v.clone());
                b.set(mu, rho, nu, v);
            }
        }
    }
    b
}

/// Constant complex structure S·J₀·S⁻¹ with S unimodular.
pub fn constant_complex_structure<R: Rng + ?Sized>(rng: &mut R, m: usize) -> QMatrix {
    let j0 = AlmostComplex::canonical(m).expect("even dimension").matrix().eval(&vec![Q::zero(); m]).expect("sized");
    let (s, s_inv) = unimodular_qmatrix(rng, m);
    &(&s * &j0) * &s_inv
}

/// Valid acs 1-jet: slices C_ρ = X_ρ + J·X_ρ·J anticommute with J.
pub fn jet1_acs<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Jet1Acs {
    let j = constant_complex_structure(rng, m);
    let slices: Vec<QMatrix> = (0..m)
        .map(|_| {
            let x = qmatrix(rng, m, m);
            &x + &(&(&j * &x) * &j)
        })
        .collect();
    Jet1Acs::new(j, Bilinear::from_slices(&slices).expect("m slices")).expect("compatible by construction")
}

pub fn jet2_diffeo_normalized<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Jet2Diffeo {
    Jet2Diffeo::normalized(symmetric_bilinear(rng, m)).expect("symmetric")
}

pub fn jet2_diffeo<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Jet2Diffeo {
    let (b, _) = invertible_qmatrix(rng, m);
    Jet2Diffeo::new(b, symmetric_bilinear(rng, m)).expect("invertible linear part")
}

pub fn jet1_super<R: Rng + ?Sized>(rng: &mut R, m: usize, n_plus: usize, n_minus: usize) -> Jet1Super {
    Jet1Super::new(
        jet1_connection(rng, m, n_plus),
        jet1_connection(rng, m, n_minus),
        qmatrix(rng, n_plus, n_minus),
        qmatrix(rng, n_minus, n_plus),
        (0..m).map(|_| qmatrix(rng, n_plus, n_minus)).collect(),
        (0..m).map(|_| qmatrix(rng, n_minus, n_plus)).collect(),
    )
    .expect("consistent shapes")
}

pub fn super_aut_normalized<R: Rng + ?Sized>(rng: &mut R, m: usize, n_plus: usize, n_minus: usize) -> SuperAut {
    SuperAut { plus: jet2_vert_aut_normalized(rng, m, n_plus), minus: jet2_vert_aut_normalized(rng, m, n_minus) }
}

/// Alternating k-form: independent components on strictly increasing index
/// tuples, extended by the sign of the sorting permutation.
pub fn alternating_form<R: Rng + ?Sized>(rng: &mut R, m: usize, k: usize, max_degree: u32) -> TensorField {
    let mut base: std::collections::BTreeMap<Vec<usize>, Poly> = std::collections::BTreeMap::new();
    let mut t = TensorField::from_fn(m, vec![Slot::cov(m); k], |idx| {
        let mut sorted = idx.to_vec();
        let mut odd = false;
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    odd = !odd;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Poly::zero(m);
        }
        let p = base.entry(sorted).or_insert_with(|| poly(rng, m, max_degree, 3)).clone();
        if odd {
            -p
        } else {
            p
        }
    });
    for a in 1..k {
        t = t.with_symmetry(SlotSymmetry::Antisymmetric(a - 1, a)).expect("alternating by construction");
    }
    t
}
