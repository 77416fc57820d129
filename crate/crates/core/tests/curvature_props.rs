mod common;

use curvlab::curvature::{
    contract_vector_valued, covariant_differential, exterior_derivative, gauge_transform, metric_curvature,
    metric_curvature_at, nijenhuis, nijenhuis_vector_form, pullback_acs, pure_gauge, trace_with, weyl_at,
    yang_mills_curvature, AlmostComplex, CurvaturePack, MatForm, MetricField, ValueKind,
};
use curvlab::gen;
use curvlab::polyfield::{q, qr, Poly, PolyMatrix};
use curvlab::{Error, Q};
use num_traits::Zero;
use proptest::prelude::*;

fn riemann_symmetries_hold(pack: &CurvaturePack) -> bool {
    let m = pack.metric.rows();
    let r = pack.riemann_lowered();
    common::all_tuples(m, 4).iter().all(|i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        let v = r.get(i);
        let anti1 = v + r.get(&[b, a, c, d]);
        let anti2 = v + r.get(&[a, b, d, c]);
        let pair = v - r.get(&[c, d, a, b]);
        let bianchi = &(v + r.get(&[a, c, d, b])) + r.get(&[a, d, b, c]);
        anti1.is_zero() && anti2.is_zero() && pair.is_zero() && bianchi.is_zero()
    })
}

/// A metric with c·I + perturbation and a point where it is nondegenerate.
fn general_metric_at(r: &mut rand_chacha::ChaCha8Rng, m: usize) -> (MetricField, Vec<Q>) {
    loop {
        let g = gen::metric_general(r, m, 2);
        let pt = gen::point(r, m);
        if !g.det().eval(&pt).unwrap().is_zero() {
            return (g, pt);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), k in 0usize..3) {
        let mut r = common::rng(seed);
        let omega = common::random_form(&mut r, 4, k, 3);
        let dd = exterior_derivative(&exterior_derivative(&omega).unwrap()).unwrap();
        prop_assert!(dd.is_zero());
    }

    #[test]
    fn gauge_covariance(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let conn = gen::connection(&mut r, 3, 2, 2);
        let g = gen::gauge(&mut r, 2, 3, 1);
        let lhs = yang_mills_curvature(&gauge_transform(&conn, &g).unwrap()).unwrap();
        let rhs = yang_mills_curvature(&conn).unwrap().conjugate(g.phi(), g.inverse()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pure_gauge_is_flat(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g = gen::gauge(&mut r, 2, 3, 2);
        prop_assert!(yang_mills_curvature(&pure_gauge(&g).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn covariant_differential_squares_to_curvature(seed in any::<u64>(), k in 0usize..2) {
        let mut r = common::rng(seed);
        let (m, n) = (3, 2);
        let conn = gen::connection(&mut r, m, n, 2);
        let psi = MatForm::try_from_fn(m, k, n, 1, |_| Ok(gen::poly_matrix(&mut r, n, 1, m, 2, 2))).unwrap();
        let dd = covariant_differential(&conn, &covariant_differential(&conn, &psi, ValueKind::Vector).unwrap(), ValueKind::Vector)
            .unwrap();
        let f = yang_mills_curvature(&conn).unwrap();
        if k == 0 {
            prop_assert_eq!(dd, f.act_on(psi.get(&[])).unwrap());
        } else {
            // (F∧ψ)_{μνρ} = F_{μν}ψ_ρ + F_{νρ}ψ_μ + F_{ρμ}ψ_ν
            for i in common::all_tuples(m, 3) {
                let (a, b, c) = (i[0], i[1], i[2]);
                let want = &(&(f.get(&[a, b]) * psi.get(&[c])) + &(f.get(&[b, c]) * psi.get(&[a]))) + &(f.get(&[c, a]) * psi.get(&[b]));
                prop_assert_eq!(dd.get(&i), &want);
            }
        }
    }

    #[test]
    fn bianchi_identity(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let conn = gen::connection(&mut r, 3, 2, 2);
        let f = yang_mills_curvature(&conn).unwrap();
        prop_assert!(covariant_differential(&conn, &f, ValueKind::Endomorphism).unwrap().is_zero());
    }

    #[test]
    fn nijenhuis_forms_agree_and_are_tensorial(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let m = 4;
        let acs = gen::acs(&mut r, m, 1);
        let n = nijenhuis(&acs).unwrap();
        let xf: Vec<Poly> = (0..m).map(|_| gen::poly(&mut r, m, 1, 2)).collect();
        let yf: Vec<Poly> = (0..m).map(|_| gen::poly(&mut r, m, 1, 2)).collect();
        let f = gen::poly(&mut r, m, 1, 2);
        prop_assert_eq!(nijenhuis_vector_form(&acs, &xf, &yf).unwrap(), contract_vector_valued(&n, &xf, &yf).unwrap());
        let fx: Vec<Poly> = xf.iter().map(|p| &f * p).collect();
        let scaled: Vec<Poly> = nijenhuis_vector_form(&acs, &xf, &yf).unwrap().iter().map(|p| &f * p).collect();
        prop_assert_eq!(nijenhuis_vector_form(&acs, &fx, &yf).unwrap(), scaled);
    }

    #[test]
    fn dimension_two_structures_are_integrable(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        prop_assert!(nijenhuis(&gen::acs(&mut r, 2, 2)).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn pullbacks_of_the_canonical_structure_are_integrable(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let fixed = gen::point(&mut r, 4);
        let phi = gen::triangular_diffeo(&mut r, &fixed, 2);
        let j0 = AlmostComplex::canonical(4).unwrap();
        prop_assert!(nijenhuis(&pullback_acs(&j0, &phi).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn riemann_symmetries_exact(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g = gen::metric_constant_det(&mut r, 3, 1);
        prop_assert!(riemann_symmetries_hold(&metric_curvature(&g).unwrap()));
    }

    #[test]
    fn riemann_symmetries_pointwise(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let (g, pt) = general_metric_at(&mut r, 3);
        let pack = metric_curvature_at(&g, &pt).unwrap();
        prop_assert!(riemann_symmetries_hold(&pack));
        for i in common::all_tuples(3, 2) {
            prop_assert_eq!(pack.ricci.get(&i), pack.ricci.get(&[i[1], i[0]]));
        }
    }

    #[test]
    fn exact_and_pointwise_pipelines_agree(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g = gen::metric_constant_det(&mut r, 3, 1);
        let pt = gen::point(&mut r, 3);
        let exact = metric_curvature(&g).unwrap();
        let at = metric_curvature_at(&g, &pt).unwrap();
        let (er, es) = (exact.riemann.eval_at(&pt).unwrap(), exact.scalar.eval_at(&pt).unwrap());
        prop_assert_eq!(er.components(), at.riemann.components());
        prop_assert_eq!(es.components(), at.scalar.components());
    }

    #[test]
    fn weyl_is_trace_free_and_conformally_invariant(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let (g, pt) = general_metric_at(&mut r, 4);
        let w = weyl_at(&g, &pt).unwrap();
        let ginv = PolyMatrix::constant(&g.matrix().eval(&pt).unwrap().inverse().unwrap(), 4);
        for (a, b) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            prop_assert!(trace_with(&w.covariant, &ginv, a, b).unwrap().is_zero());
        }
        let base = &Poly::one(4) + &gen::poly(&mut r, 4, 1, 2);
        let f = base.pow(2);
        prop_assume!(!f.eval(&pt).unwrap().is_zero());
        let w2 = weyl_at(&g.conformal(&f).unwrap(), &pt).unwrap();
        prop_assert_eq!(w.mixed, w2.mixed);
    }
}

#[test]
fn degenerate_point_is_reported() {
    let m = 2;
    let x1 = Poly::var(m, 0).unwrap();
    let g = MetricField::new(PolyMatrix::from_fn(m, m, m, |i, j| match (i, j) {
        (0, 0) => Poly::one(m),
        (1, 1) => x1.pow(2),
        _ => Poly::zero(m),
    }))
    .unwrap();
    assert!(matches!(metric_curvature_at(&g, &[q(0), qr(1, 2)]), Err(Error::DegenerateMetric(_))));
    assert!(metric_curvature_at(&g, &[q(1), q(0)]).is_ok());
}
