mod common;

use curvlab::curvature::{gauge_transform, pullback_acs, ConnectionField};
use curvlab::jets::{prolong_acs, prolong_connection, prolong_diffeo, prolong_gauge, Jet2Diffeo, Jet2VertAut};
use curvlab::orbits::{act_on_acs_jet_general, act_on_connection_jet_general};
use curvlab::{fd, gen};
use proptest::prelude::*;

const FD_TOL: f64 = 1e-6;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn connection_prolongation_is_linear(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let (m, n) = (3, 2);
        let a = gen::connection(&mut r, m, n, 2);
        let b = gen::connection(&mut r, m, n, 2);
        let pt = gen::point(&mut r, m);
        let sum = ConnectionField::new(
            a.coefficients().iter().zip(b.coefficients()).map(|(x, y)| x.checked_add(y).unwrap()).collect(),
        ).unwrap();
        let (ja, jb, js) = (
            prolong_connection(&a, &pt).unwrap(),
            prolong_connection(&b, &pt).unwrap(),
            prolong_connection(&sum, &pt).unwrap(),
        );
        for mu in 0..m {
            prop_assert_eq!(js.a(mu), &(ja.a(mu) + jb.a(mu)));
            for al in 0..m {
                prop_assert_eq!(js.da(mu, al), &(ja.da(mu, al) + jb.da(mu, al)));
            }
        }
    }

    #[test]
    fn connection_jet_matches_finite_differences(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let conn = gen::connection(&mut r, 3, 2, 3);
        let pt = gen::point(&mut r, 3);
        let jet = prolong_connection(&conn, &pt).unwrap();
        let err = fd::connection_jet_error(conn.coefficients(), &jet, &pt);
        prop_assert!(err <= FD_TOL, "relative error {err}");
    }

    #[test]
    fn acs_jet_matches_finite_differences(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let acs = gen::acs(&mut r, 4, 2);
        let pt = gen::point(&mut r, 4);
        let jet = prolong_acs(&acs, &pt).unwrap();
        let err = fd::acs_jet_error(acs.matrix(), &jet, &pt);
        prop_assert!(err <= FD_TOL, "relative error {err}");
    }

    #[test]
    fn gauge_jets_compose_like_products(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g1 = gen::gauge(&mut r, 2, 2, 2);
        let g2 = gen::gauge(&mut r, 2, 2, 2);
        let pt = gen::point(&mut r, 2);
        let lhs = prolong_gauge(&g1.compose(&g2).unwrap(), &pt).unwrap();
        let rhs = prolong_gauge(&g1, &pt).unwrap().compose(&prolong_gauge(&g2, &pt).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn diffeo_jets_compose_like_maps(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let pt = gen::point(&mut r, 3);
        let phi = gen::triangular_diffeo(&mut r, &pt, 2);
        let psi = gen::triangular_diffeo(&mut r, &pt, 2);
        let lhs = prolong_diffeo(&phi.compose(&psi).unwrap(), &pt).unwrap();
        let rhs = prolong_diffeo(&phi, &pt).unwrap().compose(&prolong_diffeo(&psi, &pt).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jet_inverses(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let h = gen::jet2_vert_aut(&mut r, 3, 2);
        prop_assert_eq!(h.compose(&h.inverse().unwrap()).unwrap(), Jet2VertAut::identity(3, 2));
        let d = gen::jet2_diffeo(&mut r, 3);
        prop_assert_eq!(d.compose(&d.inverse().unwrap()).unwrap(), Jet2Diffeo::identity(3));
        prop_assert_eq!(d.inverse().unwrap().compose(&d).unwrap(), Jet2Diffeo::identity(3));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gauge_square_commutes(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let (m, n) = (3, 2);
        let conn = gen::connection(&mut r, m, n, 2);
        let g = gen::gauge(&mut r, n, m, 1);
        let pt = gen::point(&mut r, m);
        let lhs = prolong_connection(&gauge_transform(&conn, &g).unwrap(), &pt).unwrap();
        let rhs = act_on_connection_jet_general(&prolong_gauge(&g, &pt).unwrap(), &prolong_connection(&conn, &pt).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pullback_square_commutes(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let acs = gen::acs(&mut r, 4, 1);
        let pt = gen::point(&mut r, 4);
        let phi = gen::triangular_diffeo(&mut r, &pt, 2);
        let lhs = prolong_acs(&pullback_acs(&acs, &phi).unwrap(), &pt).unwrap();
        let rhs = act_on_acs_jet_general(&prolong_diffeo(&phi, &pt).unwrap(), &prolong_acs(&acs, &pt).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
