mod common;

use curvlab::fd;
use curvlab::gen;
use curvlab::polyfield::{q, Poly, PolyMatrix};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mixed_partials_commute(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let p = gen::poly(&mut r, 3, 4, 5);
        for a in 0..3 {
            for b in 0..3 {
                prop_assert_eq!(p.partial(a).unwrap().partial(b).unwrap(), p.partial(b).unwrap().partial(a).unwrap());
            }
        }
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let p = gen::poly(&mut r, 3, 3, 4);
        let s = gen::poly(&mut r, 3, 3, 4);
        for mu in 0..3 {
            let lhs = (&p * &s).partial(mu).unwrap();
            let rhs = &(&p.partial(mu).unwrap() * &s) + &(&p * &s.partial(mu).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn partials_match_finite_differences(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let p = gen::poly(&mut r, 3, 3, 5);
        let pt = gen::point(&mut r, 3);
        prop_assert!(fd::poly_partials_error(&p, &pt).unwrap() <= 1e-6);
    }

    #[test]
    fn commutator_is_bilinear_and_satisfies_jacobi(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let a = gen::poly_matrix(&mut r, 2, 2, 2, 2, 2);
        let b = gen::poly_matrix(&mut r, 2, 2, 2, 2, 2);
        let c = gen::poly_matrix(&mut r, 2, 2, 2, 2, 2);
        let k = gen::rational(&mut r);
        let br = |x: &PolyMatrix, y: &PolyMatrix| x.commutator(y).unwrap();
        prop_assert_eq!(br(&(&a + &b.scale(&k)), &c), &br(&a, &c) + &br(&b, &c).scale(&k));
        prop_assert!(br(&a, &a).is_zero());
        let jacobi = &(&br(&a, &br(&b, &c)) + &br(&b, &br(&c, &a))) + &br(&c, &br(&a, &b));
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn unipotent_inverse_is_exact(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let u = gen::upper_unipotent(&mut r, 3, 2, 2);
        let inv = u.unipotent_inverse().unwrap();
        prop_assert!(u.checked_mul(&inv).unwrap().is_identity());
        prop_assert!(inv.checked_mul(&u).unwrap().is_identity());
    }

    #[test]
    fn display_parses_back(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let p = gen::poly(&mut r, 4, 4, 6);
        prop_assert_eq!(Poly::parse(&p.to_string(), 4).unwrap(), p);
    }

    #[test]
    fn evaluation_is_a_ring_map(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let p = gen::poly(&mut r, 2, 3, 4);
        let s = gen::poly(&mut r, 2, 3, 4);
        let pt = gen::point(&mut r, 2);
        prop_assert_eq!((&p * &s).eval(&pt).unwrap(), p.eval(&pt).unwrap() * s.eval(&pt).unwrap());
        prop_assert_eq!((&p + &s).eval(&pt).unwrap(), p.eval(&pt).unwrap() + s.eval(&pt).unwrap());
        prop_assert_eq!(p.eval(&[q(0), q(0)]).unwrap(), p.constant_term());
    }
}
