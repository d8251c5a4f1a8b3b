//! Property tests for the exact series algebra.

use num_complex::Complex;
use proptest::prelude::*;
use samrot_core::series::{Bindings, GaussianRational, Monomial, Series};

fn coeff_strategy() -> impl Strategy<Value = GaussianRational> {
    ((-9i64..=9), (1i64..=9), (-9i64..=9), (1i64..=9)).prop_map(|(pr, qr, pi, qi)| {
        let re = GaussianRational::ratio(pr, qr);
        let im = GaussianRational::ratio_i(pi, qi);
        &re + &im
    })
}

fn monomial_strategy() -> impl Strategy<Value = Monomial> {
    (0i16..=2, 0i16..=2, -1i16..=1, -1i16..=1, 0i16..=1, 0i16..=2, -1i16..=1).prop_map(
        |(u, cap_u, v, c, alpha, beta, sqrtgamma)| Monomial {
            u,
            U: cap_u,
            V: v,
            C: c,
            alpha,
            beta,
            sqrtgamma,
        },
    )
}

fn series_strategy() -> impl Strategy<Value = Series> {
    proptest::collection::vec((coeff_strategy(), monomial_strategy()), 0..4)
        .prop_map(Series::from_terms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_antisymmetry(f in series_strategy(), g in series_strategy()) {
        let fg = f.poisson(&g);
        let gf = g.poisson(&f);
        prop_assert!(fg.add(&gf).is_zero());
    }

    #[test]
    fn bracket_leibniz(f in series_strategy(), g in series_strategy(), h in series_strategy()) {
        let lhs = f.mul(&g).poisson(&h);
        let rhs = f.mul(&g.poisson(&h)).add(&f.poisson(&h).mul(&g));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_jacobi(f in series_strategy(), g in series_strategy(), h in series_strategy()) {
        let a = f.poisson(&g.poisson(&h));
        let b = g.poisson(&h.poisson(&f));
        let c = h.poisson(&f.poisson(&g));
        prop_assert!(a.add(&b).add(&c).is_zero());
    }

    #[test]
    fn ring_axioms(f in series_strategy(), g in series_strategy(), h in series_strategy()) {
        prop_assert_eq!(f.add(&g), g.add(&f));
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.add(&g).add(&h), f.add(&g.add(&h)));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(f in series_strategy(), g in series_strategy()) {
        let b = Bindings::new(
            1.25f64,
            0.6,
            3.0,
            Complex::new(0.11, -0.07),
            Complex::new(0.05, 0.13),
            1.3,
        );
        let lhs = f.mul(&g).evaluate(&b);
        let rhs = f.evaluate(&b) * g.evaluate(&b);
        let scale = lhs.norm().max(rhs.norm()).max(1e-30);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn json_round_trip(f in series_strategy()) {
        let json = serde_json::to_string(&f).unwrap();
        let back: Series = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(f, back);
    }

    #[test]
    fn exact_division_inverts_multiplication(f in series_strategy(), g in series_strategy()) {
        prop_assume!(!g.is_zero());
        let prod = f.mul(&g);
        let q = prod.exact_div(&g);
        prop_assert!(q.is_ok());
        prop_assert_eq!(q.unwrap(), f);
    }
}
