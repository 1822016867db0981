use ncde_core::funring::{apply_monodromy, approx_eq, Exponent, FunElem, FunKey, MonodromyOp};
use ncde_core::{Complex64 as C, Rational, Ring};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = Exponent> {
    (-6i128..=6).prop_map(|n| Exponent::rational(Rational::new(n, 2)))
}

fn key(max_log: u32) -> impl Strategy<Value = FunKey> {
    (exponent(), exponent(), 0..=max_log, 0..=max_log).prop_map(|(a, b, p, q)| FunKey::new(a, b, p, q))
}

fn elem(max_log: u32) -> impl Strategy<Value = FunElem> {
    prop::collection::vec((key(max_log), -4i32..=4, -4i32..=4), 1..4)
        .prop_map(|terms| FunElem::from_terms(terms.into_iter().map(|(k, re, im)| (k, C::new(re as f64, im as f64)))))
}

fn same(f: &FunElem, g: &FunElem) -> bool {
    approx_eq(f, g, 1e-12 * (1.0 + f.max_abs_coeff().max(g.max_abs_coeff())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn commutative_ring_with_leibniz(f in elem(2), g in elem(2), h in elem(1)) {
        prop_assert!(same(&f.mul(&g), &g.mul(&f)));
        prop_assert!(same(&f.mul(&g).mul(&h), &f.mul(&g.mul(&h))));
        prop_assert!(same(&f.mul(&g.add(&h)), &f.mul(&g).add(&f.mul(&h))));
        prop_assert!(same(&f.mul(&FunElem::one()), &f));
        prop_assert!(same(&f.mul(&g).derive(), &f.derive().mul(&g).add(&f.mul(&g.derive()))));
    }

    #[test]
    fn monodromy_commutes_with_derivation(f in elem(2), n in -3i64..=3) {
        for op in [MonodromyOp::D0, MonodromyOp::D1] {
            prop_assert!(same(&apply_monodromy(op, n, &f).derive(), &apply_monodromy(op, n, &f.derive())));
        }
    }

    #[test]
    fn monoid_algebra_has_no_zero_divisors(f in elem(0), g in elem(0)) {
        prop_assume!(!f.is_empty() && !g.is_empty());
        prop_assert!(!f.mul(&g).is_empty());
    }

    #[test]
    fn derivative_matches_finite_difference(f in elem(2), re in 0.15f64..0.85, im in 0.05f64..0.4) {
        let z = C::new(re, im);
        let h = 1e-5;
        let fd = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
        let exact = f.derive().eval(z).unwrap();
        let scale = exact.norm().max(f.eval(z).unwrap().norm()).max(1.0);
        prop_assert!((fd - exact).norm() <= 1e-6 * scale, "fd {fd} exact {exact}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn numeric_loop_matches_operator(k in key(1), n in -2i64..=2, re in 0.3f64..0.7) {
        let f = FunElem::term(C::new(1.0, 0.0), k);
        for op in [MonodromyOp::D0, MonodromyOp::D1] {
            let z = C::new(re, 0.1);
            let numeric = op.continue_numerically(&f, n, z, 64).unwrap();
            let symbolic = apply_monodromy(op, n, &f).eval(z).unwrap();
            prop_assert!((numeric - symbolic).norm() <= 1e-8 * symbolic.norm().max(1.0));
        }
    }
}
