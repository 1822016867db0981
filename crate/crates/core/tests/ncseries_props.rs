use ncde_core::ncseries::{graded_lex_compare, star_letter_series, Alphabet, AlphaVector, Series, Word};
use ncde_core::funring::{Exponent, FunElem};
use ncde_core::{Complex64, Rational, Ring};
use proptest::prelude::*;

const N: usize = 6;

fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0usize..2, 0..=max_len).prop_map(Word::from_indices)
}

fn series(max_terms: usize) -> impl Strategy<Value = Series<Rational>> {
    prop::collection::vec((word(3), -5i128..=5, 1i128..=3), 0..=max_terms).prop_map(|terms| {
        Series::from_terms(ab(), N, terms.into_iter().map(|(w, n, d)| (w, Rational::new(n, d)))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shuffle_commutative_and_associative(s in series(4), t in series(4), u in series(3)) {
        prop_assert_eq!(s.shuffle_mul(&t).unwrap(), t.shuffle_mul(&s).unwrap());
        let left = s.shuffle_mul(&t).unwrap().shuffle_mul(&u).unwrap();
        let right = s.shuffle_mul(&t.shuffle_mul(&u).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn concat_associative_with_unit(s in series(4), t in series(4), u in series(4)) {
        let one = Series::one(ab(), N);
        prop_assert_eq!(s.concat_mul(&one).unwrap(), s.clone());
        prop_assert_eq!(one.concat_mul(&s).unwrap(), s.clone());
        prop_assert_eq!(one.shuffle_mul(&s).unwrap(), s.clone());
        let left = s.concat_mul(&t).unwrap().concat_mul(&u).unwrap();
        let right = s.concat_mul(&t.concat_mul(&u).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn residual_is_adjoint_to_left_concatenation(s in series(6), x in 0usize..2, w in word(N - 1)) {
        let xw = Series::monomial(ab(), N, w.prepend(x), Rational::from_integer(1)).unwrap();
        let pw = Series::monomial(ab(), N, w, Rational::from_integer(1)).unwrap();
        prop_assert_eq!(s.pairing(&xw).unwrap(), s.left_residual(x).unwrap().pairing(&pw).unwrap());
    }

    #[test]
    fn star_character_identity(a0 in -4i128..=4, a1 in -4i128..=4, b0 in -4i128..=4, b1 in -4i128..=4, n in 1usize..=6) {
        let q = Rational::from_integer;
        // Disjoint supports.
        let sa = star_letter_series(&ab(), &AlphaVector::new().with(0, q(a0)), n).unwrap();
        let sb = star_letter_series(&ab(), &AlphaVector::new().with(1, q(b1)), n).unwrap();
        let sum = star_letter_series(&ab(), &AlphaVector::new().with(0, q(a0)).with(1, q(b1)), n).unwrap();
        prop_assert_eq!(sa.shuffle_mul(&sb).unwrap(), sum);
        // Overlapping supports.
        let va = AlphaVector::new().with(0, q(a0)).with(1, q(a1));
        let vb = AlphaVector::new().with(0, q(b0)).with(1, q(b1));
        let lhs = star_letter_series(&ab(), &va, n).unwrap().shuffle_mul(&star_letter_series(&ab(), &vb, n).unwrap()).unwrap();
        prop_assert_eq!(lhs, star_letter_series(&ab(), &va.add(&vb), n).unwrap());
    }

    #[test]
    fn graded_lex_is_a_total_order(ws in prop::collection::vec(word(4), 1..12)) {
        let a = ab();
        for u in &ws {
            for v in &ws {
                let uv = graded_lex_compare(&a, u, v).unwrap();
                prop_assert_eq!(uv, graded_lex_compare(&a, v, u).unwrap().reverse());
                prop_assert_eq!(uv == core::cmp::Ordering::Equal, u == v);
                for w in &ws {
                    if uv.is_le() && graded_lex_compare(&a, v, w).unwrap().is_le() {
                        prop_assert!(graded_lex_compare(&a, u, w).unwrap().is_le());
                    }
                }
            }
        }
        let minima: Vec<&Word> = ws.iter().filter(|u| ws.iter().all(|v| graded_lex_compare(&a, u, v).unwrap().is_le())).collect();
        prop_assert!(!minima.is_empty());
        prop_assert!(minima.iter().all(|m| *m == minima[0]));
    }

    #[test]
    fn derivation_is_leibniz_on_series(
        s in prop::collection::vec((word(2), -3i64..=3, -2i64..=2), 1..4),
        t in prop::collection::vec((word(2), -3i64..=3, -2i64..=2), 1..4),
    ) {
        let build = |terms: Vec<(Word, i64, i64)>| {
            Series::from_terms(ab(), 4, terms.into_iter().map(|(w, c, a)| {
                (w, FunElem::monomial(Complex64::new(c as f64, 0.0), Exponent::int(a), Exponent::int(1)))
            })).unwrap()
        };
        let (s, t) = (build(s), build(t));
        let lhs = s.concat_mul(&t).unwrap().coefficientwise_derivation().unwrap();
        let ds = s.coefficientwise_derivation().unwrap();
        let dt = t.coefficientwise_derivation().unwrap();
        let rhs = ds.concat_mul(&t).unwrap().add(&s.concat_mul(&dt).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().terms().all(|(_, c)| c.is_negligible()));
    }
}
