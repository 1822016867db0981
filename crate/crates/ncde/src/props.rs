//! Seeded randomized property suite. Each case draws from its own ChaCha
//! stream, so results do not depend on the thread count.

use ncde_core::funring::{approx_eq, Exponent, FunElem, FunKey, MonodromyOp};
use ncde_core::hyperlog::li_eval;
use ncde_core::linalg::CMatrix;
use ncde_core::ncseries::{shuffle_words, Alphabet, Series, Word};
use ncde_core::solver::{magnus_solve, picard_solve, MagnusConfig, MatFun, PicardConfig};
use ncde_core::{Complex64 as C, Rational, Ring};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct PropResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<usize>,
    pub max_defect: f64,
}

type Case = fn(&mut ChaCha8Rng) -> (bool, f64);

const PROPERTIES: &[(&str, Case)] = &[
    ("shuffle-commutative", shuffle_commutative),
    ("shuffle-associative", shuffle_associative),
    ("funring-leibniz", funring_leibniz),
    ("monodromy-commutes-with-derivation", monodromy_derive),
    ("picard-magnus-agreement", picard_magnus),
    ("hyperlog-shuffle-character", hyperlog_character),
];

pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|(n, _)| *n).collect()
}

fn case_rng(seed: u64, property: usize, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((property as u64) << 32) | case as u64);
    rng
}

pub fn run_suite(seed: u64, cases: usize, threads: usize) -> Result<Vec<PropResult>, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(|| {
        PROPERTIES
            .iter()
            .enumerate()
            .map(|(p, (name, f))| {
                let outcomes: Vec<(bool, f64)> =
                    (0..cases).into_par_iter().map(|k| f(&mut case_rng(seed, p, k))).collect();
                PropResult {
                    name,
                    cases,
                    failures: outcomes.iter().filter(|o| !o.0).count(),
                    first_failure: outcomes.iter().position(|o| !o.0),
                    max_defect: outcomes.iter().map(|o| o.1).fold(0.0, f64::max),
                }
            })
            .collect()
    }))
}

fn letters() -> Alphabet {
    Alphabet::new(["x0", "x1"]).expect("two letters")
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::from_indices((0..len).map(|_| rng.gen_range(0..2)))
}

fn random_series(rng: &mut ChaCha8Rng, n: usize) -> Series<Rational> {
    let terms: Vec<_> = (0..rng.gen_range(1..5))
        .map(|_| (random_word(rng, n), Rational::new(rng.gen_range(-5..=5), rng.gen_range(1..=4))))
        .collect();
    Series::from_terms(letters(), n, terms).expect("valid words")
}

fn shuffle_commutative(rng: &mut ChaCha8Rng) -> (bool, f64) {
    let (u, v) = (random_series(rng, 4), random_series(rng, 4));
    let diff = u.shuffle_mul(&v).and_then(|l| v.shuffle_mul(&u).and_then(|r| l.sub(&r)));
    match diff {
        Ok(d) => (d.is_zero(), d.len() as f64),
        Err(_) => (false, f64::INFINITY),
    }
}

fn shuffle_associative(rng: &mut ChaCha8Rng) -> (bool, f64) {
    let (u, v, w) = (random_series(rng, 4), random_series(rng, 4), random_series(rng, 4));
    let diff = (|| {
        let l = u.shuffle_mul(&v)?.shuffle_mul(&w)?;
        let r = u.shuffle_mul(&v.shuffle_mul(&w)?)?;
        l.sub(&r)
    })();
    match diff {
        Ok(d) => (d.is_zero(), d.len() as f64),
        Err(_) => (false, f64::INFINITY),
    }
}

fn random_fun(rng: &mut ChaCha8Rng) -> FunElem {
    let terms: Vec<_> = (0..rng.gen_range(1..4))
        .map(|_| {
            let a = Exponent::rational(Rational::new(rng.gen_range(-4..=4), 2));
            let b = Exponent::rational(Rational::new(rng.gen_range(-4..=4), 3));
            let key = FunKey::new(a, b, rng.gen_range(0..2), rng.gen_range(0..2));
            (key, C::new(rng.gen_range(-3..=3) as f64, rng.gen_range(-3..=3) as f64))
        })
        .collect();
    FunElem::from_terms(terms)
}

fn fun_defect(f: &FunElem, g: &FunElem) -> f64 {
    f.sub(g).max_abs_coeff()
}

fn funring_leibniz(rng: &mut ChaCha8Rng) -> (bool, f64) {
    let (f, g) = (random_fun(rng), random_fun(rng));
    let lhs = f.mul(&g).derive();
    let rhs = f.derive().mul(&g).add(&f.mul(&g.derive()));
    (approx_eq(&lhs, &rhs, 1e-9), fun_defect(&lhs, &rhs))
}

fn monodromy_derive(rng: &mut ChaCha8Rng) -> (bool, f64) {
    let f = random_fun(rng);
    let op = if rng.gen_bool(0.5) { MonodromyOp::D0 } else { MonodromyOp::D1 };
    let n = rng.gen_range(-2..=2);
    let lhs = op.apply(n, &f.derive());
    let rhs = op.apply(n, &f).derive();
    let scale = lhs.max_abs_coeff().max(1.0);
    (approx_eq(&lhs, &rhs, 1e-9 * scale), fun_defect(&lhs, &rhs) / scale)
}

fn random_matrix(rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(3, 3, |_, _| C::new(rng.gen_range(-1.0..1.0), 0.0))
}

fn picard_magnus(rng: &mut ChaCha8Rng) -> (bool, f64) {
    let m = MatFun::const_plus_sin(random_matrix(rng), random_matrix(rng));
    let g0 = CMatrix::identity(3);
    let p = picard_solve(&m, 0.0, &g0, 1.0, &PicardConfig::default());
    let g = magnus_solve(&m, 0.0, &g0, 1.0, &MagnusConfig::default());
    match (p, g) {
        (Ok(p), Ok(g)) => match p.sup_distance(&g) {
            Ok(d) => (d <= 1e-6, d),
            Err(_) => (false, f64::INFINITY),
        },
        _ => (false, f64::INFINITY),
    }
}

fn hyperlog_character(rng: &mut ChaCha8Rng) -> (bool, f64) {
    let u = random_word(rng, 2);
    let v = random_word(rng, 2);
    let r = rng.gen_range(0.05..0.5);
    let theta = rng.gen_range(-3.0..3.0);
    let z = C::from_polar(r, theta);
    let tol = 1e-14;
    let li = |w: &Word| li_eval(w, z, tol).map(|h| h.value);
    let result = (|| {
        let lhs = li(&u)? * li(&v)?;
        let mut rhs = C::new(0.0, 0.0);
        for (w, c) in shuffle_words(&u, &v) {
            rhs += li(&w)? * c as f64;
        }
        Ok::<_, ncde_core::Error>((lhs - rhs).norm())
    })();
    match result {
        Ok(d) => (d <= 1e-10, d),
        Err(_) => (false, f64::INFINITY),
    }
}
