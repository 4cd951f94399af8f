use approx::relative_eq;
use cinf_core::generate::random_term;
use cinf_core::sexpr::parse_term_str;
use cinf_core::vn::{parse_star_term_str, random_star_term, star_normalize};
use cinf_core::{eval, jet_eval, normalize, Config, Primitive, SmoothTerm};
use proptest::prelude::*;
use rand::Rng;

fn term_from_seed(seed: u64, arity: usize, depth: usize) -> SmoothTerm {
    random_term(&mut Config::with_seed(seed).rng("term"), arity, depth, &Primitive::ALL)
}

fn point_from_seed(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = Config::with_seed(seed).rng("point");
    (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
}

fn close(a: f64, b: f64, eps: f64) -> bool {
    relative_eq!(a, b, epsilon = eps, max_relative = eps)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn substitution_is_composition(seed in any::<u64>()) {
        let t = term_from_seed(seed, 3, 4);
        let subs: Vec<SmoothTerm> = (0..3).map(|i| term_from_seed(seed ^ (i + 1), 2, 3)).collect();
        let x = point_from_seed(seed, 2);
        let inner: Result<Vec<f64>, _> = subs.iter().map(|s| eval(s, &x)).collect();
        let (Ok(inner), Ok(composed)) = (inner, t.substitute(&subs)) else {
            return Err(TestCaseError::reject("non-finite"));
        };
        let (Ok(direct), Ok(via)) = (eval(&composed, &x), eval(&t, &inner)) else {
            return Err(TestCaseError::reject("non-finite"));
        };
        prop_assert!(close(direct, via, 1e-12), "{direct} vs {via}");
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let n = normalize(&term_from_seed(seed, 3, 4));
        prop_assert_eq!(normalize(&n), n);
    }

    #[test]
    fn normalize_preserves_values(seed in any::<u64>()) {
        let t = term_from_seed(seed, 3, 4);
        let x = point_from_seed(seed, 3);
        let (Ok(a), Ok(b)) = (eval(&t, &x), eval(&normalize(&t), &x)) else {
            return Err(TestCaseError::reject("non-finite"));
        };
        prop_assert!(close(a, b, 1e-7), "{a} vs {b} for {t}");
    }

    #[test]
    fn term_round_trip(seed in any::<u64>()) {
        let t = term_from_seed(seed, 4, 5);
        prop_assert_eq!(parse_term_str(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn star_term_round_trip(seed in any::<u64>()) {
        let t = random_star_term(&mut Config::with_seed(seed).rng("star"), 3, 4, &Primitive::ALL);
        prop_assert_eq!(parse_star_term_str(&t.to_string()).unwrap(), t);
    }
}

#[test]
fn jet_gradients_match_central_differences() {
    let h = 1e-5;
    let cfg = Config::with_seed(17);
    let mut rng = cfg.rng("jets");
    for p in Primitive::ALL {
        let t = SmoothTerm::prim(p, SmoothTerm::var(0));
        for _ in 0..200 {
            let a: f64 = rng.random_range(-3.0..3.0);
            let d = jet_eval(&t, &[a], 1).unwrap().gradient()[0];
            let fd = (eval(&t, &[a + h]).unwrap() - eval(&t, &[a - h]).unwrap()) / (2.0 * h);
            assert!((d - fd).abs() <= 1e-5 * d.abs().max(1.0), "{p:?} at {a}: {d} vs {fd}");
        }
    }
}

#[test]
fn star_normalize_is_idempotent() {
    let mut rng = Config::with_seed(3).rng("star-terms");
    for _ in 0..1000 {
        let t = random_star_term(&mut rng, 3, 5, &Primitive::ALL);
        let n = star_normalize(&t);
        assert_eq!(star_normalize(&n), n, "{t}");
    }
}
