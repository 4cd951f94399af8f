//! Seeded zero-set search: damped Gauss–Newton (Levenberg–Marquardt) on
//! `½ Σ rᵢ²` with random restarts in `[-3, 3]ⁿ`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::eval::eval_all;
use crate::jet::{eval_jets, Jet, JetLayout};
use crate::term::SmoothTerm;
use crate::verdict::{Config, ZERO_SET_ACCEPT};

/// Half-width of the sampling box.
pub const SAMPLE_BOX: f64 = 3.0;
/// Roots closer than this are identified.
pub const DEDUP_RADIUS: f64 = 1e-6;

const MAX_ITERS: usize = 200;
const MAX_COORD: f64 = 1e8;
const POLISHED: f64 = 1e-14;

pub fn uniform_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-SAMPLE_BOX..SAMPLE_BOX)).collect()
}

/// Residuals and Jacobian of a system at `x`; `None` if anything overflows.
pub fn residuals_and_jacobian(equations: &[SmoothTerm], x: &[f64]) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let n = x.len();
    let layout = JetLayout::new(n, 1);
    let args: Vec<Jet<f64>> = x.iter().enumerate().map(|(i, &b)| Jet::variable(&layout, b, i)).collect();
    let mut r = DVector::zeros(equations.len());
    let mut jac = DMatrix::zeros(equations.len(), n);
    for (row, eq) in equations.iter().enumerate() {
        let jet = eval_jets(eq, &args, &layout).ok()?;
        r[row] = jet.value();
        for (col, g) in jet.gradient().into_iter().enumerate() {
            jac[(row, col)] = g;
        }
    }
    Some((r, jac))
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Residual vector of the system at `x`.
pub fn residuals(equations: &[SmoothTerm], x: &[f64]) -> Option<Vec<f64>> {
    eval_all(equations, x).ok()
}

/// Levenberg–Marquardt from `start`. Returns a point with every residual
/// within [`ZERO_SET_ACCEPT`], or `None`.
pub fn solve_from(equations: &[SmoothTerm], start: Vec<f64>) -> Option<Vec<f64>> {
    let n = start.len();
    let mut x = DVector::from_vec(start);
    let (mut r, mut jac) = residuals_and_jacobian(equations, x.as_slice())?;
    if n == 0 || equations.is_empty() {
        return (max_abs(&r) <= ZERO_SET_ACCEPT).then(|| x.as_slice().to_vec());
    }
    let mut mu = 1e-3;
    for _ in 0..MAX_ITERS {
        if max_abs(&r) <= POLISHED {
            return Some(x.as_slice().to_vec());
        }
        let cost = r.norm_squared();
        let jt = jac.transpose();
        let normal = &jt * &jac;
        let grad = &jt * &r;
        let mut improved = false;
        while mu < 1e12 {
            let damped = &normal + DMatrix::identity(n, n) * mu;
            let Some(step) = damped.lu().solve(&(-&grad)) else {
                mu *= 4.0;
                continue;
            };
            let candidate = &x + &step;
            if candidate.iter().any(|c| !c.is_finite() || c.abs() > MAX_COORD) {
                mu *= 4.0;
                continue;
            }
            match residuals_and_jacobian(equations, candidate.as_slice()) {
                Some((r_new, jac_new)) if r_new.norm_squared() < cost => {
                    let tiny = step.norm() <= 1e-15 * (1.0 + x.norm());
                    x = candidate;
                    r = r_new;
                    jac = jac_new;
                    mu = (mu / 3.0).max(1e-12);
                    improved = !tiny;
                    break;
                }
                _ => mu *= 4.0,
            }
        }
        if !improved {
            break;
        }
    }
    (max_abs(&r) <= ZERO_SET_ACCEPT).then(|| x.as_slice().to_vec())
}

/// Points found on the real zero set of a system.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSample {
    pub points: Vec<Vec<f64>>,
    pub attempts: usize,
}

impl ZeroSample {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Up to `count` zero-set points, from at most `max(4·count, 32)` restarts
/// (capped by the budget).
pub fn sample_zero_set(
    equations: &[SmoothTerm],
    arity: usize,
    cfg: &Config,
    tag: &str,
    count: usize,
) -> ZeroSample {
    let mut rng = cfg.rng(tag);
    let max_attempts = (4 * count).max(32).min(cfg.budget.max(1));
    let mut points = Vec::new();
    let mut attempts = 0;
    while attempts < max_attempts && points.len() < count {
        attempts += 1;
        let start = uniform_point(&mut rng, arity);
        if let Some(p) = solve_from(equations, start) {
            points.push(p);
        }
        if arity == 0 {
            // the search is deterministic: one attempt decides
            if !points.is_empty() {
                points.truncate(1);
            }
            break;
        }
    }
    ZeroSample { points, attempts }
}

/// A single common zero of `equations`, if the search finds one.
pub fn find_common_zero(equations: &[SmoothTerm], arity: usize, cfg: &Config, tag: &str) -> Option<Vec<f64>> {
    sample_zero_set(equations, arity, cfg, tag, 1).points.into_iter().next()
}

/// Result of multi-start root enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct RootEnumeration {
    /// Distinct roots, sorted lexicographically.
    pub roots: Vec<Vec<f64>>,
    /// Every root has a full-rank Jacobian.
    pub isolated: bool,
    /// Roots are isolated and the second half of the restarts found no
    /// new root.
    pub complete: bool,
    pub starts: usize,
}

pub fn enumerate_roots(equations: &[SmoothTerm], arity: usize, cfg: &Config, tag: &str) -> RootEnumeration {
    let starts = if arity == 0 { 1 } else { cfg.budget.clamp(1, 256) };
    let mut rng = cfg.rng(tag);
    let mut roots: Vec<Vec<f64>> = Vec::new();
    let mut last_new = 0;
    for k in 0..starts {
        let start = uniform_point(&mut rng, arity);
        if let Some(p) = solve_from(equations, start) {
            if !roots.iter().any(|q| distance(q, &p) < DEDUP_RADIUS) {
                roots.push(p);
                last_new = k;
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let isolated = roots.iter().all(|p| is_isolated(equations, p));
    let complete = isolated && (starts == 1 || last_new < starts / 2);
    RootEnumeration { roots, isolated, complete, starts }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Full column rank of the Jacobian at `p`.
pub fn is_isolated(equations: &[SmoothTerm], p: &[f64]) -> bool {
    let n = p.len();
    if n == 0 {
        return true;
    }
    if equations.len() < n {
        return false;
    }
    let Some((_, jac)) = residuals_and_jacobian(equations, p) else {
        return false;
    };
    let sv = jac.singular_values();
    let max = sv.iter().fold(0.0f64, |m, s| m.max(*s));
    let min = sv.iter().fold(f64::INFINITY, |m, s| m.min(*s));
    sv.len() == n && min > 1e-7 * max.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::SmoothTerm as T;

    #[test]
    fn finds_roots_of_quadratic() {
        let eqs = [T::var(0) * T::var(0) - T::one()];
        let cfg = Config::with_seed(1);
        let e = enumerate_roots(&eqs, 1, &cfg, "q");
        assert_eq!(e.roots.len(), 2);
        assert!((e.roots[0][0] + 1.0).abs() < 1e-9 && (e.roots[1][0] - 1.0).abs() < 1e-9);
        assert!(e.complete);
    }

    #[test]
    fn no_real_roots() {
        let eqs = [T::var(0) * T::var(0) + T::one()];
        let cfg = Config::with_seed(1);
        assert!(sample_zero_set(&eqs, 1, &cfg, "t", 4).is_empty());
        assert!(enumerate_roots(&eqs, 1, &cfg, "t").roots.is_empty());
    }

    #[test]
    fn samples_a_curve() {
        let eqs = [T::var(0) * T::var(1) - T::one()];
        let cfg = Config::with_seed(3);
        let s = sample_zero_set(&eqs, 2, &cfg, "hyperbola", 10);
        assert_eq!(s.points.len(), 10);
        for p in &s.points {
            assert!((p[0] * p[1] - 1.0).abs() <= ZERO_SET_ACCEPT);
        }
        let e = enumerate_roots(&eqs, 2, &Config { budget: 20, ..cfg }, "hyperbola");
        assert!(!e.isolated && !e.complete);
    }

    #[test]
    fn nullary_systems() {
        let cfg = Config::with_seed(0);
        assert_eq!(sample_zero_set(&[], 0, &cfg, "pt", 5).points, vec![Vec::<f64>::new()]);
        assert!(sample_zero_set(&[T::one()], 0, &cfg, "pt", 5).is_empty());
    }
}
