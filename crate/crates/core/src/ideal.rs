//! Ideal-membership certificates and their bounded search.
//!
//! A certificate for `t ∈ ⟨g₁, …, g_k⟩` is a multiplier list `h` with
//! `t = Σ hₗ·gₗ` as an identity of terms. The search fixes a template
//! family (products of generators and primitive atoms up to a degree
//! bound) and solves for rational coefficients exactly, so any
//! certificate it returns normalizes to a syntactic identity.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::eval;
use crate::linsolve::{self, SparseRow};
use crate::normalize::to_poly;
use crate::poly::{rebuild, Monomial, Poly};
use crate::sampling::uniform_point;
use crate::term::SmoothTerm;
use crate::verdict::{Config, Verdict};

/// Upper bound on unknown coefficients in one search round.
pub const MAX_UNKNOWNS: usize = 1500;

/// Multipliers `h₁…h_t` witnessing `target = Σ hₗ·gₗ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealCertificate {
    #[serde(serialize_with = "crate::serialize_terms")]
    pub multipliers: Vec<SmoothTerm>,
}

impl IdealCertificate {
    pub fn new(multipliers: Vec<SmoothTerm>) -> Self {
        IdealCertificate { multipliers }
    }

    /// Certificate `eᵢ` for the generator at `index` itself.
    pub fn unit(len: usize, index: usize) -> Self {
        let multipliers =
            (0..len).map(|j| if j == index { SmoothTerm::one() } else { SmoothTerm::zero() }).collect();
        IdealCertificate { multipliers }
    }

    pub fn zeros(len: usize) -> Self {
        IdealCertificate { multipliers: vec![SmoothTerm::zero(); len] }
    }

    pub fn len(&self) -> usize {
        self.multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multipliers.is_empty()
    }

    /// `Σ hₗ·gₗ`.
    pub fn combination(&self, generators: &[SmoothTerm]) -> SmoothTerm {
        SmoothTerm::sum(
            self.multipliers
                .iter()
                .zip(generators)
                .filter(|(h, _)| !crate::normalize::is_const_zero(h))
                .map(|(h, g)| h * g),
        )
    }

    /// `target - Σ hₗ·gₗ`.
    pub fn residual(&self, target: &SmoothTerm, generators: &[SmoothTerm]) -> SmoothTerm {
        target - &self.combination(generators)
    }

    /// Checks the claimed identity: `Proven` when the residual normalizes
    /// to zero, otherwise by evaluation at `cfg.samples` points of `[-3,3]ⁿ`.
    pub fn verify(&self, target: &SmoothTerm, generators: &[SmoothTerm], arity: usize, cfg: &Config) -> Result<Verdict> {
        if self.len() != generators.len() {
            return Err(Error::CertificateShape { expected: generators.len(), given: self.len() });
        }
        let residual = self.residual(target, generators);
        if to_poly(&residual).is_zero() {
            return Ok(Verdict::Proven);
        }
        Ok(identity_by_sampling(target, &self.combination(generators), arity, cfg, "certificate"))
    }
}

/// Numerical check that two terms agree as functions on ℝⁿ.
pub fn identity_by_sampling(a: &SmoothTerm, b: &SmoothTerm, arity: usize, cfg: &Config, tag: &str) -> Verdict {
    let mut rng = cfg.rng(&format!("{tag}:{a}:{b}"));
    let mut max_residual = 0.0f64;
    let mut used = 0;
    for _ in 0..cfg.samples {
        let p = uniform_point(&mut rng, arity);
        let (Ok(va), Ok(vb)) = (eval(a, &p), eval(b, &p)) else {
            continue;
        };
        let gap = Config::relative_gap(va, vb);
        if gap > cfg.tol {
            return Verdict::refuted(p, gap);
        }
        max_residual = max_residual.max(gap);
        used += 1;
    }
    Verdict::supported(used, max_residual)
}

/// Products of `factors` (with repetition) of total degree ≤ `degree`,
/// as normalized polynomials, starting with the constant 1.
pub fn template_monomials(factors: &[Poly<SmoothTerm>], degree: u32) -> Vec<Poly<SmoothTerm>> {
    let mut out = vec![Poly::one()];
    let mut frontier: Vec<(usize, Poly<SmoothTerm>)> = vec![(0, Poly::one())];
    for _ in 0..degree {
        let mut next = Vec::new();
        for (start, p) in &frontier {
            for (i, f) in factors.iter().enumerate().skip(*start) {
                let q = p.mul(f);
                out.push(q.clone());
                next.push((i, q));
            }
        }
        frontier = next;
    }
    out
}

/// Default template factors for a ring of the given arity: its generators
/// plus every primitive atom occurring in the supplied terms.
pub fn default_factors(arity: usize, terms: &[&SmoothTerm]) -> Vec<Poly<SmoothTerm>> {
    let mut atoms: Vec<SmoothTerm> = (0..arity).map(SmoothTerm::Var).collect();
    for t in terms {
        for a in to_poly(t).atoms() {
            if matches!(a, SmoothTerm::Prim(..)) && !atoms.contains(&a) {
                atoms.push(a);
            }
        }
    }
    atoms.into_iter().map(Poly::atom).collect()
}

/// Solves `target = Σᵢ (Σ_τ c_{i,τ} τ)·generatorsᵢ` over the template
/// family and returns the multipliers.
pub fn solve_with_templates(
    target: &Poly<SmoothTerm>,
    generators: &[Poly<SmoothTerm>],
    templates: &[Poly<SmoothTerm>],
) -> Option<Vec<Poly<SmoothTerm>>> {
    let ncols = generators.len() * templates.len();
    let mut rows: BTreeMap<Monomial<SmoothTerm>, SparseRow> = BTreeMap::new();
    for (gi, g) in generators.iter().enumerate() {
        for (ti, t) in templates.iter().enumerate() {
            let col = gi * templates.len() + ti;
            for (m, c) in t.mul(g).terms() {
                let entry = rows.entry(m.clone()).or_default().entry(col).or_insert_with(Zero::zero);
                *entry += c;
            }
        }
    }
    for (m, _) in target.terms() {
        rows.entry(m.clone()).or_default();
    }
    let equations = rows.into_iter().map(|(m, row)| (row, target.coeff(&m))).collect();
    let x = linsolve::solve(equations, ncols)?;
    Some(
        generators
            .iter()
            .enumerate()
            .map(|(gi, _)| {
                let mut h = Poly::zero();
                for (ti, t) in templates.iter().enumerate() {
                    let c = &x[gi * templates.len() + ti];
                    if !c.is_zero() {
                        h = h.add(&t.scale(c));
                    }
                }
                h
            })
            .collect(),
    )
}

/// Bounded search for a certificate of `target ∈ ⟨generators⟩`, trying
/// template degrees `0..=max_degree` in turn.
pub fn search_certificate(
    target: &SmoothTerm,
    generators: &[SmoothTerm],
    factors: &[Poly<SmoothTerm>],
    max_degree: u32,
) -> Option<IdealCertificate> {
    if generators.is_empty() {
        return to_poly(target).is_zero().then(|| IdealCertificate::new(vec![]));
    }
    let target_poly = to_poly(target);
    let gens: Vec<Poly<SmoothTerm>> = generators.iter().map(to_poly).collect();
    for degree in 0..=max_degree {
        let templates = template_monomials(factors, degree);
        if templates.len() * gens.len() > MAX_UNKNOWNS {
            break;
        }
        if let Some(h) = solve_with_templates(&target_poly, &gens, &templates) {
            return Some(IdealCertificate::new(h.iter().map(rebuild).collect()));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::SmoothTerm as T;

    #[test]
    fn unit_certificate_is_proven() {
        let rel = T::var(0) * T::var(1) - T::one();
        let cert = IdealCertificate::unit(1, 0);
        let v = cert.verify(&rel, std::slice::from_ref(&rel), 2, &Config::with_seed(0)).unwrap();
        assert_eq!(v, Verdict::Proven);
    }

    #[test]
    fn wrong_certificate_is_refuted() {
        let rel = T::var(0) - T::one();
        let cert = IdealCertificate::new(vec![T::int(2)]);
        let v = cert.verify(&rel, std::slice::from_ref(&rel), 1, &Config::with_seed(0)).unwrap();
        assert!(v.is_refuted());
        assert!(cert.verify(&rel, &[], 1, &Config::with_seed(0)).is_err());
    }

    #[test]
    fn finds_square_inverse_certificate() {
        // a²u² - 1 ∈ ⟨au - 1⟩ with a = x0, u = x1
        let rel = T::var(0) * T::var(1) - T::one();
        let target = T::var(0).pow(2) * T::var(1).pow(2) - T::one();
        let factors = default_factors(2, &[&target, &rel]);
        let cert = search_certificate(&target, std::slice::from_ref(&rel), &factors, 2).unwrap();
        assert!(to_poly(&cert.residual(&target, &[rel])).is_zero());
    }

    #[test]
    fn partition_of_unity_with_primitive_atom() {
        let f = T::recip1psq(T::var(0));
        let gens = [f.clone(), T::one() - f.clone()];
        let factors = default_factors(1, &[&gens[0]]);
        let cert = search_certificate(&T::one(), &gens, &factors, 1).unwrap();
        assert!(to_poly(&cert.residual(&T::one(), &gens)).is_zero());
    }

    #[test]
    fn no_certificate_for_non_unit() {
        let gens = [T::var(0)];
        let factors = default_factors(1, &[]);
        assert!(search_certificate(&T::one(), &gens, &factors, 3).is_none());
    }

    #[test]
    fn template_counts() {
        let factors = default_factors(2, &[]);
        // 1, x, y, x², xy, y²
        assert_eq!(template_monomials(&factors, 2).len(), 6);
    }
}
