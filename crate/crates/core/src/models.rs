//! Set-valued C∞-ring models (ℝ, ℝᵏ, jet algebras), the solution functor
//! `φ_R`, locality and epimorphic-family checks, and the left-exactness
//! suite.
//!
//! A carrier value is a vector of reals: one coordinate for ℝ, `k` for
//! ℝᵏ, and the Taylor coefficients in [`JetLayout`] order for a jet
//! algebra.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::eval;
use crate::generate::random_term;
use crate::jet::{eval_jets, Jet, JetLayout};
use crate::ring::{coequalizer, coproduct, Morphism, Presentation};
use crate::sampling::{find_common_zero, uniform_point, DEDUP_RADIUS};
use crate::scalar::Real;
use crate::site::{spec_sample, Cover};
use crate::term::{Primitive, SmoothTerm};
use crate::verdict::{Config, Verdict};

/// Tolerance for relation residuals of enumerated solutions.
pub const MEMBERSHIP_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ModelRing {
    Reals,
    ProductOfReals(usize),
    JetAlgebra { vars: usize, order: usize },
}

impl fmt::Display for ModelRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelRing::Reals => write!(f, "(model reals)"),
            ModelRing::ProductOfReals(k) => write!(f, "(model prod {k})"),
            ModelRing::JetAlgebra { vars, order } => write!(f, "(model jet :vars {vars} :order {order})"),
        }
    }
}

impl ModelRing {
    /// Coordinates of one carrier value.
    pub fn dim(&self) -> usize {
        match self {
            ModelRing::Reals => 1,
            ModelRing::ProductOfReals(k) => *k,
            ModelRing::JetAlgebra { vars, order } => JetLayout::new(*vars, *order).dim(),
        }
    }

    pub fn layout(&self) -> Option<Arc<JetLayout>> {
        match self {
            ModelRing::JetAlgebra { vars, order } => Some(JetLayout::new(*vars, *order)),
            _ => None,
        }
    }

    /// The constant `c` as a carrier value.
    pub fn constant<S: Real>(&self, c: S) -> Vec<S> {
        match self {
            ModelRing::JetAlgebra { .. } => {
                let mut v = vec![S::zero(); self.dim()];
                v[0] = c;
                v
            }
            _ => vec![c; self.dim()],
        }
    }

    fn check_shape<S>(&self, args: &[Vec<S>]) -> Result<()> {
        let d = self.dim();
        match args.iter().find(|a| a.len() != d) {
            Some(a) => Err(Error::CarrierShape { expected: d, given: a.len() }),
            None => Ok(()),
        }
    }

    /// `t^{(R)}` applied to carrier values.
    pub fn apply<S: Real>(&self, t: &SmoothTerm, args: &[Vec<S>]) -> Result<Vec<S>> {
        if t.arity() > args.len() {
            return Err(Error::ArityMismatch { needed: t.arity(), given: args.len() });
        }
        self.check_shape(args)?;
        match self {
            ModelRing::Reals | ModelRing::ProductOfReals(_) => (0..self.dim())
                .map(|j| {
                    let point: Vec<S> = args.iter().map(|a| a[j]).collect();
                    eval(t, &point)
                })
                .collect(),
            ModelRing::JetAlgebra { .. } => {
                let layout = self.layout().expect("jet layout");
                let jets = args.iter().map(|a| Jet::from_coeffs(&layout, a.clone())).collect::<Result<Vec<_>>>()?;
                Ok(eval_jets(t, &jets, &layout)?.into_coeffs())
            }
        }
    }

    /// `t^{(R)}` as a closure.
    pub fn interpret<'a>(&'a self, t: &'a SmoothTerm) -> impl Fn(&[Vec<f64>]) -> Result<Vec<f64>> + 'a {
        move |args| self.apply(t, args)
    }

    /// Closed-form invertibility.
    pub fn is_unit<S: Real>(&self, x: &[S]) -> bool {
        match self {
            ModelRing::JetAlgebra { .. } => x[0] != S::zero(),
            _ => x.iter().all(|c| *c != S::zero()),
        }
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        uniform_point(rng, self.dim())
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

/// Outcome of the C∞-structure axiom checks on one model.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub model: ModelRing,
    pub samples: usize,
    pub discarded: usize,
    pub projection_exact: bool,
    pub composition_max_gap: f64,
    #[serde(skip)]
    pub verdict: Verdict,
}

/// Projection axiom (exact) and composition axiom (relative `cfg.tol`) on
/// `samples` random instances of `f ∘ (g₁…g_n)` at random carrier values.
pub fn check_axioms(model: &ModelRing, samples: usize, cfg: &Config) -> AxiomReport {
    let mut rng = cfg.rng(&format!("axioms:{model}"));
    let prims = Primitive::ALL;
    let mut projection_exact = true;
    let mut worst = 0.0f64;
    let mut used = 0;
    let mut discarded = 0;
    let mut witness = None;
    for _ in 0..samples {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(1..=3);
        let f = random_term(&mut rng, n, 3, &prims);
        let g: Vec<SmoothTerm> = (0..n).map(|_| random_term(&mut rng, m, 2, &prims)).collect();
        let args: Vec<Vec<f64>> = (0..m).map(|_| model.random_element(&mut rng)).collect();
        for (i, a) in args.iter().enumerate() {
            if model.apply(&SmoothTerm::Var(i), &args).ok().as_ref() != Some(a) {
                projection_exact = false;
            }
        }
        let composite = f.substitute(&g).expect("arity");
        let inner: Result<Vec<Vec<f64>>> = g.iter().map(|gi| model.apply(gi, &args)).collect();
        let (Ok(lhs), Ok(inner)) = (model.apply(&composite, &args), inner) else {
            discarded += 1;
            continue;
        };
        let Ok(rhs) = model.apply(&f, &inner) else {
            discarded += 1;
            continue;
        };
        let gap = max_gap(&lhs, &rhs);
        if gap > worst {
            worst = gap;
            if gap > cfg.tol {
                witness = Some(args.concat());
            }
        }
        used += 1;
    }
    let verdict = match (projection_exact, witness) {
        (_, Some(w)) => Verdict::refuted(w, worst),
        (false, None) => Verdict::refuted(vec![], 1.0),
        (true, None) => Verdict::supported(used, worst),
    };
    AxiomReport { model: *model, samples: used, discarded, projection_exact, composition_max_gap: worst, verdict }
}

/// `φ_R(A) = {x ∈ Rⁿ | fᵢ^{(R)}(x) = 0}`: the membership predicate plus an
/// enumeration when one is available.
#[derive(Clone, Debug)]
pub struct PhiObject {
    pub model: ModelRing,
    pub presentation: Presentation,
    /// Each solution is a list of `n` carrier values.
    pub solutions: Option<Vec<Vec<Vec<f64>>>>,
    /// The enumeration is believed exhaustive.
    pub complete: bool,
}

impl PhiObject {
    pub fn contains(&self, x: &[Vec<f64>]) -> Result<bool> {
        if x.len() != self.presentation.arity() {
            return Err(Error::ArityMismatch { needed: self.presentation.arity(), given: x.len() });
        }
        Ok(relation_residual(&self.model, &self.presentation, x)? <= MEMBERSHIP_TOL)
    }

    pub fn len(&self) -> Option<usize> {
        self.solutions.as_ref().map(Vec::len)
    }

    pub fn is_empty(&self) -> Option<bool> {
        self.len().map(|n| n == 0)
    }
}

fn relation_residual(model: &ModelRing, ring: &Presentation, x: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for r in ring.relations() {
        for c in model.apply(r, x)? {
            worst = worst.max(c.abs());
        }
    }
    Ok(worst)
}

pub fn phi_object(model: &ModelRing, ring: &Presentation, cfg: &Config) -> PhiObject {
    let e = ring.solutions(cfg);
    let n = ring.arity();
    let mut out = PhiObject { model: *model, presentation: ring.clone(), solutions: None, complete: false };
    if !e.isolated {
        return out;
    }
    let solutions = match model {
        ModelRing::Reals => e.roots.iter().map(|p| p.iter().map(|&x| vec![x]).collect()).collect(),
        ModelRing::JetAlgebra { .. } => {
            e.roots.iter().map(|p| p.iter().map(|&x| model.constant(x)).collect()).collect()
        }
        ModelRing::ProductOfReals(k) => {
            let r = e.roots.len();
            let total = r.checked_pow(*k as u32).filter(|t| *t <= cfg.budget);
            let Some(total) = total else {
                return out;
            };
            (0..total)
                .map(|mut code| {
                    let mut choice = vec![0; *k];
                    for j in (0..*k).rev() {
                        choice[j] = code % r;
                        code /= r;
                    }
                    (0..n).map(|i| choice.iter().map(|&c| e.roots[c][i]).collect()).collect()
                })
                .collect()
        }
    };
    out.solutions = Some(solutions);
    out.complete = e.complete;
    out
}

/// `φ_R(Φ): φ_R(B) → φ_R(A)` at one solution `y` of `B`.
pub fn phi_morphism(model: &ModelRing, phi: &Morphism, y: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if y.len() != phi.target().arity() {
        return Err(Error::ArityMismatch { needed: phi.target().arity(), given: y.len() });
    }
    let x = phi.components().iter().map(|c| model.apply(c, y)).collect::<Result<Vec<_>>>()?;
    let residual = relation_residual(model, phi.source(), &x)?;
    if residual > MEMBERSHIP_TOL {
        return Err(Error::RelationViolation { residual });
    }
    Ok(x)
}

/// Locality: for every `a`, `a` or `1 − a` is invertible.
pub fn is_local(model: &ModelRing, samples: usize, cfg: &Config) -> Verdict {
    if let ModelRing::ProductOfReals(k) = model {
        if *k >= 2 {
            let mut w = vec![0.0; *k];
            w[0] = 1.0;
            return Verdict::refuted(w, 1.0);
        }
    }
    let mut rng = cfg.rng(&format!("local:{model}"));
    let one = model.constant(1.0);
    for _ in 0..samples {
        let mut a = model.random_element(&mut rng);
        if rng.random_bool(0.25) {
            a[0] = if rng.random_bool(0.5) { 0.0 } else { 1.0 };
        }
        let b: Vec<f64> = one.iter().zip(&a).map(|(o, x)| o - x).collect();
        if !model.is_unit(&a) && !model.is_unit(&b) {
            return Verdict::refuted(a, 1.0);
        }
    }
    Verdict::Proven
}

/// Every sampled point of `φ_R(A)` lies in the image of some
/// `φ_R(A{aᵢ⁻¹})`, i.e. some `aᵢ` is invertible there.
pub fn epi_family_check(model: &ModelRing, cover: &Cover, cfg: &Config) -> Result<Verdict> {
    epi_family_check_elements(model, cover.base(), cover.elements(), cfg)
}

/// [`epi_family_check`] for a family that need not be an accepted cover.
pub fn epi_family_check_elements(
    model: &ModelRing,
    base: &Presentation,
    elements: &[SmoothTerm],
    cfg: &Config,
) -> Result<Verdict> {
    if elements.is_empty() {
        return Err(Error::EmptyCover);
    }
    let real = spec_sample(base, elements, cfg)?.verdict;
    let ModelRing::ProductOfReals(k) = model else {
        return Ok(real);
    };
    if real.is_refuted() {
        let w = real.witness().expect("refuted").to_vec();
        return Ok(Verdict::refuted(spread(&[w], *k), 0.0));
    }
    let mut zeros: Vec<Vec<f64>> = Vec::new();
    for (i, a) in elements.iter().enumerate() {
        let mut eqs = base.relations().to_vec();
        eqs.push(a.clone());
        if let Some(p) = find_common_zero(&eqs, base.arity(), cfg, &format!("epi:{i}:{a}")) {
            zeros.push(p);
        }
    }
    let kills = |p: &Vec<f64>| -> Vec<bool> {
        elements.iter().map(|a| eval(a, p).map(|v| v.abs() <= cfg.tol).unwrap_or(false)).collect()
    };
    let n = elements.len();
    let mut uncovered: Vec<bool> = vec![true; n];
    let mut chosen: Vec<Vec<f64>> = Vec::new();
    while uncovered.iter().any(|&u| u) && chosen.len() < *k {
        let best = zeros
            .iter()
            .map(|p| (kills(p).iter().zip(&uncovered).filter(|(z, u)| **z && **u).count(), p))
            .max_by_key(|(c, _)| *c);
        match best {
            Some((c, p)) if c > 0 => {
                for (u, z) in uncovered.iter_mut().zip(kills(p)) {
                    *u = *u && !z;
                }
                chosen.push(p.clone());
            }
            _ => break,
        }
    }
    if !uncovered.iter().any(|&u| u) {
        return Ok(Verdict::refuted(spread(&chosen, *k), 0.0));
    }
    Ok(real)
}

/// Carrier tuple whose `j`-th coordinate is taken from `points[j]`
/// (repeating the last), flattened variable by variable.
fn spread(points: &[Vec<f64>], k: usize) -> Vec<f64> {
    let last = points.len() - 1;
    (0..points[0].len()).flat_map(|i| (0..k).map(move |j| points[j.min(last)][i])).collect()
}

fn same_set(a: &[Vec<Vec<f64>>], b: &[Vec<Vec<f64>>]) -> bool {
    let close = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| {
        x.iter().flatten().zip(y.iter().flatten()).all(|(p, q)| (p - q).abs() < DEDUP_RADIUS)
    };
    a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| close(x, y))) && b.iter().all(|y| a.iter().any(|x| close(x, y)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LexCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LexReport {
    pub model: ModelRing,
    pub checks: Vec<LexCheck>,
}

impl LexReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LexCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: String, passed: bool, detail: String) {
        self.checks.push(LexCheck { name, passed, detail });
    }
}

fn one_var(rel: SmoothTerm) -> Presentation {
    Presentation::new(1, vec![rel]).expect("arity 1")
}

fn product_corpus() -> Vec<(&'static str, Presentation)> {
    let x = SmoothTerm::var(0);
    vec![
        ("x²−1", one_var(x.pow(2) - SmoothTerm::one())),
        ("x²−4", one_var(x.pow(2) - SmoothTerm::int(4))),
        ("x³+x²−2x", one_var(x.pow(3) + x.pow(2) - SmoothTerm::int(2) * x.clone())),
        ("x−2", one_var(x.clone() - SmoothTerm::int(2))),
        ("x²+1", one_var(x.pow(2) + SmoothTerm::one())),
    ]
}

/// Parallel pairs `s, s′: A → B` whose coequalizers are transported to
/// equalizers of solution sets.
pub fn coequalizer_corpus() -> Vec<(String, Morphism, Morphism)> {
    let x = SmoothTerm::var(0);
    let c = |v: i64| SmoothTerm::int(v);
    let line = Presentation::free(1);
    let four = one_var((x.pow(2) - c(1)) * (x.pow(2) - c(4)));
    let pairs: Vec<(&str, SmoothTerm, SmoothTerm)> = vec![
        ("x = 1", x.clone(), c(1)),
        ("x² = 1", x.pow(2), c(1)),
        ("x² = 4", x.pow(2), c(4)),
        ("x² = x + 2", x.pow(2), x.clone() + c(2)),
        ("exp x = exp 1", SmoothTerm::exp(x.clone()), SmoothTerm::exp(c(1))),
        ("x³ = x", x.pow(3), x.clone()),
        ("recip1psq x = 1/5", SmoothTerm::recip1psq(x.clone()), SmoothTerm::recip1psq(c(2))),
        ("x = x", x.clone(), x.clone()),
        ("x = 0", x.clone(), c(0)),
        ("atan x = atan 1", SmoothTerm::atan(x.clone()), SmoothTerm::atan(c(1))),
        ("tanh x = −tanh 2", SmoothTerm::tanh(x.clone()), -SmoothTerm::tanh(c(2))),
    ];
    let mut out: Vec<(String, Morphism, Morphism)> = pairs
        .into_iter()
        .map(|(name, s, s2)| {
            (
                format!("coequalizer {name} over (x²−1)(x²−4)"),
                Morphism::new(&line, &four, vec![s], vec![]).expect("valid"),
                Morphism::new(&line, &four, vec![s2], vec![]).expect("valid"),
            )
        })
        .collect();
    let plane = Presentation::free(2);
    let square = Presentation::new(2, vec![x.pow(2) - c(1), SmoothTerm::var(1).pow(2) - c(1)]).expect("arity 2");
    out.push((
        "coequalizer swap over {±1}²".to_string(),
        Morphism::new(&plane, &square, vec![x.clone(), SmoothTerm::var(1)], vec![]).expect("valid"),
        Morphism::new(&plane, &square, vec![SmoothTerm::var(1), x], vec![]).expect("valid"),
    ));
    out
}

/// Terminal object, binary products and coequalizer-to-equalizer transport
/// on a fixed corpus.
pub fn left_exactness_suite(model: &ModelRing, cfg: &Config) -> LexReport {
    let mut report = LexReport { model: *model, checks: Vec::new() };

    let terminal = phi_object(model, &Presentation::free(0), cfg);
    report.push("terminal".into(), terminal.len() == Some(1), format!("|φ(C∞(ℝ⁰))| = {:?}", terminal.len()));

    let line = phi_object(model, &Presentation::free(1), cfg);
    let mut rng = cfg.rng("lex:ev");
    let carrier_ok = (0..8).all(|_| line.contains(&[model.random_element(&mut rng)]).unwrap_or(false));
    report.push("ev shadow".into(), carrier_ok, "φ(C∞(ℝ)) contains sampled carrier values".into());

    let corpus = product_corpus();
    for (i, (na, a)) in corpus.iter().enumerate() {
        for (nb, b) in &corpus[i..] {
            let pa = phi_object(model, a, cfg);
            let pb = phi_object(model, b, cfg);
            let pab = phi_object(model, &coproduct(a, b).object, cfg);
            let name = format!("product {na} ⊗ {nb}");
            let (Some(sa), Some(sb), Some(sab)) = (&pa.solutions, &pb.solutions, &pab.solutions) else {
                report.push(name, false, "enumeration unavailable".into());
                continue;
            };
            let pairs: Vec<Vec<Vec<f64>>> =
                sa.iter().flat_map(|p| sb.iter().map(move |q| p.iter().chain(q).cloned().collect())).collect();
            let passed = same_set(&pairs, sab);
            report.push(name, passed, format!("{} × {} = {}", sa.len(), sb.len(), sab.len()));
        }
    }

    for (name, s, s2) in coequalizer_corpus() {
        let b = s.target().clone();
        let pb = phi_object(model, &b, cfg);
        let Some(sb) = &pb.solutions else {
            report.push(name, false, "enumeration of the target unavailable".into());
            continue;
        };
        let agree = |y: &Vec<Vec<f64>>| -> bool {
            s.components().iter().zip(s2.components()).all(|(u, v)| {
                match (model.apply(u, y), model.apply(v, y)) {
                    (Ok(a), Ok(b)) => max_gap(&a, &b) <= MEMBERSHIP_TOL,
                    _ => false,
                }
            })
        };
        let equalizer: Vec<Vec<Vec<f64>>> = sb.iter().filter(|y| agree(y)).cloned().collect();
        let coeq = phi_object(model, &coequalizer(&s, &s2).expect("parallel").object, cfg);
        let diff: Vec<SmoothTerm> = s.components().iter().zip(s2.components()).map(|(u, v)| u - v).collect();
        let zero = vec![SmoothTerm::zero(); diff.len()];
        let d = Morphism::new(s.source(), &b, diff, vec![]).expect("valid");
        let z = Morphism::new(s.source(), &b, zero, vec![]).expect("valid");
        let shifted = phi_object(model, &coequalizer(&d, &z).expect("parallel").object, cfg);
        let passed = match (&coeq.solutions, &shifted.solutions) {
            (Some(c1), Some(c2)) => same_set(&equalizer, c1) && same_set(c1, c2),
            _ => false,
        };
        report.push(
            name,
            passed,
            format!("|eq| = {}, |φ(coeq)| = {:?}, |φ(coeq(s−s′,0))| = {:?}", equalizer.len(), coeq.len(), shifted.len()),
        );
    }
    report
}
