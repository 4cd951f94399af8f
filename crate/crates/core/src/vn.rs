//! The quasi-inverse extension: terms with a unary `*`, normalization by
//! the σ rewrites `x·x*·x → x` and `x*·x·x* → x*`, and von Neumann
//! regularity on models where `x* = 1/x` (and `0* = 0`) pointwise.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use crate::constant::Constant;
use crate::error::{Error, Result};
use crate::generate::random_constant;
use crate::jet::Jet;
use crate::models::ModelRing;
use crate::poly::{rebuild, Atom, Monomial, Poly, Rebuild};
use crate::scalar::Scalar;
use crate::sexpr::{expect_args, parse_constant, parse_usize, read_one, ParseError, Sexp, TERM_HEADS};
use crate::term::{Primitive, SmoothTerm};
use crate::verdict::{Config, Verdict};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StarTerm {
    Var(usize),
    Const(Constant),
    Add(Arc<StarTerm>, Arc<StarTerm>),
    Mul(Arc<StarTerm>, Arc<StarTerm>),
    Neg(Arc<StarTerm>),
    Prim(Primitive, Arc<StarTerm>),
    Star(Arc<StarTerm>),
}

impl StarTerm {
    pub fn var(i: usize) -> Self {
        StarTerm::Var(i)
    }

    pub fn constant(c: impl Into<Constant>) -> Self {
        StarTerm::Const(c.into())
    }

    pub fn star(a: StarTerm) -> Self {
        StarTerm::Star(Arc::new(a))
    }

    pub fn prim(p: Primitive, a: StarTerm) -> Self {
        StarTerm::Prim(p, Arc::new(a))
    }

    pub fn arity(&self) -> usize {
        match self {
            StarTerm::Var(i) => i + 1,
            StarTerm::Const(_) => 0,
            StarTerm::Add(a, b) | StarTerm::Mul(a, b) => a.arity().max(b.arity()),
            StarTerm::Neg(a) | StarTerm::Prim(_, a) | StarTerm::Star(a) => a.arity(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            StarTerm::Var(_) | StarTerm::Const(_) => 1,
            StarTerm::Add(a, b) | StarTerm::Mul(a, b) => 1 + a.size() + b.size(),
            StarTerm::Neg(a) | StarTerm::Prim(_, a) | StarTerm::Star(a) => 1 + a.size(),
        }
    }

    /// Number of `Star` nodes.
    pub fn star_count(&self) -> usize {
        match self {
            StarTerm::Var(_) | StarTerm::Const(_) => 0,
            StarTerm::Add(a, b) | StarTerm::Mul(a, b) => a.star_count() + b.star_count(),
            StarTerm::Neg(a) | StarTerm::Prim(_, a) => a.star_count(),
            StarTerm::Star(a) => 1 + a.star_count(),
        }
    }
}

impl From<&SmoothTerm> for StarTerm {
    fn from(t: &SmoothTerm) -> Self {
        match t {
            SmoothTerm::Var(i) => StarTerm::Var(*i),
            SmoothTerm::Const(c) => StarTerm::Const(c.clone()),
            SmoothTerm::Add(a, b) => StarTerm::from(&**a) + StarTerm::from(&**b),
            SmoothTerm::Mul(a, b) => StarTerm::from(&**a) * StarTerm::from(&**b),
            SmoothTerm::Neg(a) => -StarTerm::from(&**a),
            SmoothTerm::Prim(p, a) => StarTerm::prim(*p, StarTerm::from(&**a)),
        }
    }
}

impl std::ops::Add for StarTerm {
    type Output = StarTerm;
    fn add(self, rhs: StarTerm) -> StarTerm {
        StarTerm::Add(Arc::new(self), Arc::new(rhs))
    }
}

impl std::ops::Mul for StarTerm {
    type Output = StarTerm;
    fn mul(self, rhs: StarTerm) -> StarTerm {
        StarTerm::Mul(Arc::new(self), Arc::new(rhs))
    }
}

impl std::ops::Neg for StarTerm {
    type Output = StarTerm;
    fn neg(self) -> StarTerm {
        StarTerm::Neg(Arc::new(self))
    }
}

impl fmt::Display for StarTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarTerm::Var(i) => write!(f, "(var {i})"),
            StarTerm::Const(c) => write!(f, "(const {c})"),
            StarTerm::Add(a, b) => write!(f, "(add {a} {b})"),
            StarTerm::Mul(a, b) => write!(f, "(mul {a} {b})"),
            StarTerm::Neg(a) => write!(f, "(neg {a})"),
            StarTerm::Prim(p, a) => write!(f, "({} {a})", p.name()),
            StarTerm::Star(a) => write!(f, "(star {a})"),
        }
    }
}

impl fmt::Debug for StarTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn parse_star_term(sexp: &Sexp) -> std::result::Result<StarTerm, ParseError> {
    let Some(head) = sexp.head() else {
        return Err(ParseError::syntax(sexp.pos(), &["term"], sexp.to_string()));
    };
    match head {
        "var" => Ok(StarTerm::Var(parse_usize(&expect_args(sexp, head, 1)?[0])?)),
        "const" => Ok(StarTerm::Const(parse_constant(&expect_args(sexp, head, 1)?[0])?)),
        "add" | "mul" => {
            let args = expect_args(sexp, head, 2)?;
            let (a, b) = (parse_star_term(&args[0])?, parse_star_term(&args[1])?);
            Ok(if head == "add" { a + b } else { a * b })
        }
        "neg" => Ok(-parse_star_term(&expect_args(sexp, head, 1)?[0])?),
        "star" => Ok(StarTerm::star(parse_star_term(&expect_args(sexp, head, 1)?[0])?)),
        _ => match Primitive::from_name(head) {
            Some(p) => Ok(StarTerm::prim(p, parse_star_term(&expect_args(sexp, head, 1)?[0])?)),
            None => {
                let mut expected: Vec<&str> = TERM_HEADS.to_vec();
                expected.push("star");
                Err(ParseError::syntax(sexp.pos(), &expected, head))
            }
        },
    }
}

pub fn parse_star_term_str(src: &str) -> std::result::Result<StarTerm, ParseError> {
    parse_star_term(&read_one(src)?)
}

impl Atom for StarTerm {
    /// σ on atom pairs `(u, u*)`: `u²·u* → u` and `u·u*² → u*`, repeated to
    /// a fixed point.
    fn reduce_monomial(m: &mut Monomial<StarTerm>) {
        loop {
            let mut changed = false;
            let pairs: Vec<(StarTerm, StarTerm)> = m
                .factors()
                .iter()
                .filter_map(|(a, _)| match a {
                    StarTerm::Star(inner) => Some(((**inner).clone(), a.clone())),
                    _ => None,
                })
                .collect();
            for (u, s) in pairs {
                let (e, b) = (m.exponent(&u), m.exponent(&s));
                let (e2, b2) = sigma(e, b);
                if (e2, b2) != (e, b) {
                    m.set_exponent(&u, e2);
                    m.set_exponent(&s, b2);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }
}

/// Exponents of `u` and `u*` after exhausting the σ rewrites.
fn sigma(mut e: u32, mut b: u32) -> (u32, u32) {
    while (e >= 2 && b >= 1) || (e >= 1 && b >= 2) {
        e -= 1;
        b -= 1;
    }
    (e, b)
}

impl Rebuild for StarTerm {
    type Atom = StarTerm;

    fn from_constant(c: Constant) -> Self {
        StarTerm::Const(c)
    }

    fn from_atom(a: &StarTerm) -> Self {
        a.clone()
    }

    fn make_add(a: Self, b: Self) -> Self {
        a + b
    }

    fn make_mul(a: Self, b: Self) -> Self {
        a * b
    }

    fn make_neg(a: Self) -> Self {
        -a
    }
}

fn flatten_product<'a>(t: &'a StarTerm, out: &mut Vec<&'a StarTerm>) {
    match t {
        StarTerm::Mul(a, b) => {
            flatten_product(a, out);
            flatten_product(b, out);
        }
        _ => out.push(t),
    }
}

/// Polynomial form with σ applied to atoms and to product chains whose
/// factors are sums.
pub fn to_star_poly(t: &StarTerm) -> Poly<StarTerm> {
    match t {
        StarTerm::Var(_) => Poly::atom(t.clone()),
        StarTerm::Const(c) => Poly::constant(c.value().clone()),
        StarTerm::Add(a, b) => to_star_poly(a).add(&to_star_poly(b)),
        StarTerm::Neg(a) => to_star_poly(a).neg(),
        StarTerm::Prim(p, a) => {
            let arg = to_star_poly(a);
            if let Some(c) = arg.as_constant() {
                if let Ok(v) = BigRational::apply_primitive(*p, &c) {
                    return Poly::constant(v);
                }
            }
            Poly::atom(StarTerm::Prim(*p, Arc::new(rebuild(&arg))))
        }
        StarTerm::Star(a) => {
            let arg = to_star_poly(a);
            match arg.as_constant() {
                Some(c) if c.is_zero() => Poly::zero(),
                Some(c) => Poly::constant(c.recip()),
                None => Poly::atom(StarTerm::Star(Arc::new(rebuild(&arg)))),
            }
        }
        StarTerm::Mul(..) => {
            let mut factors = Vec::new();
            flatten_product(t, &mut factors);
            let mut simple = Poly::one();
            let mut sums: BTreeMap<StarTerm, (Poly<StarTerm>, u32)> = BTreeMap::new();
            for f in factors {
                let p = to_star_poly(f);
                if p.is_zero() {
                    return p;
                }
                if p.len() == 1 {
                    simple = simple.mul(&p);
                } else {
                    sums.entry(rebuild(&p)).or_insert((p, 0)).1 += 1;
                }
            }
            if sums.is_empty() {
                return simple;
            }
            let (m, c) = {
                let (m, c) = simple.terms().next().expect("single term");
                (m.clone(), c.clone())
            };
            let mut m = m;
            let mut product = Poly::one();
            for (u, (p, e)) in sums {
                let s = StarTerm::Star(Arc::new(u));
                let (e2, b2) = sigma(e, m.exponent(&s));
                m.set_exponent(&s, b2);
                product = product.mul(&p.pow(e2));
            }
            Poly::monomial(m).scale(&c).mul(&product)
        }
    }
}

pub fn star_normalize(t: &StarTerm) -> StarTerm {
    rebuild(&to_star_poly(t))
}

/// Evaluation with `x* = 1/x` for `x ≠ 0` and `0* = 0`.
pub fn eval_star<S: Scalar>(t: &StarTerm, point: &[S]) -> Result<S> {
    if t.arity() > point.len() {
        return Err(Error::ArityMismatch { needed: t.arity(), given: point.len() });
    }
    let v = eval_star_unchecked(t, point)?;
    if v.is_finite_value() {
        Ok(v)
    } else {
        Err(Error::NonFiniteResult)
    }
}

fn eval_star_unchecked<S: Scalar>(t: &StarTerm, point: &[S]) -> Result<S> {
    Ok(match t {
        StarTerm::Var(i) => point[*i].clone(),
        StarTerm::Const(c) => S::from_constant(c),
        StarTerm::Add(a, b) => eval_star_unchecked(a, point)? + eval_star_unchecked(b, point)?,
        StarTerm::Mul(a, b) => eval_star_unchecked(a, point)? * eval_star_unchecked(b, point)?,
        StarTerm::Neg(a) => -eval_star_unchecked(a, point)?,
        StarTerm::Prim(p, a) => S::apply_primitive(*p, &eval_star_unchecked(a, point)?)?,
        StarTerm::Star(a) => quasi_inverse(&eval_star_unchecked(a, point)?),
    })
}

fn quasi_inverse<S: Scalar>(x: &S) -> S {
    x.checked_recip().unwrap_or_else(S::zero)
}

/// ℝ or ℝᵏ with the pointwise quasi-inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VnModel {
    model: ModelRing,
}

impl VnModel {
    pub fn new(model: ModelRing) -> Result<Self> {
        match model {
            ModelRing::Reals | ModelRing::ProductOfReals(_) => Ok(VnModel { model }),
            ModelRing::JetAlgebra { .. } => Err(Error::UnsupportedModel(model.to_string())),
        }
    }

    pub fn model(&self) -> ModelRing {
        self.model
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn star<S: Scalar>(&self, a: &[S]) -> Vec<S> {
        a.iter().map(quasi_inverse).collect()
    }

    /// Coordinatewise interpretation of a star term.
    pub fn apply<S: Scalar>(&self, t: &StarTerm, args: &[Vec<S>]) -> Result<Vec<S>> {
        let d = self.dim();
        if let Some(a) = args.iter().find(|a| a.len() != d) {
            return Err(Error::CarrierShape { expected: d, given: a.len() });
        }
        (0..d)
            .map(|j| {
                let point: Vec<S> = args.iter().map(|a| a[j].clone()).collect();
                eval_star(t, &point)
            })
            .collect()
    }
}

/// `e = a·a*`: idempotent, with `a = e·a`.
pub fn idempotent_of<S: Scalar>(model: &VnModel, a: &[S]) -> Vec<S> {
    a.iter().zip(model.star(a)).map(|(x, y)| x.clone() * y).collect()
}

fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    if rng.random_bool(0.2) {
        return BigRational::zero();
    }
    let num: i64 = rng.random_range(-40..=40);
    let den: i64 = rng.random_range(1..=9);
    BigRational::new(num.into(), den.into())
}

/// A random rational carrier value with some zero coordinates.
pub fn random_rational_element<R: Rng>(model: &VnModel, rng: &mut R) -> Vec<BigRational> {
    (0..model.dim()).map(|_| random_rational(rng)).collect()
}

fn to_f64(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64_lossy).collect()
}

/// Von Neumann regularity: `a = a²·a*` and `a* = a*²·a` for every `a`.
pub fn vn_check(model: &ModelRing, samples: usize, cfg: &Config) -> Verdict {
    if let ModelRing::JetAlgebra { vars, order } = model {
        if *order == 0 || *vars == 0 {
            return vn_check(&ModelRing::Reals, samples, cfg);
        }
        let layout = model.layout().expect("jet layout");
        let mut alpha = vec![0u32; *vars];
        alpha[0] = *order as u32;
        let mut coeffs = vec![0.0; layout.dim()];
        coeffs[layout.position(&alpha).expect("top monomial")] = 1.0;
        let top = Jet::from_coeffs(&layout, coeffs.clone()).expect("shape");
        // a = x₀^order is nonzero with a² = 0, so a = a²·x has no solution
        if top.mul(&top).coeffs().iter().all(|c| *c == 0.0) {
            return Verdict::refuted(coeffs, 1.0);
        }
    }
    let vm = VnModel::new(*model).expect("field product");
    let mut rng = cfg.rng(&format!("vn:{model}"));
    for _ in 0..samples {
        let a = random_rational_element(&vm, &mut rng);
        let s = vm.star(&a);
        for ((x, y), _) in a.iter().zip(&s).zip(0..) {
            if &(x * x * y) != x || &(y * y * x) != y {
                return Verdict::refuted(to_f64(&a), 1.0);
            }
        }
    }
    Verdict::Proven
}

/// A homomorphism `ℝᵏ → ℝᵐ` that reindexes coordinates:
/// `h(a)_j = a_{indices[j]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateMap {
    pub source_dim: usize,
    pub indices: Vec<usize>,
}

impl CoordinateMap {
    pub fn new(source_dim: usize, indices: Vec<usize>) -> Result<Self> {
        if let Some(&i) = indices.iter().find(|&&i| i >= source_dim) {
            return Err(Error::ArityMismatch { needed: i + 1, given: source_dim });
        }
        Ok(CoordinateMap { source_dim, indices })
    }

    pub fn projection(source_dim: usize, index: usize) -> Result<Self> {
        Self::new(source_dim, vec![index])
    }

    /// `ℝᵏ → (ℝᵏ)ᵐ`, `a ↦ (a, …, a)`.
    pub fn diagonal(source_dim: usize, copies: usize) -> Self {
        CoordinateMap { source_dim, indices: (0..copies).flat_map(|_| 0..source_dim).collect() }
    }

    pub fn permutation(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &i in &perm {
            if i >= perm.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidLiteral(format!("{perm:?} is not a permutation")));
            }
        }
        Self::new(perm.len(), perm)
    }

    pub fn target_dim(&self) -> usize {
        self.indices.len()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &CoordinateMap) -> Result<CoordinateMap> {
        if next.source_dim != self.target_dim() {
            return Err(Error::NotComposable(format!("ℝ^{} then ℝ^{}", self.target_dim(), next.source_dim)));
        }
        Ok(CoordinateMap { source_dim: self.source_dim, indices: next.indices.iter().map(|&j| self.indices[j]).collect() })
    }

    pub fn apply<S: Clone>(&self, a: &[S]) -> Vec<S> {
        self.indices.iter().map(|&i| a[i].clone()).collect()
    }
}

/// `h(a*) = h(a)*`, exact on sampled rational carrier values. Star is
/// computed coordinatewise and `h` only reindexes coordinates, so the law
/// holds for every coordinate map; the samples check the implementation.
pub fn star_hom_check(h: &CoordinateMap, samples: usize, cfg: &Config) -> Verdict {
    let source = VnModel { model: ModelRing::ProductOfReals(h.source_dim) };
    let target = VnModel { model: ModelRing::ProductOfReals(h.target_dim()) };
    let mut rng = cfg.rng(&format!("star-hom:{:?}", h.indices));
    for _ in 0..samples {
        let a = random_rational_element(&source, &mut rng);
        if h.apply(&source.star(&a)) != target.star(&h.apply(&a)) {
            return Verdict::refuted(to_f64(&a), 1.0);
        }
    }
    Verdict::Proven
}

/// A random star term; about one node in six is a σ-redex `u·(u*·u)` or
/// `u*·(u·u*)`.
pub fn random_star_term<R: Rng>(rng: &mut R, arity: usize, depth: usize, prims: &[Primitive]) -> StarTerm {
    let leaf = |rng: &mut R| {
        if arity > 0 && rng.random_bool(0.7) {
            StarTerm::Var(rng.random_range(0..arity))
        } else if rng.random_bool(0.15) {
            StarTerm::Const(Constant::zero())
        } else {
            StarTerm::Const(random_constant(rng))
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    let sub = |rng: &mut R| random_star_term(rng, arity, depth - 1, prims);
    match rng.random_range(0..7) {
        0 => leaf(rng),
        1 => sub(rng) + sub(rng),
        2 => sub(rng) * sub(rng),
        3 => -sub(rng),
        4 => StarTerm::star(sub(rng)),
        5 if !prims.is_empty() => StarTerm::prim(prims[rng.random_range(0..prims.len())], sub(rng)),
        _ => {
            let u = sub(rng);
            let s = StarTerm::star(u.clone());
            if rng.random_bool(0.5) {
                u.clone() * (s * u)
            } else {
                s.clone() * (u * s)
            }
        }
    }
}

/// Soundness of [`star_normalize`] under exact rational evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaReport {
    pub samples: usize,
    pub mismatches: usize,
    /// Samples whose evaluation was not exactly representable.
    pub discarded: usize,
}

pub fn sigma_soundness(terms: &[StarTerm], model: &VnModel, samples_per_term: usize, cfg: &Config) -> SigmaReport {
    let mut rng = cfg.rng("sigma");
    let mut report = SigmaReport { samples: 0, mismatches: 0, discarded: 0 };
    for t in terms {
        let nf = star_normalize(t);
        let arity = t.arity().max(nf.arity());
        for _ in 0..samples_per_term {
            let args: Vec<Vec<BigRational>> = (0..arity).map(|_| random_rational_element(model, &mut rng)).collect();
            match (model.apply(t, &args), model.apply(&nf, &args)) {
                (Ok(a), Ok(b)) => {
                    report.samples += 1;
                    if a != b {
                        report.mismatches += 1;
                    }
                }
                _ => report.discarded += 1,
            }
        }
    }
    report
}

/// Derived laws on sampled carrier values: `(a*)* = a`, `e² = e` and
/// `e·a = a` for `e = a·a*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedLawReport {
    pub samples: usize,
    pub double_star_failures: usize,
    pub idempotent_failures: usize,
}

impl DerivedLawReport {
    pub fn passed(&self) -> bool {
        self.double_star_failures == 0 && self.idempotent_failures == 0
    }
}

pub fn derived_laws(model: &VnModel, samples: usize, cfg: &Config) -> DerivedLawReport {
    let mut rng = cfg.rng(&format!("vn-laws:{}", model.model()));
    let mut report = DerivedLawReport { samples, double_star_failures: 0, idempotent_failures: 0 };
    for _ in 0..samples {
        let a = random_rational_element(model, &mut rng);
        if model.star(&model.star(&a)) != a {
            report.double_star_failures += 1;
        }
        let e = idempotent_of(model, &a);
        let e2: Vec<BigRational> = e.iter().map(|x| x * x).collect();
        let ea: Vec<BigRational> = e.iter().zip(&a).map(|(x, y)| x * y).collect();
        if e2 != e || ea != a {
            report.idempotent_failures += 1;
        }
    }
    report
}

/// Whether `x` is a one with respect to `model` (every coordinate 1).
pub fn is_one<S: Scalar>(x: &[S]) -> bool {
    x.iter().all(|c| c.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> StarTerm {
        StarTerm::var(i)
    }

    #[test]
    fn sigma_examples() {
        let t = v(0) * (StarTerm::star(v(0)) * v(0));
        assert_eq!(star_normalize(&t), v(0));
        let t = StarTerm::star(v(0)) * (v(0) * StarTerm::star(v(0)));
        assert_eq!(star_normalize(&t), StarTerm::star(v(0)));
        assert_eq!(star_normalize(&StarTerm::star(StarTerm::constant(0))), StarTerm::constant(0));
        assert_eq!(star_normalize(&StarTerm::star(StarTerm::constant(2))).to_string(), "(const 0.5)");
        // (x*)* is not rewritten
        let ss = StarTerm::star(StarTerm::star(v(0)));
        assert_eq!(star_normalize(&ss), ss);
    }

    #[test]
    fn sigma_on_sums() {
        let u = v(0) + StarTerm::constant(1);
        let t = u.clone() * (StarTerm::star(u.clone()) * u.clone());
        let nf = star_normalize(&t);
        assert_eq!(nf, star_normalize(&u));
        assert_eq!(star_normalize(&nf), nf);
    }

    #[test]
    fn parse_and_print() {
        let t = parse_star_term_str("(mul (var 0) (mul (star (var 0)) (var 0)))").unwrap();
        assert_eq!(star_normalize(&t).to_string(), "(var 0)");
        assert_eq!(parse_star_term_str(&t.to_string()).unwrap(), t);
        assert!(parse_star_term_str("(star (var 0) (var 1))").is_err());
    }

    #[test]
    fn models_and_checks() {
        let cfg = Config::with_seed(2);
        assert!(vn_check(&ModelRing::ProductOfReals(3), 100, &cfg).is_proven());
        assert!(vn_check(&ModelRing::Reals, 100, &cfg).is_proven());
        let r = vn_check(&ModelRing::JetAlgebra { vars: 1, order: 1 }, 100, &cfg);
        assert_eq!(r.witness(), Some(&[0.0, 1.0][..]));
        assert!(VnModel::new(ModelRing::JetAlgebra { vars: 1, order: 1 }).is_err());
        let r = vn_check(&ModelRing::JetAlgebra { vars: 2, order: 2 }, 10, &cfg);
        assert_eq!(r.witness(), Some(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0][..]));
    }

    #[test]
    fn idempotents() {
        let m = VnModel::new(ModelRing::ProductOfReals(3)).unwrap();
        assert_eq!(idempotent_of(&m, &[1.0, 0.0, 2.0]), vec![1.0, 0.0, 1.0]);
        assert_eq!(idempotent_of(&m, &[0.0, 0.0, 0.0]), vec![0.0; 3]);
        assert!(is_one(&idempotent_of(&m, &[3.0, -1.0, 0.5])));
        assert!(derived_laws(&m, 200, &Config::with_seed(1)).passed());
    }

    #[test]
    fn coordinate_maps() {
        let cfg = Config::with_seed(4);
        let p = CoordinateMap::projection(2, 1).unwrap();
        let d = CoordinateMap::diagonal(1, 2);
        assert!(star_hom_check(&p, 50, &cfg).is_proven());
        assert!(star_hom_check(&d, 50, &cfg).is_proven());
        let swap = CoordinateMap::permutation(vec![1, 0]).unwrap();
        let c = d.then(&swap).unwrap().then(&p).unwrap();
        assert_eq!(c.apply(&[7]), vec![7]);
        assert!(star_hom_check(&c, 50, &cfg).is_proven());
        assert!(CoordinateMap::permutation(vec![0, 0]).is_err());
    }

    #[test]
    fn exact_sigma_soundness() {
        let cfg = Config::with_seed(9);
        let mut rng = cfg.rng("terms");
        let terms: Vec<StarTerm> =
            (0..50).map(|_| random_star_term(&mut rng, 2, 4, &[Primitive::Recip1pSq])).collect();
        let m = VnModel::new(ModelRing::ProductOfReals(2)).unwrap();
        let r = sigma_soundness(&terms, &m, 4, &cfg);
        assert_eq!(r.mismatches, 0);
        assert!(r.samples > 100);
    }
}
