//! Finitely presented C∞-rings `C∞(ℝⁿ)/⟨f₁…f_k⟩`, homomorphisms carrying
//! ideal certificates, colimits and rings of fractions.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::eval::eval;
use crate::ideal::{default_factors, search_certificate, IdealCertificate};
use crate::normalize::{is_const_zero, is_one, normalize, to_poly};
use crate::sampling::{enumerate_roots, find_common_zero, sample_zero_set, RootEnumeration, ZeroSample};
use crate::term::{projections, SmoothTerm};
use crate::verdict::{Config, Flag, Verdict};

struct PresentationData {
    arity: usize,
    relations: Vec<SmoothTerm>,
    name: Option<String>,
    zero_sets: Mutex<HashMap<(u64, usize, usize), Arc<ZeroSample>>>,
}

/// `C∞(ℝⁿ)/⟨f₁, …, f_k⟩`. Cheap to clone; equality compares arity and
/// relations and ignores the display name.
#[derive(Clone)]
pub struct Presentation(Arc<PresentationData>);

impl Presentation {
    pub fn new(arity: usize, relations: Vec<SmoothTerm>) -> Result<Self> {
        for r in &relations {
            if r.arity() > arity {
                return Err(Error::ArityMismatch { needed: r.arity(), given: arity });
            }
        }
        Ok(Self::build(arity, relations, None))
    }

    fn build(arity: usize, relations: Vec<SmoothTerm>, name: Option<String>) -> Self {
        Presentation(Arc::new(PresentationData { arity, relations, name, zero_sets: Mutex::default() }))
    }

    /// `C∞(ℝⁿ)`.
    pub fn free(arity: usize) -> Self {
        Self::build(arity, Vec::new(), None)
    }

    /// `C∞(ℝ⁰)/⟨1⟩`.
    pub fn trivial() -> Self {
        Self::build(0, vec![SmoothTerm::one()], None)
    }

    pub fn named(self, name: impl Into<String>) -> Self {
        Self::build(self.0.arity, self.0.relations.clone(), Some(name.into()))
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn relations(&self) -> &[SmoothTerm] {
        &self.0.relations
    }

    pub fn name(&self) -> Option<&str> {
        self.0.name.as_deref()
    }

    pub fn label(&self) -> String {
        match self.name() {
            Some(n) => n.to_string(),
            None => format!("C∞(ℝ^{})/⟨{}⟩", self.arity(), self.relations().len()),
        }
    }

    pub fn element(&self, term: SmoothTerm) -> Result<Element> {
        Element::new(self, term)
    }

    fn check_term(&self, term: &SmoothTerm) -> Result<()> {
        if term.arity() > self.arity() {
            return Err(Error::ArityMismatch { needed: term.arity(), given: self.arity() });
        }
        Ok(())
    }

    fn tag(&self) -> String {
        let rels: Vec<String> = self.relations().iter().map(|r| r.to_string()).collect();
        format!("{}|{}", self.arity(), rels.join(","))
    }

    /// Seeded sample of real points where every relation vanishes; memoized
    /// per configuration.
    pub fn zero_set(&self, cfg: &Config) -> Arc<ZeroSample> {
        let key = (cfg.seed, cfg.samples, cfg.budget);
        if let Some(s) = self.0.zero_sets.lock().expect("cache").get(&key) {
            return s.clone();
        }
        let sample = Arc::new(sample_zero_set(
            self.relations(),
            self.arity(),
            cfg,
            &format!("zeros:{}", self.tag()),
            cfg.samples,
        ));
        self.0.zero_sets.lock().expect("cache").insert(key, sample.clone());
        sample
    }

    /// Multi-start enumeration of the real solution set.
    pub fn solutions(&self, cfg: &Config) -> RootEnumeration {
        enumerate_roots(self.relations(), self.arity(), cfg, &format!("roots:{}", self.tag()))
    }

    /// `max |fᵢ(p)|`, or `None` if evaluation fails.
    pub fn relation_residual(&self, p: &[f64]) -> Option<f64> {
        self.relations().iter().try_fold(0.0f64, |m, r| eval(r, p).ok().map(|v| m.max(v.abs())))
    }
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.arity() == other.arity() && self.relations() == other.relations())
    }
}

impl Eq for Presentation {}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(ring {} :arity {} :rels (", self.name().unwrap_or("_"), self.arity())?;
        write_terms(f, self.relations())?;
        write!(f, "))")
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[SmoothTerm]) -> fmt::Result {
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

/// Residue class of a term in a presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    ring: Presentation,
    term: SmoothTerm,
}

impl Element {
    pub fn new(ring: &Presentation, term: SmoothTerm) -> Result<Self> {
        ring.check_term(&term)?;
        Ok(Element { ring: ring.clone(), term })
    }

    pub fn ring(&self) -> &Presentation {
        &self.ring
    }

    pub fn term(&self) -> &SmoothTerm {
        &self.term
    }
}

/// Gap above which a zero-set sample counts as separating; points that
/// satisfy the relations only loosely need a larger gap.
fn separation_threshold(cfg: &Config, point_residual: f64, p: &[f64]) -> f64 {
    let scale = p.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    cfg.tol.max(1e4 * point_residual * scale)
}

/// Three-valued equality of two elements.
pub fn equal_mod_ideal(a: &Element, b: &Element, cert: Option<&IdealCertificate>, cfg: &Config) -> Result<Verdict> {
    if a.ring != b.ring {
        return Err(Error::SourceMismatch(format!("{} vs {}", a.ring.label(), b.ring.label())));
    }
    if let Some(c) = cert {
        if c.len() != a.ring.relations().len() {
            return Err(Error::CertificateShape { expected: a.ring.relations().len(), given: c.len() });
        }
    }
    Ok(equal_in(&a.ring, &a.term, &b.term, cert, cfg))
}

/// Equality of `a` and `b` in `ring`: normalization, then the certificate,
/// then refutation on zero-set samples, then bounded certificate search.
pub fn equal_in(ring: &Presentation, a: &SmoothTerm, b: &SmoothTerm, cert: Option<&IdealCertificate>, cfg: &Config) -> Verdict {
    let diff = a - b;
    let diff_poly = to_poly(&diff);
    if diff_poly.is_zero() {
        return Verdict::Proven;
    }
    let rels = ring.relations();
    if let Some(c) = cert {
        if c.len() == rels.len() && to_poly(&c.residual(&diff, rels)).is_zero() {
            return Verdict::Proven;
        }
    }
    let sample = ring.zero_set(cfg);
    let mut max_residual = 0.0f64;
    let mut used = 0;
    let mut discarded = 0;
    for p in &sample.points {
        let (Ok(va), Ok(vb)) = (eval(a, p), eval(b, p)) else {
            discarded += 1;
            continue;
        };
        let gap = Config::relative_gap(va, vb);
        let point_residual = ring.relation_residual(p).unwrap_or(0.0);
        if gap > separation_threshold(cfg, point_residual, p) {
            return Verdict::refuted(p.clone(), gap);
        }
        max_residual = max_residual.max(gap);
        used += 1;
    }
    if !rels.is_empty() {
        let mut terms: Vec<&SmoothTerm> = vec![&diff];
        terms.extend(rels);
        let factors = default_factors(ring.arity(), &terms);
        if search_certificate(&diff, rels, &factors, cfg.nmax).is_some() {
            return Verdict::Proven;
        }
    }
    if used == 0 {
        Verdict::flagged(0, 0.0, Flag::NoSamplePoints)
    } else if discarded > 0 {
        Verdict::flagged(used, max_residual, Flag::SamplesDiscarded)
    } else {
        Verdict::supported(used, max_residual)
    }
}

/// A homomorphism `source → target`: `components[i]` is the image of
/// generator `i`, and `certificates[j]` (when present) witnesses
/// `f_j ∘ φ ∈ ⟨g₁…g_t⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Morphism {
    source: Presentation,
    target: Presentation,
    components: Vec<SmoothTerm>,
    certificates: Vec<Option<IdealCertificate>>,
}

impl Morphism {
    /// An empty `certificates` vector means none are supplied.
    pub fn new(
        source: &Presentation,
        target: &Presentation,
        components: Vec<SmoothTerm>,
        certificates: Vec<Option<IdealCertificate>>,
    ) -> Result<Self> {
        if components.len() != source.arity() {
            return Err(Error::ArityMismatch { needed: source.arity(), given: components.len() });
        }
        for c in &components {
            target.check_term(c)?;
        }
        let k = source.relations().len();
        let certificates = if certificates.is_empty() { vec![None; k] } else { certificates };
        if certificates.len() != k {
            return Err(Error::CertificateShape { expected: k, given: certificates.len() });
        }
        for c in certificates.iter().flatten() {
            if c.len() != target.relations().len() {
                return Err(Error::CertificateShape { expected: target.relations().len(), given: c.len() });
            }
        }
        Ok(Morphism { source: source.clone(), target: target.clone(), components, certificates })
    }

    pub fn identity(ring: &Presentation) -> Self {
        let k = ring.relations().len();
        Morphism {
            source: ring.clone(),
            target: ring.clone(),
            components: projections(ring.arity()),
            certificates: (0..k).map(|j| Some(IdealCertificate::unit(k, j))).collect(),
        }
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn target(&self) -> &Presentation {
        &self.target
    }

    pub fn components(&self) -> &[SmoothTerm] {
        &self.components
    }

    pub fn certificates(&self) -> &[Option<IdealCertificate>] {
        &self.certificates
    }

    /// Image of a source term: `t ∘ φ`.
    pub fn apply(&self, term: &SmoothTerm) -> Result<SmoothTerm> {
        term.substitute(&self.components)
    }

    pub fn apply_element(&self, e: &Element) -> Result<Element> {
        if e.ring != self.source {
            return Err(Error::SourceMismatch(e.ring.label()));
        }
        Element::new(&self.target, self.apply(&e.term)?)
    }

    /// `f_j ∘ φ`.
    pub fn relation_image(&self, j: usize) -> SmoothTerm {
        self.source.relations()[j].substitute(&self.components).expect("checked arity")
    }

    /// `next ∘ self`, with certificates composed where every needed piece
    /// is present.
    pub fn then(&self, next: &Morphism) -> Result<Morphism> {
        if self.target != next.source {
            return Err(Error::NotComposable(format!("{} then {}", self.target.label(), next.source.label())));
        }
        let components = self.components.iter().map(|c| normalize(&next.apply(c).expect("checked arity"))).collect();
        let certificates = self.certificates.iter().map(|cert| cert.as_ref().and_then(|h| compose_certificate(h, next))).collect();
        Ok(Morphism { source: self.source.clone(), target: next.target.clone(), components, certificates })
    }

    /// Checks every relation image, through its certificate when one is
    /// stored.
    pub fn verify(&self, cfg: &Config) -> Verdict {
        let rels = self.target.relations();
        Verdict::all((0..self.source.relations().len()).map(|j| {
            let image = self.relation_image(j);
            match &self.certificates[j] {
                Some(c) => c
                    .verify(&image, rels, self.target.arity(), cfg)
                    .unwrap_or_else(|_| equal_in(&self.target, &image, &SmoothTerm::zero(), None, cfg)),
                None => equal_in(&self.target, &image, &SmoothTerm::zero(), None, cfg),
            }
        }))
    }

    /// Fills missing certificates by bounded search.
    pub fn with_found_certificates(mut self, cfg: &Config) -> Morphism {
        let rels = self.target.relations().to_vec();
        for j in 0..self.certificates.len() {
            if self.certificates[j].is_some() {
                continue;
            }
            let image = self.relation_image(j);
            let mut terms: Vec<&SmoothTerm> = vec![&image];
            terms.extend(&rels);
            let factors = default_factors(self.target.arity(), &terms);
            self.certificates[j] = search_certificate(&image, &rels, &factors, cfg.nmax);
        }
        self
    }
}

/// From `f ∘ φ = Σₗ hₗ gₗ` and `gₗ ∘ ψ = Σₘ kₗₘ eₘ`:
/// `f ∘ φ ∘ ψ = Σₘ (Σₗ (hₗ ∘ ψ) kₗₘ) eₘ`.
fn compose_certificate(h: &IdealCertificate, next: &Morphism) -> Option<IdealCertificate> {
    let t = next.target.relations().len();
    let mut out = vec![SmoothTerm::zero(); t];
    for (l, hl) in h.multipliers.iter().enumerate() {
        if is_const_zero(hl) {
            continue;
        }
        let k = next.certificates.get(l)?.as_ref()?;
        let hl_image = next.apply(hl).ok()?;
        for (m, klm) in k.multipliers.iter().enumerate() {
            if !is_const_zero(klm) {
                out[m] = &out[m] + &(&hl_image * klm);
            }
        }
    }
    Some(IdealCertificate::new(out.iter().map(normalize).collect()))
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(hom :src {} :dst {} :comps (",
            self.source.name().unwrap_or("_"),
            self.target.name().unwrap_or("_")
        )?;
        write_terms(f, &self.components)?;
        f.write_str(") :certs (")?;
        for (i, c) in self.certificates.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match c {
                Some(c) => {
                    f.write_str("(")?;
                    write_terms(f, &c.multipliers)?;
                    f.write_str(")")?;
                }
                None => f.write_str("nil")?,
            }
        }
        f.write_str("))")
    }
}

/// Componentwise equality of parallel morphisms, with optional per-component
/// certificates.
pub fn morphisms_equal(f: &Morphism, g: &Morphism, certs: &[Option<IdealCertificate>], cfg: &Config) -> Result<Verdict> {
    if f.source != g.source || f.target != g.target {
        return Err(Error::ParallelismViolation(format!(
            "{} → {} vs {} → {}",
            f.source.label(),
            f.target.label(),
            g.source.label(),
            g.target.label()
        )));
    }
    Ok(Verdict::all(f.components.iter().zip(&g.components).enumerate().map(|(i, (a, b))| {
        equal_in(&f.target, a, b, certs.get(i).and_then(Option::as_ref), cfg)
    })))
}

/// Round trips `g ∘ f = id` and `f ∘ g = id`.
pub fn isomorphism_verdict(f: &Morphism, g: &Morphism, cfg: &Config) -> Result<Verdict> {
    let there = morphisms_equal(&f.then(g)?, &Morphism::identity(&f.source), &[], cfg)?;
    let back = morphisms_equal(&g.then(f)?, &Morphism::identity(&g.source), &[], cfg)?;
    Ok(there.and(back))
}

#[derive(Clone, Debug)]
pub struct Coproduct {
    pub object: Presentation,
    pub left: Morphism,
    pub right: Morphism,
}

/// `A ⊗∞ B`: juxtaposed generators and relations.
pub fn coproduct(a: &Presentation, b: &Presentation) -> Coproduct {
    let n = a.arity();
    let ka = a.relations().len();
    let mut rels = a.relations().to_vec();
    rels.extend(b.relations().iter().map(|r| r.shift_vars(n)));
    let total = rels.len();
    let object = Presentation::build(n + b.arity(), rels, None);
    let left = Morphism {
        source: a.clone(),
        target: object.clone(),
        components: projections(n),
        certificates: (0..ka).map(|j| Some(IdealCertificate::unit(total, j))).collect(),
    };
    let right = Morphism {
        source: b.clone(),
        target: object.clone(),
        components: (0..b.arity()).map(|i| SmoothTerm::Var(n + i)).collect(),
        certificates: (0..b.relations().len()).map(|j| Some(IdealCertificate::unit(total, ka + j))).collect(),
    };
    Coproduct { object, left, right }
}

#[derive(Clone, Debug)]
pub struct Coequalizer {
    pub object: Presentation,
    pub quotient: Morphism,
}

/// `B/⟨s(xᵢ) − s′(xᵢ)⟩` for parallel `s, s′: A → B`.
pub fn coequalizer(s: &Morphism, s2: &Morphism) -> Result<Coequalizer> {
    if s.source != s2.source || s.target != s2.target {
        return Err(Error::ParallelismViolation(format!(
            "{} → {} vs {} → {}",
            s.source.label(),
            s.target.label(),
            s2.source.label(),
            s2.target.label()
        )));
    }
    let b = &s.target;
    let mut rels = b.relations().to_vec();
    rels.extend(s.components.iter().zip(&s2.components).map(|(x, y)| x - y));
    let total = rels.len();
    let object = Presentation::build(b.arity(), rels, None);
    let quotient = Morphism {
        source: b.clone(),
        target: object.clone(),
        components: projections(b.arity()),
        certificates: (0..b.relations().len()).map(|j| Some(IdealCertificate::unit(total, j))).collect(),
    };
    Ok(Coequalizer { object, quotient })
}

#[derive(Clone, Debug)]
pub struct Pushout {
    pub object: Presentation,
    pub left: Morphism,
    pub right: Morphism,
    /// `left ∘ f = right ∘ g`.
    pub commutes: Verdict,
}

/// Pushout of `f: A → B` and `g: A → C` as a quotient of `B ⊗∞ C`.
pub fn pushout(f: &Morphism, g: &Morphism, cfg: &Config) -> Result<Pushout> {
    if f.source != g.source {
        return Err(Error::SourceMismatch(format!("{} vs {}", f.source.label(), g.source.label())));
    }
    let Coproduct { object: bc, left: ib, right: ic } = coproduct(&f.target, &g.target);
    let fi = f.then(&ib)?;
    let gi = g.then(&ic)?;
    let base = bc.relations().len();
    let mut rels = bc.relations().to_vec();
    rels.extend(fi.components.iter().zip(&gi.components).map(|(x, y)| x - y));
    let total = rels.len();
    let object = Presentation::build(bc.arity(), rels, None);
    let widen = |m: Morphism| Morphism {
        target: object.clone(),
        certificates: m
            .certificates
            .into_iter()
            .map(|c| c.map(|c| pad(&c, total)))
            .collect(),
        ..m
    };
    let left = widen(ib);
    let right = widen(ic);
    let certs: Vec<Option<IdealCertificate>> =
        (0..f.source.arity()).map(|i| Some(IdealCertificate::unit(total, base + i))).collect();
    let commutes = morphisms_equal(&f.then(&left)?, &g.then(&right)?, &certs, cfg)?;
    Ok(Pushout { object, left, right, commutes })
}

fn pad(c: &IdealCertificate, len: usize) -> IdealCertificate {
    let mut m = c.multipliers.clone();
    m.resize(len, SmoothTerm::zero());
    IdealCertificate::new(m)
}

/// `A{a⁻¹}` presented as `A{x}/⟨a·x − 1⟩` with its structure map `η_a`.
#[derive(Clone, Debug)]
pub struct Localization {
    pub object: Presentation,
    pub eta: Morphism,
    pub element: SmoothTerm,
}

impl Localization {
    /// Index of the adjoined inverse.
    pub fn inverse_var(&self) -> usize {
        self.object.arity() - 1
    }
}

pub fn localize(ring: &Presentation, a: &SmoothTerm) -> Result<Localization> {
    ring.check_term(a)?;
    let n = ring.arity();
    let mut rels = ring.relations().to_vec();
    rels.push(a * &SmoothTerm::Var(n) - SmoothTerm::one());
    let total = rels.len();
    let object = Presentation::build(n + 1, rels, None);
    let eta = Morphism {
        source: ring.clone(),
        target: object.clone(),
        components: projections(n),
        certificates: (0..ring.relations().len()).map(|j| Some(IdealCertificate::unit(total, j))).collect(),
    };
    Ok(Localization { object, eta, element: a.clone() })
}

/// `A{1⁻¹} → A` sending the adjoined inverse to 1, with the round-trip
/// verdict against `η_1`.
pub fn unit_localization_inverse(ring: &Presentation, cfg: &Config) -> Result<(Localization, Morphism, Verdict)> {
    let loc = localize(ring, &SmoothTerm::one())?;
    let k = ring.relations().len();
    let mut components = projections(ring.arity());
    components.push(SmoothTerm::one());
    let mut certificates: Vec<Option<IdealCertificate>> = (0..k).map(|j| Some(IdealCertificate::unit(k, j))).collect();
    certificates.push(Some(IdealCertificate::zeros(k)));
    let back = Morphism::new(&loc.object, ring, components, certificates)?;
    let verdict = isomorphism_verdict(&loc.eta, &back, cfg)?;
    Ok((loc, back, verdict))
}

/// The square `η_{g(a)} ∘ g = g′ ∘ η_a` for `g: A → B`.
#[derive(Clone, Debug)]
pub struct LocalizationSquare {
    pub source: Localization,
    pub target: Localization,
    /// `g′: A{a⁻¹} → B{g(a)⁻¹}`.
    pub induced: Morphism,
    pub commutes: Verdict,
}

pub fn localization_square(g: &Morphism, a: &SmoothTerm, cfg: &Config) -> Result<LocalizationSquare> {
    let source = localize(&g.source, a)?;
    let target = localize(&g.target, &g.apply(a)?)?;
    let total = target.object.relations().len();
    let mut components = g.components.clone();
    components.push(SmoothTerm::Var(g.target.arity()));
    let mut certificates: Vec<Option<IdealCertificate>> =
        g.certificates.iter().map(|c| c.as_ref().map(|c| pad(c, total))).collect();
    certificates.push(Some(IdealCertificate::unit(total, total - 1)));
    let induced = Morphism::new(&source.object, &target.object, components, certificates)?;
    let commutes = morphisms_equal(&g.then(&target.eta)?, &source.eta.then(&induced)?, &[], cfg)?;
    Ok(LocalizationSquare { source, target, induced, commutes })
}

/// `(A{a⁻¹}){b⁻¹} ≅ A{(a·b)⁻¹}`.
#[derive(Clone, Debug)]
pub struct Flattening {
    pub iterated: Presentation,
    pub single: Presentation,
    pub theta: Morphism,
    pub theta_inv: Morphism,
    pub round_trip: Verdict,
    /// `θ ∘ η_b ∘ η_a = η_{ab}`.
    pub triangle: Verdict,
}

/// Only `denominator = 1` (or `None`) is supported.
pub fn flatten_localization(
    ring: &Presentation,
    a: &SmoothTerm,
    b: &SmoothTerm,
    denominator: Option<&SmoothTerm>,
    cfg: &Config,
) -> Result<Flattening> {
    if let Some(c) = denominator {
        if !is_one(c) {
            return Err(Error::UnsupportedDenominator(c.to_string()));
        }
    }
    let n = ring.arity();
    let k = ring.relations().len();
    let first = localize(ring, a)?;
    let second = localize(&first.object, b)?;
    let single = localize(ring, &(a * b))?;
    let (u, v, w) = (SmoothTerm::Var(n), SmoothTerm::Var(n + 1), SmoothTerm::Var(n));

    let mut comps = projections(n);
    comps.extend([b * &w, a * &w]);
    let mut certs: Vec<Option<IdealCertificate>> = (0..k).map(|j| Some(IdealCertificate::unit(k + 1, j))).collect();
    certs.push(Some(IdealCertificate::unit(k + 1, k)));
    certs.push(Some(IdealCertificate::unit(k + 1, k)));
    let theta = Morphism::new(&second.object, &single.object, comps, certs)?;

    let mut comps = projections(n);
    comps.push(&u * &v);
    let mut certs: Vec<Option<IdealCertificate>> = (0..k).map(|j| Some(IdealCertificate::unit(k + 2, j))).collect();
    let mut last = vec![SmoothTerm::zero(); k + 2];
    last[k] = b * &v;
    last[k + 1] = SmoothTerm::one();
    certs.push(Some(IdealCertificate::new(last)));
    let theta_inv = Morphism::new(&single.object, &second.object, comps, certs)?;

    let round_trip = isomorphism_verdict(&theta, &theta_inv, cfg)?;
    let path = first.eta.then(&second.eta)?.then(&theta)?;
    let triangle = morphisms_equal(&path, &single.eta, &[], cfg)?;
    Ok(Flattening { iterated: second.object, single: single.object, theta, theta_inv, round_trip, triangle })
}

/// Whether `η_a(s)` is a unit of `A{a⁻¹}`.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub localized: Presentation,
    pub verdict: Verdict,
    pub inverse: Option<SmoothTerm>,
    /// Witnesses `s·inverse − 1 ∈` the localized ideal.
    pub certificate: Option<IdealCertificate>,
}

pub fn saturation_member(ring: &Presentation, a: &SmoothTerm, s: &SmoothTerm, cfg: &Config) -> Result<Saturation> {
    ring.check_term(s)?;
    let loc = localize(ring, a)?;
    let rels = loc.object.relations();
    let mut gens = vec![s.clone()];
    gens.extend(rels.iter().cloned());
    let gen_refs: Vec<&SmoothTerm> = gens.iter().collect();
    let factors = default_factors(loc.object.arity(), &gen_refs);
    if let Some(found) = search_certificate(&SmoothTerm::one(), &gens, &factors, cfg.nmax) {
        let inverse = found.multipliers[0].clone();
        let certificate = IdealCertificate::new(found.multipliers[1..].iter().map(|h| normalize(&-h)).collect());
        let target = s * &inverse - SmoothTerm::one();
        let verdict = certificate.verify(&target, rels, loc.object.arity(), cfg)?;
        return Ok(Saturation { localized: loc.object, verdict, inverse: Some(inverse), certificate: Some(certificate) });
    }
    if let Some(w) = find_common_zero(&gens, loc.object.arity(), cfg, &format!("saturation:{s}")) {
        return Ok(Saturation { localized: loc.object, verdict: Verdict::refuted(w, 1.0), inverse: None, certificate: None });
    }
    let sample = loc.object.zero_set(cfg);
    let mut used = 0;
    for p in &sample.points {
        if let Ok(v) = eval(s, p) {
            if v.abs() <= cfg.tol {
                return Ok(Saturation {
                    localized: loc.object.clone(),
                    verdict: Verdict::refuted(p.clone(), v.abs()),
                    inverse: None,
                    certificate: None,
                });
            }
            used += 1;
        }
    }
    let verdict = if used == 0 { Verdict::flagged(0, 0.0, Flag::NoSamplePoints) } else { Verdict::supported(used, 0.0) };
    Ok(Saturation { localized: loc.object, verdict, inverse: None, certificate: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::SmoothTerm as T;

    fn cfg() -> Config {
        Config::with_seed(11)
    }

    fn circle() -> Presentation {
        Presentation::new(1, vec![T::var(0).pow(2) - T::one()]).unwrap()
    }

    #[test]
    fn presentation_equality_ignores_name() {
        assert_eq!(circle().named("A"), circle());
        assert_ne!(circle(), Presentation::free(1));
        assert!(Presentation::new(1, vec![T::var(1)]).is_err());
    }

    #[test]
    fn equality_verdicts() {
        let loc = localize(&Presentation::free(1), &T::var(0)).unwrap().object;
        let rel = loc.relations()[0].clone();
        let one = loc.element(T::one()).unwrap();
        let prod = loc.element(T::var(0) * T::var(1)).unwrap();
        let cert = IdealCertificate::new(vec![T::one()]);
        assert!(equal_mod_ideal(&prod, &one, Some(&cert), &cfg()).unwrap().is_proven());
        assert!(equal_in(&loc, &rel, &T::zero(), None, &cfg()).is_proven());

        let free = Presentation::free(1);
        assert!(equal_in(&free, &T::sin(T::var(0)), &T::var(0), None, &cfg()).is_refuted());

        let trivial = Presentation::new(1, vec![T::var(0).pow(2) + T::one()]).unwrap();
        let v = equal_in(&trivial, &T::one(), &T::zero(), None, &cfg());
        assert_eq!(v.flag(), Some(Flag::NoSamplePoints));
    }

    #[test]
    fn coproduct_of_lines_and_counts() {
        let c = coproduct(&Presentation::free(1), &Presentation::free(1));
        assert_eq!(c.object, Presentation::free(2));
        let b = Presentation::new(1, vec![T::var(0).pow(2) - T::int(4)]).unwrap();
        let c = coproduct(&circle(), &b);
        assert_eq!(c.object.solutions(&cfg()).roots.len(), 4);
        assert!(c.left.verify(&cfg()).is_proven() && c.right.verify(&cfg()).is_proven());
        let t = coproduct(&circle(), &Presentation::trivial());
        assert!(t.object.relations().contains(&T::one()));
    }

    #[test]
    fn coequalizer_cases() {
        let free = Presentation::free(1);
        let id = Morphism::identity(&free);
        let zero = Morphism::new(&free, &free, vec![T::zero()], vec![]).unwrap();
        let q = coequalizer(&id, &zero).unwrap();
        assert_eq!(q.object.relations(), &[T::var(0) - T::zero()]);
        let same = coequalizer(&id, &id).unwrap();
        assert!(same.object.relations().iter().all(crate::normalize::is_zero));
        let other = Morphism::identity(&circle());
        assert!(matches!(coequalizer(&id, &other), Err(Error::ParallelismViolation(_))));
    }

    #[test]
    fn pushout_of_localizations() {
        let free = Presentation::free(1);
        let f = T::recip1psq(T::var(0));
        let g = T::one() - f.clone();
        let li = localize(&free, &f).unwrap();
        let lj = localize(&free, &g).unwrap();
        let p = pushout(&li.eta, &lj.eta, &cfg()).unwrap();
        assert!(p.commutes.is_proven());
        assert_eq!(p.object.arity(), 4);
        let both = localize(&free, &(f.clone() * g.clone())).unwrap().object;
        let w = T::var(1);
        let to = Morphism::new(&p.object, &both, vec![T::var(0), g.clone() * w.clone(), T::var(0), f.clone() * w], vec![])
            .unwrap()
            .with_found_certificates(&cfg());
        let from = Morphism::new(&both, &p.object, vec![T::var(0), T::var(1) * T::var(3)], vec![])
            .unwrap()
            .with_found_certificates(&cfg());
        assert!(to.verify(&cfg()).is_proven());
        // g(x₀) − g(x₂) ∈ ⟨x₀ − x₂⟩ needs a Hadamard quotient outside the template family
        assert!(from.verify(&cfg()).holds());
        assert!(isomorphism_verdict(&to, &from, &cfg()).unwrap().holds());
        let id = Morphism::identity(&free);
        let along_id = pushout(&id, &li.eta, &cfg()).unwrap();
        assert!(along_id.commutes.is_proven());
        assert!(matches!(pushout(&id, &Morphism::identity(&circle()), &cfg()), Err(Error::SourceMismatch(_))));
    }

    #[test]
    fn localization_of_x() {
        let loc = localize(&Presentation::free(1), &T::var(0)).unwrap();
        assert_eq!(loc.object.relations(), &[T::var(0) * T::var(1) - T::one()]);
        assert!(loc.eta.verify(&cfg()).is_proven());
        let (_, _, v) = unit_localization_inverse(&circle(), &cfg()).unwrap();
        assert!(v.is_proven());
    }

    #[test]
    fn recip_localization_is_a_graph() {
        let loc = localize(&Presentation::free(1), &T::recip1psq(T::var(0))).unwrap();
        for p in &loc.object.zero_set(&cfg()).points {
            assert!((p[1] - (1.0 + p[0] * p[0])).abs() < 1e-8);
        }
    }

    #[test]
    fn square_commutes() {
        let free = Presentation::free(1);
        let g = Morphism::new(&free, &free, vec![T::var(0).pow(2) + T::one()], vec![]).unwrap();
        let sq = localization_square(&g, &T::var(0), &cfg()).unwrap();
        assert!(sq.commutes.is_proven());
        assert!(sq.induced.verify(&cfg()).is_proven());
    }

    #[test]
    fn flattening_round_trips() {
        let a = T::var(0);
        let f = flatten_localization(&Presentation::free(1), &a, &a, None, &cfg()).unwrap();
        assert!(f.round_trip.is_proven(), "{}", f.round_trip);
        assert!(f.triangle.is_proven());
        assert!(f.theta.verify(&cfg()).is_proven() && f.theta_inv.verify(&cfg()).is_proven());
        let g = flatten_localization(&circle(), &T::one(), &(T::var(0) + T::int(2)), Some(&T::one()), &cfg()).unwrap();
        assert!(g.round_trip.is_proven());
        assert!(matches!(
            flatten_localization(&circle(), &a, &a, Some(&T::int(2)), &cfg()),
            Err(Error::UnsupportedDenominator(_))
        ));
    }

    #[test]
    fn composition_composes_certificates() {
        let free = Presentation::free(1);
        let l1 = localize(&free, &T::var(0)).unwrap();
        let l2 = localize(&l1.object, &T::var(0)).unwrap();
        let comp = l1.eta.then(&l2.eta).unwrap();
        assert!(comp.certificates().iter().all(Option::is_some));
        assert!(comp.verify(&cfg()).is_proven());
        let c = circle();
        let m = Morphism::new(&c, &c, vec![-T::var(0)], vec![]).unwrap().with_found_certificates(&cfg());
        assert!(m.certificates()[0].is_some());
        let twice = m.then(&m).unwrap();
        assert!(twice.certificates()[0].is_some() && twice.verify(&cfg()).is_proven());
        assert!(morphisms_equal(&twice, &Morphism::identity(&c), &[], &cfg()).unwrap().is_proven());
    }

    #[test]
    fn saturation_cases() {
        let free = Presentation::free(1);
        let x = T::var(0);
        let s = saturation_member(&free, &x, &x, &cfg()).unwrap();
        assert!(s.verdict.is_proven());
        let s2 = saturation_member(&free, &x, &x.pow(2), &cfg()).unwrap();
        assert!(s2.verdict.is_proven());
        let inv = s2.inverse.unwrap();
        let loc = s2.localized;
        assert!(equal_in(&loc, &inv, &T::var(1).pow(2), None, &cfg()).holds());
        let r = saturation_member(&free, &x, &(x.clone() - T::one()), &cfg()).unwrap();
        let w = r.verdict.witness().unwrap();
        assert!((w[0] - 1.0).abs() < 1e-8 && (w[1] - 1.0).abs() < 1e-8);
    }
}
