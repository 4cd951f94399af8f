//! Smooth Zariski covers: families `a₁…a_n` of a presentation with a
//! certificate `Σ λᵢaᵢ = 1` modulo the relations, the pretopology
//! constructions, ℝ-point sampling of `Spec∞`, and sheaf checks.

use std::collections::HashMap;

use serde::Serialize;

use crate::constant::Constant;
use crate::error::{Error, Result};
use crate::eval::eval;
use crate::ideal::{default_factors, search_certificate, IdealCertificate};
use crate::normalize::{is_const_zero, normalize, to_poly};
use crate::ring::{equal_in, isomorphism_verdict, localization_square, localize, unit_localization_inverse};
use crate::ring::{Localization, LocalizationSquare, Morphism, Presentation};
use crate::sampling::find_common_zero;
use crate::term::SmoothTerm;
use crate::verdict::{Config, Flag, Verdict};

#[derive(Clone, Debug)]
pub struct Cover {
    base: Presentation,
    elements: Vec<SmoothTerm>,
    certificate: Option<IdealCertificate>,
    verdict: Verdict,
    arrows: Vec<Localization>,
}

impl Cover {
    pub fn base(&self) -> &Presentation {
        &self.base
    }

    pub fn elements(&self) -> &[SmoothTerm] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Multipliers over `elements ++ relations`; absent for covers accepted
    /// geometrically.
    pub fn certificate(&self) -> Option<&IdealCertificate> {
        self.certificate.as_ref()
    }

    /// The `λᵢ` paired with the elements.
    pub fn lambdas(&self) -> Option<&[SmoothTerm]> {
        self.certificate.as_ref().map(|c| &c.multipliers[..self.elements.len()])
    }

    pub fn verdict(&self) -> &Verdict {
        &self.verdict
    }

    /// The localizations `η_{aᵢ}`.
    pub fn arrows(&self) -> &[Localization] {
        &self.arrows
    }

    /// Re-checks the stored certificate.
    pub fn check(&self, cfg: &Config) -> Result<Verdict> {
        match &self.certificate {
            Some(c) => c.verify(&SmoothTerm::one(), &generators(&self.base, &self.elements), self.base.arity(), cfg),
            None => Ok(spec_sample(&self.base, &self.elements, cfg)?.verdict.and(self.verdict.clone())),
        }
    }
}

fn generators(base: &Presentation, elements: &[SmoothTerm]) -> Vec<SmoothTerm> {
    let mut g = elements.to_vec();
    g.extend(base.relations().iter().cloned());
    g
}

fn search_unit(base: &Presentation, elements: &[SmoothTerm], cfg: &Config) -> Option<IdealCertificate> {
    let gens = generators(base, elements);
    let refs: Vec<&SmoothTerm> = gens.iter().collect();
    let factors = default_factors(base.arity(), &refs);
    search_certificate(&SmoothTerm::one(), &gens, &factors, cfg.nmax)
}

fn assemble(base: &Presentation, elements: Vec<SmoothTerm>, certificate: Option<IdealCertificate>, verdict: Verdict) -> Result<Cover> {
    let arrows = elements.iter().map(|a| localize(base, a)).collect::<Result<Vec<_>>>()?;
    Ok(Cover { base: base.clone(), elements, certificate, verdict, arrows })
}

/// Accepts `elements` as a cover of `base`. `unimodularity` may give the
/// `λᵢ` alone or `λᵢ` followed by relation multipliers.
pub fn make_cover(
    base: &Presentation,
    elements: Vec<SmoothTerm>,
    unimodularity: Option<Vec<SmoothTerm>>,
    cfg: &Config,
) -> Result<Cover> {
    if elements.is_empty() {
        return Err(Error::EmptyCover);
    }
    for a in &elements {
        if a.arity() > base.arity() {
            return Err(Error::ArityMismatch { needed: a.arity(), given: base.arity() });
        }
    }
    let n = elements.len();
    let k = base.relations().len();
    let gens = generators(base, &elements);
    let one = SmoothTerm::one();

    let mut given_combination = None;
    if let Some(lambdas) = unimodularity {
        if lambdas.len() != n && lambdas.len() != n + k {
            return Err(Error::CertificateShape { expected: n + k, given: lambdas.len() });
        }
        let only_lambdas = lambdas.len() == n;
        let mut multipliers = lambdas;
        multipliers.resize(n + k, SmoothTerm::zero());
        let cert = IdealCertificate::new(multipliers);
        if cert.verify(&one, &gens, base.arity(), cfg)?.is_proven() {
            return assemble(base, elements, Some(cert), Verdict::Proven);
        }
        let combination = IdealCertificate::new(cert.multipliers[..n].to_vec()).combination(&elements);
        if only_lambdas && k > 0 {
            let rest = &one - &combination;
            let mut refs: Vec<&SmoothTerm> = vec![&rest];
            refs.extend(base.relations());
            let factors = default_factors(base.arity(), &refs);
            if let Some(h) = search_certificate(&rest, base.relations(), &factors, cfg.nmax) {
                let mut multipliers = cert.multipliers[..n].to_vec();
                multipliers.extend(h.multipliers);
                return assemble(base, elements, Some(IdealCertificate::new(multipliers)), Verdict::Proven);
            }
        }
        given_combination = Some((cert, combination));
    }

    if let Some(cert) = search_unit(base, &elements, cfg) {
        return assemble(base, elements, Some(cert), Verdict::Proven);
    }
    if let Some(witness) = find_common_zero(&gens, base.arity(), cfg, &format!("cover:{}", join(&elements))) {
        return Err(Error::CertificateRefuted { witness });
    }
    if let Some((cert, combination)) = given_combination {
        let v = equal_in(base, &combination, &one, None, cfg);
        if let Verdict::NumericallySupported { samples, .. } = v {
            if samples > 0 {
                return assemble(base, elements, Some(cert), v);
            }
        }
    }
    Err(Error::CertificateNotFound { bound: cfg.nmax })
}

fn join(terms: &[SmoothTerm]) -> String {
    terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

/// Stability: the cover of `B` by `g(aᵢ)` with the transported certificate.
#[derive(Clone, Debug)]
pub struct PulledBackCover {
    pub cover: Cover,
    /// One localization square per element; `cover.arrows()` are their
    /// target localizations.
    pub squares: Vec<LocalizationSquare>,
}

pub fn pullback_cover(c: &Cover, g: &Morphism, cfg: &Config) -> Result<PulledBackCover> {
    if g.source() != &c.base {
        return Err(Error::SourceMismatch(format!("{} vs {}", c.base.label(), g.source().label())));
    }
    let target = g.target();
    let n = c.len();
    let elements = c.elements.iter().map(|a| g.apply(a)).collect::<Result<Vec<_>>>()?;
    let gens = generators(target, &elements);
    let mut transported = None;
    if let Some(cert) = &c.certificate {
        let mut multipliers = cert.multipliers[..n].iter().map(|l| g.apply(l)).collect::<Result<Vec<_>>>()?;
        let mut rest = vec![SmoothTerm::zero(); target.relations().len()];
        let mut complete = true;
        for (l, h) in cert.multipliers[n..].iter().enumerate() {
            if is_const_zero(h) {
                continue;
            }
            let Some(k) = &g.certificates()[l] else {
                complete = false;
                break;
            };
            let gh = g.apply(h)?;
            for (m, klm) in k.multipliers.iter().enumerate() {
                if !is_const_zero(klm) {
                    rest[m] = &rest[m] + &(&gh * klm);
                }
            }
        }
        if complete {
            multipliers.extend(rest.iter().map(normalize));
            let cert = IdealCertificate::new(multipliers);
            let v = cert.verify(&SmoothTerm::one(), &gens, target.arity(), cfg)?;
            if let Verdict::Refuted { witness, .. } = v {
                return Err(Error::CertificateRefuted { witness });
            }
            transported = Some((cert, v));
        }
    }
    let cover = match transported {
        Some((cert, v)) => assemble(target, elements, Some(cert), v)?,
        None => make_cover(target, elements, None, cfg)?,
    };
    let squares = c.elements.iter().map(|a| localization_square(g, a, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(PulledBackCover { cover, squares })
}

/// Transitivity: refines leg `i` of `c` by a cover of `A{aᵢ⁻¹}` whose
/// elements are terms of `A` and returns the cover by the products
/// `aᵢ·b_{ij}`.
pub fn compose_covers(c: &Cover, refinements: &[Cover], cfg: &Config) -> Result<Cover> {
    if refinements.len() != c.len() {
        return Err(Error::RefinementMismatch { index: refinements.len().min(c.len()) });
    }
    let n = c.base.arity();
    let mut elements = Vec::new();
    for (i, (r, arrow)) in refinements.iter().zip(&c.arrows).enumerate() {
        if r.base != arrow.object {
            return Err(Error::RefinementMismatch { index: i });
        }
        for b in &r.elements {
            if b.mentions_var(n) || b.arity() > n + 1 {
                return Err(Error::NotLiftedElement { index: i });
            }
            elements.push(normalize(&(&c.elements[i] * b)));
        }
    }
    if let Some(cert) = search_unit(&c.base, &elements, cfg) {
        return assemble(&c.base, elements, Some(cert), Verdict::Proven);
    }
    let gens = generators(&c.base, &elements);
    if let Some(witness) = find_common_zero(&gens, n, cfg, &format!("compose:{}", join(&elements))) {
        return Err(Error::CertificateRefuted { witness });
    }
    let geo = spec_sample(&c.base, &elements, cfg)?;
    match geo.verdict {
        Verdict::Refuted { witness, .. } => Err(Error::CertificateRefuted { witness }),
        Verdict::NumericallySupported { samples, max_residual, .. } if samples > 0 => {
            assemble(&c.base, elements, None, Verdict::flagged(samples, max_residual, Flag::GeometricOnly))
        }
        _ => Err(Error::CertificateNotFound { bound: cfg.nmax }),
    }
}

/// Isomorphism axiom: a verified isomorphism `φ: A → A′` yields the
/// one-element cover `(1)` of `A`, whose arrow `A → A{1⁻¹}` is inverted by
/// sending the adjoined inverse to 1.
#[derive(Clone, Debug)]
pub struct IsomorphismCover {
    pub cover: Cover,
    pub isomorphism: Verdict,
    pub unit_localization: Verdict,
}

pub fn cover_from_isomorphism(phi: &Morphism, inverse: &Morphism, cfg: &Config) -> Result<IsomorphismCover> {
    let isomorphism = isomorphism_verdict(phi, inverse, cfg)?;
    let cover = make_cover(phi.source(), vec![SmoothTerm::one()], Some(vec![SmoothTerm::one()]), cfg)?;
    let (_, _, unit_localization) = unit_localization_inverse(phi.source(), cfg)?;
    Ok(IsomorphismCover { cover, isomorphism, unit_localization })
}

/// Which `aᵢ` are nonzero at each sampled ℝ-point of `Spec∞(A)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecSample {
    pub points: Vec<Vec<f64>>,
    /// `membership[p][i]`: `aᵢ(point p) ≠ 0`.
    pub membership: Vec<Vec<bool>>,
    pub covered: usize,
    pub uncovered: Option<Vec<f64>>,
    /// No real point was found: the presentation is likely trivial.
    pub likely_trivial: bool,
    #[serde(skip)]
    pub verdict: Verdict,
}

pub fn spec_sample(base: &Presentation, elements: &[SmoothTerm], cfg: &Config) -> Result<SpecSample> {
    for a in elements {
        if a.arity() > base.arity() {
            return Err(Error::ArityMismatch { needed: a.arity(), given: base.arity() });
        }
    }
    let sample = base.zero_set(cfg);
    let mut points = Vec::new();
    let mut membership = Vec::new();
    let mut uncovered = None;
    for p in &sample.points {
        let Ok(row) = elements.iter().map(|a| eval(a, p).map(|v| v.abs() > cfg.tol)).collect::<Result<Vec<bool>>>() else {
            continue;
        };
        if uncovered.is_none() && !row.iter().any(|&b| b) {
            uncovered = Some(p.clone());
        }
        points.push(p.clone());
        membership.push(row);
    }
    if uncovered.is_none() && !points.is_empty() {
        let gens = generators(base, elements);
        uncovered = find_common_zero(&gens, base.arity(), cfg, &format!("spec:{}", join(elements)));
    }
    let covered = membership.iter().filter(|r| r.iter().any(|&b| b)).count();
    let likely_trivial = points.is_empty();
    let verdict = match (&uncovered, likely_trivial) {
        (Some(w), _) => Verdict::refuted(w.clone(), 0.0),
        (None, true) => Verdict::flagged(0, 0.0, Flag::NoSamplePoints),
        (None, false) => Verdict::supported(points.len(), 0.0),
    };
    Ok(SpecSample { points, membership, covered, uncovered, likely_trivial, verdict })
}

/// One matching family and the candidates gluing it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlueInstance {
    /// Candidate index chosen on each `A{aᵢ⁻¹}`.
    pub family: Vec<usize>,
    /// Global candidates restricting to the family, one per equality class
    /// in `A`.
    pub glued: Vec<usize>,
    pub unique: bool,
}

/// Sheaf condition for `Hom(B, −)` on a cover of `A`, over a finite pool of
/// candidate homomorphisms (tuples of `A`-terms).
#[derive(Clone, Debug, Serialize)]
pub struct SheafCheckReport {
    #[serde(serialize_with = "serialize_tuples")]
    pub candidates: Vec<Vec<SmoothTerm>>,
    /// Candidates that are homomorphisms `B → A{aᵢ⁻¹}`, per leg.
    pub local_sections: Vec<Vec<usize>>,
    /// Candidates that are homomorphisms `B → A`.
    pub global_sections: Vec<usize>,
    pub families_checked: usize,
    pub glue_instances: Vec<GlueInstance>,
    /// Every family was examined and the candidate pool came from a
    /// complete enumeration or an explicit list.
    pub complete: bool,
    /// Number of families when it exceeded the budget.
    pub overflow: Option<usize>,
    #[serde(skip)]
    pub equalizer_verdict: Verdict,
}

fn serialize_tuples<S: serde::Serializer>(tuples: &[Vec<SmoothTerm>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(tuples.iter().map(|t| t.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

/// Nearest dyadic rational with denominator ≤ 16 when within 1e-9.
fn snap(x: f64) -> Constant {
    for k in 0..=4 {
        let scale = f64::from(1u32 << k);
        let r = (x * scale).round() / scale;
        if (r - x).abs() < 1e-9 {
            return Constant::from_f64(r).expect("finite");
        }
    }
    Constant::from_f64(x).expect("finite")
}

/// Constant homomorphisms `B → A` from the enumerated real points of `B`.
fn constant_candidates(target: &Presentation, cfg: &Config) -> (Vec<Vec<SmoothTerm>>, bool) {
    let e = target.solutions(cfg);
    let tuples = e.roots.iter().map(|p| p.iter().map(|&x| SmoothTerm::Const(snap(x))).collect()).collect();
    (tuples, e.complete)
}

struct EqualityCache<'a> {
    cfg: &'a Config,
    memo: HashMap<(usize, usize, usize), Verdict>,
}

impl EqualityCache<'_> {
    fn tuples_equal(&mut self, key: usize, ring: &Presentation, pool: &[Vec<SmoothTerm>], p: usize, q: usize) -> Verdict {
        let (lo, hi) = (p.min(q), p.max(q));
        let cfg = self.cfg;
        self.memo
            .entry((key, lo, hi))
            .or_insert_with(|| {
                Verdict::all(pool[lo].iter().zip(&pool[hi]).map(|(a, b)| equal_in(ring, a, b, None, cfg)))
            })
            .clone()
    }
}

fn is_hom(target: &Presentation, ring: &Presentation, tuple: &[SmoothTerm], cfg: &Config) -> bool {
    target.relations().iter().all(|r| {
        let image = r.substitute(tuple).expect("tuple matches arity");
        equal_in(ring, &image, &SmoothTerm::zero(), None, cfg).holds()
    })
}

/// Checks that `Hom(B, A) → ∏ Hom(B, A{aᵢ⁻¹}) ⇉ ∏ Hom(B, A{(aᵢaⱼ)⁻¹})` is
/// an equalizer on the candidate pool: the constant tuples at the real
/// points of `B` plus `extra`.
pub fn sheaf_check_representable(
    c: &Cover,
    target: &Presentation,
    extra: &[Vec<SmoothTerm>],
    cfg: &Config,
) -> Result<SheafCheckReport> {
    let m = target.arity();
    for t in extra {
        if t.len() != m {
            return Err(Error::ArityMismatch { needed: m, given: t.len() });
        }
        for x in t {
            if x.arity() > c.base.arity() {
                return Err(Error::ArityMismatch { needed: x.arity(), given: c.base.arity() });
            }
        }
    }
    let (mut candidates, enumerated) = if target.relations().is_empty() && m > 0 {
        (Vec::new(), extra.is_empty())
    } else {
        constant_candidates(target, cfg)
    };
    for t in extra {
        if !candidates.iter().any(|c| c.iter().zip(t).all(|(x, y)| to_poly(x) == to_poly(y))) {
            candidates.push(t.clone());
        }
    }
    let n = c.len();
    let legs: Vec<&Presentation> = c.arrows.iter().map(|l| &l.object).collect();
    let local_sections: Vec<Vec<usize>> = legs
        .iter()
        .map(|ring| (0..candidates.len()).filter(|&p| is_hom(target, ring, &candidates[p], cfg)).collect())
        .collect();
    let global_sections: Vec<usize> =
        (0..candidates.len()).filter(|&p| is_hom(target, &c.base, &candidates[p], cfg)).collect();

    let mut overlaps = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            overlaps.insert((i, j), localize(&c.base, &(&c.elements[i] * &c.elements[j]))?.object);
        }
    }

    let total = local_sections.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.len())).unwrap_or(usize::MAX);
    let overflow = (total > cfg.budget).then_some(total);
    let mut cache = EqualityCache { cfg, memo: HashMap::new() };
    // keys: 0 = A, 1 + i = leg i, 1 + n + i·n + j = overlap (i, j)
    let mut verdict = Verdict::Proven;
    let mut glue_instances = Vec::new();
    let mut families_checked = 0;
    let mut family = vec![0usize; n];
    let sizes: Vec<usize> = local_sections.iter().map(Vec::len).collect();
    let mut remaining = total.min(cfg.budget);
    if sizes.contains(&0) {
        remaining = 0;
    }
    while remaining > 0 {
        remaining -= 1;
        families_checked += 1;
        let chosen: Vec<usize> = family.iter().enumerate().map(|(i, &k)| local_sections[i][k]).collect();
        let mut matching = Verdict::Proven;
        'pairs: for i in 0..n {
            for j in i + 1..n {
                let v = cache.tuples_equal(1 + n + i * n + j, &overlaps[&(i, j)], &candidates, chosen[i], chosen[j]);
                if v.is_refuted() {
                    matching = v;
                    break 'pairs;
                }
                matching = matching.and(v);
            }
        }
        if matching.holds() {
            let gluings: Vec<usize> = global_sections
                .iter()
                .copied()
                .filter(|&g| {
                    (0..n).all(|i| cache.tuples_equal(1 + i, legs[i], &candidates, g, chosen[i]).holds())
                })
                .collect();
            let mut classes: Vec<usize> = Vec::new();
            for &g in &gluings {
                let mut merged = false;
                for &h in &classes {
                    let v = cache.tuples_equal(0, &c.base, &candidates, g, h);
                    if v.holds() {
                        merged = true;
                        break;
                    }
                    if verdict.holds() {
                        verdict = v;
                    }
                }
                if !merged {
                    classes.push(g);
                }
            }
            if classes.is_empty() && verdict.holds() {
                verdict = verdict.and(Verdict::flagged(0, 0.0, Flag::IncompletePool));
            }
            let unique = classes.len() == 1;
            glue_instances.push(GlueInstance { family: chosen, glued: classes, unique });
        }
        for i in (0..n).rev() {
            family[i] += 1;
            if family[i] < sizes[i] {
                break;
            }
            family[i] = 0;
        }
    }
    if verdict.is_proven() && !glue_instances.is_empty() {
        verdict = Verdict::supported(families_checked, 0.0);
    }
    let complete = overflow.is_none() && (enumerated || !extra.is_empty());
    Ok(SheafCheckReport {
        candidates,
        local_sections,
        global_sections,
        families_checked,
        glue_instances,
        complete,
        overflow,
        equalizer_verdict: verdict,
    })
}

/// The structure-sheaf diagram `A → ∏ A{aᵢ⁻¹} ⇉ ∏ A{(aᵢaⱼ)⁻¹}` on a
/// finite list of elements of `A`.
pub fn structure_sheaf_check(c: &Cover, elements: &[SmoothTerm], cfg: &Config) -> Result<SheafCheckReport> {
    let pool: Vec<Vec<SmoothTerm>> = elements.iter().map(|e| vec![e.clone()]).collect();
    sheaf_check_representable(c, &Presentation::free(1), &pool, cfg)
}
