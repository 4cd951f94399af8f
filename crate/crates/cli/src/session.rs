use indexmap::IndexMap;
use serde_json::{json, Value};
use thiserror::Error;

use cinf_core::ring::{coequalizer, coproduct, flatten_localization, localize, pushout, saturation_member};
use cinf_core::sexpr::ParseError;
use cinf_core::site::{compose_covers, make_cover, pullback_cover, sheaf_check_representable, spec_sample};
use cinf_core::vn::{derived_laws, idempotent_of, star_hom_check, star_normalize, vn_check, CoordinateMap};
use cinf_core::{
    eval, jet_eval, models, Config, Cover, IdealCertificate, JetLayout, ModelRing, Morphism, Presentation, SmoothTerm,
    Verdict, VnModel,
};

use crate::ast::{model_body, Command, ConfigForm, Form, MapSpec, ModelRef, ParseTarget};
use crate::report::{Report, SessionReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("`{name}` is a {found}, expected a {expected}")]
    KindMismatch { name: String, expected: &'static str, found: &'static str },
    #[error("{kind} `{name}` is already bound")]
    Duplicate { kind: &'static str, name: String },
    #[error("`{0}` samples and needs a seed (--seed, CINF_SEED or a config form)")]
    SeedRequired(&'static str),
    #[error("config forms must precede every other form")]
    LateConfig,
    #[error("workspace files hold definitions only; `{0}` belongs in a batch file")]
    CommandInWorkspace(&'static str),
    #[error(transparent)]
    Core(#[from] cinf_core::Error),
}

/// Command-line overrides; `None` defers to the workspace file, then to
/// the defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub nmax: Option<u32>,
    pub budget: Option<usize>,
}

struct HomEntry {
    src: String,
    dst: String,
    hom: Morphism,
}

enum CoverEntry {
    Declared { base: String, elems: Vec<SmoothTerm>, unimod: Option<Vec<SmoothTerm>> },
    Built { base: String, cover: Cover },
}

#[derive(Default)]
pub struct Workspace {
    overrides: Overrides,
    file: ConfigForm,
    frozen: bool,
    rings: IndexMap<String, Presentation>,
    homs: IndexMap<String, HomEntry>,
    covers: IndexMap<String, CoverEntry>,
    models: IndexMap<String, ModelRing>,
}

impl Workspace {
    pub fn new(overrides: Overrides) -> Self {
        Workspace { overrides, ..Default::default() }
    }

    pub fn seed(&self) -> Option<u64> {
        self.overrides.seed.or(self.file.seed)
    }

    fn config_or_default(&self) -> Config {
        let mut cfg = Config::with_seed(self.seed().unwrap_or(0));
        cfg.tol = self.overrides.tol.or(self.file.tol).unwrap_or(cfg.tol);
        cfg.samples = self.overrides.samples.or(self.file.samples).unwrap_or(cfg.samples);
        cfg.nmax = self.overrides.nmax.or(self.file.nmax).unwrap_or(cfg.nmax);
        cfg.budget = self.overrides.budget.or(self.file.budget).unwrap_or(cfg.budget);
        cfg
    }

    pub fn config_summary(&self) -> IndexMap<String, Value> {
        let cfg = self.config_or_default();
        let mut m = IndexMap::new();
        m.insert("seed".into(), json!(self.seed()));
        m.insert("tol".into(), json!(cfg.tol));
        m.insert("samples".into(), json!(cfg.samples));
        m.insert("nmax".into(), json!(cfg.nmax));
        m.insert("budget".into(), json!(cfg.budget));
        m
    }

    fn kind_of(&self, name: &str) -> Option<&'static str> {
        if self.rings.contains_key(name) {
            Some("ring")
        } else if self.homs.contains_key(name) {
            Some("hom")
        } else if self.covers.contains_key(name) {
            Some("cover")
        } else if self.models.contains_key(name) {
            Some("model")
        } else {
            None
        }
    }

    fn missing(&self, name: &str, kind: &'static str) -> CliError {
        match self.kind_of(name) {
            Some(found) => CliError::KindMismatch { name: name.to_string(), expected: kind, found },
            None => CliError::UnknownName { kind, name: name.to_string() },
        }
    }

    fn ring(&self, name: &str) -> Result<&Presentation, CliError> {
        self.rings.get(name).ok_or_else(|| self.missing(name, "ring"))
    }

    fn hom(&self, name: &str) -> Result<&HomEntry, CliError> {
        self.homs.get(name).ok_or_else(|| self.missing(name, "hom"))
    }

    fn model(&self, m: &ModelRef) -> Result<ModelRing, CliError> {
        match m {
            ModelRef::Inline(m) => Ok(*m),
            ModelRef::Name(n) => self.models.get(n).copied().ok_or_else(|| self.missing(n, "model")),
        }
    }

    /// Builds a declared cover on first use; a failed build is reported
    /// and retried next time.
    fn cover(&mut self, name: &str, cfg: &Config) -> Result<(String, Cover), CliError> {
        let entry = self.covers.get(name).ok_or_else(|| self.missing(name, "cover"))?;
        let (base, cover) = match entry {
            CoverEntry::Built { base, cover } => return Ok((base.clone(), cover.clone())),
            CoverEntry::Declared { base, elems, unimod } => {
                let ring = self.ring(base)?;
                (base.clone(), make_cover(ring, elems.clone(), unimod.clone(), cfg)?)
            }
        };
        self.covers.insert(name.to_string(), CoverEntry::Built { base: base.clone(), cover: cover.clone() });
        Ok((base, cover))
    }

    fn check_free<T>(map: &IndexMap<String, T>, kind: &'static str, name: &str) -> Result<(), CliError> {
        if map.contains_key(name) {
            return Err(CliError::Duplicate { kind, name: name.to_string() });
        }
        Ok(())
    }

    fn fresh<T>(map: &IndexMap<String, T>, base: String) -> String {
        if !map.contains_key(&base) {
            return base;
        }
        (2..).map(|k| format!("{base}.{k}")).find(|n| !map.contains_key(n)).expect("unbounded")
    }

    fn bind_ring(&mut self, name: &str, ring: Presentation) -> Result<(), CliError> {
        Self::check_free(&self.rings, "ring", name)?;
        self.rings.insert(name.to_string(), ring.named(name));
        Ok(())
    }

    fn bind_hom(&mut self, name: &str, src: &str, dst: &str, hom: Morphism) -> Result<(), CliError> {
        Self::check_free(&self.homs, "hom", name)?;
        self.homs.insert(name.to_string(), HomEntry { src: src.to_string(), dst: dst.to_string(), hom });
        Ok(())
    }

    fn bind_cover(&mut self, name: &str, entry: CoverEntry) -> Result<(), CliError> {
        Self::check_free(&self.covers, "cover", name)?;
        self.covers.insert(name.to_string(), entry);
        Ok(())
    }

    /// Applies a definition form. Commands are rejected.
    pub fn define(&mut self, form: &Form) -> Result<(), CliError> {
        match form {
            Form::Config(c) => {
                if self.frozen {
                    return Err(CliError::LateConfig);
                }
                let merge = |a: &mut ConfigForm, b: &ConfigForm| {
                    a.seed = b.seed.or(a.seed);
                    a.tol = b.tol.or(a.tol);
                    a.samples = b.samples.or(a.samples);
                    a.nmax = b.nmax.or(a.nmax);
                    a.budget = b.budget.or(a.budget);
                };
                merge(&mut self.file, c);
                return Ok(());
            }
            Form::Ring { name, arity, rels } => {
                let ring = Presentation::new(*arity, rels.clone())?;
                self.bind_ring(name, ring)?;
            }
            Form::Hom { name, src, dst, comps, certs } => {
                let source = self.ring(src)?.clone();
                let target = self.ring(dst)?.clone();
                let certs = certs
                    .as_ref()
                    .map(|cs| cs.iter().map(|c| c.clone().map(IdealCertificate::new)).collect())
                    .unwrap_or_default();
                let hom = Morphism::new(&source, &target, comps.clone(), certs)?;
                self.bind_hom(name, src, dst, hom)?;
            }
            Form::Cover { name, base, elems, unimod } => {
                self.ring(base)?;
                let entry = CoverEntry::Declared { base: base.clone(), elems: elems.clone(), unimod: unimod.clone() };
                self.bind_cover(name, entry)?;
            }
            Form::Model { name, model } => {
                Self::check_free(&self.models, "model", name)?;
                self.models.insert(name.clone(), *model);
            }
            Form::Command(c) => return Err(CliError::CommandInWorkspace(c.name())),
        }
        self.frozen = true;
        Ok(())
    }

    /// Runs every form in order. Definitions are echoed only when they
    /// fail; a syntax error stops the session.
    pub fn run_source(&mut self, src: &str) -> SessionReport {
        let forms = match crate::ast::parse_source(src) {
            Ok(forms) => forms,
            Err(e) => return SessionReport::new(self.config_summary(), vec![Report::failed("(batch)", e)]),
        };
        let mut reports = Vec::new();
        for form in &forms {
            match form {
                Form::Command(c) => reports.push(self.run(c)),
                _ => {
                    if let Err(e) = self.define(form) {
                        reports.push(Report::failed(form.to_string(), e));
                    }
                }
            }
        }
        SessionReport::new(self.config_summary(), reports)
    }

    pub fn run(&mut self, command: &Command) -> Report {
        self.frozen = true;
        let echo = command.to_string();
        let mut report = Report::new(echo.clone());
        match self.dispatch(command, &mut report) {
            Ok(()) => report,
            Err(CliError::Core(cinf_core::Error::CertificateRefuted { witness })) => {
                report.field("refuted", "common zero of the family", "common zero of the family");
                report.verdict(&Verdict::refuted(witness, 0.0));
                report
            }
            Err(e) => Report::failed(echo, e),
        }
    }

    fn sampling_config(&self, command: &Command) -> Result<Config, CliError> {
        if command.samples() && self.seed().is_none() {
            return Err(CliError::SeedRequired(command.name()));
        }
        Ok(self.config_or_default())
    }

    fn dispatch(&mut self, command: &Command, r: &mut Report) -> Result<(), CliError> {
        let cfg = self.sampling_config(command)?;
        match command {
            Command::Parse(None) => {
                let rings: Vec<String> = self.rings.values().map(|p| p.to_string()).collect();
                let homs: Vec<String> = self.homs.iter().map(|(n, h)| hom_form(n, h)).collect();
                let covers: Vec<String> = self.covers.iter().map(|(n, c)| cover_form(n, c)).collect();
                let models: Vec<String> =
                    self.models.iter().map(|(n, m)| format!("(model {n} {})", model_body(m))).collect();
                for (key, forms) in [("rings", rings), ("homs", homs), ("covers", covers), ("models", models)] {
                    r.summary.extend(forms.iter().cloned());
                    r.result.insert(key.into(), json!(forms));
                }
            }
            Command::Parse(Some(t)) => {
                let kind = match t {
                    ParseTarget::Form(_) => "form",
                    ParseTarget::Term(_) => "term",
                    ParseTarget::StarTerm(_) => "star-term",
                };
                r.field("kind", kind, kind);
                r.field("canonical", t.to_string(), t);
                if let ParseTarget::Term(term) = t {
                    r.field("arity", term.arity(), term.arity());
                }
            }
            Command::Eval { term, point } => {
                let v = eval(term, point)?;
                r.field("value", v, v);
            }
            Command::Jet { term, point, order } => {
                let j = jet_eval(term, point, *order)?;
                let layout = JetLayout::new(point.len(), *order);
                let coeffs: Vec<Value> = layout
                    .multi_indices()
                    .iter()
                    .zip(j.coeffs())
                    .map(|(alpha, c)| json!({"alpha": alpha, "coeff": c}))
                    .collect();
                r.field("value", j.value(), j.value());
                r.field("gradient", j.gradient(), format!("{:?}", j.gradient()));
                r.data("coefficients", coeffs);
            }
            Command::Localize { ring, element, name } => {
                let base = self.ring(ring)?.clone();
                let loc = localize(&base, element)?;
                let name = name.clone().unwrap_or_else(|| Self::fresh(&self.rings, format!("{ring}.loc")));
                self.bind_ring(&name, loc.object.clone())?;
                let eta = format!("{name}.eta");
                self.bind_hom(&eta, ring, &name, loc.eta.clone())?;
                let form = self.rings[&name].to_string();
                r.field("object", named(&name, &form), form);
                let form = hom_form(&eta, &self.homs[&eta]);
                r.field("eta", named(&eta, &form), form);
                r.field("inverse_var", loc.inverse_var(), loc.inverse_var());
            }
            Command::Coproduct { left, right, name } => {
                let c = coproduct(self.ring(left)?, self.ring(right)?);
                let name = name.clone().unwrap_or_else(|| Self::fresh(&self.rings, format!("{left}+{right}")));
                self.bind_ring(&name, c.object)?;
                self.bind_hom(&format!("{name}.left"), left, &name, c.left)?;
                self.bind_hom(&format!("{name}.right"), right, &name, c.right)?;
                let form = self.rings[&name].to_string();
                r.field("object", named(&name, &form), form);
                for side in ["left", "right"] {
                    let h = format!("{name}.{side}");
                    let form = hom_form(&h, &self.homs[&h]);
                    r.field(side, named(&h, &form), form);
                }
            }
            Command::Coeq { first, second, name } => {
                let (f, g) = (self.hom(first)?, self.hom(second)?);
                let c = coequalizer(&f.hom, &g.hom)?;
                let dst = f.dst.clone();
                let name = name.clone().unwrap_or_else(|| Self::fresh(&self.rings, format!("{first}.coeq")));
                self.bind_ring(&name, c.object)?;
                let q = format!("{name}.q");
                self.bind_hom(&q, &dst, &name, c.quotient)?;
                let form = self.rings[&name].to_string();
                r.field("object", named(&name, &form), form);
                let form = hom_form(&q, &self.homs[&q]);
                r.field("quotient", named(&q, &form), form);
            }
            Command::Pushout { first, second, name } => {
                let (f, g) = (self.hom(first)?, self.hom(second)?);
                let (fd, gd) = (f.dst.clone(), g.dst.clone());
                let p = pushout(&f.hom, &g.hom, &cfg)?;
                let name = name.clone().unwrap_or_else(|| Self::fresh(&self.rings, format!("{first}.po")));
                self.bind_ring(&name, p.object)?;
                self.bind_hom(&format!("{name}.left"), &fd, &name, p.left)?;
                self.bind_hom(&format!("{name}.right"), &gd, &name, p.right)?;
                let form = self.rings[&name].to_string();
                r.field("object", named(&name, &form), form);
                for side in ["left", "right"] {
                    let h = format!("{name}.{side}");
                    let form = hom_form(&h, &self.homs[&h]);
                    r.field(side, named(&h, &form), form);
                }
                r.verdict(&p.commutes);
            }
            Command::Flatten { ring, a, b, denominator } => {
                let fl = flatten_localization(self.ring(ring)?, a, b, denominator.as_ref(), &cfg)?;
                r.field("iterated", fl.iterated.to_string(), &fl.iterated);
                r.field("single", fl.single.to_string(), &fl.single);
                r.field("theta", fl.theta.to_string(), &fl.theta);
                r.field("theta_inv", fl.theta_inv.to_string(), &fl.theta_inv);
                r.field("round_trip", fl.round_trip.report(), &fl.round_trip);
                r.field("triangle", fl.triangle.report(), &fl.triangle);
                r.verdict(&fl.round_trip.clone().and(fl.triangle.clone()));
            }
            Command::Saturate { ring, a, s } => {
                let sat = saturation_member(self.ring(ring)?, a, s, &cfg)?;
                r.field("localized", sat.localized.to_string(), &sat.localized);
                let inv = sat.inverse.as_ref().map(|t| t.to_string());
                r.field("inverse", &inv, inv.as_deref().unwrap_or("none"));
                if let Some(c) = &sat.certificate {
                    r.field("certificate", terms(&c.multipliers), show_terms(&c.multipliers));
                }
                r.verdict(&sat.verdict);
            }
            Command::CoverMake { ring, elems, unimod, name } => {
                let base = self.ring(ring)?;
                let cover = make_cover(base, elems.clone(), unimod.clone(), &cfg)?;
                let name = name.clone().unwrap_or_else(|| Self::fresh(&self.covers, format!("{ring}.cover")));
                describe_cover(r, &name, &cover);
                r.verdict(cover.verdict());
                self.bind_cover(&name, CoverEntry::Built { base: ring.clone(), cover })?;
            }
            Command::CoverCheck { cover } => {
                let (_, c) = self.cover(cover, &cfg)?;
                describe_cover(r, cover, &c);
                r.verdict(&c.check(&cfg)?);
            }
            Command::CoverPullback { cover, hom, name } => {
                let (_, c) = self.cover(cover, &cfg)?;
                let h = self.hom(hom)?;
                let dst = h.dst.clone();
                let p = pullback_cover(&c, &h.hom, &cfg)?;
                let name = name.clone().unwrap_or_else(|| Self::fresh(&self.covers, format!("{cover}.pb")));
                describe_cover(r, &name, &p.cover);
                let squares: Vec<_> = p.squares.iter().map(|s| s.commutes.report()).collect();
                r.data("squares", squares);
                r.verdict(&Verdict::all(
                    std::iter::once(p.cover.verdict().clone()).chain(p.squares.iter().map(|s| s.commutes.clone())),
                ));
                self.bind_cover(&name, CoverEntry::Built { base: dst, cover: p.cover })?;
            }
            Command::CoverCompose { cover, refinements, name } => {
                let (base, c) = self.cover(cover, &cfg)?;
                let refs = refinements.iter().map(|d| Ok(self.cover(d, &cfg)?.1)).collect::<Result<Vec<_>, CliError>>()?;
                let composed = compose_covers(&c, &refs, &cfg)?;
                let name = name.clone().unwrap_or_else(|| Self::fresh(&self.covers, format!("{cover}.comp")));
                describe_cover(r, &name, &composed);
                r.verdict(composed.verdict());
                self.bind_cover(&name, CoverEntry::Built { base, cover: composed })?;
            }
            Command::SheafCheck { cover, target, extra } => {
                let (_, c) = self.cover(cover, &cfg)?;
                let report = sheaf_check_representable(&c, self.ring(target)?, extra, &cfg)?;
                r.field("families_checked", report.families_checked, report.families_checked);
                r.field("complete", report.complete, report.complete);
                r.data("sheaf", &report);
                r.verdict(&report.equalizer_verdict);
            }
            Command::SpecSample { ring, elems } => {
                let s = spec_sample(self.ring(ring)?, elems, &cfg)?;
                r.field("points", s.points.len(), s.points.len());
                r.field("covered", s.covered, s.covered);
                r.field("likely_trivial", s.likely_trivial, s.likely_trivial);
                r.data("uncovered", &s.uncovered);
                r.result.insert("sample".into(), serde_json::to_value(&s).expect("serializable"));
                r.verdict(&s.verdict);
            }
            Command::Phi { model, ring } => {
                let m = self.model(model)?;
                let phi = models::phi_object(&m, self.ring(ring)?, &cfg);
                r.field("model", m, m);
                r.field("complete", phi.complete, phi.complete);
                match &phi.solutions {
                    Some(s) => {
                        r.field("count", s.len(), s.len());
                        r.data("solutions", s);
                    }
                    None => {
                        r.field("count", Value::Null, "not enumerable");
                    }
                }
            }
            Command::PhiMap { model, hom, point } => {
                let m = self.model(model)?;
                let image = models::phi_morphism(&m, &self.hom(hom)?.hom, point)?;
                r.data("image", image);
            }
            Command::LocalCheck { model } => {
                let m = self.model(model)?;
                r.field("model", m, m);
                r.verdict(&models::is_local(&m, cfg.samples, &cfg));
            }
            Command::EpiCheck { model, cover } => {
                let m = self.model(model)?;
                let (_, c) = self.cover(cover, &cfg)?;
                r.field("model", m, m);
                r.verdict(&models::epi_family_check(&m, &c, &cfg)?);
            }
            Command::LexSuite { model } => {
                let m = self.model(model)?;
                let lex = models::left_exactness_suite(&m, &cfg);
                r.field("checks", lex.checks.len(), lex.checks.len());
                for c in &lex.checks {
                    r.summary.push(format!("{} {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail));
                }
                r.result.insert("suite".into(), serde_json::to_value(&lex).expect("serializable"));
                let failures = lex.failures().count();
                r.verdict(&if failures == 0 {
                    Verdict::supported(lex.checks.len(), 0.0)
                } else {
                    Verdict::refuted(Vec::new(), failures as f64)
                });
            }
            Command::VnNormalize { term } => {
                let n = star_normalize(term);
                r.field("normal_form", n.to_string(), &n);
            }
            Command::VnCheck { model } => {
                let m = self.model(model)?;
                r.field("model", m, m);
                if let Ok(vm) = VnModel::new(m) {
                    let laws = derived_laws(&vm, cfg.samples, &cfg);
                    r.field("double_star_failures", laws.double_star_failures, laws.double_star_failures);
                    r.field("idempotent_failures", laws.idempotent_failures, laws.idempotent_failures);
                }
                r.verdict(&vn_check(&m, cfg.samples, &cfg));
            }
            Command::Idem { model, value } => {
                let vm = VnModel::new(self.model(model)?)?;
                if value.len() != vm.dim() {
                    return Err(cinf_core::Error::CarrierShape { expected: vm.dim(), given: value.len() }.into());
                }
                let e = idempotent_of(&vm, value);
                r.field("idempotent", &e, format!("{e:?}"));
            }
            Command::StarHomCheck { map } => {
                let h = coordinate_map(map)?;
                r.field("source_dim", h.source_dim, h.source_dim);
                r.field("indices", &h.indices, format!("{:?}", h.indices));
                r.verdict(&star_hom_check(&h, cfg.samples, &cfg));
            }
        }
        Ok(())
    }
}

fn coordinate_map(m: &MapSpec) -> Result<CoordinateMap, CliError> {
    Ok(match m {
        MapSpec::Proj { source, index } => CoordinateMap::projection(*source, *index)?,
        MapSpec::Diag { source, copies } => CoordinateMap::diagonal(*source, *copies),
        MapSpec::Perm(p) => CoordinateMap::permutation(p.clone())?,
        MapSpec::Map { source, indices } => CoordinateMap::new(*source, indices.clone())?,
        MapSpec::Then(maps) => {
            let mut it = maps.iter();
            let first = coordinate_map(it.next().expect("non-empty"))?;
            it.try_fold(first, |acc, next| Ok::<_, CliError>(acc.then(&coordinate_map(next)?)?))?
        }
    })
}

fn named(name: &str, form: &str) -> Value {
    json!({"name": name, "form": form})
}

fn terms(ts: &[SmoothTerm]) -> Vec<String> {
    ts.iter().map(|t| t.to_string()).collect()
}

fn show_terms(ts: &[SmoothTerm]) -> String {
    format!("({})", terms(ts).join(" "))
}

fn describe_cover(r: &mut Report, name: &str, c: &Cover) {
    r.field("cover", name, name);
    r.field("base", c.base().to_string(), c.base());
    r.field("elements", terms(c.elements()), show_terms(c.elements()));
    match c.certificate() {
        Some(cert) => r.field("certificate", terms(&cert.multipliers), show_terms(&cert.multipliers)),
        None => r.field("certificate", Value::Null, "none (accepted geometrically)"),
    };
}

fn hom_form(name: &str, h: &HomEntry) -> String {
    let comps = show_terms(h.hom.components());
    let certs: Vec<String> = h
        .hom
        .certificates()
        .iter()
        .map(|c| c.as_ref().map_or("nil".to_string(), |c| show_terms(&c.multipliers)))
        .collect();
    format!("(hom {name} :src {} :dst {} :comps {comps} :certs ({}))", h.src, h.dst, certs.join(" "))
}

fn cover_form(name: &str, c: &CoverEntry) -> String {
    match c {
        CoverEntry::Declared { base, elems, unimod } => {
            let u = unimod.as_ref().map(|u| format!(" :unimod {}", show_terms(u))).unwrap_or_default();
            format!("(cover {name} :base {base} :elems {}{u})", show_terms(elems))
        }
        CoverEntry::Built { base, cover } => {
            let u = cover.certificate().map(|c| format!(" :unimod {}", show_terms(&c.multipliers))).unwrap_or_default();
            format!("(cover {name} :base {base} :elems {}{u})", show_terms(cover.elements()))
        }
    }
}
