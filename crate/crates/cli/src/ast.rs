//! Batch-file grammar.
//!
//! ```text
//! form  ::= (config [:seed U64] [:tol F] [:samples N] [:nmax N] [:budget N])
//!         | (ring NAME :arity N :rels (t ...))
//!         | (hom NAME :src NAME :dst NAME :comps (t ...) [:certs (cert ...)])
//!         | (cover NAME :base NAME :elems (t ...) [:unimod (t ...)])
//!         | (model NAME reals) | (model NAME prod K) | (model NAME jet :vars V :order K)
//!         | (COMMAND arg ...)
//! cert  ::= nil | (t ...)
//! model ::= NAME | (model reals) | (model prod K) | (model jet :vars V :order K)
//! map   ::= (proj K I) | (diag K M) | (perm (I ...)) | (map K (I ...)) | (then map map ...)
//! ```

use std::fmt;

use cinf_core::sexpr::{parse_term, parse_usize, read_all, ParseError, Pos, Sexp};
use cinf_core::vn::{parse_star_term, StarTerm};
use cinf_core::{ModelRing, SmoothTerm};

#[derive(Clone, Debug, PartialEq)]
pub enum Form {
    Config(ConfigForm),
    Ring { name: String, arity: usize, rels: Vec<SmoothTerm> },
    Hom { name: String, src: String, dst: String, comps: Vec<SmoothTerm>, certs: Option<Vec<Option<Vec<SmoothTerm>>>> },
    Cover { name: String, base: String, elems: Vec<SmoothTerm>, unimod: Option<Vec<SmoothTerm>> },
    Model { name: String, model: ModelRing },
    Command(Command),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigForm {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub nmax: Option<u32>,
    pub budget: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelRef {
    Name(String),
    Inline(ModelRing),
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapSpec {
    Proj { source: usize, index: usize },
    Diag { source: usize, copies: usize },
    Perm(Vec<usize>),
    Map { source: usize, indices: Vec<usize> },
    Then(Vec<MapSpec>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParseTarget {
    Form(Box<Form>),
    Term(SmoothTerm),
    StarTerm(StarTerm),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Parse(Option<ParseTarget>),
    Eval { term: SmoothTerm, point: Vec<f64> },
    Jet { term: SmoothTerm, point: Vec<f64>, order: usize },
    Localize { ring: String, element: SmoothTerm, name: Option<String> },
    Coproduct { left: String, right: String, name: Option<String> },
    Coeq { first: String, second: String, name: Option<String> },
    Pushout { first: String, second: String, name: Option<String> },
    Flatten { ring: String, a: SmoothTerm, b: SmoothTerm, denominator: Option<SmoothTerm> },
    Saturate { ring: String, a: SmoothTerm, s: SmoothTerm },
    CoverMake { ring: String, elems: Vec<SmoothTerm>, unimod: Option<Vec<SmoothTerm>>, name: Option<String> },
    CoverCheck { cover: String },
    CoverPullback { cover: String, hom: String, name: Option<String> },
    CoverCompose { cover: String, refinements: Vec<String>, name: Option<String> },
    SheafCheck { cover: String, target: String, extra: Vec<Vec<SmoothTerm>> },
    SpecSample { ring: String, elems: Vec<SmoothTerm> },
    Phi { model: ModelRef, ring: String },
    PhiMap { model: ModelRef, hom: String, point: Vec<Vec<f64>> },
    LocalCheck { model: ModelRef },
    EpiCheck { model: ModelRef, cover: String },
    LexSuite { model: ModelRef },
    VnNormalize { term: StarTerm },
    VnCheck { model: ModelRef },
    Idem { model: ModelRef, value: Vec<f64> },
    StarHomCheck { map: MapSpec },
}

pub const COMMANDS: [&str; 24] = [
    "parse",
    "eval",
    "jet",
    "localize",
    "coproduct",
    "coeq",
    "pushout",
    "flatten",
    "saturate",
    "cover-make",
    "cover-check",
    "cover-pullback",
    "cover-compose",
    "sheaf-check",
    "spec-sample",
    "phi",
    "phi-map",
    "local-check",
    "epi-check",
    "lex-suite",
    "vn-normalize",
    "vn-check",
    "idem",
    "star-hom-check",
];

const DEFINITIONS: [&str; 5] = ["config", "ring", "hom", "cover", "model"];

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Parse(_) => "parse",
            Command::Eval { .. } => "eval",
            Command::Jet { .. } => "jet",
            Command::Localize { .. } => "localize",
            Command::Coproduct { .. } => "coproduct",
            Command::Coeq { .. } => "coeq",
            Command::Pushout { .. } => "pushout",
            Command::Flatten { .. } => "flatten",
            Command::Saturate { .. } => "saturate",
            Command::CoverMake { .. } => "cover-make",
            Command::CoverCheck { .. } => "cover-check",
            Command::CoverPullback { .. } => "cover-pullback",
            Command::CoverCompose { .. } => "cover-compose",
            Command::SheafCheck { .. } => "sheaf-check",
            Command::SpecSample { .. } => "spec-sample",
            Command::Phi { .. } => "phi",
            Command::PhiMap { .. } => "phi-map",
            Command::LocalCheck { .. } => "local-check",
            Command::EpiCheck { .. } => "epi-check",
            Command::LexSuite { .. } => "lex-suite",
            Command::VnNormalize { .. } => "vn-normalize",
            Command::VnCheck { .. } => "vn-check",
            Command::Idem { .. } => "idem",
            Command::StarHomCheck { .. } => "star-hom-check",
        }
    }

    /// Whether the command draws random samples and therefore needs a seed.
    pub fn samples(&self) -> bool {
        !matches!(
            self,
            Command::Parse(_)
                | Command::Eval { .. }
                | Command::Jet { .. }
                | Command::Localize { .. }
                | Command::Coproduct { .. }
                | Command::Coeq { .. }
                | Command::VnNormalize { .. }
                | Command::Idem { .. }
                | Command::PhiMap { .. }
        )
    }
}

pub fn parse_source(src: &str) -> Result<Vec<Form>, ParseError> {
    read_all(src)?.iter().map(parse_form).collect()
}

pub fn parse_form(sexp: &Sexp) -> Result<Form, ParseError> {
    let mut expected: Vec<&str> = DEFINITIONS.to_vec();
    expected.extend(COMMANDS);
    let Some(head) = sexp.head() else {
        return Err(ParseError::syntax(sexp.pos(), &["form"], sexp.to_string()));
    };
    let items = sexp.as_list().expect("list");
    let args = Args::new(sexp, head, &items[1..]);
    match head {
        "config" => {
            let kw = args.keywords(0, &[":seed", ":tol", ":samples", ":nmax", ":budget"])?;
            Ok(Form::Config(ConfigForm {
                seed: kw.get(":seed").map(parse_number).transpose()?,
                tol: kw.get(":tol").map(parse_float).transpose()?,
                samples: kw.get(":samples").map(parse_number).transpose()?,
                nmax: kw.get(":nmax").map(parse_number).transpose()?,
                budget: kw.get(":budget").map(parse_number).transpose()?,
            }))
        }
        "ring" => {
            let name = args.name(0)?;
            let kw = args.keywords(1, &[":arity", ":rels"])?;
            Ok(Form::Ring { name, arity: parse_usize(kw.require(":arity")?)?, rels: parse_terms(kw.require(":rels")?)? })
        }
        "hom" => {
            let name = args.name(0)?;
            let kw = args.keywords(1, &[":src", ":dst", ":comps", ":certs"])?;
            Ok(Form::Hom {
                name,
                src: parse_name(kw.require(":src")?)?,
                dst: parse_name(kw.require(":dst")?)?,
                comps: parse_terms(kw.require(":comps")?)?,
                certs: kw.get(":certs").map(parse_certs).transpose()?,
            })
        }
        "cover" => {
            let name = args.name(0)?;
            let kw = args.keywords(1, &[":base", ":elems", ":unimod"])?;
            Ok(Form::Cover {
                name,
                base: parse_name(kw.require(":base")?)?,
                elems: parse_terms(kw.require(":elems")?)?,
                unimod: kw.get(":unimod").map(parse_terms).transpose()?,
            })
        }
        "model" => {
            let name = args.name(0)?;
            Ok(Form::Model { name, model: parse_model_body(sexp, &items[2..])? })
        }
        _ if COMMANDS.contains(&head) => Ok(Form::Command(parse_command(&args)?)),
        _ => Err(ParseError::syntax(sexp.pos(), &expected, head)),
    }
}

fn parse_command(args: &Args) -> Result<Command, ParseError> {
    Ok(match args.head {
        "parse" => {
            if args.items.is_empty() {
                Command::Parse(None)
            } else {
                args.exact(1)?;
                Command::Parse(Some(parse_target(&args.items[0])?))
            }
        }
        "eval" => {
            args.exact(2)?;
            Command::Eval { term: parse_term(&args.items[0])?, point: parse_floats(&args.items[1])? }
        }
        "jet" => {
            let kw = args.keywords(2, &[":order"])?;
            Command::Jet {
                term: parse_term(args.at(0)?)?,
                point: parse_floats(args.at(1)?)?,
                order: kw.get(":order").map(parse_usize).transpose()?.unwrap_or(1),
            }
        }
        "localize" => {
            let kw = args.keywords(2, &[":as"])?;
            Command::Localize { ring: args.name(0)?, element: parse_term(args.at(1)?)?, name: kw.name(":as")? }
        }
        "coproduct" => {
            let kw = args.keywords(2, &[":as"])?;
            Command::Coproduct { left: args.name(0)?, right: args.name(1)?, name: kw.name(":as")? }
        }
        "coeq" => {
            let kw = args.keywords(2, &[":as"])?;
            Command::Coeq { first: args.name(0)?, second: args.name(1)?, name: kw.name(":as")? }
        }
        "pushout" => {
            let kw = args.keywords(2, &[":as"])?;
            Command::Pushout { first: args.name(0)?, second: args.name(1)?, name: kw.name(":as")? }
        }
        "flatten" => {
            let kw = args.keywords(3, &[":denom"])?;
            Command::Flatten {
                ring: args.name(0)?,
                a: parse_term(args.at(1)?)?,
                b: parse_term(args.at(2)?)?,
                denominator: kw.get(":denom").map(parse_term).transpose()?,
            }
        }
        "saturate" => {
            args.exact(3)?;
            Command::Saturate { ring: args.name(0)?, a: parse_term(args.at(1)?)?, s: parse_term(args.at(2)?)? }
        }
        "cover-make" => {
            let kw = args.keywords(2, &[":unimod", ":as"])?;
            Command::CoverMake {
                ring: args.name(0)?,
                elems: parse_terms(args.at(1)?)?,
                unimod: kw.get(":unimod").map(parse_terms).transpose()?,
                name: kw.name(":as")?,
            }
        }
        "cover-check" => {
            args.exact(1)?;
            Command::CoverCheck { cover: args.name(0)? }
        }
        "cover-pullback" => {
            let kw = args.keywords(2, &[":as"])?;
            Command::CoverPullback { cover: args.name(0)?, hom: args.name(1)?, name: kw.name(":as")? }
        }
        "cover-compose" => {
            let kw = args.keywords(2, &[":as"])?;
            Command::CoverCompose {
                cover: args.name(0)?,
                refinements: list(args.at(1)?)?.iter().map(parse_name).collect::<Result<_, _>>()?,
                name: kw.name(":as")?,
            }
        }
        "sheaf-check" => {
            let kw = args.keywords(2, &[":extra"])?;
            Command::SheafCheck {
                cover: args.name(0)?,
                target: args.name(1)?,
                extra: match kw.get(":extra") {
                    Some(s) => list(s)?.iter().map(parse_terms).collect::<Result<_, _>>()?,
                    None => Vec::new(),
                },
            }
        }
        "spec-sample" => {
            args.exact(2)?;
            Command::SpecSample { ring: args.name(0)?, elems: parse_terms(args.at(1)?)? }
        }
        "phi" => {
            args.exact(2)?;
            Command::Phi { model: parse_model_ref(args.at(0)?)?, ring: args.name(1)? }
        }
        "phi-map" => {
            args.exact(3)?;
            Command::PhiMap {
                model: parse_model_ref(args.at(0)?)?,
                hom: args.name(1)?,
                point: list(args.at(2)?)?.iter().map(parse_floats).collect::<Result<_, _>>()?,
            }
        }
        "local-check" | "lex-suite" | "vn-check" => {
            args.exact(1)?;
            let model = parse_model_ref(args.at(0)?)?;
            match args.head {
                "local-check" => Command::LocalCheck { model },
                "lex-suite" => Command::LexSuite { model },
                _ => Command::VnCheck { model },
            }
        }
        "epi-check" => {
            args.exact(2)?;
            Command::EpiCheck { model: parse_model_ref(args.at(0)?)?, cover: args.name(1)? }
        }
        "vn-normalize" => {
            args.exact(1)?;
            Command::VnNormalize { term: parse_star_term(args.at(0)?)? }
        }
        "idem" => {
            args.exact(2)?;
            Command::Idem { model: parse_model_ref(args.at(0)?)?, value: parse_floats(args.at(1)?)? }
        }
        "star-hom-check" => {
            args.exact(1)?;
            Command::StarHomCheck { map: parse_map(args.at(0)?)? }
        }
        other => unreachable!("unlisted command {other}"),
    })
}

fn parse_target(sexp: &Sexp) -> Result<ParseTarget, ParseError> {
    match sexp.head() {
        Some(h) if DEFINITIONS.contains(&h) || COMMANDS.contains(&h) => Ok(ParseTarget::Form(Box::new(parse_form(sexp)?))),
        Some("star") => Ok(ParseTarget::StarTerm(parse_star_term(sexp)?)),
        _ => match parse_term(sexp) {
            Ok(t) => Ok(ParseTarget::Term(t)),
            Err(e) => match parse_star_term(sexp) {
                Ok(t) => Ok(ParseTarget::StarTerm(t)),
                Err(_) => Err(e),
            },
        },
    }
}

struct Args<'a> {
    sexp: &'a Sexp,
    head: &'a str,
    items: &'a [Sexp],
}

struct Keywords<'a> {
    at: Pos,
    pairs: Vec<(&'a str, &'a Sexp)>,
}

impl<'a> Args<'a> {
    fn new(sexp: &'a Sexp, head: &'a str, items: &'a [Sexp]) -> Self {
        Args { sexp, head, items }
    }

    fn exact(&self, n: usize) -> Result<(), ParseError> {
        if self.items.len() != n {
            return Err(ParseError::arity(self.sexp.pos(), self.head, n, self.items.len()));
        }
        Ok(())
    }

    fn at(&self, i: usize) -> Result<&'a Sexp, ParseError> {
        self.items.get(i).ok_or_else(|| ParseError::arity(self.sexp.pos(), self.head, i + 1, self.items.len()))
    }

    fn name(&self, i: usize) -> Result<String, ParseError> {
        parse_name(self.at(i)?)
    }

    /// Positional arguments `0..start`, then `:key value` pairs.
    fn keywords(&self, start: usize, allowed: &[&str]) -> Result<Keywords<'a>, ParseError> {
        if self.items.len() < start {
            return Err(ParseError::arity(self.sexp.pos(), self.head, start, self.items.len()));
        }
        let mut pairs = Vec::new();
        let mut rest = &self.items[start..];
        while let [key, tail @ ..] = rest {
            let k = key.as_atom().filter(|k| allowed.contains(k));
            let Some(k) = k else {
                return Err(ParseError::syntax(key.pos(), allowed, key.to_string()));
            };
            if pairs.iter().any(|(p, _)| *p == k) {
                return Err(ParseError::syntax(key.pos(), &["distinct keywords"], k));
            }
            let Some(value) = tail.first() else {
                return Err(ParseError::syntax(key.pos(), &["value"], "end of form"));
            };
            pairs.push((k, value));
            rest = &tail[1..];
        }
        Ok(Keywords { at: self.sexp.pos(), pairs })
    }
}

impl<'a> Keywords<'a> {
    fn get(&self, key: &str) -> Option<&'a Sexp> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn require(&self, key: &str) -> Result<&'a Sexp, ParseError> {
        self.get(key).ok_or_else(|| ParseError::syntax(self.at, &[key], "missing keyword"))
    }

    fn name(&self, key: &str) -> Result<Option<String>, ParseError> {
        self.get(key).map(parse_name).transpose()
    }
}

fn list(sexp: &Sexp) -> Result<&[Sexp], ParseError> {
    sexp.as_list().ok_or_else(|| ParseError::syntax(sexp.pos(), &["list"], sexp.to_string()))
}

fn is_name(text: &str) -> bool {
    !text.starts_with(':') && text != "nil" && text.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
}

fn parse_name(sexp: &Sexp) -> Result<String, ParseError> {
    match sexp.as_atom() {
        Some(t) if is_name(t) => Ok(t.to_string()),
        _ => Err(ParseError::syntax(sexp.pos(), &["NAME"], sexp.to_string())),
    }
}

fn parse_number<T: std::str::FromStr>(sexp: &Sexp) -> Result<T, ParseError> {
    sexp.as_atom()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| ParseError::syntax(sexp.pos(), &["integer"], sexp.to_string()))
}

fn parse_float(sexp: &Sexp) -> Result<f64, ParseError> {
    sexp.as_atom()
        .and_then(|t| t.parse::<f64>().ok())
        .filter(|x| x.is_finite())
        .ok_or_else(|| ParseError::syntax(sexp.pos(), &["FLOAT"], sexp.to_string()))
}

fn parse_floats(sexp: &Sexp) -> Result<Vec<f64>, ParseError> {
    list(sexp)?.iter().map(parse_float).collect()
}

fn parse_terms(sexp: &Sexp) -> Result<Vec<SmoothTerm>, ParseError> {
    list(sexp)?.iter().map(parse_term).collect()
}

fn parse_certs(sexp: &Sexp) -> Result<Vec<Option<Vec<SmoothTerm>>>, ParseError> {
    list(sexp)?
        .iter()
        .map(|c| if c.as_atom() == Some("nil") { Ok(None) } else { parse_terms(c).map(Some) })
        .collect()
}

fn parse_model_body(sexp: &Sexp, body: &[Sexp]) -> Result<ModelRing, ParseError> {
    let kinds = ["reals", "prod", "jet"];
    let Some(kind) = body.first() else {
        return Err(ParseError::syntax(sexp.pos(), &kinds, "end of form"));
    };
    match (kind.as_atom(), &body[1..]) {
        (Some("reals"), []) => Ok(ModelRing::Reals),
        (Some("prod"), [k]) => Ok(ModelRing::ProductOfReals(parse_usize(k)?)),
        (Some("jet"), rest) => {
            let args = Args::new(sexp, "jet", rest);
            let kw = args.keywords(0, &[":vars", ":order"])?;
            Ok(ModelRing::JetAlgebra { vars: parse_usize(kw.require(":vars")?)?, order: parse_usize(kw.require(":order")?)? })
        }
        (Some(k @ ("reals" | "prod")), rest) => {
            Err(ParseError::arity(sexp.pos(), k, usize::from(k == "prod"), rest.len()))
        }
        _ => Err(ParseError::syntax(kind.pos(), &kinds, kind.to_string())),
    }
}

fn parse_model_ref(sexp: &Sexp) -> Result<ModelRef, ParseError> {
    match sexp.head() {
        Some("model") => Ok(ModelRef::Inline(parse_model_body(sexp, &sexp.as_list().expect("list")[1..])?)),
        _ => parse_name(sexp).map(ModelRef::Name),
    }
}

fn parse_map(sexp: &Sexp) -> Result<MapSpec, ParseError> {
    let heads = ["proj", "diag", "perm", "map", "then"];
    let Some(head) = sexp.head().filter(|h| heads.contains(h)) else {
        return Err(ParseError::syntax(sexp.pos(), &heads, sexp.to_string()));
    };
    let items = &sexp.as_list().expect("list")[1..];
    let args = Args::new(sexp, head, items);
    let indices = |s: &Sexp| list(s)?.iter().map(parse_usize).collect::<Result<Vec<_>, _>>();
    Ok(match head {
        "proj" => {
            args.exact(2)?;
            MapSpec::Proj { source: parse_usize(&items[0])?, index: parse_usize(&items[1])? }
        }
        "diag" => {
            args.exact(2)?;
            MapSpec::Diag { source: parse_usize(&items[0])?, copies: parse_usize(&items[1])? }
        }
        "perm" => {
            args.exact(1)?;
            MapSpec::Perm(indices(&items[0])?)
        }
        "map" => {
            args.exact(2)?;
            MapSpec::Map { source: parse_usize(&items[0])?, indices: indices(&items[1])? }
        }
        _ => {
            if items.is_empty() {
                return Err(ParseError::arity(sexp.pos(), head, 1, 0));
            }
            MapSpec::Then(items.iter().map(parse_map).collect::<Result<_, _>>()?)
        }
    })
}

struct Seq<'a, T>(&'a [T]);

impl<T: fmt::Display> fmt::Display for Seq<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Floats print with the shortest representation that reads back exactly.
struct Floats<'a>(&'a [f64]);

impl fmt::Display for Floats<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x:?}")?;
        }
        f.write_str(")")
    }
}

fn write_as(f: &mut fmt::Formatter<'_>, name: &Option<String>) -> fmt::Result {
    match name {
        Some(n) => write!(f, " :as {n}"),
        None => Ok(()),
    }
}

pub fn model_body(m: &ModelRing) -> String {
    match m {
        ModelRing::Reals => "reals".to_string(),
        ModelRing::ProductOfReals(k) => format!("prod {k}"),
        ModelRing::JetAlgebra { vars, order } => format!("jet :vars {vars} :order {order}"),
    }
}

impl fmt::Display for ModelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelRef::Name(n) => f.write_str(n),
            ModelRef::Inline(m) => write!(f, "(model {})", model_body(m)),
        }
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::Proj { source, index } => write!(f, "(proj {source} {index})"),
            MapSpec::Diag { source, copies } => write!(f, "(diag {source} {copies})"),
            MapSpec::Perm(p) => write!(f, "(perm {})", Seq(p)),
            MapSpec::Map { source, indices } => write!(f, "(map {source} {})", Seq(indices)),
            MapSpec::Then(maps) => {
                f.write_str("(then")?;
                for m in maps {
                    write!(f, " {m}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for ParseTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseTarget::Form(form) => write!(f, "{form}"),
            ParseTarget::Term(t) => write!(f, "{t}"),
            ParseTarget::StarTerm(t) => write!(f, "{t}"),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Config(c) => {
                f.write_str("(config")?;
                if let Some(s) = c.seed {
                    write!(f, " :seed {s}")?;
                }
                if let Some(t) = c.tol {
                    write!(f, " :tol {t:?}")?;
                }
                if let Some(s) = c.samples {
                    write!(f, " :samples {s}")?;
                }
                if let Some(n) = c.nmax {
                    write!(f, " :nmax {n}")?;
                }
                if let Some(b) = c.budget {
                    write!(f, " :budget {b}")?;
                }
                f.write_str(")")
            }
            Form::Ring { name, arity, rels } => write!(f, "(ring {name} :arity {arity} :rels {})", Seq(rels)),
            Form::Hom { name, src, dst, comps, certs } => {
                write!(f, "(hom {name} :src {src} :dst {dst} :comps {}", Seq(comps))?;
                if let Some(certs) = certs {
                    f.write_str(" :certs (")?;
                    for (i, c) in certs.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" ")?;
                        }
                        match c {
                            Some(c) => write!(f, "{}", Seq(c))?,
                            None => f.write_str("nil")?,
                        }
                    }
                    f.write_str(")")?;
                }
                f.write_str(")")
            }
            Form::Cover { name, base, elems, unimod } => {
                write!(f, "(cover {name} :base {base} :elems {}", Seq(elems))?;
                if let Some(u) = unimod {
                    write!(f, " :unimod {}", Seq(u))?;
                }
                f.write_str(")")
            }
            Form::Model { name, model } => write!(f, "(model {name} {})", model_body(model)),
            Form::Command(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name())?;
        match self {
            Command::Parse(None) => {}
            Command::Parse(Some(t)) => write!(f, " {t}")?,
            Command::Eval { term, point } => write!(f, " {term} {}", Floats(point))?,
            Command::Jet { term, point, order } => write!(f, " {term} {} :order {order}", Floats(point))?,
            Command::Localize { ring, element, name } => {
                write!(f, " {ring} {element}")?;
                write_as(f, name)?;
            }
            Command::Coproduct { left: a, right: b, name }
            | Command::Coeq { first: a, second: b, name }
            | Command::Pushout { first: a, second: b, name } => {
                write!(f, " {a} {b}")?;
                write_as(f, name)?;
            }
            Command::Flatten { ring, a, b, denominator } => {
                write!(f, " {ring} {a} {b}")?;
                if let Some(d) = denominator {
                    write!(f, " :denom {d}")?;
                }
            }
            Command::Saturate { ring, a, s } => write!(f, " {ring} {a} {s}")?,
            Command::CoverMake { ring, elems, unimod, name } => {
                write!(f, " {ring} {}", Seq(elems))?;
                if let Some(u) = unimod {
                    write!(f, " :unimod {}", Seq(u))?;
                }
                write_as(f, name)?;
            }
            Command::CoverCheck { cover } => write!(f, " {cover}")?,
            Command::CoverPullback { cover, hom, name } => {
                write!(f, " {cover} {hom}")?;
                write_as(f, name)?;
            }
            Command::CoverCompose { cover, refinements, name } => {
                write!(f, " {cover} {}", Seq(refinements))?;
                write_as(f, name)?;
            }
            Command::SheafCheck { cover, target, extra } => {
                write!(f, " {cover} {target}")?;
                if !extra.is_empty() {
                    f.write_str(" :extra (")?;
                    for (i, e) in extra.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" ")?;
                        }
                        write!(f, "{}", Seq(e))?;
                    }
                    f.write_str(")")?;
                }
            }
            Command::SpecSample { ring, elems } => write!(f, " {ring} {}", Seq(elems))?,
            Command::Phi { model, ring } => write!(f, " {model} {ring}")?,
            Command::PhiMap { model, hom, point } => {
                write!(f, " {model} {hom} (")?;
                for (i, y) in point.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{}", Floats(y))?;
                }
                f.write_str(")")?;
            }
            Command::LocalCheck { model } | Command::LexSuite { model } | Command::VnCheck { model } => {
                write!(f, " {model}")?
            }
            Command::EpiCheck { model, cover } => write!(f, " {model} {cover}")?,
            Command::VnNormalize { term } => write!(f, " {term}")?,
            Command::Idem { model, value } => write!(f, " {model} {}", Floats(value))?,
            Command::StarHomCheck { map } => write!(f, " {map}")?,
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(src: &str) -> Form {
        let forms = parse_source(src).unwrap();
        assert_eq!(forms.len(), 1);
        let again = parse_source(&forms[0].to_string()).unwrap();
        assert_eq!(again, forms);
        forms.into_iter().next().unwrap()
    }

    #[test]
    fn definitions() {
        let f = round_trip("(ring A :arity 2 :rels ((add (mul (var 0)(var 1)) (neg (const 1)))))");
        assert!(matches!(f, Form::Ring { arity: 2, .. }));
        round_trip("(ring T :arity 0 :rels ((const 1)))");
        round_trip("(hom g :src A :dst B :comps ((var 0)) :certs (nil ((const 1))))");
        let c = round_trip("(cover C :base A :elems ((var 0) (add (const 1) (neg (var 0)))))");
        assert!(matches!(c, Form::Cover { unimod: None, .. }));
        round_trip("(model J jet :vars 1 :order 2)");
        round_trip("(config :seed 7 :tol 1e-9 :samples 32)");
    }

    #[test]
    fn commands() {
        round_trip("(localize A (var 0))");
        round_trip("(vn-normalize (mul (var 0) (mul (star (var 0)) (var 0))))");
        round_trip("(star-hom-check (then (diag 1 2) (perm (1 0)) (proj 2 0)))");
        round_trip("(phi-map (model prod 2) g ((1 2) (3 4.5)))");
        round_trip("(sheaf-check C B :extra (((const 1)) ((const -1))))");
        round_trip("(parse (star (var 0)))");
        round_trip("(parse (ring A :arity 1 :rels ()))");
        round_trip("(parse)");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_source("(ring A\n  :arty 2)").unwrap_err();
        assert_eq!(e, ParseError::syntax(Pos { line: 2, column: 3 }, &[":arity", ":rels"], ":arty"));
        assert!(matches!(parse_source("(cover-check)"), Err(ParseError::Arity { expected: 1, found: 0, .. })));
        assert!(matches!(parse_source("(frobnicate A)"), Err(ParseError::Syntax { .. })));
    }
}
