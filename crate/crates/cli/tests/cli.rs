use std::path::PathBuf;
use std::process::{Command, Output};

use cinf_cli::ast::{parse_source, ConfigForm, Form, MapSpec, ModelRef};
use cinf_cli::{Outcome, Overrides, Workspace};
use cinf_core::generate::random_term;
use cinf_core::vn::random_star_term;
use cinf_core::{Config, ModelRing, Primitive, SmoothTerm};
use proptest::prelude::*;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn cinf(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cinf"));
    for var in ["CINF_SEED", "CINF_TOL", "CINF_SAMPLES", "CINF_NMAX", "CINF_BUDGET"] {
        cmd.env_remove(var);
    }
    cmd.args(args).envs(env.iter().copied()).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes_follow_verdicts() {
    let ok = cinf(&["--seed", "1", "vn-check", "(model prod 3)"], &[]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let refuted = cinf(&["--seed", "1", "local-check", "(model prod 2)"], &[]);
    assert_eq!(refuted.status.code(), Some(1));
    assert!(stdout(&refuted).contains("witness=[1.0, 0.0]"));
    let error = cinf(&["eval", "(var 1)", "(0.5)"], &[]);
    assert_eq!(error.status.code(), Some(2));
    let syntax = cinf(&["vn-normalize", "(strar (var 0))"], &[]);
    assert_eq!(syntax.status.code(), Some(2));
    assert!(stdout(&syntax).contains("syntax error at 1:15"), "{}", stdout(&syntax));
}

#[test]
fn sampling_commands_need_a_seed() {
    let o = cinf(&["vn-check", "(model reals)"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("needs a seed"));
    assert_eq!(cinf(&["vn-check", "(model reals)"], &[("CINF_SEED", "4")]).status.code(), Some(0));
    assert_eq!(cinf(&["vn-normalize", "(star (const 0))"], &[]).status.code(), Some(0));
}

#[test]
fn flags_and_environment_set_the_config() {
    let env = [("CINF_SEED", "9"), ("CINF_SAMPLES", "7"), ("CINF_NMAX", "2")];
    let o = cinf(&["--format", "structured", "--budget", "50", "parse"], &env);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"], serde_json::json!({"seed": 9, "tol": 1e-9, "samples": 7, "nmax": 2, "budget": 50}));
    let o = cinf(&["--seed", "3", "--format", "structured", "parse"], &env);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["seed"], 3);
}

#[test]
fn workspace_files_feed_single_commands() {
    let ws = data("regression.cinf");
    let o = cinf(&["-w", ws.to_str().unwrap(), "localize", "A", "(var 0)"], &[]);
    assert_eq!(o.status.code(), Some(2), "commands are not definitions");
    let dir = std::env::temp_dir().join(format!("cinf-ws-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let defs = dir.join("defs.cinf");
    std::fs::write(&defs, "(config :seed 2)\n(ring A :arity 2 :rels ((add (mul (var 0)(var 1)) (neg (const 1)))))\n").unwrap();
    let o = cinf(&["-w", defs.to_str().unwrap(), "localize", "A", "(var 0)"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(ring A.loc :arity 3"));
    let o = cinf(&["-w", defs.to_str().unwrap(), "cover-check", "A"], &[]);
    assert!(stdout(&o).contains("`A` is a ring, expected a cover"));
}

#[test]
fn batch_errors_are_reported_in_place() {
    let mut ws = Workspace::new(Overrides { seed: Some(1), ..Default::default() });
    let src = "(ring R :arity 1 :rels ())
        (localize R (var 0) :as Rx)
        (localize R (add (const 1) (neg (var 0))) :as Ry)
        (cover-make R ((var 0) (add (const 1) (neg (var 0)))) :as D)
        (cover-make Rx ((const 1)) :as Lx)
        (cover-make Ry ((const 1)) :as Ly)
        (cover-compose D (Ly Lx))
        (cover-compose D (Lx Ly))
        (ring R :arity 2 :rels ())
        (phi Nope R)
        (config :seed 3)";
    let s = ws.run_source(src);
    let errors: Vec<&str> = s.reports.iter().filter_map(|r| r.error.as_deref()).collect();
    assert_eq!(
        errors,
        [
            "refinement 0 is not a cover of the expected localization",
            "ring `R` is already bound",
            "unknown model `Nope`",
            "config forms must precede every other form",
        ]
    );
    assert_eq!(s.outcome, Outcome::Error);
    assert_eq!(s.exit_code, 2);
}

#[test]
fn declared_covers_search_at_check_time() {
    let mut ws = Workspace::new(Overrides { seed: Some(1), ..Default::default() });
    let s = ws.run_source(
        "(ring S1 :arity 2 :rels ((add (add (mul (var 0) (var 0)) (mul (var 1) (var 1))) (const -1))))
         (cover E :base S1 :elems ((var 0) (var 1)))
         (cover-check E)",
    );
    let r = &s.reports[0];
    assert_eq!(r.result["certificate"], serde_json::json!(["(var 0)", "(var 1)", "(const -1)"]));
    assert_eq!(s.exit_code, 0);
}

fn term(seed: u64, arity: usize) -> SmoothTerm {
    random_term(&mut Config::with_seed(seed).rng("cli-term"), arity, 3, &Primitive::ALL)
}

fn forms_from_seed(seed: u64) -> Vec<Form> {
    let t = |k: u64| term(seed.wrapping_add(k), 2);
    let st = random_star_term(&mut Config::with_seed(seed).rng("cli-star"), 2, 3, &Primitive::ALL);
    vec![
        Form::Config(ConfigForm { seed: Some(seed), tol: Some(1e-7), samples: Some(16), nmax: None, budget: Some(99) }),
        Form::Ring { name: "A".into(), arity: 2, rels: vec![t(1), t(2)] },
        Form::Hom { name: "g".into(), src: "A".into(), dst: "A".into(), comps: vec![t(3), t(4)], certs: Some(vec![None, Some(vec![t(5), t(6)])]) },
        Form::Cover { name: "C".into(), base: "A".into(), elems: vec![t(7)], unimod: Some(vec![t(8)]) },
        Form::Model { name: "M".into(), model: ModelRing::JetAlgebra { vars: 2, order: 3 } },
        Form::Command(cinf_cli::Command::VnNormalize { term: st }),
        Form::Command(cinf_cli::Command::Jet { term: t(9), point: vec![0.1, -2.5e-3], order: 2 }),
        Form::Command(cinf_cli::Command::PhiMap { model: ModelRef::Inline(ModelRing::ProductOfReals(2)), hom: "g".into(), point: vec![vec![1.0, 2.0]] }),
        Form::Command(cinf_cli::Command::StarHomCheck { map: MapSpec::Then(vec![MapSpec::Diag { source: 2, copies: 2 }, MapSpec::Map { source: 4, indices: vec![3, 0] }]) }),
        Form::Command(cinf_cli::Command::SheafCheck { cover: "C".into(), target: "A".into(), extra: vec![vec![t(10), t(11)]] }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_forms_parse_back(seed in any::<u64>()) {
        let forms = forms_from_seed(seed);
        let text: String = forms.iter().map(|f| format!("{f}\n")).collect();
        let parsed = parse_source(&text).unwrap();
        prop_assert_eq!(&parsed, &forms);
        let again: String = parsed.iter().map(|f| format!("{f}\n")).collect();
        prop_assert_eq!(again, text);
    }
}
