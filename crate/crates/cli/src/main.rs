use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use cinf_cli::{Format, Overrides, Report, SessionReport, Workspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Cmd {
    Batch,
    Parse,
    Eval,
    Jet,
    Localize,
    Coproduct,
    Coeq,
    Pushout,
    Flatten,
    Saturate,
    CoverMake,
    CoverCheck,
    CoverPullback,
    CoverCompose,
    SheafCheck,
    SpecSample,
    Phi,
    PhiMap,
    LocalCheck,
    EpiCheck,
    LexSuite,
    VnNormalize,
    VnCheck,
    Idem,
    StarHomCheck,
}

/// Checks on finitely presented C∞-rings, their covers and set models.
///
/// `cinf batch FILE` runs every form of FILE in order. Any other command
/// takes its arguments as S-expressions, e.g.
/// `cinf -w defs.cinf localize A '(var 0)'`.
///
/// Exit status: 0 when every verdict is Proven or NumericallySupported,
/// 1 when some verdict is Refuted, 2 on any error.
#[derive(Parser, Debug)]
#[command(name = "cinf", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Arguments of the command (for `batch`, the file path).
    args: Vec<String>,
    /// Definitions to load before running a single command.
    #[arg(short, long)]
    workspace: Option<PathBuf>,
    /// Seed for every sampling step; required by sampling commands.
    #[arg(long, env = "CINF_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "CINF_TOL", help = "Relative tolerance [default: 1e-9]")]
    tol: Option<f64>,
    #[arg(long, env = "CINF_SAMPLES", help = "Samples per numerical check [default: 64]")]
    samples: Option<usize>,
    #[arg(long, env = "CINF_NMAX", help = "Certificate search degree bound [default: 4]")]
    nmax: Option<u32>,
    #[arg(long, env = "CINF_BUDGET", help = "Enumeration budget [default: 10000]")]
    budget: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn session(cli: &Cli) -> SessionReport {
    let overrides =
        Overrides { seed: cli.seed, tol: cli.tol, samples: cli.samples, nmax: cli.nmax, budget: cli.budget };
    let mut ws = Workspace::new(overrides);
    let fail = |ws: &Workspace, what: &str, e: String| SessionReport::new(ws.config_summary(), vec![Report::failed(what, e)]);
    if let Some(path) = &cli.workspace {
        let src = match read(path) {
            Ok(s) => s,
            Err(e) => return fail(&ws, "(workspace)", e),
        };
        let forms = match cinf_cli::parse_source(&src) {
            Ok(f) => f,
            Err(e) => return fail(&ws, "(workspace)", e.to_string()),
        };
        for form in &forms {
            if let Err(e) = ws.define(form) {
                return fail(&ws, &form.to_string(), e.to_string());
            }
        }
    }
    if cli.command == Cmd::Batch {
        let [path] = cli.args.as_slice() else {
            return fail(&ws, "(batch)", "batch takes exactly one file".into());
        };
        return match read(&PathBuf::from(path)) {
            Ok(src) => ws.run_source(&src),
            Err(e) => fail(&ws, "(batch)", e),
        };
    }
    let name = cli.command.to_possible_value().expect("listed").get_name().to_string();
    let src = format!("({name} {})", cli.args.join(" "));
    match cinf_core::sexpr::read_one(&src).and_then(|s| cinf_cli::parse_form(&s)) {
        Ok(cinf_cli::Form::Command(c)) => {
            let report = ws.run(&c);
            SessionReport::new(ws.config_summary(), vec![report])
        }
        Ok(_) => unreachable!("command heads parse as commands"),
        Err(e) => fail(&ws, &src, e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = session(&cli);
    print!("{}", report.render(cli.format));
    ExitCode::from(report.exit_code as u8)
}
