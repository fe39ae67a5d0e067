//! `so3five`: classify coframe models, emit catalog examples, check the
//! twistor CR structures and run the self-test.
//!
//! Exit codes: 0 success, 1 input error (I/O, schema, Jacobi, arguments),
//! 2 structure not nearly integrable. `selftest` exits 1 when any check
//! fails.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use so3five::catalog::{self, Params};
use so3five::connection::nearly_integrable;
use so3five::io::{model_from_value, model_to_value};
use so3five::report::{classify, decompose_torsion, CatalogOrigin};
use so3five::scalar::tolerance_from_env;
use so3five::twistor::{cr_residuals, predicted_integrable, sample_points, CrStructure, Twistor};
use so3five::validation::{acceptance, invariants, Config, Criterion};
use so3five::{Error, Model};

/// Number of fiber points at which float residuals are sampled.
const CR_SAMPLES: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "so3five", version, about = "Irreducible SO(3) structures in dimension five")]
struct Cli {
    /// Tolerance for float comparisons; overrides SO3FIVE_TOL.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a model: torsion, curvature, Ricci, spinors.
    Classify {
        /// Model JSON file.
        file: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// List catalog entries or emit one as model JSON.
    ///
    /// Forms: `catalog list`, `catalog build NAME --param k=v ...`,
    /// `catalog NAME --k v ...`.
    Catalog {
        /// Print `list` output as JSON.
        #[arg(long)]
        json: bool,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "ARGS")]
        args: Vec<String>,
    },
    /// Integrability residuals of the CR structures on the twistor space.
    Cr {
        /// Model JSON file.
        file: PathBuf,
        /// Restrict to one structure.
        #[arg(long, value_enum)]
        structure: Option<StructureArg>,
        /// Seed of the sample points for float residuals.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Split the intrinsic torsion of a model.
    DecomposeTorsion {
        /// Model JSON file.
        file: PathBuf,
    },
    /// Run the invariant suite and the acceptance table.
    Selftest {
        /// Seed of every randomized check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StructureArg {
    J0,
    J0m,
    Jm,
    Jmm,
}

impl From<StructureArg> for CrStructure {
    fn from(s: StructureArg) -> Self {
        match s {
            StructureArg::J0 => CrStructure::J0,
            StructureArg::J0m => CrStructure::J0m,
            StructureArg::Jm => CrStructure::Jm,
            StructureArg::Jmm => CrStructure::Jmm,
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure {
            code: 1,
            msg: msg.into(),
        }
    }

    fn not_nearly_integrable(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::input(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = cli.tol.unwrap_or_else(tolerance_from_env);
    if !(tol.is_finite() && tol > 0.0) {
        eprintln!("error: tolerance must be positive, got {}", tol);
        return ExitCode::from(1);
    }
    let result = match cli.command {
        Command::Classify { file, json } => cmd_classify(&file, json, tol),
        Command::Catalog { json, args } => cmd_catalog(&args, json, tol),
        Command::Cr {
            file,
            structure,
            seed,
        } => cmd_cr(&file, structure.map(Into::into), seed, tol),
        Command::DecomposeTorsion { file } => cmd_decompose_torsion(&file, tol),
        Command::Selftest { seed } => cmd_selftest(seed, tol),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn read_model(path: &Path) -> Result<(Model, Option<CatalogOrigin>), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {}", path.display(), e)))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: invalid JSON: {}", path.display(), e)))?;
    let model = model_from_value(&v)?;
    let origin = CatalogOrigin::from_model_value(&v)?;
    Ok((model, origin))
}

/// Jacobi failures are input errors; a structure that is not nearly
/// integrable exits with code 2.
fn require_nearly_integrable(model: &Model, tol: f64) -> CliResult {
    model.check_jacobi(tol)?;
    let ni = nearly_integrable(model, tol)?;
    if !ni.flag {
        return Err(Failure::not_nearly_integrable(format!(
            "{} is not nearly integrable: Υ′ residual {:e}, remainder {:e}",
            model.name(),
            ni.prime_residual,
            ni.remainder_residual
        )));
    }
    Ok(())
}

fn pipeline_failure(e: Error) -> Failure {
    match e {
        Error::Structure(msg) => Failure::not_nearly_integrable(msg),
        other => other.into(),
    }
}

/// Writes to stdout. A closed pipe (as with `| head`) ends output quietly.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: cannot write output: {}", e);
        }
    }
}

fn print_json<S: serde::Serialize + ?Sized>(v: &S) {
    emit(&format!("{}\n", serde_json::to_string_pretty(v).expect("report serializes")));
}

fn cmd_classify(path: &Path, as_json: bool, tol: f64) -> CliResult {
    let (model, origin) = read_model(path)?;
    require_nearly_integrable(&model, tol)?;
    let report = classify(&model, tol, origin.as_ref()).map_err(pipeline_failure)?;
    if as_json {
        print_json(&report);
    } else {
        emit(&report.to_text());
    }
    Ok(())
}

fn cmd_catalog(args: &[String], as_json: bool, tol: f64) -> CliResult {
    match args.first().map(String::as_str) {
        None | Some("list") => {
            let rest = args.get(1..).unwrap_or_default();
            let as_json = match rest {
                [] => as_json,
                [flag] if flag == "--json" => true,
                _ => return Err(Failure::input("catalog list takes only --json")),
            };
            catalog_list(as_json);
            Ok(())
        }
        Some("build") => {
            let name = args
                .get(1)
                .ok_or_else(|| Failure::input("catalog build needs an entry name"))?;
            catalog_build(name, &args[2..], tol)
        }
        Some(name) => catalog_build(name, &args[1..], tol),
    }
}

fn catalog_list(as_json: bool) {
    let entries = catalog::entries();
    if as_json {
        let v: Vec<Value> = entries
            .iter()
            .map(|e| {
                json!({
                    "name": e.name,
                    "summary": e.summary,
                    "symmetry_dim": e.symmetry_dim,
                    "params": e.params,
                })
            })
            .collect();
        print_json(&v);
        return;
    }
    let mut text = String::new();
    for e in entries {
        let _ = writeln!(text, "{:<14}{}", e.name, e.summary);
        for p in e.params {
            let _ = writeln!(text, "{:<14}  --{} (default {}, {})", "", p.name, p.default, p.range);
        }
    }
    emit(&text);
}

/// Accepts `--param k=v`, `--k=v` and `--k v`.
fn parse_param_args(args: &[String]) -> Result<Vec<String>, Failure> {
    let mut pairs = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let Some(flag) = a.strip_prefix("--") else {
            return Err(Failure::input(format!("unexpected argument {:?}", a)));
        };
        if flag == "param" {
            let kv = it
                .next()
                .ok_or_else(|| Failure::input("--param needs k=v"))?;
            pairs.push(kv.clone());
        } else if flag.contains('=') {
            pairs.push(flag.to_string());
        } else {
            let v = it
                .next()
                .ok_or_else(|| Failure::input(format!("--{} needs a value", flag)))?;
            pairs.push(format!("{}={}", flag, v));
        }
    }
    Ok(pairs)
}

fn catalog_build(name: &str, rest: &[String], tol: f64) -> CliResult {
    let entry = catalog::entry(name)?;
    let pairs = parse_param_args(rest)?;
    let params: Params = catalog::parse_params(pairs.iter().map(String::as_str))?;
    let model = entry.build(&params, tol)?;
    let mut v = model_to_value(&model);
    v["catalog"] = CatalogOrigin { entry, params }.to_value();
    print_json(&v);
    Ok(())
}

fn cmd_cr(path: &Path, only: Option<CrStructure>, seed: u64, tol: f64) -> CliResult {
    let (model, _) = read_model(path)?;
    require_nearly_integrable(&model, tol)?;
    let tw = Twistor::new(&model, tol).map_err(pipeline_failure)?;
    let points = sample_points(seed, CR_SAMPLES);
    let structures: Vec<CrStructure> = match only {
        Some(s) => vec![s],
        None => CrStructure::ALL.to_vec(),
    };
    let mut out = Vec::new();
    for s in structures {
        let report = cr_residuals(&tw, s, &points, tol)?;
        let predicted = predicted_integrable(&model, s, tol)?;
        out.push(json!({
            "structure": s.to_string(),
            "ideal": report.ideal,
            "residuals": report.residuals,
            "integrable": report.integrable,
            "predicted": predicted,
            "agree": predicted == report.integrable,
        }));
    }
    print_json(&json!({
        "name": model.name(),
        "tol": tol,
        "seed": seed,
        "sample_points": CR_SAMPLES,
        "structures": out,
    }));
    Ok(())
}

fn cmd_decompose_torsion(path: &Path, tol: f64) -> CliResult {
    let (model, _) = read_model(path)?;
    let report = decompose_torsion(&model, tol)?;
    print_json(&report);
    if !report.nearly_integrable.flag {
        return Err(Failure::not_nearly_integrable(format!(
            "{} is not nearly integrable",
            model.name()
        )));
    }
    Ok(())
}

fn cmd_selftest(seed: u64, tol: f64) -> CliResult {
    let cfg = Config { seed, tol };
    emit(&format!("seed {} tol {:e}\n", seed, tol));
    let mut failed = 0;
    for (heading, run) in [
        ("invariants", invariants as fn(&Config) -> Vec<Criterion>),
        ("acceptance", acceptance),
    ] {
        emit(&format!("{}\n", heading));
        for c in run(&cfg) {
            emit(&format!("{}\n", c.summary()));
            if !c.pass() {
                failed += 1;
            }
        }
    }
    if failed > 0 {
        return Err(Failure::input(format!("{} criteria failed", failed)));
    }
    emit("all checks passed\n");
    Ok(())
}
