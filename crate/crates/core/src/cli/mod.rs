//! Command-line front end. Exit codes: 0 pass, 1 a check failed, 2 bad input.

mod config;
mod emit;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

pub use config::RunConfig;
pub use emit::{emit, parse_csv, EmitKind};

use crate::error::{Error, Result};
use crate::parallelisms::{distinctness_witness, partition_failure_witness, Gamma, Parallelism};
use crate::projective::OrientedLine;
use crate::report::to_json;
use crate::sampling::{mixed_line, rng};
use crate::solve::logspace;
use crate::spreads::{validate_profile, Handedness, ValidationPlan};
use crate::verify::{check_clifford, check_d_function, check_parallelism, check_reflection, check_spread, CheckReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Probe lines tried by `distinct`.
const DISTINCT_PROBES: usize = 20;

#[derive(Parser, Debug)]
#[command(
    name = "spreadlab",
    version,
    about = "Rotational spreads and oriented parallelisms of real projective 3-space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Profile checks.
    Profile {
        #[command(subcommand)]
        action: ProfileAction,
    },
    /// Rotational spreads.
    Spread {
        #[command(subcommand)]
        action: SpreadAction,
    },
    /// Parallelisms generated by rotating a spread.
    Parallelism {
        #[command(subcommand)]
        action: ParallelismAction,
    },
    /// Comparison with the Clifford parallelism.
    Clifford {
        #[command(subcommand)]
        action: CliffordAction,
    },
    /// Counterexample witnesses.
    Witness {
        #[command(subcommand)]
        action: WitnessAction,
    },
    /// Search for a line whose classes differ between two parallelisms.
    Distinct {
        #[command(flatten)]
        common: Common,
        /// Profile or configuration of the second parallelism.
        #[arg(long)]
        other: PathBuf,
    },
    /// CSV plot data.
    Emit {
        #[command(subcommand)]
        action: EmitAction,
    },
    /// Run the command named in a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum ProfileAction {
    /// Monotonicity, limits, disjoint branches, covering and injectivity of d.
    Validate(Common),
}

#[derive(Subcommand, Debug)]
enum SpreadAction {
    /// Axis, line at infinity and sample regulus lines.
    Build(Common),
    /// Covering, disjointness, distance function and reflection suites.
    Check(Common),
}

#[derive(Subcommand, Debug)]
enum ParallelismAction {
    /// Canonical profile and structural flags.
    Build(Common),
    /// Classification round trips; fails with a witness if classes overlap.
    Check(Common),
    /// Class of given or sampled lines.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Oriented line as six comma-separated Plücker coordinates. Repeatable;
        /// without it `--samples` lines are drawn.
        #[arg(long, allow_hyphen_values = true)]
        line: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum CliffordAction {
    /// Agreement of classes with one side of the Clifford parallelism.
    Compare(Common),
}

#[derive(Subcommand, Debug)]
enum WitnessAction {
    /// A line lying in two unoriented classes.
    Acentric(Common),
}

#[derive(Subcommand, Debug)]
enum EmitAction {
    /// Hyperbola branches: r,z,x.
    Curves(Common),
    /// Distance function: r,d.
    Dtable(Common),
    /// Class axes with member lines.
    Classes(Common),
}

// Flags shared by every subcommand; each overrides the configuration file.
#[derive(Args, Debug, Clone)]
struct Common {
    /// Bare profile JSON or a full configuration.
    #[arg(long)]
    profile: PathBuf,
    /// `right`, `left`, `1` or `-1`.
    #[arg(long, value_parser = parse_handedness, allow_hyphen_values = true)]
    handedness: Option<Handedness>,
    /// Placement scale in `z ↦ s z + t`.
    #[arg(long)]
    s: Option<f64>,
    /// Placement shift in `z ↦ s z + t`.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// `SO2` or `O2`.
    #[arg(long, value_parser = parse_gamma)]
    gamma: Option<Gamma>,
    #[arg(long, overrides_with = "no_oriented")]
    oriented: bool,
    /// Use unoriented lines.
    #[arg(long)]
    no_oriented: bool,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_handedness(s: &str) -> std::result::Result<Handedness, String> {
    match s.to_ascii_lowercase().as_str() {
        "right" | "1" | "+1" => Ok(Handedness::Right),
        "left" | "-1" => Ok(Handedness::Left),
        _ => Err(format!("expected right, left, 1 or -1, got {s:?}")),
    }
}

fn parse_gamma(s: &str) -> std::result::Result<Gamma, String> {
    match s.to_ascii_uppercase().as_str() {
        "SO2" => Ok(Gamma::So2),
        "O2" => Ok(Gamma::O2),
        _ => Err(format!("expected SO2 or O2, got {s:?}")),
    }
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.profile)?;
        if let Some(h) = self.handedness {
            cfg.handedness = h;
        }
        if let Some(s) = self.s {
            cfg.placement.s = s;
        }
        if let Some(t) = self.t {
            cfg.placement.t = t;
        }
        if let Some(g) = self.gamma {
            cfg.gamma = g;
        }
        if self.no_oriented {
            cfg.oriented = false;
        } else if self.oriented {
            cfg.oriented = true;
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.output.is_some() {
            cfg.output = self.output.clone();
        }
        cfg.validate().map_err(|e| match e {
            Error::Config(m) => Error::Config(m),
            e => Error::Config(e.to_string()),
        })?;
        Ok(cfg)
    }
}

/// What a subcommand does once its configuration is resolved.
#[derive(Clone, Debug, PartialEq)]
pub enum Task {
    ProfileValidate,
    SpreadBuild,
    SpreadCheck,
    ParallelismBuild,
    ParallelismCheck,
    ParallelismClassify(Vec<OrientedLine>),
    CliffordCompare,
    WitnessAcentric,
    Distinct,
    Emit(EmitKind),
}

impl Task {
    /// Parses the `command` field of a configuration.
    pub fn parse(command: &str) -> Result<Self> {
        let words: Vec<&str> = command.split_whitespace().collect();
        Ok(match words.as_slice() {
            ["profile", "validate"] => Task::ProfileValidate,
            ["spread", "build"] => Task::SpreadBuild,
            ["spread", "check"] => Task::SpreadCheck,
            ["parallelism", "build"] => Task::ParallelismBuild,
            ["parallelism", "check"] => Task::ParallelismCheck,
            ["parallelism", "classify"] => Task::ParallelismClassify(Vec::new()),
            ["clifford", "compare"] => Task::CliffordCompare,
            ["witness", "acentric"] => Task::WitnessAcentric,
            ["distinct"] => Task::Distinct,
            ["emit", "curves"] => Task::Emit(EmitKind::Curves),
            ["emit", "dtable"] => Task::Emit(EmitKind::Dtable),
            ["emit", "classes"] => Task::Emit(EmitKind::Classes),
            _ => return Err(Error::Config(format!("unknown command {command:?}"))),
        })
    }
}

/// Rendered output of a task.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub text: String,
    pub summary: String,
}

#[derive(Serialize)]
struct Suite<'a> {
    command: &'a str,
    pass: bool,
    reports: &'a [CheckReport],
}

fn suite(command: &str, reports: &[CheckReport]) -> Outcome {
    let pass = reports.iter().all(|r| r.pass);
    let text = to_json(&Suite { command, pass, reports }).expect("reports serialize");
    let names: Vec<String> =
        reports.iter().map(|r| format!("{} {}", r.name, if r.pass { "pass" } else { "FAIL" })).collect();
    Outcome { pass, text, summary: names.join(", ") }
}

fn document(pass: bool, value: Value, summary: String) -> Outcome {
    Outcome { pass, text: to_json(&value).expect("values serialize"), summary }
}

fn parallelism(cfg: &RunConfig) -> Result<Parallelism> {
    Parallelism::new(cfg.parallelism_spec())
}

/// Runs a task; `Err` means invalid input.
pub fn execute(task: &Task, cfg: &RunConfig) -> Result<Outcome> {
    let (n, seed, tol) = (cfg.samples, cfg.seed, &cfg.tol);
    Ok(match task {
        Task::ProfileValidate => {
            let plan = ValidationPlan { seed, ..ValidationPlan::default() };
            let spread = cfg.spread()?;
            let rep = validate_profile(spread.profile(), &plan);
            let pass = rep.pass();
            let failed: Vec<&str> = rep.entries.iter().filter(|e| !e.pass).map(|e| e.name.as_str()).collect();
            let summary = if pass { "profile valid".into() } else { format!("failed: {}", failed.join(", ")) };
            document(pass, json!({ "command": "profile validate", "pass": pass, "report": rep }), summary)
        }
        Task::SpreadBuild => {
            let spread = cfg.spread()?;
            let mut members = Vec::new();
            for r in logspace(1e-2, 1e2, 5) {
                for k in 0..4 {
                    let phi = std::f64::consts::FRAC_PI_2 * k as f64;
                    members.push(json!({ "r": r, "phi": phi, "line": spread.regulus_line(r, phi) }));
                }
            }
            let value = json!({
                "command": "spread build",
                "profile": spread.profile(),
                "handedness": spread.handedness(),
                "screw": spread.screw(),
                "axis": spread.z_plus(),
                "line_at_infinity": spread.v_plus(),
                "regulus_lines": members,
            });
            document(true, value, format!("{} spread, screw {:+}", spread.profile().label(), spread.screw()))
        }
        Task::SpreadCheck => {
            let spread = cfg.spread()?;
            suite(
                "spread check",
                &[
                    check_spread(&spread, n, n, seed, tol),
                    check_d_function(spread.profile(), &logspace(1e-3, 1e3, n.clamp(2, 200)), tol),
                    check_reflection(&spread, n.min(100), seed, tol),
                ],
            )
        }
        Task::ParallelismBuild => {
            let par = parallelism(cfg)?;
            let value = json!({
                "command": "parallelism build",
                "spec": par.spec(),
                "canonical_profile": par.canonical_profile(),
                "oriented": par.is_oriented(),
                "acentric": par.is_acentric(),
                "max_abs_b": par.max_abs_b(),
                "half_turn_symmetric": par.is_half_turn_symmetric(),
                "base_class": par.class_id_of_rotation(&crate::clifford::Quaternion::ONE),
            });
            document(
                true,
                value,
                format!("{} parallelism, acentric {}", par.canonical_profile().label(), par.is_acentric()),
            )
        }
        Task::ParallelismCheck => suite("parallelism check", &[check_parallelism(&parallelism(cfg)?, n, seed, tol)]),
        Task::ParallelismClassify(given) => {
            let par = parallelism(cfg)?;
            let lines = if given.is_empty() {
                let mut g = rng(seed);
                (0..n).map(|k| mixed_line(&mut g, k)).collect()
            } else {
                given.clone()
            };
            let mut failures = 0;
            let rows: Vec<Value> = lines
                .iter()
                .map(|l| match par.parallel_class_of(l) {
                    Ok(c) => json!({ "line": l, "class": c.id, "residual": c.residual }),
                    Err(e) => {
                        failures += 1;
                        json!({ "line": l, "error": e.to_string() })
                    }
                })
                .collect();
            let pass = failures == 0;
            let value = json!({ "command": "parallelism classify", "pass": pass, "classified": rows });
            document(pass, value, format!("{} of {} lines classified", lines.len() - failures, lines.len()))
        }
        Task::CliffordCompare => suite("clifford compare", &[check_clifford(&parallelism(cfg)?, n, seed, tol)]),
        Task::WitnessAcentric => match partition_failure_witness(&parallelism(cfg)?) {
            Ok(w) => {
                let summary = format!("axis lies in classes {:?} and {:?}", w.class_a.axis, w.class_b.axis);
                document(true, json!({ "command": "witness acentric", "pass": true, "witness": w }), summary)
            }
            Err(Error::NotAcentric) => document(
                false,
                json!({ "command": "witness acentric", "pass": false, "witness": null, "reason": Error::NotAcentric.to_string() }),
                "no witness: canonical b vanishes".into(),
            ),
            Err(e) => return Err(e),
        },
        Task::Distinct => {
            let other =
                cfg.other.as_deref().ok_or_else(|| Error::Config("distinct needs a second configuration".into()))?;
            let (a, b) = (parallelism(cfg)?, parallelism(other)?);
            let w = distinctness_witness(&a, &b, DISTINCT_PROBES, seed)?;
            let pass = w.is_some();
            let summary = if pass { "parallelisms differ".into() } else { "no distinguishing line found".into() };
            document(
                pass,
                json!({ "command": "distinct", "pass": pass, "probes": DISTINCT_PROBES, "witness": w }),
                summary,
            )
        }
        Task::Emit(kind) => {
            let text = emit(*kind, cfg)?;
            let rows = text.lines().count() - 1;
            Outcome { pass: true, text, summary: format!("{rows} rows") }
        }
    })
}

fn parse_line(s: &str) -> Result<OrientedLine> {
    let v: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Config(format!("line {s:?}: {e}"))))
        .collect::<Result<_>>()?;
    let arr: [f64; 6] = v.try_into().map_err(|_| Error::Config(format!("line {s:?}: expected 6 coordinates")))?;
    OrientedLine::from_array(arr).map_err(|e| Error::Config(format!("line {s:?}: {e}")))
}

fn resolve(cli: Cli) -> Result<(Task, RunConfig)> {
    Ok(match cli.command {
        Command::Profile { action: ProfileAction::Validate(c) } => (Task::ProfileValidate, c.config()?),
        Command::Spread { action } => match action {
            SpreadAction::Build(c) => (Task::SpreadBuild, c.config()?),
            SpreadAction::Check(c) => (Task::SpreadCheck, c.config()?),
        },
        Command::Parallelism { action } => match action {
            ParallelismAction::Build(c) => (Task::ParallelismBuild, c.config()?),
            ParallelismAction::Check(c) => (Task::ParallelismCheck, c.config()?),
            ParallelismAction::Classify { common, line } => {
                let lines = line.iter().map(|s| parse_line(s)).collect::<Result<_>>()?;
                (Task::ParallelismClassify(lines), common.config()?)
            }
        },
        Command::Clifford { action: CliffordAction::Compare(c) } => (Task::CliffordCompare, c.config()?),
        Command::Witness { action: WitnessAction::Acentric(c) } => (Task::WitnessAcentric, c.config()?),
        Command::Distinct { common, other } => {
            let mut cfg = common.config()?;
            cfg.other = Some(Box::new(RunConfig::load(&other)?));
            (Task::Distinct, cfg)
        }
        Command::Emit { action } => match action {
            EmitAction::Curves(c) => (Task::Emit(EmitKind::Curves), c.config()?),
            EmitAction::Dtable(c) => (Task::Emit(EmitKind::Dtable), c.config()?),
            EmitAction::Classes(c) => (Task::Emit(EmitKind::Classes), c.config()?),
        },
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let command = cfg.command.as_deref().ok_or_else(|| Error::Config("configuration has no command".into()))?;
            (Task::parse(command)?, cfg)
        }
    })
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("SPREADLAB_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| Error::Config(format!("SPREADLAB_THREADS={v:?} is not a count")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Config(format!("stdout: {e}")))
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
        }
    };
    let run = || -> Result<Outcome> {
        configure_threads()?;
        let (task, cfg) = resolve(cli)?;
        let out = execute(&task, &cfg)?;
        write_output(&cfg, &out.text)?;
        Ok(out)
    };
    match run() {
        Ok(out) => {
            eprintln!("{}: {}", if out.pass { "pass" } else { "FAIL" }, out.summary);
            if out.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}
