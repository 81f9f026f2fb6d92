//! `heisenberg-lab`: experiments on sampling and periodizing Gabor generators.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a transfer hypothesis or
//! theorem precondition does not hold, 3 numerical failure or a result outside
//! tolerance.

pub mod commands;
pub mod config;
pub mod presets;
pub mod report;
pub mod reproduce;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heisenberg_core::rational::{self, Rational};
use heisenberg_core::transfer::Mode;
use heisenberg_core::{Error, Result};
use serde::Serialize;

use crate::config::{CommandKind, ExperimentConfig, Tolerances};
use crate::report::{emit_report, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable that sets the size of the worker pool.
pub const THREADS_VAR: &str = "HEISENBERG_LAB_THREADS";

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::HypothesisViolation { .. }
        | Error::PreconditionViolation(_)
        | Error::PainlessPrecondition(_) => EXIT_HYPOTHESIS,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "heisenberg-lab",
    version,
    about = "Gabor frames on finite abelian groups and on ℝ, and maps between them"
)]
pub struct Cli {
    /// Report format. CSV is only available for row-shaped reports.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Leave wall-clock columns empty so that reports are reproducible byte for byte.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// Experiment configuration (JSON).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// A named preset; see the README for the list.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frame bounds, canonical dual and Wexler-Raz residual of a finite system.
    FiniteVerify(Source),
    /// Sample onto H or periodize onto G/H.
    Transfer {
        #[arg(value_enum)]
        mode: ModeArg,
        #[command(flatten)]
        source: Source,
    },
    /// The ℝ → γℤ → ℤ_d chain.
    Chain(Source),
    /// A dual window tuple, finite or on ℝ.
    Dual(Source),
    /// Module norms over A and B.
    Norms(Source),
    /// Random checks of the twisted convolution algebras.
    NcMul(Source),
    /// Whether ⟨g, h⟩ is a projection.
    ProjectionCheck(Source),
    /// Finite approximations of windows on ℝ.
    Approx {
        #[command(subcommand)]
        what: ApproxCommand,
    },
    /// Runs the acceptance criteria.
    Reproduce {
        /// Criterion numbers, comma separated; all by default.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Sample,
    Periodize,
}

#[derive(Subcommand, Debug)]
enum ApproxCommand {
    /// Module distance of the finite approximation for each d.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', default_value = "16,64,256")]
        d: Vec<usize>,
    },
    /// Dual windows at rational θ̃ near an irrational θ.
    RationalStep {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
        theta: f64,
        /// Values p/q, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2/3,5/7,12/17")]
        theta_tilde: Vec<String>,
    },
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    status: &'static str,
    seed: u64,
    tolerances: Tolerances,
    passed: bool,
    result: serde_json::Value,
}

#[derive(Serialize)]
struct ErrorReport {
    command: String,
    status: &'static str,
    exit_code: i32,
    /// Label such as "(i)" of the failed hypothesis, if any.
    hypothesis: Option<&'static str>,
    hypothesis_name: Option<heisenberg_core::Hypothesis>,
    message: String,
}

fn load(source: &Source, kind: CommandKind, mode: Option<Mode>) -> Result<ExperimentConfig> {
    let cfg = match (&source.config, &source.preset, mode) {
        (Some(path), _, _) => ExperimentConfig::load(path)?,
        (None, Some(name), Some(mode)) => presets::transfer_preset(mode, name)?,
        (None, Some(name), None) => presets::preset(kind, name)?,
        (None, None, _) => return Err(Error::invalid("pass --config FILE or --preset NAME")),
    };
    cfg.check_command(kind)?;
    Ok(cfg)
}

fn parse_ratio(s: &str) -> Result<Rational> {
    let bad = || Error::invalid(format!("expected p/q, got `{s}`"));
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: i64 = p.trim().parse().map_err(|_| bad())?;
    let q: i64 = q.trim().parse().map_err(|_| bad())?;
    if q == 0 {
        return Err(bad());
    }
    Ok(rational::ratio(p, q))
}

struct Produced {
    bytes: Vec<u8>,
    code: i32,
    output: Option<PathBuf>,
}

fn envelope(
    name: &str,
    cfg: &ExperimentConfig,
    out: commands::Outcome,
    format: Format,
) -> Result<Produced> {
    let env = Envelope {
        command: name,
        status: if out.passed { "ok" } else { "out_of_tolerance" },
        seed: cfg.seed,
        tolerances: cfg.tolerances,
        passed: out.passed,
        result: out.result,
    };
    Ok(Produced {
        bytes: emit_report(&env, format)?,
        code: if out.passed { EXIT_OK } else { EXIT_NUMERICAL },
        output: cfg.output.clone(),
    })
}

fn execute(cli: &Cli) -> Result<Produced> {
    let fmt = |default: Format| match cli.format {
        Some(FormatArg::Json) => Format::Json,
        Some(FormatArg::Csv) => Format::Csv,
        None => default,
    };
    let simple = |source: &Source,
                  kind: CommandKind,
                  name: &str,
                  run: fn(&ExperimentConfig) -> Result<commands::Outcome>| {
        let cfg = load(source, kind, None)?;
        envelope(name, &cfg, run(&cfg)?, fmt(Format::Json))
    };
    match &cli.command {
        Command::FiniteVerify(s) => simple(
            s,
            CommandKind::FiniteVerify,
            "finite-verify",
            commands::finite_verify,
        ),
        Command::Chain(s) => simple(s, CommandKind::Chain, "chain", commands::chain),
        Command::Dual(s) => simple(s, CommandKind::Dual, "dual", commands::dual),
        Command::Norms(s) => simple(s, CommandKind::Norms, "norms", commands::norms),
        Command::NcMul(s) => simple(s, CommandKind::NcMul, "nc-mul", commands::nc_mul),
        Command::ProjectionCheck(s) => simple(
            s,
            CommandKind::ProjectionCheck,
            "projection-check",
            commands::projection_check,
        ),
        Command::Transfer { mode, source } => {
            let mode = match mode {
                ModeArg::Sample => Mode::Sample,
                ModeArg::Periodize => Mode::Periodize,
            };
            let cfg = load(source, CommandKind::Transfer, Some(mode))?;
            envelope(
                "transfer",
                &cfg,
                commands::transfer(&cfg, mode)?,
                fmt(Format::Json),
            )
        }
        Command::Approx {
            what: ApproxCommand::Sweep { source, d },
        } => {
            let cfg = load(source, CommandKind::Approx, None)?;
            let (rows, passed) = commands::sweep(&cfg, d, !cli.no_timing)?;
            let format = fmt(Format::Csv);
            let bytes = match format {
                Format::Csv => emit_report(&rows, format)?,
                Format::Json => {
                    return envelope(
                        "approx sweep",
                        &cfg,
                        commands::Outcome {
                            result: to_value(&rows)?,
                            passed,
                        },
                        format,
                    )
                }
            };
            Ok(Produced {
                bytes,
                code: if passed { EXIT_OK } else { EXIT_NUMERICAL },
                output: cfg.output.clone(),
            })
        }
        Command::Approx {
            what:
                ApproxCommand::RationalStep {
                    source,
                    theta,
                    theta_tilde,
                },
        } => {
            let cfg = load(source, CommandKind::Approx, None)?;
            let tildes = theta_tilde
                .iter()
                .map(|s| parse_ratio(s))
                .collect::<Result<Vec<_>>>()?;
            let (rows, code) = commands::rational_steps(&cfg, *theta, &tildes)?;
            let mut p = envelope(
                "approx rational-step",
                &cfg,
                commands::Outcome {
                    result: to_value(&rows)?,
                    passed: code == 0,
                },
                fmt(Format::Json),
            )?;
            p.code = code;
            Ok(p)
        }
        Command::Reproduce { only } => {
            if let Some(bad) = only.iter().find(|&&i| !(1..=9).contains(&i)) {
                return Err(Error::invalid(format!(
                    "no criterion {bad}; criteria are 1 to 9"
                )));
            }
            let mut results = reproduce::run(only);
            if cli.no_timing {
                for r in &mut results {
                    r.seconds = f64::NAN;
                }
            }
            for r in &results {
                eprintln!("{}", r.line());
            }
            let passed = results.iter().all(|r| r.passed);
            let cfg = ExperimentConfig {
                command: Some(CommandKind::Reproduce),
                ..Default::default()
            };
            envelope(
                "reproduce",
                &cfg,
                commands::Outcome {
                    result: to_value(&results)?,
                    passed,
                },
                fmt(Format::Json),
            )
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| Error::invalid(format!("serializing result: {e}")))
}

fn command_name(cli: &Cli) -> String {
    match &cli.command {
        Command::FiniteVerify(_) => "finite-verify".into(),
        Command::Transfer { .. } => "transfer".into(),
        Command::Chain(_) => "chain".into(),
        Command::Dual(_) => "dual".into(),
        Command::Norms(_) => "norms".into(),
        Command::NcMul(_) => "nc-mul".into(),
        Command::ProjectionCheck(_) => "projection-check".into(),
        Command::Approx {
            what: ApproxCommand::Sweep { .. },
        } => "approx sweep".into(),
        Command::Approx {
            what: ApproxCommand::RationalStep { .. },
        } => "approx rational-step".into(),
        Command::Reproduce { .. } => "reproduce".into(),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::invalid(format!(
            "{THREADS_VAR} must be a positive integer, got `{v}`"
        ))
    })?;
    // A pool built earlier in the same process (tests) is kept.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn write_out(bytes: &[u8], path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, bytes).map_err(|e| Error::invalid(format!("{}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Error::invalid(format!("stdout: {e}")))
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let result = execute(&cli).and_then(|p| {
        let path = cli.output.as_ref().or(p.output.as_ref());
        write_out(&p.bytes, path)?;
        Ok(p.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e}");
            let (hypothesis, hypothesis_name) = match &e {
                Error::HypothesisViolation { which, .. } => (Some(which.label()), Some(*which)),
                _ => (None, None),
            };
            let report = ErrorReport {
                command: command_name(&cli),
                status: if code == EXIT_HYPOTHESIS {
                    "hypothesis_violation"
                } else if code == EXIT_NUMERICAL {
                    "numerical_failure"
                } else {
                    "error"
                },
                exit_code: code,
                hypothesis,
                hypothesis_name,
                message: e.to_string(),
            };
            if let Ok(bytes) = report::to_json(&report) {
                let _ = write_out(&bytes, cli.output.as_ref());
            }
            code
        }
    }
}
