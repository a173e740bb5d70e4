//! Batch command-line front end: JSON in, canonical JSON out, deterministic
//! seeds. Exit code 0 on success, 1 on verification mismatch, 2 on input
//! errors.

use clap::{Parser, Subcommand};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tropdeg::degeneration::{build_degeneration, prepare_model};
use tropdeg::fan::common_refinement;
use tropdeg::jsonio;
use tropdeg::normalfan::{normal_fan, refined_normal_fan};
use tropdeg::strata::{volume_ledger, TorusEvaluator};

#[derive(Parser)]
#[command(
    name = "tropdeg",
    version,
    about = "Exact tropical degeneration fans and stratum ledgers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for the randomized rank tests.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on internal worker threads; the output never depends on it.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Canonicalize a cone, or compute its dual or face list.
    Cone {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dual: bool,
        #[arg(long)]
        faces: bool,
    },
    /// Canonicalize or validate a fan, or refine it by another fan.
    Fan {
        #[arg(long)]
        input: PathBuf,
        /// Report fan-axiom violations instead of canonicalizing;
        /// exits 1 when the input is not a fan.
        #[arg(long)]
        validate: bool,
        /// Common refinement with a second fan.
        #[arg(long)]
        refine: Option<PathBuf>,
    },
    /// Normal fan of a point configuration, optionally refined against a
    /// base fan.
    NormalFan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Matroid fan of a hyperplane arrangement.
    Bergman {
        #[arg(long)]
        arrangement: PathBuf,
    },
    /// Degeneration fan of a weighted configuration over a base fan, with
    /// the zero/spe/bdd classification of every cone.
    Degenerate {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        l: u64,
        /// Run semistable preparation (unimodularize, then rescale).
        #[arg(long)]
        prepare: bool,
        /// Subdivision budget for preparation.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Signed stratum ledger over the bounded cones, with the ambient
    /// torus as the underlying variety.
    Ledger {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        l: u64,
    },
    /// Verify the Gr(2,n) classification against the expected seven cones.
    Grassmann {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        l: u64,
        /// Enumerate the whole degeneration fan instead of checking the
        /// seven candidates directly.
        #[arg(long)]
        exhaustive: bool,
    },
}

enum RunError {
    /// Malformed input or I/O problems → exit 2.
    Input(String),
    /// Well-formed input failing a verification → exit 1.
    Verification(String),
}

impl From<jsonio::JsonError> for RunError {
    fn from(e: jsonio::JsonError) -> Self {
        RunError::Input(e.to_string())
    }
}

fn read_json(path: &Path) -> Result<Value, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        RunError::Input(format!(
            "{}: invalid JSON at line {}, column {}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn emit(out: &Option<PathBuf>, value: &Value) -> Result<(), RunError> {
    let text = jsonio::canonical_json(value);
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| RunError::Input(format!("{}: {e}", path.display()))),
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    tropdeg::par::set_thread_cap(cli.threads);
    match cli.command {
        Command::Cone { input, dual, faces } => {
            let cone = jsonio::cone_from_value(&read_json(&input)?, "cone")?;
            let value = if faces {
                Value::Array(cone.faces().iter().map(jsonio::cone_to_value).collect())
            } else if dual {
                jsonio::cone_to_value(&cone.dual())
            } else {
                jsonio::cone_to_value(&cone)
            };
            emit(&cli.out, &value)
        }
        Command::Fan {
            input,
            validate,
            refine,
        } => {
            let parsed = read_json(&input)?;
            if validate {
                let (fan, report) = jsonio::fan_from_value_with_report(&parsed, "fan")?;
                let value = jsonio::validation_report_to_value(&fan, &report);
                emit(&cli.out, &value)?;
                if !report.is_valid() {
                    return Err(RunError::Verification("fan axioms violated".to_string()));
                }
                return Ok(());
            }
            let fan = jsonio::fan_from_value(&parsed, "fan")?;
            let fan = match refine {
                None => fan,
                Some(other) => {
                    let other = jsonio::fan_from_value(&read_json(&other)?, "refine")?;
                    common_refinement(&fan, &other).map_err(|e| RunError::Input(e.to_string()))?
                }
            };
            emit(&cli.out, &jsonio::fan_to_value(&fan, false))
        }
        Command::NormalFan { config, base } => {
            let u = jsonio::config_from_value(&read_json(&config)?, "config")?;
            let fan = match base {
                None => normal_fan(&u),
                Some(path) => {
                    let delta = jsonio::fan_from_value(&read_json(&path)?, "base")?;
                    refined_normal_fan(&delta, &u)
                }
            }
            .map_err(|e| RunError::Input(e.to_string()))?;
            emit(&cli.out, &jsonio::fan_to_value(&fan, false))
        }
        Command::Bergman { arrangement } => {
            let lf = jsonio::arrangement_from_value(&read_json(&arrangement)?, "arrangement")?;
            let (_, fan) = lf
                .bergman_fan()
                .map_err(|e| RunError::Input(e.to_string()))?;
            emit(&cli.out, &jsonio::fan_to_value(&fan, false))
        }
        Command::Degenerate {
            base,
            config,
            l,
            prepare,
            budget,
        } => {
            let delta = jsonio::fan_from_value(&read_json(&base)?, "base")?;
            let u = jsonio::config_from_value(&read_json(&config)?, "config")?;
            if prepare {
                let (l0, df) = prepare_model(&delta, &u, budget)
                    .map_err(|e| RunError::Input(e.to_string()))?;
                let mut value = jsonio::degeneration_to_value(&df);
                value["l0"] = Value::from(l0);
                return emit(&cli.out, &value);
            }
            let df =
                build_degeneration(&delta, &u, l).map_err(|e| RunError::Input(e.to_string()))?;
            emit(&cli.out, &jsonio::degeneration_to_value(&df))
        }
        Command::Ledger { base, config, l } => {
            let delta = jsonio::fan_from_value(&read_json(&base)?, "base")?;
            let u = jsonio::config_from_value(&read_json(&config)?, "config")?;
            let df =
                build_degeneration(&delta, &u, l).map_err(|e| RunError::Input(e.to_string()))?;
            // The torus of the configuration itself is the ambient variety,
            // so every stratum is exact and the N-block is empty.
            let ev = TorusEvaluator::new(df.config().m_rank(), cli.seed);
            let ledger =
                volume_ledger(&df, &ev, 0, cli.seed).map_err(|e| RunError::Input(e.to_string()))?;
            emit(&cli.out, &jsonio::ledger_to_value(&ledger))
        }
        Command::Grassmann {
            n,
            d,
            l,
            exhaustive,
        } => {
            let report = tropdeg::grassmann::verify_classification(n, d, l, exhaustive, cli.seed)
                .map_err(|e| RunError::Input(e.to_string()))?;
            emit(&cli.out, &jsonio::classification_report_to_value(&report))?;
            if !report.pass() {
                return Err(RunError::Verification(
                    "classification mismatch".to_string(),
                ));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(RunError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
