//! `adhm-lab`: command-line front end to the enhanced ADHM workbench.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use adhm_core::acceptance;
use adhm_core::datum::{matrix_from_json, AdhmDatum, DimVector, EnhancedDatum, GenerationStyle};
use adhm_core::deformation::{build_complex, cohomology_dims, Variant};
use adhm_core::geometry::{balance_flow, degeneracy_scan, omega_on_h1, FlowOptions, OmegaOptions};
use adhm_core::moduli_maps::{
    fiber_lift_report, nested_hilbert_datum, nested_hilbert_points, quotient_rep, quotient_support,
    vandermonde_frame, PointConfiguration,
};
use adhm_core::stability::is_stable_with;
use adhm_core::{generate_stable, CMat, Error, StabilityParameter};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod exit {
    pub const OK: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const NUMERICAL_FLAG: u8 = 4;
}

#[derive(Parser, Debug)]
#[command(name = "adhm-lab", version, about = "Enhanced ADHM data: generation, verification, cohomology, moduli maps and geometry")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "ADHM_LAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Relative tolerance of numerical rank decisions.
    #[arg(long, global = true, default_value_t = adhm_core::linalg::DEFAULT_RTOL, value_parser = positive)]
    rtol: f64,
    /// Residual tolerance, relative to 1 + ‖X‖².
    #[arg(long, global = true, default_value_t = adhm_core::datum::DEFAULT_TAU, value_parser = positive)]
    tau: f64,
    /// Output format; commands without a table ignore csv and text.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded stable datum.
    Gen {
        #[arg(long)]
        dims: DimVector,
        #[arg(long, default_value = "diagonal")]
        style: GenerationStyle,
    },
    /// Residuals and stability report of a datum.
    Verify(Input),
    /// Cohomology dimensions of the deformation complex.
    Cohomology {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "reduced")]
        variant: Variant,
    },
    /// The plain ADHM datum induced on V / Im F.
    Quotient(Input),
    /// Lift a plain ADHM datum through the fiber system.
    Lift {
        #[command(flatten)]
        input: Input,
        /// Dimension of V' for a seeded diagonal frame.
        #[arg(long, default_value_t = 1, conflicts_with = "frame")]
        cprime: usize,
        /// JSON file with commuting "Aprime" and "Bprime" matrices.
        #[arg(long)]
        frame: Option<PathBuf>,
    },
    /// Support of the quotient sheaf.
    Support(Input),
    /// Nested Hilbert scheme correspondence: points to datum with --z1/--z2,
    /// datum to points with --in.
    Hilb {
        #[arg(long = "in", conflicts_with_all = ["z1", "z2"])]
        input: Option<String>,
        #[arg(long, requires = "z2")]
        z1: Option<String>,
        #[arg(long, requires = "z1")]
        z2: Option<String>,
    },
    /// Balancing flow towards the moment-map level.
    Flow {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1e-8, value_parser = positive)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
    },
    /// The 2-form Ω on H¹ (c' = 1).
    Omega {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Ω-ranks over seeded samples of one stratum.
    Scan {
        #[arg(long)]
        dims: DimVector,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value = "diagonal")]
        stratum: GenerationStyle,
        /// Also write the per-sample table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Accept {
        /// Comma-separated criteria; all when omitted.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Input JSON file, or - for stdin.
    #[arg(long = "in")]
    input: String,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: Error },
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } => exit::IO,
            CliError::Core(Error::Json(_) | Error::Format(_)) => exit::IO,
            CliError::Core(_) => exit::CHECK_FAILED,
        }
    }
}

/// What a command produced: the document to print and the exit status.
struct Outcome {
    body: String,
    code: u8,
}

impl Outcome {
    fn json(value: Value, code: u8) -> Self {
        let mut body = serde_json::to_string_pretty(&value).expect("JSON values serialize");
        body.push('\n');
        Outcome { body, code }
    }
}

fn read_source(path: &str) -> Result<String, CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_string(),
        source,
    };
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn parse_with<T>(path: &str, f: impl FnOnce(&str) -> adhm_core::Result<T>) -> Result<T, CliError> {
    let text = read_source(path)?;
    f(&text).map_err(|source| CliError::Parse {
        path: path.to_string(),
        source,
    })
}

fn read_datum(path: &str) -> Result<EnhancedDatum, CliError> {
    parse_with(path, EnhancedDatum::from_json_str)
}

fn read_adhm(path: &str) -> Result<AdhmDatum, CliError> {
    parse_with(path, |s| AdhmDatum::from_json(&serde_json::from_str(s)?))
}

fn read_points(path: &str) -> Result<PointConfiguration, CliError> {
    parse_with(path, PointConfiguration::from_json_str)
}

fn read_frame(path: &str) -> Result<(CMat, CMat), CliError> {
    parse_with(path, |s| {
        let v: Value = serde_json::from_str(s)?;
        let p = v
            .get("Aprime")
            .and_then(Value::as_array)
            .map(Vec::len)
            .ok_or_else(|| Error::Format("missing matrix \"Aprime\"".into()))?;
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::Format(format!("missing matrix \"{k}\"")))
                .and_then(|m| matrix_from_json(k, m, (p, p)))
        };
        Ok((field("Aprime")?, field("Bprime")?))
    })
}

/// Seed and tolerances echoed into every JSON document.
fn context(cfg: &RunConfig) -> Value {
    json!({"seed": cfg.seed, "rtol": cfg.rtol, "tau": cfg.tau})
}

fn with_context(cfg: &RunConfig, mut body: Value) -> Value {
    if let Value::Object(map) = &mut body {
        map.insert("context".into(), context(cfg));
    }
    body
}

fn dispatch(cfg: &RunConfig, command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Gen { dims, style } => {
            let x = generate_stable(dims, cfg.seed, style)?;
            let mut doc = x.to_json();
            doc["style"] = json!(style);
            Ok(Outcome::json(with_context(cfg, doc), exit::OK))
        }
        Command::Verify(input) => {
            let x = read_datum(&input.input)?;
            let theta = StabilityParameter::default_for(x.dims());
            let report = is_stable_with(&x, &theta, cfg.rtol)?;
            let residuals = x.residuals();
            let scale = 1.0 + x.norm_sqr();
            let valid = x.is_valid(cfg.tau);
            let doc = json!({
                "dims": x.dims(),
                "residuals": residuals,
                "max_residual": residuals.max(),
                "residual_bound": cfg.tau * scale,
                "valid": valid,
                "stability": report,
                "theta": theta.to_string(),
            });
            let code = if valid && report.is_stable() { exit::OK } else { exit::CHECK_FAILED };
            Ok(Outcome::json(with_context(cfg, doc), code))
        }
        Command::Cohomology { input, variant } => {
            let x = read_datum(&input.input)?;
            let rep = cohomology_dims(&build_complex(&x, variant)?, cfg.rtol);
            let code = if rep.flagged { exit::NUMERICAL_FLAG } else { exit::OK };
            let mut doc = serde_json::to_value(&rep).expect("report serializes");
            doc["dims"] = json!(x.dims());
            Ok(Outcome::json(with_context(cfg, doc), code))
        }
        Command::Quotient(input) => {
            let x = read_datum(&input.input)?;
            let q = quotient_rep(&x)?;
            let mut doc = q.to_json();
            doc["residual"] = json!(q.residual());
            doc["valid"] = json!(q.is_valid(cfg.tau));
            let code = if q.is_valid(cfg.tau) { exit::OK } else { exit::CHECK_FAILED };
            Ok(Outcome::json(with_context(cfg, doc), code))
        }
        Command::Lift { input, cprime, frame } => {
            let x2 = read_adhm(&input.input)?;
            let (ap, bp) = match frame {
                Some(path) => read_frame(&path.to_string_lossy())?,
                None => {
                    let f = vandermonde_frame(cprime, cfg.seed)?;
                    (f.aprime, f.bprime)
                }
            };
            let rep = fiber_lift_report(&x2, &ap, &bp, cfg.seed)?;
            let mut doc = rep.datum.to_json();
            doc["kernel_dim"] = json!(rep.kernel_dim);
            doc["generic_kernel_dim"] = json!(rep.generic_kernel_dim);
            doc["kernel_decision"] = serde_json::to_value(rep.decision).expect("decision serializes");
            doc["attempts"] = json!(rep.attempts);
            let code = if rep.decision.is_reliable() { exit::OK } else { exit::NUMERICAL_FLAG };
            Ok(Outcome::json(with_context(cfg, doc), code))
        }
        Command::Support(input) => {
            let x = read_datum(&input.input)?;
            let pts = quotient_support(&x)?;
            let mut doc = serde_json::to_value(&pts).expect("points serialize");
            doc["length"] = json!(pts.length());
            Ok(Outcome::json(with_context(cfg, doc), exit::OK))
        }
        Command::Hilb { input, z1, z2 } => match (input, z1, z2) {
            (Some(path), _, _) => {
                let x = read_datum(&path)?;
                let (z1, z2) = nested_hilbert_points(&x)?;
                let doc = json!({"z1": z1.sorted(), "z2": z2.sorted()});
                Ok(Outcome::json(with_context(cfg, doc), exit::OK))
            }
            (None, Some(p1), Some(p2)) => {
                let (z1, z2) = (read_points(&p1)?, read_points(&p2)?);
                let x = nested_hilbert_datum(&z1, &z2)?;
                Ok(Outcome::json(with_context(cfg, x.to_json()), exit::OK))
            }
            _ => Err(CliError::Core(Error::Format(
                "hilb needs either --in or both --z1 and --z2".into(),
            ))),
        },
        Command::Flow { input, tol, max_iters } => {
            let x = read_datum(&input.input)?;
            let mut opts = FlowOptions::new(x.dims());
            opts.tol = tol;
            opts.max_iters = max_iters;
            let out = balance_flow(&x, &opts);
            let mut doc = out.datum.to_json();
            doc["iterations"] = json!(out.iterations);
            doc["converged"] = json!(out.converged);
            doc["initial_norm"] = json!(out.initial_norm);
            doc["final_norm"] = json!(out.final_norm);
            doc["monotone"] = json!(out.is_monotone());
            doc["level"] = serde_json::to_value(opts.level).expect("level serializes");
            doc["flow_tol"] = json!(tol);
            let code = if out.converged { exit::OK } else { exit::CHECK_FAILED };
            Ok(Outcome::json(with_context(cfg, doc), code))
        }
        Command::Omega { input, samples } => {
            let x = read_datum(&input.input)?;
            let opts = OmegaOptions {
                samples,
                seed: cfg.seed,
                rtol: cfg.rtol,
                ..OmegaOptions::default()
            };
            let om = omega_on_h1(&x, &opts)?;
            let mut doc = om.to_json();
            doc["well_defined_tol"] = json!(opts.well_defined_tol);
            let code = if om.flagged { exit::NUMERICAL_FLAG } else { exit::OK };
            Ok(Outcome::json(with_context(cfg, doc), code))
        }
        Command::Scan {
            dims,
            samples,
            stratum,
            csv,
        } => {
            let scan = degeneracy_scan(dims, stratum, samples, cfg.seed)?;
            let table = scan.to_csv();
            if let Some(path) = &csv {
                fs::write(path, &table).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
            }
            let code = if scan.rows.iter().any(|r| r.flagged) {
                exit::NUMERICAL_FLAG
            } else {
                exit::OK
            };
            if cfg.format == Some(Format::Csv) {
                return Ok(Outcome { body: table, code });
            }
            let doc = serde_json::to_value(&scan).expect("scan serializes");
            Ok(Outcome::json(with_context(cfg, doc), code))
        }
        Command::Accept { criteria } => {
            let report = if criteria.is_empty() {
                acceptance::run(cfg.seed)
            } else {
                acceptance::run_selected(cfg.seed, &criteria)
            };
            let code = if report.all_passed() && !report.outcomes.is_empty() {
                exit::OK
            } else {
                exit::CHECK_FAILED
            };
            if cfg.format == Some(Format::Json) {
                let doc = serde_json::to_value(&report).expect("report serializes");
                return Ok(Outcome::json(with_context(cfg, doc), code));
            }
            let mut body = format!("acceptance suite, seed {}\n", cfg.seed);
            body.push_str(&report.render());
            let passed = report.outcomes.iter().filter(|o| o.passed).count();
            body.push_str(&format!("{passed}/{} criteria passed\n", report.outcomes.len()));
            Ok(Outcome { body, code })
        }
    }
}

fn emit(cfg: &RunConfig, body: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => fs::write(path, body).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    let cfg = cli.config;
    let result = dispatch(&cfg, cli.command).and_then(|outcome| {
        emit(&cfg, &outcome.body)?;
        if outcome.code == exit::NUMERICAL_FLAG {
            eprintln!("adhm-lab: a rank decision has gap ratio below 1e3; the reported dimensions are not reliable");
        }
        Ok(outcome.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("adhm-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
