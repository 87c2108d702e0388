//! The `gnr` command line.
//!
//! Exit codes: 0 when every verdict passes, 1 on a failed verdict or numerical failure,
//! 2 on a configuration error. Errors are reported as a JSON object on stderr.

pub mod commands;
pub mod config;
pub mod table;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::constants::Regime;
use crate::error::{Error, Result};
use crate::expansion::{AChoice, SeriesKind};
use crate::tolerances::*;
use crate::varmin::{Init, MinimizeConfig};
pub use commands::{execute, Artifacts, Report};
pub use config::*;

/// Version of the JSON document layout.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "gnr",
    version,
    about = "Sharp Gagliardo-Nirenberg constants, curvature expansions and rearrangements on radial models"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Repeat the run recorded in an emitted JSON document.
    #[arg(long, value_name = "JSON")]
    config: Option<PathBuf>,
    /// Emit a JSON document.
    #[arg(long, global = true, display_order = 100)]
    json: bool,
    /// Emit the result table as CSV (the default for everything but `suite`).
    #[arg(long, global = true, display_order = 101)]
    csv: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, display_order = 102, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of sharp constants, Σ, ζ, χ, c1..c8 and j over an (n, α) grid.
    Constants {
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7,8")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1.1,1.2")]
        alpha: Vec<f64>,
        #[arg(long)]
        regime: Option<Regime>,
        #[arg(long, default_value_t = 1.0)]
        m_frak: f64,
    },
    /// Admissible α-ranges and κ± per dimension.
    Ranges {
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7,8")]
        n: Vec<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Radial moments.
    Moments {
        #[command(subcommand)]
        action: MomentsAction,
    },
    /// Small-t series of the L and W functionals.
    Expansion {
        #[command(subcommand)]
        action: ExpansionAction,
    },
    /// Minimize the quotient over radial profiles on a ball.
    Minimize(MinimizeArgs),
    /// Schwarz symmetrization with equimeasurability, norm and energy checks.
    Symmetrize(SymmetrizeArgs),
    /// Conformal covariance of the Yamabe quotient.
    Conformal {
        #[command(subcommand)]
        action: ConformalAction,
    },
    /// The acceptance suite.
    Suite {
        /// Smaller sweeps; the verdicts are the same.
        #[arg(long)]
        quick: bool,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum MomentsAction {
    /// Closed forms against adaptive quadrature.
    Verify {
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7,8")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.5,0.8,1.1,1.3,1.6")]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,2,4")]
        q1: Vec<f64>,
        /// Explicit q2 values; by default the four exponents tied to α.
        #[arg(long, value_delimiter = ',')]
        q2: Vec<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    regime: Option<Regime>,
    #[arg(long, default_value_t = 1.0)]
    m_frak: f64,
}

impl ParamArgs {
    fn config(&self) -> ParamsConfig {
        ParamsConfig {
            n: self.n,
            alpha: self.alpha,
            regime: self.regime,
            m_frak: self.m_frak,
        }
    }
}

#[derive(Debug, Subcommand)]
enum ExpansionAction {
    /// Fit the sampled series and compare with the assembled coefficients.
    Fit {
        #[command(flatten)]
        params: ParamArgs,
        /// `euclidean` or `spaceform:K=<v>`.
        #[arg(long, default_value = "spaceform:K=1")]
        metric: String,
        #[arg(long)]
        r_max: Option<f64>,
        /// Series to fit: l, w or both.
        #[arg(long, default_value = "both")]
        series: String,
        /// Second-order jet of the L-series cutoff: zero or bp.
        #[arg(long, default_value = "bp")]
        a_choice: AChoice,
        #[arg(long)]
        tmin: Option<f64>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        tcount: Option<usize>,
        /// Plateau radius of the cutoff.
        #[arg(long)]
        r0: Option<f64>,
        /// Tolerance for both coefficients (default 1e-3 on c1, 5e-3 on c2).
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct MinimizeArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value = "euclidean")]
    metric: String,
    #[arg(long)]
    r_max: Option<f64>,
    /// Grid nodes.
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    /// Radius of the ball; defaults to min(4, chart radius).
    #[arg(long)]
    ball_radius: Option<f64>,
    /// Initial profile: bump, extremal or random.
    #[arg(long, default_value = "bump")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    /// Relative distance to the sharp constant accepted on Euclidean space.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the final profile as CSV.
    #[arg(long, value_name = "PATH")]
    profile: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SymmetrizeArgs {
    #[arg(long)]
    n: usize,
    /// random, profile:<csv> or histogram:<csv>.
    #[arg(long, default_value = "random")]
    source: SourceConfig,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Nodes of a random source.
    #[arg(long, default_value_t = 128)]
    grid: usize,
    /// Support radius of a random source.
    #[arg(long, default_value_t = 1.2)]
    r_end: f64,
    /// Metric of a grid source.
    #[arg(long, default_value = "euclidean")]
    metric: String,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long, default_value = "euclidean")]
    target: String,
    #[arg(long)]
    target_r_max: Option<f64>,
    /// Norm exponents to compare.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    q: Vec<f64>,
    /// Levels at which the distribution functions are compared.
    #[arg(long, default_value_t = 100)]
    levels: usize,
    #[arg(long)]
    tol: Option<f64>,
    /// Write the rearranged profile as CSV.
    #[arg(long, value_name = "PATH")]
    profile: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ConformalAction {
    /// Compare the quotient of φ on `u^{4/(n-2)} δ` with the flat quotient of `φu`.
    Check {
        #[arg(long)]
        n: usize,
        /// `conformal:schwarzschild:m=<v>` or `conformal:<csv of r,u>`.
        #[arg(long, default_value = "conformal:schwarzschild:m=1")]
        metric: String,
        #[arg(long)]
        r_max: Option<f64>,
        /// Support of the test function `((r-lo)(hi-r))^power`.
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long, default_value_t = 3.0)]
        power: f64,
        #[arg(long, default_value_t = 400)]
        grid: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn metric(spec: String, r_max: Option<f64>) -> MetricConfig {
    MetricConfig { spec, r_max }
}

fn build(cmd: Command) -> Result<(RunConfig, Option<PathBuf>)> {
    let mut profile = None;
    let cfg = match cmd {
        Command::Constants {
            n,
            alpha,
            regime,
            m_frak,
        } => RunConfig::Constants(ConstantsConfig {
            n,
            alpha,
            regime,
            m_frak,
        }),
        Command::Ranges { n, tol } => RunConfig::Ranges(RangesConfig {
            n,
            tol: tol.unwrap_or(KAPPA_RESIDUAL),
        }),
        Command::Moments {
            action:
                MomentsAction::Verify {
                    n,
                    alpha,
                    q1,
                    q2,
                    tol,
                },
        } => RunConfig::MomentsVerify(MomentsConfig {
            n,
            alpha,
            q1,
            q2,
            tol: tol.unwrap_or(MOMENT_REL),
        }),
        Command::Expansion {
            action:
                ExpansionAction::Fit {
                    params,
                    metric: m,
                    r_max,
                    series,
                    a_choice,
                    tmin,
                    tmax,
                    tcount,
                    r0,
                    tol,
                },
        } => RunConfig::ExpansionFit(FitConfig {
            params: params.config(),
            metric: metric(m, r_max),
            series: match series.to_ascii_lowercase().as_str() {
                "l" => vec![SeriesKind::L],
                "w" => vec![SeriesKind::W],
                "both" => vec![SeriesKind::L, SeriesKind::W],
                s => {
                    return Err(Error::Config(format!(
                        "unknown series {s:?} (l | w | both)"
                    )))
                }
            },
            a_choice,
            grid: GridOverride {
                t_min: tmin,
                t_max: tmax,
                t_count: tcount,
            },
            r0,
            tol_c1: tol.unwrap_or(FIT_C1_REL),
            tol_c2: tol.unwrap_or(FIT_C2_REL),
        }),
        Command::Minimize(a) => {
            profile = a.profile;
            let params = a.params.config();
            let mc = metric(a.metric, a.r_max);
            let chart = mc
                .metric(params.n)
                .map_err(|e| Error::Config(e.to_string()))?
                .r_max;
            let init = match a.init.as_str() {
                "random" => Init::Random(a.seed),
                s => s.parse()?,
            };
            RunConfig::Minimize(MinimizeRun {
                params,
                metric: mc,
                minimize: MinimizeConfig {
                    grid_nodes: a.grid,
                    ball_radius: a.ball_radius.unwrap_or(chart.min(4.0)),
                    max_iters: a.max_iters,
                    init,
                    ..MinimizeConfig::default()
                },
                tol: a.tol.unwrap_or(VARMIN_REL),
            })
        }
        Command::Symmetrize(a) => {
            profile = a.profile;
            let source = match a.source {
                SourceConfig::Random { .. } => SourceConfig::Random {
                    seed: a.seed,
                    nodes: a.grid,
                    r_end: a.r_end,
                },
                s => s,
            };
            RunConfig::Symmetrize(SymmetrizeConfig {
                n: a.n,
                source,
                metric: metric(a.metric, a.r_max),
                target: metric(a.target, a.target_r_max),
                q: a.q,
                levels: a.levels,
                tol: a.tol.unwrap_or(SYMMETRIZE),
            })
        }
        Command::Conformal {
            action:
                ConformalAction::Check {
                    n,
                    metric: m,
                    r_max,
                    lo,
                    hi,
                    power,
                    grid,
                    tol,
                },
        } => RunConfig::ConformalCheck(ConformalConfig {
            n,
            metric: metric(m, r_max),
            lo,
            hi,
            power,
            nodes: grid,
            tol: tol.unwrap_or(CONFORMAL_REL),
        }),
        Command::Suite { quick, only } => RunConfig::Suite(SuiteConfig { quick, only }),
    };
    Ok((cfg, profile))
}

fn load_config(path: &PathBuf) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg = doc.get("config").cloned().unwrap_or(doc);
    serde_json::from_value(cfg).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// The full JSON document of a run.
pub fn document(cfg: &RunConfig, report: &Report) -> serde_json::Value {
    json!({
        "schema": SCHEMA,
        "config": cfg,
        "pass": report.pass,
        "summary": report.summary,
        "rows": report.table.to_json(),
    })
}

pub fn render(cfg: &RunConfig, report: &Report, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => {
            serde_json::to_string_pretty(&document(cfg, report)).expect("document serializes")
                + "\n"
        }
        Format::Text if report.text.is_some() => report.text.clone().unwrap_or_default(),
        _ => report.table.to_csv()?,
    })
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Pole { .. } => "pole",
        Error::NonConvergence(_) => "non_convergence",
        Error::Degenerate(_) => "degenerate",
        Error::OutOfChart { .. } => "out_of_chart",
        Error::Unavailable(_) => "unavailable",
        Error::Normalization(_) => "normalization",
        Error::Positivity(_) => "positivity",
        Error::Range(_) => "range",
        Error::Support(_) => "support",
        Error::Capacity { .. } => "capacity",
        Error::Representation(_) => "representation",
        Error::Dimension { .. } => "dimension",
        Error::NoBracket(_) => "no_bracket",
        Error::IllConditioned(_) => "ill_conditioned",
        Error::Config(_) => "config",
        Error::Io(_) => "io",
    }
}

/// Exit code of an error: 2 for inputs that could be rejected up front, 1 otherwise.
pub fn error_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::Domain(_)
        | Error::Pole { .. }
        | Error::Range(_)
        | Error::Dimension { .. }
        | Error::Unavailable(_)
        | Error::Capacity { .. }
        | Error::Support(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn report_error(kind: &str, message: &str, code: u8) -> ExitCode {
    let doc = json!({"schema": SCHEMA, "error": {"kind": kind, "message": message}});
    let _ = writeln!(std::io::stderr(), "{doc}");
    ExitCode::from(code)
}

/// Parse `argv`, run the command and emit its artifact.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return report_error("usage", e.to_string().trim(), 2);
        }
    };
    match run_cli(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => report_error(error_kind(&e), &e.to_string(), error_code(&e)),
    }
}

fn run_cli(cli: Cli) -> Result<bool> {
    let (cfg, profile) = match (cli.command, &cli.config) {
        (Some(_), Some(_)) => {
            return Err(Error::Config("--config replaces the subcommand".into()));
        }
        (Some(cmd), None) => build(cmd)?,
        (None, Some(path)) => (load_config(path)?, None),
        (None, None) => return Err(Error::Config("no subcommand (see --help)".into())),
    };
    if cli.json && cli.csv {
        return Err(Error::Config("--json and --csv are exclusive".into()));
    }
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Text
    };
    cfg.validate()?;
    let report = execute(
        &cfg,
        &Artifacts {
            profile: profile.as_deref(),
        },
    )?;
    let out = render(&cfg, &report, format)?;
    match &cli.out {
        Some(path) => fs::write(path, out)?,
        None => {
            let _ = std::io::stdout().write_all(out.as_bytes());
        }
    }
    Ok(report.pass)
}
