//! `geoflow`: verification suites for geodesic flows, canonical coordinates
//! and Klein–Gordon solutions on the shipped Lie group catalog.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check, 2 on a usage
//! or configuration error. Machine output is JSON on stdout; diagnostics go
//! to stderr.

mod commands;
mod report;
mod scenario;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use geoflow_core::GroupChart;

use report::{CliError, Report};
use scenario::{read_metric, ConfigError, Scenario};

#[derive(Parser)]
#[command(name = "geoflow", version, about = "Lie group geodesic flow and Klein-Gordon verification suites")]
struct Cli {
    /// Seed for every random sample (overrides GEOFLOW_SEED and scenario files).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Add wall-clock runtime to the report (breaks byte-for-byte determinism).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Target {
    /// Catalog group name (abelian_n, heisenberg3, euclid2, so3, aff1, so3_x_so3).
    group: Option<String>,
    /// JSON scenario file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// JSON file holding the n × n invariant metric G_ab.
    #[arg(long)]
    metric: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog with index, unimodularity and integrability.
    ListGroups,
    /// Certify a chart and its orbit model.
    Validate {
        #[command(flatten)]
        target: Target,
        /// Random points for the chart checks.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Index, unimodularity and the integrability criterion.
    Analyze {
        #[command(flatten)]
        target: Target,
    },
    /// Integrate the geodesic flow and cross-check it against the reduced flow.
    Geodesic {
        #[command(flatten)]
        target: Target,
        #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
        x0: Option<Vec<f64>>,
        #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
        p0: Option<Vec<f64>>,
        #[arg(long)]
        t_end: Option<f64>,
        /// Write the trajectory (t, x, p, H) as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generating-function relations, symplecticity and round trips.
    CanonicalCheck {
        #[command(flatten)]
        target: Target,
    },
    /// λ-representation operators, kernel PDEs and the Fourier transform.
    LambdaCheck {
        #[command(flatten)]
        target: Target,
    },
    /// Synthesize and verify a Klein–Gordon solution.
    Kg {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        mass: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        zeta: Option<f64>,
        /// Orbit labels, r numbers per component.
        #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
        lambda: Option<Vec<f64>>,
        /// Number of random points at which |Hψ| is evaluated.
        #[arg(long)]
        verify: Option<usize>,
        /// Accepted for symmetry with the other subcommands; output is always JSON.
        #[arg(long)]
        json: bool,
        /// Write samples (x, Re ψ, Im ψ, |Hψ|) as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the full acceptance battery.
    Selftest,
}

fn scenario(target: &Target, seed: Option<u64>) -> Result<Scenario, ConfigError> {
    let mut s = match (&target.scenario, &target.group) {
        (Some(path), group) => {
            let s = Scenario::load(path)?;
            if let Some(g) = group {
                if *g != s.group {
                    return Err(ConfigError::new("group", format!("command line says {g}, scenario says {}", s.group)));
                }
            }
            s
        }
        (None, Some(g)) => Scenario::for_group(g)?,
        (None, None) => return Err(ConfigError::new("group", "give a group name or --scenario")),
    };
    if let Some(path) = &target.metric {
        s.set_metric(read_metric(path)?, "--metric")?;
    }
    s.apply_seed(seed)?;
    Ok(s)
}

fn seed_only(flag: Option<u64>) -> Result<u64, ConfigError> {
    let mut s = Scenario::for_group("abelian_1")?;
    s.apply_seed(flag)?;
    Ok(s.seed)
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::ListGroups => commands::list_groups(seed_only(seed)?)?,
        Command::Validate { target, samples } => {
            let mut s = scenario(target, seed)?;
            if let Some(n) = samples {
                if *n == 0 {
                    return Err(ConfigError::new("--samples", "must be at least 1").into());
                }
                s.samples.points = *n;
            }
            commands::validate(&s)?
        }
        Command::Analyze { target } => commands::analyze(&scenario(target, seed)?)?,
        Command::Geodesic { target, x0, p0, t_end, csv } => {
            let mut s = scenario(target, seed)?;
            if x0.is_some() || p0.is_some() {
                let n = s.chart().dim();
                let x0 = x0.clone().unwrap_or_else(|| vec![0.0; n]);
                let p0 = p0.clone().ok_or_else(|| ConfigError::new("--p0", "missing"))?;
                for (v, name) in [(&x0, "--x0"), (&p0, "--p0")] {
                    if v.len() != n {
                        return Err(ConfigError::new(name, format!("expected {n} values, got {}", v.len())).into());
                    }
                }
                s.initial = Some(scenario::Initial { x0: Some(x0), p0: Some(p0), ..Default::default() });
            }
            if let Some(t) = t_end {
                if !(t.is_finite() && *t > 0.0) {
                    return Err(ConfigError::new("--t-end", "must be positive").into());
                }
                s.t_end = *t;
            }
            commands::geodesic(&s, csv.as_deref())?
        }
        Command::CanonicalCheck { target } => commands::canonical_check(&scenario(target, seed)?)?,
        Command::LambdaCheck { target } => commands::lambda_check(&scenario(target, seed)?)?,
        Command::Kg { target, mass, zeta, lambda, verify, json: _, csv } => {
            let mut s = scenario(target, seed)?;
            if let Some(m) = mass {
                if !(m.is_finite() && *m > 0.0) {
                    return Err(ConfigError::new("--mass", "must be positive").into());
                }
                s.kg.mass = *m;
            }
            if let Some(z) = zeta {
                s.kg.zeta = *z;
            }
            if let Some(l) = lambda {
                s.kg.lambdas = Some(l.clone());
            }
            if let Some(n) = verify {
                if *n == 0 {
                    return Err(ConfigError::new("--verify", "must be at least 1").into());
                }
                s.samples.verify = *n;
            }
            commands::kg(&s, csv.as_deref())?
        }
        Command::Selftest => unreachable!("handled in main"),
    })
}

/// Print to stdout, tolerating a closed pipe (`geoflow ... | head`).
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn selftest(seed: Option<u64>) -> ExitCode {
    let seed = match seed_only(seed) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = geoflow_core::run_acceptance(seed);
    for c in &report.criteria {
        eprintln!("{}", c.summary_line());
    }
    emit(&report.to_json());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Selftest = cli.command {
        return selftest(cli.seed);
    }
    let start = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            if cli.timing {
                report.runtime_s = Some(start.elapsed().as_secs_f64());
            }
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {}: max {:e} (tolerance {:e}){}", c.label, c.max, c.tolerance, c.error.as_ref().map_or(String::new(), |e| format!(": {e}")));
            }
            emit(&serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("geoflow: {e}");
            ExitCode::from(2)
        }
    }
}
