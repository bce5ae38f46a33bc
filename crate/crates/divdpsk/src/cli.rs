//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use divdpsk_core::doppler::{rho_from_doppler, DopplerKind, DopplerSpec};
use divdpsk_core::sim::EarlyStop;
use divdpsk_core::{db_to_linear, BranchParams, Detector, DiversityConfig};

use crate::config::{ConfigFile, OneOrMany};
use crate::parallel::default_workers;
use crate::row::{write_csv, write_json, ResultRow};
use crate::sweep::{db_range, evaluate, figure, split_energy, BoundKind, McSettings, Outputs, SweepSpec};
use crate::table::load_covariance_table;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "divdpsk",
    version,
    about = "Error probability of binary DPSK with diversity over correlated Rayleigh fading"
)]
#[command(after_help = "Environment:\n  DIVDPSK_WORKERS  default Monte Carlo worker count")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact BEP and Chernoff bound at a single configuration
    Bep(BepArgs),
    /// BEP over a grid of total SNR, power split and correlation
    Sweep(GridArgs),
    /// Monte Carlo estimates over a grid (exact values alongside)
    Simulate(GridArgs),
    /// One-bit fading correlation from a Doppler spectrum
    DopplerRho(DopplerArgs),
    /// Data for the published BEP comparison figures
    ReproduceFig(FigureArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BepArgs {
    /// Flat TOML file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Diversity order
    #[arg(short = 'L', long = "L")]
    pub order: Option<usize>,
    /// Correlation per branch (one value applies to all)
    #[arg(long, value_delimiter = ',')]
    pub rho: Vec<f64>,
    /// Mean SNR per branch in dB (one value applies to all)
    #[arg(long = "gamma-db", value_delimiter = ',', allow_negative_numbers = true)]
    pub gamma_db: Vec<f64>,
    /// Total SNR per bit in dB, split across branches by --eta
    #[arg(long = "gamma-b-db", allow_negative_numbers = true, conflicts_with = "gamma_db")]
    pub gamma_b_db: Option<f64>,
    /// Energy fraction on branch 1 (the rest is shared equally)
    #[arg(long, requires = "gamma_b_db")]
    pub eta: Option<f64>,
    /// optimum, suboptimum or both
    #[arg(long)]
    pub detector: Option<String>,
    /// Report the plain Chernoff bound instead of the halved one
    #[arg(long)]
    pub raw_bound: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Flat TOML file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Diversity order [default: 2]
    #[arg(short = 'L', long = "L")]
    pub order: Option<usize>,
    /// Correlation values [default: 0.975]
    #[arg(long, value_delimiter = ',')]
    pub rho: Vec<f64>,
    /// Branch-1 energy fractions [default: 0.1,0.5001]
    #[arg(long, value_delimiter = ',')]
    pub eta: Vec<f64>,
    /// Single total SNR in dB (instead of a range)
    #[arg(long = "gamma-b-db", allow_negative_numbers = true, conflicts_with_all = ["gamma_b_start", "gamma_b_stop", "gamma_b_step"])]
    pub gamma_b_db: Option<f64>,
    /// First total SNR in dB [default: 0]
    #[arg(long = "gamma-b-start", allow_negative_numbers = true)]
    pub gamma_b_start: Option<f64>,
    /// Last total SNR in dB, inclusive [default: 30]
    #[arg(long = "gamma-b-stop", allow_negative_numbers = true)]
    pub gamma_b_stop: Option<f64>,
    /// SNR step in dB [default: 1]
    #[arg(long = "gamma-b-step")]
    pub gamma_b_step: Option<f64>,
    /// optimum, suboptimum or both [default: both]
    #[arg(long)]
    pub detector: Option<String>,
    /// Any of exact, chernoff, chernoff_improved, mc
    /// [default: exact,chernoff_improved for sweep; exact,mc for simulate]
    #[arg(long, value_delimiter = ',')]
    pub outputs: Vec<String>,
    /// Monte Carlo trials per grid point
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base seed; row i uses seed + i [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: $DIVDPSK_WORKERS or all cores]
    #[arg(long)]
    pub workers: Option<usize>,
    /// Stop a point early once the 95% half-width is below this fraction of
    /// the estimate (results then depend on the worker count)
    #[arg(long = "early-stop")]
    pub early_stop: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DopplerArgs {
    /// jakes, gaussian, rectangular or tabulated
    #[arg(long)]
    pub spectrum: String,
    /// Maximum Doppler frequency times bit duration
    #[arg(long)]
    pub fdt: Option<f64>,
    /// Covariance table (lag, r) for --spectrum tabulated
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Starting Gauss-Legendre order; doubled until converged
    #[arg(long = "quad-order", default_value_t = 64)]
    pub quad_order: usize,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Figure number, 1 or 2
    #[arg(long)]
    pub figure: u32,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Bep(args) => {
            let format = args.format;
            emit(&bep_rows(args)?, format, out)
        }
        Command::Sweep(args) => {
            let format = args.format;
            emit(&grid_spec(args, false)?.run()?, format, out)
        }
        Command::Simulate(args) => {
            let format = args.format;
            emit(&grid_spec(args, true)?.run()?, format, out)
        }
        Command::DopplerRho(args) => {
            let rho = doppler_rho(&args)?;
            writeln!(out, "{}", significant(rho, 12))?;
            Ok(())
        }
        Command::ReproduceFig(args) => emit(&figure(args.figure)?.run()?, args.format, out),
    }
}

fn emit(rows: &[ResultRow], format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, out),
    }
}

fn detectors(name: Option<&str>, default: &[Detector]) -> Result<Vec<Detector>, CliError> {
    match name {
        None => Ok(default.to_vec()),
        Some(s) if s.trim().eq_ignore_ascii_case("both") => Ok(Detector::ALL.to_vec()),
        Some(s) => Ok(vec![s.parse()?]),
    }
}

fn list_or(flag: Vec<f64>, file: Option<OneOrMany>) -> Vec<f64> {
    if flag.is_empty() {
        file.map(OneOrMany::into_vec).unwrap_or_default()
    } else {
        flag
    }
}

/// Stretches a single value to `order` entries; other lengths must match.
fn per_branch(values: Vec<f64>, order: usize, name: &str) -> Result<Vec<f64>, CliError> {
    match values.len() {
        1 => Ok(vec![values[0]; order]),
        n if n == order => Ok(values),
        0 => Err(CliError::Config(format!("--{name} is required"))),
        n => Err(CliError::Config(format!("--{name} has {n} values for L = {order}"))),
    }
}

fn bep_rows(args: BepArgs) -> Result<Vec<ResultRow>, CliError> {
    let file = ConfigFile::load_optional(args.config.as_deref())?;
    let rho = list_or(args.rho, file.rho);
    let from_flags = !args.gamma_db.is_empty() || args.gamma_b_db.is_some();
    let gamma_db = list_or(args.gamma_db, if from_flags { None } else { file.gamma_db });
    let gamma_b_db = args.gamma_b_db.or(if from_flags { None } else { file.gamma_b_db });
    let eta = args.eta.or(file.eta.map(OneOrMany::into_vec).and_then(|v| single(v, "eta").transpose()).transpose()?);
    let raw_bound = args.raw_bound || file.raw_bound.unwrap_or(false);

    let order = args.order.or(file.order).unwrap_or_else(|| {
        if gamma_b_db.is_some() {
            2
        } else {
            rho.len().max(gamma_db.len()).max(1)
        }
    });
    let gammas = match (gamma_b_db, gamma_db.is_empty()) {
        (Some(_), false) => return Err(CliError::Config("give either gamma_db or gamma_b_db, not both".into())),
        (Some(total), true) => split_energy(total, eta.unwrap_or(1.0 / order as f64), order)?,
        (None, false) => per_branch(gamma_db, order, "gamma-db")?.into_iter().map(db_to_linear).collect(),
        (None, true) => return Err(CliError::Config("one of --gamma-db or --gamma-b-db is required".into())),
    };
    if eta.is_some() && gamma_b_db.is_none() {
        return Err(CliError::Config("eta only applies together with gamma_b_db".into()));
    }
    let rho = per_branch(rho, order, "rho")?;
    let branches: Vec<_> = rho.iter().zip(&gammas).map(|(&r, &g)| BranchParams::new(r, g)).collect();
    let outputs =
        Outputs { exact: true, bound: Some(if raw_bound { BoundKind::Raw } else { BoundKind::Improved }), mc: None };
    detectors(args.detector.as_deref().or(file.detector.as_deref()), &[Detector::Optimum])?
        .into_iter()
        .map(|det| {
            let mut row = evaluate(&DiversityConfig::new(branches.clone(), det), &outputs, 0)?;
            row.gamma_b_db = gamma_b_db;
            row.eta = gamma_b_db.and(eta);
            Ok(row)
        })
        .collect()
}

fn single(values: Vec<f64>, name: &str) -> Result<Option<f64>, CliError> {
    match values.as_slice() {
        [] => Ok(None),
        [x] => Ok(Some(*x)),
        _ => Err(CliError::Config(format!("{name} takes a single value here"))),
    }
}

fn grid_spec(args: GridArgs, simulate: bool) -> Result<SweepSpec, CliError> {
    let file = ConfigFile::load_optional(args.config.as_deref())?;
    let gamma_b_db = match args.gamma_b_db {
        Some(g) => vec![g],
        None if args.gamma_b_start.is_none() && args.gamma_b_stop.is_none() && args.gamma_b_step.is_none() => {
            match file.gamma_b_db {
                Some(g) => vec![g],
                None => db_range(
                    file.gamma_b_start.unwrap_or(0.0),
                    file.gamma_b_stop.unwrap_or(30.0),
                    file.gamma_b_step.unwrap_or(1.0),
                )?,
            }
        }
        None => db_range(
            args.gamma_b_start.or(file.gamma_b_start).unwrap_or(0.0),
            args.gamma_b_stop.or(file.gamma_b_stop).unwrap_or(30.0),
            args.gamma_b_step.or(file.gamma_b_step).unwrap_or(1.0),
        )?,
    };
    let mut eta = list_or(args.eta, file.eta);
    if eta.is_empty() {
        eta = vec![0.1, 0.5001];
    }
    let mut rho = list_or(args.rho, file.rho);
    if rho.is_empty() {
        rho = vec![0.975];
    }

    let trials = args.trials.or(file.trials);
    let mc = match trials {
        Some(0) => return Err(CliError::Config("trials must be at least 1".into())),
        Some(trials) => Some(McSettings {
            trials,
            seed: args.seed.or(file.seed).unwrap_or(1),
            workers: match args.workers.or(file.workers) {
                Some(0) => return Err(CliError::Config("workers must be at least 1".into())),
                Some(w) => w,
                None => default_workers()?,
            },
            early_stop: match args.early_stop.or(file.early_stop) {
                Some(t) if t.is_nan() || t <= 0.0 => {
                    return Err(CliError::Config("early-stop tolerance must be positive".into()))
                }
                Some(rel_tol) => Some(EarlyStop { rel_tol, ..EarlyStop::default() }),
                None => None,
            },
        }),
        None => None,
    };
    let mut names = if args.outputs.is_empty() { file.outputs.unwrap_or_default() } else { args.outputs };
    if names.is_empty() {
        names =
            if simulate { vec!["exact".into(), "mc".into()] } else { vec!["exact".into(), "chernoff_improved".into()] };
    }
    if simulate && !names.iter().any(|n| n.trim().eq_ignore_ascii_case("mc")) {
        names.push("mc".into());
    }
    let spec = SweepSpec {
        gamma_b_db,
        eta,
        rho,
        order: args.order.or(file.order).unwrap_or(2),
        detectors: detectors(args.detector.as_deref().or(file.detector.as_deref()), &Detector::ALL)?,
        outputs: Outputs::from_names(&names, mc)?,
    };
    spec.validate()?;
    Ok(spec)
}

fn doppler_rho(args: &DopplerArgs) -> Result<f64, CliError> {
    let kind: DopplerKind = args.spectrum.parse()?;
    let spec = match kind {
        DopplerKind::Tabulated => {
            let path: &Path =
                args.file.as_deref().ok_or_else(|| CliError::Config("--spectrum tabulated needs --file".into()))?;
            DopplerSpec::tabulated(load_covariance_table(path)?)
        }
        _ => {
            let fdt = args.fdt.ok_or_else(|| CliError::Config(format!("--spectrum {} needs --fdt", args.spectrum)))?;
            DopplerSpec::parametric(kind, fdt)?
        }
    };
    Ok(rho_from_doppler(&spec, args.quad_order)?)
}

/// Fixed-point text with `digits` significant digits.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    // the exponent after rounding to `digits` places decides the decimals
    let sci = format!("{x:.prec$e}", prec = digits.saturating_sub(1));
    let exponent: i64 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (digits as i64 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant(1.0, 12), "1.00000000000");
        assert_eq!(significant(0.9755281334013058, 12), "0.975528133401");
        assert_eq!(significant(-0.0123456789012345, 12), "-0.0123456789012");
        assert_eq!(significant(0.99999999999999, 12), "1.00000000000");
        assert_eq!(significant(0.0, 12), "0");
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
