//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use partmatch_core::simulate::{
    calibrate_grid, error_curves, matched_count, power_gap, run_comparison, ComparisonDesign, QuantileGrid, RhoSpec,
    DEFAULT_ALPHA, DEFAULT_RUNS, DEFAULT_SEED,
};
use partmatch_core::{build_dataset, run_test, Alternative, Method};

use crate::error::{exit, CliError};
use crate::exec::{with_threads, Rayon};
use crate::io::{read_grid_path, read_records_path, ParseOptions};
use crate::report::{
    render_comparison, render_curves, render_grid, render_power_gap, render_test, ComparisonReport, CurveReport,
    Format, PowerGapReport, QSource, TestReport,
};

/// Correlations of the default calibration design.
pub const CALIBRATION_RHOS: [f64; 4] = [0.1, 0.25, 0.5, 0.9];

#[derive(Debug, Parser)]
#[command(name = "partmatch", version, about = "Mean-difference tests for partially matched pre/post data")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Base seed of the simulation streams.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo runs per scenario.
    #[arg(long, global = true, default_value_t = DEFAULT_RUNS)]
    pub runs: u64,
    /// Nominal significance level.
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Output format; inferred from the `--out` extension when omitted,
    /// text otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (defaults to one per core). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AltArg {
    TwoSided,
    Greater,
    Less,
}

impl From<AltArg> for Alternative {
    fn from(a: AltArg) -> Self {
        match a {
            AltArg::TwoSided => Alternative::TwoSided,
            AltArg::Greater => Alternative::Greater,
            AltArg::Less => Alternative::Less,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test the pre/post mean difference on a survey CSV (`id,phase,value`).
    Test(TestArgs),
    /// Find alpha-targeted quantiles by simulation and write a grid.
    Calibrate(CalibrateArgs),
    /// Compare rejection rates of the four methods.
    Table2(Table2Args),
    /// Type I error against correlation, from a logistic fit per method.
    Curve(CurveArgs),
    /// Power and Type I error of oracle, matched-paired and two-sample t.
    Powergap(PowerGapArgs),
}

#[derive(Debug, Args)]
pub struct TestArgs {
    pub input: PathBuf,
    /// two-sample, paired, quantile, pearson or correlated.
    #[arg(long, default_value = "quantile")]
    pub method: Method,
    /// Correlation quantile for the quantile test.
    #[arg(long)]
    pub q: Option<f64>,
    /// Known correlation for the correlated test.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Grid supplying the quantile when `--q` is absent.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AltArg::TwoSided)]
    pub alternative: AltArg,
    /// Keep identifier case instead of lower-casing.
    #[arg(long)]
    pub no_fold_case: bool,
    #[arg(long, default_value = "id")]
    pub id_col: String,
    #[arg(long, default_value = "phase")]
    pub phase_col: String,
    #[arg(long, default_value = "value")]
    pub value_col: String,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long = "n", value_delimiter = ',', default_values_t = [20usize, 50, 100, 200])]
    pub ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 0.75, 0.9])]
    pub props: Vec<f64>,
    /// Fixed values (`0.5`) or uniform ranges (`0.1..0.9`).
    #[arg(long, value_delimiter = ',', default_values_t = CALIBRATION_RHOS.map(RhoSpec::Fixed))]
    pub rhos: Vec<RhoSpec>,
}

#[derive(Debug, Args)]
pub struct Table2Args {
    /// Quantile grid; calibrated on the fly over the default correlations when absent.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long = "n", value_delimiter = ',', default_values_t = [20usize, 50, 100, 200])]
    pub ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 0.9])]
    pub props: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.25, 0.5])]
    pub deltas: Vec<f64>,
    /// Correlation of the simulated data, drawn per run when a range.
    #[arg(long, default_value_t = RhoSpec::COMPARISON_DEFAULT)]
    pub rho: RhoSpec,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub prop: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [Method::QuantileT, Method::PearsonT, Method::TwoSample])]
    pub methods: Vec<Method>,
    /// Quantile for the quantile test; overrides `--grid`.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, default_value_t = RhoSpec::COMPARISON_DEFAULT)]
    pub rho: RhoSpec,
}

#[derive(Debug, Args)]
pub struct PowerGapArgs {
    #[arg(long, default_value_t = 75)]
    pub n: usize,
    #[arg(long, default_value_t = 0.65)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])]
    pub props: Vec<f64>,
}

impl Common {
    /// Explicit `--format`, else the `--out` extension, else `fallback`.
    pub fn resolved_format(&self, fallback: Format) -> Format {
        let from_ext = self.out.as_deref().and_then(|p| p.extension()).and_then(|e| {
            let e = e.to_string_lossy().to_ascii_lowercase();
            match e.as_str() {
                "csv" => Some(Format::Csv),
                "json" => Some(Format::Json),
                _ => None,
            }
        });
        self.format.or(from_ext).unwrap_or(fallback)
    }
}

/// Conservative grid for the given cells, calibrated over the default
/// correlations with the common settings.
fn calibrate_cells(ns: &[usize], props: &[f64], common: &Common) -> Result<QuantileGrid, CliError> {
    let rhos = CALIBRATION_RHOS.map(RhoSpec::Fixed);
    Ok(calibrate_grid(ns, props, &rhos, common.alpha, common.runs, common.seed, &Rayon)?)
}

fn cmd_test(a: &TestArgs, common: &Common) -> Result<String, CliError> {
    let opts = ParseOptions {
        id_col: a.id_col.clone(),
        phase_col: a.phase_col.clone(),
        value_col: a.value_col.clone(),
        fold_case: !a.no_fold_case,
    };
    let records = read_records_path(&a.input, &opts)?;
    let (ds, matching) = build_dataset(&records)?;
    let (n, m) = (ds.n(), ds.m());

    if a.q.is_some() && a.method != Method::QuantileT {
        return Err(CliError::Usage("--q only applies to the quantile test".into()));
    }
    if a.rho.is_some() && a.method != Method::CorrelatedKnownRho {
        return Err(CliError::Usage("--rho only applies to the correlated test".into()));
    }
    let (param, q_source) = match a.method {
        Method::QuantileT => match (a.q, &a.grid) {
            (Some(q), _) => (Some(q), Some(QSource::Argument)),
            (None, Some(path)) => {
                let grid = read_grid_path(path)?;
                (Some(grid.lookup(n, m as f64 / n as f64)?), Some(QSource::Grid))
            }
            (None, None) => return Err(CliError::Usage("the quantile test needs --q or --grid".into())),
        },
        Method::CorrelatedKnownRho => match a.rho {
            Some(rho) => (Some(rho), None),
            None => return Err(CliError::Usage("the correlated test needs --rho".into())),
        },
        _ => (None, None),
    };
    let res = run_test(&ds, a.method, param)?;
    let alternative = Alternative::from(a.alternative);
    let report = TestReport {
        method: a.method,
        alternative,
        statistic: res.statistic,
        df: res.df,
        p_value: res.p_value_for(alternative),
        rho_used: res.rho_used,
        q: if a.method == Method::QuantileT { param } else { None },
        q_source,
        n,
        m,
        matching,
    };
    render_test(&report, common.resolved_format(Format::Text))
}

fn cmd_calibrate(a: &CalibrateArgs, common: &Common) -> Result<String, CliError> {
    let grid = calibrate_grid(&a.ns, &a.props, &a.rhos, common.alpha, common.runs, common.seed, &Rayon)?;
    // a grid written to a file is meant to be loaded again
    let fallback = if common.out.is_some() { Format::Csv } else { Format::Text };
    render_grid(&grid, common.resolved_format(fallback))
}

fn cmd_table2(a: &Table2Args, common: &Common) -> Result<String, CliError> {
    let grid = match &a.grid {
        Some(path) => read_grid_path(path)?,
        None => calibrate_cells(&a.ns, &a.props, common)?,
    };
    let design = ComparisonDesign {
        ns: a.ns.clone(),
        props: a.props.clone(),
        deltas: a.deltas.clone(),
        rho: a.rho,
        alpha: common.alpha,
        n_runs: common.runs,
        seed: common.seed,
    };
    let rows = run_comparison(&design, &grid, &Rayon)?;
    let report = ComparisonReport { alpha: common.alpha, n_runs: common.runs, seed: common.seed, rho: a.rho, rows };
    render_comparison(&report, common.resolved_format(Format::Text))
}

fn cmd_curve(a: &CurveArgs, common: &Common) -> Result<String, CliError> {
    let grid = match (a.q, &a.grid) {
        _ if !a.methods.contains(&Method::QuantileT) => QuantileGrid::default(),
        (Some(q), _) => QuantileGrid::from_parts(
            Vec::new(),
            vec![partmatch_core::simulate::ConservativeEntry { n: a.n, prop: a.prop, q_star: Some(q) }],
        )
        .map_err(|e| CliError::Usage(format!("--q: {e}")))?,
        (None, Some(path)) => read_grid_path(path)?,
        (None, None) => calibrate_cells(&[a.n], &[a.prop], common)?,
    };
    let curves = error_curves(a.n, a.prop, &a.methods, &grid, a.rho, common.alpha, common.runs, common.seed, &Rayon)?;
    let report = CurveReport {
        n: a.n,
        prop: a.prop,
        m: matched_count(a.n, a.prop),
        alpha: common.alpha,
        n_runs: common.runs,
        seed: common.seed,
        rho: a.rho,
        q: if a.methods.contains(&Method::QuantileT) { grid.conservative(a.n, a.prop).flatten() } else { None },
        curves,
    };
    render_curves(&report, common.resolved_format(Format::Text))
}

fn cmd_powergap(a: &PowerGapArgs, common: &Common) -> Result<String, CliError> {
    let rows = power_gap(a.n, a.rho, a.delta, &a.props, common.alpha, common.runs, common.seed, &Rayon)?;
    let report = PowerGapReport {
        n: a.n,
        rho: a.rho,
        delta: a.delta,
        alpha: common.alpha,
        n_runs: common.runs,
        seed: common.seed,
        rows,
    };
    render_power_gap(&report, common.resolved_format(Format::Text))
}

/// Runs a parsed command and returns the rendered output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    if cli.common.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    with_threads(cli.common.threads, || match &cli.command {
        Command::Test(a) => cmd_test(a, &cli.common),
        Command::Calibrate(a) => cmd_calibrate(a, &cli.common),
        Command::Table2(a) => cmd_table2(a, &cli.common),
        Command::Curve(a) => cmd_curve(a, &cli.common),
        Command::Powergap(a) => cmd_powergap(a, &cli.common),
    })
    .map_err(|e| CliError::Other(format!("thread pool: {e}")))?
}

fn emit(output: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, output).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(output.as_bytes()).and_then(|()| stdout.flush()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    match execute(&cli).and_then(|output| emit(&output, cli.common.out.as_deref())) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
