//! Deterministic Monte Carlo engine.
//!
//! Every run draws its own bivariate-normal dataset from a stream keyed by
//! `(seed, run index)` (see [`rng`]). The dataset of a run depends on the
//! seed, the run index, `n`, `delta` and the correlation setting, but not on
//! the matched proportion or the method, so all methods and proportions of a
//! cell are evaluated on shared datasets. Tallies are integer counts, which
//! makes every result independent of the executor.

mod calibrate;
mod compare;
mod exec;
mod grid;
pub mod rng;

use alloc::vec::Vec;

pub use calibrate::{
    alpha_target_search, calibrate_grid, null_rejection_rates, select_closest, NullRejectionRates, QUANTILE_GRID,
};
pub use compare::{
    error_curve, error_curves, power_gap, run_comparison, ComparisonDesign, ComparisonRow, ErrorCurve, GapMethod,
    PowerGapRow, CURVE_RHOS,
};
pub use exec::{Executor, Sequential};
pub use grid::{ConservativeEntry, GridEntry, QuantileGrid};

use crate::dataset::{DatasetView, PartiallyMatchedDataset};
use crate::error::{domain, Error, Result};
use crate::hypothesis::{correlated_t, matched_paired_t, pearson_t, quantile_t, two_sample_t, Method, TestResult};
use rand_core::RngCore;
use rng::{normal_pair, run_stream, unit_f64};

pub const DEFAULT_RUNS: u64 = 10_000;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 1995;

/// Parameters of the bivariate normal generating `(x, y)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BivariateParams {
    pub mu_x: f64,
    pub mu_y: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub rho: f64,
}

impl BivariateParams {
    pub fn new(mu_x: f64, mu_y: f64, sigma_x: f64, sigma_y: f64, rho: f64) -> Result<Self> {
        if !(mu_x.is_finite() && mu_y.is_finite()) {
            return Err(domain("means must be finite"));
        }
        if !(sigma_x > 0.0 && sigma_y > 0.0 && sigma_x.is_finite() && sigma_y.is_finite()) {
            return Err(domain("standard deviations must be positive"));
        }
        if !(rho > -1.0 && rho < 1.0) {
            return Err(domain("rho must lie strictly between -1 and 1"));
        }
        Ok(Self { mu_x, mu_y, sigma_x, sigma_y, rho })
    }

    /// Unit variances with mean difference `delta = mu_x - mu_y`.
    pub fn standard(delta: f64, rho: f64) -> Result<Self> {
        Self::new(delta, 0.0, 1.0, 1.0, rho)
    }

    pub fn delta(&self) -> f64 {
        self.mu_x - self.mu_y
    }
}

/// Correlation of a scenario: fixed, or drawn uniformly per run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RhoSpec {
    Fixed(f64),
    Uniform { lo: f64, hi: f64 },
}

impl RhoSpec {
    pub const COMPARISON_DEFAULT: RhoSpec = RhoSpec::Uniform { lo: 0.1, hi: 0.9 };

    pub fn validate(&self) -> Result<()> {
        let ok = |r: f64| r > -1.0 && r < 1.0;
        match *self {
            RhoSpec::Fixed(r) if ok(r) => Ok(()),
            RhoSpec::Uniform { lo, hi } if ok(lo) && ok(hi) && lo <= hi => Ok(()),
            _ => Err(domain("correlation setting must lie in (-1, 1) with lo <= hi")),
        }
    }

    /// Fixed values consume no randomness.
    pub fn draw<R: RngCore>(&self, rng: &mut R) -> f64 {
        match *self {
            RhoSpec::Fixed(r) => r,
            RhoSpec::Uniform { lo, hi } => lo + (hi - lo) * unit_f64(rng),
        }
    }
}

impl core::fmt::Display for RhoSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RhoSpec::Fixed(r) => write!(f, "{r}"),
            RhoSpec::Uniform { lo, hi } => write!(f, "{lo}..{hi}"),
        }
    }
}

impl core::str::FromStr for RhoSpec {
    type Err = Error;

    /// `"0.5"` or `"0.1..0.9"`.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| domain(alloc::format!("invalid correlation `{t}`")));
        let spec = match s.split_once("..") {
            Some((lo, hi)) => RhoSpec::Uniform { lo: parse(lo)?, hi: parse(hi)? },
            None => RhoSpec::Fixed(parse(s)?),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationConfig {
    pub n: usize,
    pub prop_matched: f64,
    pub rho: RhoSpec,
    pub delta: f64,
    pub n_runs: u64,
    pub seed: u64,
    pub alpha: f64,
}

impl SimulationConfig {
    pub fn new(n: usize, prop_matched: f64, rho: RhoSpec, delta: f64) -> Self {
        Self { n, prop_matched, rho, delta, n_runs: DEFAULT_RUNS, seed: DEFAULT_SEED, alpha: DEFAULT_ALPHA }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(domain("n must be at least 2"));
        }
        if self.n_runs == 0 {
            return Err(domain("n_runs must be at least 1"));
        }
        check_prop(self.prop_matched)?;
        check_alpha(self.alpha)?;
        if !self.delta.is_finite() {
            return Err(domain("delta must be finite"));
        }
        self.rho.validate()
    }
}

pub(crate) fn check_prop(prop: f64) -> Result<()> {
    if (0.0..=1.0).contains(&prop) {
        Ok(())
    } else {
        Err(domain("matched proportion must lie in [0, 1]"))
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(domain("alpha must lie in (0, 1]"))
    }
}

/// Rejection rate of one method in one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationSummary {
    pub method: Method,
    pub rejection_rate: f64,
    /// Binomial Monte Carlo standard error of `rejection_rate`.
    pub mc_se: f64,
    pub rejections: u64,
    /// Runs on which the method could be computed.
    pub n_effective: u64,
    pub n_runs: u64,
}

impl SimulationSummary {
    /// `None` when no run was estimable.
    pub fn from_counts(method: Method, rejections: u64, n_effective: u64, n_runs: u64) -> Option<Self> {
        if n_effective == 0 {
            return None;
        }
        let rate = rejections as f64 / n_effective as f64;
        Some(Self {
            method,
            rejection_rate: rate,
            mc_se: libm::sqrt(rate * (1.0 - rate) / n_effective as f64),
            rejections,
            n_effective,
            n_runs,
        })
    }

    /// Whether `target` lies within `k` Monte Carlo standard errors.
    pub fn within_se(&self, target: f64, k: f64) -> bool {
        (self.rejection_rate - target).abs() <= k * self.mc_se
    }
}

/// Matched pairs for a proportion: `floor(prop * n)`.
pub fn matched_count(n: usize, prop: f64) -> usize {
    let m = libm::floor(prop * n as f64);
    if m <= 0.0 {
        0
    } else {
        (m as usize).min(n)
    }
}

/// Draws `n` pairs `x = mu_x + sigma_x z1`, `y = mu_y + sigma_y (rho z1 + sqrt(1 - rho²) z2)`.
pub fn sample_pairs<R: RngCore>(params: &BivariateParams, n: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let c = libm::sqrt(1.0 - params.rho * params.rho);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let (z1, z2) = normal_pair(rng);
        x.push(params.mu_x + params.sigma_x * z1);
        y.push(params.mu_y + params.sigma_y * (params.rho * z1 + c * z2));
    }
    (x, y)
}

/// Draws a dataset whose first `floor(prop_matched * n)` pairs are matched.
pub fn sample_dataset<R: RngCore>(
    params: &BivariateParams,
    n: usize,
    prop_matched: f64,
    rng: &mut R,
) -> Result<PartiallyMatchedDataset> {
    check_prop(prop_matched)?;
    let (x, y) = sample_pairs(params, n, rng);
    PartiallyMatchedDataset::from_columns(x, y, matched_count(n, prop_matched))
}

/// Dataset of one run: the correlation (drawn first when random) and the
/// columns. `delta` shifts the pre arm.
pub(crate) fn run_columns(seed: u64, run: u64, n: usize, delta: f64, rho: &RhoSpec) -> (f64, Vec<f64>, Vec<f64>) {
    let mut rng = run_stream(seed, run);
    let r = rho.draw(&mut rng);
    let params = BivariateParams { mu_x: delta, mu_y: 0.0, sigma_x: 1.0, sigma_y: 1.0, rho: r };
    let (x, y) = sample_pairs(&params, n, &mut rng);
    (r, x, y)
}

/// Evaluates one method on a view; `q` for the quantile test, `true_rho`
/// for the known-correlation test.
pub(crate) fn evaluate(view: DatasetView<'_>, method: Method, q: Option<f64>, true_rho: f64) -> Result<TestResult> {
    match method {
        Method::TwoSample => two_sample_t(view),
        Method::MatchedPaired => matched_paired_t(view),
        Method::PearsonT => pearson_t(view),
        Method::QuantileT => quantile_t(view, q.ok_or_else(|| Error::Config("quantile test needs q".into()))?),
        Method::CorrelatedKnownRho => correlated_t(view, true_rho),
    }
}

/// Rejection rate of `method` over `config.n_runs` simulated datasets.
///
/// `q` must be given exactly when `method` is [`Method::QuantileT`].
/// [`Method::CorrelatedKnownRho`] uses each run's true correlation. Runs on
/// which the method cannot be computed are left out of `n_effective`.
pub fn run_simulation<E: Executor>(
    config: &SimulationConfig,
    method: Method,
    q: Option<f64>,
    exec: &E,
) -> Result<SimulationSummary> {
    config.validate()?;
    match (method, q) {
        (Method::QuantileT, None) => return Err(Error::Config("quantile test needs q".into())),
        (Method::QuantileT, Some(q)) if !(q > 0.0 && q < 1.0) => {
            return Err(domain("quantile must lie strictly between 0 and 1"))
        }
        (Method::QuantileT, Some(_)) => {}
        (_, Some(_)) => return Err(Error::Config("q is only used by the quantile test".into())),
        (_, None) => {}
    }
    let m = matched_count(config.n, config.prop_matched);
    let counts = exec.sum_runs(config.n_runs, 2, |run, acc| {
        let (rho, x, y) = run_columns(config.seed, run, config.n, config.delta, &config.rho);
        let view = DatasetView::new_unchecked(&x, &y, m);
        if let Ok(res) = evaluate(view, method, q, rho) {
            acc[0] += 1;
            acc[1] += u64::from(res.p_value < config.alpha);
        }
    });
    SimulationSummary::from_counts(method, counts[1], counts[0], config.n_runs)
        .ok_or(Error::EmptyResult { n_runs: config.n_runs })
}
