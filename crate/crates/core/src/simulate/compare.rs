//! Method comparison, Type I error curves and the oracle power gap.

use alloc::vec;
use alloc::vec::Vec;

use super::grid::QuantileGrid;
use super::{check_alpha, check_prop, evaluate, matched_count, run_columns, Executor, RhoSpec, SimulationSummary};
use crate::dataset::DatasetView;
use crate::error::{domain, Error, Result};
use crate::hypothesis::{paired_t, two_sample_t, Method};
use crate::logistic::{fit_logistic_1d, LogisticFit};

/// Design of a comparison study.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonDesign {
    pub ns: Vec<usize>,
    pub props: Vec<f64>,
    pub deltas: Vec<f64>,
    pub rho: RhoSpec,
    pub alpha: f64,
    pub n_runs: u64,
    pub seed: u64,
}

/// One `(n, prop, delta, method)` cell; `summary` is `None` when the method
/// was not estimable on any run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonRow {
    pub n: usize,
    pub prop: f64,
    pub m: usize,
    pub delta: f64,
    pub method: Method,
    /// Quantile used by the quantile test.
    pub q: Option<f64>,
    pub summary: Option<SimulationSummary>,
}

/// Rejection rates of the four compared methods on shared datasets.
///
/// The quantile test uses the grid's conservative quantile for each
/// `(n, prop)`. A cell missing from the grid is a configuration error; a
/// cell marked not calculable yields `None` summaries for the quantile test.
pub fn run_comparison<E: Executor>(
    design: &ComparisonDesign,
    grid: &QuantileGrid,
    exec: &E,
) -> Result<Vec<ComparisonRow>> {
    check_alpha(design.alpha)?;
    design.rho.validate()?;
    if design.n_runs == 0 {
        return Err(domain("n_runs must be at least 1"));
    }
    if design.ns.iter().any(|&n| n < 2) {
        return Err(domain("n must be at least 2"));
    }
    for &p in &design.props {
        check_prop(p)?;
    }
    let mut quantiles = Vec::with_capacity(design.ns.len() * design.props.len());
    for &n in &design.ns {
        for &prop in &design.props {
            let q = grid.conservative(n, prop).ok_or(Error::MissingGridEntry { n, prop })?;
            quantiles.push(q);
        }
    }

    let methods = Method::COMPARED;
    let width = design.props.len() * methods.len() * 2;
    let mut rows = Vec::new();
    for (ni, &n) in design.ns.iter().enumerate() {
        let ms: Vec<usize> = design.props.iter().map(|&p| matched_count(n, p)).collect();
        let qs = &quantiles[ni * design.props.len()..(ni + 1) * design.props.len()];
        for &delta in &design.deltas {
            let counts = exec.sum_runs(design.n_runs, width, |run, acc| {
                let (rho, x, y) = run_columns(design.seed, run, n, delta, &design.rho);
                for (pi, &m) in ms.iter().enumerate() {
                    let view = DatasetView::new_unchecked(&x, &y, m);
                    for (mi, &method) in methods.iter().enumerate() {
                        if method == Method::QuantileT && qs[pi].is_none() {
                            continue;
                        }
                        if let Ok(res) = evaluate(view, method, qs[pi], rho) {
                            let slot = (pi * methods.len() + mi) * 2;
                            acc[slot] += 1;
                            acc[slot + 1] += u64::from(res.p_value < design.alpha);
                        }
                    }
                }
            });
            for (pi, (&prop, &m)) in design.props.iter().zip(&ms).enumerate() {
                for (mi, &method) in methods.iter().enumerate() {
                    let slot = (pi * methods.len() + mi) * 2;
                    rows.push(ComparisonRow {
                        n,
                        prop,
                        m,
                        delta,
                        method,
                        q: if method == Method::QuantileT { qs[pi] } else { None },
                        summary: SimulationSummary::from_counts(method, counts[slot + 1], counts[slot], design.n_runs),
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Correlations at which error curves are evaluated: 0.10, 0.11, ..., 0.90.
pub const CURVE_RHOS: [f64; 81] = {
    let mut out = [0.0; 81];
    let mut i = 0;
    while i < 81 {
        out[i] = (10 + i) as f64 / 100.0;
        i += 1;
    }
    out
};

/// Logistic fit of null rejection against the run's correlation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorCurve {
    pub method: Method,
    pub fit: LogisticFit,
    /// Runs on which the method was estimable.
    pub n_effective: u64,
    pub points: Vec<(f64, f64)>,
}

/// Expected Type I error as a function of correlation for several methods.
///
/// Each run draws its correlation from `rho` (uniform in practice) and a
/// null dataset; every method is tested on it, and a one-covariate logistic
/// regression of "rejected" on the correlation gives the curve, evaluated on
/// [`CURVE_RHOS`].
#[allow(clippy::too_many_arguments)]
pub fn error_curves<E: Executor>(
    n: usize,
    prop: f64,
    methods: &[Method],
    grid: &QuantileGrid,
    rho: RhoSpec,
    alpha: f64,
    n_runs: u64,
    seed: u64,
    exec: &E,
) -> Result<Vec<ErrorCurve>> {
    check_alpha(alpha)?;
    check_prop(prop)?;
    rho.validate()?;
    if n < 2 || n_runs == 0 {
        return Err(domain("error curves need n >= 2 and at least one run"));
    }
    let q = if methods.contains(&Method::QuantileT) {
        match grid.conservative(n, prop) {
            None => return Err(Error::MissingGridEntry { n, prop }),
            Some(None) => return Err(Error::NotCalculable { n, prop }),
            Some(q) => q,
        }
    } else {
        None
    };
    let m = matched_count(n, prop);
    let outcomes: Vec<(f64, Vec<Option<bool>>)> = exec.map_runs(n_runs, |run| {
        let (r, x, y) = run_columns(seed, run, n, 0.0, &rho);
        let view = DatasetView::new_unchecked(&x, &y, m);
        let rejected =
            methods.iter().map(|&method| evaluate(view, method, q, r).ok().map(|res| res.p_value < alpha)).collect();
        (r, rejected)
    });

    methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let (xs, ys): (Vec<f64>, Vec<bool>) =
                outcomes.iter().filter_map(|(r, rej)| rej[mi].map(|b| (*r, b))).unzip();
            if xs.is_empty() {
                return Err(Error::EmptyResult { n_runs });
            }
            let fit = fit_logistic_1d(&xs, &ys)?;
            Ok(ErrorCurve {
                method,
                fit,
                n_effective: xs.len() as u64,
                points: CURVE_RHOS.iter().map(|&r| (r, fit.predict(r))).collect(),
            })
        })
        .collect()
}

/// Single-method form of [`error_curves`] with correlations uniform on
/// `[0.1, 0.9]`.
#[allow(clippy::too_many_arguments)]
pub fn error_curve<E: Executor>(
    n: usize,
    prop: f64,
    method: Method,
    grid: &QuantileGrid,
    alpha: f64,
    n_runs: u64,
    seed: u64,
    exec: &E,
) -> Result<ErrorCurve> {
    let mut curves = error_curves(n, prop, &[method], grid, RhoSpec::COMPARISON_DEFAULT, alpha, n_runs, seed, exec)?;
    Ok(curves.remove(0))
}

/// Methods in the oracle power-gap study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GapMethod {
    /// Paired t on all `n` pairs, as if every pairing were known.
    #[cfg_attr(feature = "serde", serde(rename = "oracle_paired"))]
    Oracle,
    MatchedPaired,
    TwoSample,
}

impl GapMethod {
    pub const ALL: [GapMethod; 3] = [GapMethod::Oracle, GapMethod::MatchedPaired, GapMethod::TwoSample];

    pub fn label(self) -> &'static str {
        match self {
            GapMethod::Oracle => "oracle_paired",
            GapMethod::MatchedPaired => "matched_paired",
            GapMethod::TwoSample => "two_sample",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerGapRow {
    pub prop: f64,
    pub m: usize,
    pub method: GapMethod,
    pub type1: Option<SimulationSummary>,
    pub power: Option<SimulationSummary>,
}

/// Power and Type I error of the oracle paired t, the matched-subset paired
/// t and the two-sample t against the matched proportion, at a fixed
/// correlation. Null and alternative datasets of a run share their normal
/// draws.
#[allow(clippy::too_many_arguments)]
pub fn power_gap<E: Executor>(
    n: usize,
    rho: f64,
    delta: f64,
    props: &[f64],
    alpha: f64,
    n_runs: u64,
    seed: u64,
    exec: &E,
) -> Result<Vec<PowerGapRow>> {
    check_alpha(alpha)?;
    let rho = RhoSpec::Fixed(rho);
    rho.validate()?;
    if n < 2 || n_runs == 0 {
        return Err(domain("power gap needs n >= 2 and at least one run"));
    }
    for &p in props {
        check_prop(p)?;
    }
    let ms: Vec<usize> = props.iter().map(|&p| matched_count(n, p)).collect();
    let k = GapMethod::ALL.len();
    // [effect][prop][method][estimable, rejected]
    let width = 2 * props.len() * k * 2;
    let counts = exec.sum_runs(n_runs, width, |run, acc| {
        for (ei, d) in [0.0, delta].into_iter().enumerate() {
            let (_, x, y) = run_columns(seed, run, n, d, &rho);
            let oracle = paired_t(&x, &y);
            let two = two_sample_t(DatasetView::new_unchecked(&x, &y, n));
            for (pi, &m) in ms.iter().enumerate() {
                let matched = paired_t(&x[..m], &y[..m]);
                for (mi, res) in [&oracle, &matched, &two].into_iter().enumerate() {
                    if let Ok(res) = res {
                        let slot = ((ei * props.len() + pi) * k + mi) * 2;
                        acc[slot] += 1;
                        acc[slot + 1] += u64::from(res.p_value < alpha);
                    }
                }
            }
        }
    });
    let summary = |ei: usize, pi: usize, mi: usize, method: Method| {
        let slot = ((ei * props.len() + pi) * k + mi) * 2;
        SimulationSummary::from_counts(method, counts[slot + 1], counts[slot], n_runs)
    };
    let mut rows = vec![];
    for (pi, (&prop, &m)) in props.iter().zip(&ms).enumerate() {
        for (mi, &gm) in GapMethod::ALL.iter().enumerate() {
            let method = match gm {
                GapMethod::TwoSample => Method::TwoSample,
                _ => Method::MatchedPaired,
            };
            rows.push(PowerGapRow {
                prop,
                m,
                method: gm,
                type1: summary(0, pi, mi, method),
                power: summary(1, pi, mi, method),
            });
        }
    }
    Ok(rows)
}
