//! Alpha-targeting: choosing the correlation quantile whose null rejection
//! rate is closest to the nominal level.

use alloc::vec::Vec;

use super::grid::{GridEntry, QuantileGrid};
use super::{check_alpha, check_prop, matched_count, run_columns, Executor, RhoSpec};
use crate::dataset::SummaryStats;
use crate::error::{domain, Result};
use crate::hypothesis::{pearson_cor, quantile_from_r, t_prime, Method, MIN_MATCHED_QUANTILE};

/// Candidate quantiles, 0.15 to 0.50 in steps of 0.05.
pub const QUANTILE_GRID: [f64; 8] = [0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50];

/// Null rejection tallies for every grid quantile at one matched proportion.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NullRejectionRates {
    pub prop: f64,
    pub m: usize,
    /// `(q, rejections, n_effective)` per grid quantile; empty when fewer
    /// than four pairs are matched.
    pub tallies: Vec<(f64, u64, u64)>,
}

impl NullRejectionRates {
    pub fn calculable(&self) -> bool {
        !self.tallies.is_empty() && self.tallies.iter().all(|t| t.2 > 0)
    }

    pub fn rates(&self) -> Vec<(f64, f64)> {
        self.tallies.iter().map(|&(q, rej, eff)| (q, rej as f64 / eff as f64)).collect()
    }

    /// Grid quantile closest to `alpha`, or `None` when not calculable.
    pub fn target(&self, alpha: f64) -> Option<f64> {
        self.calculable().then(|| select_closest(&self.rates(), alpha))
    }
}

/// First `q` minimising `|rate - alpha|`, so ties go to the smaller quantile.
pub fn select_closest(rates: &[(f64, f64)], alpha: f64) -> f64 {
    let mut best = rates[0];
    for &cand in &rates[1..] {
        if (cand.1 - alpha).abs() < (best.1 - alpha).abs() {
            best = cand;
        }
    }
    best.0
}

/// Null (`delta = 0`) rejection tallies of the quantile test for every grid
/// quantile and every proportion in `props`, all on the same datasets.
pub fn null_rejection_rates<E: Executor>(
    n: usize,
    props: &[f64],
    rho: RhoSpec,
    alpha: f64,
    n_runs: u64,
    seed: u64,
    exec: &E,
) -> Result<Vec<NullRejectionRates>> {
    if n < 2 || n_runs == 0 {
        return Err(domain("calibration needs n >= 2 and at least one run"));
    }
    check_alpha(alpha)?;
    rho.validate()?;
    for &p in props {
        check_prop(p)?;
    }
    let ms: Vec<usize> = props.iter().map(|&p| matched_count(n, p)).collect();
    let k = QUANTILE_GRID.len();
    let counts = exec.sum_runs(n_runs, props.len() * k * 2, |run, acc| {
        let (_, x, y) = run_columns(seed, run, n, 0.0, &rho);
        let stats = SummaryStats::from_columns(&x, &y);
        for (pi, &m) in ms.iter().enumerate() {
            if m < MIN_MATCHED_QUANTILE {
                continue;
            }
            let Ok(r) = pearson_cor(&x[..m], &y[..m]) else {
                continue;
            };
            for (qi, &q) in QUANTILE_GRID.iter().enumerate() {
                let Ok(est) = quantile_from_r(r, m, q) else {
                    continue;
                };
                if let Ok(res) = t_prime(&stats, est.r_q, Method::QuantileT, Some(est.r_q)) {
                    let slot = (pi * k + qi) * 2;
                    acc[slot] += 1;
                    acc[slot + 1] += u64::from(res.p_value < alpha);
                }
            }
        }
    });
    Ok(props
        .iter()
        .zip(&ms)
        .enumerate()
        .map(|(pi, (&prop, &m))| NullRejectionRates {
            prop,
            m,
            tallies: if m < MIN_MATCHED_QUANTILE {
                Vec::new()
            } else {
                QUANTILE_GRID
                    .iter()
                    .enumerate()
                    .map(|(qi, &q)| {
                        let slot = (pi * k + qi) * 2;
                        (q, counts[slot + 1], counts[slot])
                    })
                    .collect()
            },
        })
        .collect())
}

/// Alpha-targeted quantile for one scenario; `None` marks a scenario with
/// fewer than four matched pairs, where the quantile test is not calculable.
pub fn alpha_target_search<E: Executor>(
    n: usize,
    prop: f64,
    rho: RhoSpec,
    alpha: f64,
    n_runs: u64,
    seed: u64,
    exec: &E,
) -> Result<Option<f64>> {
    let rates = null_rejection_rates(n, &[prop], rho, alpha, n_runs, seed, exec)?;
    Ok(rates[0].target(alpha))
}

/// Alpha-targeted quantiles over the full `ns x props x rhos` design plus the
/// conservative minimum over correlations for every `(n, prop)`.
pub fn calibrate_grid<E: Executor>(
    ns: &[usize],
    props: &[f64],
    rhos: &[RhoSpec],
    alpha: f64,
    n_runs: u64,
    seed: u64,
    exec: &E,
) -> Result<QuantileGrid> {
    if ns.is_empty() || props.is_empty() || rhos.is_empty() {
        return Err(domain("calibration axes must be nonempty"));
    }
    let mut entries = Vec::with_capacity(ns.len() * props.len() * rhos.len());
    for &n in ns {
        for &rho in rhos {
            let rates = null_rejection_rates(n, props, rho, alpha, n_runs, seed, exec)?;
            entries.extend(rates.iter().map(|r| GridEntry { n, prop: r.prop, rho, q_star: r.target(alpha) }));
        }
    }
    QuantileGrid::from_entries(entries)
}
