//! One-covariate logistic regression fitted by iteratively reweighted least
//! squares.

use alloc::vec::Vec;

use crate::error::{degenerate, domain, Error, Result};

const MAX_ITER: usize = 100;
const STEP_TOL: f64 = 1e-8;
const RIDGE: f64 = 1e-10;

/// Fitted `P(y = 1 | x) = logistic(intercept + slope * x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogisticFit {
    pub intercept: f64,
    pub slope: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl LogisticFit {
    pub fn linear_predictor(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    pub fn predict(&self, x: f64) -> f64 {
        logistic(self.linear_predictor(x))
    }
}

pub fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + libm::exp(-eta))
    } else {
        let e = libm::exp(eta);
        e / (1.0 + e)
    }
}

/// `ln(1 + e^eta)` without overflow.
fn softplus(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + libm::log1p(libm::exp(-eta))
    } else {
        libm::log1p(libm::exp(eta))
    }
}

/// Bernoulli log-likelihood of `(intercept, slope)` on the data.
pub fn log_likelihood(xs: &[f64], ys: &[bool], intercept: f64, slope: f64) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let eta = intercept + slope * x;
            if y {
                -softplus(-eta)
            } else {
                -softplus(eta)
            }
        })
        .sum()
}

/// Score vector of the log-likelihood at `(intercept, slope)`.
pub fn score(xs: &[f64], ys: &[bool], intercept: f64, slope: f64) -> [f64; 2] {
    xs.iter().zip(ys).fold([0.0, 0.0], |[g0, g1], (&x, &y)| {
        let resid = f64::from(u8::from(y)) - logistic(intercept + slope * x);
        [g0 + resid, g1 + resid * x]
    })
}

/// Maximum-likelihood fit of a logistic regression on a single covariate.
///
/// The covariate is centred internally; Newton steps carry a `1e-10` ridge
/// on the Hessian diagonal. Convergence means the largest step component
/// dropped below `1e-8` within 100 iterations.
pub fn fit_logistic_1d(xs: &[f64], ys: &[bool]) -> Result<LogisticFit> {
    if xs.len() != ys.len() {
        return Err(domain("xs and ys must have the same length"));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(domain("covariate values must be finite"));
    }
    let first = match xs.first() {
        Some(&x) => x,
        None => return Err(degenerate("logistic fit needs data")),
    };
    if xs.iter().all(|&x| x == first) {
        return Err(degenerate("logistic fit needs at least two distinct covariate values"));
    }
    if ys.iter().all(|&y| y == ys[0]) {
        return Err(degenerate("logistic fit needs both outcomes present"));
    }

    let n = xs.len() as f64;
    let centre = xs.iter().sum::<f64>() / n;
    let xc: Vec<f64> = xs.iter().map(|&x| x - centre).collect();

    let successes = ys.iter().filter(|&&y| y).count() as f64;
    let rate = successes / n;
    let mut beta = [libm::log(rate / (1.0 - rate)), 0.0];

    for iter in 1..=MAX_ITER {
        let mut g = [0.0; 2];
        let mut h = [RIDGE, 0.0, RIDGE];
        for (&x, &y) in xc.iter().zip(ys) {
            let mu = logistic(beta[0] + beta[1] * x);
            let w = mu * (1.0 - mu);
            let resid = f64::from(u8::from(y)) - mu;
            g[0] += resid;
            g[1] += resid * x;
            h[0] += w;
            h[1] += w * x;
            h[2] += w * x * x;
        }
        let det = h[0] * h[2] - h[1] * h[1];
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::NonConvergence { iterations: iter });
        }
        let step = [(h[2] * g[0] - h[1] * g[1]) / det, (h[0] * g[1] - h[1] * g[0]) / det];
        if !(step[0].is_finite() && step[1].is_finite()) {
            return Err(Error::NonConvergence { iterations: iter });
        }
        beta[0] += step[0];
        beta[1] += step[1];
        if step[0].abs().max(step[1].abs()) < STEP_TOL {
            return Ok(LogisticFit {
                intercept: beta[0] - beta[1] * centre,
                slope: beta[1],
                converged: true,
                iterations: iter,
            });
        }
    }
    Err(Error::NonConvergence { iterations: MAX_ITER })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Coarse-to-fine grid maximiser of the log-likelihood; independent of IRLS.
    fn grid_maximiser(xs: &[f64], ys: &[bool]) -> (f64, f64) {
        let (mut b0, mut b1) = (0.0, 0.0);
        let mut half_width = 8.0;
        while half_width > 1e-8 {
            let step = half_width / 20.0;
            let (mut best, mut best_ll) = ((b0, b1), f64::NEG_INFINITY);
            for i in -20..=20 {
                for j in -20..=20 {
                    let c0 = b0 + f64::from(i) * step;
                    let c1 = b1 + f64::from(j) * step;
                    let ll = log_likelihood(xs, ys, c0, c1);
                    if ll > best_ll {
                        best_ll = ll;
                        best = (c0, c1);
                    }
                }
            }
            (b0, b1) = best;
            half_width = step * 2.0;
        }
        (b0, b1)
    }

    fn hand_data() -> (Vec<f64>, Vec<bool>) {
        let xs = vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.35, 0.55, 0.75];
        let ys = vec![false, false, true, false, false, true, false, true, true, false, true, true];
        (xs, ys)
    }

    #[test]
    fn matches_grid_search_maximiser() {
        let (xs, ys) = hand_data();
        let fit = fit_logistic_1d(&xs, &ys).unwrap();
        let (b0, b1) = grid_maximiser(&xs, &ys);
        assert!(fit.converged);
        assert!((fit.intercept - b0).abs() < 1e-6, "{} vs {b0}", fit.intercept);
        assert!((fit.slope - b1).abs() < 1e-6, "{} vs {b1}", fit.slope);
        let g = score(&xs, &ys, fit.intercept, fit.slope);
        assert!(g[0].abs() < 1e-8 && g[1].abs() < 1e-8);
    }

    #[test]
    fn loglik_dominates_coarse_grid() {
        let (xs, ys) = hand_data();
        let fit = fit_logistic_1d(&xs, &ys).unwrap();
        let best = log_likelihood(&xs, &ys, fit.intercept, fit.slope);
        for i in -30..=30 {
            for j in -30..=30 {
                let ll = log_likelihood(&xs, &ys, f64::from(i) * 0.25, f64::from(j) * 0.5);
                assert!(best >= ll);
            }
        }
    }

    #[test]
    fn perfect_separation_fails() {
        let xs = [0.1, 0.2, 0.3, 0.7, 0.8, 0.9];
        let ys = [false, false, false, true, true, true];
        assert!(matches!(fit_logistic_1d(&xs, &ys), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_logistic_1d(&[0.1, 0.2, 0.3], &[true, true, true]), Err(Error::DegenerateData(_))));
        assert!(matches!(fit_logistic_1d(&[0.5, 0.5, 0.5], &[true, false, true]), Err(Error::DegenerateData(_))));
        assert!(fit_logistic_1d(&[0.5], &[true, false]).is_err());
    }

    #[test]
    fn predictions_in_open_unit_interval() {
        let (xs, ys) = hand_data();
        let fit = fit_logistic_1d(&xs, &ys).unwrap();
        for i in 0..=100 {
            let p = fit.predict(-5.0 + 0.1 * f64::from(i));
            assert!(p > 0.0 && p < 1.0);
        }
    }
}
