//! Mean-difference tests for partially matched data and the correlation
//! estimators they rely on.
//!
//! All tests assume equal pre/post variances. The correlated-samples
//! statistic is
//!
//! ```text
//! T' = (mean_x - mean_y) / sqrt((s_x² + s_y²) / n * (1 - rho))
//! ```
//!
//! on `2n - 2` degrees of freedom, computed over all `n` values of both arms.
//! The quantile variant plugs in the lower bound of a one-sided Fisher-z
//! interval for the correlation of the matched subset.

use crate::dataset::{mean, DatasetView, SummaryStats};
use crate::error::{degenerate, domain, Error, Result};
use crate::special::{normal_quantile, t_sf, t_two_sided_p};

/// Smallest matched count for which the Fisher-z interval exists.
pub const MIN_MATCHED_QUANTILE: usize = 4;
/// Smallest matched count accepted by the Pearson plug-in test.
pub const MIN_MATCHED_PEARSON: usize = 3;
/// Smallest matched count for the paired test.
pub const MIN_MATCHED_PAIRED: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    TwoSample,
    MatchedPaired,
    QuantileT,
    PearsonT,
    CorrelatedKnownRho,
}

impl Method {
    pub const COMPARED: [Method; 4] = [Method::TwoSample, Method::MatchedPaired, Method::QuantileT, Method::PearsonT];

    pub fn label(self) -> &'static str {
        match self {
            Method::TwoSample => "two_sample",
            Method::MatchedPaired => "matched_paired",
            Method::QuantileT => "quantile_t",
            Method::PearsonT => "pearson_t",
            Method::CorrelatedKnownRho => "correlated_known_rho",
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "two_sample" | "twosample" => Ok(Method::TwoSample),
            "matched_paired" | "paired" => Ok(Method::MatchedPaired),
            "quantile_t" | "quantile" => Ok(Method::QuantileT),
            "pearson_t" | "pearson" => Ok(Method::PearsonT),
            "correlated_known_rho" | "correlated" => Ok(Method::CorrelatedKnownRho),
            other => Err(domain(alloc::format!("unknown method `{other}`"))),
        }
    }
}

/// Direction of the alternative hypothesis on `mean_x - mean_y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Alternative {
    #[default]
    TwoSided,
    Greater,
    Less,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestResult {
    pub statistic: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub method: Method,
    pub rho_used: Option<f64>,
}

impl TestResult {
    fn new(statistic: f64, df: f64, method: Method, rho_used: Option<f64>) -> Result<Self> {
        Ok(Self { statistic, df, p_value: t_two_sided_p(statistic, df)?, method, rho_used })
    }

    pub fn p_value_for(&self, alternative: Alternative) -> f64 {
        match alternative {
            Alternative::TwoSided => self.p_value,
            // t_sf only fails on non-finite input, which construction rules out
            Alternative::Greater => t_sf(self.statistic, self.df).unwrap_or(f64::NAN),
            Alternative::Less => t_sf(-self.statistic, self.df).unwrap_or(f64::NAN),
        }
    }
}

/// Fisher-z based lower-quantile estimate of the correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrelationEstimate {
    /// Pearson correlation of the matched pairs.
    pub r: f64,
    pub q: f64,
    /// `arctanh(r)`.
    pub z: f64,
    /// `1 / sqrt(m - 3)`.
    pub se_z: f64,
    /// `tanh(z - z_{1-q} * se_z)`.
    pub r_q: f64,
    pub m: usize,
}

/// Pearson product-moment correlation, clamped to `[-1, 1]`.
pub fn pearson_cor(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(domain("correlation needs columns of equal length"));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientMatched { required: 2, found: x.len() });
    }
    let mx = mean(x);
    let my = mean(y);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Err(degenerate("zero variance in a correlated coordinate"));
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

fn check_quantile(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(domain("quantile must lie strictly between 0 and 1"))
    }
}

/// Quantile correlation estimate from a Pearson `r` on `m` pairs.
pub fn quantile_from_r(r: f64, m: usize, q: f64) -> Result<CorrelationEstimate> {
    check_quantile(q)?;
    if m < MIN_MATCHED_QUANTILE {
        return Err(Error::InsufficientMatched { required: MIN_MATCHED_QUANTILE, found: m });
    }
    if !(r.abs() < 1.0) {
        return Err(Error::DegenerateCorrelation);
    }
    let z = libm::atanh(r);
    let se_z = 1.0 / libm::sqrt((m - 3) as f64);
    let shift = normal_quantile(1.0 - q)? * se_z;
    Ok(CorrelationEstimate { r, q, z, se_z, r_q: libm::tanh(z - shift), m })
}

/// Lower bound of the one-sided `1 - q` Fisher-z interval for the
/// correlation of the pairs `(x[i], y[i])`.
pub fn quantile_cor(x: &[f64], y: &[f64], q: f64) -> Result<CorrelationEstimate> {
    check_quantile(q)?;
    if x.len() < MIN_MATCHED_QUANTILE {
        return Err(Error::InsufficientMatched { required: MIN_MATCHED_QUANTILE, found: x.len() });
    }
    let r = pearson_cor(x, y)?;
    quantile_from_r(r, x.len(), q)
}

/// `T'` from precomputed summaries; shared by every correlated-samples test.
pub(crate) fn t_prime(stats: &SummaryStats, rho: f64, method: Method, rho_used: Option<f64>) -> Result<TestResult> {
    let pooled = stats.var_x + stats.var_y;
    if !(pooled > 0.0) {
        return Err(degenerate("zero pooled variance"));
    }
    let n = stats.n as f64;
    let se = libm::sqrt(pooled / n * (1.0 - rho));
    TestResult::new((stats.mean_x - stats.mean_y) / se, 2.0 * n - 2.0, method, rho_used)
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > -1.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(domain("rho must lie strictly between -1 and 1"))
    }
}

/// Equal-variance two-sample t over all `n` values of each arm, ignoring the
/// match structure.
pub fn two_sample_t<'a>(ds: impl Into<DatasetView<'a>>) -> Result<TestResult> {
    t_prime(&ds.into().summary(), 0.0, Method::TwoSample, None)
}

/// Correlated-samples t with a known correlation.
pub fn correlated_t<'a>(ds: impl Into<DatasetView<'a>>, rho: f64) -> Result<TestResult> {
    check_rho(rho)?;
    t_prime(&ds.into().summary(), rho, Method::CorrelatedKnownRho, Some(rho))
}

/// Paired t on the columns `x`, `y` (one pair per index).
pub fn paired_t(x: &[f64], y: &[f64]) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(domain("paired test needs columns of equal length"));
    }
    let m = x.len();
    if m < MIN_MATCHED_PAIRED {
        return Err(Error::InsufficientMatched { required: MIN_MATCHED_PAIRED, found: m });
    }
    let diffs_mean = x.iter().zip(y).map(|(a, b)| a - b).sum::<f64>() / m as f64;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let d = (a - b) - diffs_mean;
            d * d
        })
        .sum();
    let var = ss / (m - 1) as f64;
    if !(var > 0.0) {
        return Err(degenerate("zero variance of paired differences"));
    }
    let se = libm::sqrt(var / m as f64);
    TestResult::new(diffs_mean / se, (m - 1) as f64, Method::MatchedPaired, None)
}

/// Paired t on the matched subset of a dataset.
pub fn matched_paired_t<'a>(ds: impl Into<DatasetView<'a>>) -> Result<TestResult> {
    let ds = ds.into();
    paired_t(ds.matched_pre(), ds.matched_post())
}

/// Quantile-based `T'`: `r_q` from the matched subset, applied over all `n`.
pub fn quantile_t<'a>(ds: impl Into<DatasetView<'a>>, q: f64) -> Result<TestResult> {
    let ds = ds.into();
    let est = quantile_cor(ds.matched_pre(), ds.matched_post(), q)?;
    t_prime(&ds.summary(), est.r_q, Method::QuantileT, Some(est.r_q))
}

/// `T'` with the matched-subset Pearson correlation plugged in.
pub fn pearson_t<'a>(ds: impl Into<DatasetView<'a>>) -> Result<TestResult> {
    let ds = ds.into();
    if ds.m() < MIN_MATCHED_PEARSON {
        return Err(Error::InsufficientMatched { required: MIN_MATCHED_PEARSON, found: ds.m() });
    }
    let r = pearson_cor(ds.matched_pre(), ds.matched_post())?;
    if !(r.abs() < 1.0) {
        return Err(Error::DegenerateCorrelation);
    }
    t_prime(&ds.summary(), r, Method::PearsonT, Some(r))
}

/// Runs `method` on a dataset. `param` is the quantile for
/// [`Method::QuantileT`] and the correlation for
/// [`Method::CorrelatedKnownRho`]; other methods ignore it.
pub fn run_test<'a>(ds: impl Into<DatasetView<'a>>, method: Method, param: Option<f64>) -> Result<TestResult> {
    let ds = ds.into();
    match method {
        Method::TwoSample => two_sample_t(ds),
        Method::MatchedPaired => matched_paired_t(ds),
        Method::PearsonT => pearson_t(ds),
        Method::QuantileT => quantile_t(ds, param.ok_or_else(|| Error::Config("quantile test needs q".into()))?),
        Method::CorrelatedKnownRho => {
            correlated_t(ds, param.ok_or_else(|| Error::Config("correlated test needs rho".into()))?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::PartiallyMatchedDataset;
    use crate::special::t_cdf;

    fn demo() -> PartiallyMatchedDataset {
        PartiallyMatchedDataset::new(
            &[(5.1, 4.2), (6.3, 5.9), (4.8, 4.9), (7.2, 6.1), (5.9, 5.0), (6.6, 6.4)],
            &[5.5, 6.8, 4.4],
            &[4.1, 5.2, 5.7],
        )
        .unwrap()
    }

    #[test]
    fn pearson_exact_line() {
        assert_eq!(pearson_cor(&[1.0, 2.0, 3.0, 4.0], &[3.0, 5.0, 7.0, 9.0]).unwrap(), 1.0);
    }

    #[test]
    fn pearson_hand_value() {
        // x̄ = 2.5, ȳ = 2.5; Sxy = 4, Sxx = Syy = 5
        let r = pearson_cor(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 3.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-15);
        let swapped = pearson_cor(&[2.0, 1.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(r, swapped);
    }

    #[test]
    fn pearson_zero_variance() {
        assert!(matches!(pearson_cor(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn quantile_median_is_point_estimate() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 1.0, 4.0, 3.0, 6.0];
        let est = quantile_cor(&x, &y, 0.5).unwrap();
        assert_eq!(est.r_q, est.r);
        assert_eq!(est.m, 5);
        assert_eq!(est.se_z, 1.0 / libm::sqrt(2.0));
    }

    #[test]
    fn quantile_formula_value() {
        // m = 7, r = 0.6, q = 0.2: tanh(atanh(0.6) - z_0.8 / 2), reference from a
        // 50-digit evaluation
        let est = quantile_from_r(0.6, 7, 0.2).unwrap();
        assert!((est.r_q - 0.265_797_670_241_862_9).abs() < 1e-13, "{}", est.r_q);
    }

    #[test]
    fn quantile_needs_four_pairs() {
        let err = quantile_cor(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0], 0.3).unwrap_err();
        assert_eq!(err, Error::InsufficientMatched { required: 4, found: 3 });
        assert!(matches!(
            quantile_cor(&[1.0, 2.0, 3.0, 4.0], &[2.0, 4.0, 6.0, 8.0], 0.3),
            Err(Error::DegenerateCorrelation)
        ));
        assert!(quantile_cor(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 3.0, 4.0], 1.0).is_err());
    }

    #[test]
    fn two_sample_identical_columns() {
        let v = vec![1.0, 4.0, 2.0, 8.0];
        let ds = PartiallyMatchedDataset::fully_matched(v.clone(), v).unwrap();
        let res = two_sample_t(&ds).unwrap();
        assert_eq!(res.statistic, 0.0);
        assert_eq!(res.p_value, 1.0);
        assert_eq!(res.df, 6.0);
    }

    #[test]
    fn two_sample_hand_value() {
        // x = (1,2,3,4), y = (2,2,2,6): diff -0.5, pooled 5/3 + 4 = 17/3, se² = 17/12
        let ds = PartiallyMatchedDataset::fully_matched(vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 2.0, 2.0, 6.0]).unwrap();
        let res = two_sample_t(&ds).unwrap();
        let expected = -0.5 / libm::sqrt(17.0 / 12.0);
        assert!((res.statistic - expected).abs() < 1e-15);
        let p = 2.0 * (1.0 - t_cdf(expected.abs(), 6.0).unwrap());
        assert!((res.p_value - p).abs() < 1e-14);
    }

    #[test]
    fn two_sample_ignores_match_labels() {
        let a = PartiallyMatchedDataset::new(&[(1.0, 2.0), (3.0, 1.5)], &[2.0, 5.0], &[4.0, 0.5]).unwrap();
        let b = PartiallyMatchedDataset::new(&[], &[1.0, 3.0, 2.0, 5.0], &[2.0, 1.5, 4.0, 0.5]).unwrap();
        assert_eq!(two_sample_t(&a).unwrap(), two_sample_t(&b).unwrap());
    }

    #[test]
    fn paired_hand_value() {
        // d = (-1, -2, 0, 0): d̄ = -0.75, s_d² = 11/12
        let res = paired_t(&[1.0, 2.0, 3.0, 5.0], &[2.0, 4.0, 3.0, 5.0]).unwrap();
        let expected = -0.75 / libm::sqrt(11.0 / 48.0);
        assert!((res.statistic - expected).abs() < 1e-14);
        assert_eq!(res.df, 3.0);
        let p = 2.0 * (1.0 - t_cdf(expected.abs(), 3.0).unwrap());
        assert!((res.p_value - p).abs() < 1e-14);
    }

    #[test]
    fn paired_symmetric_differences() {
        let res = paired_t(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert_eq!(res.statistic, 0.0);
        assert_eq!(res.p_value, 1.0);
    }

    #[test]
    fn paired_location_invariant() {
        let x = [1.3, 2.2, 3.9, 5.0, 4.4];
        let y = [2.0, 4.1, 3.3, 5.5, 4.0];
        let a = paired_t(&x, &y).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| v + 10.0).collect();
        let ys: Vec<f64> = y.iter().map(|v| v + 10.0).collect();
        let b = paired_t(&xs, &ys).unwrap();
        assert!((a.statistic - b.statistic).abs() < 1e-12);
    }

    #[test]
    fn paired_degenerate() {
        assert!(matches!(paired_t(&[1.0, 2.0, 3.0], &[0.0, 1.0, 2.0]), Err(Error::DegenerateData(_))));
        assert!(matches!(paired_t(&[1.0], &[0.0]), Err(Error::InsufficientMatched { .. })));
    }

    #[test]
    fn correlated_reduces_to_two_sample() {
        let ds = demo();
        let a = correlated_t(&ds, 0.0).unwrap();
        let b = two_sample_t(&ds).unwrap();
        assert_eq!(a.statistic.to_bits(), b.statistic.to_bits());
        assert_eq!(a.p_value.to_bits(), b.p_value.to_bits());
        assert_eq!(a.df, b.df);
        assert_eq!(a.rho_used, Some(0.0));
    }

    #[test]
    fn correlated_se_ratio() {
        let ds = demo();
        let a = correlated_t(&ds, 0.75).unwrap();
        let b = correlated_t(&ds, 0.5).unwrap();
        // statistic ∝ 1 / SE
        let se_ratio = b.statistic / a.statistic;
        assert!((se_ratio - libm::sqrt(0.25 / 0.5)).abs() < 1e-14);
    }

    #[test]
    fn correlated_hand_value() {
        let ds = demo();
        let s = ds.view().summary();
        let expected = (s.mean_x - s.mean_y) / libm::sqrt((s.var_x + s.var_y) / 9.0 * 0.35);
        let res = correlated_t(&ds, 0.65).unwrap();
        assert!((res.statistic - expected).abs() < 1e-13);
        assert_eq!(res.df, 16.0);
        let p = 2.0 * (1.0 - t_cdf(expected.abs(), 16.0).unwrap());
        assert!((res.p_value - p).abs() < 1e-14);
    }

    #[test]
    fn correlated_rejects_bad_rho() {
        let ds = demo();
        assert!(matches!(correlated_t(&ds, 1.0), Err(Error::Domain(_))));
        assert!(matches!(correlated_t(&ds, -1.0), Err(Error::Domain(_))));
        assert!(matches!(correlated_t(&ds, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn quantile_median_on_full_match_equals_pearson_plugin() {
        let ds = PartiallyMatchedDataset::fully_matched(
            vec![5.1, 6.3, 4.8, 7.2, 5.9, 6.6],
            vec![4.2, 5.9, 4.9, 6.1, 5.0, 6.4],
        )
        .unwrap();
        let r = pearson_cor(ds.pre(), ds.post()).unwrap();
        let q = quantile_t(&ds, 0.5).unwrap();
        let c = correlated_t(&ds, r).unwrap();
        assert_eq!(q.statistic, c.statistic);
        assert_eq!(q.rho_used, Some(r));
        assert_eq!(q.df, 10.0);
    }

    #[test]
    fn pearson_t_guards() {
        let two = PartiallyMatchedDataset::new(&[(1.0, 2.0), (2.0, 1.0)], &[3.0], &[4.0]).unwrap();
        assert_eq!(pearson_t(&two).unwrap_err(), Error::InsufficientMatched { required: 3, found: 2 });
        let line = PartiallyMatchedDataset::new(&[(1.0, 2.0), (2.0, 3.0), (3.0, 4.0)], &[3.0], &[4.0]).unwrap();
        assert_eq!(pearson_t(&line).unwrap_err(), Error::DegenerateCorrelation);
    }

    #[test]
    fn pearson_p_below_quantile_p() {
        let ds = demo();
        let s = ds.view().summary();
        assert!(s.mean_x > s.mean_y);
        let p = pearson_t(&ds).unwrap();
        let q = quantile_t(&ds, 0.25).unwrap();
        assert!(p.rho_used.unwrap() > q.rho_used.unwrap());
        assert!(p.p_value <= q.p_value);
    }

    #[test]
    fn df_per_method() {
        let ds = demo();
        assert_eq!(matched_paired_t(&ds).unwrap().df, 5.0);
        for m in [Method::TwoSample, Method::QuantileT, Method::PearsonT, Method::CorrelatedKnownRho] {
            assert_eq!(run_test(&ds, m, Some(0.3)).unwrap().df, 16.0);
        }
    }

    #[test]
    fn one_sided_p_values() {
        let res = two_sample_t(&demo()).unwrap();
        let g = res.p_value_for(Alternative::Greater);
        let l = res.p_value_for(Alternative::Less);
        assert!((g + l - 1.0).abs() < 1e-14);
        assert!((2.0 * g.min(l) - res.p_value).abs() < 1e-14);
    }

    #[test]
    fn method_names_parse() {
        for m in
            [Method::TwoSample, Method::MatchedPaired, Method::QuantileT, Method::PearsonT, Method::CorrelatedKnownRho]
        {
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
        }
        assert_eq!("Paired".parse::<Method>().unwrap(), Method::MatchedPaired);
        assert!("welch".parse::<Method>().is_err());
    }
}
