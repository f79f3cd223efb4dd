//! Partially matched pre/post data.
//!
//! A dataset holds `n` pre values and `n` post values. The first `m` entries
//! of each column are the linked pairs; the remaining `u = n - m` entries on
//! each side could not be linked.

use alloc::vec::Vec;

use crate::error::{degenerate, Error, Result};

/// Owned partially matched dataset.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PartiallyMatchedDataset {
    pre: Vec<f64>,
    post: Vec<f64>,
    matched: usize,
}

/// Borrowed view with the same layout, used by the tests and the simulation
/// engine to avoid copying columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetView<'a> {
    pre: &'a [f64],
    post: &'a [f64],
    matched: usize,
}

fn validate(pre: &[f64], post: &[f64], matched: usize) -> Result<()> {
    if pre.len() != post.len() {
        return Err(Error::UnequalArms { pre: pre.len(), post: post.len() });
    }
    if pre.len() < 2 {
        return Err(Error::InsufficientData { required: 2, pre: pre.len(), post: post.len() });
    }
    if matched > pre.len() {
        return Err(Error::Config(alloc::format!("matched count {matched} exceeds n = {}", pre.len())));
    }
    if pre.iter().chain(post).any(|v| !v.is_finite()) {
        return Err(degenerate("all values must be finite"));
    }
    Ok(())
}

impl PartiallyMatchedDataset {
    pub fn new(matched_pairs: &[(f64, f64)], unmatched_pre: &[f64], unmatched_post: &[f64]) -> Result<Self> {
        let m = matched_pairs.len();
        let mut pre = Vec::with_capacity(m + unmatched_pre.len());
        let mut post = Vec::with_capacity(m + unmatched_post.len());
        pre.extend(matched_pairs.iter().map(|p| p.0));
        post.extend(matched_pairs.iter().map(|p| p.1));
        pre.extend_from_slice(unmatched_pre);
        post.extend_from_slice(unmatched_post);
        Self::from_columns(pre, post, m)
    }

    /// Columns whose first `matched` entries are linked pairs.
    pub fn from_columns(pre: Vec<f64>, post: Vec<f64>, matched: usize) -> Result<Self> {
        validate(&pre, &post, matched)?;
        Ok(Self { pre, post, matched })
    }

    /// Every pair linked.
    pub fn fully_matched(pre: Vec<f64>, post: Vec<f64>) -> Result<Self> {
        let m = pre.len();
        Self::from_columns(pre, post, m)
    }

    pub fn view(&self) -> DatasetView<'_> {
        DatasetView { pre: &self.pre, post: &self.post, matched: self.matched }
    }

    pub fn n(&self) -> usize {
        self.pre.len()
    }

    pub fn m(&self) -> usize {
        self.matched
    }

    pub fn u(&self) -> usize {
        self.pre.len() - self.matched
    }

    pub fn pre(&self) -> &[f64] {
        &self.pre
    }

    pub fn post(&self) -> &[f64] {
        &self.post
    }

    pub fn matched_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.view().matched_pairs()
    }

    pub fn unmatched_pre(&self) -> &[f64] {
        &self.pre[self.matched..]
    }

    pub fn unmatched_post(&self) -> &[f64] {
        &self.post[self.matched..]
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_columns(
            self.pre.iter().map(|v| v * factor).collect(),
            self.post.iter().map(|v| v * factor).collect(),
            self.matched,
        )
    }
}

impl<'a> DatasetView<'a> {
    pub fn new(pre: &'a [f64], post: &'a [f64], matched: usize) -> Result<Self> {
        validate(pre, post, matched)?;
        Ok(Self { pre, post, matched })
    }

    /// Skips validation; the simulation engine builds views over freshly
    /// sampled finite columns.
    pub(crate) fn new_unchecked(pre: &'a [f64], post: &'a [f64], matched: usize) -> Self {
        debug_assert!(pre.len() == post.len() && matched <= pre.len());
        Self { pre, post, matched }
    }

    pub fn n(&self) -> usize {
        self.pre.len()
    }

    pub fn m(&self) -> usize {
        self.matched
    }

    pub fn pre(&self) -> &'a [f64] {
        self.pre
    }

    pub fn post(&self) -> &'a [f64] {
        self.post
    }

    pub fn matched_pre(&self) -> &'a [f64] {
        &self.pre[..self.matched]
    }

    pub fn matched_post(&self) -> &'a [f64] {
        &self.post[..self.matched]
    }

    pub fn matched_pairs(&self) -> impl Iterator<Item = (f64, f64)> + 'a {
        self.matched_pre().iter().copied().zip(self.matched_post().iter().copied())
    }

    pub fn summary(&self) -> SummaryStats {
        SummaryStats::from_columns(self.pre, self.post)
    }
}

impl<'a> From<&'a PartiallyMatchedDataset> for DatasetView<'a> {
    fn from(ds: &'a PartiallyMatchedDataset) -> Self {
        ds.view()
    }
}

/// Means and sample variances (n - 1 denominator) of both arms.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SummaryStats {
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub n: usize,
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub(crate) fn sample_variance(xs: &[f64], mean: f64) -> f64 {
    let ss: f64 = xs.iter().map(|v| (v - mean) * (v - mean)).sum();
    ss / (xs.len() - 1) as f64
}

impl SummaryStats {
    /// Both columns must have the same length, at least 2.
    pub fn from_columns(x: &[f64], y: &[f64]) -> Self {
        debug_assert!(x.len() == y.len() && x.len() >= 2);
        let mean_x = mean(x);
        let mean_y = mean(y);
        Self { mean_x, mean_y, var_x: sample_variance(x, mean_x), var_y: sample_variance(y, mean_y), n: x.len() }
    }
}
