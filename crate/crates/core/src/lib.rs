//! Mean-difference testing for partially matched pre/post data.
//!
//! When only some pre/post responses can be linked through identifiers, the
//! matched subset still carries information about the pre/post correlation.
//! This crate implements the quantile-based correlated-samples t-test, which
//! plugs a conservative (lower-quantile) Fisher-z estimate of that
//! correlation into the known-correlation t statistic computed over all
//! responses, alongside the two-sample t, the matched-subset paired t and
//! the Pearson plug-in variant.
//!
//! It also carries the Monte Carlo machinery used to pick the correlation
//! quantile for a given sample size and matched proportion, to compare the
//! methods, and to trace Type I error against correlation.
//!
//! The crate is `no_std` (with `alloc`). Parallel execution, file formats
//! and the command-line front end live in the `partmatch` crate.
#![cfg_attr(not(test), no_std)]
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dataset;
pub mod error;
pub mod hypothesis;
pub mod logistic;
pub mod matching;
pub mod simulate;
pub mod special;

pub use dataset::{DatasetView, PartiallyMatchedDataset, SummaryStats};
pub use error::{Error, Result};
pub use hypothesis::{
    correlated_t, matched_paired_t, paired_t, pearson_cor, pearson_t, quantile_cor, quantile_t, run_test, two_sample_t,
    Alternative, CorrelationEstimate, Method, TestResult,
};
pub use logistic::{fit_logistic_1d, LogisticFit};
pub use matching::{build_dataset, MatchReport, Phase, SurveyRecord};
pub use special::{normal_cdf, normal_quantile, t_cdf};
