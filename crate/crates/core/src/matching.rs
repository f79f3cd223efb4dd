//! Deterministic identifier linkage of pre/post survey records.
//!
//! An identifier links a pre and a post record iff it occurs exactly once in
//! each phase. Identifiers seen more than once in either phase are
//! ambiguous: all of their records are kept, unmatched. Records without an
//! identifier are unmatched.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::PartiallyMatchedDataset;
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Phase {
    Pre,
    Post,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::Pre => "pre",
            Phase::Post => "post",
        }
    }
}

impl core::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("pre") {
            Ok(Phase::Pre)
        } else if t.eq_ignore_ascii_case("post") {
            Ok(Phase::Post)
        } else {
            Err(domain(format!("unknown phase `{t}` (expected pre or post)")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurveyRecord {
    pub id: Option<String>,
    pub phase: Phase,
    pub value: f64,
}

impl SurveyRecord {
    pub fn new(id: Option<&str>, phase: Phase, value: f64) -> Self {
        Self { id: id.map(String::from), phase, value }
    }
}

/// Trims an identifier and optionally case-folds it; blank becomes `None`.
pub fn normalize_id(raw: &str, fold_case: bool) -> Option<String> {
    let t = raw.trim();
    if t.is_empty() {
        None
    } else if fold_case {
        Some(t.to_lowercase())
    } else {
        Some(String::from(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatchReport {
    pub n_pre: usize,
    pub n_post: usize,
    pub m_matched: usize,
    /// Records whose identifier occurs more than once in some phase.
    pub n_dropped_duplicates: usize,
    pub n_blank_ids: usize,
}

#[derive(Default)]
struct IdSlots {
    pre: Vec<f64>,
    post: Vec<f64>,
}

/// Links records by identifier and assembles the dataset.
///
/// Matched pairs are ordered by identifier and unmatched values by value, so
/// the result does not depend on record order.
pub fn build_dataset(records: &[SurveyRecord]) -> Result<(PartiallyMatchedDataset, MatchReport)> {
    let mut report = MatchReport::default();
    let mut by_id: BTreeMap<&str, IdSlots> = BTreeMap::new();
    let mut unmatched_pre = Vec::new();
    let mut unmatched_post = Vec::new();

    for rec in records {
        if !rec.value.is_finite() {
            return Err(domain("record values must be finite"));
        }
        match rec.phase {
            Phase::Pre => report.n_pre += 1,
            Phase::Post => report.n_post += 1,
        }
        match rec.id.as_deref() {
            Some(id) if !id.trim().is_empty() => {
                let slot = by_id.entry(id).or_default();
                match rec.phase {
                    Phase::Pre => slot.pre.push(rec.value),
                    Phase::Post => slot.post.push(rec.value),
                }
            }
            _ => {
                report.n_blank_ids += 1;
                match rec.phase {
                    Phase::Pre => unmatched_pre.push(rec.value),
                    Phase::Post => unmatched_post.push(rec.value),
                }
            }
        }
    }

    if report.n_pre < 2 || report.n_post < 2 {
        return Err(Error::InsufficientData { required: 2, pre: report.n_pre, post: report.n_post });
    }
    if report.n_pre != report.n_post {
        return Err(Error::UnequalArms { pre: report.n_pre, post: report.n_post });
    }

    let mut matched = Vec::new();
    for slots in by_id.values() {
        match (slots.pre.as_slice(), slots.post.as_slice()) {
            (&[x], &[y]) => matched.push((x, y)),
            (pre, post) => {
                if pre.len() > 1 || post.len() > 1 {
                    report.n_dropped_duplicates += pre.len() + post.len();
                }
                unmatched_pre.extend_from_slice(pre);
                unmatched_post.extend_from_slice(post);
            }
        }
    }
    report.m_matched = matched.len();
    unmatched_pre.sort_by(f64::total_cmp);
    unmatched_post.sort_by(f64::total_cmp);

    let ds = PartiallyMatchedDataset::new(&matched, &unmatched_pre, &unmatched_post)?;
    Ok((ds, report))
}

/// Serializes a dataset back to records: matched pairs get zero-padded
/// synthetic identifiers in pair order, unmatched values get none.
pub fn dataset_records(ds: &PartiallyMatchedDataset) -> Vec<SurveyRecord> {
    let width = format!("{}", ds.m()).len().max(1);
    let mut out = Vec::with_capacity(2 * ds.n());
    for (i, (x, y)) in ds.matched_pairs().enumerate() {
        let id = format!("m{i:0width$}");
        out.push(SurveyRecord::new(Some(&id), Phase::Pre, x));
        out.push(SurveyRecord::new(Some(&id), Phase::Post, y));
    }
    out.extend(ds.unmatched_pre().iter().map(|&v| SurveyRecord::new(None, Phase::Pre, v)));
    out.extend(ds.unmatched_post().iter().map(|&v| SurveyRecord::new(None, Phase::Post, v)));
    out
}
