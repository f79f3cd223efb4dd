//! Result documents and their text, CSV and JSON renderings.

use std::fmt::Write as _;

use partmatch_core::simulate::{ComparisonRow, ErrorCurve, PowerGapRow, QuantileGrid, RhoSpec, SimulationSummary};
use partmatch_core::{Alternative, MatchReport, Method};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::io::{write_grid_csv, write_grid_json, CONSERVATIVE_RHO, NOT_CALCULABLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Where the quantile of a quantile test came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QSource {
    Argument,
    Grid,
}

/// Outcome of `partmatch test`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub method: Method,
    pub alternative: Alternative,
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
    pub rho_used: Option<f64>,
    pub q: Option<f64>,
    pub q_source: Option<QSource>,
    pub n: usize,
    pub m: usize,
    pub matching: MatchReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub alpha: f64,
    pub n_runs: u64,
    pub seed: u64,
    pub rho: RhoSpec,
    pub rows: Vec<ComparisonRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub n: usize,
    pub prop: f64,
    pub m: usize,
    pub alpha: f64,
    pub n_runs: u64,
    pub seed: u64,
    pub rho: RhoSpec,
    /// Quantile used by the quantile test, when it is among the methods.
    pub q: Option<f64>,
    pub curves: Vec<ErrorCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerGapReport {
    pub n: usize,
    pub rho: f64,
    pub delta: f64,
    pub alpha: f64,
    pub n_runs: u64,
    pub seed: u64,
    pub rows: Vec<PowerGapRow>,
}

/// Whitespace-aligned table; the first column is left-aligned.
struct Table {
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { rows: vec![header.iter().map(|s| s.to_string()).collect()] }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self) -> String {
        let cols = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let widths: Vec<usize> =
            (0..cols).map(|c| self.rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &self.rows {
            let mut line = String::new();
            for (c, cell) in row.iter().enumerate() {
                if c == 0 {
                    let _ = write!(line, "{cell:<w$}", w = widths[c]);
                } else {
                    let _ = write!(line, "  {cell:>w$}", w = widths[c]);
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Other(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_doc(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Other(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Other(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Other(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| NOT_CALCULABLE.into(), |v| v.to_string())
}

fn fixed(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.digits$}"))
}

fn p_text(p: f64) -> String {
    if p < 1e-4 {
        format!("{p:.3e}")
    } else {
        format!("{p:.4}")
    }
}

fn alt_label(a: Alternative) -> &'static str {
    match a {
        Alternative::TwoSided => "two_sided",
        Alternative::Greater => "greater",
        Alternative::Less => "less",
    }
}

pub fn render_test(r: &TestReport, format: Format) -> Result<String, CliError> {
    let q_source = |s: Option<QSource>| match s {
        Some(QSource::Argument) => "argument",
        Some(QSource::Grid) => "grid",
        None => "",
    };
    match format {
        Format::Json => json(r),
        Format::Csv => csv_doc(
            &[
                "method",
                "alternative",
                "statistic",
                "df",
                "p_value",
                "rho_used",
                "q",
                "q_source",
                "n",
                "m",
                "n_pre",
                "n_post",
                "m_matched",
                "n_dropped_duplicates",
                "n_blank_ids",
            ],
            [vec![
                r.method.label().into(),
                alt_label(r.alternative).into(),
                r.statistic.to_string(),
                r.df.to_string(),
                r.p_value.to_string(),
                opt(r.rho_used),
                opt(r.q),
                q_source(r.q_source).into(),
                r.n.to_string(),
                r.m.to_string(),
                r.matching.n_pre.to_string(),
                r.matching.n_post.to_string(),
                r.matching.m_matched.to_string(),
                r.matching.n_dropped_duplicates.to_string(),
                r.matching.n_blank_ids.to_string(),
            ]],
        ),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "method       {}", r.method);
            let _ = writeln!(s, "alternative  {}", alt_label(r.alternative));
            let _ = writeln!(s, "statistic    {:.6}", r.statistic);
            let _ = writeln!(s, "df           {}", r.df);
            let _ = writeln!(s, "p_value      {}", p_text(r.p_value));
            if let Some(rho) = r.rho_used {
                let _ = writeln!(s, "rho_used     {rho:.6}");
            }
            if let Some(q) = r.q {
                let _ = writeln!(s, "q            {q} ({})", q_source(r.q_source));
            }
            let _ = writeln!(s, "n            {}", r.n);
            let _ = writeln!(s, "m            {}", r.m);
            let mr = &r.matching;
            let _ = writeln!(
                s,
                "records      {} pre, {} post; {} matched, {} with duplicate ids, {} without id",
                mr.n_pre, mr.n_post, mr.m_matched, mr.n_dropped_duplicates, mr.n_blank_ids
            );
            Ok(s)
        }
    }
}

pub fn render_grid(grid: &QuantileGrid, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut buf = Vec::new();
            write_grid_json(&mut buf, grid)?;
            buf.push(b'\n');
            String::from_utf8(buf).map_err(|e| CliError::Other(e.to_string()))
        }
        Format::Csv => {
            let mut buf = Vec::new();
            write_grid_csv(&mut buf, grid)?;
            String::from_utf8(buf).map_err(|e| CliError::Other(e.to_string()))
        }
        Format::Text => {
            // one row per (n, rho), one column per proportion
            let mut props: Vec<f64> = grid.conservative_entries().iter().map(|c| c.prop).collect();
            props.sort_by(f64::total_cmp);
            props.dedup();
            let mut ns: Vec<usize> = grid.conservative_entries().iter().map(|c| c.n).collect();
            ns.sort_unstable();
            ns.dedup();
            let prop_labels: Vec<String> = props.iter().map(f64::to_string).collect();
            let mut header = vec!["n", "rho"];
            header.extend(prop_labels.iter().map(String::as_str));
            let mut t = Table::new(&header);
            for &n in &ns {
                let mut rhos: Vec<RhoSpec> = Vec::new();
                for e in grid.entries().iter().filter(|e| e.n == n) {
                    if !rhos.contains(&e.rho) {
                        rhos.push(e.rho);
                    }
                }
                let cell = |q: Option<Option<f64>>| match q {
                    None => String::new(),
                    Some(None) => "-".into(),
                    Some(Some(q)) => format!("{q:.2}"),
                };
                for rho in rhos {
                    let mut row = vec![n.to_string(), rho.to_string()];
                    row.extend(props.iter().map(|&p| cell(grid.get(n, p, rho))));
                    t.push(row);
                }
                let mut row = vec![n.to_string(), CONSERVATIVE_RHO.into()];
                row.extend(props.iter().map(|&p| cell(grid.conservative(n, p))));
                t.push(row);
            }
            Ok(t.render())
        }
    }
}

fn summary_cells(s: Option<&SimulationSummary>) -> [Option<f64>; 2] {
    [s.map(|s| s.rejection_rate), s.map(|s| s.mc_se)]
}

pub fn render_comparison(r: &ComparisonReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(r),
        Format::Csv => csv_doc(
            &["n", "prop", "m", "delta", "method", "q", "rate", "mc_se", "rejections", "n_effective", "n_runs"],
            r.rows.iter().map(|row| {
                let s = row.summary.as_ref();
                let [rate, se] = summary_cells(s);
                vec![
                    row.n.to_string(),
                    row.prop.to_string(),
                    row.m.to_string(),
                    row.delta.to_string(),
                    row.method.label().into(),
                    if row.method == Method::QuantileT { opt(row.q) } else { String::new() },
                    opt(rate),
                    opt(se),
                    s.map_or_else(|| NOT_CALCULABLE.into(), |s| s.rejections.to_string()),
                    s.map_or(0, |s| s.n_effective).to_string(),
                    r.n_runs.to_string(),
                ]
            }),
        ),
        Format::Text => {
            let mut t = Table::new(&["n", "prop", "m", "delta", "method", "q", "rate", "mc_se"]);
            for row in &r.rows {
                let [rate, se] = summary_cells(row.summary.as_ref());
                t.push(vec![
                    row.n.to_string(),
                    row.prop.to_string(),
                    row.m.to_string(),
                    row.delta.to_string(),
                    row.method.label().into(),
                    if row.method == Method::QuantileT { fixed(row.q, 2) } else { String::new() },
                    fixed(rate, 4),
                    fixed(se, 4),
                ]);
            }
            Ok(t.render())
        }
    }
}

pub fn render_curves(r: &CurveReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(r),
        Format::Csv => csv_doc(
            &["method", "rho", "rate"],
            r.curves.iter().flat_map(|c| {
                c.points
                    .iter()
                    .map(move |&(rho, rate)| vec![c.method.label().into(), rho.to_string(), rate.to_string()])
            }),
        ),
        Format::Text => {
            let mut s = String::new();
            let mut fits = Table::new(&["method", "intercept", "slope", "n_effective"]);
            for c in &r.curves {
                fits.push(vec![
                    c.method.label().into(),
                    format!("{:.4}", c.fit.intercept),
                    format!("{:.4}", c.fit.slope),
                    c.n_effective.to_string(),
                ]);
            }
            s.push_str(&fits.render());
            s.push('\n');
            let mut header = vec!["rho"];
            header.extend(r.curves.iter().map(|c| c.method.label()));
            let mut t = Table::new(&header);
            let len = r.curves.first().map_or(0, |c| c.points.len());
            for i in (0..len).step_by(5) {
                let mut row = vec![format!("{:.2}", r.curves[0].points[i].0)];
                row.extend(r.curves.iter().map(|c| format!("{:.4}", c.points[i].1)));
                t.push(row);
            }
            s.push_str(&t.render());
            Ok(s)
        }
    }
}

pub fn render_power_gap(r: &PowerGapReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(r),
        Format::Csv => csv_doc(
            &["prop", "m", "method", "type1", "type1_se", "power", "power_se", "n_effective"],
            r.rows.iter().map(|row| {
                let [t1, t1_se] = summary_cells(row.type1.as_ref());
                let [pw, pw_se] = summary_cells(row.power.as_ref());
                vec![
                    row.prop.to_string(),
                    row.m.to_string(),
                    row.method.label().into(),
                    opt(t1),
                    opt(t1_se),
                    opt(pw),
                    opt(pw_se),
                    row.power.map_or(0, |s| s.n_effective).to_string(),
                ]
            }),
        ),
        Format::Text => {
            let mut t = Table::new(&["prop", "m", "method", "type1", "power", "power_se"]);
            for row in &r.rows {
                let [t1, _] = summary_cells(row.type1.as_ref());
                let [pw, pw_se] = summary_cells(row.power.as_ref());
                t.push(vec![
                    row.prop.to_string(),
                    row.m.to_string(),
                    row.method.label().into(),
                    fixed(t1, 4),
                    fixed(pw, 4),
                    fixed(pw_se, 4),
                ]);
            }
            Ok(t.render())
        }
    }
}
