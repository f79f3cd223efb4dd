//! File formats: survey records (CSV) and quantile grids (CSV or JSON).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use partmatch_core::matching::{normalize_id, SurveyRecord};
use partmatch_core::simulate::{ConservativeEntry, GridEntry, QuantileGrid, RhoSpec};
use partmatch_core::Phase;

use crate::error::CliError;

/// Column names and identifier handling for survey CSV input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOptions {
    pub id_col: String,
    pub phase_col: String,
    pub value_col: String,
    /// Lower-case identifiers after trimming.
    pub fold_case: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { id_col: "id".into(), phase_col: "phase".into(), value_col: "value".into(), fold_case: true }
    }
}

fn column(headers: &csv::StringRecord, name: &str, source: &str) -> Result<usize, CliError> {
    headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case(name))
        .ok_or_else(|| CliError::Format { path: source.into(), msg: format!("missing column `{name}` in header") })
}

fn csv_error(source: &str, err: csv::Error) -> CliError {
    let line = err.position().map_or(0, |p| p.line());
    match err.kind() {
        csv::ErrorKind::Io(_) => CliError::Other(format!("{source}: {err}")),
        _ => CliError::Parse { path: source.into(), line, msg: err.to_string() },
    }
}

/// Reads `id,phase,value` records. `source` names the input in error
/// messages. Blank identifiers become `None`.
pub fn read_records<R: Read>(reader: R, opts: &ParseOptions, source: &str) -> Result<Vec<SurveyRecord>, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(source, e))?.clone();
    let id_i = column(&headers, &opts.id_col, source)?;
    let phase_i = column(&headers, &opts.phase_col, source)?;
    let value_i = column(&headers, &opts.value_col, source)?;

    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(source, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |msg: String| CliError::Parse { path: source.into(), line, msg };
        let phase: Phase = row[phase_i]
            .parse()
            .map_err(|_| bad(format!("unknown phase `{}` (expected pre or post)", &row[phase_i])))?;
        let raw = &row[value_i];
        let value: f64 = raw.parse().map_err(|_| bad(format!("invalid value `{raw}`")))?;
        if !value.is_finite() {
            return Err(bad(format!("value `{raw}` is not finite")));
        }
        out.push(SurveyRecord { id: normalize_id(&row[id_i], opts.fold_case), phase, value });
    }
    Ok(out)
}

pub fn read_records_path(path: &Path, opts: &ParseOptions) -> Result<Vec<SurveyRecord>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_records(file, opts, &path.display().to_string())
}

/// Writes records with the default `id,phase,value` header.
pub fn write_records<W: Write>(writer: W, records: &[SurveyRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    let to_other = |e: csv::Error| CliError::Other(e.to_string());
    w.write_record(["id", "phase", "value"]).map_err(to_other)?;
    for r in records {
        w.write_record([r.id.as_deref().unwrap_or(""), r.phase.label(), &r.value.to_string()]).map_err(to_other)?;
    }
    w.flush().map_err(|e| CliError::Other(e.to_string()))
}

/// Marker for a cell where the quantile test is not calculable.
pub const NOT_CALCULABLE: &str = "NA";
/// `rho` value of the conservative (minimum over correlations) rows.
pub const CONSERVATIVE_RHO: &str = "*";

fn fmt_q(q: Option<f64>) -> String {
    q.map_or_else(|| NOT_CALCULABLE.to_string(), |q| q.to_string())
}

/// Grid CSV: `n,prop,rho,q_star`, per-correlation rows followed by the
/// conservative rows (`rho = *`).
pub fn write_grid_csv<W: Write>(writer: W, grid: &QuantileGrid) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    let to_other = |e: csv::Error| CliError::Other(e.to_string());
    w.write_record(["n", "prop", "rho", "q_star"]).map_err(to_other)?;
    for e in grid.entries() {
        w.write_record([e.n.to_string(), e.prop.to_string(), e.rho.to_string(), fmt_q(e.q_star)]).map_err(to_other)?;
    }
    for c in grid.conservative_entries() {
        w.write_record([c.n.to_string(), c.prop.to_string(), CONSERVATIVE_RHO.into(), fmt_q(c.q_star)])
            .map_err(to_other)?;
    }
    w.flush().map_err(|e| CliError::Other(e.to_string()))
}

pub fn read_grid_csv<R: Read>(reader: R, source: &str) -> Result<QuantileGrid, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(source, e))?.clone();
    let idx: Vec<usize> =
        ["n", "prop", "rho", "q_star"].iter().map(|c| column(&headers, c, source)).collect::<Result<_, _>>()?;

    let mut entries = Vec::new();
    let mut conservative = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(source, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |msg: String| CliError::Parse { path: source.into(), line, msg };
        let n: usize = row[idx[0]].parse().map_err(|_| bad(format!("invalid n `{}`", &row[idx[0]])))?;
        let prop: f64 = row[idx[1]].parse().map_err(|_| bad(format!("invalid prop `{}`", &row[idx[1]])))?;
        let q_star = match &row[idx[3]] {
            s if s.eq_ignore_ascii_case(NOT_CALCULABLE) => None,
            s => Some(s.parse::<f64>().map_err(|_| bad(format!("invalid q_star `{s}`")))?),
        };
        match &row[idx[2]] {
            CONSERVATIVE_RHO => conservative.push(ConservativeEntry { n, prop, q_star }),
            s => {
                let rho: RhoSpec = s.parse().map_err(|_| bad(format!("invalid rho `{s}`")))?;
                entries.push(GridEntry { n, prop, rho, q_star });
            }
        }
    }
    QuantileGrid::from_parts(entries, conservative)
        .map_err(|e| CliError::Format { path: source.into(), msg: e.to_string() })
}

pub fn write_grid_json<W: Write>(writer: W, grid: &QuantileGrid) -> Result<(), CliError> {
    serde_json::to_writer_pretty(writer, grid).map_err(|e| CliError::Other(e.to_string()))
}

pub fn read_grid_json<R: Read>(reader: R, source: &str) -> Result<QuantileGrid, CliError> {
    let fmt = |msg: String| CliError::Format { path: source.into(), msg };
    let raw: QuantileGrid = serde_json::from_reader(reader).map_err(|e| fmt(e.to_string()))?;
    // deserialization bypasses the constructor checks
    QuantileGrid::from_parts(raw.entries().to_vec(), raw.conservative_entries().to_vec())
        .map_err(|e| fmt(e.to_string()))
}

/// Reads a grid file, as JSON when the extension is `.json` and as CSV
/// otherwise.
pub fn read_grid_path(path: &Path) -> Result<QuantileGrid, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let source = path.display().to_string();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        read_grid_json(file, &source)
    } else {
        read_grid_csv(file, &source)
    }
}
