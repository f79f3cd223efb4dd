use alloc::vec::Vec;

use super::calibrate::QUANTILE_GRID;
use super::RhoSpec;
use crate::error::{domain, Error, Result};

/// Alpha-targeted quantile for one `(n, prop, rho)` cell; `q_star` is `None`
/// where the quantile test is not calculable.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridEntry {
    pub n: usize,
    pub prop: f64,
    pub rho: RhoSpec,
    pub q_star: Option<f64>,
}

/// Minimum alpha-targeted quantile over correlations for one `(n, prop)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConservativeEntry {
    pub n: usize,
    pub prop: f64,
    pub q_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantileGrid {
    entries: Vec<GridEntry>,
    conservative: Vec<ConservativeEntry>,
}

/// Snaps `q` onto the candidate grid, rejecting values that are not on it.
fn on_grid(q: Option<f64>) -> Result<Option<f64>> {
    match q {
        None => Ok(None),
        Some(q) => QUANTILE_GRID
            .iter()
            .copied()
            .find(|g| (g - q).abs() < 1e-9)
            .map(Some)
            .ok_or_else(|| domain(alloc::format!("quantile {q} is not on the calibration grid"))),
    }
}

fn min_quantile(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.flatten().fold(None, |acc: Option<f64>, q| Some(acc.map_or(q, |a| a.min(q))))
}

impl QuantileGrid {
    /// Builds a grid and derives the conservative rows from the entries.
    pub fn from_entries(entries: Vec<GridEntry>) -> Result<Self> {
        Self::from_parts(entries, Vec::new())
    }

    /// Builds a grid from per-correlation entries and explicit conservative
    /// rows. Cells without a conservative row get one derived from their
    /// entries; explicit rows must not exceed any entry of their cell.
    pub fn from_parts(mut entries: Vec<GridEntry>, mut conservative: Vec<ConservativeEntry>) -> Result<Self> {
        for e in &mut entries {
            e.q_star = on_grid(e.q_star)?;
        }
        for c in &mut conservative {
            c.q_star = on_grid(c.q_star)?;
        }
        for (i, c) in conservative.iter().enumerate() {
            if conservative[..i].iter().any(|d| d.n == c.n && d.prop == c.prop) {
                return Err(domain(alloc::format!("duplicate conservative row for n = {}, prop = {}", c.n, c.prop)));
            }
        }
        for e in &entries {
            if let Some(c) = conservative.iter().find(|c| c.n == e.n && c.prop == e.prop) {
                if let (Some(cq), Some(eq)) = (c.q_star, e.q_star) {
                    if cq > eq {
                        return Err(domain(alloc::format!(
                            "conservative quantile {cq} exceeds entry {eq} for n = {}, prop = {}",
                            e.n,
                            e.prop
                        )));
                    }
                }
            } else {
                let q = min_quantile(entries.iter().filter(|f| f.n == e.n && f.prop == e.prop).map(|f| f.q_star));
                conservative.push(ConservativeEntry { n: e.n, prop: e.prop, q_star: q });
            }
        }
        Ok(Self { entries, conservative })
    }

    pub fn entries(&self) -> &[GridEntry] {
        &self.entries
    }

    pub fn conservative_entries(&self) -> &[ConservativeEntry] {
        &self.conservative
    }

    /// Outer `None`: the cell is absent. Inner `None`: not calculable.
    pub fn get(&self, n: usize, prop: f64, rho: RhoSpec) -> Option<Option<f64>> {
        self.entries.iter().find(|e| e.n == n && e.prop == prop && e.rho == rho).map(|e| e.q_star)
    }

    /// Outer `None`: the cell is absent. Inner `None`: not calculable.
    pub fn conservative(&self, n: usize, prop: f64) -> Option<Option<f64>> {
        self.conservative.iter().find(|c| c.n == n && c.prop == prop).map(|c| c.q_star)
    }

    /// Conservative quantile for a real dataset with `n` pairs and matched
    /// proportion `prop`.
    ///
    /// Takes the bracketing grid values on each axis (the largest at or
    /// below and the smallest at or above; one value when the data sit on or
    /// outside a grid edge) and returns the minimum conservative quantile
    /// over the calculable cells they span.
    pub fn lookup(&self, n: usize, prop: f64) -> Result<f64> {
        let mut ns: Vec<usize> = self.conservative.iter().map(|c| c.n).collect();
        ns.sort_unstable();
        ns.dedup();
        let mut props: Vec<f64> = self.conservative.iter().map(|c| c.prop).collect();
        props.sort_by(f64::total_cmp);
        props.dedup();

        let n_lo = ns.iter().rev().find(|&&g| g <= n).copied();
        let n_hi = ns.iter().find(|&&g| g >= n).copied();
        let p_lo = props.iter().rev().find(|&&g| g <= prop).copied();
        let p_hi = props.iter().find(|&&g| g >= prop).copied();

        let mut found_cell = false;
        let mut best: Option<f64> = None;
        for gn in [n_lo, n_hi].into_iter().flatten() {
            for gp in [p_lo, p_hi].into_iter().flatten() {
                if let Some(q) = self.conservative(gn, gp) {
                    found_cell = true;
                    if let Some(q) = q {
                        best = Some(best.map_or(q, |b| b.min(q)));
                    }
                }
            }
        }
        match (best, found_cell) {
            (Some(q), _) => Ok(q),
            (None, true) => Err(Error::NotCalculable { n, prop }),
            (None, false) => Err(Error::MissingGridEntry { n, prop }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(n: usize, prop: f64, rho: f64, q: Option<f64>) -> GridEntry {
        GridEntry { n, prop, rho: RhoSpec::Fixed(rho), q_star: q }
    }

    fn sample_grid() -> QuantileGrid {
        QuantileGrid::from_entries(vec![
            entry(50, 0.25, 0.1, Some(0.35)),
            entry(50, 0.25, 0.25, Some(0.35)),
            entry(50, 0.25, 0.5, Some(0.35)),
            entry(50, 0.25, 0.9, Some(0.30)),
            entry(50, 0.5, 0.1, Some(0.35)),
            entry(50, 0.5, 0.9, Some(0.35)),
            entry(20, 0.1, 0.1, None),
            entry(20, 0.1, 0.9, None),
            entry(20, 0.25, 0.1, Some(0.25)),
            entry(20, 0.25, 0.9, Some(0.20)),
            entry(20, 0.5, 0.1, Some(0.35)),
            entry(20, 0.5, 0.9, Some(0.30)),
        ])
        .unwrap()
    }

    #[test]
    fn conservative_is_min_over_rho() {
        let g = sample_grid();
        assert_eq!(g.conservative(50, 0.25), Some(Some(0.30)));
        assert_eq!(g.conservative(20, 0.1), Some(None));
        assert_eq!(g.conservative(100, 0.25), None);
        for e in g.entries() {
            let c = g.conservative(e.n, e.prop).unwrap();
            if let (Some(c), Some(q)) = (c, e.q_star) {
                assert!(c <= q);
            }
        }
    }

    #[test]
    fn single_rho_conservative_equals_entry() {
        let g = QuantileGrid::from_entries(vec![entry(50, 0.5, 0.5, Some(0.4))]).unwrap();
        assert_eq!(g.conservative(50, 0.5), Some(Some(0.4)));
    }

    #[test]
    fn off_grid_quantiles_rejected() {
        assert!(QuantileGrid::from_entries(vec![entry(50, 0.5, 0.5, Some(0.33))]).is_err());
        let snapped = QuantileGrid::from_entries(vec![entry(50, 0.5, 0.5, Some(0.30000000000000004))]).unwrap();
        assert_eq!(snapped.entries()[0].q_star, Some(0.30));
    }

    #[test]
    fn explicit_conservative_rows_checked() {
        let bad = QuantileGrid::from_parts(
            vec![entry(50, 0.5, 0.5, Some(0.3))],
            vec![ConservativeEntry { n: 50, prop: 0.5, q_star: Some(0.4) }],
        );
        assert!(bad.is_err());
        let only_conservative =
            QuantileGrid::from_parts(Vec::new(), vec![ConservativeEntry { n: 50, prop: 0.5, q_star: Some(0.35) }])
                .unwrap();
        assert_eq!(only_conservative.lookup(50, 0.5).unwrap(), 0.35);
    }

    #[test]
    fn lookup_brackets_and_takes_min() {
        let g = sample_grid();
        assert_eq!(g.lookup(50, 0.25).unwrap(), 0.30);
        // between n = 20 and 50, between props 0.25 and 0.5
        assert_eq!(g.lookup(35, 0.4).unwrap(), 0.20);
        // above the largest n: only the n = 50 bucket
        assert_eq!(g.lookup(80, 0.5).unwrap(), 0.35);
        // bracket includes the uncalculable cell, which is skipped
        assert_eq!(g.lookup(20, 0.2).unwrap(), 0.20);
        assert_eq!(g.lookup(20, 0.1), Err(Error::NotCalculable { n: 20, prop: 0.1 }));
        assert!(matches!(QuantileGrid::default().lookup(20, 0.5), Err(Error::MissingGridEntry { .. })));
    }
}
