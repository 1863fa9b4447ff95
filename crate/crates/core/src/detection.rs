//! ANMF detection over an angle/velocity grid, with guard-cell based
//! selection of secondary data.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{CovarianceEstimator, SolverConfig};
use crate::linalg::{ComplexVector, HermitianPDS};
use crate::scenarios::{stap_steering, Datacube, StapScenario};

/// `|p^H M^{-1} y|² / ((p^H M^{-1} p)(y^H M^{-1} y))`, clamped to `[0, 1]`.
///
/// Evaluated on whitened vectors `L^{-1} p`, `L^{-1} y`, which keeps the
/// Cauchy–Schwarz bound intact up to rounding.
pub fn anmf(p: &ComplexVector, y: &ComplexVector, cov: &HermitianPDS) -> Result<f64> {
    if p.norm_sqr() == 0.0 || y.norm_sqr() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let wp = cov.whiten(p)?;
    let wy = cov.whiten(y)?;
    Ok(anmf_whitened(&wp, &wy))
}

fn anmf_whitened(wp: &ComplexVector, wy: &ComplexVector) -> f64 {
    let num = wp.dot(wy).norm_sqr();
    let den = wp.norm_sqr() * wy.norm_sqr();
    (num / den).clamp(0.0, 1.0)
}

/// Secondary-data cells for one cell under test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellSelection {
    pub cell_under_test: usize,
    pub guard: usize,
    /// Cells removed from the secondary set (guard band, CUT, dropped outliers).
    pub excluded: Vec<usize>,
    pub selected: Vec<usize>,
}

impl CellSelection {
    pub fn selected_count(&self) -> usize {
        self.selected.len()
    }

    /// Keeps the `n` selected cells closest to the cell under test (the
    /// lower cell wins a tie), returned in ascending order.
    pub fn capped(mut self, n: usize) -> Result<Self> {
        if n == 0 || n > self.selected.len() {
            return Err(Error::invalid(format!(
                "requested {n} secondary cells, {} available",
                self.selected.len()
            )));
        }
        let cut = self.cell_under_test;
        let mut by_distance = self.selected.clone();
        by_distance.sort_by_key(|&c| (c.abs_diff(cut), c));
        let mut kept = by_distance[..n].to_vec();
        kept.sort_unstable();
        let mut dropped = by_distance[n..].to_vec();
        self.excluded.append(&mut dropped);
        self.excluded.sort_unstable();
        self.selected = kept;
        Ok(self)
    }
}

/// All cells except the CUT and `guard` cells on each side of it. Cells in
/// `contaminated` are dropped unless `keep_contaminated` is set.
pub fn select_secondary(
    n_cells: usize,
    cut: usize,
    guard: usize,
    contaminated: &[usize],
    keep_contaminated: bool,
) -> Result<CellSelection> {
    if cut < guard || cut + guard >= n_cells {
        return Err(Error::invalid(format!(
            "cell {cut} with {guard} guard cells does not fit in {n_cells} cells"
        )));
    }
    let in_guard = |c: usize| c.abs_diff(cut) <= guard;
    let dropped = |c: usize| !keep_contaminated && contaminated.contains(&c);
    let (excluded, selected): (Vec<usize>, Vec<usize>) =
        (0..n_cells).partition(|&c| in_guard(c) || dropped(c));
    if selected.is_empty() {
        return Err(Error::invalid("no secondary cells left"));
    }
    Ok(CellSelection { cell_under_test: cut, guard, excluded, selected })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapGrid {
    pub angles_deg: Vec<f64>,
    pub velocities_mps: Vec<f64>,
}

/// Velocity bins of [`MapGrid::default_for`].
pub const DEFAULT_VELOCITY_BINS: usize = 101;

impl MapGrid {
    /// `-90°..=90°` in 1° steps, and 101 velocities spanning the unambiguous
    /// interval `±f_r λ / 4`.
    pub fn default_for(scn: &StapScenario) -> Self {
        let vmax = scn.max_unambiguous_speed();
        let nv = DEFAULT_VELOCITY_BINS;
        Self {
            angles_deg: (0..=180).map(|a| a as f64 - 90.0).collect(),
            velocities_mps: (0..nv)
                .map(|i| -vmax + 2.0 * vmax * i as f64 / (nv - 1) as f64)
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.angles_deg.is_empty() || self.velocities_mps.is_empty() {
            return Err(Error::invalid("empty map grid"));
        }
        Ok(())
    }
}

/// ANMF values over an angle × velocity grid, stored row-major by angle.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionMap {
    pub angles_deg: Vec<f64>,
    pub velocities_mps: Vec<f64>,
    pub values: Vec<f64>,
    pub estimator_tag: String,
    pub beta: Option<f64>,
}

/// Dynamic range kept by [`DetectionMap::to_csv`], in decades of `Λ`.
pub const EXPORT_DECADES: f64 = 3.0;

impl DetectionMap {
    pub fn value(&self, angle_idx: usize, velocity_idx: usize) -> f64 {
        self.values[angle_idx * self.velocities_mps.len() + velocity_idx]
    }

    /// Grid indices `(angle, velocity)` of the largest value; first wins on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        let nv = self.velocities_mps.len();
        (best / nv, best % nv)
    }

    /// `(angle_deg, velocity_mps, value)` at the maximum.
    pub fn peak(&self) -> (f64, f64, f64) {
        let (i, j) = self.argmax();
        (self.angles_deg[i], self.velocities_mps[j], self.value(i, j))
    }

    /// Whether the maximum lies within one grid step of the given location.
    pub fn peak_near(&self, angle_deg: f64, velocity_mps: f64) -> bool {
        let (i, j) = self.argmax();
        let ti = nearest(&self.angles_deg, angle_deg);
        let tj = nearest(&self.velocities_mps, velocity_mps);
        i.abs_diff(ti) <= 1 && j.abs_diff(tj) <= 1
    }

    /// `10 log10(max / median)` over the whole map.
    pub fn peak_to_median_db(&self) -> f64 {
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        10.0 * (sorted[n - 1] / median).log10()
    }

    /// `max |a - b|` over matching grids.
    pub fn sup_difference(&self, other: &DetectionMap) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), got: other.values.len() });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// CSV `angle_deg,velocity_mps,log10_lambda` with values floored at
    /// `max - 3` (30 dB below the peak).
    pub fn to_csv(&self) -> String {
        let top = self.values.iter().copied().fold(f64::MIN_POSITIVE, f64::max).log10();
        let floor = top - EXPORT_DECADES;
        let mut out = String::from("angle_deg,velocity_mps,log10_lambda\n");
        for (i, a) in self.angles_deg.iter().enumerate() {
            for (j, v) in self.velocities_mps.iter().enumerate() {
                let l = self.value(i, j).max(f64::MIN_POSITIVE).log10().max(floor);
                writeln!(out, "{a},{v},{l}").expect("writing to a String");
            }
        }
        out
    }
}

fn nearest(grid: &[f64], x: f64) -> usize {
    let mut best = 0;
    for (i, g) in grid.iter().enumerate() {
        if (g - x).abs() < (grid[best] - x).abs() {
            best = i;
        }
    }
    best
}

/// JSON sidecar written next to an exported map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapMetadata {
    pub estimator: String,
    pub beta: Option<f64>,
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub cut: usize,
    pub seed: u64,
}

/// ANMF map for a fixed covariance estimate and cell-under-test vector.
pub fn map_from_estimate(
    scn: &StapScenario,
    y: &ComplexVector,
    cov: &HermitianPDS,
    grid: &MapGrid,
    estimator_tag: &str,
    beta: Option<f64>,
) -> Result<DetectionMap> {
    grid.validate()?;
    if y.norm_sqr() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let wy = cov.whiten(y)?;
    let nv = grid.velocities_mps.len();
    let values = (0..grid.angles_deg.len() * nv)
        .into_par_iter()
        .map(|k| {
            let p = stap_steering(scn, grid.angles_deg[k / nv], grid.velocities_mps[k % nv]);
            Ok(anmf_whitened(&cov.whiten(&p)?, &wy))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DetectionMap {
        angles_deg: grid.angles_deg.clone(),
        velocities_mps: grid.velocities_mps.clone(),
        values,
        estimator_tag: estimator_tag.to_string(),
        beta,
    })
}

/// Estimates the covariance once from the selected secondary cells and
/// sweeps the ANMF statistic of the cell under test over `grid`.
pub fn detection_map(
    cube: &Datacube,
    scn: &StapScenario,
    selection: &CellSelection,
    estimator: &CovarianceEstimator,
    solver: &SolverConfig,
    grid: &MapGrid,
) -> Result<DetectionMap> {
    if cube.dim() != scn.dim() {
        return Err(Error::DimensionMismatch { expected: scn.dim(), got: cube.dim() });
    }
    let y = cube
        .cell(selection.cell_under_test)
        .ok_or_else(|| Error::invalid("cell under test outside the datacube"))?;
    let secondary = cube.samples(&selection.selected)?;
    let cov = estimator.estimate(&secondary, solver)?;
    map_from_estimate(scn, y, &cov, grid, estimator.tag(), estimator.beta())
}
