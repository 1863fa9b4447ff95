use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{colored_draw, RngSeed};
use crate::error::{Error, Result};
use crate::estimators::SampleSet;
use crate::linalg::{io, ComplexVector, Hermitian, HermitianPDS, C64};

/// Rounded value; keeps the usual `λ = 3 cm` at 10 GHz.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Clutter patches spread uniformly over `[-90°, 90°]`.
pub const DEFAULT_PATCHES: usize = 181;

/// Side-looking airborne array: `sensors` elements, `pulses` pulses per
/// coherent interval. Data dimension is `sensors * pulses`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StapScenario {
    pub sensors: usize,
    pub pulses: usize,
    pub f0_hz: f64,
    pub bandwidth_hz: f64,
    pub speed_mps: f64,
    pub spacing_m: f64,
    pub prf_hz: f64,
    pub cnr_db: f64,
    pub scr_db: f64,
}

impl StapScenario {
    /// The full-size airborne configuration: 4 sensors, 64 pulses, 30 cm
    /// spacing at 10 GHz (ten wavelengths, so strongly aliased in angle).
    pub fn full_size() -> Self {
        Self {
            sensors: 4,
            pulses: 64,
            f0_hz: 10e9,
            bandwidth_hz: 5e6,
            speed_mps: 100.0,
            spacing_m: 0.3,
            prf_hz: 1000.0,
            cnr_db: 20.0,
            scr_db: -5.0,
        }
    }

    /// Desk-scale configuration: 16 pulses, half-wavelength spacing, and a
    /// platform speed chosen so the clutter slope matches the full-size one.
    pub fn desk() -> Self {
        Self {
            pulses: 16,
            speed_mps: 5.0,
            spacing_m: 0.015,
            ..Self::full_size()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "full" => Ok(Self::full_size()),
            "desk" => Ok(Self::desk()),
            other => Err(Error::invalid(format!("unknown scenario preset '{other}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sensors == 0 || self.pulses == 0 {
            return Err(Error::invalid("sensors and pulses must be positive"));
        }
        for (name, v) in [
            ("f0_hz", self.f0_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("speed_mps", self.speed_mps),
            ("spacing_m", self.spacing_m),
            ("prf_hz", self.prf_hz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} = {v} must be positive")));
            }
        }
        if !self.cnr_db.is_finite() || !self.scr_db.is_finite() {
            return Err(Error::invalid("cnr_db and scr_db must be finite"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.sensors * self.pulses
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.f0_hz
    }

    /// Largest unambiguous radial speed, `f_r λ / 4`.
    pub fn max_unambiguous_speed(&self) -> f64 {
        self.prf_hz * self.wavelength() / 4.0
    }

    /// Clutter slope `2V / (d f_r)`.
    pub fn clutter_slope(&self) -> f64 {
        2.0 * self.speed_mps / (self.spacing_m * self.prf_hz)
    }

    /// Clutter-to-noise power ratio (linear), with unit noise power.
    pub fn clutter_power(&self) -> f64 {
        10f64.powf(self.cnr_db / 10.0)
    }
}

/// Space-time steering vector, unit norm; entry `k S + s` (pulse `k`, sensor
/// `s`) has phase `k φ_t + s φ_s` with `φ_s = 2π (d/λ) sin θ` and
/// `φ_t = 2π · 2v / (λ f_r)`.
pub fn stap_steering(scn: &StapScenario, angle_deg: f64, velocity_mps: f64) -> ComplexVector {
    let lambda = scn.wavelength();
    let phi_s = 2.0 * PI * scn.spacing_m / lambda * angle_deg.to_radians().sin();
    let phi_t = 2.0 * PI * 2.0 * velocity_mps / (lambda * scn.prf_hz);
    let norm = 1.0 / (scn.dim() as f64).sqrt();
    let mut v = Vec::with_capacity(scn.dim());
    for k in 0..scn.pulses {
        for s in 0..scn.sensors {
            v.push(C64::from_polar(norm, k as f64 * phi_t + s as f64 * phi_s));
        }
    }
    ComplexVector::new(v).expect("finite steering phases")
}

fn patch_angles(n_patches: usize) -> Vec<f64> {
    match n_patches {
        0 => vec![],
        1 => vec![0.0],
        n => (0..n).map(|i| -90.0 + 180.0 * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `σ_c² (m / P) Σ_i p_i p_i^H + I` over `P` patches on the clutter ridge
/// `v = V sin θ`, so that the clutter part carries `CNR` times the trace of
/// the unit noise part. `n_patches = 0` leaves pure noise.
pub fn synth_clutter_cov(scn: &StapScenario, n_patches: usize) -> Result<HermitianPDS> {
    scn.validate()?;
    let m = scn.dim();
    if n_patches == 0 {
        return Ok(HermitianPDS::identity(m));
    }
    let steering: Vec<ComplexVector> = patch_angles(n_patches)
        .into_iter()
        .map(|a| stap_steering(scn, a, scn.speed_mps * a.to_radians().sin()))
        .collect();
    let w = scn.clutter_power() * m as f64 / n_patches as f64;
    let clutter = Hermitian::weighted_outer_sum(m, steering.iter().map(|p| (w, p)));
    HermitianPDS::new(clutter.add(&Hermitian::identity(m)))
}

/// `round(S + (M - 1) γ)` with `γ = 2V / (d f_r)`, capped at `S M`.
pub fn brennan_rank(scn: &StapScenario) -> usize {
    let r = scn.sensors as f64 + (scn.pulses as f64 - 1.0) * scn.clutter_slope();
    (r.round() as usize).clamp(1, scn.dim())
}

/// A point target injected into one range cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub cell: usize,
    pub angle_deg: f64,
    pub velocity_mps: f64,
}

/// One `S M`-dimensional snapshot per range cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Datacube {
    cells: Vec<ComplexVector>,
}

impl Datacube {
    pub fn new(cells: Vec<ComplexVector>) -> Result<Self> {
        // reuse the sample-set checks for dimensions and nonzero vectors
        let checked = SampleSet::new(cells)?;
        Ok(Self { cells: checked.vectors().to_vec() })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.cells[0].dim()
    }

    pub fn cell(&self, index: usize) -> Option<&ComplexVector> {
        self.cells.get(index)
    }

    pub fn samples(&self, indices: &[usize]) -> Result<SampleSet> {
        SampleSet::new(self.cells.clone())?.select(indices)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_hps1(path, &self.cells)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::new(io::read_hps1(path)?)
    }
}

/// Clutter-plus-noise snapshot per cell (stream id = cell index) with targets
/// added as `α p`, `|α|² = SCR · Tr(clutter covariance)`.
pub fn synth_datacube(scn: &StapScenario, n_cells: usize, targets: &[Target], seed: u64) -> Result<Datacube> {
    if n_cells == 0 {
        return Err(Error::invalid("datacube needs at least one range cell"));
    }
    if let Some(t) = targets.iter().find(|t| t.cell >= n_cells) {
        return Err(Error::invalid(format!("target cell {} outside {} cells", t.cell, n_cells)));
    }
    let cov = synth_clutter_cov(scn, DEFAULT_PATCHES)?;
    let amplitude = (10f64.powf(scn.scr_db / 10.0) * scn.clutter_power() * scn.dim() as f64).sqrt();
    let cells = (0..n_cells)
        .into_par_iter()
        .map(|cell| {
            let mut rng = RngSeed::new(seed, cell as u64).rng();
            let mut x = ComplexVector::new(colored_draw(&cov, &mut rng))?;
            for t in targets.iter().filter(|t| t.cell == cell) {
                let p = stap_steering(scn, t.angle_deg, t.velocity_mps);
                x = x.add(&p.scaled(amplitude.into()));
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>>>()?;
    Datacube::new(cells)
}
