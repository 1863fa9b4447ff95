use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::HermitianPDS;

/// Rescaling applied to every iterate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    None,
    /// `Tr(Σ) = m`
    TraceM,
    /// `Tr(Σ^{-1}) = m`
    TraceInvM,
}

#[derive(Clone, Debug, Default)]
pub enum Init {
    #[default]
    Identity,
    Matrix(HermitianPDS),
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub beta: f64,
    /// Threshold on `||Σ_{k+1} - Σ_k||_F / ||Σ_k||_F`.
    pub tol: f64,
    pub max_iter: usize,
    pub init: Init,
    pub normalization: Normalization,
}

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Smallest tolerance handed out by [`SolverConfig::accurate`]; successive
/// iterates stop changing below roughly this level in double precision.
const TOL_FLOOR: f64 = 1e-13;

impl SolverConfig {
    pub fn new(beta: f64) -> Self {
        Self {
            beta,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            init: Init::Identity,
            normalization: Normalization::None,
        }
    }

    /// Configuration whose converged iterate lies within roughly `error`
    /// (relative Frobenius) of the exact fixed point.
    ///
    /// The shrinkage iteration contracts by about `1 - β` per step along its
    /// slowest direction, so a successive change of `tol` leaves an error of
    /// about `tol (1 - β) / β`. The tolerance is scaled by `β` and the
    /// iteration budget by `1 / β` accordingly.
    pub fn accurate(beta: f64, error: f64) -> Self {
        let rate = beta.clamp(1e-6, 1.0);
        let tol = (error * rate).max(TOL_FLOOR);
        let needed = 2.0 * (1.0 / tol).ln() / rate;
        Self {
            tol,
            max_iter: (needed.ceil() as usize).max(DEFAULT_MAX_ITER),
            ..Self::new(beta)
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidBeta { beta: self.beta, lower: 0.0 });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub residual_history: Vec<f64>,
}

impl SolverReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
