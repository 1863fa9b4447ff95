//! Covariance and scatter estimators.
//!
//! All fixed-point estimators share one iteration driver: start from the
//! configured initial matrix, apply the estimator's map (plus an optional
//! rescaling), stop when the relative successive change drops to `tol`.

mod config;
mod samples;

pub use config::{Init, Normalization, SolverConfig, SolverReport, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use samples::{SampleSet, MIN_SAMPLE_NORM};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{relative_frob_distance, Hermitian, HermitianPDS};

/// Quadratic forms `x^H Σ^{-1} x` below this raise [`Error::NumericalBreakdown`].
pub const MIN_QUAD_FORM: f64 = 1e-300;

/// `max(0, 1 - N/m)`: the shrinkage fixed point exists iff `β ∈ (β̄, 1]`.
pub fn beta_lower_bound(m: usize, n: usize) -> f64 {
    (1.0 - n as f64 / m as f64).max(0.0)
}

fn check_admissible_beta(beta: f64, m: usize, n: usize) -> Result<()> {
    let lower = beta_lower_bound(m, n);
    if beta > lower && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidBeta { beta, lower })
    }
}

fn check_unit_interval(beta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(Error::InvalidBeta { beta, lower: 0.0 })
    }
}

/// `(1/N) Σ x_n x_n^H`. Positive semidefinite; singular whenever `N < m`.
pub fn scm(samples: &SampleSet) -> Hermitian {
    let w = 1.0 / samples.len() as f64;
    Hermitian::weighted_outer_sum(samples.dim(), samples.iter().map(|x| (w, x)))
}

/// `(1 - β) SCM + β I`; positive definite for any `N` once `β > 0`.
pub fn dl_scm(samples: &SampleSet, beta: f64) -> Result<HermitianPDS> {
    check_unit_interval(beta)?;
    let m = samples.dim();
    HermitianPDS::new(scm(samples).lincomb(1.0 - beta, &Hermitian::identity(m), beta))
}

/// `x_n^H Σ^{-1} x_n` for every sample.
pub fn quad_forms(sigma: &HermitianPDS, samples: &SampleSet) -> Result<Vec<f64>> {
    if sigma.dim() != samples.dim() {
        return Err(Error::DimensionMismatch { expected: sigma.dim(), got: samples.dim() });
    }
    samples
        .iter()
        .enumerate()
        .map(|(n, x)| {
            let q = sigma.factor().inv_quad(x.as_slice());
            if !(q >= MIN_QUAD_FORM) || !q.is_finite() {
                Err(Error::NumericalBreakdown(format!(
                    "quadratic form of sample {n} is {q:e}"
                )))
            } else {
                Ok(q)
            }
        })
        .collect()
}

/// `scale * Σ_n x_n x_n^H / q_n` with the quadratic forms `q`.
fn weighted_scatter(samples: &SampleSet, q: &[f64], scale: f64) -> Hermitian {
    Hermitian::weighted_outer_sum(
        samples.dim(),
        samples.iter().zip(q).map(|(x, &qn)| (scale / qn, x)),
    )
}

fn tyler_scale(samples: &SampleSet) -> f64 {
    samples.dim() as f64 / samples.len() as f64
}

fn map_f(sigma: &HermitianPDS, samples: &SampleSet, beta: f64) -> Result<Hermitian> {
    let q = quad_forms(sigma, samples)?;
    let t = weighted_scatter(samples, &q, (1.0 - beta) * tyler_scale(samples));
    Ok(t.add(&Hermitian::scaled_identity(samples.dim(), beta)))
}

/// `f_β(Σ) = (1 - β) (m/N) Σ_n x_n x_n^H / (x_n^H Σ^{-1} x_n) + β I`.
pub fn apply_map_f(sigma: &HermitianPDS, samples: &SampleSet, beta: f64) -> Result<HermitianPDS> {
    check_unit_interval(beta)?;
    HermitianPDS::new(map_f(sigma, samples, beta)?)
}

/// `||Σ - f_β(Σ)||_F / ||Σ||_F`.
pub fn fp_residual(sigma: &HermitianPDS, samples: &SampleSet, beta: f64) -> Result<f64> {
    check_unit_interval(beta)?;
    Ok(relative_frob_distance(&map_f(sigma, samples, beta)?, sigma.matrix()))
}

/// Right-hand side of the trace-penalized fixed point:
/// `(1 - β)(m/N) Σ_n x_n x_n^H / q_n + β m / Tr(Σ^{-1}) I`.
fn map_wiesel(sigma: &HermitianPDS, samples: &SampleSet, beta: f64) -> Result<Hermitian> {
    let m = samples.dim() as f64;
    let q = quad_forms(sigma, samples)?;
    let t = weighted_scatter(samples, &q, (1.0 - beta) * tyler_scale(samples));
    let load = beta * m / sigma.inv_trace();
    Ok(t.add(&Hermitian::scaled_identity(samples.dim(), load)))
}

/// Plug-back residual of the trace-penalized equation after `Tr(·) = m` scaling.
pub fn wiesel_residual(sigma: &HermitianPDS, samples: &SampleSet, beta: f64) -> Result<f64> {
    check_unit_interval(beta)?;
    let next = normalize(HermitianPDS::new(map_wiesel(sigma, samples, beta)?)?, Normalization::TraceM)?;
    Ok(relative_frob_distance(next.matrix(), sigma.matrix()))
}

fn normalize(sigma: HermitianPDS, how: Normalization) -> Result<HermitianPDS> {
    let m = sigma.dim() as f64;
    match how {
        Normalization::None => Ok(sigma),
        Normalization::TraceM => sigma.scaled(m / sigma.trace()),
        Normalization::TraceInvM => sigma.scaled(sigma.inv_trace() / m),
    }
}

fn initial_iterate(samples: &SampleSet, cfg: &SolverConfig) -> Result<HermitianPDS> {
    let m = samples.dim();
    let init = match &cfg.init {
        Init::Identity => HermitianPDS::identity(m),
        Init::Matrix(a) if a.dim() == m => a.clone(),
        Init::Matrix(a) => return Err(Error::DimensionMismatch { expected: m, got: a.dim() }),
    };
    normalize(init, cfg.normalization)
}

/// Iterates `Σ_{k+1} = normalize(step(Σ_k))` until the relative successive
/// change is at most `cfg.tol`.
fn run_fixed_point(
    samples: &SampleSet,
    cfg: &SolverConfig,
    mut step: impl FnMut(&HermitianPDS) -> Result<Hermitian>,
) -> Result<(HermitianPDS, SolverReport)> {
    let mut current = initial_iterate(samples, cfg)?;
    let mut history = Vec::new();
    for _ in 0..cfg.max_iter {
        // The maps preserve positive definiteness, so a failed factorization
        // means the iterates have run away (condition number beyond the pivot
        // tolerance): the iteration is diverging.
        let next = match HermitianPDS::new(step(&current)?) {
            Ok(next) => normalize(next, cfg.normalization)?,
            Err(Error::NotPositiveDefinite { .. }) => break,
            Err(e) => return Err(e),
        };
        let residual = relative_frob_distance(next.matrix(), current.matrix());
        if !residual.is_finite() {
            return Err(Error::NumericalBreakdown(format!(
                "non-finite residual after {} iterations",
                history.len()
            )));
        }
        history.push(residual);
        current = next;
        if residual <= cfg.tol {
            let report = SolverReport {
                iterations: history.len(),
                final_residual: residual,
                converged: true,
                residual_history: history,
            };
            return Ok((current, report));
        }
    }
    let report = SolverReport {
        iterations: history.len(),
        final_residual: *history.last().unwrap_or(&f64::INFINITY),
        converged: false,
        residual_history: history,
    };
    Err(Error::NoConvergence { last: Box::new(current), report })
}

/// Unique solution `Σ(β)` of `Σ = f_β(Σ)` for `β ∈ (β̄, 1]`, by plain
/// iteration of `f_β` without any trace rescaling.
///
/// `β = 0` is answered by [`shrinkage_fpe_limit`] when `N > m`.
pub fn shrinkage_fpe(samples: &SampleSet, cfg: &SolverConfig) -> Result<(HermitianPDS, SolverReport)> {
    cfg.validate()?;
    if cfg.normalization != Normalization::None {
        return Err(Error::invalid("shrinkage_fpe iterates without normalization"));
    }
    if cfg.beta == 0.0 {
        return limit_with_report(samples, cfg);
    }
    check_admissible_beta(cfg.beta, samples.dim(), samples.len())?;
    let beta = cfg.beta;
    run_fixed_point(samples, cfg, |s| map_f(s, samples, beta))
}

/// The same plain iteration as [`shrinkage_fpe`] but without the eager
/// `β > β̄` check, for probing the existence boundary. Below it the iterates
/// are expected to end in [`Error::NoConvergence`].
pub fn iterate_shrinkage_map(samples: &SampleSet, cfg: &SolverConfig) -> Result<(HermitianPDS, SolverReport)> {
    cfg.validate()?;
    if cfg.normalization != Normalization::None {
        return Err(Error::invalid("iterate_shrinkage_map iterates without normalization"));
    }
    let beta = cfg.beta;
    run_fixed_point(samples, cfg, |s| map_f(s, samples, beta))
}

/// Tyler's fixed point `Σ = f_0(Σ)`, pinned down by rescaling every iterate
/// to `Tr(Σ) = m` or `Tr(Σ^{-1}) = m`.
pub fn tyler_fpe(samples: &SampleSet, cfg: &SolverConfig) -> Result<(HermitianPDS, SolverReport)> {
    cfg.validate()?;
    if cfg.beta != 0.0 {
        return Err(Error::invalid("tyler_fpe requires beta = 0"));
    }
    if cfg.normalization == Normalization::None {
        return Err(Error::invalid(
            "tyler_fpe needs a normalization; its solutions form a ray",
        ));
    }
    // β = 0 is admissible exactly when N > m
    if samples.len() <= samples.dim() {
        return Err(Error::InvalidBeta {
            beta: 0.0,
            lower: beta_lower_bound(samples.dim(), samples.len()),
        });
    }
    run_fixed_point(samples, cfg, |s| map_f(s, samples, 0.0))
}

fn limit_with_report(samples: &SampleSet, cfg: &SolverConfig) -> Result<(HermitianPDS, SolverReport)> {
    let cfg = SolverConfig {
        beta: 0.0,
        normalization: Normalization::TraceInvM,
        ..cfg.clone()
    };
    tyler_fpe(samples, &cfg)
}

/// `lim_{β→0} Σ(β)`: the Tyler fixed point with `Tr(Σ^{-1}) = m`. Requires `N > m`.
pub fn shrinkage_fpe_limit(samples: &SampleSet, cfg: &SolverConfig) -> Result<HermitianPDS> {
    limit_with_report(samples, cfg).map(|(s, _)| s)
}

/// Trace-penalized shrinkage fixed point
/// `Σ = (1 - β)(m/N) Σ_n x_n x_n^H / q_n + β m / Tr(Σ^{-1}) I`,
/// unique up to scale and returned with `Tr(Σ) = m`.
pub fn wiesel_fpe(samples: &SampleSet, cfg: &SolverConfig) -> Result<(HermitianPDS, SolverReport)> {
    cfg.validate()?;
    check_admissible_beta(cfg.beta, samples.dim(), samples.len())?;
    let cfg = SolverConfig {
        normalization: Normalization::TraceM,
        ..cfg.clone()
    };
    let beta = cfg.beta;
    run_fixed_point(samples, &cfg, |s| map_wiesel(s, samples, beta))
}

/// Covariance estimators selectable by the detection pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovarianceEstimator {
    Scm,
    DlScm { beta: f64 },
    SFpe { beta: f64 },
    SFpeW { beta: f64 },
}

impl CovarianceEstimator {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Scm => "SCM",
            Self::DlScm { .. } => "DL-SCM",
            Self::SFpe { .. } => "S-FPE",
            Self::SFpeW { .. } => "S-FPE-W",
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            Self::Scm => None,
            Self::DlScm { beta } | Self::SFpe { beta } | Self::SFpeW { beta } => Some(beta),
        }
    }

    /// Runs the estimator; `solver` supplies tolerance and iteration budget
    /// for the fixed-point variants (its `beta` is overridden).
    pub fn estimate(&self, samples: &SampleSet, solver: &SolverConfig) -> Result<HermitianPDS> {
        match *self {
            Self::Scm => HermitianPDS::new(scm(samples)),
            Self::DlScm { beta } => dl_scm(samples, beta),
            Self::SFpe { beta } => {
                let cfg = SolverConfig { beta, normalization: Normalization::None, ..solver.clone() };
                shrinkage_fpe(samples, &cfg).map(|(s, _)| s)
            }
            Self::SFpeW { beta } => {
                let cfg = SolverConfig { beta, ..solver.clone() };
                wiesel_fpe(samples, &cfg).map(|(s, _)| s)
            }
        }
    }
}
