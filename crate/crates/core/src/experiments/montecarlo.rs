use std::fmt::Write as _;

use log::warn;
use rayon::prelude::*;

use super::config::{LikelihoodScanConfig, MonteCarloConfig};
use crate::error::{Error, Result};
use crate::estimators::{shrinkage_fpe, tyler_fpe, Normalization, SolverConfig};
use crate::likelihood::profile_sweep;
use crate::linalg::relative_frob_distance;
use crate::scenarios::{sample_gaussian, toeplitz_covariance, RngSeed, ToeplitzSpec};

/// Largest tolerated fraction of failed solves in a Monte-Carlo run.
pub const FAILURE_BUDGET: f64 = 1e-3;

pub const DEFAULT_NMSE_TRIALS: usize = 2000;
pub const DEFAULT_C1_TRIALS: usize = 200;

/// Tolerance for the Tyler reference point, which converges geometrically
/// at a rate set by `N / m` rather than by `β`.
const TYLER_TOL: f64 = 1e-12;
const TYLER_MAX_ITER: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct NmseRecord {
    pub beta: f64,
    pub nmse_sfpe: f64,
    pub nmse_fpe: f64,
    /// Successful trials behind `nmse_sfpe`.
    pub trials: usize,
    /// Standard error of `nmse_sfpe`.
    pub stderr: f64,
    pub stderr_fpe: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct C1Record {
    pub beta: f64,
    pub c1: f64,
    pub stderr: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRecord {
    pub beta: f64,
    pub m_value: f64,
    pub m_prime: f64,
    pub grad_norm: f64,
    pub trace_inv: f64,
}

/// Mean and standard error (sample standard deviation over `√n`).
fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Per-trial outcomes, one slot per β, collected in trial order.
struct TrialTable {
    baseline: Vec<Option<f64>>,
    per_beta: Vec<Vec<Option<f64>>>,
}

impl TrialTable {
    fn collect(rows: Vec<(Option<f64>, Vec<Option<f64>>)>, n_betas: usize) -> Self {
        let mut baseline = Vec::with_capacity(rows.len());
        let mut per_beta = vec![Vec::with_capacity(rows.len()); n_betas];
        for (b, vals) in rows {
            baseline.push(b);
            for (slot, v) in per_beta.iter_mut().zip(vals) {
                slot.push(v);
            }
        }
        Self { baseline, per_beta }
    }

    fn check_budget(&self) -> Result<()> {
        let total = self.baseline.len() * (1 + self.per_beta.len());
        let failed = self.baseline.iter().filter(|v| v.is_none()).count()
            + self.per_beta.iter().flatten().filter(|v| v.is_none()).count();
        if failed as f64 > FAILURE_BUDGET * total as f64 {
            return Err(Error::FailureBudget { failed, total });
        }
        Ok(())
    }
}

fn successes(col: &[Option<f64>]) -> Vec<f64> {
    col.iter().flatten().copied().collect()
}

fn log_failure<T>(what: &str, trial: u64, beta: f64, r: Result<T>) -> Option<T> {
    r.map_err(|e| warn!("{what}: trial {trial}, beta {beta}: {e}")).ok()
}

fn tyler_config() -> SolverConfig {
    SolverConfig::new(0.0)
        .with_tol(TYLER_TOL)
        .with_max_iter(TYLER_MAX_ITER)
        .with_normalization(Normalization::TraceInvM)
}

/// Per trial: relative Frobenius distance of the Tyler point to the truth,
/// and of each `Σ(β)` to the truth (`against_truth`) or to the Tyler point.
fn solve_grid(cfg: &MonteCarloConfig, trials: usize, against_truth: bool) -> Result<TrialTable> {
    let truth = toeplitz_covariance(&cfg.toeplitz())?;
    let rows: Vec<(Option<f64>, Vec<Option<f64>>)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let samples = match sample_gaussian(&truth, cfg.n, RngSeed::new(cfg.seed, trial)) {
                Ok(s) => s,
                Err(e) => {
                    warn!("trial {trial}: sampling failed: {e}");
                    return (None, vec![None; cfg.betas.len()]);
                }
            };
            let tyler = log_failure("tyler", trial, 0.0, tyler_fpe(&samples, &tyler_config()).map(|(s, _)| s));
            let target = if against_truth { Some(truth.clone()) } else { tyler.clone() };
            let baseline = tyler.as_ref().map(|t| relative_frob_distance(t.matrix(), truth.matrix()));
            let vals = cfg
                .betas
                .iter()
                .map(|&beta| {
                    let target = target.as_ref()?;
                    let solved = shrinkage_fpe(&samples, &SolverConfig::accurate(beta, cfg.accuracy));
                    let (est, _) = log_failure("shrinkage", trial, beta, solved)?;
                    Some(relative_frob_distance(est.matrix(), target.matrix()))
                })
                .collect();
            (baseline, vals)
        })
        .collect();
    let table = TrialTable::collect(rows, cfg.betas.len());
    table.check_budget()?;
    Ok(table)
}

/// `‖Σ̂ - Σ‖_F / ‖Σ‖_F` averaged over trials for the shrinkage estimator at
/// each β, alongside the Tyler baseline (`Tr(Σ^{-1}) = m` scale).
pub fn run_nmse(cfg: &MonteCarloConfig) -> Result<Vec<NmseRecord>> {
    cfg.validate()?;
    let trials = cfg.trials.unwrap_or(DEFAULT_NMSE_TRIALS);
    let table = solve_grid(cfg, trials, true)?;
    let (fpe, stderr_fpe) = mean_stderr(&successes(&table.baseline));
    Ok(cfg
        .betas
        .iter()
        .zip(&table.per_beta)
        .map(|(&beta, col)| {
            let ok = successes(col);
            let (nmse, stderr) = mean_stderr(&ok);
            NmseRecord { beta, nmse_sfpe: nmse, nmse_fpe: fpe, trials: ok.len(), stderr, stderr_fpe }
        })
        .collect())
}

/// `C1(β) = ‖Σ(β) - Σ_FP‖_F / ‖Σ_FP‖_F` averaged over trials, with `Σ_FP` the
/// Tyler point scaled to `Tr(Σ_FP^{-1}) = m`.
pub fn run_convergence(cfg: &MonteCarloConfig) -> Result<Vec<C1Record>> {
    cfg.validate()?;
    let trials = cfg.trials.unwrap_or(DEFAULT_C1_TRIALS);
    let table = solve_grid(cfg, trials, false)?;
    Ok(cfg
        .betas
        .iter()
        .zip(&table.per_beta)
        .map(|(&beta, col)| {
            let ok = successes(col);
            let (c1, stderr) = mean_stderr(&ok);
            C1Record { beta, c1, stderr, trials: ok.len() }
        })
        .collect())
}

/// Likelihood profile over β for a single data set.
pub fn run_likelihood_scan(cfg: &LikelihoodScanConfig) -> Result<Vec<ScanRecord>> {
    cfg.validate()?;
    let truth = toeplitz_covariance(&ToeplitzSpec::new(cfg.m, cfg.rho))?;
    let samples = sample_gaussian(&truth, cfg.n, RngSeed::new(cfg.seed, 0))?;
    let smallest = cfg.betas.iter().copied().fold(1.0, f64::min);
    let solver = SolverConfig::accurate(smallest, cfg.accuracy);
    Ok(profile_sweep(&cfg.betas, &samples, &solver)?
        .into_iter()
        .map(|p| ScanRecord {
            beta: p.beta,
            m_value: p.m_value,
            m_prime: p.m_prime,
            grad_norm: p.grad_norm,
            trace_inv: p.trace_inv,
        })
        .collect())
}

pub fn nmse_csv(records: &[NmseRecord]) -> String {
    let mut out = String::from("beta,nmse_sfpe,nmse_fpe,trials,stderr\n");
    for r in records {
        writeln!(out, "{},{},{},{},{}", r.beta, r.nmse_sfpe, r.nmse_fpe, r.trials, r.stderr).expect("write to String");
    }
    out
}

pub fn convergence_csv(records: &[C1Record]) -> String {
    let mut out = String::from("beta,c1,stderr,trials\n");
    for r in records {
        writeln!(out, "{},{},{},{}", r.beta, r.c1, r.stderr, r.trials).expect("write to String");
    }
    out
}

pub fn likelihood_scan_csv(records: &[ScanRecord]) -> String {
    let mut out = String::from("beta,M,M_prime,grad_norm_at_solution,trace_inv\n");
    for r in records {
        writeln!(out, "{},{},{},{},{}", r.beta, r.m_value, r.m_prime, r.grad_norm, r.trace_inv)
            .expect("write to String");
    }
    out
}
