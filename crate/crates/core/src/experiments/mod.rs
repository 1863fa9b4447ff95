//! Experiment drivers behind the `rshrink` CLI: NMSE and convergence Monte
//! Carlo sweeps, likelihood scans, STAP detection maps and one-shot estimation.
//!
//! Trials run in parallel on per-trial RNG streams and are reduced in trial
//! order, so every CSV is byte-identical for a given config and seed no
//! matter how many threads run it.

mod config;
mod montecarlo;
mod stap_map;

pub use config::{
    EstimateConfig, EstimateMethod, ExperimentConfig, ExperimentKind, LikelihoodScanConfig, MonteCarloConfig,
    ScenarioRef, StapMapConfig,
};
pub use montecarlo::{
    convergence_csv, likelihood_scan_csv, nmse_csv, run_convergence, run_likelihood_scan, run_nmse, C1Record,
    NmseRecord, ScanRecord, FAILURE_BUDGET,
};
pub use stap_map::{run_stap_map, write_maps, MapOutput};

use crate::error::Result;
use crate::estimators::{self, Normalization, SampleSet, SolverConfig, SolverReport};
use crate::linalg::HermitianPDS;

/// Runs the configured estimator on the sample file named in `cfg`.
pub fn run_estimate(cfg: &EstimateConfig) -> Result<(HermitianPDS, SolverReport)> {
    cfg.validate()?;
    let samples = SampleSet::read(&cfg.input)?;
    let solver = SolverConfig::new(cfg.beta)
        .with_tol(cfg.tol)
        .with_max_iter(cfg.max_iter);
    let closed_form = |sigma: HermitianPDS| {
        let report = SolverReport { iterations: 0, final_residual: 0.0, converged: true, residual_history: vec![] };
        (sigma, report)
    };
    match cfg.method {
        EstimateMethod::Scm => HermitianPDS::new(estimators::scm(&samples)).map(closed_form),
        EstimateMethod::DlScm => estimators::dl_scm(&samples, cfg.beta).map(closed_form),
        EstimateMethod::SFpe => estimators::shrinkage_fpe(&samples, &solver),
        EstimateMethod::SFpeW => estimators::wiesel_fpe(&samples, &solver),
        EstimateMethod::Tyler => {
            let norm = match cfg.normalization {
                Normalization::None => Normalization::TraceInvM,
                other => other,
            };
            estimators::tyler_fpe(&samples, &SolverConfig { beta: 0.0, ..solver.with_normalization(norm) })
        }
    }
}
