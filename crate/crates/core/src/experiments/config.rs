use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::estimators::{beta_lower_bound, CovarianceEstimator, Normalization, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::scenarios::{StapScenario, Target, ToeplitzSpec};

/// Experiment description read from a TOML file; `kind` selects the variant.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Nmse(MonteCarloConfig),
    Convergence(MonteCarloConfig),
    LikelihoodScan(LikelihoodScanConfig),
    StapMap(StapMapConfig),
    Estimate(EstimateConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Nmse,
    Convergence,
    LikelihoodScan,
    StapMap,
    Estimate,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Nmse => "nmse",
            Self::Convergence => "convergence",
            Self::LikelihoodScan => "likelihood_scan",
            Self::StapMap => "stap_map",
            Self::Estimate => "estimate",
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn kind(&self) -> ExperimentKind {
        match self {
            Self::Nmse(_) => ExperimentKind::Nmse,
            Self::Convergence(_) => ExperimentKind::Convergence,
            Self::LikelihoodScan(_) => ExperimentKind::LikelihoodScan,
            Self::StapMap(_) => ExperimentKind::StapMap,
            Self::Estimate(_) => ExperimentKind::Estimate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Nmse(c) | Self::Convergence(c) => c.validate(),
            Self::LikelihoodScan(c) => c.validate(),
            Self::StapMap(c) => c.validate(),
            Self::Estimate(c) => c.validate(),
        }
    }

    /// Replaces the configured seed (no effect for `estimate`).
    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Self::Nmse(c) | Self::Convergence(c) => c.seed = seed,
            Self::LikelihoodScan(c) => c.seed = seed,
            Self::StapMap(c) => c.seed = seed,
            Self::Estimate(_) => {}
        }
    }
}

fn default_accuracy() -> f64 {
    1e-8
}

fn check_accuracy(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("accuracy = {a} must lie in (0, 1)")))
    }
}

fn check_betas(betas: &[f64], lower: f64, allow_zero: bool) -> Result<()> {
    if betas.is_empty() {
        return Err(Error::invalid("beta grid is empty"));
    }
    for &b in betas {
        let ok = (b > lower || (allow_zero && b == 0.0)) && b <= 1.0;
        if !ok {
            return Err(Error::InvalidBeta { beta: b, lower });
        }
    }
    Ok(())
}

/// Monte-Carlo sweep over `betas` on Gaussian data with a normalized
/// Toeplitz covariance. Used for NMSE and convergence runs.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub m: usize,
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
    pub rho: f64,
    pub betas: Vec<f64>,
    /// Defaults to 2000 for NMSE and 200 for convergence.
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Target relative error of each fixed-point solve.
    #[serde(default = "default_accuracy")]
    pub accuracy: f64,
}

impl MonteCarloConfig {
    pub fn new(m: usize, n: usize, rho: f64, betas: Vec<f64>, trials: usize, seed: u64) -> Self {
        Self { m, n, rho, betas, trials: Some(trials), seed, accuracy: default_accuracy() }
    }

    pub fn toeplitz(&self) -> ToeplitzSpec {
        ToeplitzSpec::new(self.m, self.rho)
    }

    /// Both drivers need the Tyler point, hence `N > m`; `β = 0` is allowed
    /// and means the Tyler limit itself.
    pub fn validate(&self) -> Result<()> {
        self.toeplitz().validate()?;
        if self.n <= self.m {
            return Err(Error::invalid(format!("need N > m, got m = {}, N = {}", self.m, self.n)));
        }
        if self.trials == Some(0) {
            return Err(Error::invalid("trials must be at least 1"));
        }
        check_accuracy(self.accuracy)?;
        check_betas(&self.betas, 0.0, true)
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LikelihoodScanConfig {
    pub m: usize,
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
    pub rho: f64,
    pub betas: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_accuracy")]
    pub accuracy: f64,
}

impl LikelihoodScanConfig {
    pub fn validate(&self) -> Result<()> {
        ToeplitzSpec::new(self.m, self.rho).validate()?;
        if self.n == 0 {
            return Err(Error::invalid("N must be positive"));
        }
        check_accuracy(self.accuracy)?;
        check_betas(&self.betas, beta_lower_bound(self.m, self.n), false)
    }
}

/// A scenario preset name (`"desk"`, `"full"`) or a full parameter table.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ScenarioRef {
    Preset(String),
    Custom(StapScenario),
}

impl ScenarioRef {
    pub fn resolve(&self) -> Result<StapScenario> {
        let scn = match self {
            Self::Preset(name) => StapScenario::preset(name)?,
            Self::Custom(s) => s.clone(),
        };
        scn.validate()?;
        Ok(scn)
    }
}

fn default_guard() -> usize {
    4
}

fn default_true() -> bool {
    true
}

fn default_map_accuracy() -> f64 {
    1e-7
}

/// Detection maps for one cell under test and a list of estimators.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StapMapConfig {
    pub scenario: ScenarioRef,
    pub n_cells: usize,
    pub cut: usize,
    #[serde(default = "default_guard")]
    pub guard: usize,
    /// Number of secondary cells kept (nearest to the CUT); all when absent.
    #[serde(rename = "N", alias = "n", default)]
    pub n: Option<usize>,
    /// Targets; those outside the CUT contaminate the secondary data.
    #[serde(default)]
    pub targets: Vec<Target>,
    /// Leave target-bearing secondary cells in the secondary set.
    #[serde(default = "default_true")]
    pub keep_contaminated: bool,
    pub estimators: Vec<CovarianceEstimator>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_map_accuracy")]
    pub accuracy: f64,
}

impl StapMapConfig {
    pub fn contaminated_cells(&self) -> Vec<usize> {
        let mut cells: Vec<usize> = self.targets.iter().map(|t| t.cell).filter(|&c| c != self.cut).collect();
        cells.sort_unstable();
        cells.dedup();
        cells
    }

    pub fn secondary_count(&self) -> Result<usize> {
        let sel = crate::detection::select_secondary(
            self.n_cells,
            self.cut,
            self.guard,
            &self.contaminated_cells(),
            self.keep_contaminated,
        )?;
        match self.n {
            Some(n) => sel.capped(n).map(|s| s.selected_count()),
            None => Ok(sel.selected_count()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let scn = self.scenario.resolve()?;
        if self.estimators.is_empty() {
            return Err(Error::invalid("no estimators listed"));
        }
        if let Some(t) = self.targets.iter().find(|t| t.cell >= self.n_cells) {
            return Err(Error::invalid(format!("target cell {} outside {} cells", t.cell, self.n_cells)));
        }
        check_accuracy(self.accuracy)?;
        let (m, n) = (scn.dim(), self.secondary_count()?);
        for e in &self.estimators {
            match *e {
                CovarianceEstimator::Scm if n < m => {
                    return Err(Error::invalid(format!("SCM needs N >= m, got m = {m}, N = {n}")));
                }
                CovarianceEstimator::Scm => {}
                CovarianceEstimator::DlScm { beta } => check_betas(&[beta], 0.0, true)?,
                CovarianceEstimator::SFpe { beta } | CovarianceEstimator::SFpeW { beta } => {
                    check_betas(&[beta], beta_lower_bound(m, n), false)?
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Scm,
    DlScm,
    SFpe,
    SFpeW,
    Tyler,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

/// One estimate from an `HPS1` sample file.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    pub input: PathBuf,
    pub method: EstimateMethod,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Only used by `tyler` (default `trace_inv_m`).
    #[serde(default)]
    pub normalization: Normalization,
}

impl EstimateConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::invalid("tol and max_iter must be positive"));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidBeta { beta: self.beta, lower: 0.0 });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nmse_with_defaults() {
        let cfg = ExperimentConfig::parse(
            "kind = \"nmse\"\nm = 12\nN = 24\nrho = 0.5\nbetas = [0.1, 0.45, 1.0]\n",
        )
        .unwrap();
        match cfg {
            ExperimentConfig::Nmse(c) => {
                assert_eq!(c.trials, None);
                assert_eq!(c.seed, 0);
                assert_eq!(c.betas.len(), 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ExperimentConfig::parse("kind = \"nmse\"\nm = 12\nN = 24\nrho = 0.5\nbetas = [0.5]\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::parse("kind = \"nmse\"\nm = 12\nN = 12\nrho = 0.5\nbetas = [0.5]\n").is_err());
        assert!(ExperimentConfig::parse("kind = \"nmse\"\nm = 12\nN = 24\nrho = 1.5\nbetas = [0.5]\n").is_err());
        assert!(ExperimentConfig::parse("kind = \"nmse\"\nm = 12\nN = 24\nrho = 0.5\nbetas = [1.5]\n").is_err());
        assert!(ExperimentConfig::parse("kind = \"nope\"\n").is_err());
    }

    #[test]
    fn stap_map_infeasible_beta() {
        let text = r#"
kind = "stap_map"
scenario = "full"
n_cells = 408
cut = 256
N = 200
estimators = [{ kind = "s_fpe", beta = 0.1 }]
"#;
        match ExperimentConfig::parse(text) {
            Err(Error::InvalidBeta { beta, lower }) => {
                assert_eq!(beta, 0.1);
                assert!((lower - 0.21875).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        let ok = text.replace("0.1", "0.3");
        assert!(ExperimentConfig::parse(&ok).is_ok());
    }

    #[test]
    fn custom_scenario_table() {
        let text = r#"
kind = "stap_map"
n_cells = 64
cut = 32
estimators = [{ kind = "scm" }]
[scenario]
sensors = 2
pulses = 3
f0_hz = 1e10
bandwidth_hz = 5e6
speed_mps = 5.0
spacing_m = 0.015
prf_hz = 1000.0
cnr_db = 20.0
scr_db = -5.0
"#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        let ExperimentConfig::StapMap(c) = cfg else { panic!() };
        assert_eq!(c.scenario.resolve().unwrap().dim(), 6);
    }
}
