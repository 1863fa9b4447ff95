//! Synthetic data: Toeplitz covariances, Gaussian and SIRV sampling, and a
//! STAP scenario with a discrete clutter-ridge model.

mod stap;

pub use stap::{
    brennan_rank, stap_steering, synth_clutter_cov, synth_datacube, Datacube, StapScenario, Target,
    DEFAULT_PATCHES, SPEED_OF_LIGHT,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::SampleSet;
use crate::linalg::{ComplexVector, Hermitian, HermitianPDS, C64};

/// `Σ = α M` with `M_ij = ρ^{|i-j|}`; with `normalize`, `α = Tr(M^{-1}) / m`
/// so that `Tr(Σ^{-1}) = m`, otherwise `α = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzSpec {
    pub m: usize,
    pub rho: f64,
    #[serde(default = "default_true")]
    pub normalize: bool,
}

fn default_true() -> bool {
    true
}

impl ToeplitzSpec {
    pub fn new(m: usize, rho: f64) -> Self {
        Self { m, rho, normalize: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("Toeplitz dimension must be positive"));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::invalid(format!("rho = {} outside (0, 1)", self.rho)));
        }
        Ok(())
    }
}

pub fn toeplitz_covariance(spec: &ToeplitzSpec) -> Result<HermitianPDS> {
    spec.validate()?;
    let base = Hermitian::from_lower_fn(spec.m, |i, j| C64::new(spec.rho.powi((i - j) as i32), 0.0));
    let base = HermitianPDS::new(base)?;
    if !spec.normalize {
        return Ok(base);
    }
    let alpha = base.inv_trace() / spec.m as f64;
    base.scaled(alpha)
}

/// Seed plus stream id; every `(seed, stream)` pair names an independent,
/// reproducible ChaCha8 stream. Monte-Carlo trials use their index as stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

/// Distinguishes auxiliary streams (e.g. textures) from the primary one.
const AUX_SEED_MIX: u64 = 0xA076_1D64_78BD_642F;

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Independent stream for a secondary quantity drawn alongside this one.
    pub fn auxiliary(&self) -> Self {
        Self { seed: self.seed ^ AUX_SEED_MIX, stream: self.stream }
    }
}

/// One standard circular complex normal draw: `(a + ib)/√2`.
pub(crate) fn complex_normal(rng: &mut impl Rng) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn colored_draw(sigma: &HermitianPDS, rng: &mut impl Rng) -> Vec<C64> {
    let z: Vec<C64> = (0..sigma.dim()).map(|_| complex_normal(rng)).collect();
    sigma.factor().lower().matvec(&z)
}

/// `N` i.i.d. zero-mean circular complex Gaussian vectors with covariance `Σ`,
/// drawn as `L z`.
pub fn sample_gaussian(sigma: &HermitianPDS, n: usize, seed: RngSeed) -> Result<SampleSet> {
    let mut rng = seed.rng();
    let vectors = (0..n)
        .map(|_| ComplexVector::new(colored_draw(sigma, &mut rng)))
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(vectors)
}

/// Positive random scale `τ` of a SIRV `x = √τ g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Texture {
    /// `τ = 1/G` with `G ~ Gamma(shape, 1/shape)`; heavy tailed for small shape.
    InverseGamma(f64),
    Deterministic(f64),
}

impl Texture {
    fn validate(&self) -> Result<()> {
        let v = match *self {
            Texture::InverseGamma(v) | Texture::Deterministic(v) => v,
        };
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!("texture parameter {v} must be positive")))
        }
    }
}

/// SIRV samples `x_n = √τ_n g_n`. The Gaussian parts `g_n` are exactly the
/// vectors [`sample_gaussian`] returns for the same seed; textures come from
/// an auxiliary stream.
pub fn sample_sirv(sigma: &HermitianPDS, n: usize, texture: Texture, seed: RngSeed) -> Result<SampleSet> {
    texture.validate()?;
    let g = sample_gaussian(sigma, n, seed)?;
    let factors: Vec<f64> = match texture {
        Texture::Deterministic(c) => vec![c.sqrt(); n],
        Texture::InverseGamma(shape) => {
            let gamma = Gamma::new(shape, 1.0 / shape)
                .map_err(|e| Error::invalid(format!("texture: {e}")))?;
            let mut rng = seed.auxiliary().rng();
            (0..n).map(|_| (1.0 / gamma.sample(&mut rng)).sqrt()).collect()
        }
    };
    g.rescaled(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toeplitz_two_by_two() {
        let s = toeplitz_covariance(&ToeplitzSpec::new(2, 0.5)).unwrap();
        // M^{-1} = [[1,-.5],[-.5,1]] / 0.75, Tr = 8/3, α = 4/3
        let a = 4.0 / 3.0;
        assert!((s.get(0, 0).re - a).abs() < 1e-14);
        assert!((s.get(1, 0).re - 0.5 * a).abs() < 1e-14);
        assert!((s.inv_trace() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn toeplitz_small_rho_is_identity() {
        let s = toeplitz_covariance(&ToeplitzSpec::new(5, 1e-12)).unwrap();
        assert!(s.matrix().sub(&Hermitian::identity(5)).frob_norm() < 1e-10);
    }

    #[test]
    fn toeplitz_ill_conditioned_accepted() {
        let s = toeplitz_covariance(&ToeplitzSpec::new(12, 0.99)).unwrap();
        assert!((s.inv_trace() - 12.0).abs() < 1e-10 * 12.0);
        let raw = toeplitz_covariance(&ToeplitzSpec { m: 12, rho: 0.99, normalize: false }).unwrap();
        assert_eq!(raw.get(0, 0).re, 1.0);
    }

    #[test]
    fn toeplitz_rejects_bad_rho() {
        for rho in [0.0, 1.0, -0.2, f64::NAN] {
            assert!(toeplitz_covariance(&ToeplitzSpec::new(3, rho)).is_err());
        }
    }

    #[test]
    fn gaussian_reproducible_and_streams_differ() {
        let sigma = HermitianPDS::identity(3);
        let a = sample_gaussian(&sigma, 5, RngSeed::new(7, 0)).unwrap();
        let b = sample_gaussian(&sigma, 5, RngSeed::new(7, 0)).unwrap();
        let c = sample_gaussian(&sigma, 5, RngSeed::new(7, 1)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn deterministic_texture_is_gaussian_stream() {
        let sigma = toeplitz_covariance(&ToeplitzSpec::new(4, 0.3)).unwrap();
        let seed = RngSeed::new(11, 3);
        let g = sample_gaussian(&sigma, 6, seed).unwrap();
        let s = sample_sirv(&sigma, 6, Texture::Deterministic(1.0), seed).unwrap();
        assert_eq!(g, s);
    }

    #[test]
    fn texture_must_be_positive() {
        let sigma = HermitianPDS::identity(2);
        let seed = RngSeed::new(0, 0);
        assert!(sample_sirv(&sigma, 3, Texture::InverseGamma(0.0), seed).is_err());
        assert!(sample_sirv(&sigma, 3, Texture::InverseGamma(-1.0), seed).is_err());
        assert!(sample_sirv(&sigma, 3, Texture::Deterministic(0.0), seed).is_err());
    }
}
