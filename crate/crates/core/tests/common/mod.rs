#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rshrink::scenarios::{sample_gaussian, toeplitz_covariance, RngSeed, ToeplitzSpec};
use rshrink::{ComplexVector, Hermitian, HermitianPDS, SampleSet, C64};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    RngSeed::new(seed, stream).rng()
}

pub fn cnormal(rng: &mut ChaCha8Rng) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> ComplexVector {
    ComplexVector::new((0..m).map(|_| cnormal(rng)).collect()).unwrap()
}

/// `B B^H / m + shift I`
pub fn random_pds(rng: &mut ChaCha8Rng, m: usize, shift: f64) -> HermitianPDS {
    let b: Vec<ComplexVector> = (0..m).map(|_| random_vector(rng, m)).collect();
    let w = 1.0 / m as f64;
    let a = Hermitian::weighted_outer_sum(m, b.iter().map(|v| (w, v)));
    HermitianPDS::new(a.add(&Hermitian::scaled_identity(m, shift))).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, m: usize) -> Hermitian {
    let mut entries = vec![C64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..=i {
            let z = if i == j { C64::new(rng.sample::<f64, _>(StandardNormal), 0.0) } else { cnormal(rng) };
            entries[i * m + j] = z;
            entries[j * m + i] = z.conj();
        }
    }
    Hermitian::from_lower_fn(m, |i, j| entries[i * m + j])
}

pub fn gaussian_set(m: usize, n: usize, rho: f64, seed: u64, stream: u64) -> SampleSet {
    let sigma = toeplitz_covariance(&ToeplitzSpec::new(m, rho)).unwrap();
    sample_gaussian(&sigma, n, RngSeed::new(seed, stream)).unwrap()
}

pub fn to_nalgebra(a: &Hermitian) -> DMatrix<Complex64> {
    let m = a.dim();
    DMatrix::from_fn(m, m, |i, j| a.get(i, j))
}

/// Ascending eigenvalues from nalgebra's Hermitian eigensolver.
pub fn eigenvalues(a: &Hermitian) -> Vec<f64> {
    let mut ev: Vec<f64> = to_nalgebra(a).symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
