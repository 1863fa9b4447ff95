mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use rshrink::estimators::scm;
use rshrink::linalg::relative_frob_distance;
use rshrink::scenarios::{
    brennan_rank, sample_gaussian, sample_sirv, stap_steering, synth_clutter_cov, toeplitz_covariance, RngSeed,
    StapScenario, Texture, ToeplitzSpec, DEFAULT_PATCHES,
};
use rshrink::{HermitianPDS, C64};

#[test]
fn gaussian_scm_converges() {
    let truth = toeplitz_covariance(&ToeplitzSpec::new(4, 0.8)).unwrap();
    let s = sample_gaussian(&truth, 100_000, RngSeed::new(31, 0)).unwrap();
    assert!(relative_frob_distance(&scm(&s), truth.matrix()) < 0.05);
}

#[test]
fn gaussian_second_moment() {
    let s = sample_gaussian(&HermitianPDS::identity(4), 100_000, RngSeed::new(32, 0)).unwrap();
    let mean = s.iter().map(|x| x.norm_sqr()).sum::<f64>() / (4.0 * s.len() as f64);
    assert!((mean - 1.0).abs() < 0.01, "{mean}");
}

fn kurtosis(s: &rshrink::SampleSet) -> f64 {
    let n = s.len() as f64;
    let m2 = s.iter().map(|x| x.as_slice()[0].norm_sqr()).sum::<f64>() / n;
    let m4 = s.iter().map(|x| x.as_slice()[0].norm_sqr().powi(2)).sum::<f64>() / n;
    m4 / (m2 * m2)
}

#[test]
fn inverse_gamma_texture_is_heavy_tailed() {
    let sigma = HermitianPDS::identity(2);
    let seed = RngSeed::new(33, 0);
    let g = sample_gaussian(&sigma, 20_000, seed).unwrap();
    let x = sample_sirv(&sigma, 20_000, Texture::InverseGamma(2.1), seed).unwrap();
    // circular complex Gaussian: E|z|^4 / (E|z|^2)^2 = 2
    assert!((kurtosis(&g) - 2.0).abs() < 0.1);
    assert!(kurtosis(&x) > kurtosis(&g) + 1.0);
}

#[test]
fn steering_phases_match_scalar_reference() {
    let scn = StapScenario::desk();
    let lambda = 3.0e8 / scn.f0_hz;
    for (angle, v) in [(0.0, 0.0), (17.0, 3.2), (-63.5, -6.9), (90.0, 7.5)] {
        let p = stap_steering(&scn, angle, v);
        assert!((p.norm() - 1.0).abs() < 1e-14);
        let phi_s = 2.0 * PI * scn.spacing_m / lambda * (angle * PI / 180.0).sin();
        let phi_t = 2.0 * PI * 2.0 * v / (lambda * scn.prf_hz);
        for k in 0..scn.pulses {
            for s in 0..scn.sensors {
                let expected = C64::from_polar(1.0 / 8.0, k as f64 * phi_t + s as f64 * phi_s);
                assert!((p.as_slice()[k * scn.sensors + s] - expected).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn clutter_rank_follows_brennan_rule() {
    let scn = StapScenario::desk();
    let cov = synth_clutter_cov(&scn, DEFAULT_PATCHES).unwrap();
    let above = eigenvalues(cov.matrix()).into_iter().filter(|&l| l > 10.0).count();
    let r = brennan_rank(&scn) as f64;
    assert!((above as f64 - r).abs() <= 0.2 * r, "eigen count {above} vs Brennan {r}");
}

#[test]
fn full_size_brennan_rank_near_reference() {
    let r = brennan_rank(&StapScenario::full_size()) as i64;
    assert!((r - 45).abs() <= 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steering_unit_norm(angle in -90.0f64..90.0, v in -20.0f64..20.0) {
        let p = stap_steering(&StapScenario::full_size(), angle, v);
        prop_assert!((p.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_toeplitz_trace(m in 1usize..40, rho in 0.001f64..0.999) {
        let s = toeplitz_covariance(&ToeplitzSpec::new(m, rho)).unwrap();
        prop_assert!((s.inv_trace() - m as f64).abs() <= 1e-10 * m as f64);
    }

    #[test]
    fn generated_sets_valid(seed in any::<u64>(), shape in 0.5f64..10.0) {
        let sigma = toeplitz_covariance(&ToeplitzSpec::new(3, 0.5)).unwrap();
        let s = sample_sirv(&sigma, 20, Texture::InverseGamma(shape), RngSeed::new(seed, 1)).unwrap();
        prop_assert_eq!(s.len(), 20);
        prop_assert!(s.iter().all(|x| x.norm() > 0.0));
    }
}
