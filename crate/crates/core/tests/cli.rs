use std::path::Path;
use std::process::{Command, Output};

use rshrink::linalg::io::read_hpd1;
use rshrink::scenarios::{sample_gaussian, toeplitz_covariance, RngSeed, ToeplitzSpec};

fn rshrink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rshrink")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const NMSE: &str = "kind = \"nmse\"\nm = 4\nN = 10\nrho = 0.5\nbetas = [0.2, 0.6, 1.0]\ntrials = 40\nseed = 3\n";

#[test]
fn nmse_csv_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "nmse.toml", NMSE);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(rshrink(&["nmse", "--config", &cfg, "--threads", "1", "--out", a.to_str().unwrap()]).status.success());
    assert!(rshrink(&["nmse", "--config", &cfg, "--threads", "4", "--out", b.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("beta,nmse_sfpe,nmse_fpe,trials,stderr\n"));
    assert_eq!(text.lines().count(), 4);

    let other = rshrink(&["nmse", "--config", &cfg, "--seed", "4"]);
    assert!(other.status.success());
    assert_ne!(String::from_utf8(other.stdout).unwrap(), text);
}

#[test]
fn convergence_and_scan_headers() {
    let dir = tempfile::tempdir().unwrap();
    let conv = write(dir.path(), "c.toml", "kind = \"convergence\"\nm = 3\nN = 12\nrho = 0.5\nbetas = [0.01, 1.0]\ntrials = 5\n");
    let out = rshrink(&["convergence", "--config", &conv]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("beta,c1,stderr,trials\n"));
    let scan = write(dir.path(), "s.toml", "kind = \"likelihood_scan\"\nm = 4\nN = 8\nrho = 0.5\nbetas = [0.2, 0.5, 0.9]\n");
    let out = rshrink(&["likelihood-scan", "--config", &scan]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("beta,M,M_prime,grad_norm_at_solution,trace_inv\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "kind = \"nmse\"\nm = 4\n");
    assert_eq!(rshrink(&["nmse", "--config", &bad]).status.code(), Some(2));
    let nmse = write(dir.path(), "nmse.toml", NMSE);
    assert_eq!(rshrink(&["convergence", "--config", &nmse]).status.code(), Some(2));
    let missing = dir.path().join("nope.toml");
    assert_eq!(rshrink(&["nmse", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    let infeasible = write(
        dir.path(),
        "map.toml",
        "kind = \"stap_map\"\nscenario = \"full\"\nn_cells = 408\ncut = 256\nN = 200\nestimators = [{ kind = \"s_fpe\", beta = 0.1 }]\n",
    );
    assert_eq!(rshrink(&["stap-map", "--config", &infeasible]).status.code(), Some(2));
}

#[test]
fn stap_map_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "map.toml",
        r#"kind = "stap_map"
n_cells = 60
cut = 30
N = 40
seed = 5
estimators = [{ kind = "s_fpe", beta = 0.7 }, { kind = "dl_scm", beta = 0.1 }]
targets = [{ cell = 30, angle_deg = 0.0, velocity_mps = 4.0 }]

[scenario]
sensors = 4
pulses = 4
f0_hz = 1e10
bandwidth_hz = 5e6
speed_mps = 5.0
spacing_m = 0.015
prf_hz = 1000.0
cnr_db = 20.0
scr_db = -5.0
"#,
    );
    let out_dir = dir.path().join("maps");
    let out = rshrink(&["stap-map", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("map00_s-fpe_beta0.7.csv")).unwrap();
    assert!(csv.starts_with("angle_deg,velocity_mps,log10_lambda\n"));
    assert_eq!(csv.lines().count(), 1 + 181 * 101);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("map00_s-fpe_beta0.7.json")).unwrap()).unwrap();
    assert_eq!(meta["estimator"], "S-FPE");
    assert_eq!(meta["beta"], 0.7);
    assert_eq!(meta["m"], 16);
    assert_eq!(meta["N"], 40);
    assert_eq!(meta["cut"], 30);
    assert_eq!(meta["seed"], 5);
    assert!(out_dir.join("map01_dl-scm_beta0.1.csv").exists());
}

#[test]
fn estimate_round_trip_and_solver_failure() {
    let dir = tempfile::tempdir().unwrap();
    let sigma = toeplitz_covariance(&ToeplitzSpec::new(4, 0.5)).unwrap();
    let samples = sample_gaussian(&sigma, 12, RngSeed::new(1, 0)).unwrap();
    let input = dir.path().join("x.hps");
    samples.write(&input).unwrap();
    let input = input.to_str().unwrap().replace('\\', "/");

    let cfg = write(dir.path(), "e.toml", &format!("kind = \"estimate\"\ninput = \"{input}\"\nmethod = \"s_fpe\"\nbeta = 0.4\ntol = 1e-10\nmax_iter = 5000\n"));
    let out = dir.path().join("est.hpd");
    let run = rshrink(&["estimate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let est = rshrink::HermitianPDS::new(read_hpd1(&out).unwrap()).unwrap();
    assert!((est.inv_trace() - 4.0).abs() < 1e-6);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("est.report.json")).unwrap()).unwrap();
    assert_eq!(report["converged"], true);
    assert_eq!(report["residual_history"].as_array().unwrap().len() as u64, report["iterations"].as_u64().unwrap());

    let cfg = write(dir.path(), "f.toml", &format!("kind = \"estimate\"\ninput = \"{input}\"\nmethod = \"s_fpe\"\nbeta = 0.4\nmax_iter = 2\n"));
    let out = dir.path().join("fail.hpd");
    assert_eq!(rshrink(&["estimate", "--config", &cfg, "--out", out.to_str().unwrap()]).status.code(), Some(3));
    assert!(out.exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fail.report.json")).unwrap()).unwrap();
    assert_eq!(report["converged"], false);
    assert_eq!(report["iterations"], 2);
}
