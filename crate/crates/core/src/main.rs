use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use rshrink::experiments::{
    self, convergence_csv, likelihood_scan_csv, nmse_csv, ExperimentConfig, ExperimentKind,
};
use rshrink::linalg::io::write_hpd1;
use rshrink::{Error, SolverReport};

#[derive(Parser)]
#[command(name = "rshrink", version, about = "Shrinkage fixed-point covariance experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// NMSE of the shrinkage estimator versus beta, with the Tyler baseline
    Nmse(Common),
    /// Distance of the shrinkage solution to the Tyler point versus beta
    Convergence(Common),
    /// Likelihood profile M(beta) and its derivative
    LikelihoodScan(Common),
    /// ANMF angle/velocity maps on synthetic STAP data
    StapMap(Common),
    /// Single estimate from an HPS1 sample file
    Estimate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment description
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Output file (CSV / HPD1) or directory (stap-map); CSVs go to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::FailureBudget { .. } | Error::NoConvergence { .. } => EXIT_SOLVER,
        Error::InvalidBeta { .. } => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn emit(out: Option<&Path>, text: &str) -> rshrink::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_path(out: &Path) -> PathBuf {
    out.with_extension("report.json")
}

fn write_estimate(out: &Path, sigma: &rshrink::HermitianPDS, report: &SolverReport) -> rshrink::Result<()> {
    write_hpd1(out, sigma.matrix())?;
    std::fs::write(report_path(out), report.to_json() + "\n")?;
    Ok(())
}

fn run(cfg: ExperimentConfig, out: Option<&Path>) -> rshrink::Result<()> {
    match cfg {
        ExperimentConfig::Nmse(c) => emit(out, &nmse_csv(&experiments::run_nmse(&c)?)),
        ExperimentConfig::Convergence(c) => emit(out, &convergence_csv(&experiments::run_convergence(&c)?)),
        ExperimentConfig::LikelihoodScan(c) => {
            emit(out, &likelihood_scan_csv(&experiments::run_likelihood_scan(&c)?))
        }
        ExperimentConfig::StapMap(c) => {
            let maps = experiments::run_stap_map(&c)?;
            let dir = out.unwrap_or(Path::new("."));
            for path in experiments::write_maps(dir, &maps)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        ExperimentConfig::Estimate(c) => {
            let out = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("estimate.hpd"));
            match experiments::run_estimate(&c) {
                Ok((sigma, report)) => write_estimate(&out, &sigma, &report),
                Err(Error::NoConvergence { last, report }) => {
                    write_estimate(&out, &last, &report)?;
                    Err(Error::NoConvergence { last, report })
                }
                Err(e) => Err(e),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (expected, common) = match &cli.command {
        Command::Nmse(c) => (ExperimentKind::Nmse, c),
        Command::Convergence(c) => (ExperimentKind::Convergence, c),
        Command::LikelihoodScan(c) => (ExperimentKind::LikelihoodScan, c),
        Command::StapMap(c) => (ExperimentKind::StapMap, c),
        Command::Estimate(c) => (ExperimentKind::Estimate, c),
    };

    let mut cfg = match ExperimentConfig::load(&common.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            error!("{}: {e}", common.config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if cfg.kind() != expected {
        error!("config kind '{}' does not match subcommand '{}'", cfg.kind().name(), expected.name());
        return ExitCode::from(EXIT_CONFIG);
    }
    if let Some(seed) = common.seed {
        cfg.set_seed(seed);
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = common.threads {
        if t == 0 {
            error!("--threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            error!("thread pool: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };

    match pool.install(|| run(cfg, common.out.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
