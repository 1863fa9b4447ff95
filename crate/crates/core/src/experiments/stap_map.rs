use std::path::{Path, PathBuf};

use super::config::StapMapConfig;
use crate::detection::{detection_map, select_secondary, DetectionMap, MapGrid, MapMetadata};
use crate::error::Result;
use crate::estimators::SolverConfig;
use crate::scenarios::synth_datacube;

/// One map together with its sidecar metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct MapOutput {
    pub map: DetectionMap,
    pub meta: MapMetadata,
}

/// Synthesizes the datacube once and computes one map per listed estimator.
pub fn run_stap_map(cfg: &StapMapConfig) -> Result<Vec<MapOutput>> {
    cfg.validate()?;
    let scn = cfg.scenario.resolve()?;
    let cube = synth_datacube(&scn, cfg.n_cells, &cfg.targets, cfg.seed)?;
    let mut selection =
        select_secondary(cfg.n_cells, cfg.cut, cfg.guard, &cfg.contaminated_cells(), cfg.keep_contaminated)?;
    if let Some(n) = cfg.n {
        selection = selection.capped(n)?;
    }
    let grid = MapGrid::default_for(&scn);
    cfg.estimators
        .iter()
        .map(|est| {
            let solver = SolverConfig::accurate(est.beta().unwrap_or(1.0), cfg.accuracy);
            let map = detection_map(&cube, &scn, &selection, est, &solver, &grid)?;
            let meta = MapMetadata {
                estimator: est.tag().to_string(),
                beta: est.beta(),
                m: scn.dim(),
                n: selection.selected_count(),
                cut: cfg.cut,
                seed: cfg.seed,
            };
            Ok(MapOutput { map, meta })
        })
        .collect()
}

fn file_stem(index: usize, out: &MapOutput) -> String {
    let beta = out.meta.beta.map(|b| format!("_beta{b}")).unwrap_or_default();
    format!("map{index:02}_{}{beta}", out.meta.estimator.to_lowercase())
}

/// Writes `<stem>.csv` and `<stem>.json` per map into `dir`; returns the CSV paths.
pub fn write_maps(dir: &Path, outputs: &[MapOutput]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    outputs
        .iter()
        .enumerate()
        .map(|(i, out)| {
            let stem = file_stem(i, out);
            let csv = dir.join(format!("{stem}.csv"));
            std::fs::write(&csv, out.map.to_csv())?;
            let json = serde_json::to_string_pretty(&out.meta).expect("metadata serializes");
            std::fs::write(dir.join(format!("{stem}.json")), json + "\n")?;
            Ok(csv)
        })
        .collect()
}
