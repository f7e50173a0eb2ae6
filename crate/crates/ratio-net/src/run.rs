//! Config-driven runs: resolve, execute every seed, write artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{ExperimentConfig, Versions};
use crate::error::{Error, Result};
use crate::experiments::{self, Outcome};
use crate::{formats, plot};

pub const MANIFEST: &str = "manifest.toml";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub seed_override: Option<u64>,
    pub threads: Option<usize>,
}

/// Applies the command-line overrides and resolves the config. Fails before
/// anything is written.
pub fn prepare(mut cfg: ExperimentConfig, opts: &RunOptions) -> Result<ExperimentConfig> {
    if let Some(s) = opts.seed_override {
        cfg.seeds = vec![s];
    }
    if let Some(d) = &opts.out_dir {
        cfg.out_dir = Some(d.clone());
    }
    if cfg.out_dir.is_none() {
        return Err(Error::Config("no output directory: set out_dir or pass --out-dir".into()));
    }
    cfg.versions =
        Some(Versions { ratio_net: env!("CARGO_PKG_VERSION").into(), ratio_core: ratio_core::VERSION.into() });
    cfg.resolve()
}

pub fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed-{seed}"))
}

/// Runs every seed of a prepared config and writes the manifest, per-seed
/// artifacts, `summary.csv` and `plot.gp`.
pub fn execute(cfg: &ExperimentConfig) -> Result<Vec<(u64, Outcome)>> {
    let out = cfg.out_dir.clone().ok_or_else(|| Error::Config("no output directory".into()))?;
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    formats::write_text(&out.join(MANIFEST), &cfg.to_toml())?;
    let mut outcomes = Vec::new();
    let mut summary = Vec::new();
    for &seed in &cfg.seeds {
        let outcome = experiments::run(cfg, seed)?;
        outcome.write(&seed_dir(&out, seed))?;
        summary.extend(outcome.summary_rows(seed));
        outcomes.push((seed, outcome));
    }
    formats::write_rows(&out.join("summary.csv"), Outcome::summary_header(cfg.experiment), &summary)?;
    formats::write_text(&out.join("plot.gp"), &plot_script(cfg, &out)?)?;
    Ok(outcomes)
}

/// Runs with an explicit thread count (`None`: rayon's default).
pub fn execute_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<(u64, Outcome)>> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| execute(cfg))
        }
        None => execute(cfg),
    }
}

/// gnuplot script for the artifacts of a finished run in `out`.
pub fn plot_script(cfg: &ExperimentConfig, out: &Path) -> Result<String> {
    let mut seeds = Vec::new();
    for &seed in &cfg.seeds {
        let dir = seed_dir(out, seed);
        let mut files: Vec<String> = match fs::read_dir(&dir) {
            Ok(entries) => entries
                .filter_map(|e| e.ok())
                .map(|e| format!("seed-{seed}/{}", e.file_name().to_string_lossy()))
                .collect(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(Error::io(dir, e)),
        };
        files.sort();
        seeds.push((seed, files));
    }
    Ok(plot::script(cfg.experiment, &seeds))
}
