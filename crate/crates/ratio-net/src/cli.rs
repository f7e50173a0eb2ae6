//! Command-line interface.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use ratio_core::eval::roc;

use crate::config::ExperimentConfig;
use crate::diagnostics;
use crate::error::{Error, Result};
use crate::formats;
use crate::run::{self, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "ratio-net", version, about = "Likelihood-ratio estimation experiments")]
pub struct Cli {
    /// Worker threads for Monte-Carlo and training fan-out.
    #[arg(long, global = true, env = "RATIO_NET_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Run this single seed instead of the config's list.
        #[arg(long)]
        seed_override: Option<u64>,
    },
    /// Check every cataloged loss pair.
    VerifyLosses {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
    /// Compare analytic network gradients with finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 20)]
        configs: usize,
        #[arg(long, default_value_t = 3)]
        inputs: usize,
        #[arg(long, default_value_t = 5)]
        hidden: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
    },
    /// ROC curve from two score files (one score per line).
    Roc {
        #[arg(long)]
        scores0: PathBuf,
        #[arg(long)]
        scores1: PathBuf,
        /// CSV output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write `plot.gp` for a finished run.
    PlotScript {
        #[arg(long)]
        out_dir: PathBuf,
    },
}

/// Parses `args` and runs the command; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    if cli.threads == Some(0) {
        return Err(Error::Config("--threads must be positive".into()));
    }
    match cli.command {
        Command::Run { config, out_dir, seed_override } => {
            let opts = RunOptions { out_dir, seed_override, threads: cli.threads };
            let cfg = run::prepare(ExperimentConfig::load(&config)?, &opts)?;
            run::execute_with_threads(&cfg, opts.threads)?;
            println!("wrote {}", cfg.out_dir.as_deref().unwrap_or(Path::new(".")).display());
            Ok(0)
        }
        Command::VerifyLosses { samples, seed } => {
            let reports = diagnostics::verify_losses(samples, seed);
            let mut failed = 0;
            for r in &reports {
                let ok = r.passed();
                failed += usize::from(!ok);
                println!("{:<14} {}", r.name, if ok { "ok" } else { "FAILED" });
                if !ok {
                    println!("  {r:?}");
                }
            }
            for (a, convex) in diagnostics::a1_convexity(&[-1.0, -0.5, 0.0, 1.0])? {
                println!("A1 alpha={a:<5} convex={convex}");
            }
            println!("{} presets, {failed} failed", reports.len());
            Ok(i32::from(failed > 0))
        }
        Command::Gradcheck { configs, inputs, hidden, seed, tolerance } => {
            let rows = diagnostics::gradcheck(inputs, hidden, configs, seed)?;
            println!("output,hidden,configs,theta,input,mixed");
            let mut bad = false;
            for r in &rows {
                println!("{},{},{},{:e},{:e},{:e}", r.output, r.hidden, r.configs, r.theta, r.input, r.mixed);
                bad |= !(r.worst() < tolerance);
            }
            Ok(i32::from(bad))
        }
        Command::Roc { scores0, scores1, out } => {
            let curve = roc(&formats::read_scores(&scores0)?, &formats::read_scores(&scores1)?)?;
            match out {
                Some(p) => formats::write_roc(&p, &curve)?,
                None => {
                    println!("threshold,false_alarm,detection");
                    for (t, (x, y)) in curve.thresholds.iter().zip(&curve.points) {
                        println!("{t},{x},{y}");
                    }
                }
            }
            eprintln!("auc {}", curve.auc);
            Ok(0)
        }
        Command::PlotScript { out_dir } => {
            let cfg = ExperimentConfig::load(&out_dir.join(run::MANIFEST))?;
            formats::write_text(&out_dir.join("plot.gp"), &run::plot_script(&cfg, &out_dir)?)?;
            println!("wrote {}", out_dir.join("plot.gp").display());
            Ok(0)
        }
    }
}
