//! Model files, estimator bundles and CSV artifacts.

use std::fs;
use std::path::Path;

use ratio_core::estimators::Provenance;
use ratio_core::eval::{DelayCurve, RocCurve};
use ratio_core::{Mlp2, RatioEstimator, Target, TrainConfig, TrainMode, TrainTrace};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BUNDLE_FORMAT: &str = "ratio-net-estimator 1";

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_model(path: &Path, net: &Mlp2) -> Result<()> {
    write_text(path, &net.to_text())
}

pub fn read_model(path: &Path) -> Result<Mlp2> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Mlp2::from_text(&text).map_err(|e| Error::format(path, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainRecord {
    step_size: f64,
    smoothing: f64,
    iterations: usize,
    mode: String,
    epsilon: f64,
    seed: u64,
    metric_stride: usize,
}

impl From<&TrainConfig> for TrainRecord {
    fn from(c: &TrainConfig) -> Self {
        TrainRecord {
            step_size: c.step_size,
            smoothing: c.smoothing,
            iterations: c.iterations,
            mode: match c.mode {
                TrainMode::FullBatch => "full_batch".into(),
                TrainMode::StochasticPaired => "stochastic_paired".into(),
            },
            epsilon: c.epsilon,
            seed: c.seed,
            metric_stride: c.metric_stride,
        }
    }
}

impl TrainRecord {
    fn to_config(&self) -> std::result::Result<TrainConfig, String> {
        let mode = match self.mode.as_str() {
            "full_batch" => TrainMode::FullBatch,
            "stochastic_paired" => TrainMode::StochasticPaired,
            other => return Err(format!("unknown train mode `{other}`")),
        };
        Ok(TrainConfig {
            step_size: self.step_size,
            smoothing: self.smoothing,
            iterations: self.iterations,
            mode,
            epsilon: self.epsilon,
            seed: self.seed,
            metric_stride: self.metric_stride,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Bundle {
    format: String,
    target: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    train: Option<TrainRecord>,
    model: String,
}

/// Estimator bundle: the model text, target tag and provenance as JSON.
pub fn bundle_to_string(est: &RatioEstimator) -> String {
    let b = Bundle {
        format: BUNDLE_FORMAT.into(),
        target: est.target.as_str().into(),
        preset: est.provenance.as_ref().map(|p| p.preset.clone()),
        train: est.provenance.as_ref().map(|p| TrainRecord::from(&p.config)),
        model: est.net.to_text(),
    };
    let mut s = serde_json::to_string_pretty(&b).expect("bundle serializes");
    s.push('\n');
    s
}

pub fn bundle_from_str(text: &str, path: &Path) -> Result<RatioEstimator> {
    let bad = |m: String| Error::format(path, m);
    let b: Bundle = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if b.format != BUNDLE_FORMAT {
        return Err(bad(format!("unsupported bundle format `{}`", b.format)));
    }
    let target = Target::parse(&b.target).map_err(|e| bad(e.to_string()))?;
    let net = Mlp2::from_text(&b.model).map_err(|e| bad(e.to_string()))?;
    let provenance = match (b.preset, b.train) {
        (Some(preset), Some(train)) => Some(Provenance { preset, config: train.to_config().map_err(bad)? }),
        (None, None) => None,
        _ => return Err(bad("provenance needs both preset and train".into())),
    };
    RatioEstimator::new(net, target, provenance).map_err(|e| bad(e.to_string()))
}

pub fn write_bundle(path: &Path, est: &RatioEstimator) -> Result<()> {
    write_text(path, &bundle_to_string(est))
}

pub fn read_bundle(path: &Path) -> Result<RatioEstimator> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    bundle_from_str(&text, path)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(path, format!("{other:?}")),
    })
}

/// Generic table with a header row.
pub fn write_rows<R: AsRef<[String]>>(path: &Path, header: &[&str], rows: &[R]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.as_ref())?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `iteration,cost[,metric]`. Metric values sit on the iterations where the
/// hook ran and are empty elsewhere.
pub fn write_trace(path: &Path, trace: &TrainTrace, metric: Option<&str>) -> Result<()> {
    let mut w = csv_writer(path)?;
    match metric {
        Some(m) => w.write_record(["iteration", "cost", m])?,
        None => w.write_record(["iteration", "cost"])?,
    }
    let mut metrics = trace.metrics.iter().peekable();
    for (i, cost) in trace.costs.iter().enumerate() {
        let it = i + 1;
        let mut rec = vec![it.to_string(), cost.to_string()];
        if metric.is_some() {
            match metrics.peek() {
                Some(&&(j, v)) if j == it => {
                    rec.push(v.to_string());
                    metrics.next();
                }
                _ => rec.push(String::new()),
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `threshold,false_alarm,detection`, starting at threshold `inf`.
pub fn write_roc(path: &Path, roc: &RocCurve) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["threshold", "false_alarm", "detection"])?;
    for (t, &(x, y)) in roc.thresholds.iter().zip(&roc.points) {
        w.write_record([t.to_string(), x.to_string(), y.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_delay_curve(path: &Path, curve: &DelayCurve) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "threshold",
        "false_alarm_period",
        "detection_delay",
        "censored_false_alarms",
        "censored_delays",
    ])?;
    for p in &curve.points {
        w.write_record([
            p.threshold.to_string(),
            p.false_alarm_period.to_string(),
            p.detection_delay.to_string(),
            p.censored_false_alarms.to_string(),
            p.censored_delays.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per trial, hypothesis and threshold. Censored runs have an empty
/// stopping time.
pub fn write_trial_log(
    path: &Path,
    thresholds: &[f64],
    nominal: &[Vec<Option<usize>>],
    alternative: &[Vec<Option<usize>>],
) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["trial", "hypothesis", "threshold", "stopping_time"])?;
    for (h, runs) in [(0, nominal), (1, alternative)] {
        for (trial, run) in runs.iter().enumerate() {
            for (t, stop) in thresholds.iter().zip(run) {
                w.write_record([
                    trial.to_string(),
                    h.to_string(),
                    t.to_string(),
                    stop.map(|s| s.to_string()).unwrap_or_default(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads one score per line or the first column of a CSV with a header.
pub fn read_scores(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::format(path, format!("line {}: `{field}` is not a number", i + 1))),
        }
    }
    Ok(out)
}
