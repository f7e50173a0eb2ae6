//! Experiment configuration files.
//!
//! A config is TOML with a few shared tables and one table named after the
//! experiment:
//!
//! ```toml
//! experiment = "kl"
//! seeds = [1, 2]
//!
//! [network]
//! hidden = 20
//!
//! [train]
//! iterations = 20000
//! mode = "stochastic_paired"
//!
//! [[methods]]
//! name = "exp"
//! preset = "exponential"
//!
//! [kl]
//! train_size = 2000
//! ```
//!
//! Everything except `experiment` and `seeds` has a default. [`ExperimentConfig::resolve`]
//! fills every default in, so the resolved config written to the run manifest
//! is fully explicit and can be fed back to `run`.

use std::fmt;
use std::path::{Path, PathBuf};

use ratio_core::loss::{preset_by_name, PresetLoss};
use ratio_core::{HiddenActivation, OutputNonlinearity, PresetParams, Target, TrainConfig, TrainMode};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Hyptest,
    Classify,
    Glrt,
    Cusum,
    Kl,
    Mi,
    Local,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Hyptest => "hyptest",
            Self::Classify => "classify",
            Self::Glrt => "glrt",
            Self::Cusum => "cusum",
            Self::Kl => "kl",
            Self::Mi => "mi",
            Self::Local => "local",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One training objective: a catalog preset, its parameters and an optional
/// output nonlinearity replacing the preset's recommendation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub name: String,
    pub preset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default)]
    pub positive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_param: Option<f64>,
}

impl MethodConfig {
    pub fn new(name: &str, preset: &str) -> Self {
        MethodConfig {
            name: name.into(),
            preset: preset.into(),
            alpha: None,
            c: None,
            s: None,
            positive: false,
            output: None,
            output_param: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn positive(mut self) -> Self {
        self.positive = true;
        self
    }

    pub fn with_output(mut self, output: &str, param: Option<f64>) -> Self {
        self.output = Some(output.into());
        self.output_param = param;
        self
    }

    /// The preset loss with the output override applied.
    pub fn loss(&self) -> Result<PresetLoss> {
        let params = PresetParams { alpha: self.alpha, c: self.c, s: self.s, positive: self.positive };
        let mut loss = preset_by_name(&self.preset, params).map_err(|e| self.err(e))?;
        if let Some(kind) = &self.output {
            loss.output = OutputNonlinearity::from_kind(kind, self.output_param).map_err(|e| self.err(e))?;
        }
        Ok(loss)
    }

    /// [`loss`](Self::loss), checking that the output can represent the
    /// preset's target.
    pub fn build(&self) -> Result<PresetLoss> {
        let loss = self.loss()?;
        let target = Target::for_preset(loss.preset);
        if !target.accepts(&loss.output) {
            return Err(Error::Config(format!(
                "method `{}`: output {} cannot represent {}",
                self.name,
                loss.output.kind(),
                target.as_str()
            )));
        }
        Ok(loss)
    }

    pub fn target(&self) -> Result<Target> {
        Ok(Target::for_preset(self.preset.parse().map_err(|e| self.err(e))?))
    }

    fn err(&self, e: ratio_core::Error) -> Error {
        Error::Config(format!("method `{}`: {e}", self.name))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// Hidden units `N` of the `k x N x 1` network.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_activation: Option<String>,
}

impl NetworkConfig {
    pub fn hidden(&self) -> usize {
        self.hidden.unwrap_or(20)
    }

    pub fn activation(&self) -> Result<HiddenActivation> {
        HiddenActivation::from_kind(self.hidden_activation.as_deref().unwrap_or("relu"))
            .map_err(|e| Error::Config(format!("network: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    FullBatch,
    StochasticPaired,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric_stride: Option<usize>,
}

impl TrainSection {
    /// Trainer settings for run seed `seed`.
    pub fn to_config(&self, seed: u64) -> TrainConfig {
        let d = TrainConfig::default();
        TrainConfig {
            step_size: self.step_size.unwrap_or(d.step_size),
            smoothing: self.smoothing.unwrap_or(d.smoothing),
            iterations: self.iterations.unwrap_or(d.iterations),
            mode: match self.mode {
                Some(ModeName::StochasticPaired) => TrainMode::StochasticPaired,
                _ => TrainMode::FullBatch,
            },
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            seed,
            metric_stride: self.metric_stride.unwrap_or(d.metric_stride),
        }
    }

    fn fill(&mut self, iterations: usize, mode: ModeName, stride: usize) {
        let d = TrainConfig::default();
        self.step_size.get_or_insert(d.step_size);
        self.smoothing.get_or_insert(d.smoothing);
        self.iterations.get_or_insert(iterations);
        self.mode.get_or_insert(mode);
        self.epsilon.get_or_insert(d.epsilon);
        self.metric_stride.get_or_insert(stride);
    }
}

/// Block tests between two Gaussian vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HyptestConfig {
    pub dim: usize,
    /// Per-coordinate mean of the alternative; `1/sqrt(dim)` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternative_mean: Option<f64>,
    pub alternative_variance: f64,
    pub train_size: usize,
    pub block_size: usize,
    pub trials: usize,
}

impl Default for HyptestConfig {
    fn default() -> Self {
        HyptestConfig {
            dim: 10,
            alternative_mean: None,
            alternative_variance: 1.2,
            train_size: 100,
            block_size: 20,
            trials: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageSource {
    /// IDX files `train-images-idx3-ubyte` etc. in `mnist_dir`.
    Mnist,
    /// Two Gaussian image classes with a known optimum error.
    Surrogate,
}

/// Two-class image classification with a per-iteration test error trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub source: ImageSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mnist_dir: Option<PathBuf>,
    pub negative_label: u8,
    pub positive_label: u8,
    /// First this many training images of each class.
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub surrogate_sigma: f64,
    pub surrogate_delta: f64,
    pub surrogate_toggles: usize,
    pub template_seed: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            source: ImageSource::Mnist,
            mnist_dir: None,
            negative_label: 4,
            positive_label: 9,
            train_per_class: 5500,
            test_per_class: 1000,
            surrogate_sigma: 0.5,
            surrogate_delta: 0.8,
            surrogate_toggles: 100,
            template_seed: 4,
        }
    }
}

/// Tests with a nominal data set against GLRT baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GlrtConfig {
    pub nominal_mean: f64,
    pub nominal_variance: f64,
    pub alternative_mean: f64,
    pub alternative_variance: f64,
    pub sizes: Vec<usize>,
    pub trials: usize,
    /// Trials of the network test, which trains one network per trial.
    pub neural_trials: usize,
    /// Draw a fresh nominal set for every trial instead of one for the run.
    pub redraw_nominal: bool,
}

impl Default for GlrtConfig {
    fn default() -> Self {
        GlrtConfig {
            nominal_mean: 0.0,
            nominal_variance: 1.0,
            alternative_mean: 0.4,
            alternative_variance: 1.2,
            sizes: vec![100, 200],
            trials: 100_000,
            neural_trials: 100_000,
            redraw_nominal: true,
        }
    }
}

/// Change detection from i.i.d. to square-root feedback data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CusumConfig {
    pub order: usize,
    pub train_lengths: Vec<usize>,
    pub hidden_k: usize,
    pub hidden_k1: usize,
    pub trials: usize,
    pub horizon: usize,
    /// Shared threshold grid; when absent each detector gets a grid from
    /// `threshold_start` in `threshold_step` steps up to the first threshold
    /// whose pilot false-alarm period exceeds `target_period`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
    pub threshold_start: f64,
    pub threshold_step: f64,
    pub target_period: f64,
    pub pilot_trials: usize,
    pub max_thresholds: usize,
    /// Write every stopping time.
    pub trial_log: bool,
}

impl Default for CusumConfig {
    fn default() -> Self {
        CusumConfig {
            order: 1,
            train_lengths: vec![500, 2500],
            hidden_k: 20,
            hidden_k1: 50,
            trials: 10_000,
            horizon: 1_000_000,
            thresholds: None,
            threshold_start: 2.0,
            threshold_step: 0.5,
            target_period: 2e4,
            pilot_trials: 200,
            max_thresholds: 60,
            trial_log: false,
        }
    }
}

/// KL number of two isotropic Gaussians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KlConfig {
    pub dim: usize,
    pub nominal_mean: f64,
    pub nominal_variance: f64,
    pub alternative_mean: f64,
    pub alternative_variance: f64,
    pub train_size: usize,
    pub eval_size: usize,
}

impl Default for KlConfig {
    fn default() -> Self {
        KlConfig {
            dim: 1,
            nominal_mean: 0.0,
            nominal_variance: 1.0,
            alternative_mean: 0.4,
            alternative_variance: 1.2,
            train_size: 2000,
            eval_size: 10_000,
        }
    }
}

/// Mutual information of a standard bivariate Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MiConfig {
    pub correlation: f64,
    pub train_size: usize,
    pub eval_size: usize,
    /// Shuffle the pairing of the training data, making X and Y independent.
    pub permute: bool,
}

impl Default for MiConfig {
    fn default() -> Self {
        MiConfig { correlation: 0.5, train_size: 1000, eval_size: 10_000, permute: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalKind {
    Translation,
    Scale,
}

/// Local statistic of standard Gaussian data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalConfig {
    pub spec: LocalKind,
    pub dim: usize,
    /// Translation direction, `e_1` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    pub train_size: usize,
    /// Evaluation points on `[-2, 2]^dim`: a uniform grid for `dim = 1`,
    /// uniform draws otherwise.
    pub eval_points: usize,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig { spec: LocalKind::Translation, dim: 1, delta: None, train_size: 2000, eval_points: 401 }
    }
}

/// Version record added to resolved configs in run manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Versions {
    pub ratio_net: String,
    pub ratio_core: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub versions: Option<Versions>,
    #[serde(default)]
    pub network: NetworkConfig,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<MethodConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyptest: Option<HyptestConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glrt: Option<GlrtConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cusum: Option<CusumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kl: Option<KlConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mi: Option<MiConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local: Option<LocalConfig>,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    /// A config with no sections; [`resolve`](Self::resolve) supplies the defaults.
    pub fn new(experiment: ExperimentKind, seeds: Vec<u64>) -> Self {
        ExperimentConfig {
            experiment,
            seeds,
            out_dir: None,
            versions: None,
            network: NetworkConfig::default(),
            train: TrainSection::default(),
            methods: Vec::new(),
            hyptest: None,
            classify: None,
            glrt: None,
            cusum: None,
            kl: None,
            mi: None,
            local: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| cfg_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Fills every default in and validates the result.
    pub fn resolve(mut self) -> Result<Self> {
        if self.seeds.is_empty() {
            return Err(cfg_err("seeds must not be empty"));
        }
        let mut seen = self.seeds.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(cfg_err("seeds must be distinct"));
        }
        self.check_sections()?;
        use ExperimentKind as K;
        let (hidden, activation, iterations, mode, stride) = match self.experiment {
            K::Hyptest => (20, "relu", 10_000, ModeName::FullBatch, 1),
            K::Classify => (300, "relu", 1000, ModeName::FullBatch, 10),
            K::Glrt => (20, "relu", 5000, ModeName::FullBatch, 1),
            K::Cusum => (20, "relu", 10_000, ModeName::FullBatch, 1),
            K::Kl => (20, "relu", 20_000, ModeName::StochasticPaired, 1),
            K::Mi => (20, "relu", 100_000, ModeName::StochasticPaired, 1),
            K::Local => (20, "softplus", 60_000, ModeName::StochasticPaired, 1),
        };
        self.network.hidden.get_or_insert(hidden);
        self.network.hidden_activation.get_or_insert_with(|| activation.into());
        self.network.activation()?;
        if self.network.hidden() == 0 {
            return Err(cfg_err("network.hidden must be positive"));
        }
        self.train.fill(iterations, mode, stride);
        self.train.to_config(0).validate().map_err(|e| cfg_err(format!("train: {e}")))?;
        if self.methods.is_empty() {
            self.methods = default_methods(self.experiment);
        }
        for m in &self.methods {
            if self.experiment == K::Local {
                m.loss()?;
            } else {
                m.build()?;
            }
        }
        let mut names: Vec<&str> = self.methods.iter().map(|m| m.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(cfg_err("method names must be distinct"));
        }
        if let Some(bad) = self.methods.iter().find(|m| !is_file_safe(&m.name)) {
            return Err(cfg_err(format!("method name `{}` may only use letters, digits, `-` and `_`", bad.name)));
        }
        match self.experiment {
            K::Hyptest => {
                for m in &self.methods {
                    if m.target()? == Target::SignLogLr {
                        return Err(cfg_err(format!("method `{}` gives no log-likelihood ratio", m.name)));
                    }
                }
                let h = self.hyptest.get_or_insert_with(Default::default);
                h.alternative_mean.get_or_insert(1.0 / (h.dim.max(1) as f64).sqrt());
                positive(&[("hyptest.dim", h.dim), ("hyptest.train_size", h.train_size)])?;
                positive(&[("hyptest.block_size", h.block_size), ("hyptest.trials", h.trials)])?;
                positive_f(&[("hyptest.alternative_variance", h.alternative_variance)])?;
            }
            K::Classify => {
                let c = self.classify.get_or_insert_with(Default::default);
                positive(&[("classify.train_per_class", c.train_per_class)])?;
                if c.negative_label == c.positive_label {
                    return Err(cfg_err("classify labels must differ"));
                }
                match c.source {
                    ImageSource::Mnist if c.mnist_dir.is_none() => {
                        return Err(cfg_err("classify.source = \"mnist\" needs classify.mnist_dir"))
                    }
                    ImageSource::Surrogate => {
                        positive(&[("classify.test_per_class", c.test_per_class)])?;
                        positive_f(&[("classify.surrogate_sigma", c.surrogate_sigma)])?;
                        if c.surrogate_toggles > crate::experiments::classify::PIXELS {
                            return Err(cfg_err("classify.surrogate_toggles exceeds the pixel count"));
                        }
                    }
                    _ => {}
                }
            }
            K::Glrt => {
                let g = self.glrt.get_or_insert_with(Default::default);
                if g.sizes.is_empty() || g.sizes.iter().any(|&n| n < 2) {
                    return Err(cfg_err("glrt.sizes must be non-empty with every size at least 2"));
                }
                positive(&[("glrt.trials", g.trials)])?;
                positive_f(&[
                    ("glrt.nominal_variance", g.nominal_variance),
                    ("glrt.alternative_variance", g.alternative_variance),
                ])?;
                for m in &self.methods {
                    if m.target()? == Target::SignLogLr {
                        return Err(cfg_err(format!("method `{}` gives no log-likelihood ratio", m.name)));
                    }
                }
            }
            K::Cusum => {
                let c = self.cusum.get_or_insert_with(Default::default);
                positive(&[("cusum.trials", c.trials), ("cusum.horizon", c.horizon)])?;
                positive(&[("cusum.hidden_k1", c.hidden_k1), ("cusum.pilot_trials", c.pilot_trials)])?;
                positive(&[("cusum.max_thresholds", c.max_thresholds)])?;
                if c.order > 0 {
                    positive(&[("cusum.hidden_k", c.hidden_k)])?;
                }
                if c.train_lengths.iter().any(|&n| n < c.order + 3) {
                    return Err(cfg_err("cusum.train_lengths too short for the order"));
                }
                if let Some(t) = &c.thresholds {
                    ratio_core::eval::check_thresholds(t).map_err(|e| cfg_err(format!("cusum.thresholds: {e}")))?;
                }
                positive_f(&[("cusum.threshold_step", c.threshold_step), ("cusum.target_period", c.target_period)])?;
                for m in &self.methods {
                    if m.target()? != Target::LogLikelihoodRatio {
                        return Err(cfg_err(format!("method `{}` must estimate the log-likelihood ratio", m.name)));
                    }
                }
            }
            K::Kl => {
                let k = self.kl.get_or_insert_with(Default::default);
                positive(&[("kl.dim", k.dim), ("kl.train_size", k.train_size), ("kl.eval_size", k.eval_size)])?;
                positive_f(&[
                    ("kl.nominal_variance", k.nominal_variance),
                    ("kl.alternative_variance", k.alternative_variance),
                ])?;
                self.require_log_target()?;
            }
            K::Mi => {
                let m = self.mi.get_or_insert_with(Default::default);
                if !(m.correlation.abs() < 1.0) {
                    return Err(cfg_err("mi.correlation must lie in (-1, 1)"));
                }
                positive(&[("mi.train_size", m.train_size), ("mi.eval_size", m.eval_size)])?;
                self.require_log_target()?;
            }
            K::Local => {
                let l = self.local.get_or_insert_with(Default::default);
                positive(&[("local.dim", l.dim), ("local.train_size", l.train_size)])?;
                positive(&[("local.eval_points", l.eval_points)])?;
                if l.spec == LocalKind::Translation {
                    let dim = l.dim;
                    let d = l.delta.get_or_insert_with(|| {
                        let mut e = vec![0.0; dim];
                        e[0] = 1.0;
                        e
                    });
                    if d.len() != l.dim {
                        return Err(cfg_err("local.delta length must equal local.dim"));
                    }
                } else if l.delta.is_some() {
                    return Err(cfg_err("local.delta only applies to the translation spec"));
                }
                for m in &self.methods {
                    let loss = m.loss()?;
                    ratio_core::local_stat::check_pair(&loss.pair)
                        .map_err(|e| cfg_err(format!("method `{}`: {e}", m.name)))?;
                }
            }
        }
        Ok(self)
    }

    fn check_sections(&self) -> Result<()> {
        let present = [
            (ExperimentKind::Hyptest, self.hyptest.is_some()),
            (ExperimentKind::Classify, self.classify.is_some()),
            (ExperimentKind::Glrt, self.glrt.is_some()),
            (ExperimentKind::Cusum, self.cusum.is_some()),
            (ExperimentKind::Kl, self.kl.is_some()),
            (ExperimentKind::Mi, self.mi.is_some()),
            (ExperimentKind::Local, self.local.is_some()),
        ];
        for (kind, there) in present {
            if there && kind != self.experiment {
                return Err(cfg_err(format!("section [{kind}] does not belong to experiment `{}`", self.experiment)));
            }
        }
        Ok(())
    }

    fn require_log_target(&self) -> Result<()> {
        for m in &self.methods {
            if m.target()? != Target::LogLikelihoodRatio {
                return Err(cfg_err(format!("method `{}` must estimate the log-likelihood ratio", m.name)));
            }
        }
        Ok(())
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        self.train.to_config(seed)
    }
}

fn is_file_safe(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

fn positive(fields: &[(&str, usize)]) -> Result<()> {
    match fields.iter().find(|(_, v)| *v == 0) {
        Some((name, _)) => Err(cfg_err(format!("{name} must be positive"))),
        None => Ok(()),
    }
}

fn positive_f(fields: &[(&str, f64)]) -> Result<()> {
    match fields.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        Some((name, _)) => Err(cfg_err(format!("{name} must be positive"))),
        None => Ok(()),
    }
}

/// Methods used when a config lists none.
pub fn default_methods(kind: ExperimentKind) -> Vec<MethodConfig> {
    match kind {
        ExperimentKind::Hyptest => vec![
            MethodConfig::new("ms", "A1").with_alpha(0.0).positive(),
            MethodConfig::new("exp", "B1").with_alpha(0.5),
            MethodConfig::new("ce", "C1"),
        ],
        ExperimentKind::Classify => vec![
            MethodConfig::new("linear", "D1_linear"),
            MethodConfig::new("ms", "A1").with_alpha(0.0).positive(),
            MethodConfig::new("hinge", "D3_hinge"),
            MethodConfig::new("ce", "C1"),
        ],
        ExperimentKind::Glrt | ExperimentKind::Cusum | ExperimentKind::Kl | ExperimentKind::Mi => {
            vec![MethodConfig::new("exp", "exponential")]
        }
        ExperimentKind::Local => vec![MethodConfig::new("ms", "A1").with_alpha(0.0)],
    }
}
