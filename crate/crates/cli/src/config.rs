//! JSON experiment configurations.
//!
//! Every config carries an `experiment` name matching its subcommand; all
//! other fields have defaults, so `{"experiment": "dot-error"}` is a
//! complete file. Unknown fields and unknown experiment names are
//! rejected. Infinite retry counts are written as the string `"inf"`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;
use rnsim_core::analog::CoreConfig;
use rnsim_core::nn::{LayerSpec, ModelSpec};
use rnsim_core::rns::{ModuliSet, Preset};
use rnsim_core::rrns::{Attempts, RrnsConfig};

#[derive(Debug, Clone)]
pub enum ExperimentConfig {
    DotError(DotErrorCfg),
    Energy(EnergyCfg),
    PerrCurve(PerrCurveCfg),
    RrnsMc(RrnsMcCfg),
    NoiseSweep(NoiseSweepCfg),
    Train(TrainCfg),
    Infer(InferCfg),
    HybridCheck(HybridCheckCfg),
    Verify(VerifyCfg),
}

impl ExperimentConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::DotError(_) => "dot-error",
            ExperimentConfig::Energy(_) => "energy",
            ExperimentConfig::PerrCurve(_) => "perr-curve",
            ExperimentConfig::RrnsMc(_) => "rrns-mc",
            ExperimentConfig::NoiseSweep(_) => "noise-sweep",
            ExperimentConfig::Train(_) => "train",
            ExperimentConfig::Infer(_) => "infer",
            ExperimentConfig::HybridCheck(_) => "hybrid-check",
            ExperimentConfig::Verify(_) => "verify",
        }
    }

    /// Default config for a subcommand run without `--config`.
    pub fn default_for(name: &str) -> Result<Self, CliError> {
        parse_named(name, serde_json::json!({ "experiment": name }))
    }

    pub fn out_dir(&self) -> Option<&PathBuf> {
        match self {
            ExperimentConfig::DotError(c) => c.out_dir.as_ref(),
            ExperimentConfig::Energy(c) => c.out_dir.as_ref(),
            ExperimentConfig::PerrCurve(c) => c.out_dir.as_ref(),
            ExperimentConfig::RrnsMc(c) => c.out_dir.as_ref(),
            ExperimentConfig::NoiseSweep(c) => c.out_dir.as_ref(),
            ExperimentConfig::Train(c) => c.out_dir.as_ref(),
            ExperimentConfig::Infer(c) => c.out_dir.as_ref(),
            ExperimentConfig::HybridCheck(c) => c.out_dir.as_ref(),
            ExperimentConfig::Verify(c) => c.out_dir.as_ref(),
        }
    }
}

/// Loads a config file and checks it names the expected experiment.
pub fn load(path: &Path, expected: &str) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::ConfigInvalid(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::ConfigInvalid(format!("{}: {e}", path.display())))?;
    let name = value
        .get("experiment")
        .and_then(|v| v.as_str())
        .ok_or_else(|| CliError::ConfigInvalid("missing \"experiment\" field".into()))?
        .to_owned();
    if name != expected {
        return Err(CliError::ConfigInvalid(format!(
            "config is for experiment {name:?} but the {expected:?} subcommand was invoked"
        )));
    }
    parse_named(&name, value)
}

fn parse_named(name: &str, value: serde_json::Value) -> Result<ExperimentConfig, CliError> {
    fn de<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
        serde_json::from_value(value).map_err(|e| CliError::ConfigInvalid(e.to_string()))
    }
    match name {
        "dot-error" => Ok(ExperimentConfig::DotError(de(value)?)),
        "energy" => Ok(ExperimentConfig::Energy(de(value)?)),
        "perr-curve" => Ok(ExperimentConfig::PerrCurve(de(value)?)),
        "rrns-mc" => Ok(ExperimentConfig::RrnsMc(de(value)?)),
        "noise-sweep" => Ok(ExperimentConfig::NoiseSweep(de(value)?)),
        "train" => Ok(ExperimentConfig::Train(de(value)?)),
        "infer" => Ok(ExperimentConfig::Infer(de(value)?)),
        "hybrid-check" => Ok(ExperimentConfig::HybridCheck(de(value)?)),
        "verify" => Ok(ExperimentConfig::Verify(de(value)?)),
        other => Err(CliError::ConfigInvalid(format!("unknown experiment {other:?}"))),
    }
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DotErrorCfg {
    #[allow(dead_code)]
    experiment: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "DotErrorCfg::default_trials")]
    pub trials: u64,
    #[serde(default = "DotErrorCfg::default_h")]
    pub h: u64,
    #[serde(default = "DotErrorCfg::default_bits")]
    pub bits: u32,
}

impl DotErrorCfg {
    fn default_trials() -> u64 {
        10_000
    }
    fn default_h() -> u64 {
        128
    }
    fn default_bits() -> u32 {
        6
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyCfg {
    #[allow(dead_code)]
    experiment: String,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "EnergyCfg::default_h")]
    pub h: u64,
    #[serde(default)]
    pub weight_stationary: bool,
    /// Converter constant overrides for sensitivity sweeps.
    #[serde(default)]
    pub cu_farads: Option<f64>,
    #[serde(default)]
    pub vdd_volts: Option<f64>,
    #[serde(default)]
    pub k1_joules: Option<f64>,
    #[serde(default)]
    pub k2_joules: Option<f64>,
}

impl EnergyCfg {
    fn default_h() -> u64 {
        128
    }

    pub fn params(&self) -> Result<rnsim_core::energy::ConverterParams, CliError> {
        let mut params = rnsim_core::energy::ConverterParams::default();
        if let Some(v) = self.cu_farads {
            params.cu_farads = v;
        }
        if let Some(v) = self.vdd_volts {
            params.vdd_volts = v;
        }
        if let Some(v) = self.k1_joules {
            params.k1_joules = v;
        }
        if let Some(v) = self.k2_joules {
            params.k2_joules = v;
        }
        params.validate().map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "PGrid::default_log")]
    pub log: bool,
}

impl PGrid {
    fn default_log() -> bool {
        true
    }

    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if !(0.0..=1.0).contains(&self.start)
            || !(0.0..=1.0).contains(&self.stop)
            || self.start > self.stop
            || self.points < 1
        {
            return Err(CliError::ConfigInvalid(format!(
                "bad probability grid [{}, {}] x {}",
                self.start, self.stop, self.points
            )));
        }
        if self.log && self.start <= 0.0 {
            return Err(CliError::ConfigInvalid("log grid needs start > 0".into()));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let n = self.points;
        let vals = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect();
        Ok(vals)
    }
}

fn default_p_grid() -> PGrid {
    PGrid { start: 1e-4, stop: 0.5, points: 33, log: true }
}

/// Retry counts accept integers or the string `"inf"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AttemptsCfg {
    Count(u32),
    Named(String),
}

impl AttemptsCfg {
    pub fn resolve(&self) -> Result<Attempts, CliError> {
        match self {
            AttemptsCfg::Count(r) if *r >= 1 => Ok(Attempts::Finite(*r)),
            AttemptsCfg::Count(r) => {
                Err(CliError::ConfigInvalid(format!("attempts must be >= 1, got {r}")))
            }
            AttemptsCfg::Named(s) => {
                s.parse::<Attempts>().map_err(CliError::ConfigInvalid)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerrCurveCfg {
    #[allow(dead_code)]
    experiment: String,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "PerrCurveCfg::default_preset")]
    pub preset: String,
    #[serde(default = "PerrCurveCfg::default_redundant_pool")]
    pub redundant_pool: Vec<u64>,
    #[serde(default = "PerrCurveCfg::default_k_values")]
    pub k_values: Vec<usize>,
    #[serde(default = "PerrCurveCfg::default_attempts")]
    pub attempts: Vec<AttemptsCfg>,
    #[serde(default = "default_p_grid")]
    pub p_grid: PGrid,
}

impl PerrCurveCfg {
    fn default_preset() -> String {
        "rns6".into()
    }
    fn default_redundant_pool() -> Vec<u64> {
        vec![65, 67, 71, 73]
    }
    fn default_k_values() -> Vec<usize> {
        vec![0, 1, 2, 3]
    }
    fn default_attempts() -> Vec<AttemptsCfg> {
        vec![
            AttemptsCfg::Count(1),
            AttemptsCfg::Count(2),
            AttemptsCfg::Named("inf".into()),
        ]
    }

    pub fn code_for_k(&self, k: usize) -> Result<RrnsConfig, CliError> {
        if k > self.redundant_pool.len() {
            return Err(CliError::ConfigInvalid(format!(
                "k = {k} exceeds the redundant pool of {}",
                self.redundant_pool.len()
            )));
        }
        let non_redundant = resolve_preset(&self.preset)?;
        RrnsConfig::new(non_redundant.moduli(), &self.redundant_pool[..k])
            .map_err(|e| CliError::ConfigInvalid(e.to_string()))
    }
}

pub fn resolve_preset(name: &str) -> Result<ModuliSet, CliError> {
    Preset::from_name(name)
        .map(ModuliSet::from_preset)
        .ok_or_else(|| CliError::ConfigInvalid(format!("unknown moduli preset {name:?}")))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RrnsMcCfg {
    #[allow(dead_code)]
    experiment: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "RrnsMcCfg::default_non_redundant")]
    pub non_redundant: Vec<u64>,
    #[serde(default = "RrnsMcCfg::default_redundant")]
    pub redundant: Vec<u64>,
    #[serde(default = "RrnsMcCfg::default_p_values")]
    pub p_values: Vec<f64>,
    #[serde(default = "RrnsMcCfg::default_attempts")]
    pub attempts: Vec<u32>,
    #[serde(default = "RrnsMcCfg::default_trials")]
    pub trials: u64,
}

impl RrnsMcCfg {
    fn default_non_redundant() -> Vec<u64> {
        vec![3, 5]
    }
    fn default_redundant() -> Vec<u64> {
        vec![7, 11]
    }
    fn default_p_values() -> Vec<f64> {
        vec![0.01, 0.05, 0.1]
    }
    fn default_attempts() -> Vec<u32> {
        vec![1]
    }
    fn default_trials() -> u64 {
        100_000
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoreCfg {
    Fp32,
    Lp { bits: u32, h: u64 },
    Hp { bits: u32, h: u64 },
    Rns {
        #[serde(default)]
        preset: Option<String>,
        #[serde(default)]
        moduli: Option<Vec<u64>>,
        h: u64,
    },
}

impl CoreCfg {
    pub fn build(&self) -> Result<Option<CoreConfig>, CliError> {
        let bad = |e: rnsim_core::analog::AnalogError| CliError::ConfigInvalid(e.to_string());
        match self {
            CoreCfg::Fp32 => Ok(None),
            CoreCfg::Lp { bits, h } => Ok(Some(CoreConfig::lp(*bits, *h).map_err(bad)?)),
            CoreCfg::Hp { bits, h } => Ok(Some(CoreConfig::hp(*bits, *h).map_err(bad)?)),
            CoreCfg::Rns { preset, moduli, h } => {
                let set = match (preset, moduli) {
                    (Some(name), None) => resolve_preset(name)?,
                    (None, Some(list)) => ModuliSet::new(list)
                        .map_err(|e| CliError::ConfigInvalid(e.to_string()))?,
                    _ => {
                        return Err(CliError::ConfigInvalid(
                            "rns core needs exactly one of \"preset\" or \"moduli\"".into(),
                        ))
                    }
                };
                Ok(Some(CoreConfig::rns(set, *h).map_err(bad)?))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            CoreCfg::Fp32 => "fp32".into(),
            CoreCfg::Lp { bits, h } => format!("lp-b{bits}-h{h}"),
            CoreCfg::Hp { bits, h } => format!("hp-b{bits}-h{h}"),
            CoreCfg::Rns { preset, moduli, h } => match (preset, moduli) {
                (Some(p), _) => format!("rns-{p}-h{h}"),
                (None, Some(m)) => format!("rns-custom{}-h{h}", m.len()),
                _ => "rns".into(),
            },
        }
    }
}

fn default_core() -> CoreCfg {
    CoreCfg::Rns { preset: Some("rns7".into()), moduli: None, h: 32 }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerCfg {
    Linear { inputs: usize, outputs: usize },
    Conv2d { in_channels: usize, out_channels: usize, kernel: usize, stride: usize },
    Relu,
    Flatten,
}

impl LayerCfg {
    fn to_spec(&self) -> LayerSpec {
        match *self {
            LayerCfg::Linear { inputs, outputs } => LayerSpec::Linear { inputs, outputs },
            LayerCfg::Conv2d { in_channels, out_channels, kernel, stride } => {
                LayerSpec::Conv2d { in_channels, out_channels, kernel, stride }
            }
            LayerCfg::Relu => LayerSpec::Relu,
            LayerCfg::Flatten => LayerSpec::Flatten,
        }
    }
}

pub fn model_spec(layers: &[LayerCfg]) -> Result<ModelSpec, CliError> {
    if layers.is_empty() {
        return Err(CliError::ConfigInvalid("model needs at least one layer".into()));
    }
    Ok(ModelSpec { layers: layers.iter().map(LayerCfg::to_spec).collect() })
}

fn default_mlp() -> Vec<LayerCfg> {
    vec![
        LayerCfg::Linear { inputs: 2, outputs: 16 },
        LayerCfg::Relu,
        LayerCfg::Linear { inputs: 16, outputs: 2 },
    ]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetCfg {
    Synth {
        kind: String,
        #[serde(default = "DatasetCfg::default_samples")]
        samples: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    Idx {
        images: PathBuf,
        labels: PathBuf,
    },
}

impl DatasetCfg {
    fn default_samples() -> usize {
        256
    }

    pub fn load(&self) -> Result<rnsim_core::nn::Dataset, CliError> {
        match self {
            DatasetCfg::Synth { kind, samples, seed } => {
                let kind = rnsim_core::nn::SynthKind::from_name(kind).ok_or_else(|| {
                    CliError::ConfigInvalid(format!("unknown synthetic dataset {kind:?}"))
                })?;
                Ok(rnsim_core::nn::synth_dataset(kind, *samples, *seed))
            }
            DatasetCfg::Idx { images, labels } => {
                rnsim_core::nn::load_idx_dataset(images, labels)
                    .map_err(|e| CliError::ExperimentFailed(e.to_string()))
            }
        }
    }
}

fn default_dataset() -> DatasetCfg {
    DatasetCfg::Synth { kind: "blobs".into(), samples: 256, seed: 42 }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSweepCfg {
    #[allow(dead_code)]
    experiment: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_core")]
    pub core: CoreCfg,
    #[serde(default = "default_mlp")]
    pub model: Vec<LayerCfg>,
    #[serde(default = "default_dataset")]
    pub dataset: DatasetCfg,
    #[serde(default = "NoiseSweepCfg::default_steps")]
    pub steps: usize,
    #[serde(default = "NoiseSweepCfg::default_lr")]
    pub learning_rate: f32,
    #[serde(default = "NoiseSweepCfg::default_momentum")]
    pub momentum: f32,
    #[serde(default = "NoiseSweepCfg::default_p_err_values")]
    pub p_err_values: Vec<f64>,
}

impl NoiseSweepCfg {
    fn default_steps() -> usize {
        300
    }
    fn default_lr() -> f32 {
        0.1
    }
    fn default_momentum() -> f32 {
        0.9
    }
    fn default_p_err_values() -> Vec<f64> {
        vec![0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.3]
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainCfg {
    #[allow(dead_code)]
    experiment: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_core")]
    pub core: CoreCfg,
    #[serde(default = "default_mlp")]
    pub model: Vec<LayerCfg>,
    #[serde(default = "default_dataset")]
    pub dataset: DatasetCfg,
    #[serde(default = "TrainCfg::default_steps")]
    pub steps: usize,
    #[serde(default = "NoiseSweepCfg::default_lr")]
    pub learning_rate: f32,
    #[serde(default = "NoiseSweepCfg::default_momentum")]
    pub momentum: f32,
    #[serde(default = "TrainCfg::default_record_every")]
    pub record_every: usize,
}

impl TrainCfg {
    fn default_steps() -> usize {
        500
    }
    fn default_record_every() -> usize {
        25
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InferCfg {
    #[allow(dead_code)]
    experiment: String,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub weights: PathBuf,
    #[serde(default = "default_core")]
    pub core: CoreCfg,
    #[serde(default = "default_mlp")]
    pub model: Vec<LayerCfg>,
    #[serde(default = "default_dataset")]
    pub dataset: DatasetCfg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridCheckCfg {
    #[allow(dead_code)]
    experiment: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "HybridCheckCfg::default_cases")]
    pub cases: u64,
}

impl HybridCheckCfg {
    fn default_cases() -> u64 {
        10_000
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyCfg {
    #[allow(dead_code)]
    experiment: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub seed_b: Option<u64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}
