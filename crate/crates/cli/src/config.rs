//! Experiment configuration (JSON, units in key names) and flag overrides.

use std::path::{Path, PathBuf};

use pulseforge::datasets::{dataset_from_table, load_csv, synth_circle, Dataset};
use pulseforge::models::Variant;
use pulseforge::noise::{brisbane_device, DeviceModel, NoisePolicy};
use pulseforge::training::{Batch, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const BUILTIN_DEVICE: &str = "builtin-brisbane";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VariantChoice {
    Gate,
    Pulsed,
    Both,
}

impl VariantChoice {
    pub fn variants(self) -> Vec<Variant> {
        match self {
            VariantChoice::Gate => vec![Variant::Gate],
            VariantChoice::Pulsed => vec![Variant::Pulsed],
            VariantChoice::Both => vec![Variant::Gate, Variant::Pulsed],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub enabled: bool,
    pub spam_enabled: bool,
    /// Fixed depolarizing probability for `train` and `sweep-layers`.
    pub depolarizing_override_p: Option<f64>,
    /// Depolarizing probabilities visited by `sweep-noise`.
    pub p_grid: Vec<f64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            enabled: true,
            spam_enabled: true,
            depolarizing_override_p: None,
            p_grid: vec![0.0, 0.1, 0.3],
        }
    }
}

impl NoiseConfig {
    pub fn policy(&self, override_p: Option<f64>) -> NoisePolicy {
        NoisePolicy {
            enabled: self.enabled,
            depolarizing_override_p: override_p.or(self.depolarizing_override_p),
            spam_enabled: self.spam_enabled,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DataSource {
    Circle {
        n_samples: usize,
        #[serde(default)]
        data_seed: u64,
    },
    Csv {
        path: PathBuf,
        #[serde(default = "yes")]
        has_header: bool,
    },
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub n_train: usize,
    pub n_test: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { n_train: 200, n_test: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_adam: f64,
    pub fd_step: f64,
    /// Full batch when absent.
    pub batch_size: Option<usize>,
}

impl Default for TrainSettings {
    fn default() -> Self {
        let d = TrainConfig::default();
        TrainSettings {
            epochs: d.epochs,
            learning_rate: d.learning_rate,
            beta1: d.beta1,
            beta2: d.beta2,
            eps_adam: d.eps_adam,
            fd_step: d.fd_step,
            batch_size: None,
        }
    }
}

impl TrainSettings {
    pub fn to_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            eps_adam: self.eps_adam,
            fd_step: self.fd_step,
            seed,
            batch: self.batch_size.map_or(Batch::Full, Batch::Size),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub variant: VariantChoice,
    pub n_qubits: usize,
    /// Layer grid for `sweep-layers`; the first entry is used elsewhere.
    pub layers: Vec<usize>,
    pub noise: NoiseConfig,
    pub seeds: Vec<u64>,
    pub dataset: DataSource,
    pub split: SplitConfig,
    pub train: TrainSettings,
    /// `builtin-brisbane` or a path to a device JSON file.
    pub device: String,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            variant: VariantChoice::Both,
            n_qubits: 2,
            layers: vec![5],
            noise: NoiseConfig::default(),
            seeds: vec![0],
            dataset: DataSource::Circle {
                n_samples: 400,
                data_seed: 0,
            },
            split: SplitConfig::default(),
            train: TrainSettings::default(),
            device: BUILTIN_DEVICE.into(),
            out_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.seeds.is_empty() {
            return bad("seed list is empty".into());
        }
        if self.layers.is_empty() || self.layers.contains(&0) {
            return bad("layer list must be non-empty with every entry >= 1".into());
        }
        if self.n_qubits != 1 && self.n_qubits != 2 {
            return bad(format!("n_qubits must be 1 or 2, got {}", self.n_qubits));
        }
        if self.noise.p_grid.is_empty() {
            return bad("noise p grid is empty".into());
        }
        for p in self.noise.p_grid.iter().chain(self.noise.depolarizing_override_p.iter()) {
            if !(0.0..=1.0).contains(p) {
                return bad(format!("depolarizing probability {p} is outside [0, 1]"));
            }
        }
        if self.split.n_train == 0 || self.split.n_test == 0 {
            return bad("split sizes must be positive".into());
        }
        if let DataSource::Circle { n_samples, .. } = self.dataset {
            if n_samples < self.split.n_train + self.split.n_test {
                return bad(format!(
                    "circle dataset of {n_samples} samples is smaller than the split {} + {}",
                    self.split.n_train, self.split.n_test
                ));
            }
        }
        self.train.to_config(0).validate().map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load_device(&self) -> Result<DeviceModel, CliError> {
        load_device(&self.device)
    }

    pub fn load_dataset(&self) -> Result<Dataset, CliError> {
        match &self.dataset {
            DataSource::Circle { n_samples, data_seed } => Ok(synth_circle(*n_samples, *data_seed)?),
            DataSource::Csv { path, has_header } => {
                let table = load_csv(path, *has_header)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                Ok(dataset_from_table(&table)?)
            }
        }
    }
}

pub fn load_device(source: &str) -> Result<DeviceModel, CliError> {
    if source == BUILTIN_DEVICE {
        Ok(brisbane_device())
    } else {
        DeviceModel::from_file(Path::new(source)).map_err(|e| CliError::Data(format!("device {source}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"variant": "gate", "layers": [1, 5], "dataset": {"kind": "csv", "path": "x.csv"}, "train": {"epochs": 7}}"#,
        )
        .unwrap();
        assert_eq!(c.variant, VariantChoice::Gate);
        assert_eq!(c.layers, vec![1, 5]);
        assert_eq!(c.train.epochs, 7);
        assert_eq!(c.train.learning_rate, 0.05);
        assert!(matches!(c.dataset, DataSource::Csv { has_header: true, .. }));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"epochz": 3}"#).is_err());
        let mut c = ExperimentConfig::default();
        c.noise.p_grid = vec![0.0, 1.5];
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        let mut c = ExperimentConfig::default();
        c.seeds.clear();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.train.epochs = 0;
        assert!(c.validate().is_err());
    }
}
