//! Experiment configuration: a TOML file with sections mirroring the
//! parameter types. Unknown keys are rejected, defaults (`k_b = hbar = 1`,
//! `record_stride = 10`, `emit = ["summary"]`) are applied on load, and the
//! file round-trips losslessly.
//!
//! An optional `[sweep]` table maps dotted field paths to value lists; the
//! cartesian product over the axes (in lexicographic key order, last axis
//! fastest) yields independent runs. Point `i` uses seed `base_seed + i`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rodsim_core::dynamics::{DynamicsError, IntegratorConfig};
use rodsim_core::noise::NoiseError;
use rodsim_core::params::{validate_params, BathParams, ParamError, Regime, RodParams};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid parameters: {0}")]
    Validation(#[from] ParamError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("sweep axis `{0}` cannot be applied: {1}")]
    BadSweepAxis(String, String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmitFlag {
    Summary,
    Timeseries,
    NoiseKernelTable,
}

fn default_emit() -> Vec<EmitFlag> {
    vec![EmitFlag::Summary]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSettings {
    pub n_trajectories: u64,
    pub seed: u64,
    #[serde(default = "default_emit")]
    pub emit: Vec<EmitFlag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rod: RodParams,
    pub bath: BathParams,
    pub integrator: IntegratorConfig,
    pub experiment: ExperimentSettings,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sweep: BTreeMap<String, Vec<toml::Value>>,
}

impl ExperimentConfig {
    /// Validate the physical and integrator parameters.
    pub fn validate(&self) -> Result<(), CliError> {
        validate_params(&self.rod, &self.bath)?;
        self.integrator.validate(&self.rod, &self.bath)?;
        Ok(())
    }
}

/// Command-line overrides applied to the base configuration before sweep
/// resolution.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trajectories: Option<u64>,
    pub mode: Option<Regime>,
    pub output_dir: Option<PathBuf>,
}

/// Load, default-fill and validate a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn save_config(cfg: &ExperimentConfig) -> String {
    toml::to_string_pretty(cfg).expect("config serializes")
}

pub fn apply_overrides(cfg: &mut ExperimentConfig, ov: &Overrides) {
    if let Some(seed) = ov.seed {
        cfg.experiment.seed = seed;
    }
    if let Some(n) = ov.trajectories {
        cfg.experiment.n_trajectories = n;
    }
    if let Some(mode) = ov.mode {
        cfg.bath.regime = mode;
    }
    if let Some(dir) = &ov.output_dir {
        cfg.experiment.output_dir = Some(dir.clone());
    }
}

fn set_path(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<(), String> {
    let mut parts = path.split('.').peekable();
    let mut current = table;
    loop {
        let key = parts.next().ok_or("empty sweep path")?;
        if parts.peek().is_none() {
            current.insert(key.to_string(), value);
            return Ok(());
        }
        let entry = current
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        current = entry
            .as_table_mut()
            .ok_or_else(|| format!("`{key}` is not a table"))?;
    }
}

/// Expand the sweep (if any) into fully resolved single-run configurations,
/// each validated, sweep-stripped, and carrying its per-point seed.
pub fn sweep_points(base: &ExperimentConfig) -> Result<Vec<ExperimentConfig>, CliError> {
    let mut flat = base.clone();
    let sweep = std::mem::take(&mut flat.sweep);
    if sweep.is_empty() {
        return Ok(vec![flat]);
    }

    let base_table: toml::Table = toml::Table::try_from(&flat).expect("config serializes");
    let axes: Vec<(&String, &Vec<toml::Value>)> = sweep.iter().collect();
    let total: usize = axes.iter().map(|(_, v)| v.len().max(1)).product();

    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        // odometer over the axes, last axis fastest
        let mut rest = index;
        let mut choice = vec![0usize; axes.len()];
        for (k, (_, values)) in axes.iter().enumerate().rev() {
            let len = values.len().max(1);
            choice[k] = rest % len;
            rest /= len;
        }
        let mut table = base_table.clone();
        for (k, (key, values)) in axes.iter().enumerate() {
            let value = values
                .get(choice[k])
                .ok_or_else(|| CliError::BadSweepAxis((*key).clone(), "empty axis".into()))?;
            set_path(&mut table, key, value.clone())
                .map_err(|m| CliError::BadSweepAxis((*key).clone(), m))?;
        }
        let mut point: ExperimentConfig =
            toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| {
                    CliError::BadSweepAxis(format!("point {index}"), e.to_string())
                })?;
        point.experiment.seed = point.experiment.seed.wrapping_add(index as u64);
        point.validate()?;
        points.push(point);
    }
    Ok(points)
}

/// Short hash of the resolved configuration, stamped into every output file.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    use sha2::{Digest, Sha256};
    let canonical = save_config(cfg);
    let digest = Sha256::digest(canonical.as_bytes());
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rodsim_core::dynamics::Mode;

    const MINIMAL: &str = r#"
[rod]
mass = 1.0
length = 1.0

[bath]
temperature = 1.0
gamma_par = 1.0
gamma_perp = 2.0
gamma_rot = 1.0
regime = "classical"

[integrator]
mode = "overdamped"
dt = 0.01
n_steps = 100

[experiment]
n_trajectories = 10
seed = 1
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg: ExperimentConfig = toml::from_str(MINIMAL).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.bath.k_b, 1.0);
        assert_eq!(cfg.bath.hbar, 1.0);
        assert_eq!(cfg.integrator.record_stride, 10);
        assert_eq!(cfg.experiment.emit, vec![EmitFlag::Summary]);
        assert_eq!(cfg.integrator.mode, Mode::Overdamped);
    }

    #[test]
    fn negative_mass_is_a_validation_error() {
        let text = MINIMAL.replace("mass = 1.0", "mass = -1.0");
        let cfg: ExperimentConfig = toml::from_str(&text).unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("mass"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("mass = 1.0", "mass = 1.0\nbogus = 3");
        assert!(toml::from_str::<ExperimentConfig>(&text).is_err());
    }

    #[test]
    fn round_trip_is_lossless() {
        let cfg: ExperimentConfig = toml::from_str(MINIMAL).unwrap();
        let text = save_config(&cfg);
        let again: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn sweep_expands_with_per_point_seeds() {
        let text = format!("{MINIMAL}\n[sweep]\n\"bath.gamma_rot\" = [0.5, 1.0, 2.0]\n");
        let cfg: ExperimentConfig = toml::from_str(&text).unwrap();
        let points = sweep_points(&cfg).unwrap();
        assert_eq!(points.len(), 3);
        assert_eq!(points[0].bath.gamma_rot, 0.5);
        assert_eq!(points[2].bath.gamma_rot, 2.0);
        assert_eq!(points[0].experiment.seed, 1);
        assert_eq!(points[1].experiment.seed, 2);
        assert!(points.iter().all(|p| p.sweep.is_empty()));
    }

    #[test]
    fn sweep_cartesian_product_covers_all_combinations() {
        let text = format!(
            "{MINIMAL}\n[sweep]\n\"bath.gamma_rot\" = [0.5, 2.0]\n\"experiment.n_trajectories\" = [5, 7, 9]\n"
        );
        let cfg: ExperimentConfig = toml::from_str(&text).unwrap();
        let points = sweep_points(&cfg).unwrap();
        assert_eq!(points.len(), 6);
        // axes in key order: bath.gamma_rot slowest, n_trajectories fastest
        assert_eq!(points[0].bath.gamma_rot, 0.5);
        assert_eq!(points[0].experiment.n_trajectories, 5);
        assert_eq!(points[1].experiment.n_trajectories, 7);
        assert_eq!(points[3].bath.gamma_rot, 2.0);
    }

    #[test]
    fn config_hash_tracks_content() {
        let a: ExperimentConfig = toml::from_str(MINIMAL).unwrap();
        let mut b = a.clone();
        assert_eq!(config_hash(&a), config_hash(&b));
        b.experiment.seed = 2;
        assert_ne!(config_hash(&a), config_hash(&b));
    }
}
