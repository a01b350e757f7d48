//! Experiment configuration and Hamiltonian presets.

use std::path::{Path, PathBuf};

use qmaxent::io::{read_json, HamiltonianFile};
use qmaxent::{Error, Hamiltonian};
use serde::Deserialize;

use crate::CliError;

/// Named Hamiltonians: `qubit01 = diag(0, 1)`, `qutrit012 = diag(0, 1, 2)`,
/// `qubitX` = Pauli-X, and `random:<dim>:<seed>` for a seeded random one.
pub fn preset(name: &str) -> Option<Hamiltonian> {
    match name {
        "qubit01" => Hamiltonian::diagonal(&[0.0, 1.0]).ok(),
        "qutrit012" => Hamiltonian::diagonal(&[0.0, 1.0, 2.0]).ok(),
        "qubitX" => Hamiltonian::new(qmaxent::ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).ok(),
        other => {
            let rest = other.strip_prefix("random:")?;
            let (dim, seed) = rest.split_once(':')?;
            let dim: usize = dim.parse().ok().filter(|&d| d >= 1)?;
            Some(Hamiltonian::random(dim, seed.parse().ok()?))
        }
    }
}

/// Resolves a preset name or a Hamiltonian file path (relative paths are
/// taken against `base`).
pub fn load_hamiltonian(spec: &str, base: Option<&Path>) -> Result<Hamiltonian, CliError> {
    if let Some(h) = preset(spec) {
        return Ok(h);
    }
    let path = match base {
        Some(dir) if Path::new(spec).is_relative() => dir.join(spec),
        _ => PathBuf::from(spec),
    };
    let file: HamiltonianFile = read_json(&path).map_err(|e| CliError::input(format!("hamiltonian {spec}: {e}")))?;
    file.to_hamiltonian().map_err(|e| CliError::input(format!("hamiltonian {spec}: {e}")))
}

/// A target energy: an absolute value or a quantile `"q0.25"` of the span.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum EnergySpec {
    Absolute(f64),
    Quantile(String),
}

impl EnergySpec {
    pub fn resolve(&self, h: &Hamiltonian) -> Result<f64, CliError> {
        match self {
            EnergySpec::Absolute(e) => Ok(*e),
            EnergySpec::Quantile(s) => {
                let q: f64 = s
                    .strip_prefix('q')
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| CliError::input(format!("target_energies: cannot read {s:?} (use a number or \"q0.25\")")))?;
                Ok(h.energy_quantile(q))
            }
        }
    }
}

fn default_fact1_samples() -> usize {
    1000
}

fn default_restarts() -> usize {
    qmaxent::maxent::DEFAULT_RESTARTS
}

fn default_slack() -> f64 {
    1e-6
}

/// Contents of a verification config file (TOML).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; when present it must match the Hamiltonian.
    pub dim: Option<usize>,
    /// Preset name or path to a Hamiltonian file.
    pub hamiltonian: String,
    pub target_energies: Vec<EnergySpec>,
    /// Pinned channels per energy; zero runs the thermalizer check only.
    pub samples: usize,
    #[serde(default = "default_fact1_samples")]
    pub fact1_samples: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_slack")]
    pub slack: f64,
    pub output: Option<PathBuf>,
}

/// A config with its Hamiltonian loaded and energies resolved and checked.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub config: ExperimentConfig,
    pub hamiltonian: Hamiltonian,
    pub energies: Vec<f64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::input(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Loads the Hamiltonian, checks counts, and validates every target
    /// energy against the open spectral span.
    pub fn resolve(self, base: Option<&Path>) -> Result<ResolvedConfig, CliError> {
        if self.restarts == 0 {
            return Err(CliError::input("config: restarts must be at least 1"));
        }
        if self.target_energies.is_empty() {
            return Err(CliError::input("config: target_energies is empty"));
        }
        if self.slack.is_nan() || self.slack < 0.0 {
            return Err(CliError::input("config: slack must be non-negative"));
        }
        let h = load_hamiltonian(&self.hamiltonian, base)?;
        if let Some(d) = self.dim {
            if d != h.dim() {
                return Err(CliError::input(format!("config: dim = {d} but the Hamiltonian has dim {}", h.dim())));
            }
        }
        if h.is_degenerate() {
            return Err(CliError::from(Error::DegenerateHamiltonian(h.min_energy())));
        }
        let mut energies = Vec::with_capacity(self.target_energies.len());
        for spec in &self.target_energies {
            let e = spec.resolve(&h)?;
            if !(e > h.min_energy() && e < h.max_energy()) {
                return Err(CliError::from(Error::EnergyOutOfRange { energy: e, min: h.min_energy(), max: h.max_energy() }));
            }
            energies.push(e);
        }
        Ok(ResolvedConfig { config: self, hamiltonian: h, energies })
    }
}
