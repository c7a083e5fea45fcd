//! Declarative experiment plans, loaded from TOML.

use std::path::{Path, PathBuf};

use qlab_core::noise::ReadoutProfile;
use qlab_core::rngstream::Stream;
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

/// Which experiment family a plan drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    States,
    Dynamics,
    Qpca,
    Bounds,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::States => write!(f, "states"),
            Task::Dynamics => write!(f, "dynamics"),
            Task::Qpca => write!(f, "qpca"),
            Task::Bounds => write!(f, "bounds"),
        }
    }
}

/// Output formats for [`crate::report::emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Readout-noise source: a synthetic generator or a fixed profile file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    /// Flip every measured bit with the same probability.
    Uniform { flip: f64 },
    /// Per-bit flip rates drawn from [low, high] (the hardware readout
    /// range is 0.03..0.07).
    Synthetic { low: f64, high: f64 },
    /// A fixed profile; widths must match every experiment that uses it.
    Fixed { profile: ReadoutProfile },
}

impl NoiseSpec {
    /// Materialize a profile for `bits` measured bits. Synthetic rates are
    /// drawn from the supplied stream, so the profile is reproducible.
    pub fn instantiate(&self, bits: usize, rng: &mut Stream) -> Result<ReadoutProfile> {
        match self {
            NoiseSpec::Uniform { flip } => ReadoutProfile::uniform(bits, *flip).map_err(Into::into),
            NoiseSpec::Synthetic { low, high } => {
                ReadoutProfile::synthetic(bits, *low, *high, rng).map_err(Into::into)
            }
            NoiseSpec::Fixed { profile } => {
                profile.check_width(bits)?;
                Ok(profile.clone())
            }
        }
    }

    /// Load from a JSON file holding either a `NoiseSpec` object or a raw
    /// confusion-matrix list.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if let Ok(spec) = serde_json::from_str::<NoiseSpec>(&text) {
            return Ok(spec);
        }
        let profile: ReadoutProfile = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("cannot parse noise file {path:?}: {e}")))?;
        profile.validate()?;
        Ok(NoiseSpec::Fixed { profile })
    }
}

/// Settings for the state-learning sweep (Task: comparing absolute
/// values of two Pauli observables).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct StatesPlan {
    pub n_values: Vec<usize>,
    pub strategies: Vec<String>,
    pub alpha: f64,
    /// Trials per accuracy estimate.
    pub trials: u32,
    pub accuracy_target: f64,
    /// Experiment caps per strategy.
    pub conventional_cap: usize,
    pub quantum_cap: usize,
    /// Optional explicit budgets to probe in addition to the search.
    pub probe_budgets: Vec<usize>,
}

impl Default for StatesPlan {
    fn default() -> Self {
        StatesPlan {
            n_values: vec![2, 4, 6, 8],
            strategies: vec!["conventional".into(), "quantum_enhanced".into()],
            alpha: 0.9,
            trials: 400,
            accuracy_target: 0.7,
            conventional_cap: 5000,
            quantum_cap: 500,
            probe_budgets: Vec::new(),
        }
    }
}

/// Settings for the dynamics-classification sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicsPlan {
    pub n: usize,
    pub depth: usize,
    pub circuits_per_class: usize,
    pub strategies: Vec<String>,
    pub conventional_repetitions: usize,
    pub quantum_repetitions: usize,
    /// Kernel-PCA components to record (classification uses the first).
    pub kpca_dims: usize,
    /// Persist every outcome matrix as a JSONL dataset next to the record.
    pub save_datasets: bool,
}

impl Default for DynamicsPlan {
    fn default() -> Self {
        DynamicsPlan {
            n: 6,
            depth: 6,
            circuits_per_class: 100,
            strategies: vec!["conventional".into(), "quantum_enhanced".into()],
            conventional_repetitions: 1000,
            quantum_repetitions: 500,
            kpca_dims: 2,
            save_datasets: false,
        }
    }
}

/// Settings for the principal-component sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct QpcaPlan {
    pub n_values: Vec<usize>,
    pub strategies: Vec<String>,
    pub copy_budgets: Vec<usize>,
    pub instances: u32,
}

impl Default for QpcaPlan {
    fn default() -> Self {
        QpcaPlan {
            n_values: vec![2, 4, 6, 8],
            strategies: vec!["conventional".into(), "quantum_enhanced".into()],
            copy_budgets: vec![20, 50, 100, 200],
            instances: 200,
        }
    }
}

/// Settings for the bound-evaluation table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundsPlan {
    pub n_min: u32,
    pub n_max: u32,
    pub delta: f64,
    pub memory_qubits: u32,
    pub success_probability: f64,
}

impl Default for BoundsPlan {
    fn default() -> Self {
        BoundsPlan {
            n_min: 2,
            n_max: 20,
            delta: 0.3,
            memory_qubits: 0,
            success_probability: 2.0 / 3.0,
        }
    }
}

/// A full experiment plan.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentPlan {
    pub task: Task,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub formats: Vec<Format>,
    pub noise: Option<NoiseSpec>,
    pub states: StatesPlan,
    pub dynamics: DynamicsPlan,
    pub qpca: QpcaPlan,
    pub bounds: BoundsPlan,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            task: Task::States,
            seed: 0,
            out_dir: None,
            formats: vec![Format::Csv, Format::Json],
            noise: None,
            states: StatesPlan::default(),
            dynamics: DynamicsPlan::default(),
            qpca: QpcaPlan::default(),
            bounds: BoundsPlan::default(),
        }
    }
}

impl ExperimentPlan {
    pub fn from_toml(text: &str) -> Result<Self> {
        let plan: ExperimentPlan =
            toml::from_str(text).map_err(|e| HarnessError::Config(format!("bad plan: {e}")))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read plan {path:?}: {e}")))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let check_strategies = |names: &[String]| -> Result<()> {
            for name in names {
                if name != "conventional" && name != "quantum_enhanced" {
                    return Err(HarnessError::Config(format!("unknown strategy {name:?}")));
                }
            }
            if names.is_empty() {
                return Err(HarnessError::Config("no strategies selected".into()));
            }
            Ok(())
        };
        match self.task {
            Task::States => {
                let p = &self.states;
                check_strategies(&p.strategies)?;
                if p.n_values.is_empty() {
                    return Err(HarnessError::Config("states.n_values is empty".into()));
                }
                if !(p.accuracy_target > 0.5 && p.accuracy_target < 1.0) {
                    return Err(HarnessError::Config(format!(
                        "accuracy target must lie in (0.5, 1), got {}",
                        p.accuracy_target
                    )));
                }
                if p.trials == 0 {
                    return Err(HarnessError::Config("states.trials must be >= 1".into()));
                }
                if p.conventional_cap == 0 || p.quantum_cap == 0 {
                    return Err(HarnessError::Config("budget caps must be >= 1".into()));
                }
                if !(p.alpha.abs() < 1.0 && p.alpha != 0.0) {
                    return Err(HarnessError::Config(format!(
                        "alpha must lie in (-1, 1) \\ {{0}}, got {}",
                        p.alpha
                    )));
                }
                if p.n_values.iter().any(|&n| n == 0 || n > 64) {
                    return Err(HarnessError::Config("states.n_values outside 1..=64".into()));
                }
            }
            Task::Dynamics => {
                let p = &self.dynamics;
                check_strategies(&p.strategies)?;
                if p.n < 2 {
                    return Err(HarnessError::Config("dynamics.n must be >= 2".into()));
                }
                if p.depth == 0 {
                    return Err(HarnessError::Config("dynamics.depth must be >= 1".into()));
                }
                if p.circuits_per_class < 2 {
                    return Err(HarnessError::Config("need >= 2 circuits per class".into()));
                }
                if p.conventional_repetitions < 2 || p.quantum_repetitions < 2 {
                    return Err(HarnessError::Config("repetitions must be >= 2".into()));
                }
                if p.kpca_dims == 0 || p.kpca_dims > 2 {
                    return Err(HarnessError::Config("kpca_dims must be 1 or 2".into()));
                }
            }
            Task::Qpca => {
                let p = &self.qpca;
                check_strategies(&p.strategies)?;
                if p.n_values.iter().any(|&n| n < 2) {
                    return Err(HarnessError::Config("qpca.n_values must be >= 2".into()));
                }
                if p.copy_budgets.is_empty() || p.instances == 0 {
                    return Err(HarnessError::Config("qpca needs budgets and instances".into()));
                }
            }
            Task::Bounds => {
                let p = &self.bounds;
                if p.n_min < 1 || p.n_max < p.n_min {
                    return Err(HarnessError::Config("bounds range must satisfy 1 <= n_min <= n_max".into()));
                }
                if !(p.delta > 0.0 && p.delta < 0.5) {
                    return Err(HarnessError::Config(format!(
                        "bounds.delta must lie in (0, 1/2), got {}",
                        p.delta
                    )));
                }
            }
        }
        Ok(())
    }

    /// Stable content hash used to key resumable run records.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::to_string(self).expect("plan serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}
