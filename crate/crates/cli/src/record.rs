//! Persistent, resumable run records. A record is keyed by the plan hash;
//! completed sweep points are stored as they finish and skipped on
//! resume.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::plan::Task;
use crate::Result;

/// One accuracy probe at a fixed budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetProbe {
    pub budget: usize,
    pub accuracy: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub trials: u32,
}

/// Result of one (n, strategy) point of the states sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePoint {
    pub n: usize,
    pub strategy: String,
    pub copies_per_experiment: u64,
    pub cap: usize,
    pub accuracy_target: f64,
    /// Probed (budget, accuracy) curve in probing order.
    pub curve: Vec<BudgetProbe>,
    /// Minimal budget reaching the target, when found within the cap.
    pub min_budget: Option<usize>,
    /// Copies consumed at the minimal budget (budget x copies/experiment).
    pub min_copies: Option<u64>,
}

/// Kernel-PCA projection of one circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRow {
    pub circuit_id: usize,
    pub true_label: u8,
    pub components: Vec<f64>,
}

/// Result of one strategy of the dynamics sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsPoint {
    pub n: usize,
    pub depth: usize,
    pub strategy: String,
    pub repetitions: usize,
    pub circuits_per_class: usize,
    pub accuracy: f64,
    pub projections: Vec<ProjectionRow>,
}

/// One decision of a qPCA strategy on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpcaInstanceRow {
    pub hypothesis: char,
    /// Two-copy estimate when the strategy produces one.
    pub estimate: Option<f64>,
    pub guess: char,
    pub copies_used: usize,
}

/// Result of one (n, strategy, budget) point of the qPCA sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpcaPoint {
    pub n: usize,
    pub strategy: String,
    pub copies: usize,
    pub instances: u32,
    pub accuracy: f64,
    pub lower_bound: f64,
    pub rows: Vec<QpcaInstanceRow>,
}

/// One bound evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: u32,
    pub bound_name: String,
    pub value: f64,
}

/// The persisted result of a sweep run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub plan_hash: String,
    pub task: Task,
    pub seed: u64,
    pub version: String,
    pub states: Vec<StatePoint>,
    pub dynamics: Vec<DynamicsPoint>,
    pub qpca: Vec<QpcaPoint>,
    pub bounds: Vec<BoundRow>,
}

impl RunRecord {
    pub fn new(plan_hash: String, task: Task, seed: u64) -> Self {
        RunRecord {
            plan_hash,
            task,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            states: Vec::new(),
            dynamics: Vec::new(),
            qpca: Vec::new(),
            bounds: Vec::new(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_vec_pretty(self)?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Load the record at `path` when it matches the plan hash; otherwise
    /// start fresh.
    pub fn load_or_new(path: &Path, plan_hash: &str, task: Task, seed: u64) -> Self {
        if let Ok(existing) = Self::load(path) {
            if existing.plan_hash == plan_hash {
                return existing;
            }
        }
        RunRecord::new(plan_hash.to_string(), task, seed)
    }

    pub fn completed_state_points(&self) -> BTreeSet<(usize, String)> {
        self.states.iter().map(|p| (p.n, p.strategy.clone())).collect()
    }

    pub fn completed_dynamics_points(&self) -> BTreeSet<String> {
        self.dynamics.iter().map(|p| p.strategy.clone()).collect()
    }

    pub fn completed_qpca_points(&self) -> BTreeSet<(usize, String, usize)> {
        self.qpca
            .iter()
            .map(|p| (p.n, p.strategy.clone(), p.copies))
            .collect()
    }

    /// Sort all point lists into canonical order (records are saved after
    /// each point; resumed runs may append out of order).
    pub fn canonicalize(&mut self) {
        self.states.sort_by(|a, b| (a.n, &a.strategy).cmp(&(b.n, &b.strategy)));
        self.dynamics.sort_by(|a, b| a.strategy.cmp(&b.strategy));
        self.qpca
            .sort_by(|a, b| (a.n, &a.strategy, a.copies).cmp(&(b.n, &b.strategy, b.copies)));
        self.bounds
            .sort_by(|a, b| (a.n, &a.bound_name).cmp(&(b.n, &b.bound_name)));
    }
}

/// Wilson 95% score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u32, trials: u32) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = f64::from(trials);
    let p = f64::from(successes) / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let margin = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (((center - margin) / denom).max(0.0), ((center + margin) / denom).min(1.0))
}
