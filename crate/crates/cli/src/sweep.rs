//! The experiment sweeps behind each `lab` subcommand.
//!
//! Sweep points run in a work-stealing pool with every trial owning a
//! stream derived from (master seed, point label, trial index), so
//! results are independent of scheduling. The record file is rewritten
//! after each completed point; rerunning the same plan resumes from it.
//! Wall-clock timings go to a separate file so record and report outputs
//! stay byte-identical for a fixed plan and seed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use qlab_core::bounds::{lb_bounded_memory, lb_compare_abs, lb_predict_abs, lb_qpca};
use qlab_core::dataset::{write_outcome_matrix, DynamicsHeader};
use qlab_core::ensemble::EnsembleSpec;
use qlab_core::kpca::{build_features, classify_by_split, default_gamma, fit_kernel_pca, score_accuracy};
use qlab_core::noise::ReadoutProfile;
use qlab_core::pauli::sample_pauli_string;
use qlab_core::qpca::{two_copy_estimate, Hypothesis, PcaInstance};
use qlab_core::rngstream::stream;
use qlab_core::statevec::{generate_1d_circuit, Circuit, SymmetryClass};
use qlab_core::strategy::{StateComparison, StrategyRegistry};
use qlab_core::Error as CoreError;

use crate::plan::{ExperimentPlan, Task};
use crate::record::{
    wilson_interval, BoundRow, BudgetProbe, DynamicsPoint, ProjectionRow, QpcaInstanceRow,
    QpcaPoint, RunRecord, StatePoint,
};
use crate::{HarnessError, Result};

/// Wall-clock seconds per completed sweep point.
pub type Timings = BTreeMap<String, f64>;

pub struct SweepOutput {
    pub record: RunRecord,
    pub timings: Timings,
}

fn save_progress(record: &RunRecord, path: Option<&Path>) -> Result<()> {
    if let Some(path) = path {
        record.save(path)?;
    }
    Ok(())
}

/// One comparison trial: plant a Pauli, announce it next to a decoy in
/// random order, and ask the strategy which observable is larger.
/// Returns whether it picked the planted one.
fn comparison_trial(
    spec_n: usize,
    alpha_magnitude: f64,
    strategy: &dyn StateComparison,
    budget: usize,
    noise: Option<&ReadoutProfile>,
    master: u64,
    label: &str,
    trial: u64,
) -> Result<bool> {
    let mut rng = stream(master, label, trial);
    let planted = sample_pauli_string(spec_n, true, &mut rng)?;
    let mut other = sample_pauli_string(spec_n, true, &mut rng)?;
    while other == planted {
        other = sample_pauli_string(spec_n, true, &mut rng)?;
    }
    let signed_alpha = if rng.gen_bool(0.5) { alpha_magnitude } else { -alpha_magnitude };
    let spec = EnsembleSpec::new(planted, signed_alpha)?;
    let planted_first = rng.gen_bool(0.5);
    let (o1, o2) = if planted_first { (planted, other) } else { (other, planted) };
    let choice = strategy.compare(&spec, budget, &o1, &o2, noise, &mut rng)?;
    Ok((choice == 1) == planted_first)
}

fn accuracy_probe(
    n: usize,
    alpha: f64,
    strategy: &dyn StateComparison,
    budget: usize,
    trials: u32,
    noise: Option<&ReadoutProfile>,
    master: u64,
    point_label: &str,
) -> Result<BudgetProbe> {
    let label = format!("{point_label}/budget{budget}");
    let correct: u32 = (0..u64::from(trials))
        .into_par_iter()
        .map(|trial| {
            comparison_trial(n, alpha, strategy, budget, noise, master, &label, trial)
                .map(u32::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let accuracy = f64::from(correct) / f64::from(trials);
    let (wilson_low, wilson_high) = wilson_interval(correct, trials);
    Ok(BudgetProbe { budget, accuracy, wilson_low, wilson_high, trials })
}

/// Doubling search followed by bisection for the smallest budget whose
/// estimated accuracy reaches the target. Probes are memoized into the
/// returned curve.
fn minimal_budget(
    n: usize,
    alpha: f64,
    strategy: &dyn StateComparison,
    cap: usize,
    target: f64,
    trials: u32,
    noise: Option<&ReadoutProfile>,
    master: u64,
    point_label: &str,
    curve: &mut Vec<BudgetProbe>,
) -> Result<Option<usize>> {
    let mut memo: BTreeMap<usize, f64> = BTreeMap::new();
    let mut probe = |budget: usize, curve: &mut Vec<BudgetProbe>| -> Result<f64> {
        if let Some(&acc) = memo.get(&budget) {
            return Ok(acc);
        }
        let p = accuracy_probe(n, alpha, strategy, budget, trials, noise, master, point_label)?;
        memo.insert(budget, p.accuracy);
        curve.push(p.clone());
        Ok(p.accuracy)
    };

    // doubling phase
    let mut budget = 1usize;
    let mut last_fail = 0usize;
    let mut first_success = None;
    loop {
        let b = budget.min(cap);
        let acc = probe(b, curve)?;
        if acc >= target {
            first_success = Some(b);
            break;
        }
        last_fail = b;
        if b == cap {
            break;
        }
        budget = budget.saturating_mul(2);
    }
    let Some(mut hi) = first_success else {
        return Ok(None);
    };
    // bisection phase
    let mut lo = last_fail;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if probe(mid, curve)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Accuracy-vs-budget and minimal 70%-budget search for every
/// (n, strategy) pair of the plan.
pub fn run_states_sweep(plan: &ExperimentPlan, record_path: Option<&Path>) -> Result<SweepOutput> {
    let registry = StrategyRegistry::with_builtins();
    let hash = plan.hash();
    let mut record = match record_path {
        Some(path) => RunRecord::load_or_new(path, &hash, Task::States, plan.seed),
        None => RunRecord::new(hash, Task::States, plan.seed),
    };
    let mut timings = Timings::new();
    let done = record.completed_state_points();
    let p = &plan.states;
    for &n in &p.n_values {
        for name in &p.strategies {
            if done.contains(&(n, name.clone())) {
                continue;
            }
            let strategy = registry
                .state(name)
                .ok_or_else(|| HarnessError::Config(format!("unknown strategy {name:?}")))?;
            let cap = if strategy.copies_per_experiment() == 1 { p.conventional_cap } else { p.quantum_cap };
            let point_label = format!("states/n{n}/{name}");
            let noise = match &plan.noise {
                Some(spec) => {
                    let mut noise_rng = stream(plan.seed, &format!("{point_label}/noise"), 0);
                    Some(spec.instantiate(strategy.measured_bits(n), &mut noise_rng)?)
                }
                None => None,
            };
            let start = Instant::now();
            let mut curve = Vec::new();
            for &budget in &p.probe_budgets {
                let probe = accuracy_probe(
                    n, p.alpha, strategy, budget.min(cap), p.trials, noise.as_ref(), plan.seed, &point_label,
                )?;
                curve.push(probe);
            }
            let min_budget = minimal_budget(
                n,
                p.alpha,
                strategy,
                cap,
                p.accuracy_target,
                p.trials,
                noise.as_ref(),
                plan.seed,
                &point_label,
                &mut curve,
            )?;
            curve.sort_by_key(|probe| probe.budget);
            curve.dedup_by_key(|probe| probe.budget);
            record.states.push(StatePoint {
                n,
                strategy: name.clone(),
                copies_per_experiment: strategy.copies_per_experiment(),
                cap,
                accuracy_target: p.accuracy_target,
                curve,
                min_budget,
                min_copies: min_budget.map(|b| b as u64 * strategy.copies_per_experiment()),
            });
            timings.insert(point_label, start.elapsed().as_secs_f64());
            record.canonicalize();
            save_progress(&record, record_path)?;
        }
    }
    record.canonicalize();
    save_progress(&record, record_path)?;
    Ok(SweepOutput { record, timings })
}

fn generate_circuit_pool(plan: &ExperimentPlan) -> Result<(Vec<Circuit>, Vec<u8>)> {
    let p = &plan.dynamics;
    let classes = [SymmetryClass::General, SymmetryClass::TSymmetric];
    let indices: Vec<usize> = (0..2 * p.circuits_per_class).collect();
    let circuits: Vec<Circuit> = indices
        .par_iter()
        .map(|&i| {
            let class = classes[i / p.circuits_per_class];
            let mut rng = stream(plan.seed, "dynamics/circuit", i as u64);
            let mut circuit = generate_1d_circuit(p.n, p.depth, class, &mut rng)?;
            circuit.seed = Some(i as u64);
            Ok::<_, CoreError>(circuit)
        })
        .collect::<std::result::Result<_, _>>()?;
    let truth: Vec<u8> = indices
        .iter()
        .map(|&i| u8::from(i >= p.circuits_per_class))
        .collect();
    Ok((circuits, truth))
}

/// Generate the circuit pool, probe it with each strategy, and run the
/// kernel-PCA classification pipeline.
pub fn run_dynamics_sweep(plan: &ExperimentPlan, record_path: Option<&Path>) -> Result<SweepOutput> {
    let registry = StrategyRegistry::with_builtins();
    let hash = plan.hash();
    let mut record = match record_path {
        Some(path) => RunRecord::load_or_new(path, &hash, Task::Dynamics, plan.seed),
        None => RunRecord::new(hash, Task::Dynamics, plan.seed),
    };
    let mut timings = Timings::new();
    let done = record.completed_dynamics_points();
    let p = &plan.dynamics;
    let any_pending = p.strategies.iter().any(|s| !done.contains(s));
    let (circuits, truth) = if any_pending {
        generate_circuit_pool(plan)?
    } else {
        (Vec::new(), Vec::new())
    };
    for name in &p.strategies {
        if done.contains(name) {
            continue;
        }
        let strategy = registry
            .dynamics(name)
            .ok_or_else(|| HarnessError::Config(format!("unknown strategy {name:?}")))?;
        let repetitions = match strategy.kind() {
            qlab_core::dynamics::DynamicsStrategyKind::Conventional => p.conventional_repetitions,
            qlab_core::dynamics::DynamicsStrategyKind::QuantumEnhanced => p.quantum_repetitions,
        };
        let point_label = format!("dynamics/n{}/{name}", p.n);
        let noise = match &plan.noise {
            Some(spec) => {
                let mut noise_rng = stream(plan.seed, &format!("{point_label}/noise"), 0);
                Some(spec.instantiate(strategy.row_width(p.n), &mut noise_rng)?)
            }
            None => None,
        };
        let start = Instant::now();
        let outcomes: Vec<(qlab_core::kpca::FeatureVector, qlab_core::dynamics::OutcomeMatrix)> =
            circuits
                .par_iter()
                .enumerate()
                .map(|(i, circuit)| {
                    let mut rng = stream(plan.seed, &format!("{point_label}/shots"), i as u64);
                    let m = strategy.run(circuit, repetitions, noise.as_ref(), &mut rng)?;
                    Ok((build_features(&m)?, m))
                })
                .collect::<std::result::Result<_, CoreError>>()?;
        if p.save_datasets {
            if let Some(dir) = record_path.and_then(Path::parent) {
                let dataset_dir = dir.join("datasets").join(name);
                std::fs::create_dir_all(&dataset_dir)?;
                for (i, (_, m)) in outcomes.iter().enumerate() {
                    let header = DynamicsHeader {
                        kind: "dynamics".into(),
                        circuit_seed: circuits[i].seed,
                        symmetry_label: circuits[i].symmetry,
                        strategy: strategy.kind(),
                        n: p.n,
                        depth: p.depth,
                        repetitions: m.len(),
                        noise: noise.clone(),
                    };
                    let file =
                        std::fs::File::create(dataset_dir.join(format!("circuit_{i:03}.jsonl")))?;
                    write_outcome_matrix(std::io::BufWriter::new(file), &header, m)?;
                }
            }
        }
        let features: Vec<qlab_core::kpca::FeatureVector> =
            outcomes.into_iter().map(|(f, _)| f).collect();
        let gamma = default_gamma(&features);
        let model = fit_kernel_pca(&features, gamma, p.kpca_dims)?;
        let coords = model.training_coordinates();
        let component_one: Vec<f64> = coords.iter().map(|c| c[0]).collect();
        let accuracy = match classify_by_split(&component_one) {
            Ok(labels) => score_accuracy(&labels, &truth)?,
            // a collapsed representation carries no information
            Err(CoreError::Degenerate(_)) => 0.5,
            Err(e) => return Err(e.into()),
        };
        let projections = coords
            .iter()
            .enumerate()
            .map(|(i, c)| ProjectionRow {
                circuit_id: i,
                true_label: truth[i],
                components: c.clone(),
            })
            .collect();
        record.dynamics.push(DynamicsPoint {
            n: p.n,
            depth: p.depth,
            strategy: name.clone(),
            repetitions,
            circuits_per_class: p.circuits_per_class,
            accuracy,
            projections,
        });
        timings.insert(point_label, start.elapsed().as_secs_f64());
        record.canonicalize();
        save_progress(&record, record_path)?;
    }
    record.canonicalize();
    save_progress(&record, record_path)?;
    Ok(SweepOutput { record, timings })
}

/// Accuracy of both estimators against fresh instances per
/// (n, copy budget) point; instances are shared across strategies.
pub fn run_qpca_sweep(plan: &ExperimentPlan, record_path: Option<&Path>) -> Result<SweepOutput> {
    let registry = StrategyRegistry::with_builtins();
    let hash = plan.hash();
    let mut record = match record_path {
        Some(path) => RunRecord::load_or_new(path, &hash, Task::Qpca, plan.seed),
        None => RunRecord::new(hash, Task::Qpca, plan.seed),
    };
    let mut timings = Timings::new();
    let done = record.completed_qpca_points();
    let p = &plan.qpca;
    for &n in &p.n_values {
        for &copies in &p.copy_budgets {
            for name in &p.strategies {
                if done.contains(&(n, name.clone(), copies)) {
                    continue;
                }
                let strategy = registry
                    .pca(name)
                    .ok_or_else(|| HarnessError::Config(format!("unknown strategy {name:?}")))?;
                let point_label = format!("qpca/n{n}/copies{copies}/{name}");
                let instance_label = format!("qpca/instance/n{n}/copies{copies}");
                let start = Instant::now();
                let rows: Vec<QpcaInstanceRow> = (0..u64::from(p.instances))
                    .into_par_iter()
                    .map(|trial| {
                        let mut instance_rng = stream(plan.seed, &instance_label, trial);
                        let hypothesis = if instance_rng.gen_bool(0.5) { Hypothesis::A } else { Hypothesis::B };
                        let instance = PcaInstance::sample(n, hypothesis, &mut instance_rng)?;
                        let mut decide_rng = stream(plan.seed, &point_label, trial);
                        let guess = strategy.decide(&instance, copies, &mut decide_rng)?;
                        let estimate = if name == "quantum_enhanced" && copies >= 2 {
                            let mut est_rng = stream(plan.seed, &format!("{point_label}/estimate"), trial);
                            match two_copy_estimate(&instance, copies / 2, &mut est_rng) {
                                Ok(v) => Some(v),
                                Err(CoreError::UnstableEstimate(_)) => None,
                                Err(e) => return Err(e),
                            }
                        } else {
                            None
                        };
                        Ok(QpcaInstanceRow {
                            hypothesis: if hypothesis == Hypothesis::A { 'A' } else { 'B' },
                            estimate,
                            guess: if guess == Hypothesis::A { 'A' } else { 'B' },
                            copies_used: copies,
                        })
                    })
                    .collect::<std::result::Result<_, _>>()?;
                let correct = rows.iter().filter(|r| r.hypothesis == r.guess).count();
                let accuracy = correct as f64 / rows.len() as f64;
                record.qpca.push(QpcaPoint {
                    n,
                    strategy: name.clone(),
                    copies,
                    instances: p.instances,
                    accuracy,
                    lower_bound: lb_qpca(n as u32)?,
                    rows,
                });
                timings.insert(point_label, start.elapsed().as_secs_f64());
                record.canonicalize();
                save_progress(&record, record_path)?;
            }
        }
    }
    record.canonicalize();
    save_progress(&record, record_path)?;
    Ok(SweepOutput { record, timings })
}

/// Evaluate every closed-form bound over the requested range of n.
pub fn run_bounds(plan: &ExperimentPlan, record_path: Option<&Path>) -> Result<SweepOutput> {
    let p = &plan.bounds;
    let mut record = RunRecord::new(plan.hash(), Task::Bounds, plan.seed);
    for n in p.n_min..=p.n_max {
        record.bounds.push(BoundRow {
            n,
            bound_name: "lb_predict_abs".into(),
            value: lb_predict_abs(n, p.delta)?,
        });
        record.bounds.push(BoundRow {
            n,
            bound_name: "lb_compare_abs".into(),
            value: lb_compare_abs(n, p.delta)?,
        });
        if n >= 2 {
            record.bounds.push(BoundRow { n, bound_name: "lb_qpca".into(), value: lb_qpca(n)? });
        }
        let k = p.memory_qubits.min(n);
        record.bounds.push(BoundRow {
            n,
            bound_name: format!("lb_bounded_memory_k{k}"),
            value: lb_bounded_memory(n, k, p.success_probability)?,
        });
    }
    record.canonicalize();
    save_progress(&record, record_path)?;
    Ok(SweepOutput { record, timings: Timings::new() })
}

/// Run the plan's task and persist record, timings and reports under the
/// output directory.
pub fn run(plan: &ExperimentPlan, out_dir: &Path) -> Result<SweepOutput> {
    plan.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let record_path = out_dir.join("record.json");
    let output = match plan.task {
        Task::States => run_states_sweep(plan, Some(&record_path))?,
        Task::Dynamics => run_dynamics_sweep(plan, Some(&record_path))?,
        Task::Qpca => run_qpca_sweep(plan, Some(&record_path))?,
        Task::Bounds => run_bounds(plan, Some(&record_path))?,
    };
    std::fs::write(
        out_dir.join("timings.json"),
        serde_json::to_vec_pretty(&output.timings)?,
    )?;
    crate::report::emit_report(&output.record, plan, out_dir)?;
    Ok(output)
}

/// Default output directory for a plan.
pub fn default_out_dir(plan: &ExperimentPlan) -> PathBuf {
    PathBuf::from("runs").join(format!("{}-{}", plan.task, &plan.hash()[..8]))
}
