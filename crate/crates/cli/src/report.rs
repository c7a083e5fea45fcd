//! Report emission: CSV summaries, the full JSON record, and optional
//! SVG plots. Output bytes are a pure function of the record and plan.

use std::fmt::Write as _;
use std::path::Path;

use crate::plan::{ExperimentPlan, Format, Task};
use crate::record::RunRecord;
use crate::svg::{render, ChartSpec, Series};
use crate::Result;

const COLORS: [&str; 4] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd"];

fn fnum(v: f64) -> String {
    // shortest round-trip representation; deterministic across runs
    format!("{v}")
}

fn strategy_color(name: &str) -> &'static str {
    match name {
        "conventional" => COLORS[0],
        "quantum_enhanced" => COLORS[1],
        _ => COLORS[2],
    }
}

/// Write every requested artifact for the record into `out_dir`.
pub fn emit_report(record: &RunRecord, plan: &ExperimentPlan, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    for format in &plan.formats {
        match format {
            Format::Csv => emit_csv(record, out_dir)?,
            Format::Json => {
                std::fs::write(out_dir.join("report.json"), serde_json::to_vec_pretty(record)?)?;
            }
            Format::Svg => emit_svg(record, out_dir)?,
        }
    }
    Ok(())
}

fn emit_csv(record: &RunRecord, out_dir: &Path) -> Result<()> {
    match record.task {
        Task::States => {
            let mut summary = String::from(
                "n,strategy,copies_per_experiment,cap,accuracy_target,min_budget,min_copies,reached\n",
            );
            let mut curve = String::from("n,strategy,budget,accuracy,wilson_low,wilson_high,trials\n");
            for point in &record.states {
                let _ = writeln!(
                    summary,
                    "{},{},{},{},{},{},{},{}",
                    point.n,
                    point.strategy,
                    point.copies_per_experiment,
                    point.cap,
                    fnum(point.accuracy_target),
                    point.min_budget.map_or(String::new(), |b| b.to_string()),
                    point.min_copies.map_or(String::new(), |c| c.to_string()),
                    point.min_budget.is_some()
                );
                for probe in &point.curve {
                    let _ = writeln!(
                        curve,
                        "{},{},{},{},{},{},{}",
                        point.n,
                        point.strategy,
                        probe.budget,
                        fnum(probe.accuracy),
                        fnum(probe.wilson_low),
                        fnum(probe.wilson_high),
                        probe.trials
                    );
                }
            }
            std::fs::write(out_dir.join("states_summary.csv"), summary)?;
            std::fs::write(out_dir.join("states_curve.csv"), curve)?;
        }
        Task::Dynamics => {
            let mut summary =
                String::from("n,depth,strategy,repetitions,circuits_per_class,accuracy\n");
            let mut projections = String::from("strategy,circuit_id,true_label,comp1,comp2\n");
            for point in &record.dynamics {
                let _ = writeln!(
                    summary,
                    "{},{},{},{},{},{}",
                    point.n,
                    point.depth,
                    point.strategy,
                    point.repetitions,
                    point.circuits_per_class,
                    fnum(point.accuracy)
                );
                for row in &point.projections {
                    let comp2 = row.components.get(1).map_or(String::new(), |v| fnum(*v));
                    let _ = writeln!(
                        projections,
                        "{},{},{},{},{}",
                        point.strategy,
                        row.circuit_id,
                        row.true_label,
                        fnum(row.components[0]),
                        comp2
                    );
                }
            }
            std::fs::write(out_dir.join("dynamics_summary.csv"), summary)?;
            std::fs::write(out_dir.join("dynamics_projections.csv"), projections)?;
        }
        Task::Qpca => {
            let mut summary = String::from("n,strategy,copies,instances,accuracy,lb_qpca\n");
            let mut instances = String::from("n,strategy,hypothesis,estimate,guess,copies_used\n");
            for point in &record.qpca {
                let _ = writeln!(
                    summary,
                    "{},{},{},{},{},{}",
                    point.n,
                    point.strategy,
                    point.copies,
                    point.instances,
                    fnum(point.accuracy),
                    fnum(point.lower_bound)
                );
                for row in &point.rows {
                    let _ = writeln!(
                        instances,
                        "{},{},{},{},{},{}",
                        point.n,
                        point.strategy,
                        row.hypothesis,
                        row.estimate.map_or(String::new(), fnum),
                        row.guess,
                        row.copies_used
                    );
                }
            }
            std::fs::write(out_dir.join("qpca_summary.csv"), summary)?;
            std::fs::write(out_dir.join("qpca_instances.csv"), instances)?;
        }
        Task::Bounds => {
            let mut csv = String::from("n,bound_name,value\n");
            for row in &record.bounds {
                let _ = writeln!(csv, "{},{},{}", row.n, row.bound_name, fnum(row.value));
            }
            std::fs::write(out_dir.join("bounds.csv"), csv)?;
        }
    }
    Ok(())
}

fn emit_svg(record: &RunRecord, out_dir: &Path) -> Result<()> {
    match record.task {
        Task::States => {
            // budget versus n, one series per strategy plus the
            // conventional lower-bound curve "(C, LB)"
            let mut series = Vec::new();
            let mut strategies: Vec<String> =
                record.states.iter().map(|p| p.strategy.clone()).collect();
            strategies.sort();
            strategies.dedup();
            for name in &strategies {
                let points: Vec<(f64, f64)> = record
                    .states
                    .iter()
                    .filter(|p| &p.strategy == name)
                    .filter_map(|p| p.min_budget.map(|b| (p.n as f64, b as f64)))
                    .collect();
                series.push(Series {
                    label: format!("({})", if name == "conventional" { "C" } else { "Q" }),
                    points,
                    color: strategy_color(name).into(),
                    scatter: false,
                    dashed: false,
                });
            }
            let target = record.states.first().map_or(0.7, |p| p.accuracy_target);
            let delta = 1.0 - target;
            let lb_points: Vec<(f64, f64)> = record
                .states
                .iter()
                .map(|p| p.n)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .filter_map(|n| {
                    qlab_core::bounds::lb_compare_abs(n as u32, delta)
                        .ok()
                        .map(|v| (n as f64, v.max(1e-3)))
                })
                .collect();
            series.push(Series {
                label: "(C, LB)".into(),
                points: lb_points,
                color: "#555555".into(),
                scatter: false,
                dashed: true,
            });
            let chart = render(
                &ChartSpec {
                    title: format!("Experiments to reach {:.0}% accuracy", target * 100.0),
                    x_label: "qubits n".into(),
                    y_label: "experiments".into(),
                    log_y: true,
                },
                &series,
            );
            std::fs::write(out_dir.join("states_budget_vs_n.svg"), chart)?;

            // accuracy versus budget, one chart per n
            let ns: std::collections::BTreeSet<usize> =
                record.states.iter().map(|p| p.n).collect();
            for n in ns {
                let mut series = Vec::new();
                for point in record.states.iter().filter(|p| p.n == n) {
                    series.push(Series {
                        label: point.strategy.clone(),
                        points: point
                            .curve
                            .iter()
                            .map(|probe| (probe.budget as f64, probe.accuracy))
                            .collect(),
                        color: strategy_color(&point.strategy).into(),
                        scatter: false,
                        dashed: false,
                    });
                }
                let chart = render(
                    &ChartSpec {
                        title: format!("Accuracy vs budget (n = {n})"),
                        x_label: "experiments".into(),
                        y_label: "accuracy".into(),
                        log_y: false,
                    },
                    &series,
                );
                std::fs::write(out_dir.join(format!("states_accuracy_n{n}.svg")), chart)?;
            }
        }
        Task::Dynamics => {
            for point in &record.dynamics {
                let mut general = Vec::new();
                let mut tsym = Vec::new();
                for row in &point.projections {
                    let x = row.components[0];
                    let y = row.components.get(1).copied().unwrap_or(0.0);
                    if row.true_label == 0 {
                        general.push((x, y));
                    } else {
                        tsym.push((x, y));
                    }
                }
                let chart = render(
                    &ChartSpec {
                        title: format!(
                            "Kernel PCA of {} data (n = {}, accuracy {:.2})",
                            point.strategy, point.n, point.accuracy
                        ),
                        x_label: "component 1".into(),
                        y_label: "component 2".into(),
                        log_y: false,
                    },
                    &[
                        Series {
                            label: "general".into(),
                            points: general,
                            color: COLORS[0].into(),
                            scatter: true,
                            dashed: false,
                        },
                        Series {
                            label: "t_symmetric".into(),
                            points: tsym,
                            color: COLORS[1].into(),
                            scatter: true,
                            dashed: false,
                        },
                    ],
                );
                std::fs::write(
                    out_dir.join(format!("dynamics_pca_{}.svg", point.strategy)),
                    chart,
                )?;
            }
        }
        Task::Qpca => {
            let ns: std::collections::BTreeSet<usize> = record.qpca.iter().map(|p| p.n).collect();
            for n in ns {
                let mut series = Vec::new();
                let mut strategies: Vec<String> = record
                    .qpca
                    .iter()
                    .filter(|p| p.n == n)
                    .map(|p| p.strategy.clone())
                    .collect();
                strategies.sort();
                strategies.dedup();
                for name in &strategies {
                    series.push(Series {
                        label: name.clone(),
                        points: record
                            .qpca
                            .iter()
                            .filter(|p| p.n == n && &p.strategy == name)
                            .map(|p| (p.copies as f64, p.accuracy))
                            .collect(),
                        color: strategy_color(name).into(),
                        scatter: false,
                        dashed: false,
                    });
                }
                let chart = render(
                    &ChartSpec {
                        title: format!("Hypothesis accuracy vs copies (n = {n})"),
                        x_label: "copies".into(),
                        y_label: "accuracy".into(),
                        log_y: false,
                    },
                    &series,
                );
                std::fs::write(out_dir.join(format!("qpca_accuracy_n{n}.svg")), chart)?;
            }
        }
        Task::Bounds => {
            let mut names: Vec<String> =
                record.bounds.iter().map(|r| r.bound_name.clone()).collect();
            names.sort();
            names.dedup();
            let series: Vec<Series> = names
                .iter()
                .enumerate()
                .map(|(i, name)| Series {
                    label: name.clone(),
                    points: record
                        .bounds
                        .iter()
                        .filter(|r| &r.bound_name == name)
                        .map(|r| (f64::from(r.n), r.value.max(1e-3)))
                        .collect(),
                    color: COLORS[i % COLORS.len()].into(),
                    scatter: false,
                    dashed: false,
                })
                .collect();
            let chart = render(
                &ChartSpec {
                    title: "Conventional lower bounds".into(),
                    x_label: "qubits n".into(),
                    y_label: "experiments".into(),
                    log_y: true,
                },
                &series,
            );
            std::fs::write(out_dir.join("bounds.svg"), chart)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::ExperimentPlan;
    use crate::record::RunRecord;

    #[test]
    fn empty_records_emit_header_only_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut plan = ExperimentPlan::default();
        plan.formats = vec![Format::Csv, Format::Json, Format::Svg];
        for task in [Task::States, Task::Dynamics, Task::Qpca, Task::Bounds] {
            plan.task = task;
            let record = RunRecord::new(plan.hash(), task, 0);
            emit_report(&record, &plan, dir.path()).unwrap();
        }
        let summary = std::fs::read_to_string(dir.path().join("states_summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 1);
        assert!(summary.starts_with("n,strategy,"));
        let bounds = std::fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
        assert_eq!(bounds, "n,bound_name,value\n");
        assert!(dir.path().join("report.json").exists());
    }
}
