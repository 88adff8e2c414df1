use std::fmt;
use std::fs;
use std::path::PathBuf;

use serde_json::json;

use grover_core::analytic::{
    classify_cooking, j_opt_exact, success_probability, success_probability_rotation,
};
use grover_core::gates::{run_search, run_search_explicit};
use grover_core::memorymodel::{builtin_experiment, reproduce_table, simulate_participants};
use grover_core::phasefit::{feasible_max_probability, fit_phase};
use grover_core::{Error, ExperimentTable, SearchParams};

use crate::output::{fmt6, fmt_sci, join6, round6};
use crate::{Engine, ExperimentArgs, FitArgs, Format, SimulateArgs, SweepArgs, TableArgs};

/// Failures surfaced to the shell, each with its exit code.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Usage(msg) | CliError::Io(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// 2 = usage, 3 = infeasible target, 4 = unsupported dimension,
    /// 5 = no ordering-consistent assignment.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                Error::InfeasibleTarget { .. }
                | Error::BelowInitial { .. }
                | Error::InfeasibleCell { .. } => 3,
                Error::NotPowerOfTwo(_) => 4,
                Error::NoConsistentAssignment => 5,
                _ => 2,
            },
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

/// Finished stdout payload plus the code to exit with.
pub struct CommandOutput {
    pub stdout: String,
    pub exit_code: i32,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            exit_code: 0,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Rejects statevector-only flags when a formula engine is selected.
fn check_engine_flags(
    engine: Engine,
    explicit_circuit: bool,
    theta: Option<f64>,
    marked: Option<usize>,
) -> Result<(), CliError> {
    if engine == Engine::Statevector {
        return Ok(());
    }
    if explicit_circuit {
        return Err(usage(
            "--explicit-circuit only applies to --engine statevector",
        ));
    }
    if theta.is_some() {
        return Err(usage("--theta only applies to --engine statevector"));
    }
    if marked.is_some() {
        return Err(usage("--marked only applies to --engine statevector"));
    }
    Ok(())
}

pub fn simulate(args: SimulateArgs) -> Result<CommandOutput, CliError> {
    check_engine_flags(args.engine, args.explicit_circuit, args.theta, args.marked)?;

    let theta = args.theta.unwrap_or(args.phi);
    let rows: Vec<(u32, f64)> = match args.engine {
        Engine::Statevector => {
            let marked = args.marked.unwrap_or(0);
            let params = SearchParams::new(args.n, marked, args.phi, args.j)?.with_theta(theta)?;
            if !params.phase_matched() {
                eprintln!("note: theta differs from phi; the summary lines assume matched phases");
            }
            let trace = if args.explicit_circuit {
                run_search_explicit(&params)?
            } else {
                run_search(&params)?
            };
            trace.steps().collect()
        }
        Engine::Eq3 => (0..=args.j)
            .map(|j| Ok((j, success_probability(args.n, j, args.phi)?)))
            .collect::<Result<_, Error>>()?,
        Engine::Appendix => (0..=args.j)
            .map(|j| Ok((j, success_probability_rotation(args.n, j, args.phi)?)))
            .collect::<Result<_, Error>>()?,
    };

    let final_p = rows.last().expect("at least the start entry").1;
    let status = classify_cooking(args.n, args.j, args.phi)?;
    let j_exact = j_opt_exact(args.n, args.phi)?;
    let ceiling = feasible_max_probability(args.n, args.j)?;

    let stdout = match args.format {
        Format::Csv => {
            let mut out = String::from("iteration,probability\n");
            for (j, p) in &rows {
                out.push_str(&format!("{},{}\n", j, fmt6(*p)));
            }
            let mut params_line = format!(
                "# engine={} n={} j={} phi={}",
                args.engine.label(),
                args.n,
                args.j,
                fmt6(args.phi)
            );
            if args.engine == Engine::Statevector {
                params_line.push_str(&format!(
                    " theta={} marked={}",
                    fmt6(theta),
                    args.marked.unwrap_or(0)
                ));
                if args.explicit_circuit {
                    params_line.push_str(" explicit_circuit=true");
                }
            }
            out.push_str(&params_line);
            out.push('\n');
            out.push_str(&format!(
                "# final_probability={} status={} j_opt_exact={} feasible_max={}\n",
                fmt6(final_p),
                status.label(),
                fmt6(j_exact),
                fmt6(ceiling)
            ));
            out
        }
        Format::Json => {
            let mut doc = json!({
                "command": "simulate",
                "engine": args.engine.label(),
                "n": args.n,
                "j": args.j,
                "phi": round6(args.phi),
                "rows": rows
                    .iter()
                    .map(|(j, p)| json!({"iteration": j, "probability": round6(*p)}))
                    .collect::<Vec<_>>(),
                "final_probability": round6(final_p),
                "status": status.label(),
                "j_opt_exact": round6(j_exact),
                "feasible_max": round6(ceiling),
            });
            if args.engine == Engine::Statevector {
                doc["theta"] = json!(round6(theta));
                doc["marked"] = json!(args.marked.unwrap_or(0));
                doc["explicit_circuit"] = json!(args.explicit_circuit);
            }
            pretty(doc)
        }
    };
    Ok(CommandOutput::ok(stdout))
}

pub fn sweep(args: SweepArgs) -> Result<CommandOutput, CliError> {
    check_engine_flags(args.engine, args.explicit_circuit, None, args.marked)?;
    if args.j.is_empty() {
        return Err(usage("--j needs at least one iteration count"));
    }
    if !args.phi_step.is_finite() || args.phi_step <= 0.0 {
        return Err(usage("--phi-step must be positive"));
    }
    if args.phi_start <= 0.0 || args.phi_end >= 2.0 * std::f64::consts::PI {
        return Err(usage("phase grid must stay strictly inside (0, 2*pi)"));
    }
    if args.phi_start > args.phi_end {
        return Err(usage("--phi-start must not exceed --phi-end"));
    }

    let mut phis = Vec::new();
    let mut k = 0u64;
    loop {
        let phi = args.phi_start + k as f64 * args.phi_step;
        if phi > args.phi_end + args.phi_step * 1e-9 {
            break;
        }
        phis.push(phi);
        k += 1;
    }

    // probabilities[j index][phi index]
    let probabilities: Vec<Vec<f64>> = match args.engine {
        Engine::Eq3 => args
            .j
            .iter()
            .map(|&j| {
                phis.iter()
                    .map(|&phi| success_probability(args.n, j, phi))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?,
        Engine::Appendix => args
            .j
            .iter()
            .map(|&j| {
                phis.iter()
                    .map(|&phi| success_probability_rotation(args.n, j, phi))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?,
        Engine::Statevector => {
            let marked = args.marked.unwrap_or(0);
            let max_j = *args.j.iter().max().expect("non-empty");
            let mut per_phi = Vec::with_capacity(phis.len());
            for &phi in &phis {
                let params = SearchParams::new(args.n, marked, phi, max_j)?;
                let trace = if args.explicit_circuit {
                    run_search_explicit(&params)?
                } else {
                    run_search(&params)?
                };
                per_phi.push(trace.probabilities().to_vec());
            }
            args.j
                .iter()
                .map(|&j| per_phi.iter().map(|t| t[j as usize]).collect())
                .collect()
        }
    };

    // peak per requested j, earliest phi on ties
    let peaks: Vec<(u32, f64, f64)> = args
        .j
        .iter()
        .zip(&probabilities)
        .map(|(&j, series)| {
            let (idx, &p) = series
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.partial_cmp(b).expect("finite"))
                .expect("non-empty grid");
            (j, phis[idx], p)
        })
        .collect();

    let stdout = match args.format {
        Format::Csv => {
            let mut out = String::from("phi,j,probability\n");
            for (series, &j) in probabilities.iter().zip(&args.j) {
                for (&phi, &p) in phis.iter().zip(series) {
                    out.push_str(&format!("{},{},{}\n", fmt6(phi), j, fmt6(p)));
                }
            }
            out.push_str(&format!(
                "# engine={} n={} phi_start={} phi_end={} phi_step={}\n",
                args.engine.label(),
                args.n,
                fmt6(args.phi_start),
                fmt6(args.phi_end),
                fmt6(args.phi_step)
            ));
            for (j, phi, p) in &peaks {
                out.push_str(&format!(
                    "# j={} peak_probability={} peak_phi={}\n",
                    j,
                    fmt6(*p),
                    fmt6(*phi)
                ));
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = probabilities
                .iter()
                .zip(&args.j)
                .flat_map(|(series, &j)| {
                    phis.iter().zip(series).map(move |(&phi, &p)| {
                        json!({"phi": round6(phi), "j": j, "probability": round6(p)})
                    })
                })
                .collect();
            pretty(json!({
                "command": "sweep",
                "engine": args.engine.label(),
                "n": args.n,
                "phi_start": round6(args.phi_start),
                "phi_end": round6(args.phi_end),
                "phi_step": round6(args.phi_step),
                "rows": rows,
                "peaks": peaks
                    .iter()
                    .map(|(j, phi, p)| {
                        json!({"j": j, "phi": round6(*phi), "probability": round6(*p)})
                    })
                    .collect::<Vec<_>>(),
            }))
        }
    };
    Ok(CommandOutput::ok(stdout))
}

pub fn fit(args: FitArgs) -> Result<CommandOutput, CliError> {
    let fit = fit_phase(args.p, args.n, args.j)?;
    let ceiling = feasible_max_probability(args.n, args.j)?;

    let stdout = match args.format {
        Format::Csv => {
            let mut out = String::from("phi,residual\n");
            for (phi, residual) in fit.branches.iter().zip(&fit.residuals) {
                out.push_str(&format!("{},{}\n", fmt6(*phi), fmt_sci(*residual)));
            }
            out.push_str(&format!(
                "# n={} j={} target_p={} feasible_max={} branches={}\n",
                args.n,
                args.j,
                fmt6(args.p),
                fmt6(ceiling),
                fit.branches.len()
            ));
            out
        }
        Format::Json => pretty(json!({
            "command": "fit",
            "n": args.n,
            "j": args.j,
            "target_p": round6(args.p),
            "feasible_max": round6(ceiling),
            "branches": fit
                .branches
                .iter()
                .zip(&fit.residuals)
                .map(|(phi, residual)| json!({"phi": round6(*phi), "residual": residual}))
                .collect::<Vec<_>>(),
        })),
    };
    Ok(CommandOutput::ok(stdout))
}

fn load_table(fixture: Option<&PathBuf>) -> Result<ExperimentTable, CliError> {
    match fixture {
        None => Ok(builtin_experiment()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            Ok(ExperimentTable::parse(&text)?)
        }
    }
}

pub fn table(args: TableArgs) -> Result<CommandOutput, CliError> {
    let table = load_table(args.fixture.as_ref())?;
    let report = reproduce_table(&table)?;
    let selected = report.selected();

    let stdout = match args.format {
        Format::Csv => {
            let mut out = String::from(
                "strategy,emotion,observed_p,branches,selected_phi,reference_phase,abs_diff\n",
            );
            for (i, row) in report.rows.iter().enumerate() {
                let selected_phi = selected.map(|a| a.phases[i]);
                let abs_diff = match (selected_phi, row.reference_phase) {
                    (Some(phi), Some(reference)) => fmt6((phi - reference).abs()),
                    _ => String::new(),
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    row.strategy,
                    row.emotion,
                    fmt6(row.observed_p),
                    join6(&row.fit.branches),
                    selected_phi.map(fmt6).unwrap_or_default(),
                    row.reference_phase.map(fmt6).unwrap_or_default(),
                    abs_diff
                ));
            }
            out.push_str(&format!(
                "# n={} j={} combinations={} consistent={}\n",
                table.n(),
                table.j(),
                report.combinations,
                report.assignments.len()
            ));
            if report.assignments.is_empty() {
                out.push_str("# no ordering-consistent assignment\n");
            }
            for (idx, a) in report.assignments.iter().enumerate() {
                let gap = a.reference_gap.map(fmt6).unwrap_or_else(|| "none".into());
                out.push_str(&format!(
                    "# assignment={} phases={} high_watch_above_pi={} reference_gap={}\n",
                    idx + 1,
                    join6(&a.phases),
                    a.high_watch_above_pi,
                    gap
                ));
            }
            if let Some(v) = table.verbal() {
                out.push_str(&format!(
                    "# verbal watch={} reappraise={} suppress={}\n",
                    fmt6(v.watch),
                    fmt6(v.reappraise),
                    fmt6(v.suppress)
                ));
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = report
                .rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let selected_phi = selected.map(|a| a.phases[i]);
                    json!({
                        "strategy": row.strategy.label(),
                        "emotion": row.emotion.label(),
                        "observed_p": round6(row.observed_p),
                        "branches": row.fit.branches.iter().map(|&b| round6(b)).collect::<Vec<_>>(),
                        "selected_phi": selected_phi.map(round6),
                        "reference_phase": row.reference_phase.map(round6),
                        "abs_diff": match (selected_phi, row.reference_phase) {
                            (Some(phi), Some(reference)) => Some(round6((phi - reference).abs())),
                            _ => None,
                        },
                    })
                })
                .collect();
            pretty(json!({
                "command": "table",
                "n": table.n(),
                "j": table.j(),
                "combinations": report.combinations,
                "rows": rows,
                "assignments": report
                    .assignments
                    .iter()
                    .map(|a| {
                        json!({
                            "phases": a.phases.iter().map(|&p| round6(p)).collect::<Vec<_>>(),
                            "high_watch_above_pi": a.high_watch_above_pi,
                            "reference_gap": a.reference_gap.map(round6),
                        })
                    })
                    .collect::<Vec<_>>(),
                "verbal": table.verbal().map(|v| {
                    json!({
                        "watch": round6(v.watch),
                        "reappraise": round6(v.reappraise),
                        "suppress": round6(v.suppress),
                    })
                }),
            }))
        }
    };

    let exit_code = if selected.is_some() { 0 } else { 5 };
    Ok(CommandOutput { stdout, exit_code })
}

pub fn experiment(args: ExperimentArgs) -> Result<CommandOutput, CliError> {
    if args.include_verbal {
        return Err(usage(
            "--include-verbal is reserved for the verbal-material model and not implemented yet",
        ));
    }
    if args.trials_per_cell == Some(0) {
        return Err(usage("--trials-per-cell must be at least 1"));
    }
    let table = load_table(args.fixture.as_ref())?;
    let run = simulate_participants(&table, args.trials_per_cell, args.seed)?;

    let trials_label = args
        .trials_per_cell
        .map(|t| t.to_string())
        .unwrap_or_else(|| "default".into());

    let stdout = match args.format {
        Format::Csv => {
            let mut out =
                String::from("strategy,emotion,phi,model_p,trials,successes,frequency,abs_error\n");
            for cell in &run.cells {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    cell.strategy,
                    cell.emotion,
                    fmt6(cell.phase),
                    fmt6(cell.model_p),
                    cell.trials,
                    cell.successes,
                    fmt6(cell.frequency()),
                    fmt6((cell.frequency() - cell.model_p).abs())
                ));
            }
            out.push_str(&format!(
                "# seed={} trials_per_cell={} phase_source={} n={} j={}\n",
                run.seed,
                trials_label,
                run.phase_source.label(),
                table.n(),
                table.j()
            ));
            out
        }
        Format::Json => pretty(json!({
            "command": "experiment",
            "seed": run.seed,
            "trials_per_cell": args.trials_per_cell,
            "phase_source": run.phase_source.label(),
            "n": table.n(),
            "j": table.j(),
            "rows": run
                .cells
                .iter()
                .map(|cell| {
                    json!({
                        "strategy": cell.strategy.label(),
                        "emotion": cell.emotion.label(),
                        "phi": round6(cell.phase),
                        "model_p": round6(cell.model_p),
                        "trials": cell.trials,
                        "successes": cell.successes,
                        "frequency": round6(cell.frequency()),
                        "abs_error": round6((cell.frequency() - cell.model_p).abs()),
                    })
                })
                .collect::<Vec<_>>(),
        })),
    };
    Ok(CommandOutput::ok(stdout))
}

fn pretty(doc: serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable value");
    text.push('\n');
    text
}
