use std::collections::HashSet;
use std::path::{Path, PathBuf};

use super::config::RunConfig;
use super::feeder::load_network;
use super::report::{
    compromise_text, ens_csv, front_svg, generations_csv, losses_csv, pareto_csv, pareto_json, voltages_csv,
};
use super::IoError;
use crate::moo::{dominates, evolve};
use crate::network::Network;
use crate::placement::{compromise_index, EvaluatedPlan, PlacementProblem};
use crate::plan::SwitchPlan;
use crate::power_flow::{solve_power_flow, Loads};
use crate::reliability::ens_objective;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveOptions {
    /// Replaces the configured GA seed.
    pub seed: Option<u64>,
    /// Also enumerate the exact front when the instance is small enough.
    pub oracle: bool,
    /// Evaluation threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveSummary {
    pub front: Vec<EvaluatedPlan>,
    pub compromise: usize,
    /// Exact front, when enumerated.
    pub true_front: Option<Vec<EvaluatedPlan>>,
    /// Indices into `front` of members some exact-front plan dominates.
    pub dominated_by_exact: Vec<usize>,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn data_err(e: impl std::fmt::Display) -> IoError {
    IoError::Data(e.to_string())
}

fn problem<'a>(cfg: &RunConfig, net: &'a Network) -> Result<PlacementProblem<'a>, IoError> {
    let cost = cfg.cost.resolve(net).map_err(data_err)?;
    PlacementProblem::new(net, cost, cfg.reliability.clone(), &cfg.powerflow).map_err(data_err)
}

/// Writes every file or none: on the first failure the files already
/// written are removed.
fn write_outputs(dir: &Path, files: Vec<(&str, String)>) -> Result<Vec<PathBuf>, IoError> {
    std::fs::create_dir_all(dir).map_err(|source| IoError::Write { path: dir.into(), source })?;
    let mut written = Vec::new();
    for (name, content) in files {
        let path = dir.join(name);
        if let Err(source) = std::fs::write(&path, content) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(IoError::Write { path, source });
        }
        written.push(path);
    }
    Ok(written)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, IoError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(IoError::Usage("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| IoError::Solver(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn objectives(plans: &[EvaluatedPlan]) -> Vec<[f64; 2]> {
    plans.iter().map(EvaluatedPlan::objectives).collect()
}

/// Optimizes the configured feeder and writes `pareto.csv`, `pareto.json`,
/// `compromise.txt`, `generations.csv`, `ens.csv` and `front.svg`
/// (plus `true_front.csv` with the oracle).
pub fn run_solve(cfg: &RunConfig, opts: &SolveOptions) -> Result<SolveSummary, IoError> {
    cfg.check()?;
    let net = load_network(&cfg.feeder_file)?;
    let problem = problem(cfg, &net)?;
    let mut ga = cfg.ga.clone();
    if let Some(seed) = opts.seed {
        ga.seed = seed;
    }
    let mut warnings = Vec::new();
    if let Some(e) = problem.power_flow_error() {
        warnings.push(format!("{e}; every plan carries the penalty objectives"));
    }

    let (front, history) = if problem.num_bits() == 0 {
        // Nothing to decide: the empty plan is the whole front.
        warnings.push("feeder has no candidates; the empty plan is the only solution".into());
        let only = problem.evaluate_plan(&SwitchPlan::empty(&net)).map_err(data_err)?;
        (vec![only], Vec::new())
    } else {
        let result = with_threads(opts.threads, || evolve(&problem, &ga))?
            .map_err(|e| IoError::Solver(e.to_string()))?;
        let front = result
            .front
            .iter()
            .map(|ind| problem.decode(&ind.genotype).and_then(|p| problem.evaluate_plan(&p)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| IoError::Solver(e.to_string()))?;
        (front, result.history)
    };
    let compromise = compromise_index(&objectives(&front))
        .ok_or_else(|| IoError::Solver("optimizer returned an empty front".into()))?;

    let mut true_front = None;
    if opts.oracle {
        if problem.num_bits() <= cfg.oracle_max_bits {
            let exact = with_threads(opts.threads, || problem.exhaustive_pareto(cfg.oracle_max_bits))?
                .map_err(|e| IoError::Solver(e.to_string()))?;
            true_front = Some(exact);
        } else {
            warnings.push(format!(
                "oracle skipped: {} decision bits exceed the cap of {}",
                problem.num_bits(),
                cfg.oracle_max_bits
            ));
        }
    }

    let front_obj = objectives(&front);
    let truth_obj = true_front.as_deref().map(objectives);
    let dominated_by_exact: Vec<usize> = match &truth_obj {
        Some(truth) => {
            (0..front.len()).filter(|&i| truth.iter().any(|t| dominates(t, &front_obj[i]))).collect()
        }
        None => Vec::new(),
    };
    if !dominated_by_exact.is_empty() {
        warnings.push(format!(
            "{} front members are dominated by the exact front (pareto.csv index {:?})",
            dominated_by_exact.len(),
            dominated_by_exact
        ));
    }
    let mut files = vec![
        ("pareto.csv", pareto_csv(&front)),
        ("pareto.json", pareto_json(&net, &front)),
        ("compromise.txt", compromise_text(&net, &front[compromise])),
        ("generations.csv", generations_csv(&history)),
        ("ens.csv", ens_csv(&front[compromise].reliability)),
        ("front.svg", front_svg(&front_obj, Some(compromise), truth_obj.as_deref())),
    ];
    if let Some(exact) = &true_front {
        files.push(("true_front.csv", pareto_csv(exact)));
    }
    let files = write_outputs(&cfg.output_dir, files)?;
    Ok(SolveSummary { front, compromise, true_front, dominated_by_exact, files, warnings })
}

/// Mean-load flow: writes `voltages.csv` and `losses.csv`.
pub fn run_powerflow(cfg: &RunConfig) -> Result<Vec<PathBuf>, IoError> {
    cfg.check()?;
    let net = load_network(&cfg.feeder_file)?;
    let state = solve_power_flow(&net, &Loads::mean(&net), &cfg.powerflow)
        .map_err(|e| IoError::Solver(e.to_string()))?;
    if !state.converged {
        return Err(IoError::Solver(format!(
            "load flow did not converge in {} iterations",
            state.iterations
        )));
    }
    write_outputs(
        &cfg.output_dir,
        vec![("voltages.csv", voltages_csv(&net, &state)), ("losses.csv", losses_csv(&net, &state))],
    )
}

/// Per-load-point indices of one plan: writes `ens.csv`.
pub fn run_reliability(cfg: &RunConfig, plan: &SwitchPlan) -> Result<Vec<PathBuf>, IoError> {
    cfg.check()?;
    let net = load_network(&cfg.feeder_file)?;
    plan.check(&net).map_err(|e| IoError::Usage(e.to_string()))?;
    let result = ens_objective(&net, plan, &cfg.reliability).map_err(data_err)?;
    write_outputs(&cfg.output_dir, vec![("ens.csv", ens_csv(&result))])
}

/// Exact front by enumeration: writes `true_front.csv`.
pub fn run_oracle(cfg: &RunConfig, max_bits: Option<usize>) -> Result<Vec<EvaluatedPlan>, IoError> {
    cfg.check()?;
    let net = load_network(&cfg.feeder_file)?;
    let problem = problem(cfg, &net)?;
    let cap = max_bits.unwrap_or(cfg.oracle_max_bits);
    if problem.num_bits() > cap {
        return Err(IoError::Usage(format!(
            "instance has {} decision bits, enumeration cap is {cap}",
            problem.num_bits()
        )));
    }
    let front = problem.exhaustive_pareto(cap).map_err(|e| IoError::Solver(e.to_string()))?;
    write_outputs(&cfg.output_dir, vec![("true_front.csv", pareto_csv(&front))])?;
    Ok(front)
}

/// Loads and validates a feeder file, returning a one-line description.
pub fn run_validate(path: &Path) -> Result<String, IoError> {
    let net = load_network(path)?;
    Ok(format!(
        "{}: {} feeders, {} nodes, {} branches, {} transformers, {} load points, {} switch and {} maneuver candidates",
        if net.name().is_empty() { "feeder" } else { net.name() },
        net.feeders().len(),
        net.nodes().len(),
        net.branches().len(),
        net.transformers().len(),
        net.load_points().len(),
        net.num_switch_sites(),
        net.num_maneuver_sites()
    ))
}

/// Share of the exact front's objective vectors present in `found`.
pub fn front_recall(found: &[[f64; 2]], exact: &[[f64; 2]]) -> f64 {
    let key = |o: &[f64; 2]| [o[0].to_bits(), o[1].to_bits()];
    let found: HashSet<[u64; 2]> = found.iter().map(key).collect();
    let exact: HashSet<[u64; 2]> = exact.iter().map(key).collect();
    if exact.is_empty() {
        return 1.0;
    }
    exact.intersection(&found).count() as f64 / exact.len() as f64
}
