//! Python bindings: `import switchplace`.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use switchplace::io::{self, IoError, RunConfig, SolveOptions};
use switchplace::moo;
use switchplace::placement::{compromise_index, PlacementProblem};
use switchplace::{Loads, PowerFlowSettings, ReliabilityParams, SwitchPlan};

fn io_err(e: IoError) -> PyErr {
    match e {
        IoError::Read { .. } | IoError::Write { .. } => PyOSError::new_err(e.to_string()),
        IoError::Solver(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Omitted bit strings mean nothing of that kind is installed.
fn plan_from_bits(
    net: &switchplace::Network,
    switches: Option<&str>,
    maneuvers: Option<&str>,
) -> PyResult<SwitchPlan> {
    let zeros = |n: usize| "0".repeat(n);
    let s = switches.map_or_else(|| zeros(net.num_switch_sites()), String::from);
    let m = maneuvers.map_or_else(|| zeros(net.num_maneuver_sites()), String::from);
    let plan = SwitchPlan::from_bitstrings(&s, &m).map_err(value_err)?;
    plan.check(net).map_err(value_err)?;
    Ok(plan)
}

/// A validated radial feeder.
#[pyclass(frozen, name = "Network")]
struct PyNetwork {
    inner: switchplace::Network,
}

#[pymethods]
impl PyNetwork {
    /// Reads and validates a feeder JSON file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: io::load_network(&path).map_err(io_err)? })
    }

    /// Parses and validates feeder JSON text.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: io::parse_network(text, "<string>".as_ref()).map_err(io_err)? })
    }

    fn to_json(&self) -> String {
        io::to_feeder_json(&self.inner)
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn node_ids(&self) -> Vec<String> {
        self.inner.nodes().iter().map(|n| n.id.clone()).collect()
    }

    #[getter]
    fn branch_ids(&self) -> Vec<String> {
        self.inner.branches().iter().map(|b| b.id.clone()).collect()
    }

    #[getter]
    fn load_point_ids(&self) -> Vec<String> {
        self.inner.load_points().iter().map(|l| l.id.clone()).collect()
    }

    /// Switch candidate ids in decision order.
    #[getter]
    fn switch_candidates(&self) -> Vec<String> {
        let c = self.inner.candidates();
        self.inner.switch_candidates().iter().map(|&i| c[i].id.clone()).collect()
    }

    /// Maneuver candidate ids in decision order.
    #[getter]
    fn maneuver_candidates(&self) -> Vec<String> {
        let c = self.inner.candidates();
        self.inner.maneuver_candidates().iter().map(|&i| c[i].id.clone()).collect()
    }

    #[getter]
    fn num_feeders(&self) -> usize {
        self.inner.feeders().len()
    }

    /// Branch ids from `node` up to its source.
    fn path_to_source(&self, node: &str) -> PyResult<Vec<String>> {
        let path = self.inner.path_to_source(node).map_err(value_err)?;
        Ok(path.into_iter().map(String::from).collect())
    }

    /// Load point ids fed through `branch`.
    fn downstream_load_points(&self, branch: &str) -> PyResult<Vec<String>> {
        let lps = self.inner.downstream_load_points(branch).map_err(value_err)?;
        Ok(lps.into_iter().map(String::from).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Network({:?}, nodes={}, branches={}, load_points={}, switch_candidates={}, maneuver_candidates={})",
            self.inner.name(),
            self.inner.nodes().len(),
            self.inner.branches().len(),
            self.inner.load_points().len(),
            self.inner.num_switch_sites(),
            self.inner.num_maneuver_sites()
        )
    }
}

/// A run configuration loaded from TOML.
#[pyclass(name = "Config", skip_from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: RunConfig,
}

#[pymethods]
impl PyConfig {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: io::load_config(&path).map_err(io_err)? })
    }

    /// Parses TOML text; relative paths resolve against `base_dir`.
    #[staticmethod]
    #[pyo3(signature = (text, base_dir = PathBuf::from(".")))]
    fn parse(text: &str, base_dir: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: io::parse_config(text, &base_dir).map_err(io_err)? })
    }

    #[getter]
    fn feeder_file(&self) -> PathBuf {
        self.inner.feeder_file.clone()
    }

    #[getter]
    fn output_dir(&self) -> PathBuf {
        self.inner.output_dir.clone()
    }

    #[setter]
    fn set_output_dir(&mut self, dir: PathBuf) {
        self.inner.output_dir = dir;
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.ga.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.ga.seed = seed;
    }

    #[getter]
    fn population_size(&self) -> usize {
        self.inner.ga.population_size
    }

    #[setter]
    fn set_population_size(&mut self, n: usize) {
        self.inner.ga.population_size = n;
    }

    #[getter]
    fn generations(&self) -> usize {
        self.inner.ga.generations
    }

    #[setter]
    fn set_generations(&mut self, n: usize) {
        self.inner.ga.generations = n;
    }

    fn network(&self) -> PyResult<PyNetwork> {
        PyNetwork::load(self.inner.feeder_file.clone())
    }
}

/// One evaluated plan.
#[pyclass(frozen, name = "EvaluatedPlan")]
struct PyPlan {
    inner: switchplace::EvaluatedPlan,
}

#[pymethods]
impl PyPlan {
    #[getter]
    fn switches(&self) -> String {
        self.inner.plan.switch_bits()
    }

    #[getter]
    fn maneuvers(&self) -> String {
        self.inner.plan.maneuver_bits()
    }

    #[getter]
    fn f1(&self) -> f64 {
        self.inner.f1
    }

    #[getter]
    fn f2(&self) -> f64 {
        self.inner.f2
    }

    #[getter]
    fn penalized(&self) -> bool {
        self.inner.penalized
    }

    #[getter]
    fn total_ens(&self) -> f64 {
        self.inner.reliability.total_ens
    }

    /// `(capital, maintenance_pw, loss_pw)`, or `None` when penalized.
    #[getter]
    fn cost(&self) -> Option<(f64, f64, f64)> {
        self.inner.cost.as_ref().map(|c| (c.capital, c.maintenance_pw, c.loss_pw))
    }

    /// `(id, lambda, U, r, ENS, cost)` per load point.
    #[getter]
    fn load_points(&self) -> Vec<(String, f64, f64, f64, f64, f64)> {
        self.inner
            .reliability
            .load_points
            .iter()
            .map(|l| {
                let r = l.indices;
                (l.id.clone(), r.lambda_s, r.u_s, r.r_s, r.ens, l.cost_contribution)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("EvaluatedPlan({}, f1={}, f2={})", self.inner.plan, self.inner.f1, self.inner.f2)
    }
}

fn wrap(plans: Vec<switchplace::EvaluatedPlan>) -> Vec<PyPlan> {
    plans.into_iter().map(|inner| PyPlan { inner }).collect()
}

fn problem<'a>(cfg: &RunConfig, net: &'a switchplace::Network) -> PyResult<PlacementProblem<'a>> {
    let cost = cfg.cost.resolve(net).map_err(value_err)?;
    PlacementProblem::new(net, cost, cfg.reliability.clone(), &cfg.powerflow).map_err(value_err)
}

/// Evaluates one plan given as 0/1 strings in candidate order.
#[pyfunction]
#[pyo3(signature = (config, switches = None, maneuvers = None))]
fn evaluate(config: &PyConfig, switches: Option<&str>, maneuvers: Option<&str>) -> PyResult<PyPlan> {
    let net = io::load_network(&config.inner.feeder_file).map_err(io_err)?;
    let plan = plan_from_bits(&net, switches, maneuvers)?;
    let inner = problem(&config.inner, &net)?.evaluate_plan(&plan).map_err(value_err)?;
    Ok(PyPlan { inner })
}

/// Result of [`solve`].
#[pyclass(frozen, name = "SolveResult")]
struct PySolveResult {
    #[pyo3(get)]
    front: Vec<Py<PyPlan>>,
    #[pyo3(get)]
    compromise: usize,
    #[pyo3(get)]
    true_front: Option<Vec<Py<PyPlan>>>,
    #[pyo3(get)]
    files: Vec<PathBuf>,
    #[pyo3(get)]
    warnings: Vec<String>,
}

fn to_py(py: Python<'_>, plans: Vec<switchplace::EvaluatedPlan>) -> PyResult<Vec<Py<PyPlan>>> {
    wrap(plans).into_iter().map(|p| Py::new(py, p)).collect()
}

/// Runs the optimizer and writes the reports to the configured output directory.
#[pyfunction]
#[pyo3(signature = (config, seed = None, oracle = false, threads = None))]
fn solve(
    py: Python<'_>,
    config: &PyConfig,
    seed: Option<u64>,
    oracle: bool,
    threads: Option<usize>,
) -> PyResult<PySolveResult> {
    let cfg = config.inner.clone();
    let summary =
        py.detach(move || io::run_solve(&cfg, &SolveOptions { seed, oracle, threads })).map_err(io_err)?;
    Ok(PySolveResult {
        front: to_py(py, summary.front)?,
        compromise: summary.compromise,
        true_front: summary.true_front.map(|t| to_py(py, t)).transpose()?,
        files: summary.files,
        warnings: summary.warnings,
    })
}

/// Exact Pareto front by enumeration.
#[pyfunction]
#[pyo3(signature = (config, max_bits = 16))]
fn exhaustive_front(py: Python<'_>, config: &PyConfig, max_bits: usize) -> PyResult<Vec<PyPlan>> {
    let cfg = config.inner.clone();
    let front = py.detach(move || -> PyResult<_> {
        let net = io::load_network(&cfg.feeder_file).map_err(io_err)?;
        problem(&cfg, &net)?.exhaustive_pareto(max_bits).map_err(value_err)
    })?;
    Ok(wrap(front))
}

/// Mean-load flow. Returns `(magnitudes_pu, angles_deg, branch_loss_kw, iterations, converged)`.
#[pyfunction]
#[pyo3(signature = (network, tolerance = 1e-6, max_iterations = 100))]
#[allow(clippy::type_complexity)]
fn powerflow(
    network: &PyNetwork,
    tolerance: f64,
    max_iterations: usize,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>, usize, bool)> {
    let settings = PowerFlowSettings { tolerance, max_iterations, ..Default::default() };
    let net = &network.inner;
    let state = switchplace::solve_power_flow(net, &Loads::mean(net), &settings).map_err(value_err)?;
    Ok((
        state.voltages.iter().map(|v| v.norm()).collect(),
        state.voltages.iter().map(|v| v.arg().to_degrees()).collect(),
        state.branch_loss_active.clone(),
        state.iterations,
        state.converged,
    ))
}

/// Per-load-point `(id, lambda, U, r, ENS, cost)` and the total cost of one plan.
#[pyfunction]
#[pyo3(signature = (network, switches = None, maneuvers = None, remote_switch_time = None, include_maneuver_backfeed = true))]
#[allow(clippy::type_complexity)]
fn reliability(
    network: &PyNetwork,
    switches: Option<&str>,
    maneuvers: Option<&str>,
    remote_switch_time: Option<f64>,
    include_maneuver_backfeed: bool,
) -> PyResult<(Vec<(String, f64, f64, f64, f64, f64)>, f64)> {
    let mut params = ReliabilityParams { include_maneuver_backfeed, ..Default::default() };
    if let Some(t) = remote_switch_time {
        params.remote_switch_time = t;
    }
    let plan = plan_from_bits(&network.inner, switches, maneuvers)?;
    let res = switchplace::ens_objective(&network.inner, &plan, &params).map_err(value_err)?;
    let rows = res
        .load_points
        .iter()
        .map(|l| {
            let r = l.indices;
            (l.id.clone(), r.lambda_s, r.u_s, r.r_s, r.ens, l.cost_contribution)
        })
        .collect();
    Ok((rows, res.f2))
}

#[pyfunction]
fn present_worth_factor(inflation: f64, interest: f64) -> PyResult<f64> {
    switchplace::present_worth_factor(inflation, interest).map_err(value_err)
}

#[pyfunction]
fn sbx_beta(u: f64, eta_c: f64) -> f64 {
    moo::sbx_beta(u, eta_c)
}

#[pyfunction]
fn mutation_delta(r: f64, eta_m: f64) -> f64 {
    moo::mutation_delta(r, eta_m)
}

fn same_len(a: usize, b: usize, what: &str) -> PyResult<()> {
    if a == b {
        Ok(())
    } else {
        Err(PyValueError::new_err(format!("{what}: lengths {a} and {b} differ")))
    }
}

/// SBX children before clipping, one draw per gene.
#[pyfunction]
fn sbx_children(p1: Vec<f64>, p2: Vec<f64>, eta_c: f64, draws: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
    same_len(p1.len(), p2.len(), "parents")?;
    same_len(p1.len(), draws.len(), "draws")?;
    Ok(moo::sbx_children(&p1, &p2, eta_c, &draws))
}

#[pyfunction]
fn polynomial_mutation(
    x: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    eta_m: f64,
    draws: Vec<f64>,
) -> PyResult<Vec<f64>> {
    same_len(x.len(), bounds.len(), "bounds")?;
    same_len(x.len(), draws.len(), "draws")?;
    Ok(moo::polynomial_mutation(&x, &bounds, eta_m, &draws))
}

fn rectangular(points: &[Vec<f64>]) -> PyResult<()> {
    match points.first() {
        Some(p) if points.iter().any(|q| q.len() != p.len()) => {
            Err(PyValueError::new_err("points have different numbers of objectives"))
        }
        _ => Ok(()),
    }
}

/// Fronts as lists of indices, best first.
#[pyfunction]
fn fast_non_dominated_sort(points: Vec<Vec<f64>>) -> PyResult<Vec<Vec<usize>>> {
    rectangular(&points)?;
    Ok(moo::fast_non_dominated_sort(&points))
}

#[pyfunction]
fn crowding_distance(front: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    rectangular(&front)?;
    Ok(moo::crowding_distance(&front))
}

#[pyfunction]
fn hypervolume(points: Vec<Vec<f64>>, reference: Vec<f64>) -> PyResult<f64> {
    rectangular(&points)?;
    if let Some(p) = points.first() {
        same_len(p.len(), reference.len(), "reference")?;
    }
    Ok(moo::hypervolume(&points, &reference))
}

/// Index of the max-min membership compromise of a two-objective front.
#[pyfunction]
fn compromise(front: Vec<(f64, f64)>) -> Option<usize> {
    let obj: Vec<[f64; 2]> = front.into_iter().map(|(a, b)| [a, b]).collect();
    compromise_index(&obj)
}

#[pymodule]
#[pyo3(name = "switchplace")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyNetwork>()?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyPlan>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_front, m)?)?;
    m.add_function(wrap_pyfunction!(powerflow, m)?)?;
    m.add_function(wrap_pyfunction!(reliability, m)?)?;
    m.add_function(wrap_pyfunction!(present_worth_factor, m)?)?;
    m.add_function(wrap_pyfunction!(sbx_beta, m)?)?;
    m.add_function(wrap_pyfunction!(mutation_delta, m)?)?;
    m.add_function(wrap_pyfunction!(sbx_children, m)?)?;
    m.add_function(wrap_pyfunction!(polynomial_mutation, m)?)?;
    m.add_function(wrap_pyfunction!(fast_non_dominated_sort, m)?)?;
    m.add_function(wrap_pyfunction!(crowding_distance, m)?)?;
    m.add_function(wrap_pyfunction!(hypervolume, m)?)?;
    m.add_function(wrap_pyfunction!(compromise, m)?)?;
    Ok(())
}
