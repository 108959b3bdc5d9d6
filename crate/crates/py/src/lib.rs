//! Python bindings. Node ids crossing the boundary are internal indices
//! `0..node_count`; `Graph.external_id` and `Graph.node` translate.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use sensorplace::eval::{self, Method};
use sensorplace::model::{self, UnknownNodePolicy};
use sensorplace::samplers::{self, BiasMode, RestartPolicy, SamplerParams};
use sensorplace::selectors::{self, FrameworkConfig, UniformRounds};
use sensorplace::{rng, sampling_math, synthgen, Category, Error, NodeId, RewardEngine};

fn py_err(e: Error) -> PyErr {
    match e.category() {
        Category::Parameter => PyValueError::new_err(e.to_string()),
        Category::Input => PyIOError::new_err(e.to_string()),
        Category::Runtime => PyRuntimeError::new_err(e.to_string()),
    }
}

fn ids(nodes: &[u32]) -> Vec<NodeId> {
    nodes.iter().map(|&u| NodeId(u)).collect()
}

fn raw(nodes: &[NodeId]) -> Vec<u32> {
    nodes.iter().map(|u| u.0).collect()
}

fn bias(name: &str) -> PyResult<BiasMode> {
    match name {
        "uniform" => Ok(BiasMode::Uniform),
        "degree" => Ok(BiasMode::Degree),
        "activity" => Ok(BiasMode::Activity),
        _ => Err(PyValueError::new_err(format!("unknown bias {name:?}"))),
    }
}

#[pyclass(name = "Graph", frozen)]
struct PyGraph(model::Graph);

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (node_count, edges, directed = false))]
    fn new(node_count: usize, edges: Vec<(u32, u32)>, directed: bool) -> PyResult<Self> {
        model::Graph::from_edges(node_count, edges, directed).map(PyGraph).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (edge_path, attr_path = None, directed = false))]
    fn load(edge_path: PathBuf, attr_path: Option<PathBuf>, directed: bool) -> PyResult<Self> {
        let (g, _) = model::load_graph(&edge_path, attr_path.as_deref(), directed).map_err(py_err)?;
        Ok(PyGraph(g))
    }

    /// Copy of the graph with per-node activity replaced.
    fn with_activity(&self, activity: Vec<f64>) -> PyResult<Self> {
        self.0.clone().with_activity(activity).map(PyGraph).map_err(py_err)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    fn degree(&self, u: u32) -> PyResult<usize> {
        self.check(u)?;
        Ok(self.0.degree(NodeId(u)))
    }

    fn neighbors(&self, u: u32) -> PyResult<Vec<u32>> {
        self.check(u)?;
        Ok(raw(self.0.neighbors(NodeId(u))))
    }

    fn activity(&self, u: u32) -> PyResult<f64> {
        self.check(u)?;
        Ok(self.0.activity(NodeId(u)))
    }

    fn external_id(&self, u: u32) -> PyResult<u64> {
        self.check(u)?;
        Ok(self.0.external_id(NodeId(u)))
    }

    fn node(&self, external: u64) -> Option<u32> {
        self.0.node(external).map(|u| u.0)
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.0.edges().map(|(u, v)| (u.0, v.0)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={})", self.0.node_count(), self.0.edge_count())
    }
}

impl PyGraph {
    fn check(&self, u: u32) -> PyResult<()> {
        if self.0.contains(NodeId(u)) {
            Ok(())
        } else {
            Err(py_err(Error::NodeOutOfRange(u)))
        }
    }
}

#[pyclass(name = "CascadeLog", frozen)]
struct PyCascadeLog(model::CascadeLog);

#[pymethods]
impl PyCascadeLog {
    /// `records` are `(cascade, node, tick)` triples.
    #[new]
    fn new(node_count: usize, records: Vec<(u64, u32, u64)>) -> PyResult<Self> {
        if let Some(&(_, u, _)) = records.iter().find(|r| r.1 as usize >= node_count) {
            return Err(py_err(Error::NodeOutOfRange(u)));
        }
        let records = records.into_iter().map(|(c, u, t)| (c, NodeId(u), t));
        Ok(PyCascadeLog(model::CascadeLog::from_records(node_count, records)))
    }

    #[staticmethod]
    #[pyo3(signature = (path, graph, drop_unknown = false))]
    fn load(path: PathBuf, graph: &PyGraph, drop_unknown: bool) -> PyResult<Self> {
        let policy = if drop_unknown { UnknownNodePolicy::Drop } else { UnknownNodePolicy::Reject };
        let (log, _) = model::load_cascades(&path, &graph.0, policy).map_err(py_err)?;
        Ok(PyCascadeLog(log))
    }

    #[getter]
    fn cascade_count(&self) -> usize {
        self.0.cascade_count()
    }

    #[getter]
    fn event_count(&self) -> usize {
        self.0.event_count()
    }

    /// `(size, start, peak_time)` of the cascade with external id `cascade`.
    fn stats(&self, cascade: u64, bucket_width: u64) -> PyResult<(usize, u64, u64)> {
        let s = self.0.stats(cascade, bucket_width).map_err(py_err)?;
        Ok((s.size, s.start, s.peak_time))
    }

    /// `(cascade_index, tick)` participations of node `u`.
    fn participations(&self, u: u32) -> PyResult<Vec<(u32, u64)>> {
        if u as usize >= self.0.node_count() {
            return Err(py_err(Error::NodeOutOfRange(u)));
        }
        Ok(self.0.participations(NodeId(u)).iter().map(|&(c, t)| (c.0, t)).collect())
    }

    fn __repr__(&self) -> String {
        format!("CascadeLog(cascades={}, events={})", self.0.cascade_count(), self.0.event_count())
    }
}

#[pyclass(name = "Selection", frozen, get_all)]
struct PySelection {
    sensors: Vec<u32>,
    per_round_gain: Vec<f64>,
    reward: f64,
    gain_evals: u64,
    stopped_early: bool,
    candidates: Option<Vec<u32>>,
}

#[pymethods]
impl PySelection {
    fn __repr__(&self) -> String {
        format!("Selection(sensors={:?}, reward={}, gain_evals={})", self.sensors, self.reward, self.gain_evals)
    }
}

impl From<selectors::SelectionResult> for PySelection {
    fn from(r: selectors::SelectionResult) -> Self {
        PySelection {
            stopped_early: r.stopped_early,
            sensors: raw(&r.sensors),
            per_round_gain: r.per_round_gain,
            reward: r.reward,
            gain_evals: r.gain_evals,
            candidates: None,
        }
    }
}

fn universe_of(log: &model::CascadeLog, universe: Option<Vec<u32>>) -> Vec<NodeId> {
    universe.map_or_else(|| selectors::all_nodes(log.node_count()), |u| ids(&u))
}

#[pyfunction]
fn reward(log: &PyCascadeLog, sensors: Vec<u32>) -> PyResult<f64> {
    let sensors = ids(&sensors);
    if let Some(u) = sensors.iter().find(|u| u.index() >= log.0.node_count()) {
        return Err(py_err(Error::NodeOutOfRange(u.0)));
    }
    Ok(RewardEngine::new(&log.0).evaluate(&sensors))
}

#[pyfunction]
fn marginal_gain(log: &PyCascadeLog, sensors: Vec<u32>, s: u32) -> PyResult<f64> {
    let engine = RewardEngine::new(&log.0);
    let mut state = engine.state();
    for u in ids(&sensors) {
        engine.commit(&mut state, u).map_err(py_err)?;
    }
    engine.marginal_gain(&state, NodeId(s)).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (log, budget, universe = None))]
fn exact_greedy(log: &PyCascadeLog, budget: usize, universe: Option<Vec<u32>>) -> PyResult<PySelection> {
    let engine = RewardEngine::new(&log.0);
    selectors::exact_greedy(&engine, &universe_of(&log.0, universe), budget)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (log, budget, universe = None))]
fn lazy_greedy(log: &PyCascadeLog, budget: usize, universe: Option<Vec<u32>>) -> PyResult<PySelection> {
    let engine = RewardEngine::new(&log.0);
    selectors::lazy_greedy(&engine, &universe_of(&log.0, universe), budget)
        .map(Into::into)
        .map_err(py_err)
}

/// Candidate-set greedy with `size` uniform candidates per round.
#[pyfunction]
#[pyo3(signature = (log, budget, size, memoize = false, seed = 0, universe = None))]
fn framework_greedy(
    log: &PyCascadeLog,
    budget: usize,
    size: usize,
    memoize: bool,
    seed: u64,
    universe: Option<Vec<u32>>,
) -> PyResult<PySelection> {
    let engine = RewardEngine::new(&log.0);
    let mut source = UniformRounds { size };
    let mut rng = rng::seeded(seed);
    let config = FrameworkConfig { memoize, ..FrameworkConfig::default() };
    let run = selectors::framework_greedy(&engine, &universe_of(&log.0, universe), budget, &mut source, config, &mut rng)
        .map_err(py_err)?;
    let mut out = PySelection::from(run.result);
    out.candidates = Some(raw(&run.candidate_union));
    Ok(out)
}

/// `(per_round, lambda, guarantee)` for a replayed sensor sequence.
#[pyfunction]
#[pyo3(signature = (log, sensors, budget, universe = None))]
fn instrument_lambda(
    log: &PyCascadeLog,
    sensors: Vec<u32>,
    budget: usize,
    universe: Option<Vec<u32>>,
) -> PyResult<(Vec<f64>, f64, f64)> {
    let engine = RewardEngine::new(&log.0);
    let t = selectors::instrument_lambda(&engine, &universe_of(&log.0, universe), &ids(&sensors), budget)
        .map_err(py_err)?;
    Ok((t.per_round.clone(), t.lambda(), t.guarantee()))
}

fn sampled(set: samplers::CandidateSet) -> PySelection {
    PySelection {
        sensors: raw(&set.nodes),
        per_round_gain: set.gains.iter().map(|g| g.gain).collect(),
        reward: set.gains.iter().map(|g| g.gain).sum(),
        gain_evals: set.build_cost,
        stopped_early: set.partial,
        candidates: None,
    }
}

/// Candidate set by vertex sampling; `sensors` holds the candidates.
#[pyfunction]
#[pyo3(signature = (graph, log, candidates, bias = "uniform", n_cap = Some(10), seed = 0))]
fn vertex_sample_candidates(
    graph: &PyGraph,
    log: &PyCascadeLog,
    candidates: usize,
    bias: &str,
    n_cap: Option<usize>,
    seed: u64,
) -> PyResult<PySelection> {
    let engine = RewardEngine::new(&log.0);
    let params = SamplerParams { candidates, bias: self::bias(bias)?, n_cap };
    samplers::vertex_sample_candidates(&graph.0, &engine, params, seed)
        .map(sampled)
        .map_err(py_err)
}

/// Candidate set by a biased random walk; `sensors` holds the candidates.
#[pyfunction]
#[pyo3(signature = (graph, log, candidates, bias = "uniform", n_cap = Some(10), seed = 0))]
fn random_walk_candidates(
    graph: &PyGraph,
    log: &PyCascadeLog,
    candidates: usize,
    bias: &str,
    n_cap: Option<usize>,
    seed: u64,
) -> PyResult<PySelection> {
    let engine = RewardEngine::new(&log.0);
    let params = SamplerParams { candidates, bias: self::bias(bias)?, n_cap };
    samplers::random_walk_candidates(&graph.0, &engine, params, seed, RestartPolicy::default())
        .map(sampled)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (graph, budget, seed = 0))]
fn random_baseline(graph: &PyGraph, budget: usize, seed: u64) -> PyResult<Vec<u32>> {
    samplers::random_baseline(&graph.0, budget, seed).map(|s| raw(&s)).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (graph, budget, seed = 0))]
fn friendship_paradox_baseline(graph: &PyGraph, budget: usize, seed: u64) -> PyResult<Vec<u32>> {
    samplers::friendship_paradox_baseline(&graph.0, budget, seed)
        .map(|p| raw(&p.sensors))
        .map_err(py_err)
}

#[pyfunction]
fn prob_overlap_at_least(population: u64, top: u64, draw: u64, k: u64) -> PyResult<f64> {
    sampling_math::prob_overlap_at_least(population, top, draw, k).map_err(py_err)
}

#[pyfunction]
fn prob_at_least_one(alpha: f64, draw: u64) -> f64 {
    sampling_math::prob_at_least_one(alpha, draw)
}

#[pyfunction]
fn min_candidate_size(p: f64, alpha: f64) -> PyResult<u64> {
    sampling_math::min_candidate_size(p, alpha).map(|s| s.xi).map_err(py_err)
}

#[pyfunction]
fn cover_ratio_lower_bound(p: f64) -> PyResult<f64> {
    sampling_math::cover_ratio_lower_bound(p).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (node_count, exponent = 2.5, max_degree = 100, seed = 0))]
fn generate_graph(node_count: usize, exponent: f64, max_degree: usize, seed: u64) -> PyResult<PyGraph> {
    let spec = synthgen::PowerLawSpec { node_count, exponent, max_degree, seed };
    synthgen::generate_graph(&spec).map(PyGraph).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (graph, cascade_count, transmit_prob = 0.1, delay_q = 0.5, horizon = 672, seed = 0))]
fn generate_cascades(
    graph: &PyGraph,
    cascade_count: usize,
    transmit_prob: f64,
    delay_q: f64,
    horizon: u64,
    seed: u64,
) -> PyResult<PyCascadeLog> {
    let spec = synthgen::DiffusionSpec {
        cascade_count,
        seed_rule: synthgen::SeedRule::Uniform,
        transmit_prob,
        delay_q,
        horizon,
        seed,
    };
    synthgen::generate_cascades(&graph.0, &spec).map(PyCascadeLog).map_err(py_err)
}

#[pyfunction]
fn expected_degree_uvs(exponent: f64, max_degree: usize) -> f64 {
    synthgen::DegreeDistribution::power_law(exponent, max_degree).uvs_mean()
}

#[pyfunction]
fn expected_degree_urw(exponent: f64, max_degree: usize) -> f64 {
    synthgen::DegreeDistribution::power_law(exponent, max_degree).urw_mean()
}

/// `(detects, lead_times)`.
#[pyfunction]
#[pyo3(signature = (sensors, log, bucket_width = 1))]
fn detection_metrics(sensors: Vec<u32>, log: &PyCascadeLog, bucket_width: u64) -> PyResult<(usize, Vec<i64>)> {
    let d = eval::detection_metrics(&ids(&sensors), &log.0, bucket_width).map_err(py_err)?;
    Ok((d.detects, d.lead_times))
}

#[pyfunction]
fn measured_cover_ratio(candidates: Vec<u32>, opt: Vec<u32>) -> PyResult<f64> {
    eval::measured_cover_ratio(&ids(&candidates), &ids(&opt)).map_err(py_err)
}

/// Bench rows as CSV text, exact greedy included.
#[pyfunction]
#[pyo3(signature = (graph, log, budget, seeds, framework_p = 0.9))]
fn bench_csv(graph: &PyGraph, log: &PyCascadeLog, budget: usize, seeds: Vec<u64>, framework_p: f64) -> PyResult<String> {
    let framework = Method::framework_for(framework_p, budget, graph.0.node_count(), 1.0).map_err(py_err)?;
    let config = eval::BenchConfig { budget, seeds, bucket_width: 1, jobs: 1, universe: None };
    let out = eval::bench(&graph.0, &log.0, &[Method::Lazy, framework], &config).map_err(py_err)?;
    let mut buf = Vec::new();
    eval::write_csv_to(&mut buf, &out.reports).map_err(py_err)?;
    String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn sensorplace_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyCascadeLog>()?;
    m.add_class::<PySelection>()?;
    m.add_function(wrap_pyfunction!(reward, m)?)?;
    m.add_function(wrap_pyfunction!(marginal_gain, m)?)?;
    m.add_function(wrap_pyfunction!(exact_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(lazy_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(framework_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(instrument_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_sample_candidates, m)?)?;
    m.add_function(wrap_pyfunction!(random_walk_candidates, m)?)?;
    m.add_function(wrap_pyfunction!(random_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(friendship_paradox_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(prob_overlap_at_least, m)?)?;
    m.add_function(wrap_pyfunction!(prob_at_least_one, m)?)?;
    m.add_function(wrap_pyfunction!(min_candidate_size, m)?)?;
    m.add_function(wrap_pyfunction!(cover_ratio_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(generate_graph, m)?)?;
    m.add_function(wrap_pyfunction!(generate_cascades, m)?)?;
    m.add_function(wrap_pyfunction!(expected_degree_uvs, m)?)?;
    m.add_function(wrap_pyfunction!(expected_degree_urw, m)?)?;
    m.add_function(wrap_pyfunction!(detection_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(measured_cover_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(bench_csv, m)?)?;
    Ok(())
}
