//! Command-line front end: `simulate`, `sample-size`, `select`, `evaluate`
//! and `bench`. Every subcommand writes a `manifest.json` echoing its full
//! configuration next to its results.

use std::fmt;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::eval::{
    bench, detection_metrics, prediction_run, regularize_universe, replication_seeds, run_method, write_csv_to,
    BenchConfig, Method, Regularization, RegularizationRule, TemporalSplit,
};
use crate::model::{load_cascades, load_graph, CascadeLog, Graph, NodeId, Tick, UnknownNodePolicy};
use crate::reward::RewardEngine;
use crate::rng::GENERATOR;
use crate::samplers::{BiasMode, DEFAULT_NCAP};
use crate::sampling_math::{cover_ratio_lower_bound_scaled, min_candidate_size, prob_at_least_one};
use crate::selectors::{all_nodes, instrument_lambda};
use crate::synthgen::{
    expected_degree_urw, expected_degree_uvs, fit_exponent, generate_churned, generate_graph,
    generate_cascades, with_participation_activity, ChurnSpec, DiffusionSpec, PowerLawSpec, SeedRule,
};

pub const OUT_ENV: &str = "SENSORPLACE_OUT";

#[derive(Debug, Parser, Serialize)]
#[command(name = "sensorplace", version, about = "Social sensor selection on cascade logs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate a power-law graph and cascades on it.
    Simulate(SimulateArgs),
    /// Candidate count needed to hit the top α% with confidence p.
    SampleSize(SampleSizeArgs),
    /// Choose a sensor set.
    Select(SelectArgs),
    /// Score a sensor set, or run a train/test prediction split.
    Evaluate(EvaluateArgs),
    /// Compare methods over seeded replications.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(long, env = OUT_ENV, default_value = "sensorplace-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnknownNodes {
    Reject,
    Drop,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Edge list, `src<TAB>dst` per line.
    #[arg(long)]
    pub graph: PathBuf,
    /// Node activity, `node<TAB>activity` per line.
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    #[arg(long)]
    pub directed: bool,
    /// Cascade log, `cascade<TAB>node<TAB>tick` per line.
    #[arg(long)]
    pub cascades: PathBuf,
    #[arg(long, value_enum, default_value_t = UnknownNodes::Reject)]
    pub unknown_nodes: UnknownNodes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Greedy,
    Lazy,
    Framework,
    Vs,
    Rw,
    Random,
    Friendship,
}

/// `name[:bias]`, for example `rw:activity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodSpec {
    pub name: MethodName,
    pub bias: Option<BiasMode>,
}

impl FromStr for MethodSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, bias) = match s.split_once(':') {
            Some((n, b)) => (n, Some(b)),
            None => (s, None),
        };
        let name = MethodName::from_str(name, true)?;
        let bias = bias.map(|b| BiasMode::from_str(b, true)).transpose()?;
        if bias.is_some() && !matches!(name, MethodName::Vs | MethodName::Rw) {
            return Err(format!("method {s:?} takes no bias"));
        }
        Ok(MethodSpec { name, bias })
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.name.to_possible_value().expect("no skipped variants");
        match self.bias {
            Some(b) => write!(f, "{}:{}", name.get_name(), b.name()),
            None => write!(f, "{}", name.get_name()),
        }
    }
}

impl Serialize for MethodSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SizingArgs {
    /// Confidence of hitting an acceptable node.
    #[arg(long, default_value_t = 0.9)]
    pub p: f64,
    /// Percentile α in (0, 100]; defaults to 100·B/|V|.
    #[arg(long, conflicts_with = "candidates")]
    pub alpha: Option<f64>,
    /// Explicit candidate count (per round for `framework`).
    #[arg(long, visible_alias = "sample-size")]
    pub candidates: Option<usize>,
    /// Divide the default α by this factor.
    #[arg(long, default_value_t = 1.0)]
    pub shrink: f64,
    /// Sampler bias when the method spec carries none.
    #[arg(long, value_enum, default_value_t = BiasMode::Uniform)]
    pub bias: BiasMode,
    /// Scan only the n most active neighbours.
    #[arg(long, default_value_t = DEFAULT_NCAP, conflicts_with = "no_cap")]
    pub n_cap: usize,
    /// Scan whole neighbourhoods.
    #[arg(long)]
    pub no_cap: bool,
    /// Reuse cached gains across framework rounds.
    #[arg(long)]
    pub memoize: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RegularizeArgs {
    /// Restrict the universe by a participation rule.
    #[arg(long, value_enum, requires = "threshold")]
    pub regularize: Option<RegularizationRule>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Ticks per day.
    #[arg(long, default_value_t = 24)]
    pub day_width: Tick,
}

impl RegularizeArgs {
    fn resolve(&self) -> Option<Regularization> {
        self.regularize.map(|rule| Regularization {
            rule,
            threshold: self.threshold.unwrap_or(0.0),
            day_width: self.day_width,
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 10_000)]
    pub nodes: usize,
    /// Power-law exponent a.
    #[arg(long, default_value_t = 2.5)]
    pub exponent: f64,
    #[arg(long, default_value_t = 100)]
    pub max_degree: usize,
    /// Cascades (per window when churn is on).
    #[arg(long, default_value_t = 10_000)]
    pub cascade_count: usize,
    #[arg(long, value_enum, default_value_t = SeedRule::Uniform)]
    pub seed_rule: SeedRule,
    #[arg(long, default_value_t = 0.1)]
    pub transmit_prob: f64,
    /// Geometric delay success probability.
    #[arg(long, default_value_t = 0.5)]
    pub delay_q: f64,
    /// Last tick of the simulated period.
    #[arg(long, default_value_t = 24 * 7 * 4)]
    pub horizon: Tick,
    /// Ticks per day; a week is seven days.
    #[arg(long, default_value_t = 24)]
    pub day_width: Tick,
    /// Number of churn windows; churn is off when absent.
    #[arg(long)]
    pub churn_windows: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub active_fraction: f64,
    #[arg(long, default_value_t = 0.2)]
    pub churn_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleSizeArgs {
    #[arg(long)]
    pub p: f64,
    /// Percentile α in (0, 100].
    #[arg(long, required_unless_present = "budget", conflicts_with = "budget")]
    pub alpha: Option<f64>,
    /// Derive α = 100·B/(shrink·|V|) instead.
    #[arg(long, requires = "nodes")]
    pub budget: Option<usize>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub shrink: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// `greedy`, `lazy`, `framework`, `vs[:bias]`, `rw[:bias]`, `random`, `friendship`.
    #[arg(long, default_value = "lazy")]
    pub method: MethodSpec,
    #[arg(long)]
    pub budget: usize,
    #[command(flatten)]
    pub sizing: SizingArgs,
    #[command(flatten)]
    pub regularize: RegularizeArgs,
    /// Also record the per-round approximation trace.
    #[arg(long)]
    pub lambda: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `a..b` or a single window `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowRange(pub Range<usize>);

impl FromStr for WindowRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
        match s.split_once("..") {
            Some((a, b)) => Ok(WindowRange(parse(a)?..parse(b)?)),
            None => {
                let a = parse(s)?;
                Ok(WindowRange(a..a + 1))
            }
        }
    }
}

impl Serialize for WindowRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}..{}", self.0.start, self.0.end))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Sensor file: one external node id per line, or a `select` result.
    #[arg(long, conflicts_with = "method", required_unless_present = "method")]
    pub sensors: Option<PathBuf>,
    /// Select on the train windows and score on the test window.
    #[arg(long, requires_all = ["budget", "test_window"])]
    pub method: Option<MethodSpec>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[command(flatten)]
    pub sizing: SizingArgs,
    #[command(flatten)]
    pub regularize: RegularizeArgs,
    /// Peak-time bucket width.
    #[arg(long, default_value_t = 1)]
    pub bucket_width: Tick,
    /// Ticks per window; defaults to seven days.
    #[arg(long)]
    pub window_width: Option<Tick>,
    /// Train windows, `a..b`; defaults to every window before the test one.
    #[arg(long, requires = "test_window")]
    pub train_windows: Option<WindowRange>,
    #[arg(long)]
    pub test_window: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated method specs; exact greedy is always added.
    #[arg(long, value_delimiter = ',', default_value = "lazy,framework")]
    pub methods: Vec<MethodSpec>,
    #[arg(long)]
    pub budget: usize,
    #[command(flatten)]
    pub sizing: SizingArgs,
    #[command(flatten)]
    pub regularize: RegularizeArgs,
    #[arg(long, default_value_t = 10)]
    pub replications: usize,
    /// Base seed; replication seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub bucket_width: Tick,
    /// Worker threads for replications.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl SizingArgs {
    fn size(&self, budget: usize, nodes: usize) -> Result<usize> {
        if let Some(c) = self.candidates {
            return Ok(c);
        }
        if nodes == 0 {
            return Err(Error::param("graph has no nodes"));
        }
        let alpha = match self.alpha {
            Some(a) => a,
            None => {
                if !(self.shrink >= 1.0) {
                    return Err(Error::param(format!("shrink factor {} must be at least 1", self.shrink)));
                }
                (100.0 * budget as f64 / (self.shrink * nodes as f64)).min(100.0)
            }
        };
        Ok((min_candidate_size(self.p, alpha)?.xi as usize).min(nodes))
    }

    pub fn method(&self, spec: MethodSpec, budget: usize, nodes: usize) -> Result<Method> {
        let n_cap = (!self.no_cap).then_some(self.n_cap);
        let bias = spec.bias.unwrap_or(self.bias);
        Ok(match spec.name {
            MethodName::Greedy => Method::Greedy,
            MethodName::Lazy => Method::Lazy,
            MethodName::Random => Method::Random,
            MethodName::Friendship => Method::FriendshipParadox,
            MethodName::Framework => Method::Framework { size: self.size(budget, nodes)?, memoize: self.memoize },
            MethodName::Vs => Method::VertexSampling { candidates: self.size(budget, nodes)?, bias, n_cap },
            MethodName::Rw => Method::RandomWalk { candidates: self.size(budget, nodes)?, bias, n_cap },
        })
    }
}

fn load_inputs(input: &InputArgs) -> Result<(Graph, CascadeLog, Value)> {
    let (graph, graph_report) = load_graph(&input.graph, input.attributes.as_deref(), input.directed)?;
    let policy = match input.unknown_nodes {
        UnknownNodes::Reject => UnknownNodePolicy::Reject,
        UnknownNodes::Drop => UnknownNodePolicy::Drop,
    };
    let (log, log_report) = load_cascades(&input.cascades, &graph, policy)?;
    let report = json!({
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
        "cascades": log.cascade_count(),
        "participations": log.event_count(),
        "graph_warnings": graph_report,
        "cascade_warnings": log_report,
    });
    Ok((graph, log, report))
}

fn external(graph: &Graph, sensors: &[NodeId]) -> Vec<u64> {
    sensors.iter().map(|&u| graph.external_id(u)).collect()
}

/// Files of one run, written only after everything has been computed.
struct Artifacts {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    fn new(dir: &Path) -> Self {
        Artifacts { dir: dir.to_path_buf(), files: Vec::new() }
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    fn raw(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    fn commit(self) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let mut written = Vec::new();
        for (name, bytes) in self.files {
            let path = self.dir.join(name);
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn manifest(command: &Command, outputs: &[&str], extra: Value) -> Value {
    json!({
        "tool": "sensorplace",
        "version": env!("CARGO_PKG_VERSION"),
        "generator": GENERATOR,
        "config": command,
        "outputs": outputs,
        "details": extra,
    })
}

/// Runs one parsed invocation. Returns the paths written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    match &cli.command {
        Command::Simulate(a) => simulate(&cli.command, a),
        Command::SampleSize(a) => sample_size(&cli.command, a),
        Command::Select(a) => select(&cli.command, a),
        Command::Evaluate(a) => evaluate(&cli.command, a),
        Command::Bench(a) => run_bench(&cli.command, a),
    }
}

fn simulate(cmd: &Command, a: &SimulateArgs) -> Result<Vec<PathBuf>> {
    let spec = PowerLawSpec {
        node_count: a.nodes,
        exponent: a.exponent,
        max_degree: a.max_degree,
        seed: a.seed,
    };
    let diffusion = DiffusionSpec {
        cascade_count: a.cascade_count,
        seed_rule: a.seed_rule,
        transmit_prob: a.transmit_prob,
        delay_q: a.delay_q,
        horizon: a.horizon,
        seed: a.seed.wrapping_add(1),
    };
    if a.day_width == 0 {
        return Err(Error::param("day width must be at least 1"));
    }
    let graph = generate_graph(&spec)?;
    let window_width = 7 * a.day_width;
    let log = match a.churn_windows {
        Some(windows) => {
            let churn = ChurnSpec {
                windows,
                window_width,
                active_fraction: a.active_fraction,
                churn_fraction: a.churn_fraction,
            };
            generate_churned(&graph, &diffusion, &churn)?.log
        }
        None => generate_cascades(&graph, &diffusion)?,
    };
    let graph = with_participation_activity(graph, &log)?;
    let degrees: Vec<usize> = graph.nodes().map(|u| graph.degree(u)).collect();
    let summary = json!({
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
        "mean_degree": graph.mean_degree(),
        "expected_degree_uvs": expected_degree_uvs(&spec),
        "expected_degree_urw": expected_degree_urw(&spec),
        "fitted_exponent": fit_exponent(&degrees, a.max_degree),
        "cascades": log.cascade_count(),
        "participations": log.event_count(),
        "day_width": a.day_width,
        "week_width": window_width,
    });

    let mut edges = Vec::new();
    let mut activity = Vec::new();
    let mut cascades = Vec::new();
    graph.write_edges_to(&mut edges).map_err(|e| Error::Runtime(e.to_string()))?;
    graph.write_attributes_to(&mut activity).map_err(|e| Error::Runtime(e.to_string()))?;
    log.write_to(&mut cascades, &graph).map_err(|e| Error::Runtime(e.to_string()))?;
    let mut out = Artifacts::new(&a.output.out);
    out.raw("graph.tsv", edges);
    out.raw("activity.tsv", activity);
    out.raw("cascades.tsv", cascades);
    out.json("summary.json", &summary)?;
    out.json(
        "manifest.json",
        &manifest(cmd, &["graph.tsv", "activity.tsv", "cascades.tsv", "summary.json"], json!({
            "graph_spec": spec,
            "diffusion_spec": diffusion,
        })),
    )?;
    print_json(&summary)?;
    out.commit()
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn sample_size(cmd: &Command, a: &SampleSizeArgs) -> Result<Vec<PathBuf>> {
    let alpha = match (a.alpha, a.budget, a.nodes) {
        (Some(alpha), _, _) => alpha,
        (None, Some(b), Some(n)) if n > 0 => {
            if !(a.shrink >= 1.0) {
                return Err(Error::param(format!("shrink factor {} must be at least 1", a.shrink)));
            }
            (100.0 * b as f64 / (a.shrink * n as f64)).min(100.0)
        }
        _ => return Err(Error::param("give --alpha, or --budget with a positive --nodes")),
    };
    let spec = min_candidate_size(a.p, alpha)?;
    let result = json!({
        "p": a.p,
        "alpha": alpha,
        "xi": spec.xi,
        "achieved": prob_at_least_one(alpha, spec.xi),
        "cover_ratio_bound": cover_ratio_lower_bound_scaled(a.p, a.shrink)?,
    });
    println!("{}", spec.xi);
    let mut out = Artifacts::new(&a.output.out);
    out.json("sample_size.json", &result)?;
    out.json("manifest.json", &manifest(cmd, &["sample_size.json"], Value::Null))?;
    out.commit()
}

fn universe_for(log: &CascadeLog, reg: &RegularizeArgs, n: usize) -> Result<(Vec<NodeId>, bool)> {
    match reg.resolve() {
        Some(r) => Ok((regularize_universe(log, r.rule, r.threshold, r.day_width)?, true)),
        None => Ok((all_nodes(n), false)),
    }
}

fn select(cmd: &Command, a: &SelectArgs) -> Result<Vec<PathBuf>> {
    let (graph, log, input_report) = load_inputs(&a.input)?;
    let method = a.sizing.method(a.method, a.budget, graph.node_count())?;
    let engine = RewardEngine::new(&log);
    let (universe, restricted) = universe_for(&log, &a.regularize, graph.node_count())?;
    let outcome = run_method(&graph, &engine, &universe, method, a.budget, a.seed)?;
    let lambda = if a.lambda {
        Some(instrument_lambda(&engine, &universe, &outcome.sensors, a.budget)?)
    } else {
        None
    };
    let result = json!({
        "method": method.to_string(),
        "params": method,
        "budget": a.budget,
        "sensors": external(&graph, &outcome.sensors),
        "reward": outcome.reward,
        "gain_evals": outcome.gain_evals,
        "candidate_count": outcome.candidates.as_ref().map(Vec::len),
        "partial": outcome.partial,
        "universe_size": restricted.then_some(universe.len()),
        "lambda": lambda.as_ref().map(|l| l.lambda()),
        "lambda_per_round": lambda.as_ref().map(|l| &l.per_round),
    });
    print_json(&result["sensors"])?;
    let mut out = Artifacts::new(&a.output.out);
    out.json("result.json", &result)?;
    out.json("manifest.json", &manifest(cmd, &["result.json"], json!({ "input": input_report })))?;
    out.commit()
}

fn read_sensors(path: &Path, graph: &Graph) -> Result<Vec<NodeId>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ids: Vec<(usize, u64)> = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let list = v["sensors"].as_array().ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "no \"sensors\" array".into(),
        })?;
        list.iter()
            .map(|x| {
                x.as_u64().map(|id| (1, id)).ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    line: 1,
                    message: format!("sensor {x} is not a node id"),
                })
            })
            .collect::<Result<_>>()?
    } else {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
            .map(|(i, l)| {
                l.trim().parse::<u64>().map(|id| (i + 1, id)).map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("{:?} is not a node id", l.trim()),
                })
            })
            .collect::<Result<_>>()?
    };
    ids.into_iter()
        .map(|(line, id)| {
            graph.node(id).ok_or(Error::UnknownNode { path: path.to_path_buf(), line, node: id })
        })
        .collect()
}

fn evaluate(cmd: &Command, a: &EvaluateArgs) -> Result<Vec<PathBuf>> {
    let (graph, log, input_report) = load_inputs(&a.input)?;
    let window_width = a.window_width.unwrap_or(7 * a.regularize.day_width);
    let split = match a.test_window {
        Some(test) => {
            let train = a.train_windows.clone().map_or(0..test, |w| w.0);
            Some(TemporalSplit::new(window_width, train, test)?)
        }
        None => None,
    };
    let result = match (&a.sensors, a.method) {
        (Some(path), _) => {
            let sensors = read_sensors(path, &graph)?;
            let scored = match &split {
                Some(s) => s.test_log(&log),
                None => log.clone(),
            };
            let det = detection_metrics(&sensors, &scored, a.bucket_width)?;
            json!({
                "sensors": external(&graph, &sensors),
                "reward": RewardEngine::new(&scored).evaluate(&sensors),
                "cascades": scored.cascade_count(),
                "detects": det.detects,
                "mean_lead": det.mean_lead(),
                "lead_times": det.lead_times,
                "split": split,
            })
        }
        (None, Some(spec)) => {
            let split = split.ok_or_else(|| Error::param("--method needs --test-window"))?;
            let budget = a.budget.ok_or_else(|| Error::param("--method needs --budget"))?;
            let method = a.sizing.method(spec, budget, graph.node_count())?;
            let report = prediction_run(
                &graph,
                &log,
                &split,
                method,
                budget,
                a.seed,
                a.bucket_width,
                a.regularize.resolve(),
            )?;
            let mut v = serde_json::to_value(&report)?;
            v["sensors"] = json!(external(&graph, &report.sensors));
            v
        }
        (None, None) => return Err(Error::param("give --sensors or --method")),
    };
    print_json(&json!({ "detects": result.get("detects").or(result.get("test_detects")) }))?;
    let mut out = Artifacts::new(&a.output.out);
    out.json("evaluation.json", &result)?;
    out.json("manifest.json", &manifest(cmd, &["evaluation.json"], json!({ "input": input_report })))?;
    out.commit()
}

fn run_bench(cmd: &Command, a: &BenchArgs) -> Result<Vec<PathBuf>> {
    if a.replications < 1 {
        return Err(Error::param("replications must be at least 1"));
    }
    if a.jobs < 1 {
        return Err(Error::param("jobs must be at least 1"));
    }
    let (graph, log, input_report) = load_inputs(&a.input)?;
    let methods = a
        .methods
        .iter()
        .map(|&m| a.sizing.method(m, a.budget, graph.node_count()))
        .collect::<Result<Vec<_>>>()?;
    let (universe, restricted) = universe_for(&log, &a.regularize, graph.node_count())?;
    let config = BenchConfig {
        budget: a.budget,
        seeds: replication_seeds(a.seed, a.replications),
        bucket_width: a.bucket_width,
        jobs: a.jobs,
        universe: restricted.then_some(universe),
    };
    let mut result = bench(&graph, &log, &methods, &config)?;
    // `jobs` does not change results and stays out of the artifact
    result.config.jobs = 1;
    let mut csv = Vec::new();
    write_csv_to(&mut csv, &result.reports)?;
    let mut json_out = serde_json::to_value(&result)?;
    json_out["greedy_sensors"] = json!(external(&graph, &result.greedy_sensors));
    if let Some(u) = &result.config.universe {
        json_out["config"]["universe"] = json!(external(&graph, u));
    }
    print_json(&result.summary)?;
    let mut out = Artifacts::new(&a.output.out);
    out.raw("bench.csv", csv);
    out.json("bench.json", &json_out)?;
    out.json(
        "manifest.json",
        &manifest(cmd, &["bench.csv", "bench.json"], json!({ "input": input_report, "seeds": config.seeds })),
    )?;
    out.commit()
}

/// Prints a JSON description of the arguments of `path` (a subcommand name,
/// or empty for the top level).
pub fn help_json(path: &[String]) -> Value {
    let mut cmd = Cli::command();
    cmd.build();
    let mut node = &cmd;
    for name in path {
        match node.find_subcommand(name) {
            Some(sub) => node = sub,
            None => break,
        }
    }
    let args: Vec<Value> = node
        .get_arguments()
        .filter(|a| !a.is_hide_set())
        .map(|a| {
            json!({
                "name": a.get_id().as_str(),
                "long": a.get_long(),
                "help": a.get_help().map(|h| h.to_string()),
                "required": a.is_required_set(),
                "takes_value": a.get_action().takes_values(),
                "default": a.get_default_values().iter().map(|v| v.to_string_lossy().into_owned()).collect::<Vec<_>>(),
                "env": a.get_env().map(|e| e.to_string_lossy().into_owned()),
                "possible_values": a.get_possible_values().iter().map(|v| v.get_name().to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "command": node.get_name(),
        "about": node.get_about().map(|h| h.to_string()),
        "subcommands": node.get_subcommands().map(|s| s.get_name().to_string()).collect::<Vec<_>>(),
        "arguments": args,
    })
}
