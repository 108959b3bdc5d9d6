//! Experiment orchestration: method dispatch, detection metrics, temporal
//! prediction splits, universe regularisation, cover ratios and the bench
//! runner with its CSV/JSON reports.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::path::Path;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CascadeLog, Graph, NodeId, Tick};
use crate::reward::{CascadeReward, RewardEngine};
use crate::rng::{seeded, stream};
use crate::samplers::{
    friendship_paradox_baseline, random_baseline, random_walk_candidates, vertex_sample_candidates, BiasMode,
    RestartPolicy, SamplerParams,
};
use crate::sampling_math::min_candidate_size;
use crate::selectors::{
    all_nodes, exact_greedy, framework_greedy, greedy_over_candidates, lazy_greedy, FrameworkConfig,
    UniformRounds,
};

/// A sensor selection method with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Greedy,
    Lazy,
    /// Candidate-set greedy with `size` uniform candidates per round.
    Framework { size: usize, memoize: bool },
    /// Vertex-sampled candidate set of `candidates` nodes, then greedy on it.
    VertexSampling { candidates: usize, bias: BiasMode, n_cap: Option<usize> },
    /// Random-walk candidate set of `candidates` nodes, then greedy on it.
    RandomWalk { candidates: usize, bias: BiasMode, n_cap: Option<usize> },
    Random,
    FriendshipParadox,
}

impl Method {
    /// Framework method whose round size is `ξ_p(α)` with
    /// `α = 100·budget / (shrink·|V|)`, capped at 100.
    pub fn framework_for(p: f64, budget: usize, node_count: usize, shrink: f64) -> Result<Method> {
        if node_count == 0 {
            return Err(Error::param("cannot size candidate sets for an empty graph"));
        }
        let alpha = (100.0 * budget as f64 / (shrink * node_count as f64)).min(100.0);
        let size = min_candidate_size(p, alpha)?.xi as usize;
        Ok(Method::Framework { size: size.min(node_count), memoize: false })
    }

    pub fn is_greedy(&self) -> bool {
        matches!(self, Method::Greedy)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cap = |c: &Option<usize>| c.map_or("all".to_string(), |n| n.to_string());
        match self {
            Method::Greedy => write!(f, "greedy"),
            Method::Lazy => write!(f, "lazy"),
            Method::Framework { size, memoize: false } => write!(f, "framework:{size}"),
            Method::Framework { size, memoize: true } => write!(f, "framework-memo:{size}"),
            Method::VertexSampling { candidates, bias, n_cap } => {
                write!(f, "vs-{}:{candidates}:{}", bias.name(), cap(n_cap))
            }
            Method::RandomWalk { candidates, bias, n_cap } => {
                write!(f, "rw-{}:{candidates}:{}", bias.name(), cap(n_cap))
            }
            Method::Random => write!(f, "random"),
            Method::FriendshipParadox => write!(f, "friendship"),
        }
    }
}

/// What one method run produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub sensors: Vec<NodeId>,
    pub reward: f64,
    /// Gain evaluations, including those spent building candidate sets.
    pub gain_evals: u64,
    /// Union of all candidates considered, when the method has candidates.
    pub candidates: Option<Vec<NodeId>>,
    /// The method could not reach its budget or candidate budget.
    pub partial: bool,
}

/// Runs `method` on `universe` with budget `B`. Sampler methods build their
/// candidate set on the whole graph and run greedy on its intersection with
/// `universe`.
pub fn run_method<R: CascadeReward>(
    graph: &Graph,
    engine: &RewardEngine<'_, R>,
    universe: &[NodeId],
    method: Method,
    budget: usize,
    seed: u64,
) -> Result<MethodOutcome> {
    let in_universe = |nodes: &[NodeId]| -> Vec<NodeId> {
        let mut keep = vec![false; graph.node_count()];
        for u in universe {
            keep[u.index()] = true;
        }
        nodes.iter().copied().filter(|u| keep[u.index()]).collect()
    };
    let plain = |sensors: Vec<NodeId>, partial: bool| MethodOutcome {
        reward: engine.evaluate(&sensors),
        sensors,
        gain_evals: 0,
        candidates: None,
        partial,
    };
    Ok(match method {
        Method::Greedy | Method::Lazy => {
            let r = if method.is_greedy() {
                exact_greedy(engine, universe, budget)?
            } else {
                lazy_greedy(engine, universe, budget)?
            };
            MethodOutcome {
                sensors: r.sensors,
                reward: r.reward,
                gain_evals: r.gain_evals,
                candidates: Some(universe.to_vec()),
                partial: false,
            }
        }
        Method::Framework { size, memoize } => {
            if size == 0 {
                return Err(Error::param("framework round size must be at least 1"));
            }
            let mut rng = seeded(seed);
            let mut source = UniformRounds { size };
            let config = FrameworkConfig { memoize, ..FrameworkConfig::default() };
            let run = framework_greedy(engine, universe, budget, &mut source, config, &mut rng)?;
            MethodOutcome {
                sensors: run.result.sensors,
                reward: run.result.reward,
                gain_evals: run.result.gain_evals,
                candidates: Some(run.candidate_union),
                partial: run.exhausted,
            }
        }
        Method::VertexSampling { candidates, bias, n_cap } | Method::RandomWalk { candidates, bias, n_cap } => {
            let params = SamplerParams { candidates, bias, n_cap };
            let set = if matches!(method, Method::VertexSampling { .. }) {
                vertex_sample_candidates(graph, engine, params, seed)?
            } else {
                random_walk_candidates(graph, engine, params, seed, RestartPolicy::default())?
            };
            let pool = in_universe(&set.nodes);
            let r = greedy_over_candidates(engine, &pool, budget, false)?;
            let mut union = pool;
            union.sort_unstable();
            MethodOutcome {
                sensors: r.sensors,
                reward: r.reward,
                gain_evals: set.build_cost + r.gain_evals,
                candidates: Some(union),
                partial: set.partial,
            }
        }
        Method::Random => plain(random_baseline(graph, budget, seed)?, false),
        Method::FriendshipParadox => {
            let pick = friendship_paradox_baseline(graph, budget, seed)?;
            plain(pick.sensors, pick.partial)
        }
    })
}

/// Detection counts and lead times of a sensor set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub detects: usize,
    /// Lead time of each detected cascade, in cascade order. Negative when
    /// the first sensor reports after the peak.
    pub lead_times: Vec<i64>,
}

impl Detection {
    /// Mean over detected cascades; `None` when nothing was detected.
    pub fn mean_lead(&self) -> Option<f64> {
        if self.lead_times.is_empty() {
            return None;
        }
        Some(self.lead_times.iter().map(|&l| l as f64).sum::<f64>() / self.lead_times.len() as f64)
    }
}

/// Cascades reached by some sensor, and for each `peak_time − min_u t_cu`.
pub fn detection_metrics(sensors: &[NodeId], log: &CascadeLog, bucket_width: Tick) -> Result<Detection> {
    if bucket_width == 0 {
        return Err(Error::param("bucket width must be at least 1"));
    }
    let mut first: HashMap<usize, Tick> = HashMap::new();
    for &s in sensors {
        if s.index() >= log.node_count() {
            return Err(Error::NodeOutOfRange(s.0));
        }
        for &(c, t) in log.participations(s) {
            first
                .entry(c.index())
                .and_modify(|f| *f = (*f).min(t))
                .or_insert(t);
        }
    }
    let mut hit: Vec<(usize, Tick)> = first.into_iter().collect();
    hit.sort_unstable();
    let lead_times = hit
        .iter()
        .map(|&(c, t)| log.cascades()[c].peak_time(bucket_width) as i64 - t as i64)
        .collect();
    Ok(Detection { detects: hit.len(), lead_times })
}

/// Train windows and one test window over `[w·width, (w+1)·width)` buckets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalSplit {
    pub window_width: Tick,
    pub train: Range<usize>,
    pub test: usize,
}

impl TemporalSplit {
    /// Train and test must be disjoint; the single exception is a one-window
    /// train range equal to the test window, kept as a self-consistency
    /// check.
    pub fn new(window_width: Tick, train: Range<usize>, test: usize) -> Result<Self> {
        if window_width == 0 {
            return Err(Error::param("window width must be at least 1"));
        }
        if train.is_empty() {
            return Err(Error::param("train window range is empty"));
        }
        let degenerate = train == (test..test + 1);
        if train.contains(&test) && !degenerate {
            return Err(Error::param(format!("test window {test} overlaps train windows {train:?}")));
        }
        Ok(TemporalSplit { window_width, train, test })
    }

    pub fn window_of(&self, tick: Tick) -> usize {
        (tick / self.window_width) as usize
    }

    fn window_ticks(&self, w: usize) -> Tick {
        w as Tick * self.window_width
    }

    /// Cascades starting in a train window, cut at the end of the train
    /// range.
    pub fn train_log(&self, log: &CascadeLog) -> CascadeLog {
        let limit = self.window_ticks(self.train.end);
        log.restrict(|c| self.train.contains(&self.window_of(c.start())), Some(limit))
    }

    /// Cascades starting in the test window, with all of their events.
    pub fn test_log(&self, log: &CascadeLog) -> CascadeLog {
        log.restrict(|c| self.window_of(c.start()) == self.test, None)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub method: String,
    pub params: Method,
    pub seed: u64,
    pub budget: usize,
    pub split: TemporalSplit,
    pub sensors: Vec<NodeId>,
    pub train_reward: f64,
    /// Train reward over that of exact greedy on the train data.
    pub train_ratio: f64,
    pub train_detects: usize,
    pub test_reward: f64,
    /// Test reward over that of exact greedy fitted to the test data.
    pub test_ratio: f64,
    pub test_detects: usize,
    pub test_mean_lead: Option<f64>,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 { a / b } else { 1.0 }
}

/// Universe restriction applied to the train data of a prediction run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularization {
    pub rule: RegularizationRule,
    pub threshold: f64,
    pub day_width: Tick,
}

/// Selects on the train windows and scores the selection on the test
/// window. Node activity is recomputed from train participations so that
/// activity-biased samplers see no future data.
#[allow(clippy::too_many_arguments)]
pub fn prediction_run(
    graph: &Graph,
    log: &CascadeLog,
    split: &TemporalSplit,
    method: Method,
    budget: usize,
    seed: u64,
    bucket_width: Tick,
    regularization: Option<Regularization>,
) -> Result<PredictionReport> {
    let train = split.train_log(log);
    if train.is_empty() {
        return Err(Error::param(format!("train windows {:?} hold no cascades", split.train)));
    }
    let test = split.test_log(log);
    let activity = graph.nodes().map(|u| train.participations(u).len() as f64).collect();
    let train_graph = graph.clone().with_activity(activity)?;
    let universe = match regularization {
        Some(r) => regularize_universe(&train, r.rule, r.threshold, r.day_width)?,
        None => all_nodes(graph.node_count()),
    };
    let train_engine = RewardEngine::new(&train);
    let test_engine = RewardEngine::new(&test);
    let out = run_method(&train_graph, &train_engine, &universe, method, budget, seed)?;
    let train_best = exact_greedy(&train_engine, &universe, budget)?.reward;
    let test_best = exact_greedy(&test_engine, &all_nodes(graph.node_count()), budget)?.reward;
    let test_reward = test_engine.evaluate(&out.sensors);
    let train_det = detection_metrics(&out.sensors, &train, bucket_width)?;
    let test_det = detection_metrics(&out.sensors, &test, bucket_width)?;
    Ok(PredictionReport {
        method: method.to_string(),
        params: method,
        seed,
        budget,
        split: split.clone(),
        train_reward: out.reward,
        train_ratio: ratio(out.reward, train_best),
        train_detects: train_det.detects,
        test_reward,
        test_ratio: ratio(test_reward, test_best),
        test_detects: test_det.detects,
        test_mean_lead: test_det.mean_lead(),
        sensors: out.sensors,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RegularizationRule {
    /// Joined at least `x` cascades.
    MinCascades,
    /// Participated on at least `x` distinct days.
    MinActiveDays,
    /// At least `x` cascades per active day.
    MinCascadesPerDay,
}

/// Participating nodes of `log` that satisfy `rule` at threshold `x`, with
/// days being `day_width`-tick buckets.
pub fn regularize_universe(
    log: &CascadeLog,
    rule: RegularizationRule,
    x: f64,
    day_width: Tick,
) -> Result<Vec<NodeId>> {
    if !(x >= 0.0) {
        return Err(Error::param(format!("threshold {x} must be non-negative")));
    }
    if day_width == 0 {
        return Err(Error::param("day width must be at least 1"));
    }
    let keep: Vec<NodeId> = log
        .participants()
        .into_iter()
        .filter(|&u| {
            let parts = log.participations(u);
            let mut days: Vec<Tick> = parts.iter().map(|&(_, t)| t / day_width).collect();
            days.sort_unstable();
            days.dedup();
            let score = match rule {
                RegularizationRule::MinCascades => parts.len() as f64,
                RegularizationRule::MinActiveDays => days.len() as f64,
                RegularizationRule::MinCascadesPerDay => parts.len() as f64 / days.len() as f64,
            };
            score >= x
        })
        .collect();
    if keep.is_empty() {
        return Err(Error::param(format!("threshold {x} leaves no nodes in the universe")));
    }
    Ok(keep)
}

/// Where the reference set of a cover ratio came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptSource {
    Exhaustive,
    /// Exact greedy output standing in for the optimum.
    GreedyProxy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverRatio {
    pub value: f64,
    pub opt_source: OptSource,
}

/// `|candidates ∩ opt| / |opt|`.
pub fn measured_cover_ratio(candidates: &[NodeId], opt: &[NodeId]) -> Result<f64> {
    if opt.is_empty() {
        return Err(Error::param("reference set is empty"));
    }
    let mut opt = opt.to_vec();
    opt.sort_unstable();
    opt.dedup();
    let mut cand = candidates.to_vec();
    cand.sort_unstable();
    let hit = opt.iter().filter(|u| cand.binary_search(u).is_ok()).count();
    Ok(hit as f64 / opt.len() as f64)
}

/// Largest number of subsets [`exhaustive_opt`] will enumerate.
pub const EXHAUSTIVE_LIMIT: u128 = 50_000_000;

/// Best subset of `universe` with at most `budget` nodes, by enumeration.
/// Ties keep the lexicographically first subset.
pub fn exhaustive_opt<R: CascadeReward>(
    engine: &RewardEngine<'_, R>,
    universe: &[NodeId],
    budget: usize,
) -> Result<(Vec<NodeId>, f64)> {
    let mut universe = universe.to_vec();
    universe.sort_unstable();
    universe.dedup();
    let k = budget.min(universe.len());
    let n = universe.len() as u128;
    let count: u128 = (0..k as u128).fold(1, |acc, i| acc * (n - i) / (i + 1));
    if count > EXHAUSTIVE_LIMIT {
        return Err(Error::param(format!("{count} subsets are too many to enumerate")));
    }
    let mut best = (Vec::new(), 0.0);
    if k == 0 {
        return Ok(best);
    }
    // monotone reward: subsets of exactly k nodes suffice
    let mut idx: Vec<usize> = (0..k).collect();
    let mut pick = Vec::with_capacity(k);
    loop {
        pick.clear();
        pick.extend(idx.iter().map(|&i| universe[i]));
        let f = engine.evaluate(&pick);
        if f > best.1 + 1e-12 {
            best = (pick.clone(), f);
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] < universe.len() - k + i) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(best)
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
}

impl MonteCarlo {
    pub fn from_samples(xs: &[f64]) -> Self {
        let s = Stat::of(xs.iter().copied());
        MonteCarlo {
            mean: s.mean,
            std_err: s.std / (xs.len() as f64).sqrt(),
            trials: xs.len(),
        }
    }
}

/// Idealised covering process over `k` rounds: round `i` covers a new
/// optimal node with probability `p·(k − y)/k`, `y` being the number
/// covered so far. Returns the cover ratio `y/k` of each trial.
pub fn covering_process(k: usize, p: f64, trials: usize, seed: u64) -> Result<MonteCarlo> {
    if k == 0 || trials == 0 {
        return Err(Error::param("covering process needs k ≥ 1 and at least one trial"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("probability {p} outside [0, 1]")));
    }
    let mut rng = seeded(seed);
    let samples: Vec<f64> = (0..trials)
        .map(|_| {
            let mut y = 0usize;
            for _ in 0..k {
                if rng.random_bool(p * (k - y) as f64 / k as f64) {
                    y += 1;
                }
            }
            y as f64 / k as f64
        })
        .collect();
    Ok(MonteCarlo::from_samples(&samples))
}

/// One row of a bench.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub method: String,
    pub params: Method,
    pub seed: u64,
    pub replication: usize,
    pub budget: usize,
    pub reward: f64,
    pub reward_ratio: f64,
    /// `None` when the method spent no gain evaluations.
    pub speedup: Option<f64>,
    pub gain_evals: u64,
    pub detects: usize,
    pub mean_lead_time: Option<f64>,
    pub cover_ratio: Option<f64>,
    pub partial: bool,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    method: &'a str,
    seed: u64,
    #[serde(rename = "B")]
    budget: usize,
    reward: f64,
    ratio: f64,
    gain_evals: u64,
    speedup: Option<f64>,
    detects: usize,
    mean_lead: Option<f64>,
    cover_ratio: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; zero for a single value.
    pub std: f64,
    pub n: usize,
}

impl Stat {
    pub fn of(xs: impl Iterator<Item = f64>) -> Self {
        let xs: Vec<f64> = xs.collect();
        let n = xs.len();
        if n == 0 {
            return Stat::default();
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stat { mean, std, n }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub runs: usize,
    pub reward: Stat,
    pub reward_ratio: Stat,
    pub speedup: Stat,
    pub gain_evals: Stat,
    pub detects: Stat,
    pub mean_lead_time: Stat,
    pub cover_ratio: Stat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub budget: usize,
    /// One replication per seed.
    pub seeds: Vec<u64>,
    pub bucket_width: Tick,
    /// Worker threads; 1 runs sequentially.
    pub jobs: usize,
    /// Restricts every method to these nodes; all nodes when absent.
    pub universe: Option<Vec<NodeId>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchOutput {
    pub config: BenchConfig,
    pub methods: Vec<Method>,
    pub reports: Vec<ExperimentReport>,
    pub summary: Vec<MethodSummary>,
    /// Exact greedy sensors, the reference of every cover ratio.
    pub greedy_sensors: Vec<NodeId>,
    pub opt_source: OptSource,
}

/// Runs every method once per seed on one instance. Exact greedy is always
/// included and is the denominator of ratios and speedups; its output is
/// also the (proxy) optimum for cover ratios. Rows come out ordered by seed,
/// then method, whatever the thread count.
pub fn bench(graph: &Graph, log: &CascadeLog, methods: &[Method], config: &BenchConfig) -> Result<BenchOutput> {
    if config.seeds.is_empty() {
        return Err(Error::param("bench needs at least one replication"));
    }
    if config.bucket_width == 0 {
        return Err(Error::param("bucket width must be at least 1"));
    }
    if graph.node_count() != log.node_count() {
        return Err(Error::Runtime("graph and cascade log disagree on node count".into()));
    }
    let mut methods_all = vec![Method::Greedy];
    methods_all.extend(methods.iter().copied().filter(|m| !m.is_greedy()));
    let universe = match &config.universe {
        Some(u) => u.clone(),
        None => all_nodes(graph.node_count()),
    };
    let engine = RewardEngine::new(log);
    let greedy = exact_greedy(&engine, &universe, config.budget)?;
    let greedy_evals = greedy.gain_evals;

    let tasks: Vec<(usize, u64, Method)> = config
        .seeds
        .iter()
        .enumerate()
        .flat_map(|(r, &s)| methods_all.iter().map(move |&m| (r, s, m)))
        .collect();
    let run_one = |&(replication, seed, method): &(usize, u64, Method)| -> Result<ExperimentReport> {
        let out = if method.is_greedy() {
            MethodOutcome {
                sensors: greedy.sensors.clone(),
                reward: greedy.reward,
                gain_evals: greedy.gain_evals,
                candidates: Some(universe.clone()),
                partial: false,
            }
        } else {
            run_method(graph, &engine, &universe, method, config.budget, seed)?
        };
        let det = detection_metrics(&out.sensors, log, config.bucket_width)?;
        let cover_ratio = match (&out.candidates, greedy.sensors.is_empty()) {
            (Some(c), false) => Some(measured_cover_ratio(c, &greedy.sensors)?),
            _ => None,
        };
        Ok(ExperimentReport {
            method: method.to_string(),
            params: method,
            seed,
            replication,
            budget: config.budget,
            reward: out.reward,
            reward_ratio: ratio(out.reward, greedy.reward),
            speedup: (out.gain_evals > 0).then(|| greedy_evals as f64 / out.gain_evals as f64),
            gain_evals: out.gain_evals,
            detects: det.detects,
            mean_lead_time: det.mean_lead(),
            cover_ratio,
            partial: out.partial,
        })
    };
    let reports: Vec<ExperimentReport> = if config.jobs <= 1 {
        tasks.iter().map(run_one).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::Runtime(format!("thread pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(run_one).collect::<Result<_>>())?
    };

    let summary = methods_all
        .iter()
        .map(|m| {
            let id = m.to_string();
            let rows: Vec<&ExperimentReport> = reports.iter().filter(|r| r.method == id).collect();
            MethodSummary {
                method: id,
                runs: rows.len(),
                reward: Stat::of(rows.iter().map(|r| r.reward)),
                reward_ratio: Stat::of(rows.iter().map(|r| r.reward_ratio)),
                speedup: Stat::of(rows.iter().filter_map(|r| r.speedup)),
                gain_evals: Stat::of(rows.iter().map(|r| r.gain_evals as f64)),
                detects: Stat::of(rows.iter().map(|r| r.detects as f64)),
                mean_lead_time: Stat::of(rows.iter().filter_map(|r| r.mean_lead_time)),
                cover_ratio: Stat::of(rows.iter().filter_map(|r| r.cover_ratio)),
            }
        })
        .collect();
    Ok(BenchOutput {
        config: config.clone(),
        methods: methods_all,
        reports,
        summary,
        greedy_sensors: greedy.sensors,
        opt_source: OptSource::GreedyProxy,
    })
}

/// CSV with columns `method, seed, B, reward, ratio, gain_evals, speedup,
/// detects, mean_lead, cover_ratio`; missing values are empty.
pub fn write_csv(path: &Path, reports: &[ExperimentReport]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(file, reports)
}

pub fn write_csv_to(w: impl std::io::Write, reports: &[ExperimentReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    for r in reports {
        w.serialize(CsvRow {
            method: &r.method,
            seed: r.seed,
            budget: r.budget,
            reward: r.reward,
            ratio: r.reward_ratio,
            gain_evals: r.gain_evals,
            speedup: r.speedup,
            detects: r.detects,
            mean_lead: r.mean_lead_time,
            cover_ratio: r.cover_ratio,
        })?;
    }
    w.flush().map_err(|e| Error::Runtime(format!("csv output: {e}")))
}

/// Seeds `0..replications` offset by `base`, each mixed through its own RNG
/// stream so neighbouring bases do not share seeds.
pub fn replication_seeds(base: u64, replications: usize) -> Vec<u64> {
    (0..replications as u64)
        .map(|r| stream(base, r).random::<u64>())
        .collect()
}
