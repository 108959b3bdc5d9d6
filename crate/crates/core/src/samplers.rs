//! Candidate-set construction by graph sampling, and the two baseline sensor
//! pickers.
//!
//! Both samplers grow a candidate set `S̃` one node at a time: a sampled node
//! (vertex sampling) or walk position (random walk) exposes a neighbourhood,
//! and the node of that neighbourhood with the largest gain `δ_s(S̃)` with
//! respect to the candidates gathered so far joins `S̃`. Vertex sampling scans
//! `{v} ∪ Nb(v)`, the walk scans `Nb(v)` only. Neighbourhoods are cut to the
//! `n_cap` most active neighbours when a cap is set.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Graph, NodeId};
use crate::reward::{gain_key, CascadeReward, RewardEngine, SelectionState};
use crate::rng::{seeded, Rng};
use crate::selectors::GainTuple;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BiasMode {
    #[default]
    Uniform,
    Degree,
    Activity,
}

impl BiasMode {
    #[inline]
    pub fn weight(self, graph: &Graph, u: NodeId) -> f64 {
        match self {
            BiasMode::Uniform => 1.0,
            BiasMode::Degree => graph.degree(u) as f64,
            BiasMode::Activity => graph.activity(u),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BiasMode::Uniform => "uniform",
            BiasMode::Degree => "degree",
            BiasMode::Activity => "activity",
        }
    }
}

pub const DEFAULT_NCAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerParams {
    /// Candidate budget `B'`.
    pub candidates: usize,
    pub bias: BiasMode,
    /// Scan only the `n` most active neighbours; `None` scans all of them.
    pub n_cap: Option<usize>,
}

impl SamplerParams {
    pub fn new(candidates: usize, bias: BiasMode) -> Self {
        SamplerParams {
            candidates,
            bias,
            n_cap: Some(DEFAULT_NCAP),
        }
    }

    fn validate(&self, graph: &Graph) -> Result<()> {
        if self.candidates < 1 {
            return Err(Error::param("candidate budget must be at least 1"));
        }
        if self.candidates > graph.node_count() {
            return Err(Error::param(format!(
                "candidate budget {} exceeds the {} nodes of the graph",
                self.candidates,
                graph.node_count()
            )));
        }
        if self.n_cap == Some(0) {
            return Err(Error::param("neighbour cap must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    /// Candidates in the order they were added.
    pub nodes: Vec<NodeId>,
    /// Gain of each candidate against the candidates added before it.
    pub gains: Vec<GainTuple>,
    pub budget: usize,
    /// Gain evaluations spent building the set.
    pub build_cost: u64,
    /// Nodes touched (sampled, stepped on, or scanned).
    pub visit_cost: u64,
    /// Fewer than `budget` candidates could be found.
    pub partial: bool,
    /// Walk steps that produced no new candidate.
    pub stalls: u64,
    pub restarts: u64,
    /// Draws where every bias weight was zero and a uniform choice was made.
    pub bias_fallbacks: u64,
}

impl CandidateSet {
    /// `(build_cost, visit_cost)`.
    pub fn sampling_cost(&self) -> (u64, u64) {
        (self.build_cost, self.visit_cost)
    }

    fn new(budget: usize) -> Self {
        CandidateSet {
            nodes: Vec::with_capacity(budget),
            gains: Vec::with_capacity(budget),
            budget,
            build_cost: 0,
            visit_cost: 0,
            partial: false,
            stalls: 0,
            restarts: 0,
            bias_fallbacks: 0,
        }
    }
}

/// Neighbours of `v` ordered by activity (descending, ties by id) and cut to
/// `cap`; all neighbours in id order when uncapped or when the cap is not
/// binding.
pub fn scanned_neighbors(graph: &Graph, v: NodeId, cap: Option<usize>) -> Vec<NodeId> {
    let nbrs = graph.neighbors(v);
    match cap {
        Some(n) if n < nbrs.len() => {
            let mut ranked = nbrs.to_vec();
            ranked.sort_by(|a, b| {
                graph
                    .activity(*b)
                    .total_cmp(&graph.activity(*a))
                    .then_with(|| a.cmp(b))
            });
            ranked.truncate(n);
            ranked
        }
        _ => nbrs.to_vec(),
    }
}

/// Best non-candidate in `scan` by gain against `state`, lowest id on ties.
fn argmax_gain<R: CascadeReward>(
    engine: &RewardEngine<'_, R>,
    state: &SelectionState,
    scan: &[NodeId],
) -> Result<Option<(NodeId, f64)>> {
    let mut best: Option<(NodeId, f64)> = None;
    for &s in scan {
        if state.is_sensor(s) {
            continue;
        }
        let g = engine.marginal_gain(state, s)?;
        let better = match best {
            None => true,
            Some((bs, bg)) => {
                let (k, bk) = (gain_key(g), gain_key(bg));
                k > bk || (k == bk && s < bs)
            }
        };
        if better {
            best = Some((s, g));
        }
    }
    Ok(best)
}

/// Weighted draws without replacement by rejection from a weighted index
/// that is rebuilt once half of its mass has been removed.
struct Pool {
    bias: BiasMode,
    nodes: Vec<NodeId>,
    index: Option<WeightedIndex<f64>>,
    removed: Vec<bool>,
    remaining: usize,
    remaining_weight: f64,
    built_weight: f64,
    built_len: usize,
    fallbacks: u64,
}

impl Pool {
    fn new(graph: &Graph, bias: BiasMode) -> Self {
        let mut pool = Pool {
            bias,
            nodes: Vec::new(),
            index: None,
            removed: vec![false; graph.node_count()],
            remaining: graph.node_count(),
            remaining_weight: graph.nodes().map(|u| bias.weight(graph, u)).sum(),
            built_weight: 0.0,
            built_len: 0,
            fallbacks: 0,
        };
        pool.rebuild(graph);
        pool
    }

    fn rebuild(&mut self, graph: &Graph) {
        self.nodes = graph.nodes().filter(|u| !self.removed[u.index()]).collect();
        let weights: Vec<f64> = self.nodes.iter().map(|&u| self.bias.weight(graph, u)).collect();
        self.built_weight = weights.iter().sum();
        self.remaining_weight = self.built_weight;
        self.built_len = self.nodes.len();
        self.index = match self.bias {
            BiasMode::Uniform => None,
            _ => WeightedIndex::new(&weights).ok(),
        };
        if self.index.is_none() && self.bias != BiasMode::Uniform && !self.nodes.is_empty() {
            self.fallbacks += 1;
        }
    }

    fn remove(&mut self, graph: &Graph, u: NodeId) {
        if !self.removed[u.index()] {
            self.removed[u.index()] = true;
            self.remaining -= 1;
            self.remaining_weight -= self.bias.weight(graph, u);
        }
    }

    fn draw(&mut self, graph: &Graph, rng: &mut Rng) -> Option<NodeId> {
        if self.remaining == 0 {
            return None;
        }
        let stale = match self.index {
            Some(_) => self.remaining_weight <= 0.5 * self.built_weight,
            None => self.remaining * 2 <= self.built_len,
        };
        if stale {
            self.rebuild(graph);
        }
        loop {
            let i = match &self.index {
                Some(index) => index.sample(rng),
                None => rng.random_range(0..self.nodes.len()),
            };
            let u = self.nodes[i];
            if !self.removed[u.index()] {
                return Some(u);
            }
        }
    }
}

/// Grows `S̃` by vertex sampling: draw `v ∉ S̃` by bias weight without
/// replacement, add the best of `{v} ∪ Nb(v)`.
pub fn vertex_sample_candidates<R: CascadeReward>(
    graph: &Graph,
    engine: &RewardEngine<'_, R>,
    params: SamplerParams,
    seed: u64,
) -> Result<CandidateSet> {
    params.validate(graph)?;
    let mut rng = seeded(seed);
    let mut pool = Pool::new(graph, params.bias);
    let mut state = engine.state();
    let mut out = CandidateSet::new(params.candidates);
    while state.len() < params.candidates {
        let Some(v) = pool.draw(graph, &mut rng) else {
            out.partial = true;
            break;
        };
        let mut scan = scanned_neighbors(graph, v, params.n_cap);
        scan.push(v);
        out.visit_cost += scan.len() as u64;
        let (s, g) = argmax_gain(engine, &state, &scan)?.expect("v is never a candidate yet");
        out.gains.push(GainTuple { node: s, gain: g, round: state.len() });
        engine.commit(&mut state, s)?;
        pool.remove(graph, s);
    }
    out.nodes = state.sensors().to_vec();
    out.build_cost = state.gain_evals();
    out.bias_fallbacks = pool.fallbacks;
    Ok(out)
}

/// Walk restarts and give-up rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestartPolicy {
    /// Restart from a uniform node after this many steps without a new
    /// candidate.
    pub stall_window: u64,
    /// Give up (partial set) after this many consecutive steps without a new
    /// candidate.
    pub stall_limit: u64,
}

impl Default for RestartPolicy {
    fn default() -> Self {
        RestartPolicy {
            stall_window: 100,
            stall_limit: 10_000,
        }
    }
}

/// One biased walk step from `u`: a neighbour chosen with probability
/// proportional to its bias weight, or uniformly when all weights are zero
/// (second field `true`). `None` at a dead end.
pub fn walk_step(graph: &Graph, u: NodeId, bias: BiasMode, rng: &mut Rng) -> Option<(NodeId, bool)> {
    let nbrs = graph.neighbors(u);
    if nbrs.is_empty() {
        return None;
    }
    if bias == BiasMode::Uniform {
        return Some((nbrs[rng.random_range(0..nbrs.len())], false));
    }
    let total: f64 = nbrs.iter().map(|&v| bias.weight(graph, v)).sum();
    if total <= 0.0 {
        return Some((nbrs[rng.random_range(0..nbrs.len())], true));
    }
    let mut r = rng.random::<f64>() * total;
    for &v in nbrs {
        let w = bias.weight(graph, v);
        if r < w {
            return Some((v, false));
        }
        r -= w;
    }
    // rounding left r at the top edge; take the last positive-weight node
    nbrs.iter()
        .rev()
        .find(|&&v| bias.weight(graph, v) > 0.0)
        .map(|&v| (v, false))
}

/// Nodes visited by a walk of `steps` steps after discarding `burn_in` steps,
/// restarting uniformly at dead ends.
pub fn walk_visits(
    graph: &Graph,
    bias: BiasMode,
    start: NodeId,
    burn_in: usize,
    steps: usize,
    rng: &mut Rng,
) -> Vec<NodeId> {
    let mut u = start;
    let mut out = Vec::with_capacity(steps);
    for i in 0..burn_in + steps {
        u = match walk_step(graph, u, bias, rng) {
            Some((v, _)) => v,
            None => NodeId(rng.random_range(0..graph.node_count() as u32)),
        };
        if i >= burn_in {
            out.push(u);
        }
    }
    out
}

/// Grows `S̃` along a biased random walk: step `u → v`, add the best of
/// `Nb(v)`. Steps whose scan holds no new node are stalls and consume no
/// budget.
pub fn random_walk_candidates<R: CascadeReward>(
    graph: &Graph,
    engine: &RewardEngine<'_, R>,
    params: SamplerParams,
    seed: u64,
    policy: RestartPolicy,
) -> Result<CandidateSet> {
    random_walk_candidates_from(graph, engine, params, seed, policy, None)
}

/// [`random_walk_candidates`] with a fixed start node instead of a uniform
/// one.
pub fn random_walk_candidates_from<R: CascadeReward>(
    graph: &Graph,
    engine: &RewardEngine<'_, R>,
    params: SamplerParams,
    seed: u64,
    policy: RestartPolicy,
    start: Option<NodeId>,
) -> Result<CandidateSet> {
    params.validate(graph)?;
    if graph.edge_count() == 0 {
        return Err(Error::param("random walk needs a graph with at least one edge"));
    }
    if let Some(s) = start.filter(|s| !graph.contains(*s)) {
        return Err(Error::NodeOutOfRange(s.0));
    }
    let mut rng = seeded(seed);
    let n = graph.node_count() as u32;
    let mut state = engine.state();
    let mut out = CandidateSet::new(params.candidates);
    let mut u = start.unwrap_or_else(|| NodeId(rng.random_range(0..n)));
    out.visit_cost += 1;
    let mut since_new = 0u64;
    while state.len() < params.candidates {
        if since_new >= policy.stall_limit {
            out.partial = true;
            break;
        }
        let Some((v, fallback)) = walk_step(graph, u, params.bias, &mut rng) else {
            u = NodeId(rng.random_range(0..n));
            out.restarts += 1;
            out.visit_cost += 1;
            since_new += 1;
            continue;
        };
        out.bias_fallbacks += fallback as u64;
        let scan = scanned_neighbors(graph, v, params.n_cap);
        out.visit_cost += 1 + scan.len() as u64;
        match argmax_gain(engine, &state, &scan)? {
            Some((s, g)) => {
                out.gains.push(GainTuple { node: s, gain: g, round: state.len() });
                engine.commit(&mut state, s)?;
                since_new = 0;
            }
            None => {
                out.stalls += 1;
                since_new += 1;
            }
        }
        u = v;
        if since_new > 0 && since_new.is_multiple_of(policy.stall_window) {
            u = NodeId(rng.random_range(0..n));
            out.restarts += 1;
            out.visit_cost += 1;
        }
    }
    out.nodes = state.sensors().to_vec();
    out.build_cost = state.gain_evals();
    Ok(out)
}

/// `budget` nodes uniformly without replacement, in draw order.
pub fn random_baseline(graph: &Graph, budget: usize, seed: u64) -> Result<Vec<NodeId>> {
    if budget > graph.node_count() {
        return Err(Error::param(format!(
            "budget {budget} exceeds the {} nodes of the graph",
            graph.node_count()
        )));
    }
    let mut rng = seeded(seed);
    Ok(index::sample(&mut rng, graph.node_count(), budget)
        .into_iter()
        .map(|i| NodeId(i as u32))
        .collect())
}

/// A uniform neighbour of a uniform node; `None` when the drawn node has no
/// neighbours.
pub fn friendship_paradox_draw(graph: &Graph, rng: &mut Rng) -> Option<NodeId> {
    let u = NodeId(rng.random_range(0..graph.node_count() as u32));
    let nbrs = graph.neighbors(u);
    (!nbrs.is_empty()).then(|| nbrs[rng.random_range(0..nbrs.len())])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselinePick {
    pub sensors: Vec<NodeId>,
    /// Fewer than the requested number of distinct nodes were reached.
    pub partial: bool,
}

/// `budget` distinct nodes, each a uniform neighbour of an independently
/// drawn uniform node; duplicates are redrawn.
pub fn friendship_paradox_baseline(graph: &Graph, budget: usize, seed: u64) -> Result<BaselinePick> {
    if graph.edge_count() == 0 {
        return Err(Error::param("friendship-paradox sampling needs a graph with edges"));
    }
    let mut rng = seeded(seed);
    let mut chosen = vec![false; graph.node_count()];
    let mut sensors = Vec::with_capacity(budget);
    let max_attempts = 1000 + 100 * budget as u64;
    let mut attempts = 0;
    while sensors.len() < budget && attempts < max_attempts {
        attempts += 1;
        if let Some(v) = friendship_paradox_draw(graph, &mut rng) {
            if !chosen[v.index()] {
                chosen[v.index()] = true;
                sensors.push(v);
            }
        }
    }
    let partial = sensors.len() < budget;
    Ok(BaselinePick { sensors, partial })
}
