//! Reproducible synthetic instances: configuration-model graphs with a
//! truncated power-law degree distribution, and timestamped cascades from an
//! independent-cascade style diffusion with geometric delays.
//!
//! Also hosts the closed-form mean degrees seen by uniform vertex sampling
//! and by a uniform random walk for a given degree distribution.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::Geometric;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CascadeLog, Graph, NodeId, Tick};
use crate::rng::{seeded, stream, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSpec {
    pub node_count: usize,
    /// `a > 1` in `θ_d ∝ d^{−a}`.
    pub exponent: f64,
    /// Largest degree `M`.
    pub max_degree: usize,
    pub seed: u64,
}

impl PowerLawSpec {
    fn validate(&self) -> Result<()> {
        if !(self.exponent > 1.0) || !self.exponent.is_finite() {
            return Err(Error::param(format!("exponent {} must exceed 1", self.exponent)));
        }
        if self.max_degree < 1 {
            return Err(Error::param("max degree must be at least 1"));
        }
        if self.max_degree + 1 > self.node_count {
            return Err(Error::param(format!(
                "max degree {} is infeasible for {} nodes",
                self.max_degree, self.node_count
            )));
        }
        Ok(())
    }

    /// `θ_d = d^{−a} / Z` over `d ∈ [1, M]`.
    pub fn distribution(&self) -> DegreeDistribution {
        DegreeDistribution::power_law(self.exponent, self.max_degree)
    }
}

/// Probability mass over degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    /// `(degree, θ_d)`, ascending by degree, summing to one.
    pub mass: Vec<(usize, f64)>,
}

impl DegreeDistribution {
    pub fn power_law(exponent: f64, max_degree: usize) -> Self {
        let raw: Vec<f64> = (1..=max_degree).map(|d| (d as f64).powf(-exponent)).collect();
        let z: f64 = raw.iter().sum();
        DegreeDistribution {
            mass: raw.into_iter().enumerate().map(|(i, w)| (i + 1, w / z)).collect(),
        }
    }

    /// Empirical distribution of a degree sequence.
    pub fn from_degrees(degrees: &[usize]) -> Self {
        let max = degrees.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0usize; max + 1];
        for &d in degrees {
            counts[d] += 1;
        }
        let n = degrees.len() as f64;
        DegreeDistribution {
            mass: counts
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c > 0)
                .map(|(d, c)| (d, c as f64 / n))
                .collect(),
        }
    }

    pub fn of_graph(graph: &Graph) -> Self {
        Self::from_degrees(&graph.nodes().map(|u| graph.degree(u)).collect::<Vec<_>>())
    }

    /// `E[d_UVS] = Σ d θ_d`.
    pub fn uvs_mean(&self) -> f64 {
        self.mass.iter().map(|&(d, p)| d as f64 * p).sum()
    }

    /// `E[d_URW] = Σ d² θ_d / Σ d θ_d`.
    pub fn urw_mean(&self) -> f64 {
        let second: f64 = self.mass.iter().map(|&(d, p)| (d * d) as f64 * p).sum();
        second / self.uvs_mean()
    }
}

/// `(1/Z) Σ_{d=1}^{M} d^{1−a}`.
pub fn expected_degree_uvs(spec: &PowerLawSpec) -> f64 {
    spec.distribution().uvs_mean()
}

/// `(1/(Z·d_avg)) Σ_{d=1}^{M} d^{2−a}`.
pub fn expected_degree_urw(spec: &PowerLawSpec) -> f64 {
    spec.distribution().urw_mean()
}

/// Retries per rejected stub pair before the pair is dropped.
const REWIRE_ATTEMPTS: usize = 200;

/// Configuration model on a prescribed degree sequence. Pairs forming a
/// self-loop or duplicate edge are rewired by a double edge swap with a
/// random accepted edge; pairs that still fail are dropped. Returns the edge
/// list and the number of dropped pairs.
pub fn configuration_model(degrees: &[usize], rng: &mut Rng) -> Result<(Vec<(u32, u32)>, usize)> {
    let n = degrees.len();
    if let Some(d) = degrees.iter().find(|&&d| d >= n.max(1)) {
        return Err(Error::param(format!("degree {d} is infeasible for {n} nodes")));
    }
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(Error::param("degree sequence has an odd sum"));
    }
    let mut stubs: Vec<u32> = degrees
        .iter()
        .enumerate()
        .flat_map(|(u, &d)| std::iter::repeat_n(u as u32, d))
        .collect();
    stubs.shuffle(rng);

    let key = |u: u32, v: u32| (u.min(v), u.max(v));
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(total / 2);
    let mut present: HashSet<(u32, u32)> = HashSet::with_capacity(total / 2);
    let mut rejected = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u != v && present.insert(key(u, v)) {
            edges.push((u, v));
        } else {
            rejected.push((u, v));
        }
    }

    let mut dropped = 0;
    for (u, v) in rejected {
        let mut placed = false;
        for _ in 0..REWIRE_ATTEMPTS {
            if edges.is_empty() {
                break;
            }
            let j = rng.random_range(0..edges.len());
            let (mut x, mut y) = edges[j];
            if rng.random_bool(0.5) {
                std::mem::swap(&mut x, &mut y);
            }
            // (u,v),(x,y) → (u,x),(v,y)
            if u == x || v == y || key(u, x) == key(v, y) {
                continue;
            }
            if present.contains(&key(u, x)) || present.contains(&key(v, y)) {
                continue;
            }
            present.remove(&key(x, y));
            present.insert(key(u, x));
            present.insert(key(v, y));
            edges[j] = (u, x);
            edges.push((v, y));
            placed = true;
            break;
        }
        if !placed {
            dropped += 1;
        }
    }
    Ok((edges, dropped))
}

/// Simple undirected graph on an exact degree sequence, or as close to it as
/// rewiring allows.
pub fn graph_from_degrees(degrees: &[usize], seed: u64) -> Result<(Graph, usize)> {
    let mut rng = seeded(seed);
    let (edges, dropped) = configuration_model(degrees, &mut rng)?;
    Ok((Graph::from_edges(degrees.len(), edges, false)?, dropped))
}

/// Degree sequence drawn i.i.d. from the spec's `θ_d`, with one stub added
/// to make the sum even.
pub fn sample_degrees(spec: &PowerLawSpec, rng: &mut Rng) -> Result<Vec<usize>> {
    spec.validate()?;
    let dist = spec.distribution();
    let index = WeightedIndex::new(dist.mass.iter().map(|(_, p)| *p))
        .map_err(|e| Error::Runtime(format!("degree distribution: {e}")))?;
    let mut degrees: Vec<usize> = (0..spec.node_count).map(|_| dist.mass[index.sample(rng)].0).collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        loop {
            let u = rng.random_range(0..degrees.len());
            if degrees[u] < spec.max_degree {
                degrees[u] += 1;
                break;
            }
        }
    }
    Ok(degrees)
}

pub fn generate_graph(spec: &PowerLawSpec) -> Result<Graph> {
    let mut rng = seeded(spec.seed);
    let degrees = sample_degrees(spec, &mut rng)?;
    let (edges, _) = configuration_model(&degrees, &mut rng)?;
    Graph::from_edges(spec.node_count, edges, false)
}

/// Maximum-likelihood exponent of a power law truncated to `[1, max_degree]`,
/// fitted to the positive entries of `degrees` by golden-section search.
pub fn fit_exponent(degrees: &[usize], max_degree: usize) -> f64 {
    let positive: Vec<f64> = degrees.iter().filter(|&&d| d > 0).map(|&d| (d as f64).ln()).collect();
    let n = positive.len() as f64;
    let sum_ln: f64 = positive.iter().sum();
    let nll = |a: f64| {
        let z: f64 = (1..=max_degree).map(|d| (d as f64).powf(-a)).sum();
        a * sum_ln + n * z.ln()
    };
    let (mut lo, mut hi) = (1.0001f64, 6.0f64);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if nll(m1) < nll(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    (lo + hi) / 2.0
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SeedRule {
    #[default]
    Uniform,
    Degree,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSpec {
    pub cascade_count: usize,
    pub seed_rule: SeedRule,
    /// Per-edge transmission probability.
    pub transmit_prob: f64,
    /// Success probability of the geometric delay; delays are `1 + failures`.
    pub delay_q: f64,
    /// Latest tick any participation may have; start ticks are uniform on
    /// `[0, horizon]`.
    pub horizon: Tick,
    pub seed: u64,
}

impl DiffusionSpec {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.transmit_prob) {
            return Err(Error::param(format!("transmit probability {} outside [0, 1]", self.transmit_prob)));
        }
        if !(self.delay_q > 0.0 && self.delay_q <= 1.0) {
            return Err(Error::param(format!("delay parameter {} outside (0, 1]", self.delay_q)));
        }
        Ok(())
    }
}

/// RNG streams of one cascade: seed choice/start tick, transmission coin
/// flips, and delays.
pub struct CascadeStreams {
    pub control: Rng,
    pub transmit: Rng,
    pub delay: Rng,
}

impl CascadeStreams {
    pub fn new(seed: u64, cascade: u64) -> Self {
        CascadeStreams {
            control: stream(seed, 3 * cascade),
            transmit: stream(seed, 3 * cascade + 1),
            delay: stream(seed, 3 * cascade + 2),
        }
    }
}

/// Geometric delay with support `{1, 2, ...}`.
pub fn draw_delay(q: f64, rng: &mut Rng) -> Tick {
    let geo = Geometric::new(q).expect("delay parameter validated");
    1 + geo.sample(rng)
}

/// Breadth-wise transmission from `origin` at `start`: each newly reached
/// node tries every not-yet-reached neighbour once with `transmit_prob`;
/// a node's tick is its earliest successful arrival. Arrivals after
/// `deadline` and nodes with `active[u] == false` are ignored.
#[allow(clippy::too_many_arguments)]
pub fn diffuse_from(
    graph: &Graph,
    origin: NodeId,
    start: Tick,
    transmit_prob: f64,
    delay_q: f64,
    deadline: Tick,
    active: Option<&[bool]>,
    streams: &mut CascadeStreams,
) -> Vec<(NodeId, Tick)> {
    let is_active = |u: NodeId| active.is_none_or(|a| a[u.index()]);
    let mut reached: Vec<(NodeId, Tick)> = Vec::new();
    let mut done: HashSet<NodeId> = HashSet::new();
    let mut best: std::collections::HashMap<NodeId, Tick> = std::collections::HashMap::new();
    let mut frontier = BinaryHeap::new();
    frontier.push(Reverse((start, origin)));
    best.insert(origin, start);
    while let Some(Reverse((t, u))) = frontier.pop() {
        if !done.insert(u) {
            continue;
        }
        reached.push((u, t));
        for &v in graph.neighbors(u) {
            if done.contains(&v) || !is_active(v) {
                continue;
            }
            if !streams.transmit.random_bool(transmit_prob) {
                continue;
            }
            let at = t + draw_delay(delay_q, &mut streams.delay);
            if at > deadline {
                continue;
            }
            if best.get(&v).is_none_or(|&b| at < b) {
                best.insert(v, at);
                frontier.push(Reverse((at, v)));
            }
        }
    }
    reached
}

fn pick_origin(graph: &Graph, rule: SeedRule, pool: &[NodeId], rng: &mut Rng) -> NodeId {
    match rule {
        SeedRule::Uniform => pool[rng.random_range(0..pool.len())],
        SeedRule::Degree => {
            let total: usize = pool.iter().map(|&u| graph.degree(u)).sum();
            if total == 0 {
                return pool[rng.random_range(0..pool.len())];
            }
            let mut r = rng.random_range(0..total);
            for &u in pool {
                let d = graph.degree(u);
                if r < d {
                    return u;
                }
                r -= d;
            }
            unreachable!("r < total")
        }
    }
}

pub fn generate_cascades(graph: &Graph, spec: &DiffusionSpec) -> Result<CascadeLog> {
    spec.validate()?;
    if graph.node_count() == 0 {
        return Err(Error::param("cannot diffuse on an empty graph"));
    }
    let pool: Vec<NodeId> = graph.nodes().collect();
    let mut records = Vec::new();
    for c in 0..spec.cascade_count as u64 {
        let mut streams = CascadeStreams::new(spec.seed, c);
        let start = streams.control.random_range(0..=spec.horizon);
        let origin = pick_origin(graph, spec.seed_rule, &pool, &mut streams.control);
        for (u, t) in diffuse_from(
            graph,
            origin,
            start,
            spec.transmit_prob,
            spec.delay_q,
            spec.horizon,
            None,
            &mut streams,
        ) {
            records.push((c, u, t));
        }
    }
    Ok(CascadeLog::from_records(graph.node_count(), records))
}

/// Windowed generation with node churn: cascades of window `w` start in
/// `[w·width, (w+1)·width)`, end within it, and only reach currently active
/// nodes. Between windows a fraction of the active nodes drops out for good
/// and is replaced by never-active nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChurnSpec {
    pub windows: usize,
    pub window_width: Tick,
    /// Fraction of nodes active in window 0.
    pub active_fraction: f64,
    /// Fraction of active nodes replaced at each window boundary.
    pub churn_fraction: f64,
}

#[derive(Clone, Debug)]
pub struct ChurnedLog {
    pub log: CascadeLog,
    /// Active mask of each window.
    pub active: Vec<Vec<bool>>,
}

/// `spec.cascade_count` cascades per window; `spec.horizon` is ignored in
/// favour of window ends.
pub fn generate_churned(graph: &Graph, spec: &DiffusionSpec, churn: &ChurnSpec) -> Result<ChurnedLog> {
    spec.validate()?;
    if churn.window_width == 0 || churn.windows == 0 {
        return Err(Error::param("churn needs at least one window of positive width"));
    }
    if !(churn.active_fraction > 0.0 && churn.active_fraction <= 1.0)
        || !(0.0..=1.0).contains(&churn.churn_fraction)
    {
        return Err(Error::param("active and churn fractions must lie in [0, 1]"));
    }
    let n = graph.node_count();
    let mut rng = stream(spec.seed, u64::MAX);
    let mut order: Vec<NodeId> = graph.nodes().collect();
    order.shuffle(&mut rng);
    let initial = ((n as f64 * churn.active_fraction).round() as usize).clamp(1, n);
    let mut active_list: Vec<NodeId> = order[..initial].to_vec();
    let mut reserve: Vec<NodeId> = order[initial..].to_vec();
    let mut masks = Vec::with_capacity(churn.windows);
    let mut records = Vec::new();
    let mut next_id = 0u64;
    for w in 0..churn.windows {
        if w > 0 {
            let k = ((active_list.len() as f64 * churn.churn_fraction).round() as usize)
                .min(reserve.len())
                .min(active_list.len());
            active_list.shuffle(&mut rng);
            active_list.truncate(active_list.len() - k);
            active_list.extend(reserve.drain(..k));
        }
        let mut mask = vec![false; n];
        for u in &active_list {
            mask[u.index()] = true;
        }
        let mut pool = active_list.clone();
        pool.sort_unstable();
        let lo = w as Tick * churn.window_width;
        let hi = lo + churn.window_width - 1;
        for _ in 0..spec.cascade_count {
            let c = next_id;
            next_id += 1;
            let mut streams = CascadeStreams::new(spec.seed, c);
            let start = streams.control.random_range(lo..=hi);
            let origin = pick_origin(graph, spec.seed_rule, &pool, &mut streams.control);
            for (u, t) in diffuse_from(
                graph,
                origin,
                start,
                spec.transmit_prob,
                spec.delay_q,
                hi,
                Some(&mask),
                &mut streams,
            ) {
                records.push((c, u, t));
            }
        }
        masks.push(mask);
    }
    Ok(ChurnedLog {
        log: CascadeLog::from_records(n, records),
        active: masks,
    })
}

/// Sets each node's activity to the number of cascades it joined.
pub fn with_participation_activity(graph: Graph, log: &CascadeLog) -> Result<Graph> {
    let activity = graph.nodes().map(|u| log.participations(u).len() as f64).collect();
    graph.with_activity(activity)
}

/// Graph plus cascades plus activity, the standard synthetic instance.
pub fn generate_instance(graph_spec: &PowerLawSpec, diffusion: &DiffusionSpec) -> Result<(Graph, CascadeLog)> {
    let graph = generate_graph(graph_spec)?;
    let log = generate_cascades(&graph, diffusion)?;
    let graph = with_participation_activity(graph, &log)?;
    Ok((graph, log))
}
