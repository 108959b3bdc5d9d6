//! Graph, cascade log and time model shared by every other module, plus the
//! TSV readers and writers.
//!
//! External node and cascade ids may be sparse; both are remapped to dense
//! indices in ascending external-id order, so `NodeId` order agrees with the
//! order of the ids in the input files.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index in `0..node_count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense cascade index in `0..cascade_count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CascadeId(pub u32);

impl CascadeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Non-negative integer time. A missing participation is represented by the
/// absence of a record, never by a sentinel tick.
pub type Tick = u64;

#[derive(Clone, Debug)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    activity: Vec<f64>,
    external: Vec<u64>,
    lookup: HashMap<u64, NodeId>,
    directed: bool,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph over nodes `0..node_count` whose external ids equal
    /// their dense ids. Self-loops are skipped and duplicates collapsed.
    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
        directed: bool,
    ) -> Result<Graph> {
        let mut builder = GraphBuilder::new(directed);
        for id in 0..node_count as u64 {
            builder.add_node(id);
        }
        for (u, v) in edges {
            if u as usize >= node_count || v as usize >= node_count {
                return Err(Error::param(format!(
                    "edge ({u}, {v}) references a node outside 0..{node_count}"
                )));
            }
            builder.add_edge(u as u64, v as u64);
        }
        Ok(builder.build().0)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of distinct edges (unordered pairs when undirected).
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.adjacency.len() as u32).map(NodeId)
    }

    /// Neighbours in ascending `NodeId` order.
    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adjacency[u.index()]
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u.index()].len()
    }

    #[inline]
    pub fn activity(&self, u: NodeId) -> f64 {
        self.activity[u.index()]
    }

    pub fn activities(&self) -> &[f64] {
        &self.activity
    }

    pub fn external_id(&self, u: NodeId) -> u64 {
        self.external[u.index()]
    }

    pub fn node(&self, external: u64) -> Option<NodeId> {
        self.lookup.get(&external).copied()
    }

    pub fn contains(&self, u: NodeId) -> bool {
        u.index() < self.adjacency.len()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.adjacency.is_empty() {
            return 0.0;
        }
        let total: usize = self.adjacency.iter().map(Vec::len).sum();
        total as f64 / self.adjacency.len() as f64
    }

    /// Replaces the activity attribute; `activity` must have one
    /// non-negative entry per node.
    pub fn with_activity(mut self, activity: Vec<f64>) -> Result<Graph> {
        if activity.len() != self.node_count() {
            return Err(Error::param(format!(
                "activity has {} entries for {} nodes",
                activity.len(),
                self.node_count()
            )));
        }
        if let Some(bad) = activity.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
            return Err(Error::param(format!("activity {bad} is not a finite non-negative value")));
        }
        self.activity = activity;
        Ok(self)
    }

    /// Edges as dense pairs; undirected edges are reported once with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        let directed = self.directed;
        self.adjacency.iter().enumerate().flat_map(move |(u, nbrs)| {
            let u = NodeId(u as u32);
            nbrs.iter()
                .filter(move |v| directed || u < **v)
                .map(move |v| (u, *v))
        })
    }

    pub fn write_edges(&self, path: &Path) -> Result<()> {
        write_lines(path, |w| self.write_edges_to(w))
    }

    /// Edge list in the format read by [`load_graph`].
    pub fn write_edges_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{}\t{}", self.external_id(u), self.external_id(v))?;
        }
        Ok(())
    }

    pub fn write_attributes(&self, path: &Path) -> Result<()> {
        write_lines(path, |w| self.write_attributes_to(w))
    }

    pub fn write_attributes_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        for u in self.nodes() {
            writeln!(w, "{}\t{}", self.external_id(u), self.activity(u))?;
        }
        Ok(())
    }
}

/// Accumulates edges keyed by external ids and produces a [`Graph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    directed: bool,
    nodes: BTreeSet<u64>,
    edges: Vec<(u64, u64)>,
    activity: BTreeMap<u64, f64>,
    self_loops: usize,
}

impl GraphBuilder {
    pub fn new(directed: bool) -> Self {
        GraphBuilder {
            directed,
            ..Default::default()
        }
    }

    pub fn add_node(&mut self, id: u64) {
        self.nodes.insert(id);
    }

    /// Returns `false` (and counts it) when the edge is a self-loop.
    pub fn add_edge(&mut self, src: u64, dst: u64) -> bool {
        if src == dst {
            self.self_loops += 1;
            return false;
        }
        self.nodes.insert(src);
        self.nodes.insert(dst);
        self.edges.push((src, dst));
        true
    }

    pub fn set_activity(&mut self, id: u64, activity: f64) {
        self.nodes.insert(id);
        self.activity.insert(id, activity);
    }

    pub fn build(self) -> (Graph, GraphReport) {
        let external: Vec<u64> = self.nodes.into_iter().collect();
        let lookup: HashMap<u64, NodeId> = external
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, NodeId(i as u32)))
            .collect();
        let mut adjacency = vec![Vec::new(); external.len()];
        for &(s, d) in &self.edges {
            let (s, d) = (lookup[&s], lookup[&d]);
            adjacency[s.index()].push(d);
            if !self.directed {
                adjacency[d.index()].push(s);
            }
        }
        let mut stored = 0usize;
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
            stored += nbrs.len();
        }
        let edge_count = if self.directed { stored } else { stored / 2 };
        let activity = external
            .iter()
            .map(|id| self.activity.get(id).copied().unwrap_or(0.0))
            .collect();
        let report = GraphReport {
            self_loops: self.self_loops,
            duplicate_edges: self.edges.len() - edge_count,
        };
        let graph = Graph {
            adjacency,
            activity,
            external,
            lookup,
            directed: self.directed,
            edge_count,
        };
        (graph, report)
    }
}

/// Warning counters from graph ingestion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphReport {
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

/// Reads a TSV edge list (`src \t dst`) and an optional attribute file
/// (`node \t activity`). Lines starting with `#` and blank lines are ignored.
pub fn load_graph(
    edge_path: &Path,
    attr_path: Option<&Path>,
    directed: bool,
) -> Result<(Graph, GraphReport)> {
    let mut builder = GraphBuilder::new(directed);
    for_each_record(edge_path, |line, fields| {
        let [src, dst] = expect_fields::<2>(edge_path, line, fields)?;
        let src = parse_u64(edge_path, line, src, "source node")?;
        let dst = parse_u64(edge_path, line, dst, "target node")?;
        builder.add_edge(src, dst);
        Ok(())
    })?;
    if let Some(attr_path) = attr_path {
        for_each_record(attr_path, |line, fields| {
            let [node, activity] = expect_fields::<2>(attr_path, line, fields)?;
            let node = parse_u64(attr_path, line, node, "node")?;
            let activity: f64 = activity.parse().map_err(|_| Error::Parse {
                path: attr_path.to_path_buf(),
                line,
                message: format!("activity {activity:?} is not a number"),
            })?;
            if !(activity >= 0.0) || !activity.is_finite() {
                return Err(Error::Parse {
                    path: attr_path.to_path_buf(),
                    line,
                    message: format!("activity {activity} must be finite and non-negative"),
                });
            }
            builder.set_activity(node, activity);
            Ok(())
        })?;
    }
    Ok(builder.build())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Participation {
    pub node: NodeId,
    pub tick: Tick,
}

#[derive(Clone, Debug)]
pub struct Cascade {
    external: u64,
    events: Vec<Participation>,
}

impl Cascade {
    pub fn external_id(&self) -> u64 {
        self.external
    }

    /// Participations sorted by `(tick, node)`.
    pub fn events(&self) -> &[Participation] {
        &self.events
    }

    pub fn size(&self) -> usize {
        self.events.len()
    }

    /// `t_c`, the earliest participation tick.
    pub fn start(&self) -> Tick {
        self.events[0].tick
    }

    pub fn tick_of(&self, node: NodeId) -> Option<Tick> {
        self.events.iter().find(|p| p.node == node).map(|p| p.tick)
    }

    /// Start tick of the earliest `bucket_width`-wide bucket holding the most
    /// participations. Buckets are aligned to the cascade start.
    pub fn peak_time(&self, bucket_width: Tick) -> Tick {
        let start = self.start();
        let mut best = (0usize, start);
        let mut current = (usize::MAX as Tick, 0usize);
        for p in &self.events {
            let bucket = (p.tick - start) / bucket_width;
            if bucket == current.0 {
                current.1 += 1;
            } else {
                current = (bucket, 1);
            }
            if current.1 > best.0 {
                best = (current.1, start + bucket * bucket_width);
            }
        }
        best.1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeStats {
    pub size: usize,
    pub start: Tick,
    pub peak_time: Tick,
}

/// What to do with a cascade record naming a node absent from the graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnknownNodePolicy {
    #[default]
    Reject,
    Drop,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub records: usize,
    pub duplicate_records: usize,
    pub dropped_records: usize,
}

/// Per-cascade participation records plus the node → (cascade, tick)
/// inverted index used for incremental gain evaluation.
#[derive(Clone, Debug)]
pub struct CascadeLog {
    cascades: Vec<Cascade>,
    index: Vec<Vec<(CascadeId, Tick)>>,
    lookup: HashMap<u64, CascadeId>,
}

impl CascadeLog {
    /// Builds a log from `(external cascade id, node, tick)` records.
    /// Repeated `(cascade, node)` pairs collapse to the earliest tick.
    pub fn from_records(
        node_count: usize,
        records: impl IntoIterator<Item = (u64, NodeId, Tick)>,
    ) -> CascadeLog {
        Self::collect(node_count, records).0
    }

    fn collect(
        node_count: usize,
        records: impl IntoIterator<Item = (u64, NodeId, Tick)>,
    ) -> (CascadeLog, usize) {
        let mut first: BTreeMap<u64, HashMap<NodeId, Tick>> = BTreeMap::new();
        let mut duplicates = 0;
        for (c, node, tick) in records {
            assert!(node.index() < node_count, "node {node} out of range");
            let slot = first.entry(c).or_default();
            match slot.get_mut(&node) {
                Some(t) => {
                    duplicates += 1;
                    *t = (*t).min(tick);
                }
                None => {
                    slot.insert(node, tick);
                }
            }
        }
        let mut cascades = Vec::with_capacity(first.len());
        let mut lookup = HashMap::with_capacity(first.len());
        let mut index = vec![Vec::new(); node_count];
        for (i, (external, parts)) in first.into_iter().enumerate() {
            let id = CascadeId(i as u32);
            let mut events: Vec<Participation> = parts
                .into_iter()
                .map(|(node, tick)| Participation { node, tick })
                .collect();
            events.sort_unstable_by_key(|p| (p.tick, p.node));
            for p in &events {
                index[p.node.index()].push((id, p.tick));
            }
            lookup.insert(external, id);
            cascades.push(Cascade { external, events });
        }
        (
            CascadeLog {
                cascades,
                index,
                lookup,
            },
            duplicates,
        )
    }

    pub fn node_count(&self) -> usize {
        self.index.len()
    }

    pub fn cascade_count(&self) -> usize {
        self.cascades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cascades.is_empty()
    }

    pub fn cascades(&self) -> &[Cascade] {
        &self.cascades
    }

    #[inline]
    pub fn cascade(&self, c: CascadeId) -> &Cascade {
        &self.cascades[c.index()]
    }

    pub fn cascade_id(&self, external: u64) -> Option<CascadeId> {
        self.lookup.get(&external).copied()
    }

    /// Cascades `u` joined, with its participation tick, ascending by cascade.
    #[inline]
    pub fn participations(&self, u: NodeId) -> &[(CascadeId, Tick)] {
        &self.index[u.index()]
    }

    /// Nodes with at least one participation, ascending.
    pub fn participants(&self) -> Vec<NodeId> {
        (0..self.index.len())
            .filter(|&u| !self.index[u].is_empty())
            .map(|u| NodeId(u as u32))
            .collect()
    }

    pub fn event_count(&self) -> usize {
        self.cascades.iter().map(Cascade::size).sum()
    }

    /// Size, start and peak time of the cascade with external id `external`.
    pub fn stats(&self, external: u64, bucket_width: Tick) -> Result<CascadeStats> {
        if bucket_width == 0 {
            return Err(Error::param("bucket width must be at least 1"));
        }
        let c = self
            .cascade_id(external)
            .ok_or(Error::UnknownCascade(external))?;
        let cascade = self.cascade(c);
        Ok(CascadeStats {
            size: cascade.size(),
            start: cascade.start(),
            peak_time: cascade.peak_time(bucket_width),
        })
    }

    /// All `(external cascade id, node, tick)` records in cascade order.
    pub fn records(&self) -> impl Iterator<Item = (u64, NodeId, Tick)> + '_ {
        self.cascades
            .iter()
            .flat_map(|c| c.events.iter().map(move |p| (c.external, p.node, p.tick)))
    }

    /// Keeps cascades accepted by `keep`, and within them only events with a
    /// tick strictly below `tick_limit` when one is given. Cascades left with
    /// no events are dropped. External ids are preserved.
    pub fn restrict(&self, keep: impl Fn(&Cascade) -> bool, tick_limit: Option<Tick>) -> CascadeLog {
        let records = self
            .cascades
            .iter()
            .filter(|c| keep(c))
            .flat_map(|c| {
                c.events
                    .iter()
                    .filter(move |p| tick_limit.is_none_or(|limit| p.tick < limit))
                    .map(move |p| (c.external, p.node, p.tick))
            });
        CascadeLog::from_records(self.node_count(), records)
    }

    pub fn write(&self, path: &Path, graph: &Graph) -> Result<()> {
        write_lines(path, |w| self.write_to(w, graph))
    }

    /// Records in the format read by [`load_cascades`].
    pub fn write_to(&self, w: &mut impl Write, graph: &Graph) -> std::io::Result<()> {
        for (c, node, tick) in self.records() {
            writeln!(w, "{}\t{}\t{}", c, graph.external_id(node), tick)?;
        }
        Ok(())
    }
}

/// Reads a TSV cascade file (`cascade \t node \t tick`) against `graph`.
pub fn load_cascades(
    path: &Path,
    graph: &Graph,
    policy: UnknownNodePolicy,
) -> Result<(CascadeLog, CascadeReport)> {
    let mut records = Vec::new();
    let mut dropped = 0;
    for_each_record(path, |line, fields| {
        let [c, node, tick] = expect_fields::<3>(path, line, fields)?;
        let c = parse_u64(path, line, c, "cascade id")?;
        let node = parse_u64(path, line, node, "node")?;
        let tick: i64 = tick.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("tick {tick:?} is not an integer"),
        })?;
        if tick < 0 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("negative tick {tick}"),
            });
        }
        match graph.node(node) {
            Some(id) => records.push((c, id, tick as Tick)),
            None => match policy {
                UnknownNodePolicy::Reject => {
                    return Err(Error::UnknownNode {
                        path: path.to_path_buf(),
                        line,
                        node,
                    })
                }
                UnknownNodePolicy::Drop => dropped += 1,
            },
        }
        Ok(())
    })?;
    let count = records.len();
    let (log, duplicate_records) = CascadeLog::collect(graph.node_count(), records);
    Ok((
        log,
        CascadeReport {
            records: count,
            duplicate_records,
            dropped_records: dropped,
        },
    ))
}

fn for_each_record(
    path: &Path,
    mut f: impl FnMut(usize, Vec<&str>) -> Result<()>,
) -> Result<()> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        f(i + 1, line.split('\t').map(str::trim).collect())?;
    }
    Ok(())
}

fn expect_fields<'a, const N: usize>(path: &Path, line: usize, fields: Vec<&'a str>) -> Result<[&'a str; N]> {
    let found = fields.len();
    fields.try_into().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("expected {N} tab-separated fields, found {found}"),
    })
}

fn parse_u64(path: &Path, line: usize, field: &str, what: &str) -> Result<u64> {
    field.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("{what} {field:?} is not a non-negative integer"),
    })
}

pub(crate) fn write_lines(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}
