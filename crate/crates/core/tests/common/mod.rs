#![allow(dead_code)]

use rand::Rng as _;
use sensorplace::model::{CascadeLog, Graph, NodeId};
use sensorplace::rng::seeded;
use sensorplace::synthgen::{generate_instance, DiffusionSpec, PowerLawSpec, SeedRule};

/// Small random instance: a ring plus random chords, and up to 30 cascades
/// of up to 6 participants. Returns the graph, the log and a budget in 1..=4.
pub fn small_instance(seed: u64) -> (Graph, CascadeLog, usize) {
    let mut rng = seeded(seed);
    let n = rng.random_range(4..=20usize);
    let budget = rng.random_range(1..=4usize);
    let cascades = rng.random_range(1..=30u64);
    let mut edges: Vec<(u32, u32)> = (0..n as u32).map(|u| (u, (u + 1) % n as u32)).collect();
    for u in 0..n as u32 {
        for v in u + 2..n as u32 {
            if rng.random_bool(0.15) {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::from_edges(n, edges, false).unwrap();
    let mut records = Vec::new();
    for c in 0..cascades {
        let start = rng.random_range(0..20u64);
        let size = rng.random_range(1..=n.min(6));
        for i in 0..size {
            let u = NodeId(rng.random_range(0..n as u32));
            let t = if i == 0 { start } else { start + rng.random_range(0..8u64) };
            records.push((c, u, t));
        }
    }
    (graph, CascadeLog::from_records(n, records), budget)
}

/// Random log over `n` nodes with heavy-tailed node popularity, which makes
/// gains uneven the way real logs do.
pub fn skewed_log(n: usize, cascades: usize, seed: u64) -> CascadeLog {
    let mut rng = seeded(seed);
    let mut records = Vec::new();
    for c in 0..cascades as u64 {
        let size = rng.random_range(1..=12usize);
        let start = rng.random_range(0..1000u64);
        for i in 0..size {
            let x: f64 = rng.random();
            let u = ((n as f64) * x.powi(3)) as u32;
            let t = if i == 0 { start } else { start + rng.random_range(0..50u64) };
            records.push((c, NodeId(u.min(n as u32 - 1)), t));
        }
    }
    CascadeLog::from_records(n, records)
}

pub fn power_law_instance(
    nodes: usize,
    max_degree: usize,
    cascades: usize,
    transmit_prob: f64,
    seed: u64,
) -> (Graph, CascadeLog) {
    let graph_spec = PowerLawSpec { node_count: nodes, exponent: 2.5, max_degree, seed };
    let diffusion = DiffusionSpec {
        cascade_count: cascades,
        seed_rule: SeedRule::Uniform,
        transmit_prob,
        delay_q: 0.5,
        horizon: 24 * 28,
        seed: seed.wrapping_add(1_000_003),
    };
    generate_instance(&graph_spec, &diffusion).unwrap()
}
