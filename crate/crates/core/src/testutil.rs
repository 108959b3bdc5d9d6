use rand::Rng as _;

use crate::model::{CascadeLog, NodeId};
use crate::rng::seeded;

/// Nodes a=0, b=1, c=2, d=3; c1 = {a@0, b@2, d@5}, c2 = {b@10, d@11}.
pub fn two_cascades() -> CascadeLog {
    CascadeLog::from_records(
        4,
        [
            (1, NodeId(0), 0),
            (1, NodeId(1), 2),
            (1, NodeId(3), 5),
            (2, NodeId(1), 10),
            (2, NodeId(3), 11),
        ],
    )
}

pub fn random_log(nodes: usize, cascades: usize, seed: u64) -> CascadeLog {
    let mut rng = seeded(seed);
    let mut records = Vec::new();
    for c in 0..cascades as u64 {
        let size = rng.random_range(1..=nodes.min(8));
        let start = rng.random_range(0..50u64);
        for _ in 0..size {
            let u = NodeId(rng.random_range(0..nodes as u32));
            records.push((c, u, start + rng.random_range(0..10u64)));
        }
    }
    CascadeLog::from_records(nodes, records)
}
