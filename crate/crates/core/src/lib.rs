//! Social sensor selection on cascade-annotated graphs.
//!
//! A sensor set is scored by how many large cascades it sees and how early
//! ([`reward`]). Sensors are picked greedily, either by full scans
//! ([`selectors::exact_greedy`], [`selectors::lazy_greedy`]) or from sampled
//! candidate sets ([`selectors::framework_greedy`], [`samplers`]), with the
//! probability machinery for sizing those samples in [`sampling_math`].
//! [`synthgen`] produces reproducible test graphs and cascade logs, and
//! [`eval`] runs the experiments and metrics behind the `sensorplace` binary.

// `!(x >= lo)` range checks are written to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod eval;
pub mod model;
pub mod reward;
pub mod rng;
pub mod samplers;
pub mod sampling_math;
pub mod selectors;
pub mod synthgen;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Category, Error, Result};
pub use model::{Cascade, CascadeId, CascadeLog, Graph, NodeId, Tick};
pub use reward::{CascadeReward, RewardEngine, SelectionState, Timeliness};
pub use selectors::{FrameworkConfig, SelectionResult};
