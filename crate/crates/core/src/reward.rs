//! Incremental evaluation of the timeliness-weighted coverage reward
//!
//! `F(S) = Σ_c size(c) / (1 + min_{u∈S} (t_cu − t_c))`
//!
//! and of marginal gains `δ_s(S) = F(S ∪ {s}) − F(S)`. A [`SelectionState`]
//! keeps the best (smallest) detection delay per cascade, so a gain only
//! touches the cascades the candidate joined.
//!
//! Every gain computation is counted; that counter is the cost unit used for
//! speedup figures throughout the crate.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::model::{CascadeLog, NodeId, Tick};

/// Reward of one cascade as a function of its size and of the delay between
/// its start and the earliest sensor participation.
///
/// Implementations must be non-increasing in `delay` for the resulting set
/// function to be monotone submodular.
pub trait CascadeReward: Sync {
    fn value(&self, size: usize, delay: Tick) -> f64;
}

/// `size / (1 + delay)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Timeliness;

impl CascadeReward for Timeliness {
    #[inline]
    fn value(&self, size: usize, delay: Tick) -> f64 {
        size as f64 / (1.0 + delay as f64)
    }
}

#[derive(Debug)]
pub struct SelectionState {
    sensors: Vec<NodeId>,
    is_sensor: Vec<bool>,
    best_delay: Vec<Option<Tick>>,
    total_reward: f64,
    gain_evals: AtomicU64,
}

impl Clone for SelectionState {
    fn clone(&self) -> Self {
        SelectionState {
            sensors: self.sensors.clone(),
            is_sensor: self.is_sensor.clone(),
            best_delay: self.best_delay.clone(),
            total_reward: self.total_reward,
            gain_evals: AtomicU64::new(self.gain_evals()),
        }
    }
}

impl SelectionState {
    pub fn sensors(&self) -> &[NodeId] {
        &self.sensors
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }

    #[inline]
    pub fn is_sensor(&self, u: NodeId) -> bool {
        self.is_sensor.get(u.index()).copied().unwrap_or(false)
    }

    pub fn best_delays(&self) -> &[Option<Tick>] {
        &self.best_delay
    }

    /// Running `F(S)`, accumulated from committed gains.
    pub fn total_reward(&self) -> f64 {
        self.total_reward
    }

    pub fn gain_evals(&self) -> u64 {
        self.gain_evals.load(Ordering::Relaxed)
    }
}

pub struct RewardEngine<'a, R: CascadeReward = Timeliness> {
    log: &'a CascadeLog,
    reward: R,
}

impl<'a> RewardEngine<'a, Timeliness> {
    pub fn new(log: &'a CascadeLog) -> Self {
        RewardEngine {
            log,
            reward: Timeliness,
        }
    }
}

impl<'a, R: CascadeReward> RewardEngine<'a, R> {
    pub fn with_reward(log: &'a CascadeLog, reward: R) -> Self {
        RewardEngine { log, reward }
    }

    pub fn log(&self) -> &'a CascadeLog {
        self.log
    }

    pub fn node_count(&self) -> usize {
        self.log.node_count()
    }

    /// The empty sensor set.
    pub fn state(&self) -> SelectionState {
        SelectionState {
            sensors: Vec::new(),
            is_sensor: vec![false; self.log.node_count()],
            best_delay: vec![None; self.log.cascade_count()],
            total_reward: 0.0,
            gain_evals: AtomicU64::new(0),
        }
    }

    /// `F(S)` recomputed from the per-cascade best delays.
    pub fn reward(&self, state: &SelectionState) -> f64 {
        self.log
            .cascades()
            .iter()
            .zip(&state.best_delay)
            .filter_map(|(c, d)| d.map(|d| self.reward.value(c.size(), d)))
            .sum()
    }

    /// `F(S)` for an arbitrary node set, from scratch and without touching any
    /// counter. Duplicate nodes are harmless.
    pub fn evaluate(&self, sensors: &[NodeId]) -> f64 {
        let mut best: Vec<Option<Tick>> = vec![None; self.log.cascade_count()];
        for &s in sensors {
            for &(c, t) in self.log.participations(s) {
                let delay = t - self.log.cascade(c).start();
                let slot = &mut best[c.index()];
                *slot = Some(slot.map_or(delay, |d| d.min(delay)));
            }
        }
        self.log
            .cascades()
            .iter()
            .zip(&best)
            .filter_map(|(c, d)| d.map(|d| self.reward.value(c.size(), d)))
            .sum()
    }

    fn check(&self, state: &SelectionState, s: NodeId) -> Result<()> {
        if s.index() >= self.log.node_count() {
            return Err(Error::NodeOutOfRange(s.0));
        }
        if state.is_sensor(s) {
            return Err(Error::AlreadySensor(s.0));
        }
        Ok(())
    }

    #[inline]
    fn gain_unchecked(&self, state: &SelectionState, s: NodeId) -> f64 {
        let mut gain = 0.0;
        for &(c, t) in self.log.participations(s) {
            let cascade = self.log.cascade(c);
            let delay = t - cascade.start();
            match state.best_delay[c.index()] {
                None => gain += self.reward.value(cascade.size(), delay),
                Some(cur) if delay < cur => {
                    gain += self.reward.value(cascade.size(), delay)
                        - self.reward.value(cascade.size(), cur)
                }
                Some(_) => {}
            }
        }
        gain
    }

    /// `δ_s(S)`. Counts one gain evaluation.
    pub fn marginal_gain(&self, state: &SelectionState, s: NodeId) -> Result<f64> {
        self.check(state, s)?;
        state.gain_evals.fetch_add(1, Ordering::Relaxed);
        Ok(self.gain_unchecked(state, s))
    }

    /// Adds `s` to the sensor set and returns the gain it contributed. Does
    /// not count as a gain evaluation.
    pub fn commit(&self, state: &mut SelectionState, s: NodeId) -> Result<f64> {
        self.check(state, s)?;
        let gain = self.gain_unchecked(state, s);
        for &(c, t) in self.log.participations(s) {
            let delay = t - self.log.cascade(c).start();
            let slot = &mut state.best_delay[c.index()];
            *slot = Some(slot.map_or(delay, |d| d.min(delay)));
        }
        state.is_sensor[s.index()] = true;
        state.sensors.push(s);
        state.total_reward += gain;
        Ok(gain)
    }
}

/// Key used to compare gains: equal after rounding to 1e-12.
#[inline]
pub(crate) fn gain_key(gain: f64) -> f64 {
    (gain * 1e12).round()
}
