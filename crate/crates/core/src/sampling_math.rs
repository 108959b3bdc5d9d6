//! Probability that a uniformly drawn candidate set hits the top `α%` of
//! nodes, the candidate count needed for a given confidence, and the
//! expected cover ratio bound for per-round sampling.
//!
//! `α` is a percentage in `(0, 100]` throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `P(|S̃ ∩ S*_α| ≥ k)` for `draw` nodes sampled without replacement from a
/// population of `population` nodes of which `top` are in `S*_α`.
///
/// The pmf is built by the term-ratio recurrence in log space and then
/// normalised, so no binomial coefficient is ever formed and the result stays
/// accurate for populations of 10^8 and beyond.
pub fn prob_overlap_at_least(population: u64, top: u64, draw: u64, k: u64) -> Result<f64> {
    if top > population {
        return Err(Error::param(format!("top {top} exceeds population {population}")));
    }
    if draw > population {
        return Err(Error::param(format!("draw {draw} exceeds population {population}")));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let lo = (draw + top).saturating_sub(population);
    let hi = top.min(draw);
    if k > hi {
        return Ok(0.0);
    }
    if k <= lo {
        return Ok(1.0);
    }
    // log pmf relative to the pmf at `lo`
    let rest = (population - top) as f64;
    let (top, draw) = (top as f64, draw as f64);
    let mut log_terms = Vec::with_capacity((hi - lo + 1) as usize);
    let mut acc = 0.0f64;
    log_terms.push(acc);
    for i in lo..hi {
        let i = i as f64;
        acc += ((top - i) * (draw - i)).ln() - ((i + 1.0) * (rest - draw + i + 1.0)).ln();
        log_terms.push(acc);
    }
    let max = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let split = (k - lo) as usize;
    let below: f64 = log_terms[..split].iter().map(|l| (l - max).exp()).sum();
    let above: f64 = log_terms[split..].iter().map(|l| (l - max).exp()).sum();
    Ok((above / (below + above)).clamp(0.0, 1.0))
}

/// With-replacement approximation `1 − (1 − α/100)^draw` of
/// [`prob_overlap_at_least`] at `k = 1`.
pub fn prob_at_least_one(alpha: f64, draw: u64) -> f64 {
    if draw == 0 {
        return 0.0;
    }
    if alpha >= 100.0 {
        return 1.0;
    }
    -((draw as f64) * (-alpha / 100.0).ln_1p()).exp_m1()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeSpec {
    pub p: f64,
    pub alpha: f64,
    pub xi: u64,
}

impl SampleSizeSpec {
    /// `prob_at_least_one(alpha, xi)`.
    pub fn achieved(&self) -> f64 {
        prob_at_least_one(self.alpha, self.xi)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 100.0) {
        return Err(Error::param(format!("alpha {alpha} must lie in (0, 100]")));
    }
    Ok(())
}

/// `ξ_p(α) = max(1, ⌈ln(1−p) / ln(1−α/100)⌉)`.
///
/// Rounding noise in the quotient is resolved against the inequality it
/// stands for: the ceiling is lowered by one only if the smaller count still
/// reaches confidence `p`.
pub fn min_candidate_size(p: f64, alpha: f64) -> Result<SampleSizeSpec> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param(format!("confidence {p} must lie in (0, 1)")));
    }
    check_alpha(alpha)?;
    let xi = if alpha >= 100.0 {
        1
    } else {
        let ratio = (-p).ln_1p() / (-alpha / 100.0).ln_1p();
        let mut xi = ratio.ceil().max(1.0) as u64;
        if xi > 1 && prob_at_least_one(alpha, xi - 1) >= p {
            xi -= 1;
        }
        xi
    };
    Ok(SampleSizeSpec { p, alpha, xi })
}

/// `1 − e^{−p}`: lower bound on the expected cover ratio when every round
/// draws `ξ_p(100K/|V|)` candidates.
pub fn cover_ratio_lower_bound(p: f64) -> Result<f64> {
    cover_ratio_lower_bound_scaled(p, 1.0)
}

/// Cover-ratio bound when the per-round percentile is shrunk to
/// `100K/(shrink·|V|)`: each round now hits an uncovered optimal node with
/// probability at least `shrink·p·(K−y)/K`, giving `1 − e^{−shrink·p}`.
pub fn cover_ratio_lower_bound_scaled(p: f64, shrink: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("confidence {p} must lie in (0, 1]")));
    }
    if !(shrink >= 1.0) {
        return Err(Error::param(format!("shrink factor {shrink} must be at least 1")));
    }
    Ok(-(-shrink * p).exp_m1())
}
