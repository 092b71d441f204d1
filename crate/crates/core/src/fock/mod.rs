//! Fock-space primitives.
//!
//! Photon-number distributions are plain probability vectors truncated at
//! `n_max`. Truncation is never hidden: the missing tail mass is carried as a
//! deficit (`1 - sum`) and only removed by an explicit
//! [`PhotonNumberDistribution::renormalized`] call.

mod matrix;

pub use matrix::{
    determinant, permanent, permanent_with_cap, ryser_permanent, InterferometerMatrix, DEFAULT_DIMENSION_CAP,
    DEFAULT_UNITARITY_WARNING,
};

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_probability, Error, Result};
use crate::math::{binomial_row, powi};

/// Largest tail deficit a distribution may carry unless configured otherwise.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-9;

/// Slack above 1 allowed for accumulated rounding in the probability sum.
const SUM_ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberDistribution {
    probs: Vec<f64>,
    tail_tolerance: f64,
}

impl PhotonNumberDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_tail_tolerance(probs, DEFAULT_TAIL_TOLERANCE)
    }

    /// Validates `probs` against a tail tolerance: every entry in `[0, 1]`
    /// and the sum in `[1 - tail_tolerance, 1]`.
    pub fn with_tail_tolerance(probs: Vec<f64>, tail_tolerance: f64) -> Result<Self> {
        check_probability("tail_tolerance", tail_tolerance)?;
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no entries"));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidDistribution("entry outside [0, 1]"));
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + SUM_ROUNDING_SLACK {
            return Err(Error::InvalidDistribution("probabilities sum above 1"));
        }
        if total < 1.0 - tail_tolerance {
            return Err(Error::InvalidDistribution(
                "tail deficit exceeds the truncation tolerance",
            ));
        }
        Ok(PhotonNumberDistribution { probs, tail_tolerance })
    }

    /// Skips the sum check; used for maps that provably preserve total mass.
    pub(crate) fn from_parts(probs: Vec<f64>, tail_tolerance: f64) -> Self {
        PhotonNumberDistribution { probs, tail_tolerance }
    }

    /// Fock state `|n>`.
    pub fn delta(n: usize) -> Self {
        let mut probs = vec![0.0; n + 1];
        probs[n] = 1.0;
        Self::from_parts(probs, DEFAULT_TAIL_TOLERANCE)
    }

    pub fn vacuum() -> Self {
        Self::delta(0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    /// `P(n)`, zero above the truncation.
    pub fn prob(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Probability mass lost to truncation.
    pub fn tail_deficit(&self) -> f64 {
        (1.0 - self.total()).max(0.0)
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn renormalized(&self) -> Self {
        let total = self.total();
        let probs = self.probs.iter().map(|p| p / total).collect();
        Self::from_parts(probs, self.tail_tolerance)
    }
}

/// Beam-splitter loss with transmittance `t`, reflected port traced out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    transmittance: f64,
}

impl LossChannel {
    pub fn new(transmittance: f64) -> Result<Self> {
        check_probability("transmittance", transmittance)?;
        Ok(LossChannel { transmittance })
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }
}

/// Click / no-click detector.
///
/// A dark count is an independent click with probability `dark_prob` per
/// coincidence gate (dark rate times gate width).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdDetector {
    efficiency: f64,
    dark_prob: f64,
}

impl ThresholdDetector {
    pub fn new(efficiency: f64, dark_prob: f64) -> Result<Self> {
        check_probability("efficiency", efficiency)?;
        check_probability("dark_prob", dark_prob)?;
        Ok(ThresholdDetector { efficiency, dark_prob })
    }

    pub fn ideal() -> Self {
        ThresholdDetector {
            efficiency: 1.0,
            dark_prob: 0.0,
        }
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn dark_prob(&self) -> f64 {
        self.dark_prob
    }

    /// `(1 - eta)^n (1 - d)`.
    pub fn no_click(&self, n: usize) -> f64 {
        powi(1.0 - self.efficiency, n as u32) * (1.0 - self.dark_prob)
    }

    pub fn click(&self, n: usize) -> f64 {
        1.0 - self.no_click(n)
    }
}

/// Probability that at least one photon of `|n>` survives transmittance `t`:
/// `1 - (1 - t)^n`.
pub fn loss_survival(n: u32, t: f64) -> Result<f64> {
    check_probability("transmittance", t)?;
    Ok(1.0 - powi(1.0 - t, n))
}

/// Binomial loss map `P'(k) = sum_n P(n) C(n,k) t^k (1-t)^(n-k)`.
pub fn apply_loss(dist: &PhotonNumberDistribution, channel: LossChannel) -> PhotonNumberDistribution {
    let t = channel.transmittance();
    let mut out = vec![0.0; dist.probs.len()];
    for (n, &p) in dist.probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (k, b) in binomial_row(n, t).into_iter().enumerate() {
            out[k] += p * b;
        }
    }
    PhotonNumberDistribution::from_parts(out, dist.tail_tolerance)
}

/// `sum_n P(n) [1 - (1 - eta)^n (1 - d)]`.
pub fn click_probability(dist: &PhotonNumberDistribution, detector: &ThresholdDetector) -> f64 {
    dist.probs.iter().enumerate().map(|(n, p)| p * detector.click(n)).sum()
}
