//! Pulsed correlation histograms: synthesis, peak fitting and extraction of
//! `g2(0)` and `M`.
//!
//! Delays are in ns. Peaks are two-sided exponentials of unit area,
//! `exp(-|t - c| / tau_side) / (tau_left + tau_right)`, integrated exactly
//! over each bin.

mod extract;
mod fit;
pub mod profiles;
mod shape;
mod synth;

use alloc::vec::Vec;

use crate::error::{check_positive, Error, Result};

pub use extract::{extract_g2, extract_m, extract_m_from_areas, m_from_ratio, ExtractionResult};
pub use fit::{fit_expected, fit_histogram, FitOptions, Peak, PeakFit};
pub use shape::{peak_bins, PeakShape};
pub use synth::{
    expected_counts, synthesize_histogram, synthesize_with_rng, CountRates, Experiment, SynthesisConfig, Truth,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistogramMode {
    /// Autocorrelation: peaks at multiples of the repetition period.
    Hbt,
    /// Double-pulse interference: clusters of five peaks spaced by the
    /// pulse-pair delay around each multiple of the repetition period.
    Hom,
}

impl HistogramMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            HistogramMode::Hbt => "hbt",
            HistogramMode::Hom => "hom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hbt" => Some(HistogramMode::Hbt),
            "hom" => Some(HistogramMode::Hom),
            _ => None,
        }
    }
}

/// Binning and experiment metadata of a histogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramLayout {
    pub mode: HistogramMode,
    pub bin_width: f64,
    /// Left edge of bin 0.
    pub delay_origin: f64,
    pub rep_period: f64,
    /// 0 in HBT mode.
    pub pulse_pair_delay: f64,
    /// s.
    pub acquisition_time: f64,
    pub bins: usize,
}

impl HistogramLayout {
    pub fn validate(&self) -> Result<()> {
        check_positive("bin_width", self.bin_width)?;
        check_positive("rep_period", self.rep_period)?;
        if !self.delay_origin.is_finite() {
            return Err(Error::domain("delay_origin", self.delay_origin, "finite"));
        }
        if !(self.acquisition_time >= 0.0 && self.acquisition_time.is_finite()) {
            return Err(Error::domain("acquisition_time", self.acquisition_time, ">= 0"));
        }
        match self.mode {
            HistogramMode::Hbt if self.pulse_pair_delay != 0.0 => Err(Error::domain(
                "pulse_pair_delay",
                self.pulse_pair_delay,
                "0 in hbt mode",
            )),
            HistogramMode::Hom if !(self.pulse_pair_delay > 0.0 && 4.0 * self.pulse_pair_delay < self.rep_period) => {
                Err(Error::domain(
                    "pulse_pair_delay",
                    self.pulse_pair_delay,
                    "in (0, rep_period / 4)",
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        self.delay_origin + (i as f64 + 0.5) * self.bin_width
    }

    pub fn bin_edge(&self, i: usize) -> f64 {
        self.delay_origin + i as f64 * self.bin_width
    }

    pub fn end(&self) -> f64 {
        self.bin_edge(self.bins)
    }

    /// Nominal peak positions inside the window as `(center, cluster,
    /// offset)`: `center = cluster rep_period + offset pulse_pair_delay`.
    pub fn peak_grid(&self) -> Vec<(f64, i32, i32)> {
        let (lo, hi) = (self.delay_origin, self.end());
        let k_lo = libm::floor(lo / self.rep_period) as i32 - 1;
        let k_hi = libm::ceil(hi / self.rep_period) as i32 + 1;
        let offsets: &[i32] = match self.mode {
            HistogramMode::Hbt => &[0],
            HistogramMode::Hom => &[-2, -1, 0, 1, 2],
        };
        let mut grid = Vec::new();
        for k in k_lo..=k_hi {
            for &j in offsets {
                let c = k as f64 * self.rep_period + j as f64 * self.pulse_pair_delay;
                if c >= lo && c < hi {
                    grid.push((c, k, j));
                }
            }
        }
        grid
    }

    /// Symmetric window covering `clusters_per_side` clusters on each side
    /// of zero delay, split half way between clusters.
    pub fn centered(
        mode: HistogramMode,
        bin_width: f64,
        rep_period: f64,
        pulse_pair_delay: f64,
        acquisition_time: f64,
        clusters_per_side: usize,
    ) -> Result<Self> {
        check_positive("bin_width", bin_width)?;
        check_positive("rep_period", rep_period)?;
        let span = (2 * clusters_per_side + 1) as f64 * rep_period;
        let bins = libm::round(span / bin_width) as usize;
        let layout = HistogramLayout {
            mode,
            bin_width,
            delay_origin: -(bins as f64) * bin_width / 2.0,
            rep_period,
            pulse_pair_delay,
            acquisition_time,
            bins,
        };
        layout.validate()?;
        Ok(layout)
    }
}

/// Binned coincidence counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationHistogram {
    pub layout: HistogramLayout,
    pub counts: Vec<u64>,
}

impl CorrelationHistogram {
    pub fn new(layout: HistogramLayout, counts: Vec<u64>) -> Result<Self> {
        layout.validate()?;
        if counts.len() != layout.bins {
            return Err(Error::domain("bins", counts.len() as f64, "equal to layout.bins"));
        }
        Ok(CorrelationHistogram { layout, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn counts_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_layout_is_symmetric() {
        let l = HistogramLayout::centered(HistogramMode::Hom, 0.05, 12.2, 3.0, 1.0, 2).unwrap();
        assert!((l.delay_origin + l.end()).abs() < 1e-9);
        let grid = l.peak_grid();
        assert_eq!(grid.len(), 25);
        assert!(grid.iter().any(|&(_, k, j)| k == 0 && j == 0));
    }

    #[test]
    fn hbt_grid() {
        let l = HistogramLayout::centered(HistogramMode::Hbt, 0.1, 12.2, 0.0, 1.0, 3).unwrap();
        let ks: Vec<i32> = l.peak_grid().iter().map(|p| p.1).collect();
        assert_eq!(ks, [-3, -2, -1, 0, 1, 2, 3]);
    }

    #[test]
    fn layout_validation() {
        assert!(HistogramLayout::centered(HistogramMode::Hbt, 0.1, 12.2, 1.0, 1.0, 3).is_err());
        assert!(HistogramLayout::centered(HistogramMode::Hom, 0.1, 12.2, 0.0, 1.0, 3).is_err());
        assert!(HistogramLayout::centered(HistogramMode::Hom, 0.1, 12.2, 3.1, 1.0, 3).is_err());
    }
}
