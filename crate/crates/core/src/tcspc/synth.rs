use alloc::vec::Vec;

use rand_distr::{Distribution, Poisson};

use super::{peak_bins, CorrelationHistogram, HistogramLayout, HistogramMode, PeakShape};
use crate::error::{check_positive, check_probability, Error, Result};
use crate::hom::{expected_peak_areas, HomSetup};
use crate::rng::{ids, stream, StreamRng};

/// Source properties the histogram is generated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truth {
    pub m: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Hbt { rep_period: f64 },
    Hom(HomSetup),
}

impl Experiment {
    pub fn mode(&self) -> HistogramMode {
        match self {
            Experiment::Hbt { .. } => HistogramMode::Hbt,
            Experiment::Hom(_) => HistogramMode::Hom,
        }
    }

    pub fn rep_period(&self) -> f64 {
        match self {
            Experiment::Hbt { rep_period } => *rep_period,
            Experiment::Hom(s) => s.rep_period,
        }
    }

    fn pulse_pair_delay(&self) -> f64 {
        match self {
            Experiment::Hbt { .. } => 0.0,
            Experiment::Hom(s) => s.pulse_pair_delay,
        }
    }
}

/// Detected rates, counts/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRates {
    /// Detected photons per second from one excitation per cycle, summed
    /// over both detectors.
    pub signal: f64,
    /// Dark counts per second of each detector.
    pub dark: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisConfig {
    pub experiment: Experiment,
    pub shape: PeakShape,
    pub rates: CountRates,
    /// s.
    pub acquisition_time: f64,
    pub bin_width: f64,
    pub clusters_per_side: usize,
}

impl SynthesisConfig {
    pub fn layout(&self) -> Result<HistogramLayout> {
        HistogramLayout::centered(
            self.experiment.mode(),
            self.bin_width,
            self.experiment.rep_period(),
            self.experiment.pulse_pair_delay(),
            self.acquisition_time,
            self.clusters_per_side,
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        check_positive("signal_rate", self.rates.signal)?;
        for d in self.rates.dark {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::domain("dark_rate", d, ">= 0"));
            }
        }
        if let Experiment::Hom(s) = &self.experiment {
            s.validate()?;
        }
        self.layout()?;
        Ok(())
    }

    /// Excitation cycles in the acquisition.
    fn cycles(&self) -> f64 {
        self.acquisition_time * 1e9 / self.experiment.rep_period()
    }

    /// Per-cycle detection probability of one emitted photon.
    fn detection_probability(&self) -> f64 {
        self.rates.signal * self.experiment.rep_period() * 1e-9
    }

    /// Expected coincidences per bin from dark counts.
    pub fn baseline_per_bin(&self) -> f64 {
        let photons_per_cycle = match self.experiment {
            Experiment::Hbt { .. } => 1.0,
            Experiment::Hom(_) => 2.0,
        };
        let singles = self.rates.signal * photons_per_cycle / 2.0;
        let [d1, d2] = self.rates.dark;
        (singles * d2 + d1 * singles + d1 * d2) * self.bin_width * 1e-9 * self.acquisition_time
    }

    /// Expected counts of every peak in the window, `(center, cluster,
    /// offset, area)`.
    pub fn peak_areas(&self, truth: &Truth) -> Result<Vec<(f64, i32, i32, f64)>> {
        check_probability("M", truth.m)?;
        check_probability("g2", truth.g2)?;
        let layout = self.layout()?;
        let q = self.detection_probability();
        let n = self.cycles();
        let hom = match &self.experiment {
            Experiment::Hom(s) => Some(expected_peak_areas(s, truth.m, truth.g2)?),
            Experiment::Hbt { .. } => None,
        };
        Ok(layout
            .peak_grid()
            .into_iter()
            .map(|(c, k, j)| {
                let area = match &hom {
                    None if k == 0 => truth.g2 * q * q / 4.0,
                    None => q * q / 4.0,
                    Some(a) => {
                        let cluster = if k == 0 { &a.central } else { &a.far };
                        cluster[(j + 2) as usize] * q * q
                    }
                };
                (c, k, j, area * n)
            })
            .collect())
    }
}

/// Expected counts per bin.
pub fn expected_counts(cfg: &SynthesisConfig, truth: &Truth) -> Result<(HistogramLayout, Vec<f64>)> {
    cfg.validate()?;
    let layout = cfg.layout()?;
    let mut counts = alloc::vec![cfg.baseline_per_bin(); layout.bins];
    for (c, _, _, area) in cfg.peak_areas(truth)? {
        let (start, values) = peak_bins(layout.delay_origin, layout.bin_width, layout.bins, c, &cfg.shape);
        for (k, v) in values.into_iter().enumerate() {
            counts[start + k] += area * v;
        }
    }
    Ok((layout, counts))
}

/// Poisson-sampled histogram drawing from `rng`.
pub fn synthesize_with_rng(cfg: &SynthesisConfig, truth: &Truth, rng: &mut StreamRng) -> Result<CorrelationHistogram> {
    let (layout, expected) = expected_counts(cfg, truth)?;
    let counts = expected
        .into_iter()
        .map(|mean| {
            if mean > 0.0 {
                Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
            } else {
                0
            }
        })
        .collect();
    CorrelationHistogram::new(layout, counts)
}

/// Poisson-sampled histogram; the stream is fixed by `seed` and the mode.
pub fn synthesize_histogram(cfg: &SynthesisConfig, truth: &Truth, seed: u64) -> Result<CorrelationHistogram> {
    let id = match cfg.experiment.mode() {
        HistogramMode::Hbt => ids::HBT_HISTOGRAM,
        HistogramMode::Hom => ids::HOM_HISTOGRAM,
    };
    synthesize_with_rng(cfg, truth, &mut stream(seed, id))
}
