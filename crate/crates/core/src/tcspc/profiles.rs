//! Measurement profiles resembling the non-resonant (QD1-like) and resonant
//! (QD3-like) micropillar sources, and the coverage trial used to check the
//! reported uncertainties.

use rand_distr::{Distribution, Normal};

use super::{
    extract_g2, extract_m, fit_histogram, synthesize_with_rng, CountRates, Experiment, ExtractionResult, FitOptions,
    PeakShape, SynthesisConfig, Truth,
};
use crate::error::Result;
use crate::fom::Measured;
use crate::hom::HomSetup;
use crate::rng::{ids, stream, StreamRng};

/// Repetition period of an 82 MHz laser, ns.
pub const REP_PERIOD_82MHZ: f64 = 1e3 / 82.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SourceProfile {
    pub name: &'static str,
    pub hom: HomSetup,
    pub shape: PeakShape,
    pub rates: CountRates,
    /// s.
    pub acquisition_time: f64,
    pub bin_width: f64,
    pub clusters_per_side: usize,
    pub truth: Truth,
}

impl SourceProfile {
    /// Non-resonant excitation: free-space splitter `R = 0.45`, `T = 0.50`,
    /// classical visibility 0.95, 3 ns pulse pairs, 150 ps decay,
    /// 0.125 MHz, 8 min.
    pub fn qd1_like() -> Self {
        SourceProfile {
            name: "qd1-like",
            hom: HomSetup::from_splitting(0.45, 0.50, 0.05, 3.0, REP_PERIOD_82MHZ)
                .expect("valid")
                .with_uncertainties(0.005, 0.005, 0.005),
            shape: PeakShape::symmetric(0.150),
            rates: CountRates {
                signal: 0.125e6,
                dark: [100.0, 100.0],
            },
            acquisition_time: 480.0,
            bin_width: 0.05,
            clusters_per_side: 3,
            truth: Truth { m: 0.78, g2: 0.024 },
        }
    }

    /// Resonant excitation: fibre splitter `R = 0.508`, `T = 0.492`,
    /// classical visibility 0.9988, 2.2 ns pulse pairs, 120 ps decay,
    /// 0.38 MHz, 10 min.
    pub fn qd3_like() -> Self {
        SourceProfile {
            name: "qd3-like",
            hom: HomSetup::from_splitting(0.508, 0.492, 0.0012, 2.2, REP_PERIOD_82MHZ)
                .expect("valid")
                .with_uncertainties(0.002, 0.002, 0.0005),
            shape: PeakShape::symmetric(0.120),
            rates: CountRates {
                signal: 0.38e6,
                dark: [100.0, 100.0],
            },
            acquisition_time: 600.0,
            bin_width: 0.05,
            clusters_per_side: 3,
            truth: Truth { m: 0.9956, g2: 0.0028 },
        }
    }

    fn config(&self, experiment: Experiment) -> SynthesisConfig {
        SynthesisConfig {
            experiment,
            shape: self.shape,
            rates: self.rates,
            acquisition_time: self.acquisition_time,
            bin_width: self.bin_width,
            clusters_per_side: self.clusters_per_side,
        }
    }

    pub fn hbt_config(&self) -> SynthesisConfig {
        self.config(Experiment::Hbt {
            rep_period: self.hom.rep_period,
        })
    }

    pub fn hom_config(&self) -> SynthesisConfig {
        self.config(Experiment::Hom(self.hom.clone()))
    }

    /// Interferometer with `R`, `T` and `epsilon` drawn from their stated
    /// uncertainties.
    fn perturbed_setup(&self, rng: &mut StreamRng) -> Result<HomSetup> {
        let (r, t) = self.hom.splitting();
        let mut draw = |mean: f64, sigma: f64| {
            if sigma > 0.0 {
                Normal::new(mean, sigma).expect("finite").sample(rng).clamp(1e-6, 1.0)
            } else {
                mean
            }
        };
        let r = draw(r, self.hom.sigma_r);
        let t = draw(t, self.hom.sigma_t);
        let eps = draw(self.hom.epsilon(), self.hom.sigma_epsilon).clamp(0.0, 0.5);
        HomSetup::from_splitting(r, t, eps, self.hom.pulse_pair_delay, self.hom.rep_period)
    }
}

/// One synthesise-fit-extract cycle of a coverage study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub truth: Truth,
    pub result: ExtractionResult,
}

impl TrialOutcome {
    pub fn g2_covered(&self, k: f64) -> bool {
        self.result.g2.covers(self.truth.g2, k)
    }

    pub fn m_covered(&self, k: f64) -> bool {
        self.result.m_corrected.covers(self.truth.m, k)
    }
}

/// Trial `trial` of a coverage study with master seed `seed`.
///
/// The trial draws its own interferometer from the stated uncertainties of
/// `R`, `T` and `epsilon`, synthesises both histograms with it, and
/// extracts with the nominal values, so the reported uncertainty has to
/// account for the calibration spread as well as the counting noise.
pub fn coverage_trial(profile: &SourceProfile, truth: Truth, seed: u64, trial: u64) -> Result<TrialOutcome> {
    let mut rng = stream(seed, ids::COVERAGE_BASE + trial);
    let actual = profile.perturbed_setup(&mut rng)?;
    let options = FitOptions::default();
    let hbt = synthesize_with_rng(&profile.hbt_config(), &truth, &mut rng)?;
    let g2: Measured = extract_g2(&fit_histogram(&hbt, &options)?)?;
    let mut hom_cfg = profile.hom_config();
    hom_cfg.experiment = Experiment::Hom(actual);
    let hom = synthesize_with_rng(&hom_cfg, &truth, &mut rng)?;
    let result = extract_m(&fit_histogram(&hom, &options)?, &profile.hom, g2)?;
    Ok(TrialOutcome { truth, result })
}
