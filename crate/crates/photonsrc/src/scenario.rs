//! Scenario files: TOML with one section per parameter bundle.
//!
//! Unknown keys and sections that the chosen mode does not use are
//! rejected, so a misspelt physics parameter never silently falls back to a
//! default.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SpdcCurve,
    QdBrightness,
    Hom,
    Synthesize,
    Fit,
    Extract,
    Compare,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::SpdcCurve,
        Mode::QdBrightness,
        Mode::Hom,
        Mode::Synthesize,
        Mode::Fit,
        Mode::Extract,
        Mode::Compare,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::SpdcCurve => "spdc-curve",
            Mode::QdBrightness => "qd-brightness",
            Mode::Hom => "hom",
            Mode::Synthesize => "synthesize",
            Mode::Fit => "fit",
            Mode::Extract => "extract",
            Mode::Compare => "compare",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Mode::SpdcCurve => "heralded g2 and M of a pair source over a brightness grid, optional Monte Carlo check",
            Mode::QdBrightness => "Purcell factor, brightness, resonant occupation and jitter limit of a quantum dot",
            Mode::Hom => "two-photon interference through a splitter matrix and pulsed peak-area pattern",
            Mode::Synthesize => "Poisson-sampled HBT and HOM correlation histograms",
            Mode::Fit => "peak fit of one correlation histogram",
            Mode::Extract => "g2 and M from an HBT and a HOM histogram",
            Mode::Compare => "comparison dataset of sources and the pair-source limit curve",
        }
    }

    /// Sections this mode reads.
    fn sections(self) -> &'static [&'static str] {
        match self {
            Mode::SpdcCurve => &["spdc", "curve", "monte_carlo"],
            Mode::QdBrightness => &["emitter", "counts"],
            Mode::Hom => &["splitter", "visibility", "interferometer", "truth"],
            Mode::Synthesize => &["synthesis", "interferometer", "truth"],
            Mode::Fit => &["fit"],
            Mode::Extract => &["extract", "interferometer"],
            Mode::Compare => &["compare", "spdc", "curve"],
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            Mode::QdBrightness => &["emitter"],
            Mode::Synthesize => &["synthesis"],
            Mode::Fit => &["fit"],
            Mode::Extract => &["extract", "interferometer"],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpdcProfile {
    #[default]
    Calibrated,
    Ideal,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpdcSection {
    #[serde(default)]
    pub profile: SpdcProfile,
    pub detector_efficiency: Option<f64>,
    /// Dark-click probability per gate.
    pub herald_dark: Option<f64>,
    pub hbt_dark: Option<f64>,
    pub hbt_split: Option<f64>,
    /// `[T11, T12, T21, T22]` of the interference splitter.
    pub splitter_transmissions: Option<[f64; 4]>,
    /// Sets both arms; excludes calibration.
    pub transmittance: Option<f64>,
    pub herald_transmittance: Option<f64>,
    pub signal_transmittance: Option<f64>,
    pub calibration_mu: Option<f64>,
    pub calibration_g2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    #[serde(default = "default_mu_max")]
    pub mu_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Explicit grid; overrides `mu_max` and `points`.
    pub mu: Option<Vec<f64>>,
}

fn default_mu_max() -> f64 {
    0.1
}

fn default_points() -> usize {
    50
}

impl Default for CurveSection {
    fn default() -> Self {
        CurveSection {
            mu_max: default_mu_max(),
            points: default_points(),
            mu: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub mu: Vec<f64>,
    pub trials: u64,
    pub workers: Option<usize>,
    #[serde(default = "one")]
    pub intrinsic_m: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterSection {
    pub purcell: Option<f64>,
    pub cavity_lifetime_ps: Option<f64>,
    pub tau_bulk_ps: f64,
    pub eta_out: Option<f64>,
    pub reflectivity_min: Option<f64>,
    #[serde(default)]
    pub fss_uev: f64,
    #[serde(default)]
    pub cavity_pol_splitting_uev: f64,
    pub kappa_uev: f64,
    pub mode_energy_ev: f64,
    /// Non-resonant pump power in units of the saturation power.
    #[serde(default = "saturated")]
    pub power_ratio: f64,
    /// Resonant pulse area in units of pi.
    #[serde(default = "one")]
    pub pulse_area: f64,
    pub h_purcell_fraction: Option<f64>,
    pub tau_relax_ps: Option<f64>,
}

fn saturated() -> f64 {
    f64::INFINITY
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsSection {
    pub rep_rate_mhz: f64,
    pub setup_efficiency: f64,
    pub polarized: bool,
    pub rates_mhz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitterSection {
    pub transmissions: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisibilitySection {
    pub value: f64,
    #[serde(default)]
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerSection {
    pub r: f64,
    pub t: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub sigma_r: f64,
    #[serde(default)]
    pub sigma_t: f64,
    #[serde(default)]
    pub sigma_epsilon: f64,
    pub pulse_pair_delay_ns: Option<f64>,
    pub rep_period_ns: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthSection {
    pub m: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourcePreset {
    #[default]
    Qd1Like,
    Qd3Like,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiments {
    Hbt,
    Hom,
    #[default]
    Both,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisSection {
    #[serde(default)]
    pub profile: SourcePreset,
    #[serde(default)]
    pub experiment: Experiments,
    pub signal_rate_mhz: Option<f64>,
    /// Counts per second on the two detectors.
    pub dark_rates: Option<[f64; 2]>,
    pub acquisition_time_s: Option<f64>,
    pub bin_width_ns: Option<f64>,
    pub decay_left_ns: Option<f64>,
    pub decay_right_ns: Option<f64>,
    pub clusters_per_side: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub histogram: PathBuf,
    pub max_iterations: Option<usize>,
    pub reweighting_passes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractSection {
    pub hbt: PathBuf,
    pub hom: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSection {
    pub label: String,
    pub kind: String,
    pub brightness: f64,
    #[serde(default)]
    pub brightness_sigma: f64,
    /// Unpolarised brightness is halved on import.
    #[serde(default = "yes")]
    pub polarized: bool,
    pub m_raw: Option<[f64; 2]>,
    pub m_corrected: Option<[f64; 2]>,
    pub g2: Option<[f64; 2]>,
    #[serde(default)]
    pub note: String,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    #[serde(default = "yes")]
    pub reference: bool,
    #[serde(default)]
    pub points: Vec<PointSection>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    pub spdc: Option<SpdcSection>,
    pub curve: Option<CurveSection>,
    pub monte_carlo: Option<MonteCarloSection>,
    pub emitter: Option<EmitterSection>,
    pub counts: Option<CountsSection>,
    pub splitter: Option<SplitterSection>,
    pub visibility: Option<VisibilitySection>,
    pub interferometer: Option<InterferometerSection>,
    pub truth: Option<TruthSection>,
    pub synthesis: Option<SynthesisSection>,
    pub fit: Option<FitSection>,
    pub extract: Option<ExtractSection>,
    pub compare: Option<CompareSection>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: Scenario = toml::from_str(text).map_err(|e| CliError::schema(e.to_string()))?;
        s.check_sections()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    fn present(&self) -> Vec<&'static str> {
        let flags = [
            ("spdc", self.spdc.is_some()),
            ("curve", self.curve.is_some()),
            ("monte_carlo", self.monte_carlo.is_some()),
            ("emitter", self.emitter.is_some()),
            ("counts", self.counts.is_some()),
            ("splitter", self.splitter.is_some()),
            ("visibility", self.visibility.is_some()),
            ("interferometer", self.interferometer.is_some()),
            ("truth", self.truth.is_some()),
            ("synthesis", self.synthesis.is_some()),
            ("fit", self.fit.is_some()),
            ("extract", self.extract.is_some()),
            ("compare", self.compare.is_some()),
        ];
        flags.into_iter().filter(|f| f.1).map(|f| f.0).collect()
    }

    fn check_sections(&self) -> Result<(), CliError> {
        let present = self.present();
        let mode = self.mode;
        if let Some(extra) = present.iter().find(|s| !mode.sections().contains(s)) {
            return Err(CliError::schema(format!(
                "section [{extra}] is not used by mode {}",
                mode.as_str()
            )));
        }
        if let Some(missing) = mode.required().iter().find(|s| !present.contains(s)) {
            return Err(CliError::schema(format!(
                "mode {} needs a [{missing}] section",
                mode.as_str()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_scenario_is_a_schema_error() {
        let e = Scenario::parse("").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = Scenario::parse("mode = \"fit\"\n[fit]\nhistogram = \"a.txt\"\nmax_iteratons = 3\n").unwrap_err();
        assert!(e.to_string().contains("max_iteratons"), "{e}");
    }

    #[test]
    fn sections_must_match_the_mode() {
        let e = Scenario::parse("mode = \"hom\"\n[fit]\nhistogram = \"a.txt\"\n").unwrap_err();
        assert!(e.to_string().contains("[fit]"));
        let e = Scenario::parse("mode = \"extract\"\n[extract]\nhbt = \"a\"\nhom = \"b\"\n").unwrap_err();
        assert!(e.to_string().contains("[interferometer]"));
    }

    #[test]
    fn defaults_fill_in() {
        let s = Scenario::parse("mode = \"spdc-curve\"\nseed = 9\n[curve]\n").unwrap();
        assert_eq!(s.seed, 9);
        assert_eq!(s.curve, Some(CurveSection::default()));
    }
}
