//! Two-mode squeezed pair sources.
//!
//! The pair number of a squeezed vacuum is geometric,
//! `p(n) = (1 - |lambda|^2) |lambda|^(2n)`. Everything here is an exact
//! enumeration over that distribution, with binomial losses and threshold
//! detectors applied per Fock term. [`monte_carlo`] holds the independent
//! sampling oracle used to check it.

pub mod monte_carlo;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{check_probability, Error, Result};
use crate::fock::{InterferometerMatrix, PhotonNumberDistribution, ThresholdDetector, DEFAULT_TAIL_TOLERANCE};
use crate::hom;
use crate::math::{binomial_row, choose, factorial, log, powi, sqrt};

/// Smallest pair truncation used by default.
pub const DEFAULT_MIN_PAIRS: usize = 6;

/// Largest shift of a derived observable tolerated from truncating the pair
/// distribution.
pub const TRUNCATION_TOLERANCE: f64 = 1e-6;

/// Tail mass left by the default truncation. Ratios of multi-pair click
/// probabilities such as `g2` need it well below [`DEFAULT_TAIL_TOLERANCE`].
pub const DEFAULT_PAIR_TAIL: f64 = 1e-12;

/// Tail mass of the reference truncation the configured one is checked
/// against; below double precision resolution for every observable here.
const REFERENCE_TAIL: f64 = 1e-17;

/// Upper bound on the truncation, keeps factorials finite.
const MAX_PAIRS: usize = 80;

/// Squeezed vacuum `sqrt(1 - |l|^2) sum_n l^n |n, n>`, truncated at `n_max`
/// pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedPairSource {
    lambda_sq: f64,
    n_max: usize,
}

/// Smallest `n >= floor` with `x^(n+1) < tail`.
fn truncation_for(lambda_sq: f64, tail: f64, floor: usize) -> usize {
    if lambda_sq == 0.0 {
        return floor;
    }
    let n = libm::ceil(log(tail) / log(lambda_sq)) as usize;
    n.saturating_sub(1).max(floor).min(MAX_PAIRS)
}

impl SqueezedPairSource {
    /// Source with the truncation chosen so the neglected tail is below
    /// [`DEFAULT_PAIR_TAIL`], and never fewer than [`DEFAULT_MIN_PAIRS`]
    /// pairs.
    pub fn new(lambda_sq: f64) -> Result<Self> {
        let n_max = truncation_for(check_lambda(lambda_sq)?, DEFAULT_PAIR_TAIL, DEFAULT_MIN_PAIRS);
        Ok(SqueezedPairSource { lambda_sq, n_max })
    }

    pub fn with_truncation(lambda_sq: f64, n_max: usize) -> Result<Self> {
        check_lambda(lambda_sq)?;
        if n_max > MAX_PAIRS {
            return Err(Error::domain("n_max", n_max as f64, "<= 80"));
        }
        Ok(SqueezedPairSource { lambda_sq, n_max })
    }

    /// Source with mean photon number `mu` per mode.
    pub fn from_mu(mu: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::domain("mu", mu, ">= 0"));
        }
        Self::new(lambda_from_mu(mu))
    }

    pub fn lambda_sq(&self) -> f64 {
        self.lambda_sq
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Probability mass above `n_max`: `|lambda|^(2 (n_max + 1))`.
    pub fn tail_mass(&self) -> f64 {
        powi(self.lambda_sq, self.n_max as u32 + 1)
    }

    fn pair_probs(&self, n_max: usize) -> Vec<f64> {
        let x = self.lambda_sq;
        (0..=n_max).map(|n| (1.0 - x) * powi(x, n as u32)).collect()
    }

    fn reference_truncation(&self) -> usize {
        truncation_for(self.lambda_sq, REFERENCE_TAIL, self.n_max)
    }
}

fn check_lambda(lambda_sq: f64) -> Result<f64> {
    if (0.0..1.0).contains(&lambda_sq) {
        Ok(lambda_sq)
    } else {
        Err(Error::domain("lambda_sq", lambda_sq, "[0, 1)"))
    }
}

/// Geometric pair-number distribution of the source.
pub fn pair_distribution(src: &SqueezedPairSource) -> PhotonNumberDistribution {
    let tol = DEFAULT_TAIL_TOLERANCE.max(src.tail_mass() * (1.0 + 1e-9));
    PhotonNumberDistribution::from_parts(src.pair_probs(src.n_max), tol.min(1.0))
}

/// Mean photon number per mode, `|lambda|^2 / (1 - |lambda|^2)`.
pub fn brightness_mu(src: &SqueezedPairSource) -> f64 {
    src.lambda_sq / (1.0 - src.lambda_sq)
}

/// Inverse of [`brightness_mu`]: `mu / (1 + mu)`.
pub fn lambda_from_mu(mu: f64) -> f64 {
    mu / (1.0 + mu)
}

/// Losses, detectors and splitters around a heralded pair source.
///
/// The idler arm (transmittance `herald_transmittance`) feeds the herald
/// detector. The signal arm (`signal_transmittance`) is split onto the two
/// `hbt_detectors`, a fraction `hbt_split` going to the first. For two-photon
/// interference the idler and signal arms enter ports 0 and 1 of
/// `hom_matrix` and the same two detectors watch its outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdcSetup {
    pub herald_transmittance: f64,
    pub signal_transmittance: f64,
    pub herald_detector: ThresholdDetector,
    pub hbt_detectors: [ThresholdDetector; 2],
    pub hbt_split: f64,
    pub hom_matrix: InterferometerMatrix,
}

impl SpdcSetup {
    /// Lossless arms, ideal detectors, balanced splitters.
    pub fn ideal() -> Self {
        SpdcSetup {
            herald_transmittance: 1.0,
            signal_transmittance: 1.0,
            herald_detector: ThresholdDetector::ideal(),
            hbt_detectors: [ThresholdDetector::ideal(); 2],
            hbt_split: 0.5,
            hom_matrix: InterferometerMatrix::balanced_splitter(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("herald_transmittance", self.herald_transmittance)?;
        check_probability("signal_transmittance", self.signal_transmittance)?;
        check_probability("hbt_split", self.hbt_split)?;
        if self.hom_matrix.dim() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                dim: self.hom_matrix.dim(),
            });
        }
        Ok(())
    }

    /// Same setup with both arms set to `transmittance`.
    pub fn with_transmittance(&self, transmittance: f64) -> Self {
        SpdcSetup {
            herald_transmittance: transmittance,
            signal_transmittance: transmittance,
            ..self.clone()
        }
    }

    /// Same setup with the two HBT/HOM detectors exchanged.
    pub fn with_detectors_swapped(&self) -> Self {
        let [a, b] = self.hbt_detectors;
        SpdcSetup {
            hbt_detectors: [b, a],
            ..self.clone()
        }
    }
}

/// Joint click probabilities of the herald and the two HBT detectors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeraldedClicks {
    pub herald: f64,
    pub herald_a: f64,
    pub herald_b: f64,
    pub herald_ab: f64,
}

impl HeraldedClicks {
    /// `P(H) P(H A B) / (P(H A) P(H B))`.
    pub fn g2(&self) -> Result<f64> {
        let den = self.herald_a * self.herald_b;
        if den <= 0.0 {
            return Err(Error::DivisionHazard("no heralded single clicks"));
        }
        Ok(self.herald * self.herald_ab / den)
    }
}

/// Click probabilities summed over pair numbers `0..=n_max`.
pub fn heralded_clicks(src: &SqueezedPairSource, setup: &SpdcSetup, n_max: usize) -> HeraldedClicks {
    let mut acc = HeraldedClicks::default();
    let [det_a, det_b] = setup.hbt_detectors;
    for (n, p) in src.pair_probs(n_max).into_iter().enumerate() {
        let herald: f64 = binomial_row(n, setup.herald_transmittance)
            .iter()
            .enumerate()
            .map(|(k, b)| b * setup.herald_detector.click(k))
            .sum();
        let (mut a, mut b, mut ab) = (0.0, 0.0, 0.0);
        for (k, bk) in binomial_row(n, setup.signal_transmittance).into_iter().enumerate() {
            for (to_a, bs) in binomial_row(k, setup.hbt_split).into_iter().enumerate() {
                let w = bk * bs;
                let ca = det_a.click(to_a);
                let cb = det_b.click(k - to_a);
                a += w * ca;
                b += w * cb;
                ab += w * ca * cb;
            }
        }
        let w = p * herald;
        acc.herald += w;
        acc.herald_a += w * a;
        acc.herald_b += w * b;
        acc.herald_ab += w * ab;
    }
    acc
}

/// Evaluates `f` at the configured truncation and at a reference truncation
/// and fails when they differ by more than [`TRUNCATION_TOLERANCE`].
fn checked_truncation(src: &SqueezedPairSource, f: impl Fn(usize) -> Result<f64>) -> Result<f64> {
    let value = f(src.n_max)?;
    let reference_n = src.reference_truncation();
    if reference_n > src.n_max {
        let reference = f(reference_n)?;
        let shift = crate::math::fabs(value - reference);
        if !(shift <= TRUNCATION_TOLERANCE) {
            return Err(Error::TruncationInsufficient {
                n_max: src.n_max,
                shift,
                tolerance: TRUNCATION_TOLERANCE,
            });
        }
    }
    Ok(value)
}

/// Heralded second-order autocorrelation of the signal arm.
pub fn heralded_g2(src: &SqueezedPairSource, setup: &SpdcSetup) -> Result<f64> {
    setup.validate()?;
    checked_truncation(src, |n| heralded_clicks(src, setup, n).g2())
}

/// Output photon-number distribution of a two-mode splitter.
///
/// Input `|k, j>` in a single internal mode; entry `m` is the probability of
/// `m` photons in output 0 and `k + j - m` in output 1. Not renormalised, so
/// a lossy matrix gives a total below one.
fn splitter_output(l: &InterferometerMatrix, k: usize, j: usize) -> Vec<f64> {
    let total = k + j;
    let (l00, l01, l10, l11) = (l.get(0, 0), l.get(0, 1), l.get(1, 0), l.get(1, 1));
    let pow = |z: Complex64, e: usize| z.powu(e as u32);
    let norm_in = factorial(k) * factorial(j);
    (0..=total)
        .map(|m| {
            let mut amp = Complex64::new(0.0, 0.0);
            for x in m.saturating_sub(j)..=m.min(k) {
                let y = m - x;
                amp += pow(l00, x) * pow(l01, k - x) * pow(l10, y) * pow(l11, j - y) * (choose(k, x) * choose(j, y));
            }
            amp.norm_sqr() * factorial(m) * factorial(total - m) / norm_in
        })
        .collect()
}

/// `(sum q, sum q z0^m, sum q z1^(N-m), sum q z0^m z1^(N-m))`.
fn no_click_moments(q: &[f64], z0: f64, z1: f64) -> [f64; 4] {
    let total = q.len() - 1;
    let mut acc = [0.0; 4];
    for (m, &p) in q.iter().enumerate() {
        let a = powi(z0, m as u32);
        let b = powi(z1, (total - m) as u32);
        acc[0] += p;
        acc[1] += p * a;
        acc[2] += p * b;
        acc[3] += p * a * b;
    }
    acc
}

/// Coincidence probability between the two HOM outputs when the signal
/// photons overlap the idler photons with probability `overlap`.
fn hom_coincidence(src: &SqueezedPairSource, setup: &SpdcSetup, overlap: f64, n_max: usize) -> f64 {
    let l = &setup.hom_matrix;
    let [det0, det1] = setup.hbt_detectors;
    let z0 = 1.0 - det0.efficiency();
    let z1 = 1.0 - det1.efficiency();
    let keep0 = 1.0 - det0.dark_prob();
    let keep1 = 1.0 - det1.dark_prob();

    // Photons sharing the idler's internal mode: k idler, j signal.
    let mut shared = vec![[0.0; 4]; (n_max + 1) * (n_max + 1)];
    for k in 0..=n_max {
        for j in 0..=n_max {
            shared[k * (n_max + 1) + j] = no_click_moments(&splitter_output(l, k, j), z0, z1);
        }
    }
    // Signal photons in the orthogonal internal mode.
    let orthogonal: Vec<[f64; 4]> = (0..=n_max)
        .map(|r| no_click_moments(&splitter_output(l, 0, r), z0, z1))
        .collect();

    let mut c = 0.0;
    for (n, p) in src.pair_probs(n_max).into_iter().enumerate() {
        let idler = binomial_row(n, setup.herald_transmittance);
        let signal = binomial_row(n, setup.signal_transmittance);
        for (k, bk) in idler.iter().enumerate() {
            for (s, bs) in signal.iter().enumerate() {
                let w = p * bk * bs;
                if w == 0.0 {
                    continue;
                }
                for (j, bj) in binomial_row(s, overlap).into_iter().enumerate() {
                    if bj == 0.0 {
                        continue;
                    }
                    let a = shared[k * (n_max + 1) + j];
                    let b = orthogonal[s - j];
                    let both = a[0] * b[0] - keep0 * a[1] * b[1] - keep1 * a[2] * b[2] + keep0 * keep1 * a[3] * b[3];
                    c += w * bj * both;
                }
            }
        }
    }
    c
}

/// Indistinguishability inferred from two-photon interference of signal and
/// idler photons of the same down-conversion event.
///
/// Photons within an arm are identical; a signal photon overlaps the idler
/// mode with probability `intrinsic_m`. The visibility
/// `1 - c(intrinsic_m) / c(0)` is converted to `M` with the setup's splitter
/// matrix exactly as a measured visibility would be.
pub fn effective_indistinguishability(src: &SqueezedPairSource, setup: &SpdcSetup, intrinsic_m: f64) -> Result<f64> {
    setup.validate()?;
    check_probability("intrinsic_m", intrinsic_m)?;
    let (d, p) = hom::det_per_intensities(&setup.hom_matrix)?;
    if crate::math::fabs(d - p) < hom::DEGENERATE_SPLITTER_LIMIT {
        return Err(Error::DegenerateSplitter(crate::math::fabs(d - p)));
    }
    checked_truncation(src, |n| {
        let c0 = hom_coincidence(src, setup, 0.0, n);
        if c0 <= 0.0 {
            return Err(Error::DivisionHazard("no coincidences without interference"));
        }
        let v = 1.0 - hom_coincidence(src, setup, intrinsic_m, n) / c0;
        hom::visibility_to_m(v, &setup.hom_matrix)
    })
}

/// Result of [`calibrate_transmittance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub transmittance: f64,
    pub g2: f64,
    /// Whether the target lay inside the searched transmittance range. When
    /// false, `transmittance` is the range end closest to the target.
    pub bracketed: bool,
}

/// Searched range for the calibrated transmittance.
pub const CALIBRATION_RANGE: (f64, f64) = (1e-4, 1.0);

/// Fits one overall transmittance, applied to both arms of `template`, so
/// that the heralded `g2` at brightness `mu` equals `target_g2`.
///
/// Bisection in `log t`; `g2` decreases monotonically with transmittance for
/// the profiles used here (less herald loss means fewer multi-pair heralds).
pub fn calibrate_transmittance(template: &SpdcSetup, mu: f64, target_g2: f64) -> Result<Calibration> {
    let src = SqueezedPairSource::from_mu(mu)?;
    let g2_at = |t: f64| heralded_g2(&src, &template.with_transmittance(t));
    let (mut lo, mut hi) = CALIBRATION_RANGE;
    let (g_lo, g_hi) = (g2_at(lo)?, g2_at(hi)?);
    if (g_lo - target_g2) * (g_hi - target_g2) > 0.0 {
        let (t, g) = if crate::math::fabs(g_lo - target_g2) < crate::math::fabs(g_hi - target_g2) {
            (lo, g_lo)
        } else {
            (hi, g_hi)
        };
        return Ok(Calibration {
            transmittance: t,
            g2: g,
            bracketed: false,
        });
    }
    let decreasing = g_lo > g_hi;
    for _ in 0..100 {
        let mid = sqrt(lo * hi);
        let above = g2_at(mid)? > target_g2;
        if above == decreasing {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-13 {
            break;
        }
    }
    let t = sqrt(lo * hi);
    Ok(Calibration {
        transmittance: t,
        g2: g2_at(t)?,
        bracketed: true,
    })
}

/// Brightness at which the default profile is calibrated.
pub const CALIBRATION_MU: f64 = 0.07;
/// Heralded `g2` the default profile reproduces at [`CALIBRATION_MU`].
pub const CALIBRATION_G2: f64 = 0.25;
/// Detector efficiency of the default profile.
pub const PROFILE_DETECTOR_EFFICIENCY: f64 = 0.6;
/// Herald dark-click probability per gate of the default profile
/// (1000 counts/s in a 10 ns herald gate).
pub const PROFILE_HERALD_DARK: f64 = 1e-5;

/// The default profile before calibration: detectors of efficiency 0.6,
/// dark clicks on the herald only, the measured 1/3 : 2/3 HOM splitter.
pub fn profile_template() -> SpdcSetup {
    let det = ThresholdDetector::new(PROFILE_DETECTOR_EFFICIENCY, 0.0).expect("valid");
    SpdcSetup {
        herald_transmittance: 1.0,
        signal_transmittance: 1.0,
        herald_detector: ThresholdDetector::new(PROFILE_DETECTOR_EFFICIENCY, PROFILE_HERALD_DARK).expect("valid"),
        hbt_detectors: [det, det],
        hbt_split: 0.5,
        hom_matrix: hom::measured_splitter(),
    }
}

/// Default profile with its transmittance calibrated to
/// `g2(0.07) = 0.25`.
pub fn calibrated_profile() -> Result<(SpdcSetup, Calibration)> {
    let template = profile_template();
    let cal = calibrate_transmittance(&template, CALIBRATION_MU, CALIBRATION_G2)?;
    Ok((template.with_transmittance(cal.transmittance), cal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_distribution_examples() {
        let vac = pair_distribution(&SqueezedPairSource::new(0.0).unwrap());
        assert_eq!(vac.prob(0), 1.0);
        assert!(vac.probs()[1..].iter().all(|&p| p == 0.0));

        let src = SqueezedPairSource::new(0.3).unwrap();
        let d = pair_distribution(&src);
        for n in 0..d.n_max() {
            assert!((d.prob(n + 1) / d.prob(n) - 0.3).abs() < 1e-14);
        }
        let expected_total = 1.0 - powi(0.3, d.n_max() as u32 + 1);
        assert!((d.total() - expected_total).abs() < 1e-15);
        assert!(d.tail_deficit() < DEFAULT_TAIL_TOLERANCE);

        let src = SqueezedPairSource::new(0.01478).unwrap();
        assert!((pair_distribution(&src).prob(1) - 0.01456).abs() < 1e-5);
    }

    #[test]
    fn brightness_examples() {
        assert_eq!(brightness_mu(&SqueezedPairSource::new(0.0).unwrap()), 0.0);
        assert!((brightness_mu(&SqueezedPairSource::new(0.5).unwrap()) - 1.0).abs() < 1e-15);
        assert!((lambda_from_mu(0.015) - 0.01478).abs() < 1e-5);
        assert!(SqueezedPairSource::new(1.0).is_err());
        assert!(SqueezedPairSource::from_mu(-0.1).is_err());
    }

    #[test]
    fn default_truncation_keeps_tail_small() {
        for &mu in &[0.0, 0.001, 0.07, 0.1, 0.5] {
            let src = SqueezedPairSource::from_mu(mu).unwrap();
            assert!(src.n_max() >= DEFAULT_MIN_PAIRS);
            assert!(src.tail_mass() < DEFAULT_TAIL_TOLERANCE);
        }
        assert_eq!(SqueezedPairSource::from_mu(0.01).unwrap().n_max(), DEFAULT_MIN_PAIRS);
    }

    #[test]
    fn coarse_truncation_is_reported() {
        let src = SqueezedPairSource::with_truncation(lambda_from_mu(0.3), 2).unwrap();
        let err = heralded_g2(&src, &SpdcSetup::ideal()).unwrap_err();
        assert!(matches!(err, Error::TruncationInsufficient { n_max: 2, .. }));
    }

    #[test]
    fn single_pair_interference_reduces_to_two_photon_formula() {
        // One pair, lossless, ideal detectors: c = (1+M)/2 P + (1-M)/2 D.
        let mut setup = SpdcSetup::ideal();
        setup.hom_matrix = hom::measured_splitter();
        let (d, p) = hom::det_per_intensities(&setup.hom_matrix).unwrap();
        let src = SqueezedPairSource::with_truncation(0.2, 1).unwrap();
        for &m in &[0.0, 0.3, 1.0] {
            let c = hom_coincidence(&src, &setup, m, 1);
            let expected = 0.8 * 0.2 * ((1.0 + m) / 2.0 * p + (1.0 - m) / 2.0 * d);
            assert!((c - expected).abs() < 1e-15, "{c} vs {expected}");
        }
    }

    #[test]
    fn splitter_output_is_normalised_for_unitary() {
        let l = InterferometerMatrix::balanced_splitter();
        for k in 0..5 {
            for j in 0..5 {
                let s: f64 = splitter_output(&l, k, j).iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
        // |1,1> on a balanced splitter never gives one photon per output.
        assert!(splitter_output(&l, 1, 1)[1] < 1e-30);
    }

    #[test]
    fn calibration_hits_target() {
        let (setup, cal) = calibrated_profile().unwrap();
        assert!(cal.bracketed);
        assert!((cal.g2 - CALIBRATION_G2).abs() < 1e-9);
        assert_eq!(setup.herald_transmittance, cal.transmittance);
    }
}
