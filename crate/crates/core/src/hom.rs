//! Two-photon interference at a beam splitter.
//!
//! For two photons with mean wavepacket overlap `M` entering the two ports of
//! a 2x2 element `L`, the coincidence probability is
//! `c = (1 + M)/2 |per L|^2 + (1 - M)/2 |det L|^2`. The double-pulse
//! experiment is modelled at the level of peak areas in the correlation
//! histogram.

use num_complex::Complex64;

use crate::error::{check_probability, Error, Result};
use crate::fock::{determinant, permanent, InterferometerMatrix};
use crate::math::{fabs, sqrt};

/// `|D - P|` below which a splitter cannot resolve `M` from a visibility.
pub const DEGENERATE_SPLITTER_LIMIT: f64 = 1e-9;

/// Transmissions of the characterised fibre splitter used for pair-source
/// interference.
pub const MEASURED_TRANSMISSIONS: [f64; 4] = [0.3310, 0.6690, 0.6632, 0.3368];

fn check_two_mode(l: &InterferometerMatrix) -> Result<()> {
    if l.dim() == 2 {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: 2,
            dim: l.dim(),
        })
    }
}

/// `(|det L|^2, |per L|^2)` of a 2x2 matrix.
pub fn det_per_intensities(l: &InterferometerMatrix) -> Result<(f64, f64)> {
    check_two_mode(l)?;
    Ok((determinant(l)?.norm_sqr(), permanent(l)?.norm_sqr()))
}

pub fn coincidence_probability(l: &InterferometerMatrix, m: f64) -> Result<f64> {
    check_probability("M", m)?;
    let (d, p) = det_per_intensities(l)?;
    Ok((1.0 + m) / 2.0 * p + (1.0 - m) / 2.0 * d)
}

/// `M = (D + P)/(D - P) v`.
pub fn visibility_to_m(v: f64, l: &InterferometerMatrix) -> Result<f64> {
    let (d, p) = det_per_intensities(l)?;
    if fabs(d - p) < DEGENERATE_SPLITTER_LIMIT {
        return Err(Error::DegenerateSplitter(fabs(d - p)));
    }
    Ok((d + p) / (d - p) * v)
}

/// Largest visibility reachable with `l`, `(D - P)/(D + P)`.
pub fn maximal_visibility(l: &InterferometerMatrix) -> Result<f64> {
    let (d, p) = det_per_intensities(l)?;
    Ok((d - p) / (d + p))
}

/// Visibility and overlap of a measured dip, with the splitter quantities
/// they were converted with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityResult {
    pub v: f64,
    pub sigma_v: f64,
    pub m: f64,
    pub sigma_m: f64,
    pub d: f64,
    pub p: f64,
}

pub fn visibility_result(v: f64, sigma_v: f64, l: &InterferometerMatrix) -> Result<VisibilityResult> {
    let (d, p) = det_per_intensities(l)?;
    let m = visibility_to_m(v, l)?;
    Ok(VisibilityResult {
        v,
        sigma_v,
        m,
        sigma_m: fabs((d + p) / (d - p)) * sigma_v,
        d,
        p,
    })
}

/// `[[sqrt t11, sqrt t12], [sqrt t21, -sqrt t22]]`.
pub fn matrix_from_transmissions(t11: f64, t12: f64, t21: f64, t22: f64) -> Result<InterferometerMatrix> {
    for (name, t) in [("t11", t11), ("t12", t12), ("t21", t21), ("t22", t22)] {
        check_probability(name, t)?;
    }
    InterferometerMatrix::new(
        2,
        alloc::vec![
            Complex64::new(sqrt(t11), 0.0),
            Complex64::new(sqrt(t12), 0.0),
            Complex64::new(sqrt(t21), 0.0),
            Complex64::new(-sqrt(t22), 0.0),
        ],
    )
}

/// The characterised splitter, [`MEASURED_TRANSMISSIONS`].
pub fn measured_splitter() -> InterferometerMatrix {
    let [a, b, c, d] = MEASURED_TRANSMISSIONS;
    matrix_from_transmissions(a, b, c, d).expect("valid transmissions")
}

/// `(R, T) = (|L_01|^2, |L_00|^2)`: the fraction of input 0 sent to output 1
/// and to output 0.
pub fn reflectance_transmittance(l: &InterferometerMatrix) -> Result<(f64, f64)> {
    check_two_mode(l)?;
    Ok((l.intensity(0, 1), l.intensity(0, 0)))
}

/// Unbalanced interferometer of a double-pulse interference measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct HomSetup {
    pub matrix: InterferometerMatrix,
    /// `1 - epsilon`.
    pub classical_visibility: f64,
    /// ns.
    pub pulse_pair_delay: f64,
    /// ns.
    pub rep_period: f64,
    pub sigma_r: f64,
    pub sigma_t: f64,
    pub sigma_epsilon: f64,
}

impl HomSetup {
    /// Setup whose output splitter has intensity ratios `r` and `t` (not
    /// renormalised) and classical visibility `1 - epsilon`.
    pub fn from_splitting(r: f64, t: f64, epsilon: f64, pulse_pair_delay: f64, rep_period: f64) -> Result<Self> {
        let setup = HomSetup {
            matrix: matrix_from_transmissions(t, r, r, t)?,
            classical_visibility: 1.0 - epsilon,
            pulse_pair_delay,
            rep_period,
            sigma_r: 0.0,
            sigma_t: 0.0,
            sigma_epsilon: 0.0,
        };
        setup.validate()?;
        Ok(setup)
    }

    pub fn with_uncertainties(mut self, sigma_r: f64, sigma_t: f64, sigma_epsilon: f64) -> Self {
        self.sigma_r = sigma_r;
        self.sigma_t = sigma_t;
        self.sigma_epsilon = sigma_epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_two_mode(&self.matrix)?;
        check_probability("classical_visibility", self.classical_visibility)?;
        if !(self.pulse_pair_delay > 0.0 && self.rep_period > 0.0) {
            return Err(Error::domain("pulse_pair_delay", self.pulse_pair_delay, "> 0"));
        }
        // Both clusters span 4 delays; keep them apart.
        if !(4.0 * self.pulse_pair_delay < self.rep_period) {
            return Err(Error::domain(
                "pulse_pair_delay",
                self.pulse_pair_delay,
                "< rep_period / 4",
            ));
        }
        for (name, s) in [
            ("sigma_r", self.sigma_r),
            ("sigma_t", self.sigma_t),
            ("sigma_epsilon", self.sigma_epsilon),
        ] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::domain(name, s, ">= 0"));
            }
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        1.0 - self.classical_visibility
    }

    pub fn splitting(&self) -> (f64, f64) {
        (self.matrix.intensity(0, 1), self.matrix.intensity(0, 0))
    }
}

/// Areas of the five peaks of a cluster, at delays `-2D, -D, 0, +D, +2D`.
pub type Cluster = [f64; 5];

/// Expected peak areas of a double-pulse interference histogram.
///
/// Units: coincidences per excitation cycle for unit detection probability
/// of each emitted photon. `central` is the cluster around zero delay,
/// `far` every cluster at a nonzero multiple of the repetition period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakAreas {
    pub central: Cluster,
    pub far: Cluster,
}

impl PeakAreas {
    pub fn zero(&self) -> f64 {
        self.central[2]
    }

    pub fn minus_delay(&self) -> f64 {
        self.central[1]
    }

    pub fn plus_delay(&self) -> f64 {
        self.central[3]
    }

    /// `A_0 / (A_-D + A_+D)`.
    pub fn ratio(&self) -> f64 {
        self.zero() / (self.minus_delay() + self.plus_delay())
    }
}

/// Peak areas for photons of overlap `m` and autocorrelation `g2`.
///
/// Each photon of a pulse pair takes the short or long arm with equal
/// probability and leaves towards the two detectors with weights `T` and
/// `R`. Photons of different cycles are uncorrelated; within a cycle the
/// zero-delay peak carries the two-photon interference term, reduced by the
/// classical visibility squared, and multi-photon pulses add `g2`-weighted
/// coincidences to the three inner peaks.
pub fn expected_peak_areas(setup: &HomSetup, m: f64, g2: f64) -> Result<PeakAreas> {
    setup.validate()?;
    check_probability("M", m)?;
    check_probability("g2", g2)?;
    let (r, t) = setup.splitting();
    let v2 = setup.classical_visibility * setup.classical_visibility;
    let rt = r * t;
    let sq = r * r + t * t;
    let side = (2.0 * rt + g2 * sq) / 4.0;
    let central = [
        r * r / 4.0,
        side,
        0.5 * (sq / 2.0 - rt * v2 * m + 2.0 * g2 * rt),
        side,
        t * t / 4.0,
    ];
    let far = [
        r * r / 4.0,
        r * (r + t) / 2.0,
        rt + sq / 4.0,
        t * (r + t) / 2.0,
        t * t / 4.0,
    ];
    Ok(PeakAreas { central, far })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measured_matrix_anchors() {
        let l = measured_splitter();
        let (d, p) = det_per_intensities(&l).unwrap();
        assert!((d - 0.99996).abs() < 1e-4);
        assert!((p - 0.11036).abs() < 1e-4);
        assert!((maximal_visibility(&l).unwrap() - 0.8012).abs() < 2e-4);
        assert!((visibility_to_m(0.7848, &l).unwrap() - 0.9795).abs() < 5e-4);
        assert!((coincidence_probability(&l, 0.0).unwrap() - 0.5552).abs() < 1e-4);
    }

    #[test]
    fn balanced_splitter() {
        let l = InterferometerMatrix::balanced_splitter();
        assert!(coincidence_probability(&l, 1.0).unwrap().abs() < 1e-15);
        assert!((coincidence_probability(&l, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((visibility_to_m(0.37, &l).unwrap() - 0.37).abs() < 1e-14);
        let from_t = matrix_from_transmissions(0.5, 0.5, 0.5, 0.5).unwrap();
        assert!((from_t.entries()[3] - l.entries()[3]).norm() < 1e-15);
    }

    #[test]
    fn identity_is_degenerate() {
        let l = matrix_from_transmissions(1.0, 0.0, 0.0, 1.0).unwrap();
        let (d, p) = det_per_intensities(&l).unwrap();
        assert_eq!((d, p), (1.0, 1.0));
        assert!(matches!(visibility_to_m(0.5, &l), Err(Error::DegenerateSplitter(_))));
    }

    #[test]
    fn maximal_visibility_maps_to_unit_overlap() {
        let l = measured_splitter();
        let v = maximal_visibility(&l).unwrap();
        assert!((visibility_to_m(v, &l).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn perfect_coalescence_empties_zero_delay() {
        let setup = HomSetup::from_splitting(0.5, 0.5, 0.0, 3.0, 12.2).unwrap();
        let a = expected_peak_areas(&setup, 1.0, 0.0).unwrap();
        assert!(a.zero().abs() < 1e-16);
        let far_sum: f64 = a.far.iter().sum();
        for (k, w) in [1.0, 4.0, 6.0, 4.0, 1.0].iter().enumerate() {
            assert!((a.far[k] / far_sum - w / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cross_polarised_photons_leave_a_central_peak() {
        let setup = HomSetup::from_splitting(0.45, 0.50, 0.05, 3.0, 12.2).unwrap();
        let a = expected_peak_areas(&setup, 0.0, 0.024).unwrap();
        assert!(a.ratio() > 0.45);
    }

    #[test]
    fn setup_rejects_overlapping_clusters() {
        assert!(HomSetup::from_splitting(0.5, 0.5, 0.0, 4.0, 12.2).is_err());
        assert!(HomSetup::from_splitting(0.5, 0.5, 1.5, 3.0, 12.2).is_err());
    }
}
