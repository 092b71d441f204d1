//! Figures of merit and the source comparison dataset.
//!
//! Brightness follows the polarised convention: photons per pulse in one
//! polarisation, so an unpolarised source counts for half its raw value.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{check_probability, Error, Result};
use crate::spdc::{self, SpdcSetup, SqueezedPairSource};

/// A value with its one-standard-deviation uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Measured {
    pub value: f64,
    pub sigma: f64,
}

impl Measured {
    pub const fn new(value: f64, sigma: f64) -> Self {
        Measured { value, sigma }
    }

    /// Whether `[value - sigma, value + sigma]` meets `[lo, hi]`.
    pub fn overlaps(&self, lo: f64, hi: f64) -> bool {
        self.value - self.sigma <= hi && self.value + self.sigma >= lo
    }

    /// `|value - truth| <= k sigma`.
    pub fn covers(&self, truth: f64, k: f64) -> bool {
        crate::math::fabs(self.value - truth) <= k * self.sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SourceKind {
    QdNonresonant,
    QdResonant,
    Spdc,
}

impl SourceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SourceKind::QdNonresonant => "qd_nonresonant",
            SourceKind::QdResonant => "qd_resonant",
            SourceKind::Spdc => "spdc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "qd_nonresonant" => Some(SourceKind::QdNonresonant),
            "qd_resonant" => Some(SourceKind::QdResonant),
            "spdc" => Some(SourceKind::Spdc),
            _ => None,
        }
    }
}

/// One source in the comparison. Quantities that were not measured are
/// `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureOfMerit {
    pub label: String,
    pub kind: SourceKind,
    pub brightness: Measured,
    pub m_raw: Option<Measured>,
    pub m_corrected: Option<Measured>,
    pub g2: Option<Measured>,
    pub note: String,
}

impl FigureOfMerit {
    pub fn validate(&self) -> Result<()> {
        if !self.brightness.overlaps(0.0, 1.0) {
            return Err(Error::InvalidFigure("brightness outside [0, 1]"));
        }
        let quantities = [
            (self.m_raw, "uncorrected M outside [0, 1]"),
            (self.m_corrected, "corrected M outside [0, 1]"),
            (self.g2, "g2 outside [0, 1]"),
        ];
        for (q, msg) in quantities {
            if let Some(q) = q {
                if !(q.sigma >= 0.0) || !q.overlaps(0.0, 1.0) {
                    return Err(Error::InvalidFigure(msg));
                }
            }
        }
        if !(self.brightness.sigma >= 0.0) {
            return Err(Error::InvalidFigure("negative uncertainty"));
        }
        Ok(())
    }
}

/// Brightness in the polarised convention.
pub fn polarized_brightness(raw: f64, polarized: bool) -> Result<f64> {
    check_probability("brightness", raw)?;
    Ok(if polarized { raw } else { raw / 2.0 })
}

/// A point of the pair-source limit curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub mu: f64,
    pub m: f64,
    pub g2: f64,
}

/// `M` and `g2` of a pair source with ideal intrinsic overlap, over a
/// brightness grid in `(0, 0.1]`.
pub fn spdc_limit_curve(setup: &SpdcSetup, mu_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    mu_grid
        .iter()
        .map(|&mu| {
            if !(mu > 0.0 && mu <= 0.1) {
                return Err(Error::domain("mu", mu, "(0, 0.1]"));
            }
            let src = SqueezedPairSource::from_mu(mu)?;
            Ok(CurvePoint {
                mu,
                m: spdc::effective_indistinguishability(&src, setup, 1.0)?,
                g2: spdc::heralded_g2(&src, setup)?,
            })
        })
        .collect()
}

/// `n` points evenly spaced over `(0, max]`.
pub fn mu_grid(max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| max * i as f64 / n as f64).collect()
}

fn point(
    label: &str,
    kind: SourceKind,
    brightness: Measured,
    m_raw: Option<Measured>,
    m_corrected: Option<Measured>,
    g2: Option<Measured>,
    note: &str,
) -> FigureOfMerit {
    FigureOfMerit {
        label: label.into(),
        kind,
        brightness,
        m_raw,
        m_corrected,
        g2,
        note: note.into(),
    }
}

/// Published values of the four quantum-dot sources and the two pair-source
/// operating points.
pub fn reference_points() -> Vec<FigureOfMerit> {
    let m = Measured::new;
    alloc::vec![
        point(
            "QD1",
            SourceKind::QdNonresonant,
            m(0.325, 0.035),
            Some(m(0.74, 0.07)),
            Some(m(0.78, 0.07)),
            Some(m(0.024, 0.007)),
            "unpolarised; raw brightness 0.65 +- 0.07 halved",
        ),
        point(
            "QD2",
            SourceKind::QdNonresonant,
            m(0.175, 0.015),
            Some(m(0.68, 0.081)),
            Some(m(0.77, 0.08)),
            Some(m(0.047, 0.009)),
            "unpolarised; raw brightness 0.35 +- 0.03 halved",
        ),
        point(
            "QD3",
            SourceKind::QdResonant,
            m(0.16, 0.02),
            Some(m(0.989, 0.004)),
            Some(m(0.9956, 0.0045)),
            Some(m(0.0028, 0.0012)),
            "corrected M also reported as 0.9945",
        ),
        point(
            "QD4",
            SourceKind::QdResonant,
            m(0.08, 0.01),
            Some(m(0.973, 0.026)),
            Some(m(0.979, 0.026)),
            Some(m(0.0035, 0.004)),
            "brightness uncertainty not published; 0.01 assumed",
        ),
        point(
            "SPDC mu=0.015",
            SourceKind::Spdc,
            m(0.015, 0.0),
            Some(m(0.9795, 0.0005)),
            None,
            None,
            "interference of signal and idler through the characterised splitter",
        ),
        point(
            "SPDC mu=0.07",
            SourceKind::Spdc,
            m(0.07, 0.0),
            None,
            None,
            Some(m(0.25, 0.0)),
            "heralded autocorrelation; uncertainty not published",
        ),
    ]
}
