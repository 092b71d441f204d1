use super::{HistogramMode, PeakFit};
use crate::error::{Error, Result};
use crate::fom::Measured;
use crate::hom::{HomSetup, PeakAreas};
use crate::math::sqrt;

/// Quantities extracted from a pair of autocorrelation and interference
/// fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionResult {
    pub g2: Measured,
    /// `M` without the multi-photon correction.
    pub m_raw: Measured,
    pub m_corrected: Measured,
}

/// `A_0 / mean(A_side)` over every side peak in the window.
pub fn extract_g2(fit: &PeakFit) -> Result<Measured> {
    if fit.mode() != HistogramMode::Hbt {
        return Err(Error::DegenerateData("g2 needs an autocorrelation fit"));
    }
    let center = fit.index_of(0, 0).ok_or(Error::DegenerateData("no zero-delay peak"))?;
    let sides: alloc::vec::Vec<usize> = (0..fit.peaks.len()).filter(|&i| fit.peaks[i].cluster != 0).collect();
    if sides.is_empty() {
        return Err(Error::NoSidePeaks);
    }
    let m = sides.len() as f64;
    let mean = sides.iter().map(|&i| fit.peaks[i].area).sum::<f64>() / m;
    if !(mean > 0.0) {
        return Err(Error::DivisionHazard("side peaks carry no counts"));
    }
    let a0 = fit.peaks[center].area;
    let g2 = a0 / mean;
    let mut grad = alloc::vec![0.0; fit.peaks.len()];
    grad[center] = 1.0 / mean;
    for &i in &sides {
        grad[i] = -a0 / (m * mean * mean);
    }
    Ok(Measured::new(g2, sqrt(quadratic_form(fit, &grad))))
}

fn quadratic_form(fit: &PeakFit, grad: &[f64]) -> f64 {
    let mut v = 0.0;
    for (i, gi) in grad.iter().enumerate().filter(|(_, g)| **g != 0.0) {
        for (j, gj) in grad.iter().enumerate().filter(|(_, g)| **g != 0.0) {
            v += gi * gj * fit.area_covariance(i, j);
        }
    }
    v.max(0.0)
}

/// Overlap from the inner-peak ratio `rho = A_0 / (A_-D + A_+D)`:
/// `M = [2 g2 + s/2 - rho (2 + g2 s)] / (1 - epsilon)^2`, `s = R/T + T/R`.
pub fn m_from_ratio(rho: f64, r: f64, t: f64, epsilon: f64, g2: f64) -> f64 {
    let s = r / t + t / r;
    let v = 1.0 - epsilon;
    (2.0 * g2 + s / 2.0 - rho * (2.0 + g2 * s)) / (v * v)
}

/// [`m_from_ratio`] on model or measured inner areas.
pub fn extract_m_from_areas(areas: &PeakAreas, setup: &HomSetup, g2: f64) -> f64 {
    let (r, t) = setup.splitting();
    m_from_ratio(areas.ratio(), r, t, setup.epsilon(), g2)
}

/// `M` with and without the `g2` correction, with first-order error
/// propagation of the fitted areas, of `R`, `T` and `epsilon`, and of `g2`
/// for the corrected value.
pub fn extract_m(fit: &PeakFit, setup: &HomSetup, g2: Measured) -> Result<ExtractionResult> {
    if fit.mode() != HistogramMode::Hom {
        return Err(Error::DegenerateData("M needs an interference fit"));
    }
    setup.validate()?;
    let idx = |j| {
        fit.index_of(0, j)
            .ok_or(Error::DegenerateData("inner peaks not in window"))
    };
    let (im, i0, ip) = (idx(-1)?, idx(0)?, idx(1)?);
    let (am, a0, ap) = (fit.peaks[im].area, fit.peaks[i0].area, fit.peaks[ip].area);
    let side = am + ap;
    if !(side > 0.0) {
        return Err(Error::DivisionHazard("A_-D + A_+D = 0"));
    }
    let rho = a0 / side;
    let mut grad = alloc::vec![0.0; fit.peaks.len()];
    grad[i0] = 1.0 / side;
    grad[im] = -a0 / (side * side);
    grad[ip] = -a0 / (side * side);
    let var_rho = quadratic_form(fit, &grad);

    let (r, t) = setup.splitting();
    let eps = setup.epsilon();
    let v = 1.0 - eps;
    let s = r / t + t / r;
    let ds_dr = 1.0 / t - t / (r * r);
    let ds_dt = 1.0 / r - r / (t * t);
    let var_s = (ds_dr * setup.sigma_r) * (ds_dr * setup.sigma_r) + (ds_dt * setup.sigma_t) * (ds_dt * setup.sigma_t);

    let estimate = |g: f64, sigma_g: f64| {
        let m = m_from_ratio(rho, r, t, eps, g);
        let d_rho = -(2.0 + g * s) / (v * v);
        let d_s = (0.5 - rho * g) / (v * v);
        let d_eps = 2.0 * m / v;
        let d_g = (2.0 - rho * s) / (v * v);
        let var = d_rho * d_rho * var_rho
            + d_s * d_s * var_s
            + (d_eps * setup.sigma_epsilon) * (d_eps * setup.sigma_epsilon)
            + (d_g * sigma_g) * (d_g * sigma_g);
        Measured::new(m, sqrt(var))
    };
    Ok(ExtractionResult {
        g2,
        m_raw: estimate(0.0, 0.0),
        m_corrected: estimate(g2.value, g2.sigma),
    })
}
