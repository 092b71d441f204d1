use alloc::vec::Vec;

use crate::error::{check_positive, Result};
use crate::math::exp;

/// Decay constants of a two-sided exponential peak, ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakShape {
    pub decay_left: f64,
    pub decay_right: f64,
}

impl PeakShape {
    pub fn symmetric(decay: f64) -> Self {
        PeakShape {
            decay_left: decay,
            decay_right: decay,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("decay_left", self.decay_left)?;
        check_positive("decay_right", self.decay_right)?;
        Ok(())
    }
}

/// Decay constants on each side beyond which a peak is taken as zero;
/// `exp(-40)` is below double precision relative to the peak.
const SUPPORT_DECAYS: f64 = 40.0;

/// Bin integrals of a unit-area peak at `center` over the bins
/// `[origin + i w, origin + (i + 1) w)`, `i < bins`.
///
/// Returns the first bin of the support and the integrals over it. Edge
/// values of the exponential tails are generated by repeated
/// multiplication, so one `exp` is evaluated per side.
pub fn peak_bins(origin: f64, width: f64, bins: usize, center: f64, shape: &PeakShape) -> (usize, Vec<f64>) {
    let (tl, tr) = (shape.decay_left, shape.decay_right);
    let norm = tl + tr;
    let edge = |i: isize| origin + i as f64 * width;
    let lo = libm::floor((center - SUPPORT_DECAYS * tl - origin) / width).max(0.0) as isize;
    let hi = (libm::ceil((center + SUPPORT_DECAYS * tr - origin) / width) as isize).min(bins as isize);
    if hi <= lo {
        return (0, Vec::new());
    }
    // Index of the first edge at or right of the centre.
    let split = (libm::ceil((center - origin) / width) as isize).clamp(lo, hi + 1);

    // Left tail: F(x) = (tl / norm) exp((x - c) / tl) for x < c.
    // Right tail: G(x) = 1 - F(x) = (tr / norm) exp(-(x - c) / tr) for x >= c.
    let n_edges = (hi - lo + 1) as usize;
    let mut cdf_left = alloc::vec![0.0; n_edges];
    let mut tail_right = alloc::vec![0.0; n_edges];
    if split > lo {
        let step = exp(-width / tl);
        let mut v = tl / norm * exp((edge(split - 1) - center) / tl);
        for i in (lo..split).rev() {
            cdf_left[(i - lo) as usize] = v;
            v *= step;
        }
    }
    if split <= hi {
        let step = exp(-width / tr);
        let mut v = tr / norm * exp(-(edge(split) - center) / tr);
        for i in split..=hi {
            tail_right[(i - lo) as usize] = v;
            v *= step;
        }
    }
    let values = (lo..hi)
        .map(|i| {
            let a = (i - lo) as usize;
            if i + 1 < split {
                cdf_left[a + 1] - cdf_left[a]
            } else if i >= split {
                tail_right[a] - tail_right[a + 1]
            } else {
                (1.0 - tail_right[a + 1]) - cdf_left[a]
            }
        })
        .collect();
    (lo as usize, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cdf(x: f64, c: f64, s: &PeakShape) -> f64 {
        let n = s.decay_left + s.decay_right;
        if x < c {
            s.decay_left / n * (-(c - x) / s.decay_left).exp()
        } else {
            1.0 - s.decay_right / n * (-(x - c) / s.decay_right).exp()
        }
    }

    #[test]
    fn matches_direct_cdf_differences() {
        let s = PeakShape {
            decay_left: 0.12,
            decay_right: 0.2,
        };
        for &c in &[0.0, 0.013, 0.025, -1.3, 4.97] {
            let (start, v) = peak_bins(-5.0, 0.05, 200, c, &s);
            for (k, &x) in v.iter().enumerate() {
                let i = start + k;
                let a = -5.0 + i as f64 * 0.05;
                let expected = cdf(a + 0.05, c, &s) - cdf(a, c, &s);
                assert!((x - expected).abs() < 1e-13, "c={c} i={i} {x} {expected}");
            }
        }
    }

    #[test]
    fn unit_area_inside_window() {
        let s = PeakShape::symmetric(0.15);
        let (_, v) = peak_bins(-10.0, 0.05, 400, 0.3, &s);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_at_window_edge() {
        let s = PeakShape::symmetric(0.15);
        let (start, v) = peak_bins(0.0, 0.05, 100, 0.0, &s);
        assert_eq!(start, 0);
        assert!((v.iter().sum::<f64>() - 0.5).abs() < 1e-12);
        let (_, v) = peak_bins(0.0, 0.05, 100, -100.0, &s);
        assert!(v.is_empty());
    }
}
