//! Separable least squares: peak areas and baseline enter linearly and are
//! solved exactly for every trial of the shared decay constants and centre
//! shift, which Levenberg-Marquardt optimises. Weights follow Poisson
//! statistics by iterative reweighting with the current model.

use alloc::vec;
use alloc::vec::Vec;

use super::{peak_bins, CorrelationHistogram, HistogramLayout, HistogramMode, PeakShape};
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::math::{exp, fabs, log, sqrt};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Reweighting passes after the first, count-weighted, fit.
    pub reweighting_passes: usize,
    /// Smallest model value used as a Poisson variance.
    pub variance_floor: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 10_000,
            reweighting_passes: 3,
            variance_floor: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub center: f64,
    pub cluster: i32,
    /// Position within the cluster in units of the pulse-pair delay.
    pub offset: i32,
    /// Counts.
    pub area: f64,
    pub sigma_area: f64,
    pub decay_left: f64,
    pub decay_right: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakFit {
    pub layout: HistogramLayout,
    pub peaks: Vec<Peak>,
    /// Counts per bin.
    pub baseline: f64,
    pub sigma_baseline: f64,
    /// Shift of all peaks from their nominal positions, ns.
    pub center_shift: f64,
    /// Covariance of `[areas..., baseline]`, row-major.
    pub covariance: Vec<f64>,
    /// Pearson chi-square with model variances.
    pub chi2: f64,
    pub dof: usize,
    pub iterations: usize,
}

impl PeakFit {
    pub fn mode(&self) -> HistogramMode {
        self.layout.mode
    }

    pub fn index_of(&self, cluster: i32, offset: i32) -> Option<usize> {
        self.peaks
            .iter()
            .position(|p| p.cluster == cluster && p.offset == offset)
    }

    pub fn area_covariance(&self, i: usize, j: usize) -> f64 {
        self.covariance[i * (self.peaks.len() + 1) + j]
    }

    pub fn shape(&self) -> PeakShape {
        self.peaks.first().map_or(PeakShape::symmetric(0.0), |p| PeakShape {
            decay_left: p.decay_left,
            decay_right: p.decay_right,
        })
    }

    pub fn residual_norm(&self) -> f64 {
        sqrt(self.chi2)
    }
}

/// `[ln tau_left, ln tau_right, centre shift]`.
type Theta = [f64; 3];

struct Column {
    start: usize,
    values: Vec<f64>,
}

impl Column {
    fn end(&self) -> usize {
        self.start + self.values.len()
    }
}

struct Problem<'a> {
    layout: HistogramLayout,
    y: &'a [f64],
    grid: Vec<(f64, i32, i32)>,
    w: Vec<f64>,
    bounds: [(f64, f64); 3],
}

/// Solves `a x = b` after scaling to unit diagonal.
fn solve_spd(a: &[f64], b: &[f64], n: usize) -> Option<(Vec<f64>, Cholesky, Vec<f64>)> {
    let d: Vec<f64> = (0..n).map(|i| 1.0 / sqrt(a[i * n + i])).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let scaled: Vec<f64> = (0..n * n).map(|k| a[k] * d[k / n] * d[k % n]).collect();
    let chol = Cholesky::new(&scaled, n)?;
    let rhs: Vec<f64> = (0..n).map(|i| b[i] * d[i]).collect();
    let x = chol.solve(&rhs).into_iter().zip(&d).map(|(x, d)| x * d).collect();
    Some((x, chol, d))
}

impl<'a> Problem<'a> {
    fn shape(theta: &Theta) -> PeakShape {
        PeakShape {
            decay_left: exp(theta[0]),
            decay_right: exp(theta[1]),
        }
    }

    fn clamp(&self, theta: Theta) -> Theta {
        core::array::from_fn(|i| theta[i].clamp(self.bounds[i].0, self.bounds[i].1))
    }

    fn basis(&self, theta: &Theta) -> Vec<Column> {
        let shape = Self::shape(theta);
        let l = &self.layout;
        self.grid
            .iter()
            .map(|&(c, _, _)| {
                let (start, values) = peak_bins(l.delay_origin, l.bin_width, l.bins, c + theta[2], &shape);
                Column { start, values }
            })
            .collect()
    }

    /// Weighted normal equations over the peaks flagged in `free` plus the
    /// baseline, which is always last.
    fn normal_equations(&self, cols: &[Column], free: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let n = free.len() + 1;
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n];
        let (w, y) = (&self.w, self.y);
        for (fi, &p) in free.iter().enumerate() {
            let cp = &cols[p];
            for (fj, &q) in free.iter().enumerate().skip(fi) {
                let cq = &cols[q];
                let (lo, hi) = (cp.start.max(cq.start), cp.end().min(cq.end()));
                if lo >= hi {
                    if cq.start >= cp.end() {
                        break;
                    }
                    continue;
                }
                let s: f64 = (lo..hi)
                    .map(|i| w[i] * cp.values[i - cp.start] * cq.values[i - cq.start])
                    .sum();
                a[fi * n + fj] = s;
                a[fj * n + fi] = s;
            }
            let (mut sb, mut sy) = (0.0, 0.0);
            for (k, &v) in cp.values.iter().enumerate() {
                let i = cp.start + k;
                sb += w[i] * v;
                sy += w[i] * y[i] * v;
            }
            a[fi * n + n - 1] = sb;
            a[(n - 1) * n + fi] = sb;
            b[fi] = sy;
        }
        a[n * n - 1] = w.iter().sum();
        b[n - 1] = w.iter().zip(y).map(|(w, y)| w * y).sum();
        (a, b)
    }

    /// Linear coefficients `[areas..., baseline]` with the peaks outside
    /// `free` fixed at zero.
    fn solve_linear(&self, cols: &[Column], free: &[usize]) -> Option<Vec<f64>> {
        let (a, b) = self.normal_equations(cols, free);
        let (x, _, _) = solve_spd(&a, &b, free.len() + 1)?;
        let mut coeffs = vec![0.0; cols.len() + 1];
        for (fi, &p) in free.iter().enumerate() {
            coeffs[p] = x[fi];
        }
        coeffs[cols.len()] = x[free.len()];
        Some(coeffs)
    }

    /// Linear coefficients with negative areas pinned at zero, one at a
    /// time starting from the most negative.
    fn constrained_solve(&self, cols: &[Column]) -> Option<Vec<f64>> {
        let mut free = self.all();
        let mut coeffs = self.solve_linear(cols, &free)?;
        while let Some(worst) = (0..free.len())
            .filter(|&i| coeffs[free[i]] < 0.0)
            .min_by(|&a, &b| coeffs[free[a]].total_cmp(&coeffs[free[b]]))
        {
            free.remove(worst);
            coeffs = self.solve_linear(cols, &free)?;
        }
        Some(coeffs)
    }

    fn model(&self, cols: &[Column], coeffs: &[f64]) -> Vec<f64> {
        let mut m = vec![coeffs[cols.len()]; self.y.len()];
        for (c, &a) in cols.iter().zip(coeffs) {
            for (k, &v) in c.values.iter().enumerate() {
                m[c.start + k] += a * v;
            }
        }
        m
    }

    fn all(&self) -> Vec<usize> {
        (0..self.grid.len()).collect()
    }

    /// Weighted residuals `sqrt(w) (y - model)` at the linear optimum.
    fn residuals(&self, theta: &Theta) -> Option<(Vec<f64>, Vec<f64>)> {
        let cols = self.basis(theta);
        let coeffs = self.solve_linear(&cols, &self.all())?;
        let m = self.model(&cols, &coeffs);
        let r = (0..self.y.len())
            .map(|i| sqrt(self.w[i]) * (self.y[i] - m[i]))
            .collect();
        Some((r, coeffs))
    }

    fn levenberg_marquardt(&self, theta0: Theta, max_iterations: usize) -> Result<(Theta, usize)> {
        const STEPS: [f64; 3] = [1e-6, 1e-6, 1e-6];
        let singular = || Error::DegenerateData("singular normal equations");
        let mut theta = self.clamp(theta0);
        let (mut r, _) = self.residuals(&theta).ok_or_else(singular)?;
        let mut chi2: f64 = r.iter().map(|v| v * v).sum();
        let mut lambda = 1e-3;
        for iteration in 1..=max_iterations {
            let mut jac = [Vec::new(), Vec::new(), Vec::new()];
            for (p, col) in jac.iter_mut().enumerate() {
                let mut t = theta;
                t[p] += STEPS[p];
                let (rp, _) = self.residuals(&t).ok_or_else(singular)?;
                *col = rp.iter().zip(&r).map(|(a, b)| (a - b) / STEPS[p]).collect();
            }
            let mut jtj = [0.0; 9];
            let mut jtr = [0.0; 3];
            for p in 0..3 {
                for q in p..3 {
                    let s: f64 = jac[p].iter().zip(&jac[q]).map(|(a, b)| a * b).sum();
                    jtj[p * 3 + q] = s;
                    jtj[q * 3 + p] = s;
                }
                jtr[p] = jac[p].iter().zip(&r).map(|(a, b)| a * b).sum();
            }
            let diag_max = (0..3).map(|p| jtj[p * 4]).fold(0.0, f64::max);
            loop {
                let mut a = jtj;
                for p in 0..3 {
                    a[p * 4] += lambda * jtj[p * 4].max(1e-12 * diag_max).max(1e-300);
                }
                let neg: Vec<f64> = jtr.iter().map(|v| -v).collect();
                if let Some((delta, _, _)) = solve_spd(&a, &neg, 3) {
                    let trial = self.clamp(core::array::from_fn(|p| theta[p] + delta[p]));
                    if let Some((rt, _)) = self.residuals(&trial) {
                        let chi2_t: f64 = rt.iter().map(|v| v * v).sum();
                        if chi2_t < chi2 {
                            let step = (0..3).map(|p| fabs(trial[p] - theta[p])).fold(0.0, f64::max);
                            let gain = chi2 - chi2_t;
                            theta = trial;
                            r = rt;
                            chi2 = chi2_t;
                            lambda = (lambda / 10.0).max(1e-12);
                            if gain <= 1e-12 * chi2 || gain <= 1e-6 || step < 1e-12 {
                                return Ok((theta, iteration));
                            }
                            break;
                        }
                    }
                }
                lambda *= 10.0;
                if lambda > 1e12 {
                    // No direction lowers chi-square any further.
                    return Ok((theta, iteration));
                }
            }
        }
        Err(Error::FitNonConvergence {
            iterations: max_iterations,
            chi2,
        })
    }

    /// Initial decay constant and shift from the tallest peak.
    fn seed(&self) -> Theta {
        let l = &self.layout;
        let half = match l.mode {
            HistogramMode::Hbt => l.rep_period / 2.0,
            HistogramMode::Hom => l.pulse_pair_delay / 2.0,
        };
        let window = |c: f64| {
            let lo = libm::floor((c - half - l.delay_origin) / l.bin_width).max(0.0) as usize;
            let hi = (libm::ceil((c + half - l.delay_origin) / l.bin_width).max(0.0) as usize).min(l.bins);
            lo..hi
        };
        let tallest = self
            .grid
            .iter()
            .map(|&(c, _, _)| (c, window(c).map(|i| self.y[i]).sum::<f64>()))
            .fold((0.0, f64::NEG_INFINITY), |best, p| if p.1 > best.1 { p } else { best });
        let c = tallest.0;
        let bins = window(c);
        let outer: Vec<f64> = bins
            .clone()
            .filter(|&i| fabs(l.bin_center(i) - c) > 0.8 * half)
            .map(|i| self.y[i])
            .collect();
        let base = if outer.is_empty() {
            0.0
        } else {
            outer.iter().sum::<f64>() / outer.len() as f64
        };
        let (mut s0, mut s1, mut s_abs) = (0.0, 0.0, 0.0);
        for i in bins {
            let v = (self.y[i] - base).max(0.0);
            let d = l.bin_center(i) - c;
            s0 += v;
            s1 += v * d;
            s_abs += v * fabs(d);
        }
        let (tau, shift) = if s0 > 0.0 {
            (s_abs / s0, s1 / s0)
        } else {
            (4.0 * l.bin_width, 0.0)
        };
        self.clamp([log(tau), log(tau), shift])
    }

    fn reweight(&mut self, model: &[f64], floor: f64) {
        self.w = model.iter().map(|&m| 1.0 / m.max(floor)).collect();
    }
}

/// Fits expected (possibly non-integer) counts laid out as `layout`.
pub fn fit_expected(layout: &HistogramLayout, counts: &[f64], options: &FitOptions) -> Result<PeakFit> {
    layout.validate()?;
    if counts.len() != layout.bins {
        return Err(Error::domain("bins", counts.len() as f64, "equal to layout.bins"));
    }
    if counts.iter().any(|&c| !(c >= 0.0 && c.is_finite())) {
        return Err(Error::DegenerateData("negative or non-finite counts"));
    }
    if counts.iter().all(|&c| c == 0.0) {
        return Err(Error::DegenerateData("all bins empty"));
    }
    let grid = layout.peak_grid();
    if grid.len() < 5 {
        return Err(Error::DegenerateData("fewer than five peaks in the window"));
    }
    let spacing = match layout.mode {
        HistogramMode::Hbt => layout.rep_period,
        HistogramMode::Hom => layout.pulse_pair_delay,
    };
    let mut problem = Problem {
        layout: *layout,
        y: counts,
        grid,
        w: counts.iter().map(|&c| 1.0 / c.max(1.0)).collect(),
        bounds: [
            (log(layout.bin_width / 50.0), log(spacing / 6.0)),
            (log(layout.bin_width / 50.0), log(spacing / 6.0)),
            (-spacing / 4.0, spacing / 4.0),
        ],
    };
    let singular = || Error::DegenerateData("singular normal equations");

    let (mut theta, mut iterations) = problem.levenberg_marquardt(problem.seed(), options.max_iterations)?;
    for _ in 0..options.reweighting_passes {
        let cols = problem.basis(&theta);
        let coeffs = problem.constrained_solve(&cols).ok_or_else(singular)?;
        let model = problem.model(&cols, &coeffs);
        problem.reweight(&model, options.variance_floor);
        let (t, it) = problem.levenberg_marquardt(theta, options.max_iterations)?;
        theta = t;
        iterations += it;
    }

    let cols = problem.basis(&theta);
    let all = problem.all();
    let constrained = problem.constrained_solve(&cols).ok_or_else(singular)?;
    problem.reweight(&problem.model(&cols, &constrained), options.variance_floor);
    let constrained = problem.constrained_solve(&cols).ok_or_else(singular)?;

    let (a, _) = problem.normal_equations(&cols, &all);
    let n = all.len() + 1;
    let (_, chol, d) = solve_spd(&a, &vec![0.0; n], n).ok_or_else(singular)?;
    let scaled_inv = chol.inverse();
    let covariance: Vec<f64> = (0..n * n).map(|k| scaled_inv[k] * d[k / n] * d[k % n]).collect();

    let model = problem.model(&cols, &constrained);
    let chi2 = counts
        .iter()
        .zip(&model)
        .map(|(&y, &m)| (y - m) * (y - m) / m.max(options.variance_floor))
        .sum();
    let shape = Problem::shape(&theta);
    let peaks = problem
        .grid
        .iter()
        .enumerate()
        .map(|(p, &(c, k, j))| Peak {
            center: c + theta[2],
            cluster: k,
            offset: j,
            area: constrained[p],
            sigma_area: sqrt(covariance[p * n + p]),
            decay_left: shape.decay_left,
            decay_right: shape.decay_right,
        })
        .collect();
    Ok(PeakFit {
        layout: *layout,
        peaks,
        baseline: constrained[n - 1],
        sigma_baseline: sqrt(covariance[n * n - 1]),
        center_shift: theta[2],
        covariance,
        chi2,
        dof: layout.bins.saturating_sub(n + 3),
        iterations,
    })
}

pub fn fit_histogram(h: &CorrelationHistogram, options: &FitOptions) -> Result<PeakFit> {
    fit_expected(&h.layout, &h.counts_f64(), options)
}
