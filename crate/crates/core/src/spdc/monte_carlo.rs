//! Monte Carlo oracle for the pair-source observables.
//!
//! Each trial draws a pair number, then follows every photon through its
//! loss, splitter and detector as independent Bernoulli events. Multi-photon
//! interference outcomes are sampled from permanents of the splitter matrix,
//! which the enumeration never uses.
//!
//! Work is cut into fixed-size chunks, chunk `i` drawing from stream
//! `MONTE_CARLO_BASE + i` of the master seed. Tallies are integer counts, so
//! any schedule of chunks over any number of workers reduces to the same
//! totals.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use super::{SpdcSetup, SqueezedPairSource};
use crate::error::{check_probability, Error, Result};
use crate::fock::{permanent, InterferometerMatrix, ThresholdDetector};
use crate::hom;
use crate::math::{factorial, log, sqrt};
use crate::rng::{ids, stream, StreamRng};

/// Trials per chunk.
pub const CHUNK_TRIALS: u64 = 1 << 16;

/// Number of chunks needed for `trials`, rounded up.
pub fn chunk_count(trials: u64) -> u64 {
    trials.div_ceil(CHUNK_TRIALS)
}

fn chunk_rng(seed: u64, chunk: u64) -> StreamRng {
    stream(seed, ids::MONTE_CARLO_BASE + chunk)
}

/// Pair number drawn from the geometric distribution, optionally
/// conditioned on at least one pair.
fn draw_pairs(rng: &mut StreamRng, lambda_sq: f64, at_least_one: bool) -> usize {
    if lambda_sq == 0.0 {
        return usize::from(at_least_one);
    }
    let u = 1.0 - rng.random::<f64>();
    let n = libm::floor(log(u) / log(lambda_sq)) as usize;
    n + usize::from(at_least_one)
}

fn clicks(rng: &mut StreamRng, photons: usize, det: &ThresholdDetector) -> bool {
    let mut click = rng.random::<f64>() < det.dark_prob();
    for _ in 0..photons {
        click |= rng.random::<f64>() < det.efficiency();
    }
    click
}

fn survivors(rng: &mut StreamRng, n: usize, t: f64) -> usize {
    (0..n).filter(|_| rng.random::<f64>() < t).count()
}

/// Event counts of the heralded autocorrelation experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HeraldTally {
    pub trials: u64,
    pub herald: u64,
    pub herald_a: u64,
    pub herald_b: u64,
    pub herald_ab: u64,
}

impl HeraldTally {
    pub fn merge(&mut self, other: &HeraldTally) {
        self.trials += other.trials;
        self.herald += other.herald;
        self.herald_a += other.herald_a;
        self.herald_b += other.herald_b;
        self.herald_ab += other.herald_ab;
    }

    pub fn g2(&self) -> f64 {
        self.herald as f64 * self.herald_ab as f64 / (self.herald_a as f64 * self.herald_b as f64)
    }

    /// Delta-method standard error of [`HeraldTally::g2`] from the
    /// covariance of the nested event indicators.
    pub fn g2_standard_error(&self) -> f64 {
        let n = self.trials as f64;
        let p = [
            self.herald as f64 / n,
            self.herald_a as f64 / n,
            self.herald_b as f64 / n,
            self.herald_ab as f64 / n,
        ];
        let grad = [1.0 / p[0], -1.0 / p[1], -1.0 / p[2], 1.0 / p[3]];
        // E[X_i X_j] for the nested indicators H ⊇ HA, HB ⊇ HAB, HA ∩ HB = HAB.
        let joint = |i: usize, j: usize| -> f64 {
            match (i.min(j), i.max(j)) {
                (a, b) if a == b => p[a],
                (0, b) => p[b],
                _ => p[3],
            }
        };
        let mut var = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                var += grad[i] * grad[j] * (joint(i, j) - p[i] * p[j]);
            }
        }
        self.g2() * sqrt(var / n)
    }
}

/// Runs chunk `chunk` of the heralded-`g2` experiment.
///
/// With a dark-free herald no herald fires without a pair, so pair numbers
/// are drawn conditioned on `n >= 1`; every click probability then scales by
/// the same factor and the `g2` ratio is unchanged.
pub fn herald_chunk(src: &SqueezedPairSource, setup: &SpdcSetup, seed: u64, chunk: u64, trials: u64) -> HeraldTally {
    let mut rng = chunk_rng(seed, chunk);
    let condition = setup.herald_detector.dark_prob() == 0.0;
    let herald_eff = setup.herald_transmittance * setup.herald_detector.efficiency();
    let [det_a, det_b] = setup.hbt_detectors;
    let mut tally = HeraldTally {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let n = draw_pairs(&mut rng, src.lambda_sq(), condition);
        let herald_photons = survivors(&mut rng, n, herald_eff);
        let herald = herald_photons > 0 || rng.random::<f64>() < setup.herald_detector.dark_prob();
        let signal = survivors(&mut rng, n, setup.signal_transmittance);
        let to_a = survivors(&mut rng, signal, setup.hbt_split);
        let a = clicks(&mut rng, to_a, &det_a);
        let b = clicks(&mut rng, signal - to_a, &det_b);
        if herald {
            tally.herald += 1;
            tally.herald_a += u64::from(a);
            tally.herald_b += u64::from(b);
            tally.herald_ab += u64::from(a && b);
        }
    }
    tally
}

fn chunk_sizes(trials: u64) -> impl Iterator<Item = (u64, u64)> {
    (0..chunk_count(trials)).map(move |c| (c, CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS)))
}

/// Sequential driver over all chunks of the heralded-`g2` experiment.
pub fn run_herald(src: &SqueezedPairSource, setup: &SpdcSetup, seed: u64, trials: u64) -> HeraldTally {
    let mut total = HeraldTally::default();
    for (chunk, n) in chunk_sizes(trials) {
        total.merge(&herald_chunk(src, setup, seed, chunk, n));
    }
    total
}

/// Size of the `chunk`-th chunk for a run of `trials`.
pub fn chunk_trials(trials: u64, chunk: u64) -> u64 {
    CHUNK_TRIALS.min(trials.saturating_sub(chunk * CHUNK_TRIALS))
}

/// Coincidence counts of the two-photon interference experiment, at the
/// configured overlap and with fully distinguishable photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HomTally {
    pub trials: u64,
    pub coincidences: u64,
    pub coincidences_distinguishable: u64,
}

impl HomTally {
    pub fn merge(&mut self, other: &HomTally) {
        self.trials += other.trials;
        self.coincidences += other.coincidences;
        self.coincidences_distinguishable += other.coincidences_distinguishable;
    }

    pub fn visibility(&self) -> f64 {
        1.0 - self.coincidences as f64 / self.coincidences_distinguishable as f64
    }

    /// Standard error of the visibility; the two coincidence counts come
    /// from independent trials.
    pub fn visibility_standard_error(&self) -> f64 {
        let n = self.trials as f64;
        let c = self.coincidences as f64 / n;
        let c0 = self.coincidences_distinguishable as f64 / n;
        let rel = (1.0 - c) / (c * n) + (1.0 - c0) / (c0 * n);
        (c / c0) * sqrt(rel)
    }
}

/// Output-count distributions of a unitary 2x2 splitter, memoised per input.
struct SplitterSampler<'a> {
    matrix: &'a InterferometerMatrix,
    cache: BTreeMap<(usize, usize), Vec<f64>>,
}

impl<'a> SplitterSampler<'a> {
    /// Probability of `m` photons in output 0 for input `|k, j>`,
    /// `|per(L[rows, cols])|^2 / (k! j! m! (N-m)!)`.
    fn cumulative(&mut self, k: usize, j: usize) -> Result<&[f64]> {
        if !self.cache.contains_key(&(k, j)) {
            let total = k + j;
            let rows: Vec<usize> = core::iter::repeat_n(0, k).chain(core::iter::repeat_n(1, j)).collect();
            let mut acc = 0.0;
            let mut cdf = Vec::with_capacity(total + 1);
            for m in 0..=total {
                let p = if total == 0 {
                    1.0
                } else {
                    let cols: Vec<usize> = core::iter::repeat_n(0, m)
                        .chain(core::iter::repeat_n(1, total - m))
                        .collect();
                    let sub = self.matrix.submatrix(&rows, &cols)?;
                    permanent(&sub)?.norm_sqr() / (factorial(k) * factorial(j) * factorial(m) * factorial(total - m))
                };
                acc += p;
                cdf.push(acc);
            }
            self.cache.insert((k, j), cdf);
        }
        Ok(&self.cache[&(k, j)])
    }

    fn sample(&mut self, rng: &mut StreamRng, k: usize, j: usize) -> Result<usize> {
        let cdf = self.cumulative(k, j)?;
        let u = rng.random::<f64>() * cdf[cdf.len() - 1];
        Ok(cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1))
    }
}

/// Unitarity deviation above which the HOM sampler refuses a matrix.
pub const SAMPLER_UNITARITY_LIMIT: f64 = 1e-9;

/// Runs chunk `chunk` of the two-photon interference experiment.
///
/// Half of the chunk's trials use overlap `intrinsic_m`, the other half
/// fully distinguishable photons. With dark-free output detectors pair
/// numbers are conditioned on `n >= 1`, which scales both coincidence rates
/// alike.
pub fn hom_chunk(
    src: &SqueezedPairSource,
    setup: &SpdcSetup,
    intrinsic_m: f64,
    seed: u64,
    chunk: u64,
    trials: u64,
) -> Result<HomTally> {
    check_probability("intrinsic_m", intrinsic_m)?;
    let matrix = &setup.hom_matrix;
    if matrix.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            dim: matrix.dim(),
        });
    }
    if matrix.unitarity_deviation() > SAMPLER_UNITARITY_LIMIT {
        return Err(Error::domain(
            "unitarity_deviation",
            matrix.unitarity_deviation(),
            "unitary matrix for sampling",
        ));
    }
    let mut rng = chunk_rng(seed, chunk);
    let mut sampler = SplitterSampler {
        matrix,
        cache: BTreeMap::new(),
    };
    let [det0, det1] = setup.hbt_detectors;
    let condition = det0.dark_prob() == 0.0 && det1.dark_prob() == 0.0;
    let to_output0 = matrix.intensity(1, 0);
    let mut tally = HomTally {
        trials: trials / 2,
        ..Default::default()
    };
    for trial in 0..2 * (trials / 2) {
        let overlap = if trial % 2 == 0 { intrinsic_m } else { 0.0 };
        let n = draw_pairs(&mut rng, src.lambda_sq(), condition);
        let idler = survivors(&mut rng, n, setup.herald_transmittance);
        let signal = survivors(&mut rng, n, setup.signal_transmittance);
        let shared = survivors(&mut rng, signal, overlap);
        let m_shared = sampler.sample(&mut rng, idler, shared)?;
        let m_orth = survivors(&mut rng, signal - shared, to_output0);
        let out0 = m_shared + m_orth;
        let out1 = idler + signal - out0;
        let coincidence = clicks(&mut rng, out0, &det0) & clicks(&mut rng, out1, &det1);
        if coincidence {
            if trial % 2 == 0 {
                tally.coincidences += 1;
            } else {
                tally.coincidences_distinguishable += 1;
            }
        }
    }
    Ok(tally)
}

pub fn run_hom(
    src: &SqueezedPairSource,
    setup: &SpdcSetup,
    intrinsic_m: f64,
    seed: u64,
    trials: u64,
) -> Result<HomTally> {
    let mut total = HomTally::default();
    for (chunk, n) in chunk_sizes(trials) {
        total.merge(&hom_chunk(src, setup, intrinsic_m, seed, chunk, n)?);
    }
    Ok(total)
}

/// Converts a sampled visibility to `M` with the setup's splitter matrix,
/// returning `(M, standard error)`.
pub fn hom_estimate(tally: &HomTally, setup: &SpdcSetup) -> Result<(f64, f64)> {
    let (d, p) = hom::det_per_intensities(&setup.hom_matrix)?;
    let scale = (d + p) / (d - p);
    Ok((scale * tally.visibility(), scale * tally.visibility_standard_error()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spdc::lambda_from_mu;

    #[test]
    fn chunking_covers_all_trials() {
        let trials = 3 * CHUNK_TRIALS + 17;
        let sizes: Vec<_> = chunk_sizes(trials).collect();
        assert_eq!(sizes.len(), 4);
        assert_eq!(sizes.iter().map(|s| s.1).sum::<u64>(), trials);
        assert_eq!(chunk_trials(trials, 3), 17);
        assert_eq!(chunk_trials(trials, 4), 0);
    }

    #[test]
    fn pair_draws_follow_geometric_law() {
        let mut rng = chunk_rng(11, 0);
        let x = 0.3;
        let draws = 200_000;
        let mut counts = [0u32; 4];
        for _ in 0..draws {
            let n = draw_pairs(&mut rng, x, false);
            if n < 4 {
                counts[n] += 1;
            }
        }
        for (n, &c) in counts.iter().enumerate() {
            let p = (1.0 - x) * libm::pow(x, n as f64);
            let sd = sqrt(p * (1.0 - p) / draws as f64);
            assert!((c as f64 / draws as f64 - p).abs() < 5.0 * sd);
        }
    }

    #[test]
    fn sampler_reproduces_hom_dip() {
        let mut setup = SpdcSetup::ideal();
        setup.hom_matrix = InterferometerMatrix::balanced_splitter();
        let mut sampler = SplitterSampler {
            matrix: &setup.hom_matrix,
            cache: BTreeMap::new(),
        };
        let cdf = sampler.cumulative(1, 1).unwrap().to_vec();
        assert!((cdf[0] - 0.5).abs() < 1e-12);
        assert!((cdf[1] - 0.5).abs() < 1e-12);
        assert!((cdf[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_unitary_matrix_is_refused() {
        let mut setup = SpdcSetup::ideal();
        setup.hom_matrix = hom::measured_splitter();
        let src = SqueezedPairSource::new(lambda_from_mu(0.01)).unwrap();
        assert!(hom_chunk(&src, &setup, 1.0, 1, 0, 10).is_err());
    }
}
