//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Failing criteria are reported, not asserted, so the process exits 0
//! unless the harness itself breaks.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use photonsrc::parallel;
use photonsrc_core::emitter::{
    brightness_from_counts, brightness_nonresonant, eta_out_from_reflectivity, jitter_limited_m, mode_fraction,
    purcell_from_lifetime, q_factor, resonant_px_with_diagnostics, EmitterCavityParams, SetupCalibration,
};
use photonsrc_core::fock::{apply_loss, ryser_permanent, InterferometerMatrix, LossChannel, PhotonNumberDistribution};
use photonsrc_core::hom::{
    det_per_intensities, expected_peak_areas, matrix_from_transmissions, visibility_to_m, HomSetup,
};
use photonsrc_core::rng::{ids, stream};
use photonsrc_core::spdc::monte_carlo::hom_estimate;
use photonsrc_core::spdc::{
    calibrated_profile, effective_indistinguishability, heralded_g2, SpdcSetup, SqueezedPairSource,
};
use photonsrc_core::tcspc::extract_m_from_areas;
use photonsrc_core::tcspc::profiles::{coverage_trial, SourceProfile, TrialOutcome};
use rand::Rng;
use rand_distr::{Distribution, Exp};

/// Master seed of every random draw below.
const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn criterion(name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = panic::catch_unwind(AssertUnwindSafe(f));
    let elapsed = start.elapsed();
    let (pass, detail) = match result {
        Ok(o) => {
            let in_time = elapsed <= budget;
            let mut detail = o.detail;
            if !in_time {
                detail.push_str("; over time budget");
            }
            (o.pass && in_time, detail)
        }
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    println!(
        "{} {name}: {detail} [{:.3?} of {:?}]",
        if pass { "PASS" } else { "FAIL" },
        elapsed,
        budget
    );
    pass
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn splitter_anchor() -> Outcome {
    let l = matrix_from_transmissions(0.3310, 0.6690, 0.6632, 0.3368).unwrap();
    let (d, p) = det_per_intensities(&l).unwrap();
    let v = (d - p) / (d + p);
    outcome(
        within(v, 0.8012, 0.0002),
        format!("(D-P)/(D+P) = {v:.5}, target 0.8012 +- 0.0002"),
    )
}

fn visibility_anchor() -> Outcome {
    let l = matrix_from_transmissions(0.3310, 0.6690, 0.6632, 0.3368).unwrap();
    let m = visibility_to_m(0.7848, &l).unwrap();
    outcome(
        within(m, 0.9795, 0.0005),
        format!("M = {m:.5}, target 0.9795 +- 0.0005"),
    )
}

fn purcell_anchors() -> Outcome {
    let f1 = purcell_from_lifetime(150.0, 1300.0).unwrap();
    let f2 = purcell_from_lifetime(180.0, 1300.0).unwrap();
    let beta = mode_fraction(7.6).unwrap();
    let pass = (7.5..=7.8).contains(&f1) && (6.1..=6.3).contains(&f2) && within(beta, 0.88, 0.01);
    outcome(
        pass,
        format!("F(150 ps) = {f1:.3}, F(180 ps) = {f2:.3}, beta(7.6) = {beta:.4}"),
    )
}

fn brightness_anchors() -> Outcome {
    let cal = |eff: f64| SetupCalibration {
        rep_rate: 82e6,
        setup_efficiency: eff,
        polarized: false,
    };
    let cases = [
        (0.125e6, 0.0025, 0.65, 0.07),
        (0.068e6, 0.0025, 0.35, 0.03),
        (0.38e6, 0.029, 0.16, 0.02),
        (0.19e6, 0.029, 0.08, 0.01),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (rate, eff, target, tol) in cases {
        let b = brightness_from_counts(rate, &cal(eff)).unwrap();
        pass &= within(b, target, tol);
        parts.push(format!("{b:.4} ({target} +- {tol})"));
    }
    let device = EmitterCavityParams {
        purcell: 7.6,
        tau_bulk: 1300.0,
        eta_out: 0.70,
        fss: 0.0,
        cavity_pol_splitting: 0.0,
        kappa: 120.0,
        mode_energy: 1.332,
        p_sat: 1.0,
        p_pi: 1.0,
        h_purcell_fraction: None,
    };
    let sat = brightness_nonresonant(&device, f64::INFINITY).unwrap();
    pass &= within(sat, 0.62, 0.005) && within(sat, 0.65, 0.07);
    parts.push(format!("saturated model {sat:.4} (0.62, inside 0.65 +- 0.07)"));
    outcome(pass, parts.join(", "))
}

fn reflectivity_anchor() -> Outcome {
    let eta = eta_out_from_reflectivity(0.16).unwrap().selected();
    let q = q_factor(1.332, 120.0).unwrap();
    outcome(
        within(eta, 0.70, 1e-12) && within(q, 11100.0, 111.0),
        format!("eta_out = {eta:.4}, Q = {q:.1} (11100 +- 1%)"),
    )
}

fn peak_model_round_trip() -> Outcome {
    let mut worst = 0.0f64;
    for (r, t, eps) in [(0.45, 0.50, 0.05), (0.508, 0.492, 0.0012)] {
        let setup = HomSetup::from_splitting(r, t, eps, 3.0, 12.2).unwrap();
        for m in [0.0, 0.5, 0.78, 0.9956] {
            for g2 in [0.0, 0.0028, 0.024, 0.047] {
                let areas = expected_peak_areas(&setup, m, g2).unwrap();
                worst = worst.max((extract_m_from_areas(&areas, &setup, g2) - m).abs());
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max |M_extracted - M| = {worst:.2e} over 32 cases"),
    )
}

fn coverage(profile: &SourceProfile, trials: u64) -> (f64, f64, f64) {
    let results: Vec<TrialOutcome> = parallel::map_indexed(trials, None, |i| {
        coverage_trial(profile, profile.truth, SEED, i).unwrap()
    });
    let n = trials as f64;
    let g2 = results.iter().filter(|o| o.g2_covered(2.0)).count() as f64 / n;
    let m = results.iter().filter(|o| o.m_covered(2.0)).count() as f64 / n;
    let sigma_g2 = results.iter().map(|o| o.result.g2.sigma).sum::<f64>() / n;
    (g2, m, sigma_g2)
}

fn statistical_round_trip() -> Outcome {
    let trials = 500;
    let (g1, m1, _) = coverage(&SourceProfile::qd1_like(), trials);
    let (g3, m3, s3) = coverage(&SourceProfile::qd3_like(), trials);
    let ratio = s3 / 0.0012;
    let covered = [g1, m1, g3, m3].iter().all(|&c| c >= 0.95);
    let sigma_ok = (0.5..=2.0).contains(&ratio);
    outcome(
        covered && sigma_ok,
        format!(
            "2-sigma coverage over {trials} trials: QD1-like g2 {:.1}% M {:.1}%, QD3-like g2 {:.1}% M {:.1}% (>= 95%); \
             QD3-like sigma(g2) = {s3:.2e}, {ratio:.3} x 0.0012 (factor 2 allowed)",
            100.0 * g1,
            100.0 * m1,
            100.0 * g3,
            100.0 * m3
        ),
    )
}

/// `mu` where `f` crosses `level`, by bisection on a bracket where `f - level`
/// changes sign.
fn crossing(f: impl Fn(f64) -> f64, level: f64, mut lo: f64, mut hi: f64) -> f64 {
    let sign = (f(lo) - level).signum();
    assert_ne!(sign, (f(hi) - level).signum(), "no crossing in [{lo}, {hi}]");
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) - level).signum() == sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn spdc_properties() -> Outcome {
    let (cal, _) = calibrated_profile().unwrap();
    let mut dark_free = cal.clone();
    dark_free.herald_detector =
        photonsrc_core::fock::ThresholdDetector::new(cal.herald_detector.efficiency(), 0.0).unwrap();
    let g2 = |s: &SpdcSetup, mu: f64| heralded_g2(&SqueezedPairSource::from_mu(mu).unwrap(), s).unwrap();
    let m = |s: &SpdcSetup, mu: f64| {
        effective_indistinguishability(&SqueezedPairSource::from_mu(mu).unwrap(), s, 1.0).unwrap()
    };
    let mut parts = Vec::new();

    let grid: Vec<f64> = (1..=100).map(|i| 0.001 * i as f64).collect();
    let mut monotone = true;
    for s in [&cal, &dark_free] {
        let gs: Vec<f64> = grid.iter().map(|&mu| g2(s, mu)).collect();
        let ms: Vec<f64> = grid.iter().map(|&mu| m(s, mu)).collect();
        monotone &= gs.windows(2).all(|w| w[1] > w[0]) && ms.windows(2).all(|w| w[1] < w[0]);
    }
    parts.push(format!("monotone on (0, 0.1]: {monotone}"));

    let (g_small, m_small) = (g2(&dark_free, 1e-7), m(&dark_free, 1e-7));
    let limits = g_small < 1e-5 && (1.0 - m_small) < 1e-5;
    parts.push(format!(
        "mu = 1e-7 without darks: g2 {g_small:.1e}, 1 - M {:.1e}",
        1.0 - m_small
    ));

    let ideal = SpdcSetup::ideal();
    let trials = 10_000_000;
    let mut agree = true;
    for (k, mu) in [0.001, 0.01, 0.07].into_iter().enumerate() {
        let src = SqueezedPairSource::from_mu(mu).unwrap();
        let base = 2 * k as u64 * ids::MONTE_CARLO_POINT_STRIDE;
        let h = parallel::herald(&src, &ideal, SEED, base, trials, None);
        let exact = heralded_g2(&src, &ideal).unwrap();
        let g_ok = (h.g2() - exact).abs() <= 3.0 * h.g2_standard_error();
        let tally = parallel::hom(
            &src,
            &ideal,
            1.0,
            SEED,
            base + ids::MONTE_CARLO_POINT_STRIDE,
            trials,
            None,
        )
        .unwrap();
        let (m_mc, m_se) = hom_estimate(&tally, &ideal).unwrap();
        let m_exact = effective_indistinguishability(&src, &ideal, 1.0).unwrap();
        let m_ok = (m_mc - m_exact).abs() <= 3.0 * m_se;
        agree &= g_ok && m_ok;
        parts.push(format!(
            "mu {mu}: g2 {exact:.5} vs {:.5}({:.0e}), M {m_exact:.5} vs {m_mc:.5}({m_se:.0e})",
            h.g2(),
            h.g2_standard_error()
        ));
    }

    let g_cal = g2(&cal, 0.07);
    let calibrated = within(g_cal, 0.25, 0.03);
    parts.push(format!("calibrated g2(0.07) = {g_cal:.4}"));
    let mu_g2 = crossing(|mu| g2(&cal, mu), 0.03, 1e-4, 0.1);
    let mu_m = crossing(|mu| m(&cal, mu), 0.99, 1e-4, 0.1);
    let thresholds = mu_g2 < 0.013 && mu_m < 0.013;
    parts.push(format!(
        "g2 = 0.03 at mu {mu_g2:.4}, M = 0.99 at mu {mu_m:.4} (both < 0.013)"
    ));

    outcome(
        monotone && limits && agree && calibrated && thresholds,
        parts.join("; "),
    )
}

fn jitter_limit() -> Outcome {
    let mut rng = stream(SEED, 0);
    let draws = 1_000_000;
    let mut agree = 0;
    for i in 0..10 {
        let tau_rad: f64 = rng.random_range(50.0..500.0);
        let tau_relax: f64 = rng.random_range(5.0..200.0);
        let exact = jitter_limited_m(tau_rad, tau_relax).unwrap();
        let mut draw_rng = stream(SEED, 1 + i);
        let jitter = Exp::new(1.0 / tau_relax).unwrap();
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..draws {
            let d: f64 = jitter.sample(&mut draw_rng) - jitter.sample(&mut draw_rng);
            let o = (-d.abs() / tau_rad).exp();
            s += o;
            s2 += o * o;
        }
        let n = draws as f64;
        let mean = s / n;
        let se = ((s2 / n - mean * mean) / n).sqrt();
        agree += usize::from((mean - exact).abs() <= 3.0 * se);
    }
    let band: Vec<f64> = (30..=60)
        .map(|t| jitter_limited_m(150.0, t as f64).unwrap())
        .filter(|m| (0.70..=0.85).contains(m))
        .collect();
    outcome(
        agree == 10 && !band.is_empty(),
        format!(
            "{agree}/10 points within 3 SE; tau_relax in [30, 60] ps gives M in [{:.3}, {:.3}]",
            jitter_limited_m(150.0, 60.0).unwrap(),
            jitter_limited_m(150.0, 30.0).unwrap()
        ),
    )
}

fn resonant_occupation() -> Outcome {
    let device = EmitterCavityParams {
        purcell: 9.8,
        tau_bulk: 1300.0,
        eta_out: 0.7,
        fss: 15.0,
        cavity_pol_splitting: 90.0,
        kappa: 120.0,
        mode_energy: 1.332,
        p_sat: 1.0,
        p_pi: 1.0,
        h_purcell_fraction: None,
    };
    let r = resonant_px_with_diagnostics(&device, 1.0).unwrap();
    outcome(
        within(r.p_x, 0.23, 0.10) && r.change < 1e-6,
        format!(
            "p_x = {:.4} (0.23 +- 0.10), H fraction {:.4}, last halving changed p_x by {:.1e}",
            r.p_x,
            device.h_fraction(),
            r.change
        ),
    )
}

fn naive_permanent(m: &InterferometerMatrix) -> Complex64 {
    fn rec(m: &InterferometerMatrix, row: usize, used: &mut [bool]) -> Complex64 {
        if row == m.dim() {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..m.dim() {
            if !used[col] {
                used[col] = true;
                acc += m.get(row, col) * rec(m, row + 1, used);
                used[col] = false;
            }
        }
        acc
    }
    rec(m, 0, &mut vec![false; m.dim()])
}

fn fock_layer() -> Outcome {
    let mut rng = stream(SEED, 2);
    let mut worst_loss = 0.0f64;
    for _ in 0..1000 {
        let len = rng.random_range(1..20);
        let w: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
        let s: f64 = w.iter().sum();
        let dist = PhotonNumberDistribution::new(w.iter().map(|x| x / s).collect()).unwrap();
        let out = apply_loss(&dist, LossChannel::new(rng.random()).unwrap());
        worst_loss = worst_loss.max((out.total() - dist.total()).abs());
    }
    let mut worst_perm = 0.0f64;
    for i in 0..100 {
        let n = 2 + i % 4;
        let entries = (0..n * n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let m = InterferometerMatrix::new(n, entries).unwrap();
        worst_perm = worst_perm.max((ryser_permanent(&m) - naive_permanent(&m)).norm());
    }
    outcome(
        worst_loss <= 1e-12 && worst_perm <= 1e-10,
        format!("loss conservation error {worst_loss:.1e}, Ryser vs permutation sum {worst_perm:.1e}"),
    )
}

fn main() {
    let ms = Duration::from_millis;
    let s = Duration::from_secs;
    let results = [
        criterion("splitter anchor", ms(1), splitter_anchor),
        criterion("visibility anchor", ms(1), visibility_anchor),
        criterion("Purcell anchors", s(1), purcell_anchors),
        criterion("brightness calibration anchors", s(1), brightness_anchors),
        criterion("reflectivity anchor", s(1), reflectivity_anchor),
        criterion("peak-area model round trip", s(1), peak_model_round_trip),
        criterion("statistical round trip", s(600), statistical_round_trip),
        criterion("pair-source properties", s(300), spdc_properties),
        criterion("jitter limit", s(60), jitter_limit),
        criterion("resonant occupation", s(60), resonant_occupation),
        criterion("Fock layer", s(60), fock_layer),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
}
