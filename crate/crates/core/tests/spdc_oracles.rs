use photonsrc_core::fock::{InterferometerMatrix, ThresholdDetector};
use photonsrc_core::spdc::monte_carlo::{hom_estimate, run_herald, run_hom};
use photonsrc_core::spdc::*;
use proptest::prelude::*;

fn lossy_setup() -> SpdcSetup {
    let det = ThresholdDetector::new(0.6, 0.0).unwrap();
    SpdcSetup {
        herald_transmittance: 0.4,
        signal_transmittance: 0.3,
        herald_detector: det,
        hbt_detectors: [det, ThresholdDetector::new(0.5, 0.0).unwrap()],
        hbt_split: 0.45,
        hom_matrix: InterferometerMatrix::balanced_splitter(),
    }
}

#[test]
fn enumeration_matches_sampling_for_ideal_setup() {
    let setup = SpdcSetup::ideal();
    for (i, &mu) in [0.001, 0.01, 0.07].iter().enumerate() {
        let src = SqueezedPairSource::from_mu(mu).unwrap();
        let exact = heralded_g2(&src, &setup).unwrap();
        let tally = run_herald(&src, &setup, 17 + i as u64, 10_000_000);
        let se = tally.g2_standard_error();
        assert!(
            (tally.g2() - exact).abs() < 3.0 * se,
            "mu {mu}: {} vs {exact} (se {se})",
            tally.g2()
        );
    }
}

#[test]
fn enumeration_matches_sampling_with_losses() {
    let setup = lossy_setup();
    let src = SqueezedPairSource::from_mu(0.1).unwrap();
    let exact = heralded_g2(&src, &setup).unwrap();
    let tally = run_herald(&src, &setup, 5, 10_000_000);
    let se = tally.g2_standard_error();
    assert!(
        (tally.g2() - exact).abs() < 3.0 * se,
        "{} vs {exact} (se {se})",
        tally.g2()
    );
}

#[test]
fn interference_enumeration_matches_sampling() {
    let setup = lossy_setup();
    for (i, &(mu, m)) in [(0.01, 1.0), (0.1, 0.9)].iter().enumerate() {
        let src = SqueezedPairSource::from_mu(mu).unwrap();
        let exact = effective_indistinguishability(&src, &setup, m).unwrap();
        let tally = run_hom(&src, &setup, m, 40 + i as u64, 10_000_000).unwrap();
        let (est, se) = hom_estimate(&tally, &setup).unwrap();
        assert!((est - exact).abs() < 3.0 * se, "mu {mu}: {est} vs {exact} (se {se})");
    }
}

#[test]
fn ideal_limits() {
    let setup = SpdcSetup::ideal();
    let src = SqueezedPairSource::from_mu(1e-7).unwrap();
    assert!(heralded_g2(&src, &setup).unwrap() < 1e-5);
    assert!((effective_indistinguishability(&src, &setup, 1.0).unwrap() - 1.0).abs() < 1e-5);
}

#[test]
fn curves_are_monotone() {
    for setup in [SpdcSetup::ideal(), lossy_setup(), calibrated_profile().unwrap().0] {
        let mut last = (0.0, 1.0 + 1e-12);
        for i in 1..=40 {
            let src = SqueezedPairSource::from_mu(0.0025 * i as f64).unwrap();
            let g2 = heralded_g2(&src, &setup).unwrap();
            let m = effective_indistinguishability(&src, &setup, 1.0).unwrap();
            assert!(g2 > last.0 && m < last.1, "step {i}: {g2} {m}");
            last = (g2, m);
        }
    }
}

#[test]
fn calibrated_profile_thresholds() {
    let (setup, cal) = calibrated_profile().unwrap();
    assert!((cal.g2 - 0.25).abs() < 0.03);
    for i in 1..=100 {
        let mu = 0.001 * i as f64;
        let src = SqueezedPairSource::from_mu(mu).unwrap();
        if heralded_g2(&src, &setup).unwrap() < 0.03 {
            assert!(mu < 0.013, "g2 below 0.03 at mu {mu}");
        }
        if effective_indistinguishability(&src, &setup, 1.0).unwrap() > 0.99 {
            assert!(mu < 0.013, "M above 0.99 at mu {mu}");
        }
    }
}

#[test]
fn measured_splitter_reference_point() {
    // Lossless single pair through the characterised splitter: visibility
    // 0.7848 corresponds to M = 0.9795.
    let mut setup = SpdcSetup::ideal();
    setup.hom_matrix = photonsrc_core::hom::measured_splitter();
    let src = SqueezedPairSource::with_truncation(1e-9, 6).unwrap();
    let m = effective_indistinguishability(&src, &setup, 0.9795).unwrap();
    assert!((m - 0.9795).abs() < 1e-6);
}

fn detector() -> impl Strategy<Value = ThresholdDetector> {
    (0.05f64..=1.0, 0.0f64..0.01).prop_map(|(e, d)| ThresholdDetector::new(e, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lambda_mu_round_trip(x in 0.0f64..0.99) {
        let src = SqueezedPairSource::new(x).unwrap();
        prop_assert!((lambda_from_mu(brightness_mu(&src)) - x).abs() <= 1e-14);
    }

    #[test]
    fn swapping_detectors_changes_nothing(
        mu in 0.001f64..0.1,
        a in detector(), b in detector(),
        t_h in 0.05f64..=1.0, t_s in 0.05f64..=1.0,
        m in 0.0f64..=1.0,
    ) {
        let setup = SpdcSetup {
            herald_transmittance: t_h,
            signal_transmittance: t_s,
            herald_detector: ThresholdDetector::new(0.7, 1e-5).unwrap(),
            hbt_detectors: [a, b],
            hbt_split: 0.5,
            hom_matrix: InterferometerMatrix::balanced_splitter(),
        };
        let swapped = setup.with_detectors_swapped();
        let src = SqueezedPairSource::from_mu(mu).unwrap();
        let g = heralded_g2(&src, &setup).unwrap();
        let gs = heralded_g2(&src, &swapped).unwrap();
        prop_assert!((g - gs).abs() <= 1e-12 * g.abs().max(1e-3));
        let e = effective_indistinguishability(&src, &setup, m).unwrap();
        let es = effective_indistinguishability(&src, &swapped, m).unwrap();
        prop_assert!((e - es).abs() <= 1e-10);
    }

    #[test]
    fn g2_nondecreasing_in_mu(
        mu1 in 0.001f64..0.1, mu2 in 0.001f64..0.1,
        t_h in 0.05f64..=1.0, t_s in 0.05f64..=1.0, e in 0.1f64..=1.0,
    ) {
        let det = ThresholdDetector::new(e, 0.0).unwrap();
        let setup = SpdcSetup {
            herald_transmittance: t_h,
            signal_transmittance: t_s,
            herald_detector: det,
            hbt_detectors: [det, det],
            hbt_split: 0.5,
            hom_matrix: InterferometerMatrix::balanced_splitter(),
        };
        let (lo, hi) = (mu1.min(mu2), mu1.max(mu2));
        let g_lo = heralded_g2(&SqueezedPairSource::from_mu(lo).unwrap(), &setup).unwrap();
        let g_hi = heralded_g2(&SqueezedPairSource::from_mu(hi).unwrap(), &setup).unwrap();
        prop_assert!(g_lo <= g_hi + 1e-12);
    }

    #[test]
    fn pair_distribution_matches_closed_form(x in 0.0f64..0.9) {
        let src = SqueezedPairSource::new(x).unwrap();
        let d = pair_distribution(&src);
        let expected = 1.0 - x.powi(d.n_max() as i32 + 1);
        prop_assert!((d.total() - expected).abs() <= 1e-13);
    }
}
