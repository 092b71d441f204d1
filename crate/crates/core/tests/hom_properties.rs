use num_complex::Complex64;
use photonsrc_core::fock::InterferometerMatrix;
use photonsrc_core::hom::*;
use photonsrc_core::tcspc::extract_m_from_areas;
use proptest::prelude::*;

fn two_mode() -> impl Strategy<Value = InterferometerMatrix> {
    prop::array::uniform8(-1.0f64..1.0).prop_map(|v| {
        let e = (0..4).map(|i| Complex64::new(v[2 * i], v[2 * i + 1])).collect();
        InterferometerMatrix::new(2, e).unwrap()
    })
}

#[test]
fn measured_splitter_maximal_visibility() {
    let v = maximal_visibility(&measured_splitter()).unwrap();
    assert!((v - 0.8012).abs() <= 2e-4);
    assert!((visibility_to_m(0.7848, &measured_splitter()).unwrap() - 0.9795).abs() <= 5e-4);
}

#[test]
fn measured_intensities_are_bounded() {
    let r = visibility_result(0.7848, 0.0004, &measured_splitter()).unwrap();
    assert!(r.d <= 1.0 + 1e-3 && r.p <= 1.0 + 1e-3);
    assert!((r.m - 0.9795).abs() <= 5e-4);
    assert!(r.sigma_m > r.sigma_v);
}

#[test]
fn orthogonal_polarisation_fixture_is_reproducible() {
    // Cross-polarised photons: the extracted overlap is compatible with zero.
    let setup = HomSetup::from_splitting(0.508, 0.492, 0.0012, 2.2, 12.2).unwrap();
    let a = expected_peak_areas(&setup, 0.0, 0.0028).unwrap();
    assert!(a.zero() > 0.2 * (a.minus_delay() + a.plus_delay()));
    let m = extract_m_from_areas(&a, &setup, 0.0028);
    assert!((m - 0.057).abs() < 0.084);
}

proptest! {
    #[test]
    fn coincidence_is_affine_in_overlap(l in two_mode(), m in 0.0f64..=1.0) {
        let c0 = coincidence_probability(&l, 0.0).unwrap();
        let c1 = coincidence_probability(&l, 1.0).unwrap();
        let cm = coincidence_probability(&l, m).unwrap();
        prop_assert!((cm - (c0 + m * (c1 - c0))).abs() <= 1e-12 * c0.max(1.0));
        let (d, p) = det_per_intensities(&l).unwrap();
        if p <= d {
            prop_assert!(c1 <= c0 + 1e-15);
        }
    }

    #[test]
    fn visibility_round_trip(l in two_mode(), m in 0.0f64..=1.0) {
        let (d, p) = det_per_intensities(&l).unwrap();
        prop_assume!((d - p).abs() > 1e-3);
        let v = 1.0 - coincidence_probability(&l, m).unwrap() / coincidence_probability(&l, 0.0).unwrap();
        prop_assert!((visibility_to_m(v, &l).unwrap() - m).abs() <= 1e-9);
    }

    #[test]
    fn peak_area_model_inverts_exactly(
        r in 0.2f64..0.8, t in 0.2f64..0.8, eps in 0.0f64..0.2,
        m in 0.0f64..=1.0, g2 in 0.0f64..0.2,
    ) {
        let setup = HomSetup::from_splitting(r, t, eps, 2.2, 12.2).unwrap();
        let a = expected_peak_areas(&setup, m, g2).unwrap();
        prop_assert!((extract_m_from_areas(&a, &setup, g2) - m).abs() <= 1e-12);
        prop_assert!(a.central.iter().chain(&a.far).all(|&x| x >= 0.0));
    }
}
