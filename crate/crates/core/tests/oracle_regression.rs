//! Values frozen from an independent double-precision implementation of the
//! element sums and of the continuous-aperture integrals.

use rrs_core::em_model::{cauchy_snr_bound, exact_rate_pa, exact_snr_rrs};
use rrs_core::power_analysis::{element_power_ratio, g_closed};
use rrs_core::presets::{dbm_to_watts, reference_array, reference_pair, reference_power_model, reference_scene};
use rrs_core::rate_analysis::{
    farfield_thresholds, pa_farfield_snr, rate_from_snr, rrs_farfield_asymptote, rrs_integral, rrs_lower_integral,
    ElementFamily, RateOptions,
};

fn close(got: f64, want: f64, rel: f64) {
    assert!(
        (got - want).abs() <= rel * want.abs(),
        "got {got}, want {want} (rel {:.3e})",
        (got - want).abs() / want.abs()
    );
}

#[test]
fn link_budget_constants() {
    close(dbm_to_watts(43.0), 19.952_623_149_688_797, 1e-14);
    close(dbm_to_watts(-96.0), 2.511_886_431_509_582e-13, 1e-14);
    let scene = reference_scene(0.15, 5.0, 1, 1).unwrap();
    close(scene.ue().psi(), 0.353_553_390_593_273_73, 1e-14);
}

#[test]
fn exact_rrs_sums() {
    let big = exact_snr_rrs(&reference_scene(0.15, 5.0, 100, 100).unwrap()).unwrap();
    close(big.snr, 13_906_735.340_321_7, 1e-9);
    close(big.rate, 23.729_280_549_362_3, 1e-12);
    let small = exact_snr_rrs(&reference_scene(0.15, 5.0, 2, 1).unwrap()).unwrap();
    close(small.snr, 1.310_537_390_809_41, 1e-9);
    close(small.rate, 1.208_228_436_441_83, 1e-10);
}

#[test]
fn cauchy_bound_reference() {
    let bound = cauchy_snr_bound(&reference_scene(0.15, 5.0, 100, 100).unwrap()).unwrap();
    close(bound, 14_848_533.938_228_3, 1e-9);
}

#[test]
fn exact_array_sum_and_farfield_form() {
    let scene = reference_scene(0.15, 5.0, 1, 1).unwrap();
    let array = reference_array(64, 64).unwrap();
    let exact = exact_rate_pa(&scene, &array).unwrap();
    close(exact.snr, 108_992_626.155_485, 1e-9);
    close(exact.rate, 26.699_655_305_789_4, 1e-12);
    let ff = pa_farfield_snr(&scene, &array, 4096.0);
    close(ff, 108_992_318.727_008, 1e-10);
}

#[test]
fn farfield_thresholds_reference() {
    let pair = reference_pair(0.15, 5.0).unwrap();
    let t = farfield_thresholds(&pair).unwrap();
    close(t.rrs_element_limit, 39_130.434_782_608_696, 1e-12);
    close(t.pa_element_limit, 4_347.826_086_956_522, 1e-12);
    close(t.rrs_rate_at_limit, 25.451_454_475_555_334, 1e-10);
    close(t.pa_rate_at_limit, 26.785_729_754_079_9, 1e-10);
    close(t.rate_threshold, 25.451_454_475_555_334, 1e-10);
}

#[test]
fn asymptotes_and_threshold_rates() {
    for (r_f, alpha, asym, at_limit) in [
        (0.15, 5.0, 26.854_263_273_890_382, 25.451_454_475_555_334),
        (0.25, 5.0, 28.328, 25.421),
        (0.15, 3.0, 28.269, 25.474),
        (0.25, 3.0, 29.743, 25.145),
    ] {
        let pair = reference_pair(r_f, alpha).unwrap();
        assert!((rrs_farfield_asymptote(&pair.scene).unwrap() - asym).abs() < 1e-3);
        assert!((farfield_thresholds(&pair).unwrap().rrs_rate_at_limit - at_limit).abs() < 1e-3);
    }
}

#[test]
fn size_ratio_reference() {
    let pair = reference_pair(0.15, 5.0).unwrap();
    close(element_power_ratio(&reference_power_model(1)).unwrap(), 198.019_801_980_198_03, 1e-13);
    close(g_closed(20.0, &pair).unwrap(), 63.7226, 1e-5);
    let c_thr = farfield_thresholds(&pair).unwrap().rate_threshold;
    close(g_closed(c_thr, &pair).unwrap(), 22.6934, 1e-5);
}

#[test]
fn continuous_aperture_rates() {
    let opts = RateOptions::default().quadrature;
    let scene = reference_scene(0.15, 5.0, 100, 100).unwrap();
    let family = ElementFamily::of(scene.surface());
    for (count, full, lower) in [
        (1e3, 18.1694, Some(17.5095)),
        (1e4, 23.7292, Some(23.2812)),
        (1e5, 26.32995, Some(26.2220)),
        (1e6, 26.79706, None),
        (4e6, 26.83989, None),
    ] {
        let aperture = family.aperture(count);
        let c = rate_from_snr(rrs_integral(&scene, &aperture).snr(&opts).unwrap().0);
        assert!((c - full).abs() < 1e-3, "{count}: {c} vs {full}");
        if let Some(lb) = lower {
            let c = rate_from_snr(rrs_lower_integral(&scene, &aperture).snr(&opts).unwrap().0);
            assert!((c - lb).abs() < 1e-3, "{count}: {c} vs {lb}");
        }
    }
}

#[test]
fn continuous_aperture_rates_across_feeds() {
    let opts = RateOptions::default().quadrature;
    for (r_f, alpha, want) in [(0.15, 5.0, 26.330), (0.25, 5.0, 27.064), (0.15, 3.0, 26.765), (0.25, 3.0, 27.140)] {
        let scene = reference_scene(r_f, alpha, 100, 100).unwrap();
        let aperture = ElementFamily::of(scene.surface()).aperture(1e5);
        let c = rate_from_snr(rrs_integral(&scene, &aperture).snr(&opts).unwrap().0);
        assert!((c - want).abs() < 1e-3, "({r_f}, {alpha}): {c} vs {want}");
    }
}
