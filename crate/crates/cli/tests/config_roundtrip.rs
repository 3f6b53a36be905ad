use proptest::option;
use proptest::prelude::*;

use rrs_cli::{Key, RunConfig};

/// Distinct fixed-value keys, each present or absent.
fn value_lines() -> impl Strategy<Value = Vec<String>> {
    (
        (
            option::of((1.0f64..500.0).prop_map(|v| format!("ue_range = {v}"))),
            option::of((0.2f64..1.4).prop_map(|v| format!("ue_zenith = {v}"))),
            option::of((0.05f64..0.5).prop_map(|v| format!("feed_distance = {v}"))),
            option::of((1.0f64..10.0).prop_map(|v| format!("feed_exponent = {v}"))),
            option::of((-110.0f64..-80.0).prop_map(|v| format!("noise_power_dbm = {v}"))),
            option::of((1u32..300).prop_map(|v| format!("rrs_m = {v}"))),
        ),
        (
            option::of((1u32..300).prop_map(|v| format!("pa_n = {v}"))),
            option::of((1u32..16).prop_map(|v| format!("group_size = {v}"))),
            option::of((1e-10f64..1e-4).prop_map(|v| format!("rel_tol = {v:e}"))),
            option::of((10.0f64..60.0).prop_map(|v| format!("frequency_ghz = {v}"))),
            option::of((0.0f64..1e-2).prop_map(|v| format!("band_epsilon = {v}"))),
        ),
    )
        .prop_map(|((a, b, c, d, e, f), (g, h, i, j, k))| {
            [a, b, c, d, e, f, g, h, i, j, k].into_iter().flatten().collect()
        })
}

fn sweep_line() -> impl Strategy<Value = Option<String>> {
    prop_oneof![
        Just(None),
        (20.0f64..22.0, 22.0f64..25.0, 1usize..8).prop_map(|(a, b, n)| Some(format!("rate = lin({a}, {b}, {n})"))),
        (1e2f64..1e3, 1e4f64..1e6, 2usize..8).prop_map(|(a, b, n)| Some(format!("rrs_elements = log({a}, {b}, {n})"))),
        (30.0f64..40.0, 40.0f64..50.0, 2usize..5).prop_map(|(a, b, n)| Some(format!("tx_power_dbm = lin({a}, {b}, {n})"))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn emit_parse_round_trip(
        mut lines in value_lines(),
        sweep in sweep_line(),
        with_quantity in any::<bool>(),
        shuffle_seed in any::<u64>(),
    ) {
        let n = lines.len();
        if n > 1 {
            lines.rotate_left((shuffle_seed % n as u64) as usize);
        }
        let mut text = String::from("# generated\n\n");
        for line in &lines {
            text.push_str(line);
            text.push('\n');
        }
        if let Some(s) = &sweep {
            text.push_str(s);
            text.push_str("   # sweep axis\n");
        }
        if with_quantity {
            text.push_str("quantity = rate_rrs_lower\noutput = out.csv\n");
        }
        let config = RunConfig::parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        let emitted = config.emit();
        let again = RunConfig::parse(&emitted).unwrap();
        prop_assert_eq!(&again, &config);
        prop_assert_eq!(again.emit(), emitted);
    }

    #[test]
    fn set_overrides_file_values(range in 1.0f64..500.0, other in 1.0f64..500.0) {
        let config = RunConfig::parse_with_overrides(&format!("ue_range = {other}\n"), &[format!("ue_range={range}")]).unwrap();
        let mut expected = RunConfig::default();
        expected.set(Key::UeRange, range);
        prop_assert_eq!(config, expected);
    }
}
