//! Acceptance suite. Each test prints one `PASS` or `FAIL` line; run with
//! `cargo test -p rrs-cli --test acceptance -- --nocapture --test-threads 1`
//! to see them in order.

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rrs_core::em_model::{cauchy_snr_bound, exact_rate_pa, exact_snr_rrs, snr_with_phases, PhaseMask};
use rrs_core::power_analysis::{
    crossover_rates, element_power_ratio, g_closed, g_numeric, power_pa, power_rrs, size_pa, size_rrs,
    SizingOptions,
};
use rrs_core::presets::{reference_array, reference_pair, reference_power_model, reference_scene};
use rrs_core::rate_analysis::{
    farfield_thresholds, pa_farfield_snr, pa_integral, rate_from_snr, rate_rrs_lower, rate_rrs_quadrature,
    rate_rrs_upper, rrs_integral, rrs_lower_farfield_snr, rrs_lower_integral, rrs_upper_integral, ElementFamily,
    RateMethod, RateOptions, DEFAULT_BAND_EPSILON,
};
use rrs_core::{Scene, UePlacement};

type Outcome = Result<String, String>;

fn report(id: u32, title: &str, outcome: Outcome) {
    match outcome {
        Ok(detail) => println!("PASS criterion {id:>2} ({title}): {detail}"),
        Err(detail) => {
            println!("FAIL criterion {id:>2} ({title}): {detail}");
            panic!("criterion {id} failed: {detail}");
        }
    }
}

fn ensure(ok: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

fn rrs_rate_at(scene: &Scene, count: f64) -> Result<f64, String> {
    let family = ElementFamily::of(scene.surface());
    let opts = RateOptions::default().quadrature;
    rrs_integral(scene, &family.aperture(count))
        .rate(&opts, RateMethod::Quadrature)
        .map(|r| r.rate)
        .map_err(|e| e.to_string())
}

/// 200 seeded scenes: alpha in [2, 8], r_F in [0.1, 0.5] m, up to 300 x 300
/// elements, UE anywhere in front of the surface.
fn random_scenes() -> Vec<Scene> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..200)
        .map(|_| {
            let alpha = rng.gen_range(2.0..=8.0);
            let r_f = rng.gen_range(0.1..=0.5);
            let m = rng.gen_range(1..=300);
            let n = rng.gen_range(1..=300);
            let zenith = rng.gen_range(0.2..1.4);
            let azimuth = rng.gen_range(-1.2..1.2);
            reference_scene(r_f, alpha, m, n)
                .unwrap()
                .with_ue(UePlacement::new(50.0, zenith, azimuth, 1.0).unwrap())
        })
        .collect()
}

#[test]
fn criterion_01_integral_matches_element_sum() {
    let outcome = (|| {
        let start = Instant::now();
        let mut worst = 0.0f64;
        for side in [20, 50, 100, 200] {
            let s = reference_scene(0.15, 5.0, side, side).map_err(|e| e.to_string())?;
            let quad = rate_rrs_quadrature(&s, &RateOptions::default()).map_err(|e| e.to_string())?.rate;
            let exact = rate_from_snr(exact_snr_rrs(&s).map_err(|e| e.to_string())?.snr);
            let rel = (quad - exact).abs() / exact;
            worst = worst.max(rel);
            ensure(rel <= 0.05, || format!("{side}x{side}: integral {quad} vs sum {exact}"))?;
        }
        let elapsed = start.elapsed();
        ensure(elapsed <= Duration::from_secs(30), || format!("took {elapsed:?}"))?;
        Ok(format!("worst relative rate error {worst:.2e} (limit 5e-2), {elapsed:.2?}"))
    })();
    report(1, "integral vs element sum", outcome);
}

#[test]
fn criterion_02_bound_ordering() {
    let outcome = (|| {
        let opts = RateOptions::default();
        let mut upper_defined = 0;
        for (i, s) in random_scenes().iter().enumerate() {
            let lower = rate_rrs_lower(s, &opts).map_err(|e| format!("scene {i}: {e}"))?;
            let full = rate_rrs_quadrature(s, &opts).map_err(|e| format!("scene {i}: {e}"))?;
            let slack = 2.0 * (lower.estimated_numerical_error + full.estimated_numerical_error);
            ensure(lower.rate <= full.rate + slack, || {
                format!("scene {i}: lower {} > integral {}", lower.rate, full.rate)
            })?;
            if let Ok(upper) = rate_rrs_upper(s, &opts) {
                upper_defined += 1;
                ensure(upper.rate >= full.rate, || {
                    format!("scene {i}: upper {} < integral {}", upper.rate, full.rate)
                })?;
            }
        }
        Ok(format!("200 scenes ordered, upper bound defined on {upper_defined}"))
    })();
    report(2, "bound ordering", outcome);
}

fn lower_gap(count: f64) -> Result<f64, String> {
    let s = reference_scene(0.15, 5.0, 1, 1).unwrap();
    let ap = ElementFamily::of(s.surface()).aperture(count);
    let opts = RateOptions::default().quadrature;
    let full = rrs_integral(&s, &ap).rate(&opts, RateMethod::Quadrature).map_err(|e| e.to_string())?.rate;
    let lower = rrs_lower_integral(&s, &ap)
        .rate(&opts, RateMethod::LowerBound)
        .map_err(|e| e.to_string())?
        .rate;
    Ok((full - lower) / full)
}

#[test]
fn criterion_03_lower_bound_gap_shrinks() {
    let outcome = (|| {
        let small = lower_gap(1e3)?;
        ensure(small < 0.10, || format!("gap at 1e3 is {small}"))?;
        let mut worst = 0.0f64;
        for count in [1e5, 3e5, 1e6, 3e6, 1e7] {
            let gap = lower_gap(count)?;
            worst = worst.max(gap);
            ensure(gap < 0.01, || format!("gap at {count:e} is {gap}"))?;
        }
        Ok(format!("gap {small:.4} at 1e3, at most {worst:.2e} for 1e5..1e7"))
    })();
    report(3, "lower-bound gap", outcome);
}

#[test]
fn criterion_04_rate_saturates() {
    let outcome = (|| {
        let s = reference_scene(0.15, 5.0, 1, 1).unwrap();
        let family = ElementFamily::of(s.surface());
        let opts = RateOptions::default().quadrature;
        let upper = |count: f64| {
            rrs_upper_integral(&s, &family.aperture(count), Some(DEFAULT_BAND_EPSILON))
                .rate(&opts, RateMethod::UpperBound)
                .map(|r| r.rate)
                .map_err(|e| e.to_string())
        };
        let (c1, c4) = (rrs_rate_at(&s, 1e6)?, rrs_rate_at(&s, 4e6)?);
        let (u1, u4) = (upper(1e6)?, upper(4e6)?);
        ensure(c4 - c1 < 0.1, || format!("increment {}", c4 - c1))?;
        ensure(c1 < u1 && c4 < u4, || format!("rates {c1}, {c4} vs upper {u1}, {u4}"))?;
        Ok(format!("C(1e6) = {c1:.4}, C(4e6) = {c4:.4}, increment {:.4}; upper {u1:.3}, {u4:.3}", c4 - c1))
    })();
    report(4, "saturation", outcome);
}

#[test]
fn criterion_05_feed_monotonicity() {
    let outcome = (|| {
        let rate = |r_f: f64, alpha: f64| rrs_rate_at(&reference_scene(r_f, alpha, 1, 1).unwrap(), 1e5);
        let base = rate(0.15, 5.0)?;
        let far = rate(0.25, 5.0)?;
        let broad = rate(0.15, 3.0)?;
        ensure(far > base, || format!("r_F 0.25: {far} <= {base}"))?;
        ensure(broad > base, || format!("alpha 3: {broad} <= {base}"))?;
        Ok(format!("C(0.15,5) = {base:.4} < C(0.25,5) = {far:.4}, C(0.15,3) = {broad:.4}"))
    })();
    report(5, "feed monotonicity", outcome);
}

#[test]
fn criterion_06_farfield_closed_forms() {
    let outcome = (|| {
        let pair = reference_pair(0.15, 5.0).unwrap();
        let t = farfield_thresholds(&pair).map_err(|e| e.to_string())?;
        let opts = RateOptions::default().quadrature;

        let rrs_count = 0.01 * t.rrs_element_limit;
        let ap = ElementFamily::of(pair.scene.surface()).aperture(rrs_count);
        let closed = rrs_lower_farfield_snr(&pair.scene, &ap).map_err(|e| e.to_string())?;
        let quad = rrs_lower_integral(&pair.scene, &ap).snr(&opts).map_err(|e| e.to_string())?.0;
        let rrs_err = (closed / quad - 1.0).abs();
        ensure(rrs_err <= 0.01, || format!("RRS closed form {closed} vs disc {quad}"))?;

        let pa_count = 0.01 * t.pa_element_limit;
        let ap = ElementFamily::of(&pair.array).aperture(pa_count);
        let closed = pa_farfield_snr(&pair.scene, &pair.array, pa_count);
        let quad = pa_integral(&pair.scene, &pair.array, &ap).snr(&opts).map_err(|e| e.to_string())?.0;
        let pa_err = (closed / quad - 1.0).abs();
        ensure(pa_err <= 0.01, || format!("array closed form {closed} vs integral {quad}"))?;

        // Nearest integer grid to 1% of the limit.
        let (m, n) = (6, 7);
        let array = reference_array(m, n).map_err(|e| e.to_string())?;
        let exact = exact_rate_pa(&pair.scene, &array).map_err(|e| e.to_string())?.snr;
        let closed = pa_farfield_snr(&pair.scene, &array, (m * n) as f64);
        let sum_err = (closed / exact - 1.0).abs();
        ensure(sum_err <= 0.02, || format!("array closed form {closed} vs {m}x{n} sum {exact}"))?;
        Ok(format!(
            "RRS {rrs_err:.2e}, array {pa_err:.2e} (limit 1e-2); array vs {m}x{n} sum {sum_err:.2e} (limit 2e-2)"
        ))
    })();
    report(6, "far-field closed forms", outcome);
}

#[test]
fn criterion_07_count_ratio_consistency() {
    let outcome = (|| {
        let pair = reference_pair(0.15, 5.0).unwrap();
        let model = reference_power_model(1);
        let c_thr = farfield_thresholds(&pair).map_err(|e| e.to_string())?.rate_threshold;
        let opts = SizingOptions::default();
        let mut worst = 0.0f64;
        for i in 0..20 {
            let c = model.min_rate + (0.95 * c_thr - model.min_rate) * i as f64 / 19.0;
            let closed = g_closed(c, &pair).map_err(|e| e.to_string())?;
            let numeric = g_numeric(c, &pair, &opts).map_err(|e| e.to_string())?;
            let rel = (closed - numeric).abs() / closed;
            worst = worst.max(rel);
            ensure(rel <= 0.05, || format!("C = {c}: closed {closed} vs numeric {numeric}"))?;
        }
        Ok(format!("worst relative difference {worst:.2e} over 20 rates (limit 5e-2)"))
    })();
    report(7, "g closed vs numeric", outcome);
}

#[test]
fn criterion_08_crossover_structure() {
    let outcome = (|| {
        let pair = reference_pair(0.15, 5.0).unwrap();
        let model = reference_power_model(1);
        let c_thr = farfield_thresholds(&pair).map_err(|e| e.to_string())?.rate_threshold;
        let g: Vec<f64> = (0..200)
            .map(|i| g_closed(model.min_rate + (c_thr - model.min_rate) * i as f64 / 200.0, &pair))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let rising: Vec<bool> = g.windows(2).map(|w| w[1] > w[0]).collect();
        let changes = rising.windows(2).filter(|w| w[0] != w[1]).count();
        ensure(changes == 1, || format!("{changes} sign changes in the discrete derivative"))?;

        let l_pw = element_power_ratio(&model).map_err(|e| e.to_string())?;
        let direct = 0.1 / (5e-6 + 5e-4);
        ensure((l_pw - direct).abs() <= 1e-12 * direct, || format!("l_pw {l_pw} vs {direct}"))?;

        let report = crossover_rates(&pair, &model).map_err(|e| e.to_string())?;
        let mut roots = Vec::new();
        for c in [report.c_e1, report.c_e2].into_iter().flatten() {
            let g = g_closed(c, &pair).map_err(|e| e.to_string())?;
            let rel = (g - l_pw).abs() / l_pw;
            ensure(rel <= 1e-6, || format!("root {c}: g = {g}"))?;
            roots.push(c);
        }
        let (lo, hi) = report.rrs_wins_interval.ok_or("no rrs-wins interval")?;
        ensure(lo <= model.min_rate && hi >= c_thr, || {
            format!("rrs wins on [{lo}, {hi}], window [{}, {c_thr}]", model.min_rate)
        })?;
        Ok(format!(
            "one derivative sign change; l_pw = {l_pw:.7}; roots {roots:?}; rrs wins on [{lo:.4}, {hi:.4}]"
        ))
    })();
    report(8, "crossover structure", outcome);
}

#[test]
fn criterion_09_cauchy_bound() {
    let outcome = (|| {
        for (i, s) in random_scenes().iter().enumerate() {
            let exact = exact_snr_rrs(s).map_err(|e| e.to_string())?.snr;
            let bound = cauchy_snr_bound(s).map_err(|e| e.to_string())?;
            ensure(bound >= exact * (1.0 - 1e-12), || format!("scene {i}: bound {bound} < exact {exact}"))?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for i in 0..20 {
            let side = rng.gen_range(10..=120);
            let r_f = rng.gen_range(0.1..=0.25);
            let alpha = rng.gen_range(2.0..=8.0);
            let gap = |r_f: f64| -> Result<f64, String> {
                let s = reference_scene(r_f, alpha, side, side).map_err(|e| e.to_string())?;
                let exact = exact_snr_rrs(&s).map_err(|e| e.to_string())?.snr;
                Ok((cauchy_snr_bound(&s).map_err(|e| e.to_string())? - exact) / exact)
            };
            let (near, far) = (gap(r_f)?, gap(2.0 * r_f)?);
            ensure(far < near, || {
                format!("sample {i} ({side}x{side}, r_F {r_f}, alpha {alpha}): gap {far} >= {near}")
            })?;
        }
        Ok("bound holds on 200 scenes; gap shrinks on 20 of 20 doublings".to_string())
    })();
    report(9, "Cauchy bound", outcome);
}

#[test]
fn criterion_10_near_field_feed_trend() {
    let outcome = (|| {
        let base = reference_pair(0.15, 5.0).unwrap();
        let c_thr = farfield_thresholds(&base).map_err(|e| e.to_string())?.rate_threshold;
        let rate = 1.2 * c_thr;
        let model = reference_power_model(1);
        let opts = SizingOptions::default();
        let mut rrs = Vec::new();
        let mut pa = Vec::new();
        for (r_f, alpha) in [(0.25, 3.0), (0.15, 5.0)] {
            let pair = reference_pair(r_f, alpha).unwrap();
            let r = size_rrs(rate, &pair.scene, &opts)
                .map_err(|e| format!("C = {rate:.4}, RRS (r_F {r_f}, alpha {alpha}): {e}"))?;
            let p = size_pa(rate, &pair.scene, &pair.array, &opts)
                .map_err(|e| format!("C = {rate:.4}, array: {e}"))?;
            rrs.push((r.count, power_rrs(&model, r.count).watts));
            pa.push((p.count, power_pa(&model, p.count).watts));
        }
        ensure(rrs[0].0 < rrs[1].0 && rrs[0].1 < rrs[1].1, || format!("RRS sizes {rrs:?}"))?;
        ensure(pa[0] == pa[1], || format!("array sizes differ: {pa:?}"))?;
        Ok(format!("C = {rate:.4}: RRS {rrs:?}, array {pa:?}"))
    })();
    report(10, "near-field feed trend", outcome);
}

#[test]
fn criterion_11_alignment_optimality() {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst_eq = 0.0f64;
        for i in 0..100 {
            let m = rng.gen_range(1..=16);
            let n = rng.gen_range(1..=16);
            let s = reference_scene(rng.gen_range(0.05..0.5), rng.gen_range(1.0..10.0), m, n)
                .unwrap()
                .with_ue(UePlacement::new(50.0, rng.gen_range(0.2..1.4), rng.gen_range(-1.2..1.2), 1.0).unwrap());
            let best = exact_snr_rrs(&s).map_err(|e| e.to_string())?;
            let again = snr_with_phases(&s, &best.phase_mask).map_err(|e| e.to_string())?.snr;
            let eq = (again - best.snr).abs() / best.snr;
            worst_eq = worst_eq.max(eq);
            ensure(eq <= 1e-10, || format!("scene {i}: returned mask gives {again} vs {}", best.snr))?;
            for _ in 0..1000 {
                let phases = (0..m * n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
                let mask = PhaseMask::new(m, n, phases).map_err(|e| e.to_string())?;
                let snr = snr_with_phases(&s, &mask).map_err(|e| e.to_string())?.snr;
                ensure(snr <= best.snr * (1.0 + 1e-12), || format!("scene {i}: mask beats optimum"))?;
            }
        }
        Ok(format!("100 scenes x 1000 masks; returned mask matches to {worst_eq:.1e}"))
    })();
    report(11, "alignment optimality", outcome);
}

struct Csv {
    provenance: Vec<String>,
    columns: HashMap<String, Vec<f64>>,
    status: Vec<String>,
}

fn read_csv(path: &Path) -> Result<Csv, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let provenance = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .map(str::to_string)
        .collect();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    let mut columns: HashMap<String, Vec<f64>> = HashMap::new();
    let mut status = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        for (name, field) in header.iter().zip(record.iter()) {
            if name == "status" {
                status.push(field.to_string());
            } else {
                let v = field.parse::<f64>().map_err(|e| format!("{name} = {field:?}: {e}"))?;
                columns.entry(name.clone()).or_default().push(v);
            }
        }
    }
    Ok(Csv { provenance, columns, status })
}

impl Csv {
    fn column(&self, name: &str) -> Result<&[f64], String> {
        self.columns.get(name).map(Vec::as_slice).ok_or_else(|| format!("missing column {name}"))
    }

    fn check_stamped(&self, name: &str) -> Result<(), String> {
        for key in ["tool: ", "config-sha256: ", "quadrature rel_tol: "] {
            ensure(self.provenance.iter().any(|l| l.starts_with(key)), || format!("{name}: no `{key}` line"))?;
        }
        ensure(self.status.iter().all(|s| s == "ok"), || format!("{name}: failed rows"))
    }
}

#[test]
fn criterion_12_end_to_end_reproduction() {
    let outcome = (|| {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let start = Instant::now();
        let status = Command::new(env!("CARGO_BIN_EXE_rrs"))
            .args(["repro", "fig2a", "fig2b", "fig2c", "--out"])
            .arg(dir.path())
            .status()
            .map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        ensure(status.success(), || format!("repro exited with {status}"))?;
        ensure(elapsed <= Duration::from_secs(300), || format!("took {elapsed:?}"))?;

        let a = read_csv(&dir.path().join("fig2a.csv"))?;
        a.check_stamped("fig2a")?;
        let counts = a.column("elements")?;
        let gaps = a.column("gap_relative")?;
        for (&n, &gap) in counts.iter().zip(gaps) {
            if n == 1e3 {
                ensure(gap < 0.10, || format!("fig2a gap {gap} at 1e3"))?;
            }
            if n >= 1e5 {
                ensure(gap < 0.01, || format!("fig2a gap {gap} at {n:e}"))?;
            }
        }
        ensure(counts.contains(&1e3), || "fig2a has no 1e3 row".into())?;

        let b = read_csv(&dir.path().join("fig2b.csv"))?;
        b.check_stamped("fig2b")?;
        let at = b.column("elements")?.iter().position(|&n| n == 1e5).ok_or("fig2b has no 1e5 row")?;
        let rate = |col: &str| b.column(col).map(|v| v[at]);
        let base = rate("rate_rf0.15_alpha5")?;
        ensure(rate("rate_rf0.25_alpha5")? > base, || "fig2b: r_F trend".into())?;
        ensure(rate("rate_rf0.15_alpha3")? > base, || "fig2b: alpha trend".into())?;

        let c = read_csv(&dir.path().join("fig2c.csv"))?;
        c.check_stamped("fig2c")?;
        let c_thr: f64 = c
            .provenance
            .iter()
            .find_map(|l| l.strip_prefix("rate_threshold C_thr: "))
            .ok_or("fig2c has no threshold line")?
            .parse()
            .map_err(|e| format!("threshold: {e}"))?;
        let mut below = 0;
        for (&r, &ratio) in c.column("rate")?.iter().zip(c.column("power_ratio")?) {
            if r < c_thr {
                below += 1;
                ensure(ratio < 1.0, || format!("fig2c: P_R/P_P = {ratio} at C = {r}"))?;
            }
        }
        ensure(below > 0, || "fig2c has no rows below the threshold".into())?;
        Ok(format!("repro in {elapsed:.2?}; fig2a, fig2b checks hold; P_R/P_P < 1 on {below} rates below {c_thr:.4}"))
    })();
    report(12, "end-to-end reproduction", outcome);
}
