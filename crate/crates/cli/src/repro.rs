//! Figure reproduction: rate versus surface size, the feed-parameter family,
//! and the RRS/array power ratio across the far-field boundary.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use rrs_core::geometry::FeedModel;
use rrs_core::power_analysis::verdict;
use rrs_core::rate_analysis::{
    farfield_thresholds, rrs_farfield_asymptote, rrs_integral, rrs_lower_integral, rrs_upper_integral,
    ElementFamily, RateMethod,
};

use crate::config::{ConfigError, Resolved, RunConfig};
use crate::sweep::verdict_code;
use crate::table::{provenance, SweepRow, SweepTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig2c,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig2c => "fig2c",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig2a" => Ok(Figure::Fig2a),
            "fig2b" => Ok(Figure::Fig2b),
            "fig2c" => Ok(Figure::Fig2c),
            _ => Err(format!("unknown figure `{s}` (expected fig2a, fig2b or fig2c)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReproError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] rrs_core::Error),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Feed distance and exponent of the single-curve figures.
pub const BASELINE_FEED: (f64, f64) = (0.15, 5.0);
/// Reconstructed legend of the feed-family figure.
pub const FEED_FAMILY: [(f64, f64); 4] = [(0.15, 3.0), (0.15, 5.0), (0.25, 3.0), (0.25, 5.0)];

/// Element counts from 1e2 to 1e7, ten per decade, exact at each decade.
pub fn element_counts() -> Vec<f64> {
    (0..=50)
        .map(|i| {
            if i % 10 == 0 {
                10f64.powi(2 + i / 10)
            } else {
                10f64.powf(2.0 + i as f64 / 10.0)
            }
        })
        .collect()
}

fn with_feed(base: &Resolved, r_f: f64, alpha: f64) -> Result<Resolved, rrs_core::Error> {
    let mut r = *base;
    r.pair.scene = r.pair.scene.with_feed(FeedModel::new(alpha, r_f)?);
    Ok(r)
}

fn failed_row(x: f64, width: usize, e: impl ToString) -> SweepRow {
    SweepRow {
        values: std::iter::once(x).chain(std::iter::repeat_n(f64::NAN, width - 1)).collect(),
        error: Some(e.to_string()),
    }
}

/// Exact-integral rate, inscribed-disc lower bound and banded upper bound
/// versus element count.
pub fn fig2a(config: &RunConfig) -> Result<SweepTable, ReproError> {
    let base = config.resolve(None)?;
    let r = with_feed(&base, BASELINE_FEED.0, BASELINE_FEED.1)?;
    let scene = r.pair.scene;
    let family = ElementFamily::of(scene.surface());
    let quad = r.sizing.rate.quadrature;
    let band = r.sizing.rate.band_epsilon;

    let columns = ["elements", "rate", "rate_lower", "rate_upper", "gap_relative"];
    let mut prov = provenance(config, &r);
    prov.push(format!("feed: r_F = {} m, alpha = {}", BASELINE_FEED.0, BASELINE_FEED.1));
    prov.push("gap_relative = (rate - rate_lower) / rate".to_string());
    let mut table = SweepTable::new(columns.iter().map(|c| c.to_string()).collect(), prov);

    let rows: Vec<SweepRow> = element_counts()
        .into_par_iter()
        .map(|n| {
            let ap = family.aperture(n);
            let point = || -> Result<Vec<f64>, rrs_core::Error> {
                let full = rrs_integral(&scene, &ap).rate(&quad, RateMethod::Quadrature)?.rate;
                let lower = rrs_lower_integral(&scene, &ap).rate(&quad, RateMethod::LowerBound)?.rate;
                let upper = rrs_upper_integral(&scene, &ap, band)
                    .rate(&quad, RateMethod::UpperBound)
                    .map_or(f64::NAN, |u| u.rate);
                Ok(vec![n, full, lower, upper, (full - lower) / full])
            };
            point().map_or_else(|e| failed_row(n, columns.len(), e), SweepRow::ok)
        })
        .collect();
    rows.into_iter().for_each(|row| table.push(row));
    Ok(table)
}

pub fn fig2b_column(r_f: f64, alpha: f64) -> String {
    format!("rate_rf{r_f}_alpha{alpha}")
}

/// Exact-integral rate versus element count for each feed in
/// [`FEED_FAMILY`].
pub fn fig2b(config: &RunConfig) -> Result<SweepTable, ReproError> {
    let base = config.resolve(None)?;
    let scenes = FEED_FAMILY
        .iter()
        .map(|&(r_f, alpha)| with_feed(&base, r_f, alpha).map(|r| r.pair.scene))
        .collect::<Result<Vec<_>, _>>()?;
    let family = ElementFamily::of(base.pair.scene.surface());
    let quad = base.sizing.rate.quadrature;

    let mut columns = vec!["elements".to_string()];
    columns.extend(FEED_FAMILY.iter().map(|&(r_f, a)| fig2b_column(r_f, a)));
    let mut prov = provenance(config, &base);
    prov.push("feed legend (r_F m, alpha) reconstructed as {0.15, 0.25} x {3, 5}".to_string());
    let width = columns.len();
    let mut table = SweepTable::new(columns, prov);

    let rows: Vec<SweepRow> = element_counts()
        .into_par_iter()
        .map(|n| {
            let ap = family.aperture(n);
            let mut values = vec![n];
            for scene in &scenes {
                match rrs_integral(scene, &ap).rate(&quad, RateMethod::Quadrature) {
                    Ok(r) => values.push(r.rate),
                    Err(e) => return failed_row(n, width, e),
                }
            }
            SweepRow::ok(values)
        })
        .collect();
    rows.into_iter().for_each(|row| table.push(row));
    Ok(table)
}

/// Rates from the minimum rate to 90% of the way from the far-field
/// threshold to the RRS asymptote, with the threshold itself included.
pub fn fig2c_rates(min_rate: f64, threshold: f64, asymptote: f64) -> Vec<f64> {
    let end = threshold + 0.9 * (asymptote - threshold);
    let mut rates: Vec<f64> = (0..60).map(|i| min_rate + (end - min_rate) * i as f64 / 59.0).collect();
    rates.push(threshold);
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    rates
}

/// Power ratio P_RRS / P_array versus required rate through the verdict
/// path (closed forms in the far field, quadrature beyond).
pub fn fig2c(config: &RunConfig) -> Result<SweepTable, ReproError> {
    let base = config.resolve(None)?;
    let r = with_feed(&base, BASELINE_FEED.0, BASELINE_FEED.1)?;
    let thresholds = farfield_thresholds(&r.pair)?;
    let asymptote = rrs_farfield_asymptote(&r.pair.scene)?;
    let c_thr = thresholds.rate_threshold;

    let columns = [
        "rate",
        "near_field",
        "rrs_elements",
        "pa_elements",
        "rrs_watts",
        "pa_watts",
        "power_ratio",
        "g",
        "l_pw",
        "verdict",
    ];
    let mut prov = provenance(config, &r);
    prov.push(format!("feed: r_F = {} m, alpha = {}", BASELINE_FEED.0, BASELINE_FEED.1));
    prov.push(format!("rate_threshold C_thr: {c_thr:?}"));
    prov.push("verdict codes: 1 rrs-wins, -1 array-wins, 0 infeasible".to_string());
    let mut table = SweepTable::new(columns.iter().map(|c| c.to_string()).collect(), prov);

    let rows: Vec<SweepRow> = fig2c_rates(r.model.min_rate, c_thr, asymptote)
        .into_par_iter()
        .map(|c| match verdict(c, &r.pair, &r.model, &r.sizing) {
            Ok(v) => SweepRow::ok(vec![
                c,
                if c >= c_thr { 1.0 } else { 0.0 },
                v.rrs_sizing.count,
                v.pa_sizing.count,
                v.rrs_power.watts,
                v.pa_power.watts,
                v.rrs_power.watts / v.pa_power.watts,
                v.count_ratio,
                v.l_pw,
                verdict_code(v.verdict),
            ]),
            Err(e) => failed_row(c, columns.len(), e),
        })
        .collect();
    rows.into_iter().for_each(|row| table.push(row));
    Ok(table)
}

/// The threshold annotation is read back from the provenance lines.
pub fn threshold_from_provenance(table: &SweepTable) -> Option<f64> {
    table
        .provenance
        .iter()
        .find_map(|l| l.strip_prefix("rate_threshold C_thr: "))
        .and_then(|v| v.parse().ok())
}

pub fn plot_script(figure: Figure, table: &SweepTable) -> String {
    let csv = format!("{figure}.csv");
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset grid\n");
    match figure {
        Figure::Fig2a => {
            s.push_str("set logscale x\nset xlabel 'RRS elements'\nset ylabel 'rate (bit/s/Hz)'\nset key bottom right\n");
            s.push_str(&format!(
                "plot '{csv}' using 1:2 with lines lw 2, '' using 1:3 with lines dt 2, '' using 1:4 with lines dt 3\n"
            ));
        }
        Figure::Fig2b => {
            s.push_str("set logscale x\nset xlabel 'RRS elements'\nset ylabel 'rate (bit/s/Hz)'\nset key bottom right\n");
            let curves: Vec<String> = (2..table.columns.len() + 1)
                .map(|i| format!("'{}' using 1:{i} with lines lw 2", if i == 2 { csv.as_str() } else { "" }))
                .collect();
            s.push_str(&format!("plot {}\n", curves.join(", ")));
        }
        Figure::Fig2c => {
            if let Some(c) = threshold_from_provenance(table) {
                s.push_str(&format!("set arrow from {c}, graph 0 to {c}, graph 1 nohead dt 3\n"));
                s.push_str(&format!("set label 'C_thr' at {c}, graph 0.95 left offset 0.5, 0\n"));
            }
            s.push_str("set xlabel 'required rate C (bit/s/Hz)'\nset ylabel 'P_RRS / P_array'\nset key top left\n");
            s.push_str(&format!("plot '{csv}' using 1:7 with linespoints lw 2\n"));
        }
    }
    s
}

pub fn build(figure: Figure, config: &RunConfig) -> Result<SweepTable, ReproError> {
    match figure {
        Figure::Fig2a => fig2a(config),
        Figure::Fig2b => fig2b(config),
        Figure::Fig2c => fig2c(config),
    }
}

/// Writes `<figure>.csv` and `<figure>.gp` into `out_dir`.
pub fn write_figure(figure: Figure, config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, ReproError> {
    let table = build(figure, config)?;
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ReproError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let csv_path = out_dir.join(format!("{figure}.csv"));
    let file = fs::File::create(&csv_path).map_err(io_err(&csv_path))?;
    table.write_csv(io::BufWriter::new(file)).map_err(io_err(&csv_path))?;
    let gp_path = out_dir.join(format!("{figure}.gp"));
    fs::write(&gp_path, plot_script(figure, &table)).map_err(io_err(&gp_path))?;
    Ok(vec![csv_path, gp_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_hit_decades_exactly() {
        let c = element_counts();
        assert_eq!(c.len(), 51);
        assert_eq!(c[0], 100.0);
        assert_eq!(c[10], 1000.0);
        assert_eq!(c[30], 1e5);
        assert_eq!(c[50], 1e7);
        assert!(c.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn figure_names_parse() {
        for f in [Figure::Fig2a, Figure::Fig2b, Figure::Fig2c] {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
        assert!("fig3".parse::<Figure>().is_err());
    }

    #[test]
    fn fig2c_grid_contains_threshold() {
        let r = fig2c_rates(20.0, 25.45, 26.85);
        assert!(r.contains(&25.45));
        assert_eq!(r[0], 20.0);
        assert!(*r.last().unwrap() < 26.85);
    }
}
