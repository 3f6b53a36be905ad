use rayon::prelude::*;
use thiserror::Error;

use rrs_core::em_model::{exact_rate_pa, exact_snr_rrs};
use rrs_core::geometry::{ArrayGeometry, ElementGrid, Scene};
use rrs_core::power_analysis::{element_power_ratio, g_closed, g_numeric, power_pa, power_rrs, verdict, Verdict};
use rrs_core::rate_analysis::{
    pa_farfield_snr, pa_integral, rrs_integral, rrs_lower_farfield_snr, rrs_lower_integral, rrs_upper_integral,
    Aperture, ElementFamily, RateMethod, RateResult,
};

use crate::config::{key_label, ConfigError, Quantity, Resolved, RunConfig};
use crate::table::{provenance, SweepRow, SweepTable};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] rrs_core::Error),
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("no sweep axis configured; write e.g. `rate = lin(20, 25, 11)`")]
    NoAxis,
    #[error("no quantity configured; set `quantity = ...`")]
    NoQuantity,
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Column names produced by [`evaluate`].
pub fn columns(quantity: Quantity) -> &'static [&'static str] {
    match quantity {
        Quantity::RateRrsExact | Quantity::RatePaExact => &["rate", "snr"],
        Quantity::RateRrsQuadrature
        | Quantity::RateRrsLower
        | Quantity::RateRrsUpper
        | Quantity::RateRrsFarfield
        | Quantity::RatePaQuadrature
        | Quantity::RatePaFarfield => &["rate", "snr", "numerical_error"],
        Quantity::Bounds => &["rate_lower", "rate", "rate_upper"],
        Quantity::PowerRrs => &["elements", "watts", "exceeds_budget", "l_pw"],
        Quantity::PowerPa => &["elements", "watts", "exceeds_budget"],
        Quantity::GClosed | Quantity::GNumeric => &["g", "l_pw"],
        Quantity::Verdict => &[
            "verdict",
            "rrs_elements",
            "pa_elements",
            "rrs_watts",
            "pa_watts",
            "power_ratio",
            "g",
            "l_pw",
        ],
    }
}

/// Numeric code for the verdict column.
pub fn verdict_code(v: Verdict) -> f64 {
    match v {
        Verdict::RrsWins => 1.0,
        Verdict::ArrayWins => -1.0,
        Verdict::Infeasible => 0.0,
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Surface used for element sums: the configured grid, or the nearest
/// whole grid of the configured aspect when an element count is given.
fn surface_scene(r: &Resolved) -> Result<Scene, rrs_core::Error> {
    let scene = r.pair.scene;
    match r.rrs_elements {
        None => Ok(scene),
        Some(n) => {
            let k = scene.surface().aspect_ratio();
            let m = ((n * k).sqrt().round() as usize).max(1);
            let nn = ((n / k).sqrt().round() as usize).max(1);
            Ok(scene.with_surface(scene.surface().resized(m, nn)?))
        }
    }
}

fn sum_array(r: &Resolved) -> Result<ArrayGeometry, rrs_core::Error> {
    let array = r.pair.array;
    match r.pa_elements {
        None => Ok(array),
        Some(n) => {
            let k = array.aspect_ratio();
            array.resized(((n * k).sqrt().round() as usize).max(1), ((n / k).sqrt().round() as usize).max(1))
        }
    }
}

pub fn rrs_aperture(r: &Resolved) -> (Aperture, f64) {
    let surface = r.pair.scene.surface();
    match r.rrs_elements {
        Some(n) => (ElementFamily::of(surface).aperture(n), n),
        None => (Aperture::of(surface), surface.element_count() as f64),
    }
}

pub fn pa_aperture(r: &Resolved) -> (Aperture, f64) {
    let array = &r.pair.array;
    match r.pa_elements {
        Some(n) => (ElementFamily::of(array).aperture(n), n),
        None => (Aperture::of(array), array.element_count() as f64),
    }
}

fn require_farfield(scene: &Scene, aperture: &Aperture) -> Result<(), rrs_core::Error> {
    let boundary = aperture.farfield_boundary(scene.wavelength());
    let range = scene.ue().range();
    if range <= boundary {
        return Err(rrs_core::Error::NotFarField { range, boundary });
    }
    Ok(())
}

fn rate_cols(r: RateResult) -> Vec<f64> {
    vec![r.rate, r.snr, r.estimated_numerical_error]
}

pub fn evaluate(quantity: Quantity, r: &Resolved) -> Result<Vec<f64>, EvalError> {
    let scene = &r.pair.scene;
    let array = &r.pair.array;
    let quad = &r.sizing.rate.quadrature;
    let (rrs_ap, rrs_n) = rrs_aperture(r);
    let (pa_ap, pa_n) = pa_aperture(r);
    let values = match quantity {
        Quantity::RateRrsExact => {
            let e = exact_snr_rrs(&surface_scene(r)?)?;
            vec![e.rate, e.snr]
        }
        Quantity::RateRrsQuadrature => rate_cols(rrs_integral(scene, &rrs_ap).rate(quad, RateMethod::Quadrature)?),
        Quantity::RateRrsLower => rate_cols(rrs_lower_integral(scene, &rrs_ap).rate(quad, RateMethod::LowerBound)?),
        Quantity::RateRrsUpper => rate_cols(
            rrs_upper_integral(scene, &rrs_ap, r.sizing.rate.band_epsilon).rate(quad, RateMethod::UpperBound)?,
        ),
        Quantity::RateRrsFarfield => {
            require_farfield(scene, &rrs_ap)?;
            let snr = rrs_lower_farfield_snr(scene, &rrs_ap)?;
            rate_cols(RateResult::from_snr(snr, 0.0, RateMethod::ClosedFormFarField))
        }
        Quantity::Bounds => {
            let lower = rrs_lower_integral(scene, &rrs_ap).rate(quad, RateMethod::LowerBound)?;
            let full = rrs_integral(scene, &rrs_ap).rate(quad, RateMethod::Quadrature)?;
            let upper = rrs_upper_integral(scene, &rrs_ap, r.sizing.rate.band_epsilon)
                .rate(quad, RateMethod::UpperBound)
                .map_or(f64::NAN, |u| u.rate);
            vec![lower.rate, full.rate, upper]
        }
        Quantity::RatePaExact => {
            let e = exact_rate_pa(scene, &sum_array(r)?)?;
            vec![e.rate, e.snr]
        }
        Quantity::RatePaQuadrature => rate_cols(pa_integral(scene, array, &pa_ap).rate(quad, RateMethod::Quadrature)?),
        Quantity::RatePaFarfield => {
            require_farfield(scene, &pa_ap)?;
            let snr = pa_farfield_snr(scene, array, pa_n);
            rate_cols(RateResult::from_snr(snr, 0.0, RateMethod::ClosedFormFarField))
        }
        Quantity::PowerRrs => {
            let p = power_rrs(&r.model, rrs_n);
            vec![rrs_n, p.watts, flag(p.exceeds_budget), element_power_ratio(&r.model)?]
        }
        Quantity::PowerPa => {
            let p = power_pa(&r.model, pa_n);
            vec![pa_n, p.watts, flag(p.exceeds_budget)]
        }
        Quantity::GClosed => vec![g_closed(r.require_rate()?, &r.pair)?, element_power_ratio(&r.model)?],
        Quantity::GNumeric => vec![g_numeric(r.require_rate()?, &r.pair, &r.sizing)?, element_power_ratio(&r.model)?],
        Quantity::Verdict => {
            let v = verdict(r.require_rate()?, &r.pair, &r.model, &r.sizing)?;
            vec![
                verdict_code(v.verdict),
                v.rrs_sizing.count,
                v.pa_sizing.count,
                v.rrs_power.watts,
                v.pa_power.watts,
                v.rrs_power.watts / v.pa_power.watts,
                v.count_ratio,
                v.l_pw,
            ]
        }
    };
    Ok(values)
}

/// Evaluates the configured quantity at every point of the sweep axis.
/// Rows follow axis order; a failing point becomes a flagged row.
pub fn run_sweep(config: &RunConfig) -> Result<SweepTable, SweepError> {
    let (key, axis) = config.sweep().ok_or(SweepError::NoAxis)?;
    let quantity = config.quantity.ok_or(SweepError::NoQuantity)?;
    let base = config.resolve(Some((key, axis.unit.to_si(axis.start))))?;

    let mut header = vec![key_label(key, axis.unit)];
    header.extend(columns(quantity).iter().map(|c| c.to_string()));
    let mut prov = provenance(config, &base);
    prov.push(format!("quantity: {quantity}"));
    if quantity == Quantity::Verdict {
        prov.push("verdict codes: 1 rrs-wins, -1 array-wins, 0 infeasible".to_string());
    }
    let mut table = SweepTable::new(header, prov);

    let width = columns(quantity).len();
    let rows: Vec<SweepRow> = axis
        .points()
        .into_par_iter()
        .map(|x| {
            let result = config
                .resolve(Some((key, axis.unit.to_si(x))))
                .map_err(EvalError::from)
                .and_then(|r| evaluate(quantity, &r));
            match result {
                Ok(values) => SweepRow::ok(std::iter::once(x).chain(values).collect()),
                Err(e) => SweepRow {
                    values: std::iter::once(x).chain(std::iter::repeat_n(f64::NAN, width)).collect(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    for row in rows {
        table.push(row);
    }
    Ok(table)
}
