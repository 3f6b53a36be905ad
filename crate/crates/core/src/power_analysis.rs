//! Power draw of both technologies, element-count sizing for a target rate,
//! and the RRS-versus-array energy comparison.
//!
//! Both power models are affine in the element count:
//! an RRS pays `L P_diode + P_converter / Q` per element, an array pays one
//! phase shifter per element, and both pay a fixed controller cost. The RRS
//! draws less power exactly when `g(C) = N_RRS / N_array` is below the
//! per-element cost ratio `l_pw`.

use crate::error::{require, Error, Result, Technology};
use crate::geometry::{ArrayGeometry, Scene, ScenePair};
use crate::numerics::{find_root_bracketed, minimize_unimodal, SolverResult};
use crate::rate_analysis::{
    farfield_amplitude_scale, farfield_thresholds, pa_farfield_snr, pa_integral, rrs_farfield_asymptote,
    rrs_lower_integral, snr_from_rate, ElementFamily, RateMethod, RateOptions,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    /// W per diode.
    pub diode_power: f64,
    pub diodes_per_element: u32,
    /// W per voltage converter.
    pub converter_power: f64,
    /// Elements sharing one converter.
    pub group_size: u64,
    /// W, shared by both technologies.
    pub fpga_power: f64,
    /// W per phase shifter.
    pub shifter_power: f64,
    pub max_power: f64,
    /// bit/s/Hz
    pub min_rate: f64,
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("diode_power", self.diode_power),
            ("converter_power", self.converter_power),
            ("fpga_power", self.fpga_power),
            ("shifter_power", self.shifter_power),
            ("max_power", self.max_power),
        ] {
            require(value >= 0.0 && value.is_finite(), name, value, "must be finite and >= 0")?;
        }
        require(self.group_size >= 1, "group_size", self.group_size as f64, "must be >= 1")?;
        require(self.min_rate >= 0.0, "min_rate", self.min_rate, "must be >= 0")?;
        Ok(())
    }

    /// Marginal power of one RRS element.
    pub fn rrs_element_power(&self) -> f64 {
        self.diodes_per_element as f64 * self.diode_power + self.converter_power / self.group_size as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerDraw {
    pub watts: f64,
    pub exceeds_budget: bool,
}

impl PowerDraw {
    fn new(watts: f64, model: &PowerModel) -> Self {
        Self {
            watts,
            exceeds_budget: watts > model.max_power,
        }
    }
}

/// `N L P_diode + (N / Q) P_converter + P_fpga`.
pub fn power_rrs(model: &PowerModel, element_count: f64) -> PowerDraw {
    PowerDraw::new(element_count * model.rrs_element_power() + model.fpga_power, model)
}

/// `N P_shifter + P_fpga`.
pub fn power_pa(model: &PowerModel, element_count: f64) -> PowerDraw {
    PowerDraw::new(element_count * model.shifter_power + model.fpga_power, model)
}

/// Per-element cost ratio `l_pw`, array element over RRS element.
pub fn element_power_ratio(model: &PowerModel) -> Result<f64> {
    let denominator = model.rrs_element_power();
    if denominator <= 0.0 {
        return Err(Error::DegenerateModel);
    }
    Ok(model.shifter_power / denominator)
}

fn require_rate(rate: f64) -> Result<()> {
    require(rate > 0.0 && rate.is_finite(), "rate", rate, "must be finite and > 0")
}

/// RRS element count whose far-field disc lower bound reaches `rate`.
pub fn rrs_count_farfield(rate: f64, scene: &Scene) -> Result<f64> {
    require_rate(rate)?;
    let alpha = scene.feed().gain_exponent();
    if !(alpha > 1.0) {
        return Err(Error::AlphaDomain { alpha });
    }
    let base = 1.0 - snr_from_rate(rate).sqrt() / farfield_amplitude_scale(scene);
    if !(base > 0.0) {
        return Err(Error::RateUnreachable {
            technology: Technology::Rrs,
            rate,
            max_rate: rrs_farfield_asymptote(scene)?,
        });
    }
    let spread = base.powf(-4.0 / (alpha - 1.0)) - 1.0;
    let r_f = scene.feed().distance();
    Ok(4.0 * r_f * r_f * spread / ElementFamily::of(scene.surface()).disc_area_factor())
}

/// Array element count whose far-field rate is `rate`.
pub fn pa_count_farfield(rate: f64, scene: &Scene, array: &ArrayGeometry) -> Result<f64> {
    require_rate(rate)?;
    Ok(snr_from_rate(rate) / pa_farfield_snr(scene, array, 1.0))
}

/// Far-field element-count ratio `N_RRS / N_array` at `rate`.
pub fn g_closed(rate: f64, pair: &ScenePair) -> Result<f64> {
    let rrs = rrs_count_farfield(rate, &pair.scene)?;
    let pa = pa_count_farfield(rate, &pair.scene, &pair.array)?;
    Ok(rrs / pa)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizingOptions {
    pub rate: RateOptions,
    /// Tolerance on the natural log of the element count.
    pub solver_tol: f64,
    pub max_rrs_elements: f64,
    pub max_pa_elements: f64,
}

impl Default for SizingOptions {
    fn default() -> Self {
        Self {
            rate: RateOptions::default(),
            solver_tol: 1e-10,
            max_rrs_elements: 1e8,
            max_pa_elements: 1e8,
        }
    }
}

/// Required size on a fixed-aspect element family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sizing {
    /// Real-valued count at which the rate is met exactly (at least 1).
    pub count: f64,
    /// Smallest whole number of elements meeting the rate.
    pub elements: u64,
    pub method: RateMethod,
}

impl Sizing {
    fn new(count: f64, method: RateMethod) -> Self {
        let count = count.max(1.0);
        Self {
            count,
            elements: (count * (1.0 - 1e-12)).ceil() as u64,
            method,
        }
    }
}

/// Solve `rate_at(count) = target` for the count on `[1, max_count]`,
/// searching in log-count.
fn invert_count<F>(rate_at: F, target: f64, max_count: f64, tol: f64, technology: Technology) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if rate_at(1.0)? >= target {
        return Ok(1.0);
    }
    let max_rate = rate_at(max_count)?;
    if max_rate < target {
        return Err(Error::RateUnreachable {
            technology,
            rate: target,
            max_rate,
        });
    }
    let root = try_root(|t| Ok(rate_at(t.exp())? - target), 0.0, max_count.ln(), tol)?;
    Ok(root.abscissa.exp())
}

fn try_root<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<SolverResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut failure = None;
    let root = find_root_bracketed(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(root?)
}

/// RRS size from the disc lower-bound quadrature.
pub fn size_rrs_numeric(rate: f64, scene: &Scene, opts: &SizingOptions) -> Result<Sizing> {
    require_rate(rate)?;
    let family = ElementFamily::of(scene.surface());
    let count = invert_count(
        |n| Ok(rrs_lower_integral(scene, &family.aperture(n)).rate(&opts.rate.quadrature, RateMethod::LowerBound)?.rate),
        rate,
        opts.max_rrs_elements,
        opts.solver_tol,
        Technology::Rrs,
    )?;
    Ok(Sizing::new(count, RateMethod::LowerBound))
}

/// Array size from the continuous-aperture quadrature.
pub fn size_pa_numeric(rate: f64, scene: &Scene, array: &ArrayGeometry, opts: &SizingOptions) -> Result<Sizing> {
    require_rate(rate)?;
    let family = ElementFamily::of(array);
    let count = invert_count(
        |n| Ok(pa_integral(scene, array, &family.aperture(n)).rate(&opts.rate.quadrature, RateMethod::Quadrature)?.rate),
        rate,
        opts.max_pa_elements,
        opts.solver_tol,
        Technology::PhasedArray,
    )?;
    Ok(Sizing::new(count, RateMethod::Quadrature))
}

/// Closed form while the resulting surface keeps the UE in its far field,
/// quadrature otherwise.
pub fn size_rrs(rate: f64, scene: &Scene, opts: &SizingOptions) -> Result<Sizing> {
    let limit = ElementFamily::of(scene.surface()).farfield_limit(scene.ue().range(), scene.wavelength());
    match rrs_count_farfield(rate, scene) {
        Ok(count) if count <= limit => Ok(Sizing::new(count, RateMethod::ClosedFormFarField)),
        Ok(_) | Err(Error::RateUnreachable { .. }) | Err(Error::AlphaDomain { .. }) => size_rrs_numeric(rate, scene, opts),
        Err(e) => Err(e),
    }
}

pub fn size_pa(rate: f64, scene: &Scene, array: &ArrayGeometry, opts: &SizingOptions) -> Result<Sizing> {
    let limit = ElementFamily::of(array).farfield_limit(scene.ue().range(), scene.wavelength());
    let count = pa_count_farfield(rate, scene, array)?;
    if count <= limit {
        Ok(Sizing::new(count, RateMethod::ClosedFormFarField))
    } else {
        size_pa_numeric(rate, scene, array, opts)
    }
}

/// Element-count ratio from numeric inversion of both quadratures.
pub fn g_numeric(rate: f64, pair: &ScenePair, opts: &SizingOptions) -> Result<f64> {
    let rrs = size_rrs_numeric(rate, &pair.scene, opts)?;
    let pa = size_pa_numeric(rate, &pair.scene, &pair.array, opts)?;
    Ok(rrs.count / pa.count)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverReport {
    /// Lower rate where `g = l_pw`; absent when `g < l_pw` down to zero rate.
    pub c_e1: Option<f64>,
    /// Upper rate where `g = l_pw`; absent when `g < l_pw` up to the asymptote.
    pub c_e2: Option<f64>,
    /// Rates inside `[min_rate, rate_threshold]` where the RRS draws less
    /// power; `None` when that set is empty.
    pub rrs_wins_interval: Option<(f64, f64)>,
    pub l_pw: f64,
    pub group_size: u64,
    pub min_rate: f64,
    pub rate_threshold: f64,
    /// Minimizer of `g` and its value.
    pub g_min_rate: f64,
    pub g_min: f64,
}

/// Rate tolerance for the crossover solves.
pub const CROSSOVER_TOL: f64 = 1e-9;

/// Where `g(C)` crosses `l_pw` and which far-field rates favour the RRS.
///
/// `g` is minimized over the whole range where the closed form exists, then
/// each crossing is bracketed between the minimizer and the nearer end of
/// that range.
pub fn crossover_rates(pair: &ScenePair, model: &PowerModel) -> Result<CrossoverReport> {
    model.validate()?;
    let l_pw = element_power_ratio(model)?;
    let thresholds = farfield_thresholds(pair)?;
    let asymptote = rrs_farfield_asymptote(&pair.scene)?;
    let lo = 1e-9_f64.min(asymptote * 1e-9);
    let hi = asymptote * (1.0 - 1e-12);
    let log_g = |c: f64| g_closed(c, pair).map(f64::ln);

    let mut failure = None;
    let min = minimize_unimodal(
        |c| match log_g(c) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        CROSSOVER_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let g_min_rate = min?.abscissa;
    let g_min = g_closed(g_min_rate, pair)?;
    let target = l_pw.ln();

    let (c_e1, c_e2) = if g_min >= l_pw {
        (None, None)
    } else {
        let crossing = |a: f64, b: f64| -> Result<Option<f64>> {
            if log_g(a)? < target && log_g(b)? < target {
                return Ok(None);
            }
            let root = try_root(|c| Ok(log_g(c)? - target), a, b, CROSSOVER_TOL * 1e-3)?;
            Ok(Some(root.abscissa))
        };
        (crossing(lo, g_min_rate)?, crossing(g_min_rate, hi)?)
    };

    let rrs_wins_interval = if g_min >= l_pw {
        None
    } else {
        let start = c_e1.map_or(model.min_rate, |c| c.max(model.min_rate));
        let end = c_e2.map_or(thresholds.rate_threshold, |c| c.min(thresholds.rate_threshold));
        (start <= end).then_some((start, end))
    };

    Ok(CrossoverReport {
        c_e1,
        c_e2,
        rrs_wins_interval,
        l_pw,
        group_size: model.group_size,
        min_rate: model.min_rate,
        rate_threshold: thresholds.rate_threshold,
        g_min_rate,
        g_min,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    RrsWins,
    ArrayWins,
    /// At least one technology needs more than the power budget.
    Infeasible,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::RrsWins => "rrs-wins",
            Verdict::ArrayWins => "array-wins",
            Verdict::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub rate: f64,
    pub rrs_sizing: Sizing,
    pub pa_sizing: Sizing,
    pub rrs_power: PowerDraw,
    pub pa_power: PowerDraw,
    /// `rrs_sizing.count / pa_sizing.count`.
    pub count_ratio: f64,
    pub l_pw: f64,
    /// Whether the RRS draws less power, regardless of the budget.
    pub rrs_cheaper: bool,
}

/// Sizes both technologies for `rate` and compares their power draw at the
/// exact required counts.
pub fn verdict(rate: f64, pair: &ScenePair, model: &PowerModel, opts: &SizingOptions) -> Result<VerdictReport> {
    model.validate()?;
    if rate < model.min_rate {
        return Err(Error::BelowMinimumRate {
            rate,
            min_rate: model.min_rate,
        });
    }
    let l_pw = element_power_ratio(model)?;
    let rrs_sizing = size_rrs(rate, &pair.scene, opts)?;
    let pa_sizing = size_pa(rate, &pair.scene, &pair.array, opts)?;
    let rrs_power = power_rrs(model, rrs_sizing.count);
    let pa_power = power_pa(model, pa_sizing.count);
    let rrs_cheaper = rrs_power.watts < pa_power.watts;
    let verdict = if rrs_power.exceeds_budget || pa_power.exceeds_budget {
        Verdict::Infeasible
    } else if rrs_cheaper {
        Verdict::RrsWins
    } else {
        Verdict::ArrayWins
    };
    Ok(VerdictReport {
        verdict,
        rate,
        rrs_sizing,
        pa_sizing,
        rrs_power,
        pa_power,
        count_ratio: rrs_sizing.count / pa_sizing.count,
        l_pw,
        rrs_cheaper,
    })
}
