//! Continuous-aperture rate formulas.
//!
//! Coordinates on the surface are normalized by the UE range, so an
//! element at `(y', z')` maps to `(y'/r_U, z'/r_U)` and each element covers
//! `dy dz / r_U^2` of the normalized plane. The aligned-phase element sum
//! then becomes `prefactor * (integral of the amplitude profile)^2`.
//!
//! The RRS amplitude profile is
//! `(1 + (r_U/r_F)^2 rho^2)^(-(alpha+3)/4) * (1 - 2 Phi y - 2 Omega z + rho^2)^(-3/4)`
//! with prefactor `P A^2 G_U 2(alpha+1) Psi r_U^2 / (sigma^2 (4 pi)^2 r_F^2)`;
//! the array profile is `(1 - 2 Phi y - 2 Omega z + rho^2)^(-1/2) / sqrt(MN)`
//! with prefactor `P lambda^2 G_E G_U r_U^2 / ((4 pi)^2 sigma^2 dy^2 dz^2)`.

use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, ElementGrid, Scene, ScenePair};
use crate::numerics::{integrate_1d_pieces, integrate_2d, QuadratureOptions, QuadratureResult, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateMethod {
    ExactSum,
    Quadrature,
    LowerBound,
    UpperBound,
    ClosedFormFarField,
}

impl RateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RateMethod::ExactSum => "exact-sum",
            RateMethod::Quadrature => "quadrature",
            RateMethod::LowerBound => "lower-bound",
            RateMethod::UpperBound => "upper-bound",
            RateMethod::ClosedFormFarField => "closed-form-ff",
        }
    }
}

impl std::fmt::Display for RateMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    /// bit/s/Hz
    pub rate: f64,
    pub snr: f64,
    pub method: RateMethod,
    /// Propagated quadrature error, bit/s/Hz.
    pub estimated_numerical_error: f64,
}

impl RateResult {
    pub fn from_snr(snr: f64, snr_error: f64, method: RateMethod) -> Self {
        Self {
            rate: snr.ln_1p() / LN_2,
            snr,
            method,
            estimated_numerical_error: snr_error.abs() / ((1.0 + snr) * LN_2),
        }
    }
}

pub fn rate_from_snr(snr: f64) -> f64 {
    snr.ln_1p() / LN_2
}

pub fn snr_from_rate(rate: f64) -> f64 {
    (rate * LN_2).exp_m1()
}

/// Default exclusion half-width around the singular rings of the upper
/// envelope, in each ring's own normalized radius.
pub const DEFAULT_BAND_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    pub quadrature: QuadratureOptions,
    /// `None` forbids exclusion bands: an upper-bound region that crosses a
    /// singular ring is then an error.
    pub band_epsilon: Option<f64>,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureOptions::default(),
            band_epsilon: Some(DEFAULT_BAND_EPSILON),
        }
    }
}

impl RateOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            quadrature: QuadratureOptions::with_rel_tol(rel_tol),
            ..Self::default()
        }
    }
}

/// Physical extent of a (possibly non-integer) element grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aperture {
    pub width_y: f64,
    pub width_z: f64,
}

impl Aperture {
    pub fn of<G: ElementGrid + ?Sized>(grid: &G) -> Self {
        Self {
            width_y: grid.width_y(),
            width_z: grid.width_z(),
        }
    }

    /// Half extents in range-normalized coordinates.
    pub fn normalized_half_extents(&self, range: f64) -> (f64, f64) {
        (self.width_y / (2.0 * range), self.width_z / (2.0 * range))
    }

    /// Radius of the largest centred disc inside the aperture, normalized.
    pub fn inscribed_radius(&self, range: f64) -> f64 {
        self.width_y.min(self.width_z) / (2.0 * range)
    }

    /// Fraunhofer distance `2 (w_y^2 + w_z^2) / lambda`.
    pub fn farfield_boundary(&self, wavelength: f64) -> f64 {
        2.0 * (self.width_y * self.width_y + self.width_z * self.width_z) / wavelength
    }
}

/// Grids with a fixed element size and aspect ratio `M/N`, parameterized
/// by a real-valued element count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementFamily {
    pub aspect: f64,
    pub element_dy: f64,
    pub element_dz: f64,
}

impl ElementFamily {
    pub fn of<G: ElementGrid + ?Sized>(grid: &G) -> Self {
        Self {
            aspect: grid.aspect_ratio(),
            element_dy: grid.element_dy(),
            element_dz: grid.element_dz(),
        }
    }

    pub fn aperture(&self, count: f64) -> Aperture {
        Aperture {
            width_y: (count * self.aspect).sqrt() * self.element_dy,
            width_z: (count / self.aspect).sqrt() * self.element_dz,
        }
    }

    /// Largest element count whose aperture keeps `range` in the far field:
    /// `k r lambda / (2 (k^2 dy^2 + dz^2))`.
    pub fn farfield_limit(&self, range: f64, wavelength: f64) -> f64 {
        let k = self.aspect;
        k * range * wavelength
            / (2.0 * (k * k * self.element_dy * self.element_dy + self.element_dz * self.element_dz))
    }

    /// `(min side)^2 / count`, i.e. `min(k dy^2, dz^2 / k)`.
    pub fn disc_area_factor(&self) -> f64 {
        let k = self.aspect;
        (k * self.element_dy * self.element_dy).min(self.element_dz * self.element_dz / k)
    }
}

/// Normalized amplitude profiles integrated over the aperture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrand {
    /// Feed illumination times the UE-side spreading and projected aperture.
    Rrs {
        radius_ratio: f64,
        gain_exponent: f64,
        phi: f64,
        omega: f64,
    },
    /// Radial envelope bounding [`Integrand::Rrs`] for every feed exponent:
    /// `|rho r_U/r_F - 1|^(-3/2) |rho - 1|^(-3/2)`, optionally with bands of
    /// relative half-width `band` removed around both singular rings.
    RrsEnvelope { radius_ratio: f64, band: Option<f64> },
    Array {
        phi: f64,
        omega: f64,
        element_count: f64,
    },
}

impl Integrand {
    pub fn value(&self, y: f64, z: f64) -> f64 {
        let rho2 = y * y + z * z;
        match *self {
            Integrand::Rrs {
                radius_ratio,
                gain_exponent,
                phi,
                omega,
            } => {
                let feed = (1.0 + radius_ratio * radius_ratio * rho2).powf(-(gain_exponent + 3.0) / 4.0);
                let ue = (1.0 - 2.0 * phi * y - 2.0 * omega * z + rho2).powf(-0.75);
                feed * ue
            }
            Integrand::RrsEnvelope { radius_ratio, band } => {
                let rho = rho2.sqrt();
                if let Some(eps) = band {
                    if in_band(rho * radius_ratio, eps) || in_band(rho, eps) {
                        return 0.0;
                    }
                }
                envelope(rho, radius_ratio)
            }
            Integrand::Array {
                phi,
                omega,
                element_count,
            } => 1.0 / (element_count.sqrt() * (1.0 - 2.0 * phi * y - 2.0 * omega * z + rho2).sqrt()),
        }
    }
}

fn envelope(rho: f64, radius_ratio: f64) -> f64 {
    ((rho * radius_ratio - 1.0).abs() * (rho - 1.0).abs()).powf(-1.5)
}

fn in_band(normalized_radius: f64, eps: f64) -> bool {
    (normalized_radius - 1.0).abs() < eps
}

/// An aligned-sum rate expressed as `prefactor * (integral over region)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralSpec {
    pub region: Region,
    pub prefactor: f64,
    pub integrand: Integrand,
}

impl IntegralSpec {
    pub fn integrate(&self, opts: &QuadratureOptions) -> Result<QuadratureResult> {
        match self.integrand {
            Integrand::RrsEnvelope { radius_ratio, band } => integrate_envelope(self.region, radius_ratio, band, opts),
            integrand => Ok(integrate_2d(|y, z| integrand.value(y, z), self.region, opts)?),
        }
    }

    /// SNR and its propagated error bar.
    pub fn snr(&self, opts: &QuadratureOptions) -> Result<(f64, f64)> {
        let q = self.integrate(opts)?;
        let snr = self.prefactor * q.value * q.value;
        let err = 2.0 * self.prefactor * q.value.abs() * q.error_estimate;
        Ok((snr, err))
    }

    pub fn rate(&self, opts: &QuadratureOptions, method: RateMethod) -> Result<RateResult> {
        let (snr, err) = self.snr(opts)?;
        Ok(RateResult::from_snr(snr, err, method))
    }
}

/// Radial integral `int_0^r envelope(rho) rho d rho` with bands removed.
fn envelope_radial(r: f64, radius_ratio: f64, band: Option<f64>, opts: &QuadratureOptions) -> Result<f64> {
    if r <= 0.0 {
        return Ok(0.0);
    }
    let rings = [1.0 / radius_ratio, 1.0];
    let mut edges = vec![0.0, r];
    let mut excluded = Vec::new();
    if let Some(eps) = band {
        for ring in rings {
            let (lo, hi) = (ring * (1.0 - eps), ring * (1.0 + eps));
            excluded.push((lo, hi));
            edges.extend([lo, hi].into_iter().filter(|&e| e > 0.0 && e < r));
        }
    } else {
        edges.extend(rings.into_iter().filter(|&e| e < r));
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut total = 0.0;
    for w in edges.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if excluded.iter().any(|&(lo, hi)| mid > lo && mid < hi) {
            continue;
        }
        let piece = integrate_1d_pieces(|rho| rho * envelope(rho, radius_ratio), w, opts)?;
        total += piece.value;
    }
    Ok(total)
}

fn integrate_envelope(region: Region, radius_ratio: f64, band: Option<f64>, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    let inner = QuadratureOptions {
        rel_tol: opts.rel_tol * 0.1,
        ..*opts
    };
    match region {
        Region::Disc { radius } => {
            check_rings(radius, radius_ratio, band)?;
            let value = 2.0 * PI * envelope_radial(radius, radius_ratio, band, &inner)?;
            Ok(QuadratureResult {
                value,
                error_estimate: value.abs() * inner.rel_tol,
                panels_used: 1,
            })
        }
        Region::Rectangle {
            y_min,
            y_max,
            z_min,
            z_max,
        } => {
            let (a, b) = (y_max, z_max);
            if !(y_min == -a && z_min == -b && a > 0.0 && b > 0.0) {
                return Err(crate::numerics::NumericsError::InvalidInput("envelope needs a centred rectangle").into());
            }
            let corner = a.hypot(b);
            check_rings(corner, radius_ratio, band)?;
            let split = b.atan2(a);
            let rho_max = |t: f64| if t <= split { a / t.cos() } else { b / t.sin() };
            // Angles where the boundary crosses a ring or band edge are kinks
            // of the outer integrand.
            let mut edges = vec![0.0, split, FRAC_PI_2];
            let mut radii = vec![1.0 / radius_ratio, 1.0];
            if let Some(eps) = band {
                radii = radii.into_iter().flat_map(|r| [r * (1.0 - eps), r * (1.0 + eps)]).collect();
            }
            for e in radii {
                if e > a && e < corner {
                    edges.push((a / e).acos());
                }
                if e > b && e < corner {
                    edges.push((b / e).asin());
                }
            }
            edges.sort_by(f64::total_cmp);
            edges.dedup();
            let failure = RefCell::new(None);
            let outer = integrate_1d_pieces(
                |t| match envelope_radial(rho_max(t), radius_ratio, band, &inner) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                },
                &edges,
                opts,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            let outer = outer?;
            Ok(QuadratureResult {
                value: 4.0 * outer.value,
                error_estimate: 4.0 * outer.error_estimate + 4.0 * outer.value.abs() * inner.rel_tol,
                panels_used: outer.panels_used,
            })
        }
    }
}

fn check_rings(max_radius: f64, radius_ratio: f64, band: Option<f64>) -> Result<()> {
    if band.is_none() {
        for ring in [1.0 / radius_ratio, 1.0] {
            if ring <= max_radius {
                return Err(Error::SingularRegion { radius: ring });
            }
        }
    }
    Ok(())
}

/// RRS prefactor `P A^2 G_U G_0 Psi r_U^2 / (sigma^2 (4 pi)^2 r_F^2)` with
/// `G_0 = 2(alpha + 1)`, the feed boresight gain.
pub fn rrs_prefactor(scene: &Scene) -> f64 {
    let ue = scene.ue();
    let feed = scene.feed();
    let a = scene.surface().refraction_amplitude();
    scene.tx_power() * a * a * ue.ue_gain() * feed.boresight_gain() * ue.psi() * ue.range().powi(2)
        / (scene.noise_power() * (4.0 * PI).powi(2) * feed.distance().powi(2))
}

/// Array prefactor `P lambda^2 G_E G_U r_U^2 / ((4 pi)^2 sigma^2 dy^2 dz^2)`.
pub fn pa_prefactor(scene: &Scene, array: &ArrayGeometry) -> f64 {
    let ue = scene.ue();
    scene.tx_power() * scene.wavelength().powi(2) * array.element_gain() * ue.ue_gain() * ue.range().powi(2)
        / ((4.0 * PI).powi(2) * scene.noise_power() * (array.element_dy() * array.element_dz()).powi(2))
}

fn rrs_integrand(scene: &Scene) -> Integrand {
    Integrand::Rrs {
        radius_ratio: scene.ue().range() / scene.feed().distance(),
        gain_exponent: scene.feed().gain_exponent(),
        phi: scene.ue().phi(),
        omega: scene.ue().omega(),
    }
}

/// Full rectangular aperture.
pub fn rrs_integral(scene: &Scene, aperture: &Aperture) -> IntegralSpec {
    let (a, b) = aperture.normalized_half_extents(scene.ue().range());
    IntegralSpec {
        region: Region::centered_rectangle(a, b),
        prefactor: rrs_prefactor(scene),
        integrand: rrs_integrand(scene),
    }
}

/// Largest centred disc inside the aperture.
pub fn rrs_lower_integral(scene: &Scene, aperture: &Aperture) -> IntegralSpec {
    IntegralSpec {
        region: Region::disc(aperture.inscribed_radius(scene.ue().range())),
        prefactor: rrs_prefactor(scene),
        integrand: rrs_integrand(scene),
    }
}

pub fn rrs_upper_integral(scene: &Scene, aperture: &Aperture, band: Option<f64>) -> IntegralSpec {
    let (a, b) = aperture.normalized_half_extents(scene.ue().range());
    IntegralSpec {
        region: Region::centered_rectangle(a, b),
        prefactor: rrs_prefactor(scene),
        integrand: Integrand::RrsEnvelope {
            radius_ratio: scene.ue().range() / scene.feed().distance(),
            band,
        },
    }
}

/// Array aperture; the element count follows from the aperture and spacing.
pub fn pa_integral(scene: &Scene, array: &ArrayGeometry, aperture: &Aperture) -> IntegralSpec {
    let (a, b) = aperture.normalized_half_extents(scene.ue().range());
    let element_count = (aperture.width_y / array.element_dy()) * (aperture.width_z / array.element_dz());
    IntegralSpec {
        region: Region::centered_rectangle(a, b),
        prefactor: pa_prefactor(scene, array),
        integrand: Integrand::Array {
            phi: scene.ue().phi(),
            omega: scene.ue().omega(),
            element_count,
        },
    }
}

/// Maximized RRS rate from the continuous-aperture integral.
pub fn rate_rrs_quadrature(scene: &Scene, opts: &RateOptions) -> Result<RateResult> {
    rrs_integral(scene, &Aperture::of(scene.surface())).rate(&opts.quadrature, RateMethod::Quadrature)
}

/// Lower bound from the inscribed disc.
pub fn rate_rrs_lower(scene: &Scene, opts: &RateOptions) -> Result<RateResult> {
    rrs_lower_integral(scene, &Aperture::of(scene.surface())).rate(&opts.quadrature, RateMethod::LowerBound)
}

/// Upper bound from the exponent-free radial envelope.
///
/// With exclusion bands enabled the two non-integrable rings are cut out,
/// so the result bounds the rate for every practical surface but is not a
/// certified bound inside the removed bands.
pub fn rate_rrs_upper(scene: &Scene, opts: &RateOptions) -> Result<RateResult> {
    rrs_upper_integral(scene, &Aperture::of(scene.surface()), opts.band_epsilon)
        .rate(&opts.quadrature, RateMethod::UpperBound)
}

pub fn rate_pa_quadrature(scene: &Scene, array: &ArrayGeometry, opts: &RateOptions) -> Result<RateResult> {
    pa_integral(scene, array, &Aperture::of(array)).rate(&opts.quadrature, RateMethod::Quadrature)
}

fn check_farfield(scene: &Scene, aperture: &Aperture) -> Result<()> {
    let boundary = aperture.farfield_boundary(scene.wavelength());
    let range = scene.ue().range();
    if range <= boundary {
        Err(Error::NotFarField { range, boundary })
    } else {
        Ok(())
    }
}

/// Disc lower bound with the UE-side factor frozen at its centre value:
/// `L_R (4 pi r_F^2 / ((alpha-1) r_U^2) (1 - (1 + r_U^2 R^2 / r_F^2)^((1-alpha)/4)))^2`.
///
/// No far-field check; callers that need one use [`rate_rrs_lower_farfield`].
pub fn rrs_lower_farfield_snr(scene: &Scene, aperture: &Aperture) -> Result<f64> {
    let alpha = scene.feed().gain_exponent();
    if !(alpha > 1.0) {
        return Err(Error::AlphaDomain { alpha });
    }
    let r_f = scene.feed().distance();
    let r_u = scene.ue().range();
    let radius = aperture.inscribed_radius(r_u);
    let spread = 1.0 + (r_u * radius / r_f).powi(2);
    let integral = 4.0 * PI * r_f * r_f / ((alpha - 1.0) * r_u * r_u) * (1.0 - spread.powf((1.0 - alpha) / 4.0));
    Ok(rrs_prefactor(scene) * integral * integral)
}

/// Largest rate the disc lower bound approaches as the surface grows
/// without limit (far-field form).
pub fn rrs_farfield_asymptote(scene: &Scene) -> Result<f64> {
    let alpha = scene.feed().gain_exponent();
    if !(alpha > 1.0) {
        return Err(Error::AlphaDomain { alpha });
    }
    let k = farfield_amplitude_scale(scene);
    Ok(rate_from_snr(k * k))
}

/// `4 pi sqrt(L_R) r_F^2 / ((alpha - 1) r_U^2)`: the far-field SNR tends
/// to the square of this.
pub(crate) fn farfield_amplitude_scale(scene: &Scene) -> f64 {
    let alpha = scene.feed().gain_exponent();
    let r_f = scene.feed().distance();
    let r_u = scene.ue().range();
    4.0 * PI * rrs_prefactor(scene).sqrt() * r_f * r_f / ((alpha - 1.0) * r_u * r_u)
}

pub fn rate_rrs_lower_farfield(scene: &Scene) -> Result<RateResult> {
    let aperture = Aperture::of(scene.surface());
    let alpha = scene.feed().gain_exponent();
    if !(alpha > 1.0) {
        return Err(Error::AlphaDomain { alpha });
    }
    check_farfield(scene, &aperture)?;
    Ok(RateResult::from_snr(
        rrs_lower_farfield_snr(scene, &aperture)?,
        0.0,
        RateMethod::ClosedFormFarField,
    ))
}

/// Far-field array SNR `MN dy^2 dz^2 L_P / r_U^4`, linear in the count.
pub fn pa_farfield_snr(scene: &Scene, array: &ArrayGeometry, element_count: f64) -> f64 {
    element_count * (array.element_dy() * array.element_dz()).powi(2) * pa_prefactor(scene, array)
        / scene.ue().range().powi(4)
}

pub fn rate_pa_farfield(scene: &Scene, array: &ArrayGeometry) -> Result<RateResult> {
    check_farfield(scene, &Aperture::of(array))?;
    Ok(RateResult::from_snr(
        pa_farfield_snr(scene, array, array.element_count() as f64),
        0.0,
        RateMethod::ClosedFormFarField,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldThresholds {
    pub rrs_element_limit: f64,
    pub pa_element_limit: f64,
    /// `min` of the two rates below, bit/s/Hz.
    pub rate_threshold: f64,
    pub rrs_rate_at_limit: f64,
    pub pa_rate_at_limit: f64,
}

/// Element-count limits that keep the UE in each aperture's far field, and
/// the largest common rate both technologies reach within them.
pub fn farfield_thresholds(pair: &ScenePair) -> Result<FarFieldThresholds> {
    let scene = &pair.scene;
    let r_u = scene.ue().range();
    let lambda = scene.wavelength();
    let rrs_family = ElementFamily::of(scene.surface());
    let pa_family = ElementFamily::of(&pair.array);
    let rrs_element_limit = rrs_family.farfield_limit(r_u, lambda);
    let pa_element_limit = pa_family.farfield_limit(r_u, lambda);
    let rrs_rate_at_limit = rate_from_snr(rrs_lower_farfield_snr(scene, &rrs_family.aperture(rrs_element_limit))?);
    let pa_rate_at_limit = rate_from_snr(pa_farfield_snr(scene, &pair.array, pa_element_limit));
    Ok(FarFieldThresholds {
        rrs_element_limit,
        pa_element_limit,
        rate_threshold: rrs_rate_at_limit.min(pa_rate_at_limit),
        rrs_rate_at_limit,
        pa_rate_at_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{reference_array, reference_pair, reference_scene};

    fn opts() -> RateOptions {
        RateOptions::default()
    }

    #[test]
    fn tiny_surface_matches_midpoint_limit() {
        let scene = reference_scene(0.15, 5.0, 1, 1).unwrap();
        let aperture = Aperture::of(scene.surface());
        let (a, b) = aperture.normalized_half_extents(50.0);
        let area = 4.0 * a * b;
        let f0 = rrs_integrand(&scene).value(0.0, 0.0);
        let want = rate_from_snr(rrs_prefactor(&scene) * (area * f0).powi(2));
        let got = rate_rrs_quadrature(&scene, &opts()).unwrap();
        // Feed curvature across one element shifts the SNR by about 1e-4.
        assert!((got.rate - want).abs() < 1e-4, "{} vs {}", got.rate, want);
        assert_eq!(got.method, RateMethod::Quadrature);
    }

    #[test]
    fn lower_bound_below_quadrature_for_square() {
        let scene = reference_scene(0.15, 5.0, 200, 200).unwrap();
        let full = rate_rrs_quadrature(&scene, &opts()).unwrap();
        let lower = rate_rrs_lower(&scene, &opts()).unwrap();
        assert!(lower.rate < full.rate);
    }

    #[test]
    fn thin_surface_lower_bound_is_loose() {
        let scene = reference_scene(0.15, 5.0, 400, 1).unwrap();
        let full = rate_rrs_quadrature(&scene, &opts()).unwrap();
        let lower = rate_rrs_lower(&scene, &opts()).unwrap();
        assert!(full.rate - lower.rate > 5.0, "{} vs {}", full.rate, lower.rate);
    }

    #[test]
    fn upper_bound_inside_rings() {
        // Half-width 5 elements * lambda/6 / 50 m is well inside r_F / r_U.
        let scene = reference_scene(0.15, 5.0, 10, 10).unwrap();
        let strict = RateOptions {
            band_epsilon: None,
            ..opts()
        };
        let ub = rate_rrs_upper(&scene, &strict).unwrap();
        let full = rate_rrs_quadrature(&scene, &strict).unwrap();
        assert!(ub.rate >= full.rate);
        assert!(ub.rate.is_finite());
    }

    #[test]
    fn upper_bound_crossing_ring_needs_bands() {
        let scene = reference_scene(0.15, 5.0, 300, 300).unwrap();
        let strict = RateOptions {
            band_epsilon: None,
            ..opts()
        };
        assert!(matches!(rate_rrs_upper(&scene, &strict), Err(Error::SingularRegion { .. })));
        let banded = rate_rrs_upper(&scene, &opts()).unwrap();
        let full = rate_rrs_quadrature(&scene, &opts()).unwrap();
        assert!(banded.rate >= full.rate);
    }

    #[test]
    fn envelope_disc_matches_rectangle_path_for_radial_symmetry() {
        // A disc and the rectangle engine should agree on a disc-sized check:
        // the radial integral over a tiny region is ~ area * envelope(0) = area.
        let spec = IntegralSpec {
            region: Region::centered_rectangle(1e-5, 1e-5),
            prefactor: 1.0,
            integrand: Integrand::RrsEnvelope {
                radius_ratio: 100.0,
                band: None,
            },
        };
        let q = spec.integrate(&QuadratureOptions::default()).unwrap();
        assert!((q.value - 4e-10).abs() < 1e-12, "{}", q.value);
    }

    #[test]
    fn single_element_array_quadrature() {
        let scene = reference_scene(0.15, 5.0, 1, 1).unwrap();
        let array = reference_array(1, 1).unwrap();
        let quad = rate_pa_quadrature(&scene, &array, &opts()).unwrap();
        let lambda = scene.wavelength();
        let friis = scene.tx_power() * lambda * lambda / ((4.0 * PI * 50.0f64).powi(2) * scene.noise_power());
        assert!((quad.rate - rate_from_snr(friis)).abs() < 1e-6);
    }

    #[test]
    fn closed_form_domain_errors() {
        let scene = reference_scene(0.15, 1.0, 10, 10).unwrap();
        assert!(matches!(rate_rrs_lower_farfield(&scene), Err(Error::AlphaDomain { .. })));
        let big = reference_scene(0.15, 5.0, 1000, 1000).unwrap();
        assert!(matches!(rate_rrs_lower_farfield(&big), Err(Error::NotFarField { .. })));
        let array = reference_array(200, 200).unwrap();
        assert!(matches!(rate_pa_farfield(&big, &array), Err(Error::NotFarField { .. })));
    }

    #[test]
    fn closed_form_vanishes_with_aperture() {
        let scene = reference_scene(0.15, 5.0, 1, 1).unwrap();
        let tiny = Aperture {
            width_y: 1e-9,
            width_z: 1e-9,
        };
        assert!(rrs_lower_farfield_snr(&scene, &tiny).unwrap() < 1e-10);
    }

    #[test]
    fn huge_exponent_collapses_closed_form() {
        let scene = reference_scene(0.15, 5.0, 50, 50).unwrap();
        let a5 = rate_rrs_lower_farfield(&scene).unwrap().rate;
        let steep = scene.with_feed(crate::geometry::FeedModel::new(5e4, 0.15).unwrap());
        let a_big = rate_rrs_lower_farfield(&steep).unwrap().rate;
        assert!(a_big < a5);
        let aperture = Aperture::of(steep.surface());
        let snr = rrs_lower_farfield_snr(&steep, &aperture).unwrap();
        let k = farfield_amplitude_scale(&steep);
        // The bracket tends to 1, so the SNR tends to k^2 which itself -> 0.
        assert!((snr / (k * k) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn farfield_array_rate_is_linear_in_count() {
        let scene = reference_scene(0.15, 5.0, 1, 1).unwrap();
        let array = reference_array(8, 8).unwrap();
        let one = pa_farfield_snr(&scene, &array, 64.0);
        let two = pa_farfield_snr(&scene, &array, 128.0);
        assert!((two / one - 2.0).abs() < 1e-15);
    }

    #[test]
    fn thresholds_scale_with_range() {
        let pair = reference_pair(0.15, 5.0).unwrap();
        let t = farfield_thresholds(&pair).unwrap();
        let near = ScenePair::new(
            pair.scene.with_ue(pair.scene.ue().with_range(25.0).unwrap()),
            pair.array,
        );
        let t2 = farfield_thresholds(&near).unwrap();
        assert!((t2.rrs_element_limit / t.rrs_element_limit - 0.5).abs() < 1e-14);
        assert!((t2.pa_element_limit / t.pa_element_limit - 0.5).abs() < 1e-14);
    }

    #[test]
    fn family_reproduces_integer_grids() {
        let scene = reference_scene(0.15, 5.0, 40, 10).unwrap();
        let fam = ElementFamily::of(scene.surface());
        let ap = fam.aperture(400.0);
        assert!((ap.width_y - scene.surface().width_y()).abs() < 1e-15);
        assert!((ap.width_z - scene.surface().width_z()).abs() < 1e-15);
        // min side^2 / count
        let dz = scene.surface().element_dz();
        assert!((fam.disc_area_factor() - dz * dz / 4.0).abs() < 1e-18);
    }
}
