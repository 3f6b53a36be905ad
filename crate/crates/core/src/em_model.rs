//! Element-wise signal model and exact SNR by direct summation.
//!
//! Every element contributes `h * Gamma * sqrt(P) * y`: the feed-to-element
//! amplitude `y` (feed pattern, projected aperture, spherical spreading),
//! the refraction coefficient `Gamma = A exp(j phi)` and the element-to-UE
//! channel `h`. Sums run in row-major order with compensated accumulation.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, ElementGrid, FeedModel, Scene, SurfaceGeometry, UePlacement};
use crate::numerics::CompensatedSum;

/// Complex baseband amplitude; `|a|^2` is a power in watts (or a power gain
/// when scaled per unit transmit amplitude).
pub type ComplexAmplitude = Complex64;

/// Feed pattern `2(alpha+1) cos^alpha(theta)` on `[0, pi/2]`, zero behind.
pub fn feed_gain(gain_exponent: f64, polar_angle: f64) -> f64 {
    if (0.0..=PI / 2.0).contains(&polar_angle) {
        feed_gain_from_cosine(gain_exponent, polar_angle.cos().max(0.0))
    } else {
        0.0
    }
}

fn feed_gain_from_cosine(gain_exponent: f64, cosine: f64) -> f64 {
    2.0 * (gain_exponent + 1.0) * cosine.powf(gain_exponent)
}

fn propagation_phase(distance: f64, wavelength: f64) -> Complex64 {
    Complex64::from_polar(1.0, -TAU * distance / wavelength)
}

fn check_index<G: ElementGrid>(grid: &G, m: usize, n: usize) -> Result<()> {
    if m < grid.m_count() && n < grid.n_count() {
        Ok(())
    } else {
        Err(Error::ElementIndex {
            m,
            n,
            m_count: grid.m_count(),
            n_count: grid.n_count(),
        })
    }
}

fn incident_unchecked(feed: &FeedModel, surface: &SurfaceGeometry, wavelength: f64, m: usize, n: usize) -> Complex64 {
    let q = surface.element_position(m, n);
    let distance = (q - feed.position()).norm();
    let cosine = feed.distance() / distance;
    let gain = feed_gain_from_cosine(feed.gain_exponent(), cosine);
    let aperture = cosine * surface.element_dy() * surface.element_dz();
    let magnitude = (gain * aperture / (4.0 * PI * distance * distance)).sqrt();
    magnitude * propagation_phase(distance, wavelength)
}

/// Signal received by element `(m, n)` from the feed, per unit transmit
/// amplitude.
pub fn incident_signal(
    feed: &FeedModel,
    surface: &SurfaceGeometry,
    wavelength: f64,
    m: usize,
    n: usize,
) -> Result<ComplexAmplitude> {
    check_index(surface, m, n)?;
    Ok(incident_unchecked(feed, surface, wavelength, m, n))
}

fn ue_channel_rrs_unchecked(ue: &UePlacement, surface: &SurfaceGeometry, wavelength: f64, m: usize, n: usize) -> Result<Complex64> {
    let offset = ue.position() - surface.element_position(m, n);
    let distance = offset.norm();
    if !(distance > 0.0) {
        return Err(Error::DegeneratePlacement);
    }
    let aperture = offset.x / distance * surface.element_dy() * surface.element_dz();
    let magnitude = (ue.ue_gain() * aperture / (4.0 * PI * distance * distance)).sqrt();
    Ok(magnitude * propagation_phase(distance, wavelength))
}

/// Channel from surface element `(m, n)` to the UE, including the element's
/// projected aperture towards the UE.
pub fn ue_channel_rrs(
    ue: &UePlacement,
    surface: &SurfaceGeometry,
    wavelength: f64,
    m: usize,
    n: usize,
) -> Result<ComplexAmplitude> {
    check_index(surface, m, n)?;
    ue_channel_rrs_unchecked(ue, surface, wavelength, m, n)
}

fn ue_channel_array_unchecked(ue: &UePlacement, array: &ArrayGeometry, wavelength: f64, m: usize, n: usize) -> Result<Complex64> {
    let distance = (ue.position() - array.element_position(m, n)).norm();
    if !(distance > 0.0) {
        return Err(Error::DegeneratePlacement);
    }
    let magnitude = wavelength * (array.element_gain() * ue.ue_gain()).sqrt() / (4.0 * PI * distance);
    Ok(magnitude * propagation_phase(distance, wavelength))
}

/// Free-space (Friis) channel from array element `(m, n)` to the UE.
pub fn ue_channel_array(
    ue: &UePlacement,
    array: &ArrayGeometry,
    wavelength: f64,
    m: usize,
    n: usize,
) -> Result<ComplexAmplitude> {
    check_index(array, m, n)?;
    ue_channel_array_unchecked(ue, array, wavelength, m, n)
}

fn wrap_phase(phase: f64) -> f64 {
    let wrapped = phase.rem_euclid(TAU);
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Per-element refraction phases, row-major (m outer, n inner), each in
/// `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMask {
    m_count: usize,
    n_count: usize,
    phases: Vec<f64>,
    bits: Option<u32>,
}

impl PhaseMask {
    /// Phases outside `[0, 2 pi)` are wrapped.
    pub fn new(m_count: usize, n_count: usize, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != m_count * n_count {
            return Err(Error::MaskShape {
                got_m: phases.len(),
                got_n: 1,
                want_m: m_count,
                want_n: n_count,
            });
        }
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "phase",
                value: *bad,
                reason: "must be finite",
            });
        }
        Ok(Self {
            m_count,
            n_count,
            phases: phases.into_iter().map(wrap_phase).collect(),
            bits: None,
        })
    }

    pub fn uniform(m_count: usize, n_count: usize, phase: f64) -> Result<Self> {
        Self::new(m_count, n_count, vec![phase; m_count * n_count])
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn n_count(&self) -> usize {
        self.n_count
    }

    /// Quantization depth, when the mask was produced by [`PhaseMask::quantized`].
    pub fn bits(&self) -> Option<u32> {
        self.bits
    }

    pub fn phase(&self, m: usize, n: usize) -> f64 {
        self.phases[m * self.n_count + n]
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Round every phase to the nearest of `2^bits` uniform levels.
    pub fn quantized(&self, bits: u32) -> Result<Self> {
        if bits == 0 || bits > 30 {
            return Err(Error::InvalidParameter {
                name: "quantization bits",
                value: bits as f64,
                reason: "must be between 1 and 30",
            });
        }
        let levels = (1u64 << bits) as f64;
        let step = TAU / levels;
        let phases = self
            .phases
            .iter()
            .map(|p| ((p / step).round() % levels) * step)
            .collect();
        Ok(Self {
            m_count: self.m_count,
            n_count: self.n_count,
            phases,
            bits: Some(bits),
        })
    }
}

/// Received SNR together with the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrReport {
    pub snr: f64,
    /// `log2(1 + snr)` in bit/s/Hz.
    pub rate: f64,
    pub phase_mask: PhaseMask,
}

impl SnrReport {
    fn new(snr: f64, phase_mask: PhaseMask) -> Self {
        Self {
            snr,
            rate: snr.ln_1p() / std::f64::consts::LN_2,
            phase_mask,
        }
    }
}

/// Per-element two-hop amplitude `h * y` per unit transmit amplitude,
/// without the refraction coefficient.
fn two_hop_terms(scene: &Scene) -> Result<Vec<Complex64>> {
    let surface = scene.surface();
    let mut out = Vec::with_capacity(surface.element_count());
    for m in 0..surface.m_count() {
        for n in 0..surface.n_count() {
            let y = incident_unchecked(scene.feed(), surface, scene.wavelength(), m, n);
            let h = ue_channel_rrs_unchecked(scene.ue(), surface, scene.wavelength(), m, n)?;
            out.push(h * y);
        }
    }
    Ok(out)
}

/// SNR at the UE for an arbitrary refraction phase configuration.
pub fn snr_with_phases(scene: &Scene, mask: &PhaseMask) -> Result<SnrReport> {
    let surface = scene.surface();
    if mask.m_count() != surface.m_count() || mask.n_count() != surface.n_count() {
        return Err(Error::MaskShape {
            got_m: mask.m_count(),
            got_n: mask.n_count(),
            want_m: surface.m_count(),
            want_n: surface.n_count(),
        });
    }
    let amplitude = surface.refraction_amplitude();
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (term, &phase) in two_hop_terms(scene)?.iter().zip(mask.phases()) {
        let contribution = term * Complex64::from_polar(amplitude, phase);
        re.add(contribution.re);
        im.add(contribution.im);
    }
    let field = Complex64::new(re.value(), im.value()) * scene.tx_power().sqrt();
    Ok(SnrReport::new(field.norm_sqr() / scene.noise_power(), mask.clone()))
}

/// Maximum SNR of the RRS link: every element's phase cancels its two-hop
/// propagation phase so all contributions add in phase.
pub fn exact_snr_rrs(scene: &Scene) -> Result<SnrReport> {
    let surface = scene.surface();
    let terms = two_hop_terms(scene)?;
    let magnitude: CompensatedSum = terms.iter().map(|t| t.norm()).collect();
    let phases = terms.iter().map(|t| -t.arg()).collect();
    let mask = PhaseMask::new(surface.m_count(), surface.n_count(), phases)?;
    let amplitude = surface.refraction_amplitude() * magnitude.value();
    let snr = scene.tx_power() * amplitude * amplitude / scene.noise_power();
    Ok(SnrReport::new(snr, mask))
}

/// Maximum SNR of a phased array with the transmit power split evenly over
/// its elements and phase shifters aligned at the UE.
///
/// The returned mask holds the phase-shifter settings.
pub fn exact_rate_pa(scene: &Scene, array: &ArrayGeometry) -> Result<SnrReport> {
    let count = array.element_count() as f64;
    let mut magnitude = CompensatedSum::new();
    let mut phases = Vec::with_capacity(array.element_count());
    for m in 0..array.m_count() {
        for n in 0..array.n_count() {
            let h = ue_channel_array_unchecked(scene.ue(), array, scene.wavelength(), m, n)?;
            magnitude.add(h.norm());
            phases.push(-h.arg());
        }
    }
    let field = magnitude.value() * (scene.tx_power() / count).sqrt();
    let mask = PhaseMask::new(array.m_count(), array.n_count(), phases)?;
    Ok(SnrReport::new(field * field / scene.noise_power(), mask))
}

/// Cauchy-Schwarz bound `(sum |h Gamma|^2)(sum |sqrt(P) y|^2) / sigma^2` on
/// the aligned SNR.
pub fn cauchy_snr_bound(scene: &Scene) -> Result<f64> {
    let surface = scene.surface();
    let amplitude = surface.refraction_amplitude();
    let mut channel = CompensatedSum::new();
    let mut incident = CompensatedSum::new();
    for m in 0..surface.m_count() {
        for n in 0..surface.n_count() {
            let y = incident_unchecked(scene.feed(), surface, scene.wavelength(), m, n);
            let h = ue_channel_rrs_unchecked(scene.ue(), surface, scene.wavelength(), m, n)?;
            channel.add((h * amplitude).norm_sqr());
            incident.add(scene.tx_power() * y.norm_sqr());
        }
    }
    Ok(channel.value() * incident.value() / scene.noise_power())
}
