//! Scene description in the surface frame: the surface lies in the yoz
//! plane centred at the origin, the feed sits on the negative x-axis and the
//! UE is on the refraction side (x > 0).
//!
//! All quantities are SI (meters, watts, radians). Constructors validate
//! their invariants, so downstream code never re-checks them.

use std::ops::Sub;

use crate::error::{require, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

impl Sub for Point3 {
    type Output = Point3;

    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

/// A rectangular grid of elements in the yoz plane.
///
/// Element `(m, n)` (zero-based storage indices) sits at
/// `(0, (m - (M-1)/2) dy, (n - (N-1)/2) dz)`, so the grid is symmetric about
/// the origin and uses half-integer offsets for even counts.
pub trait ElementGrid {
    fn m_count(&self) -> usize;
    fn n_count(&self) -> usize;
    fn element_dy(&self) -> f64;
    fn element_dz(&self) -> f64;

    fn element_count(&self) -> usize {
        self.m_count() * self.n_count()
    }

    /// `M / N`.
    fn aspect_ratio(&self) -> f64 {
        self.m_count() as f64 / self.n_count() as f64
    }

    /// Physical extent along y.
    fn width_y(&self) -> f64 {
        self.m_count() as f64 * self.element_dy()
    }

    /// Physical extent along z.
    fn width_z(&self) -> f64 {
        self.n_count() as f64 * self.element_dz()
    }

    fn element_position(&self, m: usize, n: usize) -> Point3 {
        let my = m as f64 - 0.5 * (self.m_count() as f64 - 1.0);
        let nz = n as f64 - 0.5 * (self.n_count() as f64 - 1.0);
        Point3::new(0.0, my * self.element_dy(), nz * self.element_dz())
    }

    /// Positions in row-major order (m outer, n inner).
    fn element_positions(&self) -> Vec<Point3> {
        let mut out = Vec::with_capacity(self.element_count());
        for m in 0..self.m_count() {
            for n in 0..self.n_count() {
                out.push(self.element_position(m, n));
            }
        }
        out
    }
}

/// Free-function form of [`ElementGrid::element_positions`].
pub fn element_positions<G: ElementGrid + ?Sized>(grid: &G) -> Vec<Point3> {
    grid.element_positions()
}

fn check_grid(m_count: usize, n_count: usize, dy: f64, dz: f64) -> Result<()> {
    require(m_count >= 1, "m_count", m_count as f64, "must be at least 1")?;
    require(n_count >= 1, "n_count", n_count as f64, "must be at least 1")?;
    require(dy > 0.0 && dy.is_finite(), "element_dy", dy, "must be positive")?;
    require(dz > 0.0 && dz.is_finite(), "element_dz", dz, "must be positive")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceGeometry {
    m_count: usize,
    n_count: usize,
    element_dy: f64,
    element_dz: f64,
    refraction_amplitude: f64,
}

impl SurfaceGeometry {
    pub fn new(
        m_count: usize,
        n_count: usize,
        element_dy: f64,
        element_dz: f64,
        refraction_amplitude: f64,
    ) -> Result<Self> {
        check_grid(m_count, n_count, element_dy, element_dz)?;
        require(
            refraction_amplitude > 0.0 && refraction_amplitude <= 1.0,
            "refraction_amplitude",
            refraction_amplitude,
            "must lie in (0, 1]",
        )?;
        Ok(Self {
            m_count,
            n_count,
            element_dy,
            element_dz,
            refraction_amplitude,
        })
    }

    pub fn refraction_amplitude(&self) -> f64 {
        self.refraction_amplitude
    }

    /// Same element size and amplitude, different counts.
    pub fn resized(&self, m_count: usize, n_count: usize) -> Result<Self> {
        Self::new(m_count, n_count, self.element_dy, self.element_dz, self.refraction_amplitude)
    }
}

impl ElementGrid for SurfaceGeometry {
    fn m_count(&self) -> usize {
        self.m_count
    }
    fn n_count(&self) -> usize {
        self.n_count
    }
    fn element_dy(&self) -> f64 {
        self.element_dy
    }
    fn element_dz(&self) -> f64 {
        self.element_dz
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    m_count: usize,
    n_count: usize,
    element_dy: f64,
    element_dz: f64,
    element_gain: f64,
}

impl ArrayGeometry {
    pub fn new(m_count: usize, n_count: usize, element_dy: f64, element_dz: f64, element_gain: f64) -> Result<Self> {
        check_grid(m_count, n_count, element_dy, element_dz)?;
        require(element_gain > 0.0 && element_gain.is_finite(), "element_gain", element_gain, "must be positive")?;
        Ok(Self {
            m_count,
            n_count,
            element_dy,
            element_dz,
            element_gain,
        })
    }

    pub fn element_gain(&self) -> f64 {
        self.element_gain
    }

    pub fn resized(&self, m_count: usize, n_count: usize) -> Result<Self> {
        Self::new(m_count, n_count, self.element_dy, self.element_dz, self.element_gain)
    }
}

impl ElementGrid for ArrayGeometry {
    fn m_count(&self) -> usize {
        self.m_count
    }
    fn n_count(&self) -> usize {
        self.n_count
    }
    fn element_dy(&self) -> f64 {
        self.element_dy
    }
    fn element_dz(&self) -> f64 {
        self.element_dz
    }
}

/// Directional feed on the negative x-axis, boresight towards the surface,
/// with pattern `2(alpha+1) cos^alpha(theta)` over the front hemisphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedModel {
    gain_exponent: f64,
    distance: f64,
}

impl FeedModel {
    pub fn new(gain_exponent: f64, distance: f64) -> Result<Self> {
        require(
            gain_exponent >= 0.0 && gain_exponent.is_finite(),
            "gain_exponent",
            gain_exponent,
            "must be nonnegative",
        )?;
        require(distance > 0.0 && distance.is_finite(), "feed distance", distance, "must be positive")?;
        Ok(Self { gain_exponent, distance })
    }

    pub fn gain_exponent(&self) -> f64 {
        self.gain_exponent
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// Boresight gain `2(alpha + 1)`.
    pub fn boresight_gain(&self) -> f64 {
        2.0 * (self.gain_exponent + 1.0)
    }

    pub fn position(&self) -> Point3 {
        Point3::new(-self.distance, 0.0, 0.0)
    }
}

/// UE location in spherical coordinates about the surface centre: zenith
/// from the z-axis, azimuth from the x-axis in the xy-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UePlacement {
    range: f64,
    zenith: f64,
    azimuth: f64,
    ue_gain: f64,
}

impl UePlacement {
    pub fn new(range: f64, zenith: f64, azimuth: f64, ue_gain: f64) -> Result<Self> {
        require(range > 0.0 && range.is_finite(), "ue range", range, "must be positive")?;
        require(zenith.is_finite(), "ue zenith", zenith, "must be finite")?;
        require(azimuth.is_finite(), "ue azimuth", azimuth, "must be finite")?;
        require(ue_gain > 0.0 && ue_gain.is_finite(), "ue_gain", ue_gain, "must be positive")?;
        let psi = zenith.sin() * azimuth.cos();
        require(
            psi > 1e-12,
            "ue x-direction cosine",
            psi,
            "UE must be on the refraction side of the surface (x > 0)",
        )?;
        Ok(Self {
            range,
            zenith,
            azimuth,
            ue_gain,
        })
    }

    pub fn range(&self) -> f64 {
        self.range
    }
    pub fn zenith(&self) -> f64 {
        self.zenith
    }
    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }
    pub fn ue_gain(&self) -> f64 {
        self.ue_gain
    }

    /// x-direction cosine, `sin(zenith) cos(azimuth)`.
    pub fn psi(&self) -> f64 {
        self.zenith.sin() * self.azimuth.cos()
    }

    /// y-direction cosine, `sin(zenith) sin(azimuth)`.
    pub fn phi(&self) -> f64 {
        self.zenith.sin() * self.azimuth.sin()
    }

    /// z-direction cosine, `cos(zenith)`.
    pub fn omega(&self) -> f64 {
        self.zenith.cos()
    }

    pub fn direction_cosines(&self) -> (f64, f64, f64) {
        (self.psi(), self.phi(), self.omega())
    }

    pub fn position(&self) -> Point3 {
        let (psi, phi, omega) = self.direction_cosines();
        Point3::new(self.range * psi, self.range * phi, self.range * omega)
    }

    pub fn with_range(&self, range: f64) -> Result<Self> {
        Self::new(range, self.zenith, self.azimuth, self.ue_gain)
    }
}

pub fn ue_position(placement: &UePlacement) -> Point3 {
    placement.position()
}

/// Complete RRS link: feed, surface, UE and link budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scene {
    feed: FeedModel,
    surface: SurfaceGeometry,
    ue: UePlacement,
    tx_power: f64,
    noise_power: f64,
    wavelength: f64,
}

impl Scene {
    /// A zero transmit power is accepted (it yields zero SNR).
    pub fn new(
        feed: FeedModel,
        surface: SurfaceGeometry,
        ue: UePlacement,
        tx_power: f64,
        noise_power: f64,
        wavelength: f64,
    ) -> Result<Self> {
        require(tx_power >= 0.0 && tx_power.is_finite(), "tx_power", tx_power, "must be nonnegative")?;
        require(noise_power > 0.0 && noise_power.is_finite(), "noise_power", noise_power, "must be positive")?;
        require(wavelength > 0.0 && wavelength.is_finite(), "wavelength", wavelength, "must be positive")?;
        Ok(Self {
            feed,
            surface,
            ue,
            tx_power,
            noise_power,
            wavelength,
        })
    }

    pub fn feed(&self) -> &FeedModel {
        &self.feed
    }
    pub fn surface(&self) -> &SurfaceGeometry {
        &self.surface
    }
    pub fn ue(&self) -> &UePlacement {
        &self.ue
    }
    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }
    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn with_feed(mut self, feed: FeedModel) -> Self {
        self.feed = feed;
        self
    }

    pub fn with_surface(mut self, surface: SurfaceGeometry) -> Self {
        self.surface = surface;
        self
    }

    pub fn with_ue(mut self, ue: UePlacement) -> Self {
        self.ue = ue;
        self
    }

    pub fn with_tx_power(self, tx_power: f64) -> Result<Self> {
        Self::new(self.feed, self.surface, self.ue, tx_power, self.noise_power, self.wavelength)
    }

    pub fn with_noise_power(self, noise_power: f64) -> Result<Self> {
        Self::new(self.feed, self.surface, self.ue, self.tx_power, noise_power, self.wavelength)
    }
}

/// An RRS scene together with the phased array it is compared against.
///
/// Both technologies share the scene's UE, wavelength, transmit power and
/// noise power, so the comparison is always at equal radiated power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenePair {
    pub scene: Scene,
    pub array: ArrayGeometry,
}

impl ScenePair {
    pub fn new(scene: Scene, array: ArrayGeometry) -> Self {
        Self { scene, array }
    }
}
