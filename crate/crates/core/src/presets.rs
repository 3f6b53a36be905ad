//! Reference deployment: 26 GHz carrier, UE at 50 m, 43 dBm transmit
//! power against a -96 dBm noise floor, lambda/6 surface elements and a
//! half-wavelength phased array.

use std::f64::consts::PI;

use crate::error::Result;
use crate::geometry::{ArrayGeometry, FeedModel, Scene, ScenePair, SurfaceGeometry, UePlacement};
use crate::power_analysis::PowerModel;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const CARRIER_GHZ: f64 = 26.0;
/// Rounded carrier wavelength (c / 26 GHz is 1.1530e-2 m).
pub const WAVELENGTH: f64 = 1.15e-2;
pub const UE_RANGE: f64 = 50.0;
pub const UE_ZENITH: f64 = PI / 6.0;
pub const UE_AZIMUTH: f64 = PI / 4.0;
pub const UE_GAIN: f64 = 1.0;
pub const TX_POWER_DBM: f64 = 43.0;
pub const NOISE_POWER_DBM: f64 = -96.0;
pub const ELEMENT_GAIN: f64 = 1.0;
pub const REFRACTION_AMPLITUDE: f64 = 0.8;
/// Surface element size in wavelengths.
pub const RRS_ELEMENT_WAVELENGTHS: f64 = 1.0 / 6.0;
/// Phased-array element spacing in wavelengths.
pub const PA_ELEMENT_WAVELENGTHS: f64 = 0.5;
pub const FEED_DISTANCE: f64 = 0.15;
pub const FEED_EXPONENT: f64 = 5.0;

pub const DIODES_PER_ELEMENT: u32 = 1;
pub const DIODE_POWER: f64 = 5e-6;
pub const SHIFTER_POWER: f64 = 0.1;
pub const FPGA_POWER: f64 = 5.0;
pub const CONVERTER_POWER: f64 = 5e-4;
pub const GROUP_SIZE: u64 = 1;
pub const MAX_POWER: f64 = 250.0;
pub const MIN_RATE: f64 = 20.0;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn wavelength_for_ghz(ghz: f64) -> f64 {
    SPEED_OF_LIGHT / (ghz * 1e9)
}

/// Reference scene with an `m x n` surface and the given feed.
pub fn reference_scene(feed_distance: f64, feed_exponent: f64, m: usize, n: usize) -> Result<Scene> {
    let element = RRS_ELEMENT_WAVELENGTHS * WAVELENGTH;
    Scene::new(
        FeedModel::new(feed_exponent, feed_distance)?,
        SurfaceGeometry::new(m, n, element, element, REFRACTION_AMPLITUDE)?,
        UePlacement::new(UE_RANGE, UE_ZENITH, UE_AZIMUTH, UE_GAIN)?,
        dbm_to_watts(TX_POWER_DBM),
        dbm_to_watts(NOISE_POWER_DBM),
        WAVELENGTH,
    )
}

pub fn reference_array(m: usize, n: usize) -> Result<ArrayGeometry> {
    let spacing = PA_ELEMENT_WAVELENGTHS * WAVELENGTH;
    ArrayGeometry::new(m, n, spacing, spacing, ELEMENT_GAIN)
}

/// Reference scene and a 64x64 reference array.
pub fn reference_pair(feed_distance: f64, feed_exponent: f64) -> Result<ScenePair> {
    Ok(ScenePair::new(
        reference_scene(feed_distance, feed_exponent, 100, 100)?,
        reference_array(64, 64)?,
    ))
}

pub fn reference_power_model(group_size: u64) -> PowerModel {
    PowerModel {
        diode_power: DIODE_POWER,
        diodes_per_element: DIODES_PER_ELEMENT,
        converter_power: CONVERTER_POWER,
        group_size,
        fpga_power: FPGA_POWER,
        shifter_power: SHIFTER_POWER,
        max_power: MAX_POWER,
        min_rate: MIN_RATE,
    }
}
