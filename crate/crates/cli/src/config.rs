//! Flat `key = value` run configuration.
//!
//! ```text
//! # 43 dBm transmit power, sweep the surface size
//! tx_power_dbm = 43
//! rrs_elements = log(1e2, 1e6, 41)
//! quantity = rate_rrs_quadrature
//! ```
//!
//! Power keys also accept a `_dbm` suffix and the wavelength may be given
//! as `frequency_ghz`; both are converted to SI units at parse time. Any
//! numeric key may instead hold one `lin(start, stop, points)` or
//! `log(start, stop, points)` sweep axis.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use rrs_core::geometry::{ArrayGeometry, FeedModel, Scene, ScenePair, SurfaceGeometry, UePlacement};
use rrs_core::power_analysis::{PowerModel, SizingOptions};
use rrs_core::presets;
use rrs_core::rate_analysis::RateOptions;
use rrs_core::numerics::QuadratureOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Key {
    Wavelength,
    UeRange,
    UeZenith,
    UeAzimuth,
    UeGain,
    TxPower,
    NoisePower,
    FeedDistance,
    FeedExponent,
    RrsM,
    RrsN,
    RrsElementDy,
    RrsElementDz,
    RefractionAmplitude,
    RrsElements,
    PaM,
    PaN,
    PaElementDy,
    PaElementDz,
    ElementGain,
    PaElements,
    DiodePower,
    DiodesPerElement,
    ConverterPower,
    GroupSize,
    FpgaPower,
    ShifterPower,
    MaxPower,
    MinRate,
    Rate,
    RelTol,
    SolverTol,
    BandEpsilon,
    MaxRrsElements,
    MaxPaElements,
}

struct KeySpec {
    key: Key,
    name: &'static str,
    power: bool,
    integer: bool,
}

const fn key_spec(key: Key, name: &'static str) -> KeySpec {
    KeySpec {
        key,
        name,
        power: false,
        integer: false,
    }
}

const fn power(key: Key, name: &'static str) -> KeySpec {
    KeySpec {
        key,
        name,
        power: true,
        integer: false,
    }
}

const fn count(key: Key, name: &'static str) -> KeySpec {
    KeySpec {
        key,
        name,
        power: false,
        integer: true,
    }
}

const KEYS: &[KeySpec] = &[
    key_spec(Key::Wavelength, "wavelength"),
    key_spec(Key::UeRange, "ue_range"),
    key_spec(Key::UeZenith, "ue_zenith"),
    key_spec(Key::UeAzimuth, "ue_azimuth"),
    key_spec(Key::UeGain, "ue_gain"),
    power(Key::TxPower, "tx_power"),
    power(Key::NoisePower, "noise_power"),
    key_spec(Key::FeedDistance, "feed_distance"),
    key_spec(Key::FeedExponent, "feed_exponent"),
    count(Key::RrsM, "rrs_m"),
    count(Key::RrsN, "rrs_n"),
    key_spec(Key::RrsElementDy, "rrs_element_dy"),
    key_spec(Key::RrsElementDz, "rrs_element_dz"),
    key_spec(Key::RefractionAmplitude, "refraction_amplitude"),
    key_spec(Key::RrsElements, "rrs_elements"),
    count(Key::PaM, "pa_m"),
    count(Key::PaN, "pa_n"),
    key_spec(Key::PaElementDy, "pa_element_dy"),
    key_spec(Key::PaElementDz, "pa_element_dz"),
    key_spec(Key::ElementGain, "element_gain"),
    key_spec(Key::PaElements, "pa_elements"),
    power(Key::DiodePower, "diode_power"),
    count(Key::DiodesPerElement, "diodes_per_element"),
    power(Key::ConverterPower, "converter_power"),
    count(Key::GroupSize, "group_size"),
    power(Key::FpgaPower, "fpga_power"),
    power(Key::ShifterPower, "shifter_power"),
    power(Key::MaxPower, "max_power"),
    key_spec(Key::MinRate, "min_rate"),
    key_spec(Key::Rate, "rate"),
    key_spec(Key::RelTol, "rel_tol"),
    key_spec(Key::SolverTol, "solver_tol"),
    key_spec(Key::BandEpsilon, "band_epsilon"),
    key_spec(Key::MaxRrsElements, "max_rrs_elements"),
    key_spec(Key::MaxPaElements, "max_pa_elements"),
];

impl Key {
    fn spec(self) -> &'static KeySpec {
        KEYS.iter().find(|s| s.key == self).expect("every key has a spec")
    }

    pub fn name(self) -> &'static str {
        self.spec().name
    }

    pub fn all() -> impl Iterator<Item = Key> {
        KEYS.iter().map(|s| s.key)
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Unit a value was written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Si,
    Dbm,
    Ghz,
}

impl Unit {
    pub fn to_si(self, value: f64) -> f64 {
        match self {
            Unit::Si => value,
            Unit::Dbm => presets::dbm_to_watts(value),
            Unit::Ghz => presets::wavelength_for_ghz(value),
        }
    }
}

/// Key name as written, including any unit suffix.
pub fn key_label(key: Key, unit: Unit) -> String {
    match unit {
        Unit::Si => key.name().to_string(),
        Unit::Dbm => format!("{}_dbm", key.name()),
        Unit::Ghz => "frequency_ghz".to_string(),
    }
}

fn lookup(name: &str) -> Option<(Key, Unit)> {
    if name == "frequency_ghz" {
        return Some((Key::Wavelength, Unit::Ghz));
    }
    if let Some(base) = name.strip_suffix("_dbm") {
        return KEYS.iter().find(|s| s.power && s.name == base).map(|s| (s.key, Unit::Dbm));
    }
    KEYS.iter().find(|s| s.name == name).map(|s| (s.key, Unit::Si))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub unit: Unit,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepAxis {
    /// Axis points in the unit they were written in.
    pub fn points(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                if i == self.points - 1 {
                    return self.stop;
                }
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * t,
                    Scale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .map(|x| if x.is_finite() { x } else { f64::NAN })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting {
    /// SI value.
    Value(f64),
    Sweep(SweepAxis),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    RateRrsExact,
    RateRrsQuadrature,
    RateRrsLower,
    RateRrsUpper,
    RateRrsFarfield,
    Bounds,
    RatePaExact,
    RatePaQuadrature,
    RatePaFarfield,
    PowerRrs,
    PowerPa,
    GClosed,
    GNumeric,
    Verdict,
}

const QUANTITIES: &[(Quantity, &str)] = &[
    (Quantity::RateRrsExact, "rate_rrs_exact"),
    (Quantity::RateRrsQuadrature, "rate_rrs_quadrature"),
    (Quantity::RateRrsLower, "rate_rrs_lower"),
    (Quantity::RateRrsUpper, "rate_rrs_upper"),
    (Quantity::RateRrsFarfield, "rate_rrs_farfield"),
    (Quantity::Bounds, "bounds"),
    (Quantity::RatePaExact, "rate_pa_exact"),
    (Quantity::RatePaQuadrature, "rate_pa_quadrature"),
    (Quantity::RatePaFarfield, "rate_pa_farfield"),
    (Quantity::PowerRrs, "power_rrs"),
    (Quantity::PowerPa, "power_pa"),
    (Quantity::GClosed, "g_closed"),
    (Quantity::GNumeric, "g_numeric"),
    (Quantity::Verdict, "verdict"),
];

impl Quantity {
    pub fn name(self) -> &'static str {
        QUANTITIES.iter().find(|(q, _)| *q == self).map(|(_, n)| *n).expect("named")
    }

    pub fn parse(name: &str) -> Option<Self> {
        QUANTITIES.iter().find(|(_, n)| *n == name).map(|(q, _)| *q)
    }

    pub fn names() -> impl Iterator<Item = &'static str> {
        QUANTITIES.iter().map(|(_, n)| *n)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a config line came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override(usize),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override(n) => write!(f, "--set #{n}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{at}: expected `key = value`, found {text:?}")]
    Syntax { at: Origin, text: String },
    #[error("{at}: unknown key `{key}`")]
    UnknownKey { at: Origin, key: String },
    #[error("{at}: `{key}`: {message}")]
    BadValue { at: Origin, key: String, message: String },
    #[error("{at}: `{key}` is already set at {first}")]
    Duplicate { at: Origin, key: String, first: Origin },
    #[error("{at}: `{key}` has both a fixed value and a sweep axis (other at {first})")]
    ValueAndSweep { at: Origin, key: String, first: Origin },
    #[error("{at}: only one sweep axis is allowed, `{first}` already sweeps")]
    MultipleSweeps { at: Origin, first: String },
    #[error("{at}: sweep of `{key}` needs at least one point")]
    ZeroPoints { at: Origin, key: String },
    #[error("`{0}` must be set for this computation")]
    Missing(&'static str),
    #[error("invalid configuration: {0}")]
    Invalid(#[from] rrs_core::Error),
}

/// Parsed configuration. Unset keys take the reference defaults.
#[derive(Debug, Clone, PartialEq)]
#[derive(Default)]
pub struct RunConfig {
    pub settings: BTreeMap<Key, Setting>,
    pub quantity: Option<Quantity>,
    pub output: Option<String>,
}


/// Fully built inputs for one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub pair: ScenePair,
    pub model: PowerModel,
    pub sizing: SizingOptions,
    pub rate: Option<f64>,
    pub rrs_elements: Option<f64>,
    pub pa_elements: Option<f64>,
}

impl Resolved {
    pub fn rate_options(&self) -> &RateOptions {
        &self.sizing.rate
    }

    pub fn require_rate(&self) -> Result<f64, ConfigError> {
        self.rate.ok_or(ConfigError::Missing("rate"))
    }
}

fn parse_number(text: &str) -> Option<f64> {
    let v: f64 = text.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

fn parse_sweep(text: &str) -> Option<Result<(Scale, f64, f64, f64), String>> {
    let text = text.trim();
    let (scale, rest) = if let Some(r) = text.strip_prefix("lin(") {
        (Scale::Linear, r)
    } else {
        let r = text.strip_prefix("log(")?;
        (Scale::Log, r)
    };
    let Some(body) = rest.strip_suffix(')') else {
        return Some(Err("sweep must end with `)`".into()));
    };
    let parts: Vec<_> = body.split(',').map(parse_number).collect();
    match parts.as_slice() {
        [Some(a), Some(b), Some(n)] => Some(Ok((scale, *a, *b, *n))),
        _ => Some(Err("expected `lin(start, stop, points)` or `log(start, stop, points)`".into())),
    }
}

struct Parser {
    config: RunConfig,
    origins: BTreeMap<Key, Origin>,
    quantity_at: Option<Origin>,
    output_at: Option<Origin>,
}

impl Parser {
    fn new(config: RunConfig) -> Self {
        Self {
            config,
            origins: BTreeMap::new(),
            quantity_at: None,
            output_at: None,
        }
    }

    fn line(&mut self, text: &str, at: Origin, replace: bool) -> Result<(), ConfigError> {
        let content = text.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            return Ok(());
        }
        let Some((name, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                at,
                text: content.to_string(),
            });
        };
        let (name, value) = (name.trim(), value.trim());
        let bad = |message: String| ConfigError::BadValue {
            at,
            key: name.to_string(),
            message,
        };

        match name {
            "quantity" => {
                if let (Some(first), false) = (self.quantity_at, replace) {
                    return Err(ConfigError::Duplicate {
                        at,
                        key: name.into(),
                        first,
                    });
                }
                let q = Quantity::parse(value).ok_or_else(|| {
                    bad(format!("unknown quantity; expected one of {}", Quantity::names().collect::<Vec<_>>().join(", ")))
                })?;
                self.config.quantity = Some(q);
                self.quantity_at = Some(at);
                return Ok(());
            }
            "output" => {
                if let (Some(first), false) = (self.output_at, replace) {
                    return Err(ConfigError::Duplicate {
                        at,
                        key: name.into(),
                        first,
                    });
                }
                if value.is_empty() {
                    return Err(bad("empty path".into()));
                }
                self.config.output = Some(value.to_string());
                self.output_at = Some(at);
                return Ok(());
            }
            _ => {}
        }

        let (key, unit) = lookup(name).ok_or_else(|| ConfigError::UnknownKey {
            at,
            key: name.to_string(),
        })?;

        let setting = match parse_sweep(value) {
            Some(Err(message)) => return Err(bad(message)),
            Some(Ok((scale, start, stop, points))) => {
                if points < 1.0 {
                    return Err(ConfigError::ZeroPoints {
                        at,
                        key: name.to_string(),
                    });
                }
                if points.fract() != 0.0 {
                    return Err(bad("point count must be a whole number".into()));
                }
                if scale == Scale::Log && !(start > 0.0 && stop > 0.0) {
                    return Err(bad("log sweep needs positive end points".into()));
                }
                Setting::Sweep(SweepAxis {
                    unit,
                    start,
                    stop,
                    points: points as usize,
                    scale,
                })
            }
            None => {
                let v = parse_number(value).ok_or_else(|| bad(format!("not a number: {value:?}")))?;
                if key.spec().integer && (v.fract() != 0.0 || v < 0.0) {
                    return Err(bad("must be a non-negative whole number".into()));
                }
                let si = unit.to_si(v);
                if !si.is_finite() {
                    return Err(bad("value out of range".into()));
                }
                Setting::Value(si)
            }
        };

        if let Some(&first) = self.origins.get(&key) {
            if !replace {
                let existing = self.config.settings[&key];
                let mixed = matches!(existing, Setting::Sweep(_)) != matches!(setting, Setting::Sweep(_));
                return Err(if mixed {
                    ConfigError::ValueAndSweep {
                        at,
                        key: name.to_string(),
                        first,
                    }
                } else {
                    ConfigError::Duplicate {
                        at,
                        key: name.to_string(),
                        first,
                    }
                });
            }
        }
        if let Setting::Sweep(_) = setting {
            if let Some((other, _)) = self.config.sweep() {
                if other != key {
                    if replace {
                        // An override sweep replaces the file's sweep axis.
                        self.config.settings.remove(&other);
                        self.origins.remove(&other);
                    } else {
                        return Err(ConfigError::MultipleSweeps {
                            at,
                            first: other.name().to_string(),
                        });
                    }
                }
            }
        }
        self.config.settings.insert(key, setting);
        self.origins.insert(key, at);
        Ok(())
    }
}

impl RunConfig {
    /// Parses a config document; see the module docs for the format.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::parse_with_overrides::<&str>(text, &[])
    }

    /// Parses `text`, then applies `key=value` overrides, each replacing
    /// whatever the document set for that key.
    pub fn parse_with_overrides<S: AsRef<str>>(text: &str, overrides: &[S]) -> Result<Self, ConfigError> {
        let mut parser = Parser::new(RunConfig::default());
        for (i, line) in text.lines().enumerate() {
            parser.line(line, Origin::Line(i + 1), false)?;
        }
        for (i, line) in overrides.iter().enumerate() {
            let line = line.as_ref();
            if line.split('#').next().unwrap_or("").trim().is_empty() {
                return Err(ConfigError::Syntax {
                    at: Origin::Override(i + 1),
                    text: line.to_string(),
                });
            }
            parser.line(line, Origin::Override(i + 1), true)?;
        }
        let config = parser.config;
        config.validate()?;
        Ok(config)
    }

    /// Canonical text form; `parse(emit(c)) == c`.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for (key, setting) in &self.settings {
            match setting {
                Setting::Value(v) => out.push_str(&format!("{} = {:?}\n", key.name(), v)),
                Setting::Sweep(axis) => {
                    let f = match axis.scale {
                        Scale::Linear => "lin",
                        Scale::Log => "log",
                    };
                    out.push_str(&format!(
                        "{} = {f}({:?}, {:?}, {})\n",
                        key_label(*key, axis.unit),
                        axis.start,
                        axis.stop,
                        axis.points
                    ));
                }
            }
        }
        if let Some(q) = self.quantity {
            out.push_str(&format!("quantity = {q}\n"));
        }
        if let Some(o) = &self.output {
            out.push_str(&format!("output = {o}\n"));
        }
        out
    }

    pub fn sweep(&self) -> Option<(Key, SweepAxis)> {
        self.settings.iter().find_map(|(k, s)| match s {
            Setting::Sweep(a) => Some((*k, *a)),
            Setting::Value(_) => None,
        })
    }

    /// Sets a fixed SI value, replacing any previous setting of `key`.
    pub fn set(&mut self, key: Key, value: f64) {
        self.settings.insert(key, Setting::Value(value));
    }

    fn value(&self, key: Key, point: Option<(Key, f64)>) -> Option<f64> {
        if let Some((k, v)) = point {
            if k == key {
                return Some(v);
            }
        }
        match self.settings.get(&key) {
            Some(Setting::Value(v)) => Some(*v),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        match self.sweep() {
            None => self.resolve(None).map(|_| ()),
            Some((key, axis)) => {
                let pts = axis.points();
                for v in [pts[0], pts[pts.len() - 1]] {
                    self.resolve(Some((key, axis.unit.to_si(v))))?;
                }
                Ok(())
            }
        }
    }

    /// Builds the scene, array, power model and solver options, with the
    /// sweep variable (if any) pinned to `point` (SI units).
    pub fn resolve(&self, point: Option<(Key, f64)>) -> Result<Resolved, ConfigError> {
        let get = |key: Key, default: f64| self.value(key, point).unwrap_or(default);
        let get_count = |key: Key, default: usize| -> Result<usize, ConfigError> {
            let v = get(key, default as f64);
            if v.fract() != 0.0 || v < 0.0 {
                return Err(rrs_core::Error::InvalidParameter {
                    name: key.name(),
                    value: v,
                    reason: "must be a non-negative whole number",
                }
                .into());
            }
            Ok(v as usize)
        };

        let wavelength = get(Key::Wavelength, presets::WAVELENGTH);
        let rrs_element = presets::RRS_ELEMENT_WAVELENGTHS * wavelength;
        let pa_element = presets::PA_ELEMENT_WAVELENGTHS * wavelength;

        let feed = FeedModel::new(
            get(Key::FeedExponent, presets::FEED_EXPONENT),
            get(Key::FeedDistance, presets::FEED_DISTANCE),
        )?;
        let surface = SurfaceGeometry::new(
            get_count(Key::RrsM, 100)?,
            get_count(Key::RrsN, 100)?,
            get(Key::RrsElementDy, rrs_element),
            get(Key::RrsElementDz, rrs_element),
            get(Key::RefractionAmplitude, presets::REFRACTION_AMPLITUDE),
        )?;
        let ue = UePlacement::new(
            get(Key::UeRange, presets::UE_RANGE),
            get(Key::UeZenith, presets::UE_ZENITH),
            get(Key::UeAzimuth, presets::UE_AZIMUTH),
            get(Key::UeGain, presets::UE_GAIN),
        )?;
        let scene = Scene::new(
            feed,
            surface,
            ue,
            get(Key::TxPower, presets::dbm_to_watts(presets::TX_POWER_DBM)),
            get(Key::NoisePower, presets::dbm_to_watts(presets::NOISE_POWER_DBM)),
            wavelength,
        )?;
        let array = ArrayGeometry::new(
            get_count(Key::PaM, 64)?,
            get_count(Key::PaN, 64)?,
            get(Key::PaElementDy, pa_element),
            get(Key::PaElementDz, pa_element),
            get(Key::ElementGain, presets::ELEMENT_GAIN),
        )?;

        let model = PowerModel {
            diode_power: get(Key::DiodePower, presets::DIODE_POWER),
            diodes_per_element: get_count(Key::DiodesPerElement, presets::DIODES_PER_ELEMENT as usize)? as u32,
            converter_power: get(Key::ConverterPower, presets::CONVERTER_POWER),
            group_size: get_count(Key::GroupSize, presets::GROUP_SIZE as usize)? as u64,
            fpga_power: get(Key::FpgaPower, presets::FPGA_POWER),
            shifter_power: get(Key::ShifterPower, presets::SHIFTER_POWER),
            max_power: get(Key::MaxPower, presets::MAX_POWER),
            min_rate: get(Key::MinRate, presets::MIN_RATE),
        };
        model.validate()?;

        let defaults = SizingOptions::default();
        let rel_tol = get(Key::RelTol, QuadratureOptions::default().rel_tol);
        let band = get(Key::BandEpsilon, rrs_core::rate_analysis::DEFAULT_BAND_EPSILON);
        let check = |name: &'static str, value: f64, ok: bool, reason: &'static str| -> Result<(), ConfigError> {
            if ok {
                Ok(())
            } else {
                Err(rrs_core::Error::InvalidParameter { name, value, reason }.into())
            }
        };
        check("rel_tol", rel_tol, rel_tol > 0.0 && rel_tol < 1.0, "must be in (0, 1)")?;
        check("band_epsilon", band, (0.0..0.5).contains(&band), "must be in [0, 0.5)")?;
        let sizing = SizingOptions {
            rate: RateOptions {
                quadrature: QuadratureOptions::with_rel_tol(rel_tol),
                band_epsilon: (band > 0.0).then_some(band),
            },
            solver_tol: get(Key::SolverTol, defaults.solver_tol),
            max_rrs_elements: get(Key::MaxRrsElements, defaults.max_rrs_elements),
            max_pa_elements: get(Key::MaxPaElements, defaults.max_pa_elements),
        };
        check("solver_tol", sizing.solver_tol, sizing.solver_tol > 0.0, "must be > 0")?;
        check("max_rrs_elements", sizing.max_rrs_elements, sizing.max_rrs_elements >= 1.0, "must be >= 1")?;
        check("max_pa_elements", sizing.max_pa_elements, sizing.max_pa_elements >= 1.0, "must be >= 1")?;

        let rrs_elements = self.value(Key::RrsElements, point);
        let pa_elements = self.value(Key::PaElements, point);
        for (name, v) in [("rrs_elements", rrs_elements), ("pa_elements", pa_elements)] {
            if let Some(v) = v {
                check(name, v, v > 0.0, "must be > 0")?;
            }
        }

        Ok(Resolved {
            pair: ScenePair::new(scene, array),
            model,
            sizing,
            rate: self.value(Key::Rate, point),
            rrs_elements,
            pa_elements,
        })
    }
}
