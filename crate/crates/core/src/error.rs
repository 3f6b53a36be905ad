use thiserror::Error;

use crate::numerics::NumericsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which transmitter a sizing or rate failure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Technology {
    Rrs,
    PhasedArray,
}

impl std::fmt::Display for Technology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Technology::Rrs => f.write_str("RRS"),
            Technology::PhasedArray => f.write_str("phased array"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("phase mask is {got_m}x{got_n} but the surface is {want_m}x{want_n}")]
    MaskShape {
        got_m: usize,
        got_n: usize,
        want_m: usize,
        want_n: usize,
    },
    #[error("element ({m}, {n}) is outside the {m_count}x{n_count} grid")]
    ElementIndex {
        m: usize,
        n: usize,
        m_count: usize,
        n_count: usize,
    },
    #[error("UE coincides with an element (zero link distance)")]
    DegeneratePlacement,
    #[error("integration region crosses the singular ring at normalized radius {radius}")]
    SingularRegion { radius: f64 },
    #[error("UE range {range} m is inside the far-field boundary {boundary} m")]
    NotFarField { range: f64, boundary: f64 },
    #[error("feed exponent {alpha} is outside the closed-form domain (alpha > 1)")]
    AlphaDomain { alpha: f64 },
    #[error("{technology} cannot reach {rate} bit/s/Hz (at most {max_rate} bit/s/Hz within the size limit)")]
    RateUnreachable {
        technology: Technology,
        rate: f64,
        max_rate: f64,
    },
    #[error("element power ratio is undefined: RRS per-element power is zero")]
    DegenerateModel,
    #[error("required rate {rate} bit/s/Hz is below the minimum {min_rate} bit/s/Hz")]
    BelowMinimumRate { rate: f64, min_rate: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub(crate) fn require(cond: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}
