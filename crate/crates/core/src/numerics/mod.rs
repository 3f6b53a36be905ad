//! Numerical kernels: adaptive quadrature in one and two dimensions,
//! bracketed root finding and golden-section minimization.
//!
//! Every routine is deterministic for fixed inputs and reports how far it
//! got (error estimate, panel count, bracket width) alongside the value.

mod quadrature;
mod roots;

pub use quadrature::{
    integrate_1d, integrate_1d_pieces, integrate_2d, QuadratureOptions, QuadratureResult, Region,
};
pub use roots::{find_root_bracketed, minimize_unimodal, SolverResult};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("adaptive quadrature hit the panel limit ({}) with value {} +/- {}", best.panels_used, best.value, best.error_estimate)]
    MaxPanels { best: QuadratureResult },
    #[error("root is not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("solver did not converge after {iterations} iterations (bracket [{lo}, {hi}])")]
    NotConverged { lo: f64, hi: f64, iterations: usize },
    #[error("invalid numerical input: {0}")]
    InvalidInput(&'static str),
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}
