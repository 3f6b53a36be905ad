//! Configuration, sweeps, CSV output and figure reproduction for the `rrs`
//! command-line tool.

pub mod config;
pub mod repro;
pub mod sweep;
pub mod table;

pub use config::{ConfigError, Key, Quantity, Resolved, RunConfig};
pub use repro::Figure;
pub use sweep::run_sweep;
pub use table::SweepTable;
