use std::io::Write;

use sha2::{Digest, Sha256};

use crate::config::{Resolved, RunConfig};

pub const TOOL_VERSION: &str = concat!("rrs ", env!("CARGO_PKG_VERSION"));

/// Rectangular table of numeric results with `# ` provenance lines.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub provenance: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub values: Vec<f64>,
    /// Set when this point failed; `values` are then NaN past the axis.
    pub error: Option<String>,
}

impl SweepRow {
    pub fn ok(values: Vec<f64>) -> Self {
        Self { values, error: None }
    }
}

impl SweepTable {
    pub fn new(columns: Vec<String>, provenance: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            provenance,
        }
    }

    pub fn push(&mut self, row: SweepRow) {
        assert_eq!(row.values.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for line in &self.provenance {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = self.columns.iter().map(String::as_str).collect();
        header.push("status");
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record: Vec<String> = row.values.iter().map(|v| format_value(*v)).collect();
            record.push(row.error.clone().unwrap_or_else(|| "ok".to_string()));
            w.write_record(&record)?;
        }
        w.flush()
    }
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:?}")
    }
}

pub fn config_digest(config: &RunConfig) -> String {
    hex::encode(Sha256::digest(config.emit().as_bytes()))
}

/// Tool version, config hash and every tolerance the numbers depend on.
pub fn provenance(config: &RunConfig, resolved: &Resolved) -> Vec<String> {
    let opts = &resolved.sizing;
    let band = opts
        .rate
        .band_epsilon
        .map_or_else(|| "none".to_string(), |b| format!("{b:?}"));
    let l_pw = rrs_core::power_analysis::element_power_ratio(&resolved.model)
        .map_or_else(|e| e.to_string(), |v| format!("{v:?}"));
    vec![
        format!("tool: {TOOL_VERSION}"),
        format!("config-sha256: {}", config_digest(config)),
        format!("quadrature rel_tol: {:?}", opts.rate.quadrature.rel_tol),
        format!("quadrature max_panels: {}", opts.rate.quadrature.max_panels),
        format!("singular-ring band_epsilon: {band}"),
        format!("solver_tol (log count): {:?}", opts.solver_tol),
        format!("max elements: rrs {:?}, array {:?}", opts.max_rrs_elements, opts.max_pa_elements),
        format!("wavelength_m: {:?}", resolved.pair.scene.wavelength()),
        format!("group_size Q: {} (l_pw = {l_pw})", resolved.model.group_size),
    ]
}
