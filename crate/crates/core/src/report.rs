//! Report envelopes and the centralized tolerance table.
//!
//! Every CLI run emits one envelope carrying the tool version, the
//! tolerances in effect, and the grid parameters, so a report is
//! reproducible from its own header. JSON is the canonical machine format;
//! CSV and text renderings cover tabular payloads.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SympathError};

/// All tunable tolerances, with their defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    /// symplecticity residual bound for block-assembled matrices
    pub eps_sym_assembled: f64,
    /// symplecticity residual bound for user-supplied matrices
    pub eps_sym_user: f64,
    /// relative SVD threshold for kernel ranks
    pub rank_tol: f64,
    /// eigenvalue clustering radius in the decomposer
    pub cluster_tol: f64,
    /// minimum precision budget (bits) for float-angle floor guards
    pub angle_precision_bits: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_sym_assembled: crate::forms::EPS_SYM_ASSEMBLED,
            eps_sym_user: crate::forms::EPS_SYM_USER,
            rank_tol: crate::oracle::RANK_TOL,
            cluster_tol: 1e-6,
            angle_precision_bits: 60,
        }
    }
}

impl Tolerances {
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value > 0.0) {
            return Err(SympathError::Domain(format!(
                "tolerance {name} must be positive, got {value}"
            )));
        }
        match name {
            "eps_sym_assembled" => self.eps_sym_assembled = value,
            "eps_sym_user" => self.eps_sym_user = value,
            "rank_tol" => self.rank_tol = value,
            "cluster_tol" => self.cluster_tol = value,
            "angle_precision_bits" => self.angle_precision_bits = value as u32,
            other => {
                return Err(SympathError::Domain(format!(
                    "unknown tolerance '{other}' (known: eps_sym_assembled, eps_sym_user, \
                     rank_tol, cluster_tol, angle_precision_bits)"
                )))
            }
        }
        Ok(())
    }
}

/// Envelope around every report payload.
#[derive(Clone, Debug, Serialize)]
pub struct ReportEnvelope<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub rng_seed: u64,
    pub tolerances: Tolerances,
    pub grid: serde_json::Value,
    pub payload: T,
}

impl<T: Serialize> ReportEnvelope<T> {
    pub fn new(
        command: impl Into<String>,
        rng_seed: u64,
        tolerances: Tolerances,
        grid: serde_json::Value,
        payload: T,
    ) -> Self {
        ReportEnvelope {
            tool: "sympath",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            rng_seed,
            tolerances,
            grid,
            payload,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// A tabular payload: fixed column order, one row per record.
#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.len());
            }
        }
        let mut out = String::new();
        for (i, c) in self.columns.iter().enumerate() {
            out.push_str(&format!("{:>w$}  ", c, w = widths[i]));
        }
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                out.push_str(&format!("{:>w$}  ", cell, w = widths[i]));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("cluster_tol", 1e-5).unwrap();
        assert_eq!(t.cluster_tol, 1e-5);
        assert!(t.set("cluster_tol", -1.0).is_err());
        assert!(t.set("nope", 1.0).is_err());
    }

    #[test]
    fn table_renders_stably() {
        let mut t = Table::new(vec!["m", "value"]);
        t.push(vec!["1".into(), "-5".into()]);
        t.push(vec!["10".into(), "-5".into()]);
        assert_eq!(t.to_csv(), "m,value\n1,-5\n10,-5\n");
        let text = t.to_text();
        assert!(text.contains("value"));
    }
}
