//! Tabulated optical data `(energy eV, ε′, ε″)`.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalRow {
    /// Photon energy ħω in eV.
    pub energy: f64,
    pub eps_real: f64,
    pub eps_imag: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpticalDataTable {
    rows: Vec<OpticalRow>,
    pub source: String,
}

impl OpticalDataTable {
    /// Energies must increase strictly and `ε″ ≥ 0`; at least two rows.
    pub fn new(rows: Vec<OpticalRow>, source: impl Into<String>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::invalid("optical table", "needs at least two rows"));
        }
        for (i, r) in rows.iter().enumerate() {
            if !(r.energy > 0.0 && r.energy.is_finite() && r.eps_real.is_finite() && r.eps_imag.is_finite()) {
                return Err(Error::invalid("optical table", format!("row {i}: non-finite or non-positive energy")));
            }
            if r.eps_imag < 0.0 {
                return Err(Error::invalid("optical table", format!("row {i}: eps_imag = {} < 0", r.eps_imag)));
            }
        }
        if let Some(i) = rows.windows(2).position(|w| w[1].energy <= w[0].energy) {
            return Err(Error::invalid(
                "optical table",
                format!("energies must increase strictly (rows {} and {})", i, i + 1),
            ));
        }
        Ok(OpticalDataTable {
            rows,
            source: source.into(),
        })
    }

    /// Parses three whitespace- or comma-separated columns; `#` starts a comment.
    pub fn parse(text: &str, source: impl Into<String>) -> Result<Self> {
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: n + 1,
                    reason: format!("expected 3 columns (energy_eV, eps_real, eps_imag), found {}", fields.len()),
                });
            }
            let mut v = [0.0; 3];
            for (slot, f) in v.iter_mut().zip(&fields) {
                *slot = f.parse().map_err(|_| Error::Parse {
                    line: n + 1,
                    reason: format!("`{f}` is not a number"),
                })?;
            }
            rows.push(OpticalRow {
                energy: v[0],
                eps_real: v[1],
                eps_imag: v[2],
            });
            lines.push(n + 1);
        }
        Self::new(rows, source).map_err(|e| match e {
            Error::Invalid { reason, .. } => Error::Parse {
                line: lines.last().copied().unwrap_or(0),
                reason,
            },
            other => other,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.display().to_string())
    }

    pub fn rows(&self) -> &[OpticalRow] {
        &self.rows
    }

    pub fn energy_range(&self) -> (f64, f64) {
        (self.rows[0].energy, self.rows[self.rows.len() - 1].energy)
    }
}
