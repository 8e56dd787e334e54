//! String-keyed parameter sets with unit-suffixed keys.
//!
//! A physical field `base` may be given under any of its unit spellings, e.g.
//! `l_max_nm`, `l_max_um` or `l_max_m`; values are converted to SI on read.
//! Every key read is recorded so callers can reject unknown keys.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

const LENGTH_UNITS: &[(&str, f64)] = &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("nm", 1e-9)];
const VOLTAGE_UNITS: &[(&str, f64)] = &[("v", 1.0), ("mv", 1e-3)];
const WAVENUMBER_UNITS: &[(&str, f64)] = &[("per_m", 1.0), ("per_um", 1e6), ("per_nm", 1e9)];

#[derive(Debug, Default, Clone)]
pub struct ParamMap {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl ParamMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.values.insert(normalize_key(&key.into()), value.into());
        self
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.insert(key, value.to_string());
        self
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(&normalize_key(key))
    }

    pub fn keys(&self) -> impl Iterator<Item = &String> {
        self.values.keys()
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        let key = normalize_key(key);
        let v = self.values.get(&key)?;
        self.used.borrow_mut().insert(key);
        Some(v.as_str())
    }

    pub fn require_str(&self, key: &str) -> Result<&str> {
        self.get_str(key).ok_or_else(|| Error::invalid(key, "required parameter missing"))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get_str(key) {
            None => Ok(None),
            Some(s) => s
                .trim()
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::invalid(key, format!("expected a number, got `{s}`"))),
        }
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| Error::invalid(key, "required parameter missing"))
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        match self.get_str(key) {
            None => Ok(None),
            Some(s) => s
                .trim()
                .parse::<usize>()
                .map(Some)
                .map_err(|_| Error::invalid(key, format!("expected a non-negative integer, got `{s}`"))),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        Ok(self.usize(key)?.map(|v| v as u64))
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>> {
        match self.get_str(key) {
            None => Ok(None),
            Some(s) => match s.trim() {
                "" | "true" | "yes" | "1" | "on" => Ok(Some(true)),
                "false" | "no" | "0" | "off" => Ok(Some(false)),
                other => Err(Error::invalid(key, format!("expected a boolean, got `{other}`"))),
            },
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get_str(key) {
            None => Ok(None),
            Some(s) => s
                .split(|c| c == ',' || c == ' ')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::invalid(key, format!("expected a list of numbers, got `{s}`")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    /// Length in meters from `base_m`, `base_mm`, `base_um` or `base_nm`.
    pub fn length(&self, base: &str) -> Result<Option<f64>> {
        self.with_units(base, LENGTH_UNITS)
    }

    pub fn require_length(&self, base: &str) -> Result<f64> {
        self.length(base)?.ok_or_else(|| missing(base, LENGTH_UNITS))
    }

    /// Voltage in volts from `base_v` or `base_mv`.
    pub fn voltage(&self, base: &str) -> Result<Option<f64>> {
        self.with_units(base, VOLTAGE_UNITS)
    }

    pub fn require_voltage(&self, base: &str) -> Result<f64> {
        self.voltage(base)?.ok_or_else(|| missing(base, VOLTAGE_UNITS))
    }

    /// Wavenumber in 1/m from `base_per_m`, `base_per_um` or `base_per_nm`.
    pub fn wavenumber(&self, base: &str) -> Result<Option<f64>> {
        self.with_units(base, WAVENUMBER_UNITS)
    }

    pub fn require_wavenumber(&self, base: &str) -> Result<f64> {
        self.wavenumber(base)?.ok_or_else(|| missing(base, WAVENUMBER_UNITS))
    }

    /// Lengths listed under `base_<unit>`, converted to meters.
    pub fn length_list(&self, base: &str) -> Result<Option<Vec<f64>>> {
        let mut found = None;
        for (suffix, scale) in LENGTH_UNITS {
            let key = format!("{base}_{suffix}");
            if let Some(list) = self.f64_list(&key)? {
                if found.is_some() {
                    return Err(Error::invalid(base, "given in more than one unit"));
                }
                found = Some(list.into_iter().map(|v| v * scale).collect());
            }
        }
        Ok(found)
    }

    fn with_units(&self, base: &str, units: &[(&str, f64)]) -> Result<Option<f64>> {
        let mut found: Option<f64> = None;
        for (suffix, scale) in units {
            let key = format!("{base}_{suffix}");
            if let Some(v) = self.f64(&key)? {
                if found.is_some() {
                    return Err(Error::invalid(base, "given in more than one unit"));
                }
                found = Some(v * scale);
            }
        }
        Ok(found)
    }

    /// Keys that were present but never read.
    pub fn unused(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.values.keys().filter(|k| !used.contains(*k)).cloned().collect()
    }
}

fn normalize_key(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('-', "_").to_ascii_lowercase()
}

fn missing(base: &str, units: &[(&str, f64)]) -> Error {
    let spellings: Vec<String> = units.iter().map(|(s, _)| format!("{base}_{s}")).collect();
    Error::invalid(base, format!("required parameter missing (one of {})", spellings.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_conversion() {
        let p = ParamMap::new().with("l_max_nm", 2476).with("v_rms_mv", 9.2).with("k_min_per_um", 20.9);
        assert!((p.require_length("l_max").unwrap() - 2476e-9).abs() < 1e-20);
        assert!((p.require_voltage("v_rms").unwrap() - 9.2e-3).abs() < 1e-15);
        assert!((p.require_wavenumber("k_min").unwrap() - 20.9e6).abs() < 1e-6);
        assert!(p.unused().is_empty());
    }

    #[test]
    fn dashes_and_case_are_normalized() {
        let p = ParamMap::new().with("--L-Max-um", 1.5);
        assert!((p.require_length("l_max").unwrap() - 1.5e-6).abs() < 1e-18);
    }

    #[test]
    fn conflicting_units_rejected() {
        let p = ParamMap::new().with("l_max_nm", 1).with("l_max_um", 1);
        assert!(p.length("l_max").is_err());
    }

    #[test]
    fn unused_keys_reported() {
        let p = ParamMap::new().with("a", 1).with("b", 2);
        p.f64("a").unwrap();
        assert_eq!(p.unused(), vec!["b".to_string()]);
    }

    #[test]
    fn missing_names_field() {
        let err = ParamMap::new().require_voltage("v_rms").unwrap_err();
        assert!(err.to_string().contains("v_rms_mv"));
    }
}
