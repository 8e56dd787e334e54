//! Run configuration: a flat `key = value` file with `[section]` headers,
//! overridden by `--key value` flags on the command line.
//!
//! Sections only group keys, except that a section named after a command
//! applies to that command alone. Keys carry their unit as a suffix
//! (`l_max_nm`, `v_rms_mv`, `temperature_k`, ...).

use std::path::{Path, PathBuf};

use patchforce::{Error, ParamMap};

use crate::error::CliError;

pub const COMMANDS: &[&str] = &[
    "spectrum",
    "correlation",
    "pressure",
    "casimir",
    "fit",
    "sensitivity",
    "simulate",
    "validate",
];

#[derive(Debug)]
pub struct RunConfig {
    pub command: String,
    pub params: ParamMap,
    pub output: Option<PathBuf>,
}

/// Parses config text, keeping keys from unnamed sections, generic sections
/// and the section named `command`.
pub fn parse_config(text: &str, command: &str) -> Result<Vec<(String, String, usize)>, Error> {
    let mut out: Vec<(String, String, usize)> = Vec::new();
    let mut active = true;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse { line: line_no, reason: format!("unterminated section header `{line}`") })?
                .trim();
            active = !COMMANDS.contains(&name) || name == command;
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: line_no, reason: format!("expected `key = value`, got `{line}`") })?;
        let key = key.trim().to_ascii_lowercase();
        if key.is_empty() {
            return Err(Error::Parse { line: line_no, reason: "empty key".into() });
        }
        if !active {
            continue;
        }
        if let Some((_, _, first)) = out.iter().find(|(k, _, _)| *k == key) {
            return Err(Error::Parse { line: line_no, reason: format!("`{key}` already set on line {first}") });
        }
        out.push((key, value.trim().to_string(), line_no));
    }
    Ok(out)
}

/// Splits `--key value`, `--key=value` and bare boolean `--flag` tokens.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let tok = &args[i];
        let key = tok
            .strip_prefix("--")
            .ok_or_else(|| CliError::usage(format!("expected `--key value`, got `{tok}`")))?;
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.to_string(), v.to_string()));
            i += 1;
        } else if i + 1 < args.len() && !is_flag(&args[i + 1]) {
            out.push((key.to_string(), args[i + 1].clone()));
            i += 2;
        } else {
            out.push((key.to_string(), "true".to_string()));
            i += 1;
        }
    }
    Ok(out)
}

fn is_flag(s: &str) -> bool {
    s.starts_with("--") && s.len() > 2 && !s[2..].starts_with(|c: char| c.is_ascii_digit() || c == '.')
}

impl RunConfig {
    /// `--config` and `--output` may also appear among the overrides.
    pub fn load(
        command: &str,
        config: Option<&Path>,
        output: Option<PathBuf>,
        overrides: &[String],
    ) -> Result<Self, CliError> {
        let mut config = config.map(Path::to_path_buf);
        let mut output = output;
        let mut pairs = Vec::new();
        for (k, v) in parse_overrides(overrides)? {
            let slot = match k.as_str() {
                "config" => &mut config,
                "output" => &mut output,
                _ => {
                    pairs.push((k, v));
                    continue;
                }
            };
            if slot.is_some() {
                return Err(CliError::usage(format!("--{k} given twice")));
            }
            *slot = Some(PathBuf::from(v));
        }
        let mut params = ParamMap::new();
        if let Some(path) = &config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
            for (k, v, _) in parse_config(&text, command).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))? {
                params.insert(k, v);
            }
        }
        for (k, v) in pairs {
            params.insert(k, v);
        }
        if let Some(out) = &output {
            if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                if !parent.is_dir() {
                    return Err(CliError::io(format!("output directory {} does not exist", parent.display())));
                }
            }
        }
        Ok(RunConfig { command: command.to_string(), params, output })
    }

    /// Path-valued key, checked to exist before any computation.
    pub fn input_path(&self, key: &str) -> Result<Option<PathBuf>, CliError> {
        match self.params.get_str(key) {
            None => Ok(None),
            Some(p) => {
                let path = PathBuf::from(p.trim());
                if path.is_file() {
                    Ok(Some(path))
                } else {
                    Err(CliError::io(format!("{key}: file {} not found", path.display())))
                }
            }
        }
    }

    pub fn require_input_path(&self, key: &str) -> Result<PathBuf, CliError> {
        self.input_path(key)?
            .ok_or_else(|| CliError::usage(format!("invalid {key}: required file path missing")))
    }

    /// Rejects keys that no part of the command read.
    pub fn finish(&self) -> Result<(), CliError> {
        check_unused(&self.command, &self.params)
    }
}

pub fn check_unused(command: &str, params: &ParamMap) -> Result<(), CliError> {
    let unused = params.unused();
    if unused.is_empty() {
        Ok(())
    } else {
        Err(CliError::usage(format!("unknown parameter(s) for `{command}`: {}", unused.join(", "))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Length,
    Wavenumber,
}

impl Quantity {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Quantity::Length => &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("nm", 1e-9)],
            Quantity::Wavenumber => &[("per_m", 1.0), ("per_um", 1e6), ("per_nm", 1e9)],
        }
    }
}

/// A grid given either as a list `<base>_<unit> = a, b, ...` or as
/// `<base>_start_<unit>`, `<base>_stop_<unit>`, `<base>_points` and
/// `<base>_spacing = linear | log`. Must be strictly increasing; `positive`
/// additionally excludes zero.
pub fn grid(
    p: &ParamMap,
    base: &str,
    q: Quantity,
    positive: bool,
    default: Option<Vec<f64>>,
) -> Result<Vec<f64>, Error> {
    let mut list: Option<Vec<f64>> = None;
    for (suffix, scale) in q.units() {
        if let Some(v) = p.f64_list(&format!("{base}_{suffix}"))? {
            if list.is_some() {
                return Err(Error::Invalid { field: base.into(), reason: "given in more than one unit".into() });
            }
            list = Some(v.into_iter().map(|x| x * scale).collect());
        }
    }
    let scalar = |name: &str| -> Result<Option<f64>, Error> {
        let mut found = None;
        for (suffix, scale) in q.units() {
            if let Some(v) = p.f64(&format!("{base}_{name}_{suffix}"))? {
                if found.is_some() {
                    return Err(Error::Invalid { field: format!("{base}_{name}"), reason: "given in more than one unit".into() });
                }
                found = Some(v * scale);
            }
        }
        Ok(found)
    };
    let (lo, hi) = (scalar("start")?, scalar("stop")?);
    let points = p.usize(&format!("{base}_points"))?;
    let spacing = p.get_str(&format!("{base}_spacing")).map(str::to_string);
    let values = match (list, lo, hi) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(Error::Invalid { field: base.into(), reason: "give either a list or start/stop, not both".into() })
        }
        (Some(v), None, None) => v,
        (None, Some(a), Some(b)) => {
            let n = points.unwrap_or(50);
            if n < 2 {
                return Err(Error::Invalid { field: format!("{base}_points"), reason: "need at least 2 points".into() });
            }
            match spacing.as_deref().unwrap_or("linear") {
                "linear" => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
                "log" => {
                    if !(a > 0.0) {
                        return Err(Error::Invalid { field: format!("{base}_start"), reason: "log spacing needs a positive start".into() });
                    }
                    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
                }
                other => {
                    return Err(Error::Invalid {
                        field: format!("{base}_spacing"),
                        reason: format!("expected `linear` or `log`, got `{other}`"),
                    })
                }
            }
        }
        (None, None, None) => match default {
            Some(v) => v,
            None => {
                return Err(Error::Invalid {
                    field: base.into(),
                    reason: format!("required grid missing (give `{base}_<unit>` list or `{base}_start_<unit>`/`{base}_stop_<unit>`)"),
                })
            }
        },
        _ => return Err(Error::Invalid { field: base.into(), reason: "give both start and stop".into() }),
    };
    if values.is_empty() {
        return Err(Error::Invalid { field: base.into(), reason: "grid is empty".into() });
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0 || (positive && *v == 0.0)) {
        let what = if positive { "positive" } else { "non-negative" };
        return Err(Error::Invalid { field: base.into(), reason: format!("values must be {what}") });
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid { field: base.into(), reason: "values must be strictly increasing".into() });
    }
    Ok(values)
}
