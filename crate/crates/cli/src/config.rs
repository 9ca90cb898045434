//! Analysis configuration (TOML). See `docs/formats.md`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Value;
use varconv::catalog::{builtin, parse_spec, parse_spec_value, FunctionSpec};
use varconv::graph::{Resolution, Shape, Window};
use varconv::oracles::TiltParams;

use crate::error::{CliError, CliResult};

pub const DEFAULT_EPS: f64 = 0.25;
pub const DEFAULT_VARCO_EPS: f64 = 0.005;
pub const DEFAULT_VARCO_RANGE: [f64; 2] = [-10.0, 10.0];

/// Default grid points per axis by dimension.
pub fn default_resolution(n: usize) -> usize {
    match n {
        1 => 201,
        2 => 41,
        _ => 15,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    u_radius: Option<f64>,
    v_radius: Option<f64>,
    rho: Option<f64>,
    shape: Option<Shape>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracles {
    growth: Option<bool>,
    monotone: Option<bool>,
    plain: Option<bool>,
    neighborhood: Option<bool>,
    prox: Option<bool>,
    minorant: Option<bool>,
    varco_empirical: Option<bool>,
    varco_eps: Option<f64>,
    varco_range: Option<[f64; 2]>,
    tilt_probe: Option<bool>,
    closedness: Option<bool>,
    numeric: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTilt {
    gamma: Option<f64>,
    v_radius: Option<f64>,
    tilts: Option<usize>,
    resolution: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    function: Value,
    anchor: Vec<f64>,
    subgradient: Vec<f64>,
    eps: Option<f64>,
    resolution: Option<usize>,
    anchor_levels: Option<usize>,
    s: Option<Vec<f64>>,
    #[serde(default)]
    window: RawWindow,
    #[serde(default)]
    oracles: RawOracles,
    #[serde(default)]
    tilt: RawTilt,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleToggles {
    pub growth: bool,
    pub monotone: bool,
    pub plain: bool,
    pub neighborhood: bool,
    pub prox: bool,
    pub minorant: bool,
    pub varco_empirical: bool,
    pub tilt_probe: bool,
    pub closedness: bool,
    pub numeric: bool,
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    /// How the function was given, echoed in reports.
    pub function_source: String,
    pub function: FunctionSpec,
    pub anchor: Vec<f64>,
    pub subgradient: Vec<f64>,
    pub eps: f64,
    pub resolution: Resolution,
    pub s: Vec<f64>,
    pub window: Window,
    pub oracles: OracleToggles,
    pub varco_eps: f64,
    pub varco_range: [f64; 2],
    pub tilt: TiltParams,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

/// Command-line overrides applied before validation.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub eps: Option<f64>,
    pub resolution: Option<usize>,
    pub s: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

pub fn parse_config_file(path: &Path, overrides: &Overrides) -> CliResult<AnalysisConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_config(&text, path.parent(), overrides)
}

/// Parses a config document; `base` resolves relative `file` references.
pub fn parse_config(text: &str, base: Option<&Path>, overrides: &Overrides) -> CliResult<AnalysisConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let (function_source, function) = resolve_function(&raw.function, base)?;
    let n = function.dim();
    for (field, v) in [("anchor", &raw.anchor), ("subgradient", &raw.subgradient)] {
        if v.len() != n {
            return Err(CliError::Config(format!(
                "field `{field}`: expected {n} coordinate(s) for a function on R^{n}, got {}",
                v.len()
            )));
        }
    }
    function
        .require_subgradient(&raw.anchor, &raw.subgradient)
        .map_err(|e| CliError::Config(format!("fields `anchor`/`subgradient`: {e}")))?;

    let eps = overrides.eps.or(raw.eps).unwrap_or(DEFAULT_EPS);
    positive("eps", eps)?;
    let per_axis = overrides
        .resolution
        .or(raw.resolution)
        .unwrap_or_else(|| default_resolution(n));
    let mut resolution = Resolution::for_dim(per_axis, n);
    if let Some(levels) = raw.anchor_levels {
        resolution.anchor_levels = levels;
    }
    resolution
        .validate()
        .map_err(|e| CliError::Config(format!("field `resolution`: {e}")))?;
    let s = overrides.s.clone().or(raw.s).unwrap_or_else(|| vec![0.0]);
    if s.is_empty() || s.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config("field `s`: need at least one finite value".into()));
    }

    let mut window = Window::localization(&function, &raw.anchor, &raw.subgradient, eps);
    if let Some(r) = raw.window.u_radius {
        positive("window.u_radius", r)?;
        window.x_radius = r;
    }
    if let Some(r) = raw.window.v_radius {
        positive("window.v_radius", r)?;
        window.v_radius = r;
    }
    if let Some(rho) = raw.window.rho {
        window.rho = rho;
    }
    if let Some(shape) = raw.window.shape {
        window.shape = shape;
    }
    window
        .validate(&function)
        .map_err(|e| CliError::Config(format!("table `window`: {e}")))?;

    let o = raw.oracles;
    let oracles = OracleToggles {
        growth: o.growth.unwrap_or(true),
        monotone: o.monotone.unwrap_or(true),
        plain: o.plain.unwrap_or(true),
        neighborhood: o.neighborhood.unwrap_or(true),
        prox: o.prox.unwrap_or(true),
        minorant: o.minorant.unwrap_or(true),
        varco_empirical: o.varco_empirical.unwrap_or(true),
        tilt_probe: o.tilt_probe.unwrap_or(true),
        closedness: o.closedness.unwrap_or(true),
        numeric: o.numeric.unwrap_or(true),
    };
    let varco_eps = o.varco_eps.unwrap_or(DEFAULT_VARCO_EPS);
    positive("oracles.varco_eps", varco_eps)?;
    let varco_range = o.varco_range.unwrap_or(DEFAULT_VARCO_RANGE);
    if !(varco_range[0] < varco_range[1]) {
        return Err(CliError::Config("field `oracles.varco_range`: need lo < hi".into()));
    }

    let defaults = TiltParams::default();
    let tilt = TiltParams {
        gamma: raw.tilt.gamma.unwrap_or(defaults.gamma),
        v_radius: raw.tilt.v_radius.unwrap_or(defaults.v_radius),
        tilts_per_axis: raw.tilt.tilts.unwrap_or(defaults.tilts_per_axis),
        x_per_axis: raw.tilt.resolution.unwrap_or(defaults.x_per_axis),
    };
    tilt.validate()
        .map_err(|e| CliError::Config(format!("table `tilt`: {e}")))?;

    Ok(AnalysisConfig {
        function_source,
        function,
        anchor: raw.anchor,
        subgradient: raw.subgradient,
        eps,
        resolution,
        s,
        window,
        oracles,
        varco_eps,
        varco_range,
        tilt,
        output_path: overrides.out.clone().or(raw.output.path),
        format: overrides.format.or(raw.output.format).unwrap_or(Format::Json),
    })
}

fn positive(field: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("field `{field}`: must be positive, got {v}")))
    }
}

fn resolve_function(v: &Value, base: Option<&Path>) -> CliResult<(String, FunctionSpec)> {
    let wrap = |e: varconv::Error| CliError::Config(format!("field `function`: {e}"));
    match v {
        Value::String(name) => Ok((format!("builtin {name}"), builtin(name).map_err(wrap)?)),
        Value::Table(t) if t.contains_key("builtin") => {
            let name = t["builtin"]
                .as_str()
                .ok_or_else(|| CliError::Config("field `function.builtin`: not a string".into()))?;
            Ok((format!("builtin {name}"), builtin(name).map_err(wrap)?))
        }
        Value::Table(t) if t.contains_key("file") => {
            let rel = t["file"]
                .as_str()
                .ok_or_else(|| CliError::Config("field `function.file`: not a string".into()))?;
            let path = base.map_or_else(|| PathBuf::from(rel), |b| b.join(rel));
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
            Ok((format!("file {rel}"), parse_spec(&text).map_err(wrap)?))
        }
        Value::Table(_) => Ok(("inline spec".into(), parse_spec_value(v).map_err(wrap)?)),
        _ => Err(CliError::Config(
            "field `function`: expected a builtin name, {builtin}, {file} or an inline spec table".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_filled() {
        let c = parse_config(
            "function = \"f1_neg_quartic\"\nanchor = [0.0]\nsubgradient = [0.0]\n",
            None,
            &Overrides::default(),
        )
        .unwrap();
        assert_eq!(c.eps, 0.25);
        assert_eq!(c.resolution.per_axis, 201);
        assert_eq!(c.s, vec![0.0]);
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.window.rho, 0.25);
    }

    #[test]
    fn orthant_anchor_is_accepted() {
        let c = parse_config(
            "function = { builtin = \"orthant_quad(2,3)\" }\nanchor = [0.0, 0.0]\nsubgradient = [0.0, 0.0]\n",
            None,
            &Overrides::default(),
        )
        .unwrap();
        assert_eq!(c.resolution.per_axis, 41);
    }

    #[test]
    fn bad_subgradient_is_rejected() {
        let e = parse_config(
            "function = \"f2_zero\"\nanchor = [0.0]\nsubgradient = [0.5]\n",
            None,
            &Overrides::default(),
        )
        .unwrap_err();
        assert!(e.to_string().contains("not a subgradient"), "{e}");
    }

    #[test]
    fn unknown_fields_are_reported_with_location() {
        let e = parse_config(
            "function = \"abs\"\nanchor = [0.0]\nsubgradient = [0.0]\nepsilon = 0.1\n",
            None,
            &Overrides::default(),
        )
        .unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("epsilon") && msg.contains("line 4"), "{msg}");
    }
}
