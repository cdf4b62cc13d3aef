//! JSON experiment configuration.
//!
//! The document is a flat object; lattice parameters sit next to the run
//! settings. Unknown keys are rejected and every error carries the key path.
//!
//! ```json
//! {
//!   "name": "fig1d",
//!   "model": "nonreciprocal",
//!   "n_cells": 100, "kappa": 1.4142135623730951, "nu": 1.0,
//!   "gamma0": 0.0, "gammas": 1.3228756555322954,
//!   "i_in": 1000.0,
//!   "outputs": ["averages", "period", "heatmap"]
//! }
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::evolve::{default_stride, step_grid, DEFAULT_DT, DEFAULT_WINDOW};
use crate::lattice::LatticeParams;
use crate::{Error, Result};

pub const DEFAULT_I_SAT: f64 = 1.0;
pub const DEFAULT_T_FINAL: f64 = 100.0;
pub const DEFAULT_NAME: &str = "experiment";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Nonreciprocal,
    Hermitian,
    Creutz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Trajectory,
    Averages,
    Period,
    Heatmap,
    Spectrum,
    Defect,
}

impl OutputKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputKind::Trajectory => "trajectory",
            OutputKind::Averages => "averages",
            OutputKind::Period => "period",
            OutputKind::Heatmap => "heatmap",
            OutputKind::Spectrum => "spectrum",
            OutputKind::Defect => "defect",
        }
    }

    /// Outputs computed from a time evolution.
    pub fn needs_trajectory(self) -> bool {
        matches!(
            self,
            OutputKind::Trajectory | OutputKind::Averages | OutputKind::Period | OutputKind::Heatmap
        )
    }
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    #[serde(rename = "i_in")]
    IIn,
    Kappa,
    Nu,
    Gamma0,
    Gammas,
    #[serde(rename = "i_sat")]
    ISat,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::IIn => "i_in",
            SweepParam::Kappa => "kappa",
            SweepParam::Nu => "nu",
            SweepParam::Gamma0 => "gamma0",
            SweepParam::Gammas => "gammas",
            SweepParam::ISat => "i_sat",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

impl SweepAxis {
    /// Sweep points from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                if k == 0 {
                    return self.min;
                }
                if k + 1 == n {
                    return self.max;
                }
                let f = k as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + f * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

/// A validated experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub model: ModelKind,
    pub params: LatticeParams,
    pub i_in: f64,
    pub t_final: f64,
    pub dt: f64,
    /// `None` picks [`default_stride`] for the step count.
    pub stride: Option<usize>,
    pub window: (f64, f64),
    pub sweep: Option<SweepAxis>,
    pub outputs: Vec<OutputKind>,
    /// Adds `Re`/`Im` amplitude columns to trajectory CSVs.
    pub amplitudes: bool,
}

/// On-disk form, one key per field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    name: Option<String>,
    model: ModelKind,
    n_cells: usize,
    kappa: f64,
    nu: f64,
    gamma0: f64,
    gammas: f64,
    #[serde(default)]
    i_sat: Option<f64>,
    i_in: f64,
    #[serde(default)]
    t_final: Option<f64>,
    #[serde(default)]
    dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stride: Option<usize>,
    #[serde(default)]
    window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepAxis>,
    #[serde(default)]
    outputs: Vec<OutputKind>,
    #[serde(default)]
    amplitudes: bool,
}

impl ExperimentConfig {
    /// Configuration with defaults for everything but the physics.
    pub fn new(name: &str, model: ModelKind, params: LatticeParams, i_in: f64) -> Self {
        ExperimentConfig {
            name: name.to_string(),
            model,
            params,
            i_in,
            t_final: DEFAULT_T_FINAL,
            dt: DEFAULT_DT,
            stride: None,
            window: DEFAULT_WINDOW,
            sweep: None,
            outputs: Vec::new(),
            amplitudes: false,
        }
    }

    pub fn effective_stride(&self) -> usize {
        match self.stride {
            Some(s) => s,
            None => step_grid(self.t_final, self.dt)
                .map(|(n, _)| default_stride(n))
                .unwrap_or(1),
        }
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    /// Parameters with the sweep axis set to `value`.
    pub fn at_point(&self, param: SweepParam, value: f64) -> (LatticeParams, f64) {
        let mut p = self.params;
        let mut i_in = self.i_in;
        match param {
            SweepParam::IIn => i_in = value,
            SweepParam::Kappa => p.kappa = value,
            SweepParam::Nu => p.nu = value,
            SweepParam::Gamma0 => p.gamma0 = value,
            SweepParam::Gammas => p.gammas = value,
            SweepParam::ISat => p.i_sat = value,
        }
        (p, i_in)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = Error::config;
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            return Err(bad(
                "name",
                format!("`{}` must be non-empty and use only [A-Za-z0-9._-]", self.name),
            ));
        }
        validate_params(&self.params, "")?;
        if !(self.i_in >= 0.0) || !self.i_in.is_finite() {
            return Err(bad("i_in", format!("must be finite and >= 0, got {}", self.i_in)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(bad("dt", format!("must be finite and > 0, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt) || !self.t_final.is_finite() {
            return Err(bad(
                "t_final",
                format!("must be finite and >= dt = {}, got {}", self.dt, self.t_final),
            ));
        }
        if self.stride == Some(0) {
            return Err(Error::config("stride", "must be >= 1"));
        }
        let (w0, w1) = self.window;
        if !(0.0 <= w0 && w0 < w1 && w1 <= self.t_final) {
            return Err(bad(
                "window",
                format!(
                    "need 0 <= start < end <= t_final = {}, got [{w0}, {w1}]",
                    self.t_final
                ),
            ));
        }
        if let Some(axis) = &self.sweep {
            self.validate_sweep(axis)?;
        }
        Ok(())
    }

    fn validate_sweep(&self, axis: &SweepAxis) -> Result<()> {
        let bad = Error::config;
        if axis.count < 2 {
            return Err(bad("sweep.count", format!("must be >= 2, got {}", axis.count)));
        }
        if !axis.min.is_finite() || !axis.max.is_finite() || !(axis.min < axis.max) {
            return Err(bad(
                "sweep",
                format!("need finite min < max, got [{}, {}]", axis.min, axis.max),
            ));
        }
        if axis.spacing == Spacing::Log && !(axis.min > 0.0) {
            return Err(Error::config("sweep.min", "log spacing needs min > 0"));
        }
        // every constraint is an interval in one coordinate, so the ends suffice
        for (key, value) in [("sweep.min", axis.min), ("sweep.max", axis.max)] {
            let (p, i_in) = self.at_point(axis.param, value);
            if !(i_in >= 0.0) {
                return Err(bad(key, format!("i_in = {i_in} must be >= 0")));
            }
            validate_params(&p, key)?;
        }
        Ok(())
    }

    fn to_raw(&self) -> RawConfig {
        let p = &self.params;
        RawConfig {
            name: Some(self.name.clone()),
            model: self.model,
            n_cells: p.n_cells,
            kappa: p.kappa,
            nu: p.nu,
            gamma0: p.gamma0,
            gammas: p.gammas,
            i_sat: Some(p.i_sat),
            i_in: self.i_in,
            t_final: Some(self.t_final),
            dt: Some(self.dt),
            stride: self.stride,
            window: Some([self.window.0, self.window.1]),
            sweep: self.sweep,
            outputs: self.outputs.clone(),
            amplitudes: self.amplitudes,
        }
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let params = LatticeParams {
            n_cells: raw.n_cells,
            kappa: raw.kappa,
            nu: raw.nu,
            gamma0: raw.gamma0,
            gammas: raw.gammas,
            i_sat: raw.i_sat.unwrap_or(DEFAULT_I_SAT),
        };
        let mut outputs = Vec::new();
        for o in raw.outputs {
            if !outputs.contains(&o) {
                outputs.push(o);
            }
        }
        let window = raw.window.map(|[a, b]| (a, b)).unwrap_or(DEFAULT_WINDOW);
        let config = ExperimentConfig {
            name: raw.name.unwrap_or_else(|| DEFAULT_NAME.to_string()),
            model: raw.model,
            params,
            i_in: raw.i_in,
            t_final: raw.t_final.unwrap_or(DEFAULT_T_FINAL),
            dt: raw.dt.unwrap_or(DEFAULT_DT),
            stride: raw.stride,
            window,
            sweep: raw.sweep,
            outputs,
            amplitudes: raw.amplitudes,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("config serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_raw()).expect("config serializes")
    }
}

fn validate_params(p: &LatticeParams, prefix: &str) -> Result<()> {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix} ({k})")
        }
    };
    let bad = |k: &str, msg: String| Err(Error::config(key(k), msg));
    for (k, v) in [
        ("kappa", p.kappa),
        ("nu", p.nu),
        ("gamma0", p.gamma0),
        ("gammas", p.gammas),
        ("i_sat", p.i_sat),
    ] {
        if !v.is_finite() {
            return bad(k, format!("must be finite, got {v}"));
        }
    }
    if p.n_cells == 0 {
        return bad("n_cells", "must be >= 1".into());
    }
    if !(p.nu > 0.0) {
        return bad("nu", format!("must be > 0, got {}", p.nu));
    }
    if !(p.kappa > p.nu) {
        return bad("kappa", format!("must exceed nu = {}, got {}", p.nu, p.kappa));
    }
    if !(p.gamma0 >= 0.0) {
        return bad("gamma0", format!("must be >= 0, got {}", p.gamma0));
    }
    if !(p.gamma0 <= p.gammas) {
        return bad(
            "gamma0",
            format!("gamma0 = {} must not exceed gammas = {}", p.gamma0, p.gammas),
        );
    }
    if !(p.gammas <= p.kappa) {
        return bad(
            "gammas",
            format!("gammas = {} must not exceed kappa = {}", p.gammas, p.kappa),
        );
    }
    if !(p.i_sat > 0.0) {
        return bad("i_sat", format!("must be > 0, got {}", p.i_sat));
    }
    p.validate().map_err(|e| Error::config(key("params"), e.to_string()))
}

/// Parses and validates a JSON document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(path, e.into_inner().to_string())
    })?;
    ExperimentConfig::from_raw(raw)
}

pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": "nonreciprocal", "n_cells": 100, "kappa": 1.4142135623730951,
        "nu": 1.0, "gamma0": 0.0, "gammas": 1.3228756555322954, "i_in": 1000.0
    }"#;

    #[test]
    fn minimal_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.dt, 1e-3);
        assert_eq!(c.t_final, 100.0);
        assert_eq!(c.window, (50.0, 100.0));
        assert_eq!(c.params.i_sat, 1.0);
        assert_eq!(c.name, "experiment");
        assert_eq!(c.effective_stride(), 50);
        assert!(c.sweep.is_none() && c.outputs.is_empty());
    }

    #[test]
    fn unknown_key_reports_path() {
        let text = MINIMAL.replace("\"i_in\"", "\"bogus\": 1, \"i_in\"");
        match parse_config(&text) {
            Err(Error::Config { message, .. }) => assert!(message.contains("bogus"), "{message}"),
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace(
            "\"i_in\": 1000.0",
            "\"i_in\": 1000.0, \"sweep\": {\"param\": \"i_in\", \"min\": 1, \"max\": 2, \"count\": \"x\"}",
        );
        match parse_config(&text) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "sweep.count"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invariant_violation_names_key() {
        let text = MINIMAL.replace("\"gamma0\": 0.0", "\"gamma0\": 1.5");
        match parse_config(&text) {
            Err(Error::Config { path, message }) => {
                assert_eq!(path, "gamma0");
                assert!(message.contains("gammas"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(parse_config("{"), Err(Error::Config { .. })));
    }

    #[test]
    fn sweep_checks() {
        let with = |s: &str| MINIMAL.replace("\"i_in\": 1000.0", &format!("\"i_in\": 1000.0, \"sweep\": {s}"));
        let ok = parse_config(&with(r#"{"param": "i_in", "min": 10, "max": 10000, "count": 4}"#)).unwrap();
        let v = ok.sweep.unwrap().values();
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], 10.0);
        assert_eq!(v[3], 10000.0);
        assert!((v[1] - 100.0).abs() < 1e-10);
        assert!(parse_config(&with(r#"{"param": "i_in", "min": 10, "max": 100, "count": 1}"#)).is_err());
        assert!(parse_config(&with(r#"{"param": "n_cells", "min": 10, "max": 100, "count": 3}"#)).is_err());
        assert!(parse_config(&with(r#"{"param": "gammas", "min": 0.1, "max": 1.5, "count": 3}"#)).is_err());
        assert!(parse_config(&with(r#"{"param": "gamma0", "min": 0, "max": 1, "count": 3}"#)).is_err());
        let lin = parse_config(&with(
            r#"{"param": "gamma0", "min": 0, "max": 1, "count": 3, "spacing": "linear"}"#,
        ))
        .unwrap();
        assert_eq!(lin.sweep.unwrap().values(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn round_trip() {
        let mut c = parse_config(MINIMAL).unwrap();
        c.outputs = vec![OutputKind::Averages, OutputKind::Heatmap];
        c.stride = Some(7);
        c.sweep = Some(SweepAxis {
            param: SweepParam::IIn,
            min: 10.0,
            max: 1e4,
            count: 25,
            spacing: Spacing::Log,
        });
        assert_eq!(parse_config(&c.to_json()).unwrap(), c);
    }
}
