//! Scenario documents: strict-key JSON describing one model run.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::integrator::IntegratorConfig;
use crate::model::{ModelKind, Parameters, SirParameters, SisParameters};
use crate::trajectory::TimeGrid;

pub const DEFAULT_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub parameters: Parameters,
    pub grid: TimeGrid,
    pub integrator: IntegratorConfig,
    /// Threshold on the infective discrepancy used for horizons.
    pub eps: f64,
}

impl ScenarioConfig {
    pub fn model(&self) -> ModelKind {
        self.parameters.kind()
    }

    pub fn validate(&self) -> Result<()> {
        self.parameters.validate()?;
        self.grid.validate()?;
        self.integrator.validate()?;
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::validation("eps", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// On-disk layout. Exactly one of `sis` / `sir` matches `model`.
#[derive(Debug, Serialize, Deserialize)]
struct Document {
    model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sis: Option<SisParameters>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sir: Option<SirParameters>,
    grid: TimeGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    integrator: Option<IntegratorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
}

const TOP_KEYS: &[&str] = &["model", "sis", "sir", "grid", "integrator", "eps"];
const SIS_KEYS: &[&str] = &["r", "alpha", "k", "i0"];
const SIR_KEYS: &[&str] = &["beta", "mu", "s0", "i0"];
const GRID_KEYS: &[&str] = &["t_start", "t_end", "n_points"];
const INTEGRATOR_KEYS: &[&str] = &["dt", "halving_check", "tolerance"];

fn unknown_keys(value: &Value) -> Vec<String> {
    let mut unknown = Vec::new();
    let Some(top) = value.as_object() else {
        return unknown;
    };
    for (key, child) in top {
        let allowed = match key.as_str() {
            "sis" => SIS_KEYS,
            "sir" => SIR_KEYS,
            "grid" => GRID_KEYS,
            "integrator" => INTEGRATOR_KEYS,
            k if TOP_KEYS.contains(&k) => continue,
            _ => {
                unknown.push(key.clone());
                continue;
            }
        };
        if let Some(obj) = child.as_object() {
            unknown.extend(
                obj.keys()
                    .filter(|k| !allowed.contains(&k.as_str()))
                    .map(|k| format!("{key}.{k}")),
            );
        }
    }
    unknown
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let value: Value = serde_json::from_str(text).map_err(parse_error)?;
    if !value.is_object() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "scenario must be a JSON object".into(),
        });
    }
    let unknown = unknown_keys(&value);
    if !unknown.is_empty() {
        return Err(Error::UnknownKeys(unknown));
    }
    // Re-parse from text so type errors carry a position.
    let doc: Document = serde_json::from_str(text).map_err(parse_error)?;

    let parameters = match (doc.model, doc.sis, doc.sir) {
        (ModelKind::Sis, Some(p), None) => Parameters::Sis(p),
        (ModelKind::Sir, None, Some(p)) => Parameters::Sir(p),
        (ModelKind::Sis, _, Some(_)) => {
            return Err(Error::validation(
                "sir",
                "block not allowed when model is \"sis\"",
            ))
        }
        (ModelKind::Sir, Some(_), _) => {
            return Err(Error::validation(
                "sis",
                "block not allowed when model is \"sir\"",
            ))
        }
        (ModelKind::Sis, None, None) => {
            return Err(Error::validation(
                "sis",
                "block required when model is \"sis\"",
            ))
        }
        (ModelKind::Sir, None, None) => {
            return Err(Error::validation(
                "sir",
                "block required when model is \"sir\"",
            ))
        }
    };
    let cfg = ScenarioConfig {
        parameters,
        grid: doc.grid,
        integrator: doc.integrator.unwrap_or_default(),
        eps: doc.eps.unwrap_or(DEFAULT_EPS),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn document(cfg: &ScenarioConfig) -> Document {
    let (sis, sir) = match cfg.parameters {
        Parameters::Sis(p) => (Some(p), None),
        Parameters::Sir(p) => (None, Some(p)),
    };
    Document {
        model: cfg.model(),
        sis,
        sir,
        grid: cfg.grid,
        integrator: Some(cfg.integrator),
        eps: Some(cfg.eps),
    }
}

/// Scenario as a JSON value, with every default made explicit.
pub fn scenario_value(cfg: &ScenarioConfig) -> Value {
    serde_json::to_value(document(cfg)).expect("scenario documents always serialize")
}

pub fn serialize_scenario(cfg: &ScenarioConfig) -> String {
    serde_json::to_string_pretty(&document(cfg)).expect("scenario documents always serialize")
}
