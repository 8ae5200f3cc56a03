//! Versioned JSON experiment configs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coupling::ThetaMethod;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, LinearFieldSpec, TorusFieldSpec};
use crate::quantile::{QuantileProfile, Verdict};
use crate::sums::Sigma2Method;
use crate::transfer::{FourierObservable, IntMatrix, ModulusCurve};

pub const SCHEMA_VERSION: u32 = 1;

fn default_reps() -> usize {
    1
}
fn default_workers() -> usize {
    1
}
fn default_z() -> f64 {
    3.0
}
fn default_lambdas() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}
fn default_tol() -> f64 {
    1e-12
}
fn default_orders() -> Vec<usize> {
    vec![1, 2, 4, 8]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Golden report used by `--check`, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub golden: Option<PathBuf>,
    pub experiment: Experiment,
}

/// How the limiting variance is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sigma2Config {
    pub method: Sigma2Method,
    #[serde(default)]
    pub radius: usize,
    #[serde(default)]
    pub shape: Vec<usize>,
    #[serde(default)]
    pub reps: usize,
}

impl Default for Sigma2Config {
    fn default() -> Self {
        Sigma2Config { method: Sigma2Method::Exact, radius: 0, shape: Vec::new(), reps: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    Gamma,
    Theta,
    ThetaProduct,
    Tau,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapConfig {
    pub n: Vec<usize>,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    Simulate {
        model: FieldSpec,
        n: Vec<usize>,
        #[serde(default = "default_reps")]
        reps: usize,
        /// Also write raw grid dumps.
        #[serde(default)]
        raw: bool,
    },
    Coeffs {
        model: FieldSpec,
        coefficient: Coefficient,
        kmax: usize,
        #[serde(default = "default_reps")]
        reps: usize,
        /// Truncation level for `theta`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        m_grid: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        method: Option<ThetaMethod>,
    },
    Conditions {
        profile: QuantileProfile,
        d: usize,
        cutoff: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gammas: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<ModulusCurve>,
        /// Expected verdicts by condition name (`clt`, `tightness`,
        /// `modulus`); a mismatch is a failure.
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        expect: BTreeMap<String, Verdict>,
    },
    TransferCheck {
        a: IntMatrix,
        b: IntMatrix,
        f: FourierObservable,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<FourierObservable>,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Decompose {
        model: TorusFieldSpec,
        #[serde(default = "default_orders")]
        orders: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap: Option<GapConfig>,
    },
    Clt {
        model: FieldSpec,
        n: Vec<usize>,
        reps: usize,
        #[serde(default)]
        sigma2: Sigma2Config,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ks_threshold: Option<f64>,
    },
    Fclt {
        model: FieldSpec,
        n: Vec<usize>,
        reps: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        t_grid: Vec<Vec<f64>>,
        #[serde(default)]
        sigma2: Sigma2Config,
        #[serde(default = "default_z")]
        z_threshold: f64,
    },
    Tightness {
        model: FieldSpec,
        n_list: Vec<Vec<usize>>,
        #[serde(default = "default_lambdas")]
        lambda: Vec<f64>,
        reps: usize,
    },
    Rosenthal {
        model: FieldSpec,
        p: f64,
        n_list: Vec<Vec<usize>>,
        reps: usize,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Simulate { .. } => "simulate",
            Experiment::Coeffs { .. } => "coeffs",
            Experiment::Conditions { .. } => "conditions",
            Experiment::TransferCheck { .. } => "transfer-check",
            Experiment::Decompose { .. } => "decompose",
            Experiment::Clt { .. } => "clt",
            Experiment::Fclt { .. } => "fclt",
            Experiment::Tightness { .. } => "tightness",
            Experiment::Rosenthal { .. } => "rosenthal",
        }
    }
}

/// Parses a config, reporting the JSON path of the first offending field.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = match serde_path_to_error::deserialize(de) {
        Ok(c) => c,
        Err(e) => {
            let mut path = e.path().to_string();
            let mut message = e.inner().to_string();
            if path == "experiment" {
                let exp = serde_json::from_str::<Value>(text).ok().and_then(|v| v.get("experiment").cloned());
                if let Some((p, m)) = exp.as_ref().and_then(refine_experiment) {
                    path = format!("experiment.{p}");
                    message = m;
                }
            }
            return Err(Error::Config { path, message });
        }
    };
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(Error::Config {
            path: "schema_version".into(),
            message: format!("unsupported schema version {} (expected {SCHEMA_VERSION})", cfg.schema_version),
        });
    }
    if cfg.workers == 0 {
        return Err(Error::Config { path: "workers".into(), message: "must be at least 1".into() });
    }
    Ok(cfg)
}

fn try_as<T: DeserializeOwned>(v: &Value) -> Option<(String, String)> {
    match serde_path_to_error::deserialize::<_, T>(v.clone()) {
        Ok(_) => None,
        Err(e) => {
            let p = e.path().to_string();
            Some((if p == "." { String::new() } else { p }, e.inner().to_string()))
        }
    }
}

fn join(key: &str, inner: (String, String)) -> (String, String) {
    let path = if inner.0.is_empty() { key.to_string() } else { format!("{key}.{}", inner.0) };
    (path, inner.1)
}

/// Internally tagged enums buffer their content, which hides the location of
/// nested errors; this re-parses the known nested fields one at a time.
fn refine_experiment(exp: &Value) -> Option<(String, String)> {
    let obj = exp.as_object()?;
    let decompose = obj.get("kind").and_then(Value::as_str) == Some("decompose");
    for (key, v) in obj {
        let found = match key.as_str() {
            "model" if decompose => try_as::<TorusFieldSpec>(v),
            "model" => {
                let mut inner = v.as_object()?.clone();
                match inner.remove("model").as_ref().and_then(Value::as_str) {
                    Some("linear") => try_as::<LinearFieldSpec>(&Value::Object(inner)),
                    Some("torus") => try_as::<TorusFieldSpec>(&Value::Object(inner)),
                    _ => try_as::<FieldSpec>(v),
                }
            }
            "sigma2" => try_as::<Sigma2Config>(v),
            "profile" => try_as::<QuantileProfile>(v),
            "modulus" => try_as::<ModulusCurve>(v),
            "f" | "g" => try_as::<FourierObservable>(v),
            "a" | "b" => try_as::<IntMatrix>(v),
            "gap" => try_as::<GapConfig>(v),
            _ => None,
        };
        if let Some(f) = found {
            return Some(join(key, f));
        }
    }
    None
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}
