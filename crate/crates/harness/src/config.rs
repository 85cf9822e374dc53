use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{HarnessError, Result};

pub type Params = BTreeMap<String, Value>;

pub const DEFAULT_SEED: u64 = 1;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_out() -> PathBuf {
    PathBuf::from("runs")
}

/// What to run and where to put it. The JSON form uses the same names as the
/// command line flags (`seed`, `n`, `out`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    #[serde(default)]
    pub params: Params,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, rename = "n", alias = "n_samples")]
    pub n_samples: Option<u64>,
    /// Output directory; the run writes `<id>.csv` and `<id>.json` there.
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn new(id: impl Into<String>) -> Self {
        ExperimentConfig {
            id: id.into(),
            params: Params::new(),
            seed: DEFAULT_SEED,
            n_samples: None,
            out: default_out(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n_samples = Some(n);
        self
    }

    pub fn with_out(mut self, out: impl Into<PathBuf>) -> Self {
        self.out = out.into();
        self
    }

    pub fn with_param(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.params.insert(name.to_string(), value.into());
        self
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn csv_path(&self) -> PathBuf {
        self.out.join(format!("{}.csv", self.id))
    }

    pub fn json_path(&self) -> PathBuf {
        self.out.join(format!("{}.json", self.id))
    }
}

/// Parameters merged with an experiment's defaults, with typed access.
#[derive(Debug, Clone)]
pub struct Context {
    pub id: &'static str,
    pub seed: u64,
    pub n: Option<u64>,
    pub params: Params,
}

impl Context {
    pub(crate) fn param_error(&self, name: &str, reason: impl Into<String>) -> HarnessError {
        HarnessError::Param {
            experiment: self.id.to_string(),
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    fn value(&self, name: &str) -> Result<&Value> {
        self.params
            .get(name)
            .ok_or_else(|| self.param_error(name, "missing"))
    }

    pub fn f64(&self, name: &str) -> Result<f64> {
        self.value(name)?
            .as_f64()
            .ok_or_else(|| self.param_error(name, "expected a number"))
    }

    pub fn usize(&self, name: &str) -> Result<usize> {
        self.value(name)?
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| self.param_error(name, "expected a non-negative integer"))
    }

    pub fn f64_list(&self, name: &str) -> Result<Vec<f64>> {
        let list = self
            .value(name)?
            .as_array()
            .ok_or_else(|| self.param_error(name, "expected a list of numbers"))?;
        list.iter()
            .map(|v| v.as_f64().ok_or_else(|| self.param_error(name, "expected a list of numbers")))
            .collect()
    }

    pub fn usize_list(&self, name: &str) -> Result<Vec<usize>> {
        let list = self
            .value(name)?
            .as_array()
            .ok_or_else(|| self.param_error(name, "expected a list of integers"))?;
        list.iter()
            .map(|v| {
                v.as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| self.param_error(name, "expected a list of integers"))
            })
            .collect()
    }

    pub fn str(&self, name: &str) -> Result<&str> {
        self.value(name)?
            .as_str()
            .ok_or_else(|| self.param_error(name, "expected a string"))
    }

    /// Sample count; only experiments that draw samples have one.
    pub fn samples(&self) -> Result<u64> {
        self.n.ok_or_else(|| self.param_error("n", "this experiment takes no sample count"))
    }

    pub fn core<T>(&self, r: lqgsim_core::Result<T>) -> Result<T> {
        r.map_err(|source| HarnessError::Core {
            experiment: self.id.to_string(),
            source,
        })
    }

    pub fn maps<T>(&self, r: lqgsim_maps::Result<T>) -> Result<T> {
        r.map_err(|source| HarnessError::Maps {
            experiment: self.id.to_string(),
            source,
        })
    }
}

fn same_shape(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(_), Value::Number(_)) => true,
        (Value::Array(x), Value::Array(y)) => match x.first() {
            Some(first) => y.iter().all(|v| same_shape(first, v)),
            None => true,
        },
        (Value::String(_), Value::String(_)) | (Value::Bool(_), Value::Bool(_)) => true,
        _ => false,
    }
}

/// Overlay `given` on `defaults`, rejecting unknown names and values whose
/// JSON type differs from the default's.
pub(crate) fn merge_params(id: &str, defaults: Params, given: &Params) -> Result<Params> {
    let mut merged = defaults;
    for (name, value) in given {
        let Some(default) = merged.get(name) else {
            let known: Vec<&str> = merged.keys().map(String::as_str).collect();
            return Err(HarnessError::Param {
                experiment: id.to_string(),
                name: name.clone(),
                reason: format!("unknown parameter; this experiment takes [{}]", known.join(", ")),
            });
        };
        if !same_shape(default, value) {
            return Err(HarnessError::Param {
                experiment: id.to_string(),
                name: name.clone(),
                reason: format!("expected a value shaped like {default}, got {value}"),
            });
        }
        merged.insert(name.clone(), value.clone());
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_config_mirrors_the_flags() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"id": "csbp-laplace", "seed": 7, "n": 100, "out": "x", "params": {"t": 1.0}}"#)
                .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.n_samples, Some(100));
        assert_eq!(c.csv_path(), PathBuf::from("x/csbp-laplace.csv"));
        let c: ExperimentConfig = serde_json::from_str(r#"{"id": "a"}"#).unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"id": "a", "sede": 1}"#).is_err());
    }

    #[test]
    fn merging_checks_names_and_types() {
        let defaults: Params = [("t".to_string(), json!(0.5)), ("ts".to_string(), json!([1.0, 2.0]))].into();
        let given: Params = [("t".to_string(), json!(2))].into();
        assert_eq!(merge_params("x", defaults.clone(), &given).unwrap()["t"], json!(2));
        let bad: Params = [("t".to_string(), json!("2"))].into();
        assert!(merge_params("x", defaults.clone(), &bad).is_err());
        let bad: Params = [("u".to_string(), json!(1))].into();
        let err = merge_params("x", defaults.clone(), &bad).unwrap_err().to_string();
        assert!(err.contains("ts"), "{err}");
        let bad: Params = [("ts".to_string(), json!([1.0, "a"]))].into();
        assert!(merge_params("x", defaults, &bad).is_err());
    }
}
