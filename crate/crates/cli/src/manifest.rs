use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

/// Provenance record embedded in every output.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: BTreeMap<String, Value>,
    pub inputs: Vec<String>,
    pub output: Option<String>,
    /// No subcommand draws random numbers; kept for format stability.
    pub seed: Option<u64>,
    pub version: String,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            output: None,
            seed: None,
            version: concat!("boxdist ", env!("CARGO_PKG_VERSION")).to_string(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn output(mut self, path: Option<&PathBuf>) -> Self {
        self.output = path.map(|p| p.display().to_string());
        self
    }

    /// `payload` as a JSON object with this manifest under `"manifest"`.
    pub fn wrap(&self, payload: impl Serialize) -> Value {
        let mut obj = match serde_json::to_value(payload).expect("serializable") {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("result".into(), other);
                m
            }
        };
        obj.insert("manifest".into(), serde_json::to_value(self).expect("serializable"));
        Value::Object(obj)
    }
}
