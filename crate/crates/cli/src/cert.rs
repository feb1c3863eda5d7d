use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Machine-readable record of one command run.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Value,
    pub checks: Vec<Check>,
    pub tool_version: String,
    pub seed: Option<u64>,
}

impl Certificate {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            inputs: Map::new(),
            results: Value::Null,
            checks: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            seed: None,
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs.insert(key.into(), serde_json::to_value(value).expect("input serializes"));
        self
    }

    pub fn results(&mut self, value: impl Serialize) {
        self.results = serde_json::to_value(value).expect("results serialize");
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}
