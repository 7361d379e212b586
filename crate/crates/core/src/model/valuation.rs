use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::value::Value;

/// A snapshot: concrete values for the inputs plus the active behavior.
///
/// A valuation may carry values for more inputs than a given document
/// declares (for example child-document inputs); documents ignore the extras.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Valuation {
    pub values: BTreeMap<String, Value>,
    pub active_behavior: String,
}

impl Valuation {
    pub fn new(active_behavior: impl Into<String>) -> Self {
        Self { values: BTreeMap::new(), active_behavior: active_behavior.into() }
    }

    pub fn with(mut self, input: impl Into<String>, value: Value) -> Self {
        self.values.insert(input.into(), value);
        self
    }

    pub fn set(&mut self, input: impl Into<String>, value: Value) {
        self.values.insert(input.into(), value);
    }

    pub fn get(&self, input: &str) -> Option<&Value> {
        self.values.get(input)
    }

    pub fn with_behavior(&self, behavior: impl Into<String>) -> Self {
        Self { values: self.values.clone(), active_behavior: behavior.into() }
    }
}
