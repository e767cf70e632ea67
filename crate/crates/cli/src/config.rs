use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

/// Parameters from `config` (if any) with every flag set on the command line
/// written over them. Unknown config keys are rejected.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T> {
    let mut base = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| CliError::Config(format!("config {} is not valid JSON: {e}", path.display())))?
        }
        None => Value::Object(Default::default()),
    };
    let Value::Object(fields) = &mut base else {
        return Err(CliError::Config("config must be a JSON object".into()));
    };
    let Value::Object(overrides) = serde_json::to_value(flags).expect("arguments serialize") else {
        unreachable!("argument structs serialize to objects");
    };
    fields.extend(overrides);
    serde_json::from_value(base).map_err(|e| CliError::Config(format!("invalid config: {e}")))
}
