//! Flag/config-file merging: flags win, then the JSON config, then defaults.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{HackError, Result};

/// Fills every unset (`None`) field of `args` from the JSON object in
/// `config`. Keys are the long flag names in snake case; unknown keys are
/// rejected by `T`'s deserializer.
pub fn merge_config<T: Serialize + DeserializeOwned>(args: &T, config: Option<&Path>) -> Result<T> {
    let Some(path) = config else {
        return reparse(serde_json::to_value(args).expect("argument structs serialize"));
    };
    let text = std::fs::read_to_string(path)?;
    let file: Value = serde_json::from_str(&text).map_err(|e| HackError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(file) = file else {
        return Err(HackError::Argument(format!("config file {} must hold a JSON object", path.display())));
    };
    let mut merged = serde_json::to_value(args).expect("argument structs serialize");
    let slots = merged.as_object_mut().expect("argument structs serialize to objects");
    for (key, value) in file {
        match slots.get(&key) {
            Some(Value::Null) | None => {
                slots.insert(key, value);
            }
            Some(_) => {}
        }
    }
    reparse(merged)
}

fn reparse<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| HackError::Argument(format!("invalid configuration: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;
    use std::io::Write;

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    #[serde(deny_unknown_fields)]
    struct Args {
        trials: Option<usize>,
        seed: Option<String>,
        #[serde(skip_serializing)]
        #[serde(default)]
        config: Option<std::path::PathBuf>,
    }

    #[test]
    fn flags_override_config_which_overrides_defaults() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"trials": 5, "seed": "0x10"}}"#).unwrap();
        let args = Args { trials: Some(9), seed: None, config: None };
        let merged = merge_config(&args, Some(f.path())).unwrap();
        assert_eq!(merged.trials, Some(9));
        assert_eq!(merged.seed.as_deref(), Some("0x10"));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"trails": 5}}"#).unwrap();
        let args = Args { trials: None, seed: None, config: None };
        assert!(merge_config(&args, Some(f.path())).is_err());
    }

    #[test]
    fn malformed_config_reports_position() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "{{\n\"trials\": }}").unwrap();
        let args = Args { trials: None, seed: None, config: None };
        assert!(matches!(merge_config(&args, Some(f.path())), Err(HackError::Parse { line: 2, .. })));
    }
}
