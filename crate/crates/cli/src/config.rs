//! Flag/file precedence: a flag wins over the matching key of the command's
//! table in the `--config` file, which wins over the built-in default.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

pub fn load_table(path: &Path, command: &str) -> Result<Option<Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: toml::Table = toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    match doc.get(command) {
        None => Ok(None),
        Some(toml::Value::Table(t)) => Ok(Some(serde_json::to_value(t)?)),
        Some(_) => bail!("{}: `{command}` must be a table", path.display()),
    }
}

/// Fills every flag left unset (null or false) from `file`.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<Value>) -> Result<T> {
    let mut merged = serde_json::to_value(flags)?;
    if let (Value::Object(dst), Some(Value::Object(src))) = (&mut merged, file) {
        for (key, value) in src {
            match dst.get(&key) {
                None | Some(Value::Null) | Some(Value::Bool(false)) => {
                    dst.insert(key, value);
                }
                Some(_) => {}
            }
        }
    }
    serde_json::from_value(merged).context("invalid value in config file")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::BinaryArgs;

    #[test]
    fn flags_override_file() {
        let flags = BinaryArgs {
            p: Some(0.3),
            ..Default::default()
        };
        let file = serde_json::json!({ "p": 0.1, "q": 0.2 });
        let merged = merge(&flags, Some(file)).unwrap();
        assert_eq!(merged.p, Some(0.3));
        assert_eq!(merged.q, Some(0.2));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let file = serde_json::json!({ "bogus": 1 });
        assert!(merge(&BinaryArgs::default(), Some(file)).is_err());
    }
}
