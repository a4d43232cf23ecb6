//! Parameter override files: one `key = value` per line, `#` comments.
//! Keys are the model parameter names; values are plain numbers in SI
//! units (meters, radians, meters per second, seconds).  Overrides are
//! applied on top of whatever the manifest produced and revalidated.

use std::path::Path;

use crate::io::manifest::{merge_params, LoadError};
use crate::scene::ModelParams;

/// Applies a `key = value` override file to `params`, then revalidates.
pub fn apply_param_overrides(
    params: &mut ModelParams,
    path: impl AsRef<Path>,
) -> Result<(), LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut overrides = toml::Table::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let data = raw.split('#').next().unwrap_or("").trim();
        if data.is_empty() {
            continue;
        }
        let Some((key, value)) = data.split_once('=') else {
            return Err(LoadError::BadParam {
                path: path.to_path_buf(),
                key: data.to_string(),
                message: format!("line {line}: expected key = value"),
            });
        };
        let key = key.trim();
        let value: f64 = value.trim().parse().map_err(|_| LoadError::BadParam {
            path: path.to_path_buf(),
            key: key.to_string(),
            message: format!("line {line}: unreadable number {:?}", value.trim()),
        })?;
        overrides.insert(key.to_string(), toml::Value::Float(value));
    }
    let merged = merge_params(params, &overrides, path)?;
    merged.validate().map_err(|source| LoadError::Scene {
        path: path.to_path_buf(),
        source,
    })?;
    *params = merged;
    Ok(())
}
