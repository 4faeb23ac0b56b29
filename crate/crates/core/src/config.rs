//! JSON configuration files with `a.b.c=value` overrides.
//!
//! Overrides are applied to the parsed document before it is deserialized
//! into a typed config, so validation sees the final values and errors name
//! the offending path.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Reads a JSON document from `path`.
pub fn read_document(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_document(&text)
}

pub fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::invalid("<document>", format!("line {}: {e}", e.line())))
}

/// Applies one `key.path=value` override. The value is parsed as JSON when
/// possible and taken as a string otherwise; missing objects along the path
/// are created.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::invalid(assignment, "override must look like key.path=value"))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::invalid(assignment, "override key has an empty segment"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));

    let mut node = doc;
    let segments: Vec<&str> = key.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(seg.to_string(), value);
                    return Ok(());
                }
                map.entry(seg.to_string()).or_insert(Value::Null)
            }
            Value::Array(items) => {
                let idx: usize = seg
                    .parse()
                    .map_err(|_| Error::invalid(segments[..=i].join("."), "expected an array index"))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| Error::invalid(segments[..=i].join("."), format!("index out of range (len {len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(Error::invalid(segments[..i].join("."), "cannot descend into a scalar"));
            }
        };
    }
    Ok(())
}

/// Deserializes `doc` into `T`, reporting the path of the first bad field.
pub fn from_document<T: DeserializeOwned>(doc: Value) -> Result<T> {
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        Error::invalid(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
    })
}

/// Reads `path` (or starts from an empty object), applies the overrides in
/// order, and deserializes.
pub fn load<T: DeserializeOwned>(path: Option<&Path>, overrides: &[String]) -> Result<T> {
    let mut doc = match path {
        Some(p) => read_document(p)?,
        None => Value::Object(Map::new()),
    };
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    from_document(doc)
}
