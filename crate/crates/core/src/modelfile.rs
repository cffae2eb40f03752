//! JSON model envelopes: every model file starts with a magic string and a
//! format version, and loading a mismatched version is a hard error.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub fn save<T: Serialize>(path: &Path, magic: &str, version: u32, body: &T) -> Result<()> {
    let mut value = serde_json::to_value(body).map_err(|e| Error::model(path, e.to_string()))?;
    let obj = value.as_object_mut().ok_or_else(|| Error::model(path, "model body must serialize to an object"))?;
    obj.insert("magic".into(), Value::from(magic));
    obj.insert("version".into(), Value::from(version));
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, &value).map_err(|e| Error::model(path, e.to_string()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load<T: DeserializeOwned>(path: &Path, magic: &str, version: u32) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut value: Value =
        serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::model(path, e.to_string()))?;
    let obj = value.as_object_mut().ok_or_else(|| Error::model(path, "not a JSON object"))?;
    match obj.remove("magic").as_ref().and_then(Value::as_str) {
        Some(m) if m == magic => {}
        Some(m) => return Err(Error::model(path, format!("magic {m:?}, expected {magic:?}"))),
        None => return Err(Error::model(path, "missing magic string")),
    }
    let found =
        obj.remove("version").and_then(|v| v.as_u64()).ok_or_else(|| Error::model(path, "missing version"))? as u32;
    if found != version {
        return Err(Error::ModelVersion { path: path.to_path_buf(), found, expected: version });
    }
    serde_json::from_value(value).map_err(|e| Error::model(path, e.to_string()))
}
