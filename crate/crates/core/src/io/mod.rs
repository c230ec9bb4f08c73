//! File formats: scene JSON, channel-matrix files, external estimates and
//! the dataset export.

mod dataset;
mod estimates;
mod matrix_file;
mod scene_file;

pub use dataset::{
    export_dataset, read_manifest, DatasetConfig, DatasetManifest, FieldRange, LABEL_FIELDS,
};
pub use estimates::{export_estimates, import_external_estimates, EstimatesFile, PathRecord};
pub use matrix_file::{read_matrix, write_matrix, MatrixHeader};
pub use scene_file::{load_scene, parse_scene, save_scene, scene_to_json, LayoutRecord, LosRecord, SceneFile};

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{Error, Result};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Parses JSON and reports failures with line and column.
pub(crate) fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: format!("{e} (line {}, column {})", e.line(), e.column()),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse_json(&read_text(path)?, path)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numerical(format!("cannot serialize {}: {e}", path.display())))?;
    s.push('\n');
    write_bytes(path, s.as_bytes())
}
