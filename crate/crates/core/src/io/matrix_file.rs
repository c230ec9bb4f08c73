//! Channel-matrix file: one line of JSON header terminated by `\n`, then
//! `rows * cols` little-endian `f64` pairs `(re, im)` in row-major order.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelMatrix, ModelKind};
use crate::{CMatrix, Error, Result, C64};

use super::write_bytes;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixHeader {
    pub rows: usize,
    pub cols: usize,
    pub model: ModelKind,
    pub scene_hash: String,
}

pub fn encode_matrix(h: &ChannelMatrix) -> Vec<u8> {
    let header = MatrixHeader {
        rows: h.nrows(),
        cols: h.ncols(),
        model: h.model,
        scene_hash: h.scene_hash.clone(),
    };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    out.reserve(h.nrows() * h.ncols() * 16);
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            let z = h.entries[(i, j)];
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

pub fn decode_matrix(bytes: &[u8], origin: &Path) -> Result<ChannelMatrix> {
    let parse = |message: String| Error::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| parse("missing header line".into()))?;
    let header: MatrixHeader =
        serde_json::from_slice(&bytes[..nl]).map_err(|e| parse(format!("bad header: {e}")))?;
    let body = &bytes[nl + 1..];
    let expected = header
        .rows
        .checked_mul(header.cols)
        .and_then(|n| n.checked_mul(16))
        .ok_or_else(|| parse("header dimensions overflow".into()))?;
    if body.len() != expected {
        return Err(parse(format!(
            "body has {} bytes, header implies {expected}",
            body.len()
        )));
    }
    let f = |k: usize| f64::from_le_bytes(body[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    let entries = CMatrix::from_fn(header.rows, header.cols, |i, j| {
        let k = 2 * (i * header.cols + j);
        C64::new(f(k), f(k + 1))
    });
    ChannelMatrix::new(entries, header.model, header.scene_hash)
}

pub fn write_matrix(path: &Path, h: &ChannelMatrix) -> Result<()> {
    write_bytes(path, &encode_matrix(h))
}

pub fn read_matrix(path: &Path) -> Result<ChannelMatrix> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_matrix(&bytes, path)
}
