//! Binary field snapshots.
//!
//! Layout: 16-byte magic (`RABINLS1` padded with zeros), then little-endian
//! `dim: u32`, `points_per_dim: u32`, `half_width: f64`, then component 1 as
//! interleaved `(re, im)` f64 pairs in row-major order, then component 2.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::TwoComponentField;
use crate::grid::{make_grid, Grid, ScalarField};

pub const MAGIC: [u8; 16] = *b"RABINLS1\0\0\0\0\0\0\0\0";
const HEADER_LEN: usize = 32;

pub fn snapshot_len(dim: usize, points_per_dim: usize) -> usize {
    HEADER_LEN + 2 * 16 * points_per_dim.pow(dim as u32)
}

pub fn encode_snapshot(f: &TwoComponentField) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(snapshot_len(g.dim(), g.points_per_dim()));
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(g.points_per_dim() as u32).to_le_bytes());
    out.extend_from_slice(&g.half_width().to_le_bytes());
    for v in f.first.values.iter().chain(&f.second.values) {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn write_snapshot(f: &TwoComponentField, path: &Path) -> Result<()> {
    fs::write(path, encode_snapshot(f)).map_err(|e| Error::io(path, e))
}

pub fn decode_snapshot(bytes: &[u8], path: &Path) -> Result<TwoComponentField> {
    let bad = |message: String| Error::SnapshotFormat {
        path: path.to_path_buf(),
        message,
    };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("truncated header ({} bytes)", bytes.len())));
    }
    if bytes[..16] != MAGIC {
        return Err(bad("bad magic".into()));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes")) as usize;
    let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let (dim, n, half_width) = (u32_at(16), u32_at(20), f64_at(24));
    // check the size before building a grid from untrusted header values
    let expected = (1..=3)
        .contains(&dim)
        .then(|| n.checked_pow(dim as u32))
        .flatten()
        .and_then(|points| points.checked_mul(32))
        .and_then(|b| b.checked_add(HEADER_LEN));
    match expected {
        Some(e) if e == bytes.len() => {}
        Some(e) => {
            return Err(bad(format!(
                "truncated or oversized file: {} bytes, expected {e}",
                bytes.len()
            )))
        }
        None => return Err(bad(format!("implausible header dim = {dim}, points_per_dim = {n}"))),
    }
    let grid = make_grid(dim, n, half_width).map_err(|e| bad(e.to_string()))?;
    let len = grid.len();
    let values: Vec<Complex64> = (0..2 * len)
        .map(|k| {
            let o = HEADER_LEN + 16 * k;
            Complex64::new(f64_at(o), f64_at(o + 8))
        })
        .collect();
    let (a, b) = values.split_at(len);
    TwoComponentField::new(
        ScalarField::from_values(&grid, a.to_vec())?,
        ScalarField::from_values(&grid, b.to_vec())?,
    )
}

pub fn read_snapshot(path: &Path) -> Result<TwoComponentField> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes, path)
}

/// Reads a snapshot and re-homes it on `grid`, which must describe the same
/// discretization.
pub fn load_snapshot_into(path: &Path, grid: &Arc<Grid>) -> Result<TwoComponentField> {
    let f = read_snapshot(path)?;
    if **f.grid() != **grid {
        return Err(Error::GridMismatch(format!(
            "{} holds a {:?} field, run uses {:?}",
            path.display(),
            f.grid(),
            grid
        )));
    }
    TwoComponentField::new(
        ScalarField::from_values(grid, f.first.values)?,
        ScalarField::from_values(grid, f.second.values)?,
    )
}
