//! QGF1 binary field snapshots.
//!
//! Layout, all little-endian: the magic bytes `QGF1`, `u32 nx`, `u32 ny`,
//! `f64 lx`, `f64 ly`, then the `nx·ny` sine coefficients with `k` outer
//! and `l` inner.

use std::path::Path;

use qg_core::{Grid, SpectralField};

use crate::output::write_atomic;

pub const MAGIC: &[u8; 4] = b"QGF1";
const HEADER_LEN: usize = 4 + 4 + 4 + 8 + 8;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("not a QGF1 snapshot (bad magic bytes)")]
    BadMagic,
    #[error("snapshot truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("snapshot has {extra} trailing bytes")]
    Trailing { extra: usize },
    #[error("snapshot describes an invalid field: {0}")]
    Field(#[from] qg_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn encode(field: &SpectralField) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(g.ny() as u32).to_le_bytes());
    out.extend_from_slice(&g.lx().to_le_bytes());
    out.extend_from_slice(&g.ly().to_le_bytes());
    for c in field.coeffs() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<SpectralField, SnapshotError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(SnapshotError::Truncated { expected: HEADER_LEN, found: bytes.len() });
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let (nx, ny) = (u32_at(4), u32_at(8));
    let grid = Grid::new(nx, ny, f64_at(12), f64_at(20))?;
    let expected = HEADER_LEN + 8 * grid.len();
    if bytes.len() < expected {
        return Err(SnapshotError::Truncated { expected, found: bytes.len() });
    }
    if bytes.len() > expected {
        return Err(SnapshotError::Trailing { extra: bytes.len() - expected });
    }
    let coeffs = (0..grid.len()).map(|i| f64_at(HEADER_LEN + 8 * i)).collect();
    Ok(SpectralField::from_coeffs(grid, coeffs)?)
}

pub fn write_snapshot(path: &Path, field: &SpectralField) -> std::io::Result<()> {
    write_atomic(path, &encode(field))
}

pub fn read_snapshot(path: &Path) -> Result<SpectralField, SnapshotError> {
    decode(&std::fs::read(path)?)
}
