//! Binary snapshot files.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | magic `BOGS` |
//! | 2 | format version (`u16`) |
//! | 1 | equation tag (`u8`) |
//! | 4 | `n_points` (`u32`) |
//! | 8 | domain length (`f64`) |
//! | 8 | time (`f64`) |
//! | `8n` or `16n` | samples; complex samples interleave re, im |
//!
//! The tag holds the kind in its low bits (0 BO, 1 mBO, 2 DNLS), `0x80`
//! for the minus sign and `0x40` for the free flow. DNLS snapshots are
//! complex, the others real.

use std::fs;
use std::path::Path;

use bogs::evolution::{EquationKind, EquationSpec, Sign};
use bogs::spectral::{ComplexField, Field, Grid, RealField};
use bogs::Complex64;

use crate::error::CliError;

pub const MAGIC: [u8; 4] = *b"BOGS";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 27;

const MINUS: u8 = 0x80;
const FREE: u8 = 0x40;
const KIND_MASK: u8 = 0x3f;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SnapshotError {
    #[error("bad magic {found:?}, expected \"BOGS\"")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported format version {found}, this build reads version {VERSION}")]
    Version { found: u16 },
    #[error("unknown equation tag {0:#04x}")]
    Tag(u8),
    #[error("truncated: header announces {expected} bytes, file has {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{extra} bytes of trailing data after the payload")]
    TrailingData { extra: usize },
    #[error("invalid header: {0}")]
    Header(String),
    #[error("invalid samples: {0}")]
    Samples(String),
}

/// One stored field with its equation and time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub equation: EquationSpec,
    pub time: f64,
    pub field: Field,
}

fn tag(eq: &EquationSpec) -> u8 {
    let kind = match eq.kind {
        EquationKind::Bo => 0,
        EquationKind::Mbo => 1,
        EquationKind::Dnls => 2,
    };
    let sign = if eq.sign == Sign::Minus { MINUS } else { 0 };
    let free = if eq.nonlinear { 0 } else { FREE };
    kind | sign | free
}

fn untag(t: u8) -> Result<EquationSpec, SnapshotError> {
    let kind = match t & KIND_MASK {
        0 => EquationKind::Bo,
        1 => EquationKind::Mbo,
        2 => EquationKind::Dnls,
        _ => return Err(SnapshotError::Tag(t)),
    };
    let sign = if t & MINUS != 0 { Sign::Minus } else { Sign::Plus };
    let mut eq = EquationSpec::new(kind, sign);
    eq.nonlinear = t & FREE == 0;
    Ok(eq)
}

/// Serializes a snapshot. Real fields stored under DNLS are widened to complex.
pub fn encode(snap: &Snapshot) -> Result<Vec<u8>, SnapshotError> {
    let grid = snap.field.grid();
    let n = grid.n_points();
    let n32 = u32::try_from(n).map_err(|_| SnapshotError::Header(format!("{n} points do not fit in u32")))?;
    let complex = !snap.equation.kind.is_real();
    let mut out = Vec::with_capacity(HEADER_LEN + n * if complex { 16 } else { 8 });
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(tag(&snap.equation));
    out.extend_from_slice(&n32.to_le_bytes());
    out.extend_from_slice(&grid.length().to_le_bytes());
    out.extend_from_slice(&snap.time.to_le_bytes());
    match (&snap.field, complex) {
        (Field::Real(u), false) => {
            for v in u.samples() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        (f, true) => {
            for c in f.to_complex().samples() {
                out.extend_from_slice(&c.re.to_le_bytes());
                out.extend_from_slice(&c.im.to_le_bytes());
            }
        }
        (Field::Complex(_), false) => {
            return Err(SnapshotError::Samples(format!(
                "complex field cannot be stored under the real equation {}",
                snap.equation.kind.name()
            )))
        }
    }
    Ok(out)
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot, SnapshotError> {
    let truncated = |expected| SnapshotError::Truncated { expected, found: bytes.len() };
    if bytes.len() < 4 {
        return Err(truncated(HEADER_LEN));
    }
    let magic: [u8; 4] = bytes[..4].try_into().expect("4 bytes");
    if magic != MAGIC {
        return Err(SnapshotError::BadMagic { found: magic });
    }
    if bytes.len() < 6 {
        return Err(truncated(HEADER_LEN));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(SnapshotError::Version { found: version });
    }
    if bytes.len() < HEADER_LEN {
        return Err(truncated(HEADER_LEN));
    }
    let equation = untag(bytes[6])?;
    let n = u32::from_le_bytes(bytes[7..11].try_into().expect("4 bytes")) as usize;
    let length = f64_at(bytes, 11);
    let time = f64_at(bytes, 19);
    let complex = !equation.kind.is_real();
    let expected = HEADER_LEN + n * if complex { 16 } else { 8 };
    if bytes.len() < expected {
        return Err(truncated(expected));
    }
    if bytes.len() > expected {
        return Err(SnapshotError::TrailingData { extra: bytes.len() - expected });
    }
    if !time.is_finite() {
        return Err(SnapshotError::Header(format!("time {time} is not finite")));
    }
    let grid = Grid::new(n, length).map_err(|e| SnapshotError::Header(e.to_string()))?;
    let payload = &bytes[HEADER_LEN..];
    let field = if complex {
        let s = (0..n)
            .map(|j| Complex64::new(f64_at(payload, 16 * j), f64_at(payload, 16 * j + 8)))
            .collect();
        Field::Complex(ComplexField::new(grid, s).map_err(|e| SnapshotError::Samples(e.to_string()))?)
    } else {
        let s = (0..n).map(|j| f64_at(payload, 8 * j)).collect();
        Field::Real(RealField::new(grid, s).map_err(|e| SnapshotError::Samples(e.to_string()))?)
    };
    Ok(Snapshot { equation, time, field })
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<(), CliError> {
    let bytes = encode(snap).map_err(|source| CliError::Snapshot { path: path.to_path_buf(), source })?;
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    decode(&bytes).map_err(|source| CliError::Snapshot { path: path.to_path_buf(), source })
}
