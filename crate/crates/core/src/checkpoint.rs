//! Binary field checkpoints.
//!
//! Layout, all little-endian:
//!
//! | offset | size | content |
//! |---|---|---|
//! | 0 | 5 | magic `IGHC1` |
//! | 5 | 4 | format version (u32) |
//! | 9 | 4 | endianness tag `0x01020304` (u32) |
//! | 13 | 8 | n (u64) |
//! | 21 | 8 | L (f64) |
//! | 29 | 8 | alpha (f64) |
//! | 37 | 8 | b (f64) |
//! | 45 | 8 | sign, +1 or -1 (f64) |
//! | 53 | 8 | t (f64) |
//! | 61 | 16 n^3 | samples as interleaved (re, im) f64, row-major |

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{HartreeError, Result};
use crate::field::ScalarField;
use crate::grid::make_grid;
use crate::model::Sign;

pub const MAGIC: &[u8; 5] = b"IGHC1";
pub const VERSION: u32 = 1;
pub const ENDIAN_TAG: u32 = 0x0102_0304;
pub const HEADER_LEN: usize = 61;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub alpha: f64,
    pub b: f64,
    pub sign: Sign,
    pub t: f64,
    pub field: ScalarField,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let grid = self.field.grid();
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * grid.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&ENDIAN_TAG.to_le_bytes());
        out.extend_from_slice(&(grid.n() as u64).to_le_bytes());
        for v in [grid.l(), self.alpha, self.b, self.sign.value(), self.t] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for c in self.field.values() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| HartreeError::Checkpoint(m.to_string());
        if bytes.len() < HEADER_LEN {
            return Err(bad("truncated header"));
        }
        if &bytes[0..5] != MAGIC {
            return Err(bad("bad magic"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u32_at(5);
        if version != VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        if u32_at(9) != ENDIAN_TAG {
            return Err(bad("endianness tag mismatch"));
        }
        let n = u64::from_le_bytes(bytes[13..21].try_into().unwrap()) as usize;
        let l = f64_at(21);
        let alpha = f64_at(29);
        let b = f64_at(37);
        let sign = Sign::from_value(f64_at(45)).ok_or_else(|| bad("sign must be +1 or -1"))?;
        let t = f64_at(53);
        let grid = make_grid(n, l)?;
        let expected = HEADER_LEN + 16 * grid.len();
        if bytes.len() != expected {
            return Err(bad(&format!(
                "payload length {} does not match n = {n} (expected {expected} bytes)",
                bytes.len()
            )));
        }
        let values = bytes[HEADER_LEN..]
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[0..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..16].try_into().unwrap()),
                )
            })
            .collect();
        Ok(Self {
            alpha,
            b,
            sign,
            t,
            field: ScalarField::new(grid, values)?,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}
