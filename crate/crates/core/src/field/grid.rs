//! Dense samples of a field on the rectangle `[1, n]`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub const MAGIC: &[u8; 8] = b"RFGRID\0\x01";
pub const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub model_hash: String,
    /// Hex of the 128-bit replicate seed.
    pub seed: String,
}

/// Values `X_k`, `k ∈ [1, n]`, stored row-major (last coordinate fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl SampleGrid {
    pub fn new(shape: Vec<usize>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if shape.is_empty() || shape.len() > 4 || shape.iter().any(|&n| n == 0) {
            return domain("grid shape must have 1 to 4 positive extents");
        }
        if values.len() != shape.iter().product::<usize>() {
            return domain("grid values do not match the shape");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("grid values must be finite");
        }
        Ok(SampleGrid { shape, values, provenance })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Offset of the 1-based index `k`.
    pub fn offset(&self, k: &[usize]) -> usize {
        let mut off = 0;
        for (ki, ni) in k.iter().zip(&self.shape) {
            debug_assert!(*ki >= 1 && ki <= ni);
            off = off * ni + (ki - 1);
        }
        off
    }

    pub fn at(&self, k: &[usize]) -> f64 {
        self.values[self.offset(k)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Grid with every axis reversed, `X'_k = X_{n + 1 − k}`.
    pub fn reversed(&self) -> SampleGrid {
        let mut values = self.values.clone();
        values.reverse();
        SampleGrid { shape: self.shape.clone(), values, provenance: self.provenance.clone() }
    }

    /// Raw dump: 32-byte header (magic, `d`, reserved, four `u32` extents)
    /// followed by little-endian `f64` values.
    pub fn write_raw<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = [0u8; HEADER_LEN];
        header[..8].copy_from_slice(MAGIC);
        header[8..12].copy_from_slice(&(self.dim() as u32).to_le_bytes());
        for (i, &n) in self.shape.iter().enumerate() {
            let n = u32::try_from(n).map_err(|_| crate::Error::Domain("extent too large for raw dump".into()))?;
            header[16 + 4 * i..20 + 4 * i].copy_from_slice(&n.to_le_bytes());
        }
        w.write_all(&header)?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_raw<R: Read>(mut r: R, provenance: Provenance) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header)?;
        if &header[..8] != MAGIC {
            return domain("not a raw grid dump");
        }
        let d = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        if d == 0 || d > 4 {
            return domain("raw grid dimension out of range");
        }
        let shape: Vec<usize> =
            (0..d).map(|i| u32::from_le_bytes(header[16 + 4 * i..20 + 4 * i].try_into().unwrap()) as usize).collect();
        let n: usize = shape.iter().product();
        let mut buf = vec![0u8; 8 * n];
        r.read_exact(&mut buf)?;
        let values = buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        SampleGrid::new(shape, values, provenance)
    }
}
