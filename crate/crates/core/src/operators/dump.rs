//! Binary dump of an assembled operator.
//!
//! Layout: `u64` little-endian header length, the JSON header, then the
//! matrix in row-major order as pairs of little-endian `f64` (re, im).

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::BandLimit;

use super::{BandLimitedOperator, Basis, Parameter};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DumpHeader {
    pub basis: Basis,
    #[serde(rename = "L")]
    pub l: usize,
    pub parameter: Parameter,
    pub margin: usize,
    pub degree: usize,
    pub label: String,
    pub rows: usize,
    pub cols: usize,
}

pub fn write_dump<W: Write>(op: &BandLimitedOperator, mut out: W) -> Result<()> {
    let header = DumpHeader {
        basis: op.basis,
        l: op.band.l(),
        parameter: op.parameter,
        margin: op.margin,
        degree: op.degree,
        label: op.label.clone(),
        rows: op.matrix.nrows(),
        cols: op.matrix.ncols(),
    };
    let json = serde_json::to_vec(&header).map_err(|e| Error::Parse(e.to_string()))?;
    let io = |e: std::io::Error| Error::Io(e.to_string());
    out.write_all(&(json.len() as u64).to_le_bytes()).map_err(io)?;
    out.write_all(&json).map_err(io)?;
    let mut buf = Vec::with_capacity(16 * op.matrix.len());
    for i in 0..header.rows {
        for j in 0..header.cols {
            let z = op.matrix[(i, j)];
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out.write_all(&buf).map_err(io)
}

pub fn read_dump<R: Read>(mut input: R) -> Result<BandLimitedOperator> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    let mut len = [0u8; 8];
    input.read_exact(&mut len).map_err(io)?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 1 << 20 {
        return Err(Error::Parse(format!("implausible header length {len}")));
    }
    let mut json = vec![0u8; len];
    input.read_exact(&mut json).map_err(io)?;
    let h: DumpHeader = serde_json::from_slice(&json).map_err(|e| Error::Parse(e.to_string()))?;
    let mut data = vec![0u8; 16 * h.rows * h.cols];
    input.read_exact(&mut data).map_err(io)?;
    let f = |k: usize| f64::from_le_bytes(data[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    let matrix = DMatrix::from_fn(h.rows, h.cols, |i, j| {
        let k = 2 * (i * h.cols + j);
        Complex64::new(f(k), f(k + 1))
    });
    Ok(BandLimitedOperator {
        matrix,
        basis: h.basis,
        band: BandLimit::new(h.l),
        parameter: h.parameter,
        margin: h.margin,
        degree: h.degree,
        label: h.label,
    })
}
