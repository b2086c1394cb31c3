//! Binary and JSON persistence of lattice arrays.
//!
//! Binary layout (little endian): 8-byte magic, `u16` dimension, `u16` reserved (zero),
//! `u32` half-size `M`, then `(2M)^d` interleaved `(re, im)` `f64` pairs.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridFunction, Lattice};
use crate::error::{LnlsError, Result};

pub(crate) const GRID_MAGIC: &[u8; 8] = b"LNLSGRID";
const HEADER_LEN: usize = 16;

pub(crate) fn encode_binary(magic: &[u8; 8], lat: &Lattice, values: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * values.len());
    out.extend_from_slice(magic);
    out.extend_from_slice(&(lat.dim() as u16).to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&(lat.half_size() as u32).to_le_bytes());
    for z in values {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub(crate) fn decode_binary(magic: &[u8; 8], bytes: &[u8]) -> Result<(Lattice, Vec<Complex64>)> {
    if bytes.len() < HEADER_LEN {
        return Err(LnlsError::Format("truncated header".into()));
    }
    if &bytes[..8] != magic {
        return Err(LnlsError::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&bytes[..8]),
            String::from_utf8_lossy(magic)
        )));
    }
    let dim = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let half = u32::from_le_bytes([bytes[12], bytes[13], bytes[14], bytes[15]]) as usize;
    let lat = Lattice::new(dim, half).map_err(|e| LnlsError::Format(e.to_string()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 16 * lat.n_points() {
        return Err(LnlsError::Format(format!(
            "payload has {} bytes, expected {}",
            body.len(),
            16 * lat.n_points()
        )));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    Ok((lat, values))
}

pub fn write_grid_binary(u: &GridFunction, mut w: impl Write) -> Result<()> {
    w.write_all(&encode_binary(GRID_MAGIC, u.lattice(), u.values()))?;
    Ok(())
}

pub fn read_grid_binary(mut r: impl Read) -> Result<GridFunction> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let (lat, values) = decode_binary(GRID_MAGIC, &bytes)?;
    GridFunction::new(lat, values).map_err(|e| LnlsError::Format(e.to_string()))
}

/// JSON debug form of a grid function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridJson {
    pub d: usize,
    #[serde(rename = "M")]
    pub half_size: usize,
    /// `[re, im]` pairs in storage order.
    pub values: Vec<[f64; 2]>,
}

impl From<&GridFunction> for GridJson {
    fn from(u: &GridFunction) -> Self {
        GridJson {
            d: u.lattice().dim(),
            half_size: u.lattice().half_size(),
            values: u.values().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

pub fn write_grid_json(u: &GridFunction, w: impl Write) -> Result<()> {
    serde_json::to_writer(w, &GridJson::from(u))?;
    Ok(())
}

pub fn read_grid_json(r: impl Read) -> Result<GridFunction> {
    let j: GridJson = serde_json::from_reader(r)?;
    let lat = Lattice::new(j.d, j.half_size)?;
    GridFunction::new(lat, j.values.into_iter().map(|[a, b]| Complex64::new(a, b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout_is_fixed() {
        let lat = Lattice::new(2, 4).unwrap();
        let u = GridFunction::constant(lat, Complex64::new(1.0, -2.0));
        let mut buf = Vec::new();
        write_grid_binary(&u, &mut buf).unwrap();
        assert_eq!(&buf[..8], b"LNLSGRID");
        assert_eq!(&buf[8..10], &[2, 0]);
        assert_eq!(&buf[10..12], &[0, 0]);
        assert_eq!(&buf[12..16], &[4, 0, 0, 0]);
        assert_eq!(buf.len(), 16 + 16 * 64);
        assert_eq!(&buf[16..24], &1.0f64.to_le_bytes());
        assert_eq!(&buf[24..32], &(-2.0f64).to_le_bytes());
    }

    #[test]
    fn rejects_corrupt_input() {
        assert!(read_grid_binary(&b"LNLSGR"[..]).is_err());
        let lat = Lattice::new(1, 2).unwrap();
        let mut buf = Vec::new();
        write_grid_binary(&GridFunction::zeros(lat), &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_grid_binary(&bad[..]), Err(LnlsError::Format(_))));
        buf.pop();
        assert!(matches!(read_grid_binary(&buf[..]), Err(LnlsError::Format(_))));
    }

    proptest! {
        #[test]
        fn binary_and_json_round_trip(
            dim in 1usize..=2,
            log_m in 0u32..4,
            seed in proptest::collection::vec(-1e6f64..1e6, 2),
        ) {
            let lat = Lattice::new(dim, 1 << log_m).unwrap();
            let u = GridFunction::from_fn(lat, |x| {
                Complex64::new(seed[0] * x[0].sin(), seed[1] * x[x.len() - 1].cos())
            });
            let mut buf = Vec::new();
            write_grid_binary(&u, &mut buf).unwrap();
            prop_assert_eq!(&read_grid_binary(&buf[..]).unwrap(), &u);
            let mut js = Vec::new();
            write_grid_json(&u, &mut js).unwrap();
            prop_assert_eq!(&read_grid_json(&js[..]).unwrap(), &u);
        }
    }
}
