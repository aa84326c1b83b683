//! VGR, the toolkit's raster container.
//!
//! Layout, bit-exact:
//!   bytes 0..4   magic "VGRR"
//!   bytes 4..8   header length H, unsigned 32-bit little-endian
//!   bytes 8..8+H UTF-8 JSON header object with the required keys
//!                {"width", "height", "dtype", "nodata", "bands", "meta"}
//!   remainder    sample payload, band-sequential, row-major within band,
//!                little-endian; length must be width*height*bands*(4|1)
//!
//! Encoding is a pure function of the grid's logical content: the header is
//! serialized with a fixed key order and `meta` keys sorted, so two writes of
//! the same grid are byte-identical.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{JsonMap, RasterGrid, Samples};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"VGRR";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VgrHeader {
    width: usize,
    height: usize,
    dtype: String,
    nodata: Value,
    bands: Vec<String>,
    meta: JsonMap,
}

/// JSON number carrying an f32 exactly, printed in its shortest form.
/// The shortest decimal form of an f32 reparses to an f64 that rounds back
/// to the same f32, so "0.1" survives instead of "0.10000000149011612".
pub(crate) fn f32_number(v: f32) -> Value {
    let shortest: f64 = format!("{v}").parse().expect("shortest f32 form reparses");
    Value::from(shortest)
}

/// Serializes a grid to VGR bytes. Re-validates the grid first; nothing is
/// produced for a grid that violates its invariants.
pub fn encode_vgr(grid: &RasterGrid) -> Result<Vec<u8>> {
    grid.validate()?;
    let (dtype, nodata) = match &grid.samples {
        Samples::F32 { nodata, .. } => (
            "float32",
            if nodata.is_nan() {
                Value::String("nan".into())
            } else {
                f32_number(*nodata)
            },
        ),
        Samples::U8 { nodata, .. } => ("uint8", Value::from(*nodata)),
    };
    let header = VgrHeader {
        width: grid.width,
        height: grid.height,
        dtype: dtype.to_string(),
        nodata,
        bands: grid.bands.clone(),
        meta: grid.meta.clone(),
    };
    let header_json = serde_json::to_string(&header)
        .map_err(|e| Error::InvalidHeader(e.to_string()))?;
    let header_bytes = header_json.as_bytes();
    let header_len = u32::try_from(header_bytes.len())
        .map_err(|_| Error::InvalidHeader("header exceeds u32 length".into()))?;

    let payload_len = match &grid.samples {
        Samples::F32 { values, .. } => values.len() * 4,
        Samples::U8 { values, .. } => values.len(),
    };
    let mut out = Vec::with_capacity(8 + header_bytes.len() + payload_len);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&header_len.to_le_bytes());
    out.extend_from_slice(header_bytes);
    match &grid.samples {
        Samples::F32 { values, .. } => {
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Samples::U8 { values, .. } => out.extend_from_slice(values),
    }
    Ok(out)
}

pub fn write_vgr(grid: &RasterGrid, path: &Path) -> Result<()> {
    let bytes = encode_vgr(grid)?;
    fs::write(path, bytes)?;
    Ok(())
}

/// Parses VGR bytes back into a grid, bit-exactly.
pub fn decode_vgr(data: &[u8]) -> Result<RasterGrid> {
    if data.len() < 4 || &data[..4] != MAGIC {
        let mut found = [0u8; 4];
        for (i, b) in data.iter().take(4).enumerate() {
            found[i] = *b;
        }
        return Err(Error::BadMagic { found });
    }
    if data.len() < 8 {
        return Err(Error::InvalidHeader("file truncated before header length".into()));
    }
    let header_len = u32::from_le_bytes(data[4..8].try_into().unwrap()) as usize;
    let payload_start = 8usize
        .checked_add(header_len)
        .filter(|&end| end <= data.len())
        .ok_or_else(|| Error::InvalidHeader("file truncated inside header".into()))?;
    let header: VgrHeader = serde_json::from_slice(&data[8..payload_start])
        .map_err(|e| Error::InvalidHeader(e.to_string()))?;

    let sample_size = match header.dtype.as_str() {
        "float32" => 4,
        "uint8" => 1,
        other => return Err(Error::UnsupportedDtype(other.to_string())),
    };
    let sample_count = header
        .width
        .checked_mul(header.height)
        .and_then(|n| n.checked_mul(header.bands.len()))
        .ok_or_else(|| Error::InvalidHeader("header dimensions overflow".into()))?;
    let expected = sample_count * sample_size;
    let payload = &data[payload_start..];
    if payload.len() != expected {
        return Err(Error::HeaderMismatch {
            expected,
            actual: payload.len(),
        });
    }

    let grid = match header.dtype.as_str() {
        "float32" => {
            let nodata = parse_f32_nodata(&header.nodata)?;
            let values = payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect();
            RasterGrid::from_f32_with_nodata(
                header.width,
                header.height,
                header.bands,
                values,
                nodata,
            )?
        }
        _ => {
            let nodata = parse_u8_nodata(&header.nodata)?;
            RasterGrid::from_u8_with_nodata(
                header.width,
                header.height,
                header.bands,
                payload.to_vec(),
                nodata,
            )?
        }
    };
    Ok(grid.with_meta(header.meta))
}

pub fn read_vgr(path: &Path) -> Result<RasterGrid> {
    let data = fs::read(path)?;
    decode_vgr(&data)
}

fn parse_f32_nodata(v: &Value) -> Result<f32> {
    match v {
        Value::String(s) if s.eq_ignore_ascii_case("nan") => Ok(f32::NAN),
        Value::Number(n) => {
            let x = n
                .as_f64()
                .ok_or_else(|| Error::InvalidHeader(format!("nodata {n} is not an f64")))?;
            if !x.is_finite() {
                return Err(Error::InvalidHeader(format!("nodata {x} is not finite")));
            }
            Ok(x as f32)
        }
        other => Err(Error::InvalidHeader(format!(
            "nodata must be a number or \"nan\", got {other}"
        ))),
    }
}

fn parse_u8_nodata(v: &Value) -> Result<u8> {
    v.as_u64()
        .and_then(|n| u8::try_from(n).ok())
        .ok_or_else(|| Error::InvalidHeader(format!("uint8 nodata must be 0..=255, got {v}")))
}
