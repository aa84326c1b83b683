//! Raster data model: an in-memory band-sequential grid plus its band-role
//! mapping, and the VGR/CSV readers and writers built on top of it.

mod csv;
mod vgr;

pub use csv::{csv_band_from_str, read_csv_band};
pub(crate) use vgr::f32_number as vgr_f32_number;
pub use vgr::{decode_vgr, encode_vgr, read_vgr, write_vgr};

use std::fmt;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub type JsonMap = Map<String, Value>;

/// Sample type of a grid payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    Float32,
    Uint8,
}

impl fmt::Display for Dtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dtype::Float32 => f.write_str("float32"),
            Dtype::Uint8 => f.write_str("uint8"),
        }
    }
}

/// Payload storage. The nodata sentinel lives next to the samples so the two
/// can never disagree on dtype.
#[derive(Debug, Clone)]
pub(crate) enum Samples {
    F32 { nodata: f32, values: Vec<f32> },
    U8 { nodata: u8, values: Vec<u8> },
}

/// A width x height x bands grid of samples, band-sequential in memory
/// (all of band 0, then band 1, ...), row-major within each band.
///
/// Grids are immutable after construction and safe to share across threads.
/// Equality is bitwise on the payload, so a NaN nodata sentinel compares
/// equal to itself in the same position.
#[derive(Debug, Clone)]
pub struct RasterGrid {
    pub(crate) width: usize,
    pub(crate) height: usize,
    pub(crate) bands: Vec<String>,
    pub(crate) samples: Samples,
    pub(crate) meta: JsonMap,
}

impl RasterGrid {
    /// Float grid with the default NaN nodata sentinel.
    pub fn from_f32(
        width: usize,
        height: usize,
        bands: Vec<String>,
        values: Vec<f32>,
    ) -> Result<Self> {
        Self::from_f32_with_nodata(width, height, bands, values, f32::NAN)
    }

    pub fn from_f32_with_nodata(
        width: usize,
        height: usize,
        bands: Vec<String>,
        values: Vec<f32>,
        nodata: f32,
    ) -> Result<Self> {
        let grid = RasterGrid {
            width,
            height,
            bands,
            samples: Samples::F32 { nodata, values },
            meta: JsonMap::new(),
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Byte grid with the default 0 nodata sentinel.
    pub fn from_u8(
        width: usize,
        height: usize,
        bands: Vec<String>,
        values: Vec<u8>,
    ) -> Result<Self> {
        Self::from_u8_with_nodata(width, height, bands, values, 0)
    }

    pub fn from_u8_with_nodata(
        width: usize,
        height: usize,
        bands: Vec<String>,
        values: Vec<u8>,
        nodata: u8,
    ) -> Result<Self> {
        let grid = RasterGrid {
            width,
            height,
            bands,
            samples: Samples::U8 { nodata, values },
            meta: JsonMap::new(),
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn with_meta(mut self, meta: JsonMap) -> Self {
        self.meta = meta;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Pixels per band.
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    pub fn band_names(&self) -> &[String] {
        &self.bands
    }

    pub fn band_index(&self, name: &str) -> Option<usize> {
        self.bands.iter().position(|b| b == name)
    }

    pub fn dtype(&self) -> Dtype {
        match self.samples {
            Samples::F32 { .. } => Dtype::Float32,
            Samples::U8 { .. } => Dtype::Uint8,
        }
    }

    pub fn meta(&self) -> &JsonMap {
        &self.meta
    }

    pub fn nodata_f32(&self) -> Result<f32> {
        match &self.samples {
            Samples::F32 { nodata, .. } => Ok(*nodata),
            Samples::U8 { .. } => Err(self.dtype_mismatch(Dtype::Float32)),
        }
    }

    pub fn nodata_u8(&self) -> Result<u8> {
        match &self.samples {
            Samples::U8 { nodata, .. } => Ok(*nodata),
            Samples::F32 { .. } => Err(self.dtype_mismatch(Dtype::Uint8)),
        }
    }

    /// All samples of a float grid, band-sequential.
    pub fn values_f32(&self) -> Result<&[f32]> {
        match &self.samples {
            Samples::F32 { values, .. } => Ok(values),
            Samples::U8 { .. } => Err(self.dtype_mismatch(Dtype::Float32)),
        }
    }

    pub fn values_u8(&self) -> Result<&[u8]> {
        match &self.samples {
            Samples::U8 { values, .. } => Ok(values),
            Samples::F32 { .. } => Err(self.dtype_mismatch(Dtype::Uint8)),
        }
    }

    /// One band of a float grid, row-major.
    pub fn band_f32(&self, band: usize) -> Result<&[f32]> {
        let values = self.values_f32()?;
        let n = self.pixel_count();
        values
            .get(band * n..(band + 1) * n)
            .ok_or_else(|| Error::InvalidGrid(format!("band index {band} out of range")))
    }

    pub fn band_u8(&self, band: usize) -> Result<&[u8]> {
        let values = self.values_u8()?;
        let n = self.pixel_count();
        values
            .get(band * n..(band + 1) * n)
            .ok_or_else(|| Error::InvalidGrid(format!("band index {band} out of range")))
    }

    /// Whether `v` is the nodata sentinel of this float grid.
    pub fn is_nodata_f32(&self, v: f32) -> bool {
        match &self.samples {
            Samples::F32 { nodata, .. } => is_nodata(v, *nodata),
            Samples::U8 { .. } => false,
        }
    }

    fn dtype_mismatch(&self, expected: Dtype) -> Error {
        Error::DtypeMismatch {
            expected,
            found: self.dtype(),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidGrid(format!(
                "dimensions must be at least 1x1, got {}x{}",
                self.width, self.height
            )));
        }
        if self.bands.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one band".into()));
        }
        for (i, name) in self.bands.iter().enumerate() {
            if self.bands[..i].contains(name) {
                return Err(Error::InvalidGrid(format!("duplicate band name {name:?}")));
            }
        }
        let expected = self
            .width
            .checked_mul(self.height)
            .and_then(|n| n.checked_mul(self.bands.len()))
            .ok_or_else(|| Error::InvalidGrid("grid dimensions overflow".into()))?;
        match &self.samples {
            Samples::F32 { nodata, values } => {
                if values.len() != expected {
                    return Err(Error::InvalidGrid(format!(
                        "payload holds {} samples, dimensions imply {expected}",
                        values.len()
                    )));
                }
                if let Some(v) = values
                    .iter()
                    .find(|&&v| !is_nodata(v, *nodata) && !v.is_finite())
                {
                    return Err(Error::InvalidGrid(format!(
                        "non-finite sample {v} is not the nodata sentinel"
                    )));
                }
            }
            Samples::U8 { values, .. } => {
                if values.len() != expected {
                    return Err(Error::InvalidGrid(format!(
                        "payload holds {} samples, dimensions imply {expected}",
                        values.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

impl PartialEq for RasterGrid {
    fn eq(&self, other: &Self) -> bool {
        if self.width != other.width
            || self.height != other.height
            || self.bands != other.bands
            || self.meta != other.meta
        {
            return false;
        }
        match (&self.samples, &other.samples) {
            (
                Samples::F32 { nodata: na, values: va },
                Samples::F32 { nodata: nb, values: vb },
            ) => {
                na.to_bits() == nb.to_bits()
                    && va.len() == vb.len()
                    && va
                        .iter()
                        .zip(vb.iter())
                        .all(|(a, b)| a.to_bits() == b.to_bits())
            }
            (
                Samples::U8 { nodata: na, values: va },
                Samples::U8 { nodata: nb, values: vb },
            ) => na == nb && va == vb,
            _ => false,
        }
    }
}

impl Eq for RasterGrid {}

/// Nodata test for float samples: NaN sentinels match any NaN, otherwise
/// plain value equality.
#[inline]
pub(crate) fn is_nodata(v: f32, nodata: f32) -> bool {
    if nodata.is_nan() {
        v.is_nan()
    } else {
        v == nodata
    }
}

/// Band roles a vegetation index can draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandRole {
    Red,
    Green,
    Blue,
    Nir,
}

impl fmt::Display for BandRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandRole::Red => f.write_str("red"),
            BandRole::Green => f.write_str("green"),
            BandRole::Blue => f.write_str("blue"),
            BandRole::Nir => f.write_str("nir"),
        }
    }
}

/// Maps band roles to band indices of some grid. NIR is optional; RGB-only
/// imagery simply never sets it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandSet {
    pub red: usize,
    pub green: usize,
    pub blue: usize,
    pub nir: Option<usize>,
}

impl BandSet {
    pub fn new(red: usize, green: usize, blue: usize) -> Self {
        BandSet {
            red,
            green,
            blue,
            nir: None,
        }
    }

    pub fn with_nir(mut self, nir: usize) -> Self {
        self.nir = Some(nir);
        self
    }

    /// Resolves roles by the conventional band names "red", "green", "blue"
    /// and (when present) "nir".
    pub fn from_band_names(grid: &RasterGrid) -> Result<Self> {
        let find = |role: BandRole| {
            grid.band_index(&role.to_string())
                .ok_or(Error::MissingBand(role))
        };
        let mut set = BandSet::new(find(BandRole::Red)?, find(BandRole::Green)?, find(BandRole::Blue)?);
        if let Some(nir) = grid.band_index("nir") {
            set = set.with_nir(nir);
        }
        set.validate(grid)?;
        Ok(set)
    }

    /// Checks every present index against the grid and that distinct roles
    /// name distinct bands.
    pub fn validate(&self, grid: &RasterGrid) -> Result<()> {
        let mut seen: Vec<(BandRole, usize)> = Vec::with_capacity(4);
        let roles = [
            (BandRole::Red, Some(self.red)),
            (BandRole::Green, Some(self.green)),
            (BandRole::Blue, Some(self.blue)),
            (BandRole::Nir, self.nir),
        ];
        for (role, idx) in roles {
            let Some(idx) = idx else { continue };
            if idx >= grid.band_count() {
                return Err(Error::InvalidBandSet(format!(
                    "{role} maps to band {idx} but the grid has {} bands",
                    grid.band_count()
                )));
            }
            if let Some((other, _)) = seen.iter().find(|(_, i)| *i == idx) {
                return Err(Error::InvalidBandSet(format!(
                    "{role} and {other} both map to band {idx}"
                )));
            }
            seen.push((role, idx));
        }
        Ok(())
    }
}

/// Two rasters are co-registered when their pixel grids line up; band counts
/// are free to differ.
pub fn check_coregistered(a: &RasterGrid, b: &RasterGrid) -> Result<()> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch {
            a_width: a.width,
            a_height: a.height,
            b_width: b.width,
            b_height: b.height,
        });
    }
    Ok(())
}
