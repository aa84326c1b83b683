//! The four vegetation indices.
//!
//! All four are pure per-pixel maps: every output pixel depends only on its
//! own band samples, so row partitioning cannot change results. Arithmetic
//! runs in f64 and rounds to f32 once, at the output.
//!
//! Degenerate denominators map to nodata rather than +/-1 or an error; that
//! keeps such pixels out of every downstream statistics denominator.

use rayon::prelude::*;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::raster::{BandRole, BandSet, JsonMap, RasterGrid};

/// VARI's denominator G + R - B is treated as zero below this magnitude.
/// Reflectance inputs are O(1), so only true cancellation lands here.
const VARI_DEGENERATE_EPS: f64 = 1e-12;

/// Which index to compute. SAVI carries its soil-brightness correction
/// factor; 0.5 is the usual choice and the crate-wide default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndexKind {
    Ndvi,
    Savi { l: f64 },
    Vari,
    Mgrvi,
}

pub const DEFAULT_SAVI_L: f64 = 0.5;

impl IndexKind {
    pub fn name(self) -> &'static str {
        match self {
            IndexKind::Ndvi => "ndvi",
            IndexKind::Savi { .. } => "savi",
            IndexKind::Vari => "vari",
            IndexKind::Mgrvi => "mgrvi",
        }
    }

    /// NDVI and SAVI need a near-infrared band; VARI and MGRVI are RGB-only.
    pub fn requires_nir(self) -> bool {
        matches!(self, IndexKind::Ndvi | IndexKind::Savi { .. })
    }

    pub fn from_name(name: &str) -> Option<IndexKind> {
        Self::from_name_with_l(name, DEFAULT_SAVI_L)
    }

    pub fn from_name_with_l(name: &str, savi_l: f64) -> Option<IndexKind> {
        match name.to_ascii_lowercase().as_str() {
            "ndvi" => Some(IndexKind::Ndvi),
            "savi" => Some(IndexKind::Savi { l: savi_l }),
            "vari" => Some(IndexKind::Vari),
            "mgrvi" => Some(IndexKind::Mgrvi),
            _ => None,
        }
    }
}

/// A computed index raster: single-band float32, NaN nodata, every valid
/// sample in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct IndexRaster {
    grid: RasterGrid,
    kind: IndexKind,
}

impl IndexRaster {
    /// Wraps an existing grid, enforcing the single-band/range invariants.
    /// Mostly useful when loading a previously written index raster.
    pub fn new(grid: RasterGrid, kind: IndexKind) -> Result<Self> {
        if grid.band_count() != 1 {
            return Err(Error::InvalidGrid(format!(
                "an index raster has exactly one band, got {}",
                grid.band_count()
            )));
        }
        let nodata = grid.nodata_f32()?;
        for &v in grid.values_f32()? {
            if !crate::raster::is_nodata(v, nodata) && !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidGrid(format!(
                    "index value {v} outside [-1, 1]"
                )));
            }
        }
        Ok(IndexRaster { grid, kind })
    }

    pub fn grid(&self) -> &RasterGrid {
        &self.grid
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn values(&self) -> &[f32] {
        self.grid.values_f32().expect("index rasters are float32")
    }

    pub fn is_nodata(&self, v: f32) -> bool {
        self.grid.is_nodata_f32(v)
    }

    pub fn write_vgr(&self, path: &std::path::Path) -> Result<()> {
        crate::raster::write_vgr(&self.grid, path)
    }

    /// Reads an index raster written by [`IndexRaster::write_vgr`], taking
    /// the kind (and SAVI's L) from the file's meta object.
    pub fn read_vgr(path: &std::path::Path) -> Result<Self> {
        let grid = crate::raster::read_vgr(path)?;
        let kind = kind_from_meta(grid.meta()).ok_or_else(|| {
            Error::InvalidHeader(format!(
                "{} does not record which index produced it; meta key \"index\" missing",
                path.display()
            ))
        })?;
        IndexRaster::new(grid, kind)
    }
}

/// Meta object recording which index produced a raster.
pub(crate) fn kind_meta(kind: IndexKind) -> JsonMap {
    let mut meta = JsonMap::new();
    meta.insert("index".into(), Value::String(kind.name().into()));
    if let IndexKind::Savi { l } = kind {
        meta.insert("savi_l".into(), Value::from(l));
    }
    meta
}

pub(crate) fn kind_from_meta(meta: &JsonMap) -> Option<IndexKind> {
    let name = meta.get("index")?.as_str()?;
    let l = meta
        .get("savi_l")
        .and_then(Value::as_f64)
        .unwrap_or(DEFAULT_SAVI_L);
    IndexKind::from_name_with_l(name, l)
}

/// NDVI = (NIR - R) / (NIR + R)
pub fn compute_ndvi(grid: &RasterGrid, bands: &BandSet) -> Result<IndexRaster> {
    bands.validate(grid)?;
    let nir = bands.nir.ok_or(Error::MissingBand(BandRole::Nir))?;
    map_bands(grid, [nir, bands.red], IndexKind::Ndvi, |[nir, r]| {
        let denom = nir + r;
        if denom == 0.0 {
            None
        } else {
            Some((nir - r) / denom)
        }
    })
}

/// SAVI = ((NIR - R) * (1 + L)) / (NIR + R + L)
pub fn compute_savi(grid: &RasterGrid, bands: &BandSet, l: f64) -> Result<IndexRaster> {
    bands.validate(grid)?;
    let nir = bands.nir.ok_or(Error::MissingBand(BandRole::Nir))?;
    if !(l >= 0.0 && l.is_finite()) {
        return Err(Error::NegativeL(l));
    }
    map_bands(grid, [nir, bands.red], IndexKind::Savi { l }, move |[nir, r]| {
        let denom = nir + r + l;
        if denom == 0.0 {
            None
        } else {
            Some((nir - r) * (1.0 + l) / denom)
        }
    })
}

/// VARI = (G - R) / (G + R - B)
pub fn compute_vari(grid: &RasterGrid, bands: &BandSet) -> Result<IndexRaster> {
    bands.validate(grid)?;
    map_bands(
        grid,
        [bands.green, bands.red, bands.blue],
        IndexKind::Vari,
        |[g, r, b]| {
            // cancellation has to be detected in payload precision: samples
            // are f32, so G + R - B vanishes there, not in the f64 promotion
            let denom = f64::from((g as f32 + r as f32) - b as f32);
            if denom.abs() < VARI_DEGENERATE_EPS {
                None
            } else {
                Some((g - r) / denom)
            }
        },
    )
}

/// MGRVI = (G^2 - R^2) / (G^2 + R^2)
pub fn compute_mgrvi(grid: &RasterGrid, bands: &BandSet) -> Result<IndexRaster> {
    bands.validate(grid)?;
    map_bands(
        grid,
        [bands.green, bands.red],
        IndexKind::Mgrvi,
        |[g, r]| {
            let denom = g * g + r * r;
            if denom == 0.0 {
                None
            } else {
                Some((g * g - r * r) / denom)
            }
        },
    )
}

/// Dispatch on [`IndexKind`].
pub fn compute_index(grid: &RasterGrid, bands: &BandSet, kind: IndexKind) -> Result<IndexRaster> {
    match kind {
        IndexKind::Ndvi => compute_ndvi(grid, bands),
        IndexKind::Savi { l } => compute_savi(grid, bands, l),
        IndexKind::Vari => compute_vari(grid, bands),
        IndexKind::Mgrvi => compute_mgrvi(grid, bands),
    }
}

/// Per-pixel map over `N` input bands. `f` sees f64 band samples and returns
/// the raw index value, or `None` for a degenerate denominator; results are
/// clamped into [-1, 1] and rounded to f32. Any nodata input makes the
/// output pixel nodata.
fn map_bands<const N: usize>(
    grid: &RasterGrid,
    band_idx: [usize; N],
    kind: IndexKind,
    f: impl Fn([f64; N]) -> Option<f64> + Sync,
) -> Result<IndexRaster> {
    let nodata = grid.nodata_f32()?;
    let mut inputs: [&[f32]; N] = [&[]; N];
    for (slot, &idx) in inputs.iter_mut().zip(band_idx.iter()) {
        *slot = grid.band_f32(idx)?;
    }
    let n = grid.pixel_count();
    let mut out = vec![0f32; n];
    out.par_iter_mut().enumerate().for_each(|(i, o)| {
        let mut vals = [0f64; N];
        let mut valid = true;
        for (v, band) in vals.iter_mut().zip(inputs.iter()) {
            let s = band[i];
            if crate::raster::is_nodata(s, nodata) {
                valid = false;
                break;
            }
            *v = s as f64;
        }
        *o = if valid {
            match f(vals) {
                Some(v) => v.clamp(-1.0, 1.0) as f32,
                None => f32::NAN,
            }
        } else {
            f32::NAN
        };
    });
    let out_grid = RasterGrid::from_f32(
        grid.width(),
        grid.height(),
        vec![kind.name().to_string()],
        out,
    )?
    .with_meta(kind_meta(kind));
    Ok(IndexRaster {
        grid: out_grid,
        kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Grid with bands red, green, blue, nir from per-band pixel vectors.
    fn rgbn(
        w: usize,
        h: usize,
        r: &[f32],
        g: &[f32],
        b: &[f32],
        nir: &[f32],
    ) -> (RasterGrid, BandSet) {
        let mut values = Vec::new();
        values.extend_from_slice(r);
        values.extend_from_slice(g);
        values.extend_from_slice(b);
        values.extend_from_slice(nir);
        let grid = RasterGrid::from_f32(
            w,
            h,
            ["red", "green", "blue", "nir"].map(String::from).to_vec(),
            values,
        )
        .unwrap();
        (grid, BandSet::new(0, 1, 2).with_nir(3))
    }

    #[test]
    fn ndvi_values() {
        let (grid, bands) = rgbn(
            3,
            1,
            &[0.1, 0.3, 0.0],
            &[0.0; 3],
            &[0.0; 3],
            &[0.5, 0.3, 0.0],
        );
        let out = compute_ndvi(&grid, &bands).unwrap();
        let v = out.values();
        assert!((v[0] - 2.0 / 3.0).abs() < 1e-6); // 0.4 / 0.6
        assert_eq!(v[1], 0.0);
        assert!(v[2].is_nan()); // zero denominator
    }

    #[test]
    fn ndvi_requires_nir() {
        let (grid, _) = rgbn(1, 1, &[0.1], &[0.2], &[0.3], &[0.4]);
        let bands = BandSet::new(0, 1, 2);
        assert!(matches!(
            compute_ndvi(&grid, &bands),
            Err(Error::MissingBand(BandRole::Nir))
        ));
    }

    #[test]
    fn savi_values() {
        let (grid, bands) = rgbn(2, 1, &[0.1, 0.0], &[0.0; 2], &[0.0; 2], &[0.5, 0.0]);
        let out = compute_savi(&grid, &bands, 0.5).unwrap();
        let v = out.values();
        assert!((v[0] - 0.5454545).abs() < 1e-6); // (0.4 * 1.5) / 1.1
        assert!(!v[1].is_nan()); // denominator is L = 0.5

        let zero_l = compute_savi(&grid, &bands, 0.0).unwrap();
        assert!(zero_l.values()[1].is_nan()); // now truly degenerate
    }

    #[test]
    fn savi_rejects_negative_l() {
        let (grid, bands) = rgbn(1, 1, &[0.1], &[0.2], &[0.3], &[0.4]);
        assert!(matches!(
            compute_savi(&grid, &bands, -0.1),
            Err(Error::NegativeL(_))
        ));
        assert!(compute_savi(&grid, &bands, f64::NAN).is_err());
    }

    #[test]
    fn savi_with_zero_l_equals_ndvi() {
        let r: Vec<f32> = (0..100).map(|i| i as f32 / 101.0).collect();
        let nir: Vec<f32> = (0..100).map(|i| (100 - i) as f32 / 99.0).collect();
        let (grid, bands) = rgbn(10, 10, &r, &[0.0; 100], &[0.0; 100], &nir);
        let a = compute_savi(&grid, &bands, 0.0).unwrap();
        let b = compute_ndvi(&grid, &bands).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!(x.is_nan() == y.is_nan());
            if !x.is_nan() {
                assert!((x - y).abs() as f64 <= 1e-12);
            }
        }
    }

    #[test]
    fn vari_values() {
        let (grid, bands) = rgbn(
            3,
            1,
            &[0.2, 0.3, 0.1],
            &[0.4, 0.3, 0.2],
            &[0.1, 0.1, 0.3],
            &[0.0; 3],
        );
        let out = compute_vari(&grid, &bands).unwrap();
        let v = out.values();
        assert!((v[0] - 0.4).abs() < 1e-6); // 0.2 / 0.5
        assert_eq!(v[1], 0.0);
        assert!(v[2].is_nan()); // G + R - B = 0
    }

    #[test]
    fn mgrvi_values() {
        let (grid, bands) = rgbn(3, 1, &[0.2, 0.5, 0.0], &[0.4, 0.5, 0.0], &[0.0; 3], &[0.0; 3]);
        let out = compute_mgrvi(&grid, &bands).unwrap();
        let v = out.values();
        assert!((v[0] - 0.6).abs() < 1e-6); // 0.12 / 0.20
        assert_eq!(v[1], 0.0);
        assert!(v[2].is_nan());
    }

    #[test]
    fn ndvi_monotone_in_nir() {
        let nir = [0.1, 0.2, 0.4, 0.8];
        let (grid, bands) = rgbn(4, 1, &[0.2; 4], &[0.0; 4], &[0.0; 4], &nir);
        let out = compute_ndvi(&grid, &bands).unwrap();
        let v = out.values();
        assert!(v[0] < v[1] && v[1] < v[2] && v[2] < v[3]);
    }

    #[test]
    fn nodata_closure() {
        // pixel 0: valid; pixel 1: nodata input; pixel 2: degenerate denom
        let (grid, bands) = rgbn(
            3,
            1,
            &[0.1, f32::NAN, 0.0],
            &[0.0; 3],
            &[0.0; 3],
            &[0.5, 0.5, 0.0],
        );
        let out = compute_ndvi(&grid, &bands).unwrap();
        let v = out.values();
        assert!(!v[0].is_nan());
        assert!(v[1].is_nan());
        assert!(v[2].is_nan());
    }

    #[test]
    fn outputs_clamped() {
        // NIR + R > 0 but NIR - R magnitudes force |raw| > 1 when denom < numerator
        let (grid, bands) = rgbn(1, 1, &[-0.3], &[0.0], &[0.0], &[0.5]);
        let out = compute_ndvi(&grid, &bands).unwrap();
        assert_eq!(out.values()[0], 1.0); // 0.8 / 0.2 = 4 clamped
    }

    #[test]
    fn kind_meta_roundtrip() {
        for kind in [
            IndexKind::Ndvi,
            IndexKind::Savi { l: 0.25 },
            IndexKind::Vari,
            IndexKind::Mgrvi,
        ] {
            assert_eq!(kind_from_meta(&kind_meta(kind)), Some(kind));
        }
    }

    #[test]
    fn index_raster_vgr_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("savi.vgr");
        let (grid, bands) = rgbn(2, 1, &[0.1, 0.2], &[0.0; 2], &[0.0; 2], &[0.5, 0.4]);
        let out = compute_savi(&grid, &bands, 0.25).unwrap();
        out.write_vgr(&path).unwrap();
        let back = IndexRaster::read_vgr(&path).unwrap();
        assert_eq!(back.kind(), IndexKind::Savi { l: 0.25 });
        assert_eq!(back, out);
    }

    #[test]
    fn new_rejects_out_of_range() {
        let g = RasterGrid::from_f32(1, 1, vec!["x".into()], vec![1.5]).unwrap();
        assert!(IndexRaster::new(g, IndexKind::Ndvi).is_err());
    }
}
