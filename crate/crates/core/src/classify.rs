//! Threshold classification of index rasters into health classes.
//!
//! Bins are lower-exclusive / upper-inclusive, matching the usual tabular
//! notation "t0 < v <= t1". Thresholds are held as f32 so that an index
//! value exactly equal to a threshold lands in the lower bin and the next
//! representable f32 above it lands in the upper bin.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::indices::{kind_from_meta, kind_meta, IndexKind, IndexRaster};
use crate::raster::{JsonMap, RasterGrid};

/// Pixel classes. Codes order by health so monotonicity is testable on the
/// codes themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Class {
    NoData = 0,
    NonVegetation = 1,
    Stress = 2,
    Moderate = 3,
    Dense = 4,
}

impl Class {
    /// The four real classes, in code order.
    pub const VALID: [Class; 4] = [
        Class::NonVegetation,
        Class::Stress,
        Class::Moderate,
        Class::Dense,
    ];

    /// The vegetation subdivision, in code order.
    pub const VEGETATION: [Class; 3] = [Class::Stress, Class::Moderate, Class::Dense];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Class> {
        match code {
            0 => Some(Class::NoData),
            1 => Some(Class::NonVegetation),
            2 => Some(Class::Stress),
            3 => Some(Class::Moderate),
            4 => Some(Class::Dense),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Class::NoData => "nodata",
            Class::NonVegetation => "non-vegetation",
            Class::Stress => "stress",
            Class::Moderate => "moderate",
            Class::Dense => "dense",
        }
    }
}

/// The three bin boundaries t0 < t1 < t2 splitting [-1, 1] into
/// non-vegetation, stress, moderate and dense.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSet {
    pub t0: f32,
    pub t1: f32,
    pub t2: f32,
}

impl ThresholdSet {
    pub fn new(t0: f32, t1: f32, t2: f32) -> Result<Self> {
        let set = ThresholdSet { t0, t1, t2 };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Error::InvalidThresholds {
            t0: self.t0 as f64,
            t1: self.t1 as f64,
            t2: self.t2 as f64,
            reason: reason.to_string(),
        };
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t2.is_finite()) {
            return Err(bad("thresholds must be finite"));
        }
        if !(-1.0 <= self.t0 && self.t2 <= 1.0) {
            return Err(bad("thresholds must lie in [-1, 1]"));
        }
        if !(self.t0 < self.t1 && self.t1 < self.t2) {
            return Err(bad("ordering t0 < t1 < t2 violated"));
        }
        Ok(())
    }

    /// Built-in defaults per index.
    pub fn defaults(kind: IndexKind) -> ThresholdSet {
        match kind {
            IndexKind::Ndvi => ThresholdSet { t0: 0.1, t1: 0.3, t2: 0.6 },
            IndexKind::Savi { .. } => ThresholdSet { t0: 0.16, t1: 0.33, t2: 0.64 },
            IndexKind::Vari => ThresholdSet { t0: 0.08, t1: 0.22, t2: 0.59 },
            IndexKind::Mgrvi => ThresholdSet { t0: 0.08, t1: 0.2, t2: 0.59 },
        }
    }

    /// Parses `{"t0": x, "t1": y, "t2": z}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let set: ThresholdSet = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "threshold JSON".into(),
            detail: e.to_string(),
        })?;
        set.validate()?;
        Ok(set)
    }

    pub(crate) fn to_meta_value(self) -> Value {
        let mut m = JsonMap::new();
        m.insert("t0".into(), crate::raster::vgr_f32_number(self.t0));
        m.insert("t1".into(), crate::raster::vgr_f32_number(self.t1));
        m.insert("t2".into(), crate::raster::vgr_f32_number(self.t2));
        Value::Object(m)
    }

    pub(crate) fn from_meta_value(v: &Value) -> Option<Self> {
        let get = |k: &str| v.get(k)?.as_f64().map(|x| x as f32);
        ThresholdSet::new(get("t0")?, get("t1")?, get("t2")?).ok()
    }
}

/// Loads thresholds from a JSON file, falling back to the per-index defaults
/// when no file is given.
pub fn load_thresholds(path: Option<&Path>, kind: IndexKind) -> Result<ThresholdSet> {
    match path {
        None => Ok(ThresholdSet::defaults(kind)),
        Some(p) => ThresholdSet::from_json_str(&fs::read_to_string(p)?),
    }
}

/// Class-coded raster: single-band uint8, 0 = nodata exactly where the
/// source index raster was nodata.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassRaster {
    grid: RasterGrid,
    thresholds: ThresholdSet,
    kind: IndexKind,
}

impl ClassRaster {
    pub fn grid(&self) -> &RasterGrid {
        &self.grid
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn thresholds(&self) -> ThresholdSet {
        self.thresholds
    }

    pub fn codes(&self) -> &[u8] {
        self.grid.values_u8().expect("class rasters are uint8")
    }

    pub fn width(&self) -> usize {
        self.grid.width()
    }

    pub fn height(&self) -> usize {
        self.grid.height()
    }

    pub fn write_vgr(&self, path: &Path) -> Result<()> {
        crate::raster::write_vgr(&self.grid, path)
    }

    /// Reads a class raster written by [`ClassRaster::write_vgr`], restoring
    /// the source kind and thresholds from meta.
    pub fn read_vgr(path: &Path) -> Result<Self> {
        let grid = crate::raster::read_vgr(path)?;
        if grid.band_count() != 1 || grid.nodata_u8()? != 0 {
            return Err(Error::InvalidGrid(
                "a class raster is single-band uint8 with nodata 0".into(),
            ));
        }
        if let Some(bad) = grid.values_u8()?.iter().find(|&&c| c > 4) {
            return Err(Error::InvalidGrid(format!("class code {bad} out of range")));
        }
        let kind = kind_from_meta(grid.meta()).ok_or_else(|| {
            Error::InvalidHeader(format!(
                "{} does not record its source index; meta key \"index\" missing",
                path.display()
            ))
        })?;
        let thresholds = grid
            .meta()
            .get("thresholds")
            .and_then(ThresholdSet::from_meta_value)
            .ok_or_else(|| {
                Error::InvalidHeader(format!(
                    "{} does not record its thresholds; meta key \"thresholds\" missing",
                    path.display()
                ))
            })?;
        Ok(ClassRaster {
            grid,
            thresholds,
            kind,
        })
    }
}

/// Bins every pixel of an index raster: nodata -> 0, v <= t0 -> 1,
/// t0 < v <= t1 -> 2, t1 < v <= t2 -> 3, t2 < v -> 4. Index rasters are
/// clamped to [-1, 1] upstream, so the last bin is exactly (t2, 1].
pub fn classify(index: &IndexRaster, thresholds: ThresholdSet) -> ClassRaster {
    let values = index.values();
    let ThresholdSet { t0, t1, t2 } = thresholds;
    let mut codes = vec![0u8; values.len()];
    codes
        .par_iter_mut()
        .zip(values.par_iter())
        .for_each(|(c, &v)| {
            *c = if index.is_nodata(v) {
                0
            } else {
                debug_assert!((-1.0..=1.0).contains(&v), "unclamped index value {v}");
                if v <= t0 {
                    1
                } else if v <= t1 {
                    2
                } else if v <= t2 {
                    3
                } else {
                    4
                }
            };
        });
    let mut meta = kind_meta(index.kind());
    meta.insert("thresholds".into(), thresholds.to_meta_value());
    let grid = RasterGrid::from_u8(
        index.grid().width(),
        index.grid().height(),
        vec!["classes".to_string()],
        codes,
    )
    .expect("class payload matches index dimensions")
    .with_meta(meta);
    ClassRaster {
        grid,
        thresholds,
        kind: index.kind(),
    }
}
