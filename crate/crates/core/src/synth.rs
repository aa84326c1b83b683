//! Synthetic scene generation.
//!
//! Builds band rasters whose index values land at the midpoints of the
//! requested class bins, with exact per-class pixel counts. Midpoint targets
//! (rather than random draws) keep every pixel far from the bin edges, so
//! float32 rounding cannot move a pixel across a threshold and the
//! classify(compute(generate(spec))) round trip reproduces the requested
//! counts exactly.
//!
//! Band values come from algebraic inversion of each index at fixed anchor
//! reflectances. Pixels are laid out in raster order: all nodata first, then
//! non-vegetation, stress, moderate, dense.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::classify::{Class, ThresholdSet};
use crate::error::{Error, Result};
use crate::indices::{IndexKind, DEFAULT_SAVI_L};
use crate::raster::RasterGrid;

/// Green level of NDVI/SAVI scenes, where green is not inverted. Sits in
/// the moderate VARI/MGRVI bins of the default tables, so the RGB indices
/// of a NIR-driven scene still see vegetation.
const NIR_SCENE_GREEN: f32 = 0.3;

/// Anchor reflectances held constant during inversion.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedBands {
    pub red: f32,
    pub blue: f32,
}

impl Default for FixedBands {
    fn default() -> Self {
        FixedBands { red: 0.2, blue: 0.1 }
    }
}

/// Target pixel counts per class; they must sum to width * height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassCounts {
    #[serde(default)]
    pub non_vegetation: u64,
    #[serde(default)]
    pub stress: u64,
    #[serde(default)]
    pub moderate: u64,
    #[serde(default)]
    pub dense: u64,
    #[serde(default)]
    pub nodata: u64,
}

impl ClassCounts {
    pub fn total(&self) -> u64 {
        self.nodata + self.non_vegetation + self.stress + self.moderate + self.dense
    }

    fn of(&self, class: Class) -> u64 {
        match class {
            Class::NoData => self.nodata,
            Class::NonVegetation => self.non_vegetation,
            Class::Stress => self.stress,
            Class::Moderate => self.moderate,
            Class::Dense => self.dense,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub kind: IndexKind,
    pub thresholds: ThresholdSet,
    pub fractions: ClassCounts,
    pub fixed_bands: FixedBands,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneSpecJson {
    width: usize,
    height: usize,
    kind: String,
    #[serde(default)]
    savi_l: Option<f64>,
    #[serde(default)]
    thresholds: Option<ThresholdSet>,
    fractions: ClassCounts,
    #[serde(default)]
    fixed_bands: Option<FixedBands>,
}

impl SceneSpec {
    pub fn new(
        width: usize,
        height: usize,
        kind: IndexKind,
        thresholds: ThresholdSet,
        fractions: ClassCounts,
    ) -> Result<Self> {
        let spec = SceneSpec {
            width,
            height,
            kind,
            thresholds,
            fractions,
            fixed_bands: FixedBands::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Parses the scene spec JSON; thresholds default per index and the
    /// anchors default to red 0.2, blue 0.1.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: SceneSpecJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "scene spec JSON".into(),
            detail: e.to_string(),
        })?;
        let kind = IndexKind::from_name_with_l(&raw.kind, raw.savi_l.unwrap_or(DEFAULT_SAVI_L))
            .ok_or_else(|| Error::Parse {
                what: "scene spec JSON".into(),
                detail: format!("unknown index kind {:?}", raw.kind),
            })?;
        let spec = SceneSpec {
            width: raw.width,
            height: raw.height,
            kind,
            thresholds: raw.thresholds.unwrap_or_else(|| ThresholdSet::defaults(kind)),
            fractions: raw.fractions,
            fixed_bands: raw.fixed_bands.unwrap_or_default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        let expected = self.width as u64 * self.height as u64;
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidGrid(format!(
                "dimensions must be at least 1x1, got {}x{}",
                self.width, self.height
            )));
        }
        let actual = self.fractions.total();
        if actual != expected {
            return Err(Error::CountMismatch { expected, actual });
        }
        if let IndexKind::Savi { l } = self.kind {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::NegativeL(l));
            }
        }
        ThresholdSet::new(self.thresholds.t0, self.thresholds.t1, self.thresholds.t2)?;
        if !(self.fixed_bands.red > 0.0 && self.fixed_bands.red.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "red anchor must be positive and finite, got {}",
                self.fixed_bands.red
            )));
        }
        if !(self.fixed_bands.blue >= 0.0 && self.fixed_bands.blue.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "blue anchor must be non-negative and finite, got {}",
                self.fixed_bands.blue
            )));
        }
        // every class actually present must be invertible
        for class in Class::VALID {
            if self.fractions.of(class) > 0 {
                self.invert(self.midpoint(class))?;
            }
        }
        Ok(())
    }

    /// Midpoint of the class's index bin.
    fn midpoint(&self, class: Class) -> f64 {
        let ThresholdSet { t0, t1, t2 } = self.thresholds;
        match class {
            Class::NonVegetation => (-1.0 + t0 as f64) / 2.0,
            Class::Stress => (t0 as f64 + t1 as f64) / 2.0,
            Class::Moderate => (t1 as f64 + t2 as f64) / 2.0,
            Class::Dense => (t2 as f64 + 1.0) / 2.0,
            Class::NoData => f64::NAN,
        }
    }

    /// Solves the index equation for the variable band (NIR for NDVI/SAVI,
    /// G for VARI/MGRVI) holding the anchors fixed.
    fn invert(&self, target: f64) -> Result<f64> {
        let r = self.fixed_bands.red as f64;
        let b = self.fixed_bands.blue as f64;
        if !(-1.0 < target && target < 1.0) {
            return Err(Error::UninvertibleTarget {
                target,
                detail: "target must lie strictly inside (-1, 1)".into(),
            });
        }
        let value = match self.kind {
            IndexKind::Ndvi => r * (1.0 + target) / (1.0 - target),
            IndexKind::Savi { l } => (r * (1.0 + l) + target * (r + l)) / (1.0 + l - target),
            IndexKind::Vari => (r + target * (r - b)) / (1.0 - target),
            IndexKind::Mgrvi => r * ((1.0 + target) / (1.0 - target)).sqrt(),
        };
        if !value.is_finite() || value < 0.0 {
            return Err(Error::UninvertibleTarget {
                target,
                detail: format!("inversion produces band value {value}"),
            });
        }
        Ok(value)
    }
}

/// Per-class band values (red, green, blue, optional nir).
fn class_bands(spec: &SceneSpec, class: Class) -> Result<[f32; 4]> {
    let r = spec.fixed_bands.red;
    let b = spec.fixed_bands.blue;
    if class == Class::NoData {
        return Ok([f32::NAN; 4]);
    }
    let value = spec.invert(spec.midpoint(class))? as f32;
    Ok(if spec.kind.requires_nir() {
        [r, NIR_SCENE_GREEN, b, value]
    } else {
        [r, value, b, 0.0]
    })
}

/// Generates the scene. Single-threaded by design: pixel ordering is part of
/// the contract, and identical specs must produce bit-identical grids.
pub fn generate_scene(spec: &SceneSpec) -> Result<RasterGrid> {
    spec.validate()?;
    let n = spec.width * spec.height;
    let with_nir = spec.kind.requires_nir();
    let band_count = if with_nir { 4 } else { 3 };

    let order = [
        Class::NoData,
        Class::NonVegetation,
        Class::Stress,
        Class::Moderate,
        Class::Dense,
    ];
    let mut values = vec![0f32; n * band_count];
    let mut offset = 0usize;
    for class in order {
        let count = spec.fractions.of(class) as usize;
        if count == 0 {
            continue;
        }
        let bands = class_bands(spec, class)?;
        for band in 0..band_count {
            values[band * n + offset..band * n + offset + count].fill(bands[band]);
        }
        offset += count;
    }

    let mut names: Vec<String> = ["red", "green", "blue"].map(String::from).to_vec();
    if with_nir {
        names.push("nir".to_string());
    }
    RasterGrid::from_f32(spec.width, spec.height, names, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;
    use crate::indices::compute_index;
    use crate::raster::BandSet;

    fn counts(nonveg: u64, stress: u64, moderate: u64, dense: u64, nodata: u64) -> ClassCounts {
        ClassCounts {
            non_vegetation: nonveg,
            stress,
            moderate,
            dense,
            nodata,
        }
    }

    fn roundtrip_counts(spec: &SceneSpec) -> [u64; 5] {
        let grid = generate_scene(spec).unwrap();
        let bands = BandSet::from_band_names(&grid).unwrap();
        let index = compute_index(&grid, &bands, spec.kind).unwrap();
        let classes = classify(&index, spec.thresholds);
        let mut tally = [0u64; 5];
        for &c in classes.codes() {
            tally[c as usize] += 1;
        }
        tally
    }

    #[test]
    fn ndvi_inversion_example() {
        // target 0.2 with anchor R = 0.2 gives NIR = 0.3
        let spec = SceneSpec::new(
            1,
            1,
            IndexKind::Ndvi,
            ThresholdSet::defaults(IndexKind::Ndvi),
            counts(0, 1, 0, 0, 0),
        )
        .unwrap();
        let nir = spec.invert(0.2).unwrap();
        assert!((nir - 0.3).abs() < 1e-6);
        // forward substitution against the anchor actually used
        let r = spec.fixed_bands.red as f64;
        assert!(((nir - r) / (nir + r) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn mgrvi_inversion_symmetry() {
        let spec = SceneSpec::new(
            1,
            1,
            IndexKind::Mgrvi,
            ThresholdSet::defaults(IndexKind::Mgrvi),
            counts(1, 0, 0, 0, 0),
        )
        .unwrap();
        assert_eq!(spec.invert(0.0).unwrap(), spec.fixed_bands.red as f64);
    }

    #[test]
    fn roundtrip_is_exact_for_every_kind() {
        for kind in [
            IndexKind::Ndvi,
            IndexKind::Savi { l: 0.5 },
            IndexKind::Vari,
            IndexKind::Mgrvi,
        ] {
            let spec = SceneSpec::new(
                20,
                10,
                kind,
                ThresholdSet::defaults(kind),
                counts(80, 60, 40, 15, 5),
            )
            .unwrap();
            assert_eq!(roundtrip_counts(&spec), [5, 80, 60, 40, 15], "{kind:?}");
        }
    }

    #[test]
    fn table_fraction_scene_roundtrips() {
        let spec = SceneSpec::new(
            100,
            100,
            IndexKind::Ndvi,
            ThresholdSet::defaults(IndexKind::Ndvi),
            counts(7615, 1467, 913, 5, 0),
        )
        .unwrap();
        assert_eq!(roundtrip_counts(&spec), [0, 7615, 1467, 913, 5]);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = SceneSpec::new(
            8,
            8,
            IndexKind::Vari,
            ThresholdSet::defaults(IndexKind::Vari),
            counts(30, 20, 10, 3, 1),
        )
        .unwrap();
        assert_eq!(generate_scene(&spec).unwrap(), generate_scene(&spec).unwrap());
    }

    #[test]
    fn nodata_pixels_lead_and_blank_all_bands() {
        let spec = SceneSpec::new(
            4,
            1,
            IndexKind::Ndvi,
            ThresholdSet::defaults(IndexKind::Ndvi),
            counts(2, 0, 0, 0, 2),
        )
        .unwrap();
        let grid = generate_scene(&spec).unwrap();
        for band in 0..grid.band_count() {
            let s = grid.band_f32(band).unwrap();
            assert!(s[0].is_nan() && s[1].is_nan());
            assert!(!s[2].is_nan() && !s[3].is_nan());
        }
    }

    #[test]
    fn count_mismatch_rejected() {
        let err = SceneSpec::new(
            2,
            2,
            IndexKind::Ndvi,
            ThresholdSet::defaults(IndexKind::Ndvi),
            counts(1, 1, 1, 0, 0),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::CountMismatch { expected: 4, actual: 3 }
        ));
    }

    #[test]
    fn uninvertible_dense_bin_at_t2_one() {
        // t2 = 1 makes the dense midpoint 1, which no finite bands reach
        let err = SceneSpec::new(
            2,
            1,
            IndexKind::Ndvi,
            ThresholdSet::new(0.1, 0.3, 1.0).unwrap(),
            counts(1, 0, 0, 1, 0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UninvertibleTarget { .. }));
    }

    #[test]
    fn savi_negative_nir_rejected() {
        // with L = 0.5 and R = 0.2 a non-vegetation midpoint of -0.45
        // inverts to a negative NIR
        let err = SceneSpec::new(
            1,
            1,
            IndexKind::Savi { l: 0.5 },
            ThresholdSet::new(0.1, 0.3, 0.6).unwrap(),
            counts(1, 0, 0, 0, 0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UninvertibleTarget { .. }));
    }

    #[test]
    fn spec_json_with_defaults() {
        let spec = SceneSpec::from_json_str(
            r#"{
                "width": 10, "height": 10, "kind": "savi",
                "fractions": {"non_vegetation": 50, "stress": 30, "moderate": 15, "dense": 4, "nodata": 1}
            }"#,
        )
        .unwrap();
        assert_eq!(spec.kind, IndexKind::Savi { l: 0.5 });
        assert_eq!(spec.thresholds, ThresholdSet::defaults(spec.kind));
        assert_eq!(spec.fixed_bands, FixedBands::default());

        let explicit = SceneSpec::from_json_str(
            r#"{
                "width": 2, "height": 1, "kind": "savi", "savi_l": 0.25,
                "thresholds": {"t0": 0.1, "t1": 0.4, "t2": 0.7},
                "fractions": {"stress": 2},
                "fixed_bands": {"red": 0.3, "blue": 0.05}
            }"#,
        )
        .unwrap();
        assert_eq!(explicit.kind, IndexKind::Savi { l: 0.25 });
        assert_eq!(explicit.fixed_bands.red, 0.3);
        assert!(SceneSpec::from_json_str("{}").is_err());
    }

    #[test]
    fn rgb_scene_has_three_bands() {
        let spec = SceneSpec::new(
            2,
            1,
            IndexKind::Mgrvi,
            ThresholdSet::defaults(IndexKind::Mgrvi),
            counts(1, 1, 0, 0, 0),
        )
        .unwrap();
        let grid = generate_scene(&spec).unwrap();
        assert_eq!(grid.band_names(), &["red", "green", "blue"]);
    }
}
