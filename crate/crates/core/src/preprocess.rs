//! Radiometric scaling and optional 3x3 median denoising, applied ahead of
//! index computation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::{is_nodata, RasterGrid};

/// What to do to a reflectance grid before computing indices. Defaults are
/// the identity: scale 1, no clamp, no filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocessSpec {
    /// Multiplier applied to every valid sample; must be positive and finite.
    pub scale: f64,
    /// Clamp scaled samples into [0, 1].
    pub clamp_to_unit: bool,
    /// Apply a 3x3 median filter per band after scaling.
    pub median3: bool,
}

impl Default for PreprocessSpec {
    fn default() -> Self {
        PreprocessSpec {
            scale: 1.0,
            clamp_to_unit: false,
            median3: false,
        }
    }
}

impl PreprocessSpec {
    pub fn is_identity(&self) -> bool {
        self.scale == 1.0 && !self.clamp_to_unit && !self.median3
    }

    fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::NonPositiveScale(self.scale));
        }
        Ok(())
    }
}

/// Multiplies every valid sample by `spec.scale` (64-bit intermediate,
/// rounded back to f32), optionally clamping into [0, 1]. Nodata samples are
/// copied through bit-for-bit.
pub fn radiometric_scale(grid: &RasterGrid, spec: &PreprocessSpec) -> Result<RasterGrid> {
    spec.validate()?;
    let nodata = grid.nodata_f32()?;
    let values = grid.values_f32()?;
    let mut out = vec![0f32; values.len()];
    out.par_iter_mut().zip(values.par_iter()).for_each(|(o, &v)| {
        *o = if is_nodata(v, nodata) {
            v
        } else {
            let mut scaled = v as f64 * spec.scale;
            if spec.clamp_to_unit {
                scaled = scaled.clamp(0.0, 1.0);
            }
            scaled as f32
        };
    });
    let result = RasterGrid::from_f32_with_nodata(
        grid.width(),
        grid.height(),
        grid.band_names().to_vec(),
        out,
        nodata,
    )?;
    Ok(result.with_meta(grid.meta().clone()))
}

/// 3x3 median filter per band. Borders replicate the edge pixel, nodata
/// neighbours are dropped from the window, and an even-sized window takes
/// the lower-middle element so outputs stay within the input value set.
/// Nodata positions pass through unchanged.
pub fn median_filter_3x3(grid: &RasterGrid) -> Result<RasterGrid> {
    let nodata = grid.nodata_f32()?;
    let width = grid.width();
    let height = grid.height();
    let n = grid.pixel_count();
    let mut out = vec![0f32; grid.values_f32()?.len()];

    for band in 0..grid.band_count() {
        let src = grid.band_f32(band)?;
        let dst = &mut out[band * n..(band + 1) * n];
        dst.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
            let mut window = [0f32; 9];
            for (x, o) in row.iter_mut().enumerate() {
                let center = src[y * width + x];
                if is_nodata(center, nodata) {
                    *o = center;
                    continue;
                }
                let mut k = 0;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let ny = (y as i64 + dy).clamp(0, height as i64 - 1) as usize;
                        let nx = (x as i64 + dx).clamp(0, width as i64 - 1) as usize;
                        let v = src[ny * width + nx];
                        if !is_nodata(v, nodata) {
                            window[k] = v;
                            k += 1;
                        }
                    }
                }
                let window = &mut window[..k];
                window.sort_unstable_by(f32::total_cmp);
                *o = window[(k - 1) / 2];
            }
        });
    }
    let result = RasterGrid::from_f32_with_nodata(
        width,
        height,
        grid.band_names().to_vec(),
        out,
        nodata,
    )?;
    Ok(result.with_meta(grid.meta().clone()))
}

/// Full preprocessing stage: scale, then the median filter when requested.
pub fn preprocess(grid: &RasterGrid, spec: &PreprocessSpec) -> Result<RasterGrid> {
    let scaled = radiometric_scale(grid, spec)?;
    if spec.median3 {
        median_filter_3x3(&scaled)
    } else {
        Ok(scaled)
    }
}
