//! Health map renderer. Binary PPM (P6) keeps the output byte-exact and
//! testable without an image decoder.

use std::fs;
use std::path::Path;

use super::ColorTable;
use crate::classify::ClassRaster;
use crate::error::Result;

/// P6 bytes: `"P6\n<width> <height>\n255\n"` then RGB triples row-major.
pub fn health_map_bytes(classes: &ClassRaster, colors: &ColorTable) -> Vec<u8> {
    let codes = classes.codes();
    let mut out = Vec::with_capacity(32 + codes.len() * 3);
    out.extend_from_slice(
        format!("P6\n{} {}\n255\n", classes.width(), classes.height()).as_bytes(),
    );
    for &code in codes {
        out.extend_from_slice(&colors.color(code));
    }
    out
}

pub fn render_health_map(classes: &ClassRaster, colors: &ColorTable, path: &Path) -> Result<()> {
    fs::write(path, health_map_bytes(classes, colors))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, ThresholdSet};
    use crate::indices::{IndexKind, IndexRaster};
    use crate::raster::RasterGrid;

    fn classes_of(values: Vec<f32>, w: usize, h: usize) -> ClassRaster {
        let grid = RasterGrid::from_f32(w, h, vec!["ndvi".into()], values).unwrap();
        let idx = IndexRaster::new(grid, IndexKind::Ndvi).unwrap();
        classify(&idx, ThresholdSet::defaults(IndexKind::Ndvi))
    }

    #[test]
    fn single_dense_pixel() {
        let classes = classes_of(vec![0.8], 1, 1);
        let bytes = health_map_bytes(&classes, &ColorTable::default());
        assert_eq!(bytes, b"P6\n1 1\n255\n\x2e\x8b\x2e");
        assert_eq!(&bytes[bytes.len() - 3..], &[46, 139, 46]);
    }

    #[test]
    fn nodata_and_nonveg_colors() {
        let classes = classes_of(vec![f32::NAN, 0.0], 2, 1);
        let bytes = health_map_bytes(&classes, &ColorTable::default());
        assert_eq!(&bytes[..11], b"P6\n2 1\n255\n");
        assert_eq!(&bytes[11..14], &[0, 0, 0]);
        assert_eq!(&bytes[14..17], &[120, 108, 92]);
    }

    #[test]
    fn deterministic() {
        let classes = classes_of(vec![0.05, 0.2, 0.5, 0.9], 2, 2);
        let colors = ColorTable::default();
        assert_eq!(
            health_map_bytes(&classes, &colors),
            health_map_bytes(&classes, &colors)
        );
    }

    #[test]
    fn dimensions_match_raster() {
        let classes = classes_of(vec![0.2; 15], 5, 3);
        let bytes = health_map_bytes(&classes, &ColorTable::default());
        let header_end = bytes.iter().filter(|&&b| b == b'\n').count();
        assert!(header_end >= 3);
        assert_eq!(bytes.len(), b"P6\n5 3\n255\n".len() + 15 * 3);
    }
}
