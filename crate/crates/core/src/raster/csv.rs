//! Plain-CSV ingestion for single-band test fixtures.

use std::fs;
use std::path::Path;

use super::RasterGrid;
use crate::error::{Error, Result};

/// Parses a rectangular comma-separated numeric grid into a single-band
/// float32 raster with NaN nodata. The token "nan" (any case) marks nodata.
pub fn csv_band_from_str(text: &str) -> Result<RasterGrid> {
    let mut values: Vec<f32> = Vec::new();
    let mut width = 0usize;
    let mut height = 0usize;
    for (row, line) in text.lines().enumerate() {
        let mut cols = 0usize;
        for (col, token) in line.split(',').enumerate() {
            let token = token.trim();
            let v = if token.eq_ignore_ascii_case("nan") {
                f32::NAN
            } else {
                match token.parse::<f32>() {
                    Ok(v) if v.is_finite() => v,
                    _ => {
                        return Err(Error::NonNumericToken {
                            row,
                            col,
                            token: token.to_string(),
                        })
                    }
                }
            };
            values.push(v);
            cols += 1;
        }
        if row == 0 {
            width = cols;
        } else if cols != width {
            return Err(Error::RaggedRows {
                row,
                expected: width,
                found: cols,
            });
        }
        height += 1;
    }
    RasterGrid::from_f32(width, height, vec!["band0".to_string()], values)
}

pub fn read_csv_band(path: &Path) -> Result<RasterGrid> {
    let text = fs::read_to_string(path)?;
    csv_band_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grid_with_nan() {
        let g = csv_band_from_str("0.1,0.2\n0.3,nan").unwrap();
        assert_eq!((g.width(), g.height(), g.band_count()), (2, 2, 1));
        let v = g.values_f32().unwrap();
        assert_eq!(&v[..3], &[0.1, 0.2, 0.3]);
        assert!(v[3].is_nan());
    }

    #[test]
    fn ragged_rows() {
        let err = csv_band_from_str("0.1,0.2\n0.3").unwrap_err();
        assert!(matches!(
            err,
            Error::RaggedRows { row: 1, expected: 2, found: 1 }
        ));
    }

    #[test]
    fn non_numeric_token() {
        let err = csv_band_from_str("a,b").unwrap_err();
        assert!(matches!(err, Error::NonNumericToken { row: 0, col: 0, .. }));
        // infinities are not valid samples
        assert!(matches!(
            csv_band_from_str("1.0,inf"),
            Err(Error::NonNumericToken { col: 1, .. })
        ));
    }

    #[test]
    fn empty_input_is_invalid() {
        assert!(matches!(csv_band_from_str(""), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn whitespace_tolerated() {
        let g = csv_band_from_str(" 1.5 , 2.5 \n 3.5 , NaN ").unwrap();
        assert_eq!(g.values_f32().unwrap()[1], 2.5);
        assert!(g.values_f32().unwrap()[3].is_nan());
    }
}
