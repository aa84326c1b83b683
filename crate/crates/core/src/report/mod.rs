//! Deterministic renderers: binary PPM health maps and SVG pie charts.
//! No timestamps, no locale: outputs are pure functions of their inputs.

mod pie;
mod ppm;

pub use pie::{pie_svg, render_pie, PieMode};
pub use ppm::{health_map_bytes, render_health_map};

use crate::error::{Error, Result};

/// Class code -> RGB. Index 0 is the nodata color.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColorTable {
    colors: [[u8; 3]; 5],
}

impl Default for ColorTable {
    fn default() -> Self {
        ColorTable {
            colors: [
                [0, 0, 0],      // nodata
                [120, 108, 92], // non-vegetation: bare soil
                [214, 69, 56],  // stress: red
                [237, 201, 72], // moderate: yellow
                [46, 139, 46],  // dense: green
            ],
        }
    }
}

impl ColorTable {
    pub fn new(colors: [[u8; 3]; 5]) -> Self {
        ColorTable { colors }
    }

    pub fn color(&self, code: u8) -> [u8; 3] {
        self.colors[code as usize]
    }

    pub(crate) fn hex(&self, code: u8) -> String {
        let [r, g, b] = self.color(code);
        format!("#{r:02x}{g:02x}{b:02x}")
    }

    /// Parses `{"0": [r,g,b], ..., "4": [r,g,b]}`; all five codes required.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let map: std::collections::BTreeMap<String, [u8; 3]> =
            serde_json::from_str(text).map_err(|e| Error::Parse {
                what: "color table JSON".into(),
                detail: e.to_string(),
            })?;
        let mut colors = [[0u8; 3]; 5];
        for code in 0u8..5 {
            colors[code as usize] =
                *map.get(&code.to_string()).ok_or_else(|| Error::Parse {
                    what: "color table JSON".into(),
                    detail: format!("class code {code} not mapped"),
                })?;
        }
        if map.len() != 5 {
            return Err(Error::Parse {
                what: "color table JSON".into(),
                detail: "exactly the codes 0..=4 must be mapped".into(),
            });
        }
        Ok(ColorTable { colors })
    }
}
