//! Pie chart renderer.
//!
//! Geometry is fixed: a 400x400 viewbox, pie radius 160 centered at
//! (200, 200), slices starting at 12 o'clock and proceeding clockwise in
//! class-code order. Slice boundaries are computed from cumulative integer
//! counts so sweep angles sum to exactly 360 degrees. Every coordinate is
//! printed with six decimals; a slice covering the whole circle is emitted
//! as two semicircular arcs because a single SVG arc cannot span 360
//! degrees.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::ColorTable;
use crate::classify::Class;
use crate::error::{Error, Result};
use crate::stats::ClassStats;

const SIZE: f64 = 400.0;
const CX: f64 = 200.0;
const CY: f64 = 200.0;
const RADIUS: f64 = 160.0;
const LABEL_RADIUS: f64 = 100.0;

/// Which breakdown to draw: all classes as shares of the valid area, or the
/// vegetation classes as shares of the vegetation area.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieMode {
    Total,
    Vegetation,
}

impl PieMode {
    fn classes(self) -> &'static [Class] {
        match self {
            PieMode::Total => &Class::VALID,
            PieMode::Vegetation => &Class::VEGETATION,
        }
    }
}

/// Point on the circle of radius `r` at `deg` degrees clockwise from
/// 12 o'clock, in SVG coordinates (y grows downward).
fn polar(r: f64, deg: f64) -> (f64, f64) {
    let t = deg.to_radians();
    (CX + r * t.sin(), CY - r * t.cos())
}

/// Slices as (class, count, start angle, end angle), zero counts omitted.
fn slices(stats: &ClassStats, mode: PieMode) -> Result<Vec<(Class, u64, f64, f64)>> {
    let denom = match mode {
        PieMode::Total => stats.total_valid,
        PieMode::Vegetation => stats.veg_total,
    };
    if denom == 0 {
        return Err(Error::EmptyStats(match mode {
            PieMode::Total => "no valid pixels to chart".into(),
            PieMode::Vegetation => "no vegetation pixels to chart".into(),
        }));
    }
    let mut out = Vec::new();
    let mut cum = 0u64;
    for &class in mode.classes() {
        let count = stats.count(class);
        if count == 0 {
            continue;
        }
        let start = 360.0 * cum as f64 / denom as f64;
        cum += count;
        let end = 360.0 * cum as f64 / denom as f64;
        out.push((class, count, start, end));
    }
    Ok(out)
}

/// Renders the chart as an SVG document string.
pub fn pie_svg(stats: &ClassStats, colors: &ColorTable, mode: PieMode) -> Result<String> {
    let slices = slices(stats, mode)?;
    let denom: u64 = slices.iter().map(|(_, c, _, _)| c).sum();

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE:.0}\" height=\"{SIZE:.0}\" viewBox=\"0 0 {SIZE:.0} {SIZE:.0}\">"
    );
    let _ = writeln!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{SIZE:.0}\" height=\"{SIZE:.0}\" fill=\"#ffffff\"/>"
    );

    for &(class, count, start, end) in &slices {
        let fill = colors.hex(class.code());
        if count == denom {
            // full circle: two semicircular arcs
            let (x0, y0) = polar(RADIUS, 0.0);
            let (x1, y1) = polar(RADIUS, 180.0);
            let _ = writeln!(
                svg,
                "<path d=\"M{x0:.6},{y0:.6} A{RADIUS:.6},{RADIUS:.6} 0 0 1 {x1:.6},{y1:.6} A{RADIUS:.6},{RADIUS:.6} 0 0 1 {x0:.6},{y0:.6} Z\" fill=\"{fill}\"/>"
            );
        } else {
            let (x0, y0) = polar(RADIUS, start);
            let (x1, y1) = polar(RADIUS, end);
            let large = if end - start > 180.0 { 1 } else { 0 };
            let _ = writeln!(
                svg,
                "<path d=\"M{CX:.6},{CY:.6} L{x0:.6},{y0:.6} A{RADIUS:.6},{RADIUS:.6} 0 {large} 1 {x1:.6},{y1:.6} Z\" fill=\"{fill}\"/>"
            );
        }
    }

    for &(class, count, start, end) in &slices {
        let (lx, ly) = polar(LABEL_RADIUS, (start + end) / 2.0);
        let pct = 100.0 * count as f64 / denom as f64;
        let _ = writeln!(
            svg,
            "<text x=\"{lx:.6}\" y=\"{ly:.6}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" fill=\"#000000\">{} {pct:.2}%</text>",
            class.name()
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn render_pie(
    stats: &ClassStats,
    colors: &ColorTable,
    path: &Path,
    mode: PieMode,
) -> Result<()> {
    let svg = pie_svg(stats, colors, mode)?;
    fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(counts: [u64; 4]) -> ClassStats {
        ClassStats::from_counts(counts, -0.5, 0.9).unwrap()
    }

    #[test]
    fn single_class_full_circle() {
        let s = stats([25, 10, 0, 0]);
        let svg = pie_svg(&s, &ColorTable::default(), PieMode::Vegetation).unwrap();
        // one slice drawn as two semicircular arcs, labelled 100.00%
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches(" A").count(), 2);
        assert!(svg.contains(">stress 100.00%</text>"));
        assert!(svg.contains("M200.000000,40.000000"));
    }

    #[test]
    fn sweep_angle_of_table_fractions() {
        // stress 6149 of 10000 vegetation pixels: sweep 360 * 0.6149 = 221.364
        let s = stats([0, 6149, 3830, 21]);
        let svg = pie_svg(&s, &ColorTable::default(), PieMode::Vegetation).unwrap();
        // independent trigonometry for the arc endpoint at 221.364 degrees
        let theta = (360.0f64 * 6149.0 / 10000.0).to_radians();
        let x = 200.0 + 160.0 * theta.sin();
        let y = 200.0 - 160.0 * theta.cos();
        let endpoint = format!("{x:.6},{y:.6}");
        assert!(
            svg.contains(&endpoint),
            "expected endpoint {endpoint} in svg:\n{svg}"
        );
        assert!(svg.contains(">stress 61.49%</text>"));
        assert!(svg.contains(">moderate 38.30%</text>"));
        assert!(svg.contains(">dense 0.21%</text>"));
    }

    #[test]
    fn sweeps_sum_to_full_circle() {
        for counts in [[7615, 1467, 913, 5], [1, 1, 1, 1], [0, 3, 0, 9]] {
            let s = stats(counts);
            for mode in [PieMode::Total, PieMode::Vegetation] {
                let total: f64 = slices(&s, mode)
                    .unwrap()
                    .iter()
                    .map(|(_, _, a, b)| b - a)
                    .sum();
                assert!((total - 360.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn zero_count_classes_omitted() {
        let s = stats([10, 0, 5, 0]);
        let svg = pie_svg(&s, &ColorTable::default(), PieMode::Total).unwrap();
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(!svg.contains("stress"));
        assert!(!svg.contains("dense"));
    }

    #[test]
    fn vegetation_mode_needs_vegetation() {
        let s = stats([10, 0, 0, 0]);
        assert!(matches!(
            pie_svg(&s, &ColorTable::default(), PieMode::Vegetation),
            Err(Error::EmptyStats(_))
        ));
    }

    #[test]
    fn deterministic() {
        let s = stats([7615, 1467, 913, 5]);
        let a = pie_svg(&s, &ColorTable::default(), PieMode::Total).unwrap();
        let b = pie_svg(&s, &ColorTable::default(), PieMode::Total).unwrap();
        assert_eq!(a, b);
    }
}
