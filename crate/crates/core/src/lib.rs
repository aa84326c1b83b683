//! Vegetation index analytics for co-registered band rasters.
//!
//! The crate covers the whole desk pipeline: raster I/O (the VGR container),
//! radiometric preprocessing, the NDVI / SAVI / VARI / MGRVI indices, health
//! classification against threshold tables, per-class statistics with
//! cross-index agreement, deterministic map/pie renderers, and a synthetic
//! scene generator used as the test oracle.
//!
//! Everything is deterministic: per-pixel stages are pure maps, tallies
//! reduce with integer counters, and renderers emit byte-identical files for
//! identical inputs regardless of how work is partitioned across threads.

pub mod classify;
pub mod error;
pub mod indices;
pub mod preprocess;
pub mod raster;
pub mod report;
pub mod stats;
pub mod synth;

pub use classify::{classify, load_thresholds, Class, ClassRaster, ThresholdSet};
pub use error::{Error, Result};
pub use indices::{
    compute_index, compute_mgrvi, compute_ndvi, compute_savi, compute_vari, IndexKind,
    IndexRaster, DEFAULT_SAVI_L,
};
pub use preprocess::{median_filter_3x3, preprocess, radiometric_scale, PreprocessSpec};
pub use raster::{
    check_coregistered, read_csv_band, read_vgr, write_vgr, BandRole, BandSet, Dtype, RasterGrid,
};
pub use report::{
    health_map_bytes, pie_svg, render_health_map, render_pie, ColorTable, PieMode,
};
pub use stats::{
    compare_classifications, compute_stats, round2, AgreementReport, ClassStats,
};
pub use synth::{generate_scene, ClassCounts, FixedBands, SceneSpec};
