//! Pipeline configuration: band-role resolution, per-index thresholds,
//! preprocessing and render toggles. Loadable from JSON or assembled from
//! command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use vegidx::{BandSet, IndexKind, RasterGrid, DEFAULT_SAVI_L};

use crate::error::CliError;

/// A band named either by position or by name.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BandRef {
    Index(usize),
    Name(String),
}

impl BandRef {
    /// Flag values: an unsigned integer is a position, anything else a name.
    pub fn parse(s: &str) -> BandRef {
        match s.parse::<usize>() {
            Ok(i) => BandRef::Index(i),
            Err(_) => BandRef::Name(s.to_string()),
        }
    }

    pub fn resolve(&self, grid: &RasterGrid) -> Result<usize, CliError> {
        match self {
            BandRef::Index(i) => Ok(*i),
            BandRef::Name(n) => grid.band_index(n).ok_or_else(|| {
                CliError::config(format!(
                    "no band named {n:?}; the grid has {:?}",
                    grid.band_names()
                ))
            }),
        }
    }
}

/// Role assignments; unset roles fall back to the conventional band names,
/// with NIR optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandRoles {
    #[serde(default)]
    pub red: Option<BandRef>,
    #[serde(default)]
    pub green: Option<BandRef>,
    #[serde(default)]
    pub blue: Option<BandRef>,
    #[serde(default)]
    pub nir: Option<BandRef>,
}

impl BandRoles {
    pub fn resolve(&self, grid: &RasterGrid) -> Result<BandSet, CliError> {
        let required = |r: &Option<BandRef>, name: &str| -> Result<usize, CliError> {
            match r {
                Some(b) => b.resolve(grid),
                None => grid.band_index(name).ok_or_else(|| {
                    CliError::config(format!(
                        "band role {name} is not mapped and the grid has no band named {name:?}"
                    ))
                }),
            }
        };
        let mut set = BandSet::new(
            required(&self.red, "red")?,
            required(&self.green, "green")?,
            required(&self.blue, "blue")?,
        );
        let nir = match &self.nir {
            Some(b) => Some(b.resolve(grid)?),
            None => grid.band_index("nir"),
        };
        if let Some(nir) = nir {
            set = set.with_nir(nir);
        }
        set.validate(grid)?;
        Ok(set)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub indices: Vec<IndexKind>,
    pub bands: BandRoles,
    /// Per-index threshold file overrides, keyed by index name.
    pub thresholds: BTreeMap<String, PathBuf>,
    pub preprocess: vegidx::PreprocessSpec,
    pub render_maps: bool,
    pub render_pies: bool,
    /// Rayon worker count; 0 means the library default.
    pub workers: usize,
    pub force: bool,
}

fn default_savi_l() -> f64 {
    DEFAULT_SAVI_L
}

fn default_scale() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PreprocessJson {
    #[serde(default = "default_scale")]
    scale: f64,
    #[serde(default)]
    clamp_to_unit: bool,
    #[serde(default)]
    median3: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RenderJson {
    #[serde(default = "default_true")]
    maps: bool,
    #[serde(default = "default_true")]
    pies: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineConfigJson {
    input: PathBuf,
    out_dir: PathBuf,
    indices: Vec<String>,
    #[serde(default = "default_savi_l")]
    savi_l: f64,
    #[serde(default)]
    bands: BandRoles,
    #[serde(default)]
    thresholds: BTreeMap<String, PathBuf>,
    #[serde(default)]
    preprocess: Option<PreprocessJson>,
    #[serde(default)]
    render: Option<RenderJson>,
    #[serde(default)]
    workers: usize,
    #[serde(default)]
    force: bool,
}

/// Parses index names, rejecting unknowns and duplicates.
pub fn parse_indices(names: &[String], savi_l: f64) -> Result<Vec<IndexKind>, CliError> {
    if names.is_empty() {
        return Err(CliError::config("no indices requested"));
    }
    let mut kinds: Vec<IndexKind> = Vec::with_capacity(names.len());
    for name in names {
        let kind = IndexKind::from_name_with_l(name, savi_l).ok_or_else(|| {
            CliError::config(format!(
                "unknown index {name:?}; expected ndvi, savi, vari or mgrvi"
            ))
        })?;
        if kinds.iter().any(|k| k.name() == kind.name()) {
            return Err(CliError::config(format!("index {name:?} requested twice")));
        }
        kinds.push(kind);
    }
    Ok(kinds)
}

impl PipelineConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)?;
        let raw: PipelineConfigJson =
            serde_json::from_str(&text).map_err(|e| CliError::config(format!(
                "pipeline config {}: {e}",
                path.display()
            )))?;
        let indices = parse_indices(&raw.indices, raw.savi_l)?;
        let preprocess = match raw.preprocess {
            None => vegidx::PreprocessSpec::default(),
            Some(p) => vegidx::PreprocessSpec {
                scale: p.scale,
                clamp_to_unit: p.clamp_to_unit,
                median3: p.median3,
            },
        };
        let (render_maps, render_pies) = match raw.render {
            None => (true, true),
            Some(r) => (r.maps, r.pies),
        };
        Ok(PipelineConfig {
            input: raw.input,
            out_dir: raw.out_dir,
            indices,
            bands: raw.bands,
            thresholds: raw.thresholds,
            preprocess,
            render_maps,
            render_pies,
            workers: raw.workers,
            force: raw.force,
        })
    }
}
