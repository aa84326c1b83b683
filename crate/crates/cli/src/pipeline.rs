//! End-to-end pipeline: preprocess once, then an independent sub-pipeline
//! per requested index (index raster, classes, stats, renders), then one
//! agreement report per unordered pair of requested indices.
//!
//! Sub-pipelines share no mutable state and write disjoint files, so they
//! run concurrently; every artifact is a pure function of the inputs, so
//! the worker count cannot change a single output byte.

use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use vegidx::{
    classify, compare_classifications, compute_index, compute_stats, load_thresholds, preprocess,
    read_vgr, render_health_map, render_pie, ClassRaster, ColorTable, IndexKind, PieMode,
    ThresholdSet,
};

use crate::config::PipelineConfig;
use crate::error::CliError;

/// The artifacts one index contributes, in emission order.
pub fn index_artifacts(cfg: &PipelineConfig, kind: IndexKind) -> Vec<PathBuf> {
    let name = kind.name();
    let mut paths = vec![
        cfg.out_dir.join(format!("{name}.vgr")),
        cfg.out_dir.join(format!("{name}_classes.vgr")),
        cfg.out_dir.join(format!("{name}_stats.json")),
        cfg.out_dir.join(format!("{name}_stats.csv")),
    ];
    if cfg.render_maps {
        paths.push(cfg.out_dir.join(format!("{name}_map.ppm")));
    }
    if cfg.render_pies {
        paths.push(cfg.out_dir.join(format!("{name}_pie_total.svg")));
        paths.push(cfg.out_dir.join(format!("{name}_pie_veg.svg")));
    }
    paths
}

fn agreement_path(cfg: &PipelineConfig, a: IndexKind, b: IndexKind) -> PathBuf {
    cfg.out_dir
        .join(format!("agreement_{}_vs_{}.json", a.name(), b.name()))
}

/// Every file a run would produce, for the overwrite guard.
pub fn all_artifacts(cfg: &PipelineConfig) -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = cfg
        .indices
        .iter()
        .flat_map(|&k| index_artifacts(cfg, k))
        .collect();
    for (i, &a) in cfg.indices.iter().enumerate() {
        for &b in &cfg.indices[i + 1..] {
            paths.push(agreement_path(cfg, a, b));
        }
    }
    paths
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<(), CliError> {
    if cfg.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| CliError::config(e.to_string()))?;
        pool.install(|| run_inner(cfg))
    } else {
        run_inner(cfg)
    }
}

fn run_inner(cfg: &PipelineConfig) -> Result<(), CliError> {
    let grid = read_vgr(&cfg.input)?;

    // fail fast, before any artifact is touched
    let bands = cfg.bands.resolve(&grid)?;
    for &kind in &cfg.indices {
        if kind.requires_nir() && bands.nir.is_none() {
            return Err(CliError::config(format!(
                "index {} needs a NIR band but none is mapped",
                kind.name()
            )));
        }
    }
    let thresholds: Vec<ThresholdSet> = cfg
        .indices
        .iter()
        .map(|&kind| {
            load_thresholds(
                cfg.thresholds.get(kind.name()).map(PathBuf::as_path),
                kind,
            )
            .map_err(CliError::from)
        })
        .collect::<Result<_, _>>()?;
    if !cfg.force {
        for path in all_artifacts(cfg) {
            if path.exists() {
                return Err(CliError::config(format!(
                    "{} already exists; pass --force to overwrite",
                    path.display()
                )));
            }
        }
    }

    fs::create_dir_all(&cfg.out_dir)?;
    let grid = if cfg.preprocess.is_identity() {
        grid
    } else {
        preprocess(&grid, &cfg.preprocess)?
    };

    let colors = ColorTable::default();
    let classed: Vec<(IndexKind, ClassRaster)> = cfg
        .indices
        .par_iter()
        .zip(thresholds.par_iter())
        .map(|(&kind, &thr)| -> Result<(IndexKind, ClassRaster), CliError> {
            let name = kind.name();
            let index = compute_index(&grid, &bands, kind)?;
            index.write_vgr(&cfg.out_dir.join(format!("{name}.vgr")))?;

            let classes = classify(&index, thr);
            classes.write_vgr(&cfg.out_dir.join(format!("{name}_classes.vgr")))?;

            let stats = compute_stats(&classes, &index)?;
            fs::write(
                cfg.out_dir.join(format!("{name}_stats.json")),
                stats.to_json(kind),
            )?;
            fs::write(
                cfg.out_dir.join(format!("{name}_stats.csv")),
                stats.to_csv(kind, thr),
            )?;

            if cfg.render_maps {
                render_health_map(
                    &classes,
                    &colors,
                    &cfg.out_dir.join(format!("{name}_map.ppm")),
                )?;
            }
            if cfg.render_pies {
                render_pie(
                    &stats,
                    &colors,
                    &cfg.out_dir.join(format!("{name}_pie_total.svg")),
                    PieMode::Total,
                )?;
                render_pie(
                    &stats,
                    &colors,
                    &cfg.out_dir.join(format!("{name}_pie_veg.svg")),
                    PieMode::Vegetation,
                )?;
            }
            Ok((kind, classes))
        })
        .collect::<Result<_, _>>()?;

    for (i, (kind_a, classes_a)) in classed.iter().enumerate() {
        for (kind_b, classes_b) in &classed[i + 1..] {
            let report = compare_classifications(classes_a, classes_b)?;
            fs::write(agreement_path(cfg, *kind_a, *kind_b), report.to_json())?;
        }
    }
    Ok(())
}
