use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vegidx::{
    classify, compare_classifications, compute_index, compute_stats, load_thresholds,
    read_vgr, render_health_map, render_pie, write_vgr, ClassRaster, ClassStats, ColorTable,
    IndexKind, IndexRaster, PieMode, PreprocessSpec, SceneSpec, DEFAULT_SAVI_L,
};

use vegidx_cli::config::{BandRef, BandRoles, PipelineConfig};
use vegidx_cli::error::CliError;
use vegidx_cli::{parse_indices, run_pipeline};

#[derive(Parser)]
#[command(
    name = "vegidx",
    version,
    about = "Vegetation index toolkit: indices, health classes, statistics and reports from band rasters"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the whole pipeline: indices, classes, stats, renders, agreement
    Pipeline(PipelineArgs),
    /// Compute one vegetation index raster
    Compute(ComputeArgs),
    /// Classify an index raster into health classes
    Classify(ClassifyArgs),
    /// Per-class statistics for a classified raster
    Stats(StatsArgs),
    /// Agreement report between two classified rasters
    Compare(CompareArgs),
    /// Render a class raster as a PPM health map
    Render(RenderArgs),
    /// Render class statistics as an SVG pie chart
    Pie(PieArgs),
    /// Generate a synthetic scene from a scene spec
    Synth(SynthArgs),
    /// Radiometric scaling and optional median denoising
    Preprocess(PreprocessArgs),
}

#[derive(Args)]
struct BandFlags {
    /// Red band, by name or index
    #[arg(long)]
    red: Option<String>,
    /// Green band, by name or index
    #[arg(long)]
    green: Option<String>,
    /// Blue band, by name or index
    #[arg(long)]
    blue: Option<String>,
    /// Near-infrared band, by name or index
    #[arg(long)]
    nir: Option<String>,
}

impl BandFlags {
    fn roles(&self) -> BandRoles {
        let parse = |s: &Option<String>| s.as_deref().map(BandRef::parse);
        BandRoles {
            red: parse(&self.red),
            green: parse(&self.green),
            blue: parse(&self.blue),
            nir: parse(&self.nir),
        }
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// JSON pipeline config; replaces the flags below (--workers and
    /// --force still apply)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input VGR raster
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    input: Option<PathBuf>,
    /// Output directory for all artifacts
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    out: Option<PathBuf>,
    /// Indices to run, comma separated: ndvi,savi,vari,mgrvi
    #[arg(
        long,
        value_delimiter = ',',
        required_unless_present = "config",
        conflicts_with = "config"
    )]
    indices: Vec<String>,
    #[command(flatten)]
    bands: BandFlags,
    /// SAVI soil-brightness correction factor
    #[arg(long, default_value_t = DEFAULT_SAVI_L, conflicts_with = "config")]
    savi_l: f64,
    /// Threshold override per index, as <index>=<file.json>; repeatable
    #[arg(long = "thresholds", conflicts_with = "config")]
    thresholds: Vec<String>,
    /// Radiometric scale factor
    #[arg(long, conflicts_with = "config")]
    scale: Option<f64>,
    /// Clamp scaled samples into [0, 1]
    #[arg(long, conflicts_with = "config")]
    clamp: bool,
    /// Apply a 3x3 median filter per band
    #[arg(long, conflicts_with = "config")]
    median3: bool,
    /// Skip the PPM health maps
    #[arg(long, conflicts_with = "config")]
    no_maps: bool,
    /// Skip the SVG pie charts
    #[arg(long, conflicts_with = "config")]
    no_pies: bool,
    /// Worker threads (0 = library default)
    #[arg(long)]
    workers: Option<usize>,
    /// Overwrite existing outputs
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ComputeArgs {
    /// Input VGR raster
    #[arg(long)]
    input: PathBuf,
    /// Index to compute: ndvi, savi, vari or mgrvi
    #[arg(long)]
    index: String,
    /// Output VGR path for the index raster
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    bands: BandFlags,
    /// SAVI soil-brightness correction factor
    #[arg(long, default_value_t = DEFAULT_SAVI_L)]
    savi_l: f64,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Index raster (VGR written by compute)
    #[arg(long)]
    input: PathBuf,
    /// Output VGR path for the class raster
    #[arg(long)]
    output: PathBuf,
    /// Threshold JSON {"t0":..,"t1":..,"t2":..}; defaults per index
    #[arg(long)]
    thresholds: Option<PathBuf>,
    /// Index kind override when the input lacks index metadata
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// Class raster (VGR written by classify)
    #[arg(long)]
    classes: PathBuf,
    /// The index raster the classes came from
    #[arg(long)]
    index: PathBuf,
    /// Output path for stats JSON
    #[arg(long)]
    json: Option<PathBuf>,
    /// Output path for stats CSV
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// First class raster
    #[arg(long)]
    a: PathBuf,
    /// Second class raster
    #[arg(long)]
    b: PathBuf,
    /// Output path for the agreement JSON
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct RenderArgs {
    /// Class raster to render
    #[arg(long)]
    classes: PathBuf,
    /// Output PPM path
    #[arg(long)]
    output: PathBuf,
    /// Color table JSON {"0":[r,g,b],...,"4":[r,g,b]}
    #[arg(long)]
    colors: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PieModeArg {
    Total,
    Vegetation,
}

#[derive(Args)]
struct PieArgs {
    /// Stats JSON written by the stats subcommand
    #[arg(long)]
    stats: PathBuf,
    /// Slice denominator: the whole valid area or the vegetation area
    #[arg(long, value_enum)]
    mode: PieModeArg,
    /// Output SVG path
    #[arg(long)]
    output: PathBuf,
    /// Color table JSON {"0":[r,g,b],...,"4":[r,g,b]}
    #[arg(long)]
    colors: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Scene spec JSON
    #[arg(long)]
    spec: PathBuf,
    /// Output VGR path for the generated scene
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Input VGR raster
    #[arg(long)]
    input: PathBuf,
    /// Output VGR path
    #[arg(long)]
    output: PathBuf,
    /// Radiometric scale factor
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Clamp scaled samples into [0, 1]
    #[arg(long)]
    clamp: bool,
    /// Apply a 3x3 median filter per band
    #[arg(long)]
    median3: bool,
    #[arg(long)]
    force: bool,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        process::exit(e.code());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Pipeline(args) => cmd_pipeline(args),
        Cmd::Compute(args) => cmd_compute(args),
        Cmd::Classify(args) => cmd_classify(args),
        Cmd::Stats(args) => cmd_stats(args),
        Cmd::Compare(args) => cmd_compare(args),
        Cmd::Render(args) => cmd_render(args),
        Cmd::Pie(args) => cmd_pie(args),
        Cmd::Synth(args) => cmd_synth(args),
        Cmd::Preprocess(args) => cmd_preprocess(args),
    }
}

fn guard_output(path: &Path, force: bool) -> Result<(), CliError> {
    if !force && path.exists() {
        return Err(CliError::config(format!(
            "{} already exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(())
}

fn parse_kind(name: &str, savi_l: f64) -> Result<IndexKind, CliError> {
    IndexKind::from_name_with_l(name, savi_l).ok_or_else(|| {
        CliError::config(format!(
            "unknown index {name:?}; expected ndvi, savi, vari or mgrvi"
        ))
    })
}

fn load_colors(path: &Option<PathBuf>) -> Result<ColorTable, CliError> {
    match path {
        None => Ok(ColorTable::default()),
        Some(p) => Ok(ColorTable::from_json_str(&fs::read_to_string(p)?)?),
    }
}

fn cmd_pipeline(args: PipelineArgs) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(path) => PipelineConfig::from_json_file(path)?,
        None => {
            let mut thresholds = BTreeMap::new();
            for entry in &args.thresholds {
                let (kind, path) = entry.split_once('=').ok_or_else(|| {
                    CliError::config(format!(
                        "--thresholds takes <index>=<file.json>, got {entry:?}"
                    ))
                })?;
                parse_kind(kind, args.savi_l)?;
                thresholds.insert(kind.to_string(), PathBuf::from(path));
            }
            PipelineConfig {
                input: args.input.clone().expect("required by clap"),
                out_dir: args.out.clone().expect("required by clap"),
                indices: parse_indices(&args.indices, args.savi_l)?,
                bands: args.bands.roles(),
                thresholds,
                preprocess: PreprocessSpec {
                    scale: args.scale.unwrap_or(1.0),
                    clamp_to_unit: args.clamp,
                    median3: args.median3,
                },
                render_maps: !args.no_maps,
                render_pies: !args.no_pies,
                workers: 0,
                force: false,
            }
        }
    };
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
    cfg.force |= args.force;
    run_pipeline(&cfg)
}

fn cmd_compute(args: ComputeArgs) -> Result<(), CliError> {
    guard_output(&args.output, args.force)?;
    let kind = parse_kind(&args.index, args.savi_l)?;
    let grid = read_vgr(&args.input)?;
    let bands = args.bands.roles().resolve(&grid)?;
    let index = compute_index(&grid, &bands, kind)?;
    index.write_vgr(&args.output)?;
    Ok(())
}

fn cmd_classify(args: ClassifyArgs) -> Result<(), CliError> {
    guard_output(&args.output, args.force)?;
    let index = match &args.kind {
        None => IndexRaster::read_vgr(&args.input)?,
        Some(name) => {
            let kind = parse_kind(name, DEFAULT_SAVI_L)?;
            IndexRaster::new(read_vgr(&args.input)?, kind)?
        }
    };
    let thresholds = load_thresholds(args.thresholds.as_deref(), index.kind())?;
    let classes = classify(&index, thresholds);
    classes.write_vgr(&args.output)?;
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<(), CliError> {
    if args.json.is_none() && args.csv.is_none() {
        return Err(CliError::config("pass --json and/or --csv"));
    }
    for path in args.json.iter().chain(args.csv.iter()) {
        guard_output(path, args.force)?;
    }
    let classes = ClassRaster::read_vgr(&args.classes)?;
    let index = IndexRaster::read_vgr(&args.index)?;
    if classes.kind().name() != index.kind().name() {
        return Err(CliError::Data(format!(
            "class raster derives from {} but the index raster holds {}",
            classes.kind().name(),
            index.kind().name()
        )));
    }
    let stats = compute_stats(&classes, &index)?;
    if let Some(path) = &args.json {
        fs::write(path, stats.to_json(index.kind()))?;
    }
    if let Some(path) = &args.csv {
        fs::write(path, stats.to_csv(index.kind(), classes.thresholds()))?;
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    guard_output(&args.output, args.force)?;
    let a = ClassRaster::read_vgr(&args.a)?;
    let b = ClassRaster::read_vgr(&args.b)?;
    let report = compare_classifications(&a, &b)?;
    fs::write(&args.output, report.to_json())?;
    Ok(())
}

fn cmd_render(args: RenderArgs) -> Result<(), CliError> {
    guard_output(&args.output, args.force)?;
    let classes = ClassRaster::read_vgr(&args.classes)?;
    let colors = load_colors(&args.colors)?;
    render_health_map(&classes, &colors, &args.output)?;
    Ok(())
}

fn cmd_pie(args: PieArgs) -> Result<(), CliError> {
    guard_output(&args.output, args.force)?;
    let (stats, _) = ClassStats::from_json_str(&fs::read_to_string(&args.stats)?)?;
    let colors = load_colors(&args.colors)?;
    let mode = match args.mode {
        PieModeArg::Total => PieMode::Total,
        PieModeArg::Vegetation => PieMode::Vegetation,
    };
    render_pie(&stats, &colors, &args.output, mode)?;
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    guard_output(&args.output, args.force)?;
    let spec = SceneSpec::from_json_file(&args.spec)?;
    let grid = vegidx::generate_scene(&spec)?;
    write_vgr(&grid, &args.output)?;
    Ok(())
}

fn cmd_preprocess(args: PreprocessArgs) -> Result<(), CliError> {
    guard_output(&args.output, args.force)?;
    let grid = read_vgr(&args.input)?;
    let spec = PreprocessSpec {
        scale: args.scale,
        clamp_to_unit: args.clamp,
        median3: args.median3,
    };
    let out = vegidx::preprocess(&grid, &spec)?;
    write_vgr(&out, &args.output)?;
    Ok(())
}
