//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the process exit code: 0 on success, 2 on usage errors, 1 on
//! runtime errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datagen::{presets, synth_manifold};
use crate::diffusion::{
    choose_epsilon, coordinate_vectors, db_embed, dm_embed, pairwise_sq_dist, resolve_epsilon, DataMatrix, DbVariant,
    DmVariant, EpsilonChoice, EpsilonGrid, EpsilonSource, KernelParams, ScanConfig, Truncation,
};
use crate::error::{Error, Result};
use crate::hyperspectral::{
    detect_subpixel, drill_down, normalize_layers, reduce_cube, wwg, HyperCube, Peak, PeakSet, ReduceParams,
    SegmentationMap, SubPixelParams, WwgParams, WwgResult,
};
use crate::io;
use crate::video::{
    dbsdb, parallel_blocks, sbsdb, BackgroundParams, BinaryMask, BlockPartition, DbsdbParams, DynamicParams,
    FrameSequence, InnerAlgorithm, Mu, SbsdbParams, ThresholdParams,
};

#[derive(Parser, Debug)]
#[command(name = "diffuse", version, about = "Diffusion maps and diffusion bases: embedding, hyper-spectral segmentation, video background subtraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scan the kernel scale and pick epsilon from the linear region of log S(eps)
    Epsilon(EpsilonArgs),
    /// Diffusion-maps embedding of the points in a CSV file
    DmEmbed(DmArgs),
    /// Diffusion-bases embedding of a CSV point set or a cube
    DbEmbed(DbArgs),
    /// Segment a hyper-spectral cube
    Wwg(WwgArgs),
    /// Re-segment the pixels of one label of an earlier segmentation
    Drilldown(DrillArgs),
    /// Detect sub-pixel anomalies in a cube
    Subpixel(SubpixelArgs),
    /// Static-background subtraction of a gray video
    BgsubStatic(StaticArgs),
    /// Dynamic-background subtraction of an RGB video
    BgsubDynamic(DynamicArgs),
    /// Write synthetic data with ground truth
    Datagen(DatagenArgs),
}

#[derive(Args, Debug)]
struct KernelArgs {
    /// Kernel scale: `auto` or a positive number
    #[arg(long, default_value = "auto", value_parser = parse_epsilon)]
    epsilon: EpsilonChoice,
    /// Truncation accuracy for choosing eta
    #[arg(long, default_value_t = 1e-3, value_parser = positive)]
    delta: f64,
    /// Fixed number of eigenpairs; overrides --delta
    #[arg(long, value_parser = at_least_one)]
    eta: Option<usize>,
}

#[derive(Args, Debug)]
struct EpsilonArgs {
    /// Points CSV (one point per row) or cube header; a cube is scanned on its band vectors
    #[arg(long)]
    input: PathBuf,
    /// Scan CSV: log_eps,log_S,slope
    #[arg(long)]
    output: PathBuf,
    /// Number of grid points
    #[arg(long, default_value_t = 64, value_parser = at_least_eight)]
    steps: usize,
}

#[derive(Args, Debug)]
struct DmArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = DmVariantArg::Modified)]
    variant: DmVariantArg,
    #[command(flatten)]
    kernel: KernelArgs,
    /// Diffusion time
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    time: u32,
}

#[derive(Args, Debug)]
struct DbArgs {
    /// Points CSV or cube header; cube pixels are min-max scaled per band first
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = DbVariantArg::Plain)]
    variant: DbVariantArg,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    time: u32,
}

#[derive(Args, Debug)]
struct SegmentArgs {
    /// Number of histogram peaks
    #[arg(long, default_value_t = 8, value_parser = at_least_one)]
    theta: usize,
    /// L-infinity radius cleared around each peak
    #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u16))]
    xi: u16,
    /// Quantization levels per colour
    #[arg(long, default_value_t = 32, value_parser = parse_levels)]
    levels: usize,
    #[arg(long, value_enum, default_value_t = DbVariantArg::Plain)]
    variant: DbVariantArg,
    /// Discard the first diffusion-bases colour before quantizing
    #[arg(long)]
    drop_first_color: bool,
    #[command(flatten)]
    kernel: KernelArgs,
}

#[derive(Args, Debug)]
struct WwgArgs {
    /// Cube header (data file alongside with extension .bsq)
    #[arg(long)]
    input: PathBuf,
    /// Output prefix: writes PREFIX.ppm and PREFIX.csv
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    seg: SegmentArgs,
}

#[derive(Args, Debug)]
struct DrillArgs {
    #[arg(long)]
    input: PathBuf,
    /// Prefix of an earlier segmentation (PREFIX.ppm and PREFIX.csv)
    #[arg(long)]
    segmentation: PathBuf,
    /// Label to re-segment
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    label: u32,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    seg: SegmentArgs,
}

#[derive(Args, Debug)]
struct SubpixelArgs {
    #[arg(long)]
    input: PathBuf,
    /// CSV: row,col,layers_isolated
    #[arg(long)]
    output: PathBuf,
    /// Neighbourhood radius
    #[arg(long, default_value_t = 1, value_parser = at_least_one)]
    alpha: usize,
    /// Contrast threshold between a pixel and a neighbour
    #[arg(long, default_value_t = 0.04, value_parser = positive)]
    tau1: f64,
    /// A pixel is isolated in a layer when more than tau2 neighbours differ
    #[arg(long, default_value_t = 3, value_parser = at_least_one)]
    tau2: usize,
    #[arg(long, value_enum, default_value_t = DbVariantArg::Plain)]
    variant: DbVariantArg,
    #[command(flatten)]
    kernel: KernelArgs,
}

#[derive(Args, Debug)]
struct VideoArgs {
    /// Sliding-window length
    #[arg(long, default_value_t = 5, value_parser = at_least_two)]
    window: usize,
    /// Histogram slope threshold: a percentage of the peak height (`0.5%`) or an absolute count per bin
    #[arg(long, default_value = "0.5%", value_parser = parse_mu)]
    mu: Mu,
    /// Moving-average width for the histogram (odd)
    #[arg(long, default_value_t = 5, value_parser = odd_width)]
    smoothing: usize,
    #[arg(long, default_value = "auto", value_parser = parse_epsilon)]
    epsilon: EpsilonChoice,
    /// Block grid, `RxC`
    #[arg(long, default_value = "1x1", value_parser = parse_grid)]
    blocks: (usize, usize),
    /// Overlap between adjacent blocks in pixels
    #[arg(long, default_value_t = 20)]
    overlap: usize,
}

#[derive(Args, Debug)]
struct StaticArgs {
    /// Frame directory or cube header (bands are frames)
    #[arg(long)]
    input: PathBuf,
    /// Mask directory
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    video: VideoArgs,
}

#[derive(Args, Debug)]
struct DynamicArgs {
    /// Training frames (background only)
    #[arg(long)]
    bgd: PathBuf,
    /// Frames to segment
    #[arg(long)]
    rtd: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Stop the background iteration once this fraction of values is non-positive
    #[arg(long, default_value_t = 0.99, value_parser = unit_fraction)]
    stop_fraction: f64,
    #[arg(long, default_value_t = 10, value_parser = at_least_one)]
    max_iters: usize,
    #[command(flatten)]
    video: VideoArgs,
}

#[derive(Args, Debug)]
struct DatagenArgs {
    #[command(subcommand)]
    kind: DatagenKind,
}

#[derive(Subcommand, Debug)]
enum DatagenKind {
    /// Hyper-spectral cube preset
    Cube {
        #[arg(long, value_enum, default_value_t = CubePreset::ThreeMaterials)]
        preset: CubePreset,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Cube header path; the data file is written next to it with extension .bsq
        #[arg(long)]
        output: PathBuf,
        /// Ground-truth label grid (CSV)
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Planted anomalies (CSV: row,col)
        #[arg(long)]
        anomalies: Option<PathBuf>,
    },
    /// Points on a flat patch embedded in a higher-dimensional space
    Manifold {
        /// Intrinsic dimension
        #[arg(long, default_value_t = 2, value_parser = at_least_one)]
        dim: usize,
        /// Ambient dimension
        #[arg(long, default_value_t = 10, value_parser = at_least_one)]
        ambient: usize,
        #[arg(long, default_value_t = 2000, value_parser = at_least_one)]
        count: usize,
        #[arg(long, default_value_t = 0.01, value_parser = non_negative)]
        sigma: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Moving-square video preset
    Video {
        #[arg(long, value_enum, default_value_t = VideoPreset::Static)]
        preset: VideoPreset,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Frame directory; the flicker preset writes `bgd/` and `rtd/` inside it
        #[arg(long)]
        output: PathBuf,
        /// Ground-truth mask directory
        #[arg(long)]
        truth: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DmVariantArg {
    Direct,
    Modified,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DbVariantArg {
    Plain,
    Modified,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CubePreset {
    ThreeMaterials,
    PlantedAnomalies,
    NestedMaterials,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VideoPreset {
    Static,
    Flicker,
}

impl From<DmVariantArg> for DmVariant {
    fn from(v: DmVariantArg) -> Self {
        match v {
            DmVariantArg::Direct => DmVariant::Direct,
            DmVariantArg::Modified => DmVariant::Modified,
        }
    }
}

impl From<DbVariantArg> for DbVariant {
    fn from(v: DbVariantArg) -> Self {
        match v {
            DbVariantArg::Plain => DbVariant::Plain,
            DbVariantArg::Modified => DbVariant::Modified,
        }
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be non-negative, got {v}"))
    }
}

fn unit_fraction(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("must be in (0, 1], got {v}"))
    }
}

fn parse_usize(s: &str, min: usize) -> std::result::Result<usize, String> {
    let v: usize = s.trim().parse().map_err(|_| format!("`{s}` is not a non-negative integer"))?;
    if v >= min {
        Ok(v)
    } else {
        Err(format!("must be at least {min}, got {v}"))
    }
}

fn at_least_one(s: &str) -> std::result::Result<usize, String> {
    parse_usize(s, 1)
}

fn at_least_two(s: &str) -> std::result::Result<usize, String> {
    parse_usize(s, 2)
}

fn at_least_eight(s: &str) -> std::result::Result<usize, String> {
    parse_usize(s, 8)
}

fn parse_levels(s: &str) -> std::result::Result<usize, String> {
    let v = parse_usize(s, 2)?;
    if v <= u16::MAX as usize {
        Ok(v)
    } else {
        Err(format!("must be at most {}, got {v}", u16::MAX))
    }
}

fn odd_width(s: &str) -> std::result::Result<usize, String> {
    let v = parse_usize(s, 1)?;
    if v % 2 == 1 {
        Ok(v)
    } else {
        Err(format!("must be odd, got {v}"))
    }
}

fn parse_epsilon(s: &str) -> std::result::Result<EpsilonChoice, String> {
    if s.trim().eq_ignore_ascii_case("auto") {
        Ok(EpsilonChoice::Auto)
    } else {
        positive(s).map(EpsilonChoice::Fixed)
    }
}

fn parse_mu(s: &str) -> std::result::Result<Mu, String> {
    match s.trim().strip_suffix('%') {
        Some(p) => positive(p).map(|v| Mu::PeakFraction(v / 100.0)),
        None => positive(s).map(Mu::Absolute),
    }
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, c) = s.trim().split_once(['x', 'X']).ok_or_else(|| format!("expected RxC, got `{s}`"))?;
    Ok((at_least_one(r)?, at_least_one(c)?))
}

fn fmt_epsilon(e: EpsilonChoice) -> String {
    match e {
        EpsilonChoice::Auto => "auto".into(),
        EpsilonChoice::Fixed(v) => format!("{v}"),
    }
}

fn fmt_mu(m: Mu) -> String {
    match m {
        Mu::PeakFraction(f) => format!("{}%", f * 100.0),
        Mu::Absolute(v) => format!("{v}"),
    }
}

fn fmt_source(s: EpsilonSource) -> &'static str {
    match s {
        EpsilonSource::Fixed => "fixed",
        EpsilonSource::Scan => "scan",
        EpsilonSource::Median => "median fallback",
    }
}

fn fmt_eta(eta: Option<usize>) -> String {
    eta.map_or_else(|| "from delta".into(), |e| e.to_string())
}

fn is_csv(path: &Path) -> bool {
    path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn load_cube(header: &Path) -> Result<HyperCube> {
    io::load_cube(header, &io::default_data_path(header))
}

fn load_points(path: &Path) -> Result<DataMatrix> {
    if is_csv(path) {
        DataMatrix::new(io::read_matrix_csv(path)?)
    } else {
        let cube = load_cube(path)?;
        let all: Vec<usize> = (0..cube.pixels()).collect();
        Ok(cube.normalized_pixels(&all))
    }
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
        _ => Ok(()),
    }
}

fn run_epsilon(a: &EpsilonArgs) -> Result<()> {
    let (sq, graph) = if is_csv(&a.input) {
        (pairwise_sq_dist(&load_points(&a.input)?), "points")
    } else {
        (pairwise_sq_dist(&coordinate_vectors(&load_points(&a.input)?)), "band vectors")
    };
    let grid = EpsilonGrid { steps: a.steps, ..EpsilonGrid::default_for(&sq)? };
    let config = ScanConfig::default();
    println!("parameters: steps = {}, slope_tol = {}, min_slope = {}, band = [{}, {}]", a.steps, config.slope_tol, config.min_slope, config.band.0, config.band.1);
    let scan = choose_epsilon(&sq, grid, config)?;
    create_parent(&a.output)?;
    io::write_epsilon_scan(&scan, &a.output)?;
    println!("graph: {graph}, {} nodes", sq.nrows());
    println!("epsilon: {}", io::format_f64(scan.chosen_epsilon));
    println!("slope: {:.6} (intrinsic dimension ~ {:.3})", scan.fitted_slope, 2.0 * scan.fitted_slope);
    println!("linear run: slope indices {}..={}", scan.run.0, scan.run.1);
    println!("scan: {}", a.output.display());
    Ok(())
}

fn print_embedding(e: &crate::diffusion::Embedding, source: EpsilonSource, output: &Path) {
    println!("embedding: {} ({} x {})", e.kind.label(), e.coords.nrows(), e.coords.ncols());
    println!("epsilon: {} ({})", io::format_f64(e.epsilon), fmt_source(source));
    println!("eta: {}{}", e.eta, if e.eta_saturated { " (saturated: delta not reached below N)" } else { "" });
    println!("output: {}", output.display());
}

fn run_dm(a: &DmArgs) -> Result<()> {
    let k = &a.kernel;
    println!(
        "parameters: variant = {:?}, epsilon = {}, delta = {}, eta = {}, t = {}",
        a.variant,
        fmt_epsilon(k.epsilon),
        k.delta,
        fmt_eta(k.eta),
        a.time
    );
    let data = load_points(&a.input)?;
    let sq = pairwise_sq_dist(&data);
    let (eps, source) = resolve_epsilon(&sq, k.epsilon, data.n_coords())?;
    let trunc = Truncation { time: a.time, delta: k.delta, eta: k.eta };
    let e = dm_embed(&data, KernelParams::new(eps)?, trunc, a.variant.into())?;
    create_parent(&a.output)?;
    io::write_matrix_csv(&e.coords, &a.output)?;
    print_embedding(&e, source, &a.output);
    Ok(())
}

fn run_db(a: &DbArgs) -> Result<()> {
    let k = &a.kernel;
    println!(
        "parameters: variant = {:?}, epsilon = {}, delta = {}, eta = {}, t = {}",
        a.variant,
        fmt_epsilon(k.epsilon),
        k.delta,
        fmt_eta(k.eta),
        a.time
    );
    let data = load_points(&a.input)?;
    let sq = pairwise_sq_dist(&coordinate_vectors(&data));
    let (eps, source) = resolve_epsilon(&sq, k.epsilon, data.n_points())?;
    let trunc = Truncation { time: a.time, delta: k.delta, eta: k.eta };
    let e = db_embed(&data, KernelParams::new(eps)?, trunc, a.variant.into())?;
    create_parent(&a.output)?;
    io::write_matrix_csv(&e.coords, &a.output)?;
    print_embedding(&e, source, &a.output);
    Ok(())
}

fn wwg_params(s: &SegmentArgs) -> WwgParams {
    WwgParams {
        reduce: ReduceParams { epsilon: s.kernel.epsilon, delta: s.kernel.delta, eta: s.kernel.eta, variant: s.variant.into() },
        theta: s.theta,
        xi: s.xi,
        levels: s.levels,
        drop_first_color: s.drop_first_color,
    }
}

fn print_segment_params(s: &SegmentArgs) {
    println!(
        "parameters: theta = {}, xi = {}, l = {}, variant = {:?}, drop_first_color = {}, epsilon = {}, delta = {}, eta = {}, t = 1",
        s.theta,
        s.xi,
        s.levels,
        s.variant,
        s.drop_first_color,
        fmt_epsilon(s.kernel.epsilon),
        s.kernel.delta,
        fmt_eta(s.kernel.eta)
    );
}

fn write_result(r: &WwgResult, prefix: &Path) -> Result<()> {
    create_parent(prefix)?;
    let (ppm, csv) = (with_ext(prefix, "ppm"), with_ext(prefix, "csv"));
    io::write_segmentation(&r.segmentation, &ppm, &csv)?;
    let red = &r.reduced;
    println!("epsilon: {} ({})", io::format_f64(red.epsilon), fmt_source(red.epsilon_source));
    println!("colours: {}{}", red.colors, if red.eta_saturated { " (saturated: delta not reached below the band count)" } else { "" });
    println!("peaks: {}{}", r.peaks.peaks.len(), if r.peaks.shortfall { " (fewer than theta)" } else { "" });
    for (k, (p, n)) in r.peaks.peaks.iter().zip(r.segmentation.label_counts()).enumerate() {
        println!("  label {}: {n} pixels, peak colour {:?}", k + 1, p.color);
    }
    println!("output: {} {}", ppm.display(), csv.display());
    Ok(())
}

fn run_wwg(a: &WwgArgs) -> Result<()> {
    print_segment_params(&a.seg);
    let cube = load_cube(&a.input)?;
    let r = wwg(&cube, &wwg_params(&a.seg))?;
    write_result(&r, &a.output)
}

fn read_segmentation(prefix: &Path) -> Result<SegmentationMap> {
    let table = io::read_segment_table(&with_ext(prefix, "csv"))?;
    if table.len() > crate::hyperspectral::PALETTE.len() {
        return Err(Error::Format(format!(
            "{}: {} labels cannot be told apart in the palette image",
            prefix.display(),
            table.len()
        )));
    }
    let (rows, cols, labels) = io::read_segmentation_labels(&with_ext(prefix, "ppm"))?;
    let peaks = table.iter().map(|r| Peak { color: r.peak_color.clone(), count: r.count }).collect();
    Ok(SegmentationMap { rows, cols, labels, peaks: PeakSet { peaks, theta: table.len(), xi: 0, shortfall: false } })
}

fn run_drill(a: &DrillArgs) -> Result<()> {
    print_segment_params(&a.seg);
    println!("label: {}", a.label);
    let cube = load_cube(&a.input)?;
    let seg = read_segmentation(&a.segmentation)?;
    let r = drill_down(&cube, &seg, a.label, &wwg_params(&a.seg))?;
    println!("selected pixels: {}", seg.labels.iter().filter(|l| **l == a.label).count());
    write_result(&r, &a.output)
}

fn run_subpixel(a: &SubpixelArgs) -> Result<()> {
    let k = &a.kernel;
    println!(
        "parameters: alpha = {}, tau1 = {}, tau2 = {}, variant = {:?}, epsilon = {}, delta = {}, eta = {}",
        a.alpha,
        a.tau1,
        a.tau2,
        a.variant,
        fmt_epsilon(k.epsilon),
        k.delta,
        fmt_eta(k.eta)
    );
    let cube = load_cube(&a.input)?;
    let params = ReduceParams { epsilon: k.epsilon, delta: k.delta, eta: k.eta, variant: a.variant.into() };
    let reduced = reduce_cube(&cube, &params)?;
    let hits = detect_subpixel(&normalize_layers(&reduced), &SubPixelParams { alpha: a.alpha, tau1: a.tau1, tau2: a.tau2 })?;
    create_parent(&a.output)?;
    io::write_subpixel_csv(&hits, &a.output)?;
    println!("epsilon: {} ({})", io::format_f64(reduced.epsilon), fmt_source(reduced.epsilon_source));
    println!("colours: {}", reduced.colors);
    println!("sub-pixel segments: {}", hits.len());
    println!("output: {}", a.output.display());
    Ok(())
}

fn threshold_params(v: &VideoArgs) -> ThresholdParams {
    ThresholdParams { mu: v.mu, smoothing_width: v.smoothing }
}

fn partition(v: &VideoArgs) -> BlockPartition {
    BlockPartition { grid_rows: v.blocks.0, grid_cols: v.blocks.1, overlap: v.overlap }
}

fn print_video_params(v: &VideoArgs) {
    println!(
        "parameters: m = {}, mu = {}, smoothing = {}, epsilon = {}, blocks = {}x{}, overlap = {}",
        v.window,
        fmt_mu(v.mu),
        v.smoothing,
        fmt_epsilon(v.epsilon),
        v.blocks.0,
        v.blocks.1,
        v.overlap
    );
}

fn write_mask_summary(masks: &[BinaryMask], dir: &Path) -> Result<()> {
    io::write_masks(masks, dir)?;
    let fg: usize = masks.iter().map(BinaryMask::count).sum();
    let total: usize = masks.iter().map(|m| m.rows() * m.cols()).sum();
    println!("frames: {}", masks.len());
    println!("foreground: {fg} of {total} pixels ({:.3}%)", 100.0 * fg as f64 / total.max(1) as f64);
    println!("output: {}", dir.display());
    Ok(())
}

fn run_static(a: &StaticArgs) -> Result<()> {
    let v = &a.video;
    print_video_params(v);
    let mut seq = io::read_video(&a.input)?;
    if seq.channels() == 3 {
        println!("input: RGB, converted to gray");
        seq = seq.to_gray();
    }
    let params = SbsdbParams {
        window: v.window,
        threshold: threshold_params(v),
        background: BackgroundParams { epsilon: v.epsilon, ..Default::default() },
    };
    let masks = if v.blocks == (1, 1) {
        let out = sbsdb(&seq, &params)?;
        println!("epsilon: {}", io::format_f64(out.epsilon));
        let flagged = out.thresholds.iter().filter(|t| t.flagged).count();
        if flagged > 0 {
            println!("thresholds: {flagged} frames found no flat bin (last bin used)");
        }
        out.masks
    } else {
        parallel_blocks(&seq, &partition(v), InnerAlgorithm::Sbsdb(params))?
    };
    write_mask_summary(&masks, &a.output)
}

fn run_dynamic(a: &DynamicArgs) -> Result<()> {
    let v = &a.video;
    print_video_params(v);
    println!("stop_fraction: {}, max_iters: {}", a.stop_fraction, a.max_iters);
    let bgd = io::read_video(&a.bgd)?;
    let rtd = io::read_video(&a.rtd)?;
    let params = DbsdbParams {
        window: v.window,
        threshold: threshold_params(v),
        dynamic: DynamicParams {
            background: BackgroundParams { epsilon: v.epsilon, ..Default::default() },
            stop_fraction: a.stop_fraction,
            max_iters: a.max_iters,
        },
    };
    let masks = if v.blocks == (1, 1) {
        let out = dbsdb(&rtd, &bgd, &params)?;
        let g = &out.gray_background;
        println!("gray background: {} iterations{}", g.iterations, if g.converged { "" } else { " (stop fraction not reached)" });
        for (name, b) in ["red", "green", "blue"].iter().zip(&out.rgb_background) {
            println!("{name} background: {} iterations{}", b.iterations, if b.converged { "" } else { " (stop fraction not reached)" });
        }
        out.masks
    } else {
        parallel_blocks(&rtd, &partition(v), InnerAlgorithm::Dbsdb { bgd: &bgd, params })?
    };
    write_mask_summary(&masks, &a.output)
}

fn write_video(seq: &FrameSequence, masks: &[BinaryMask], dir: &Path, truth: Option<&Path>) -> Result<()> {
    io::write_frames(seq, dir)?;
    println!("frames: {} ({}x{}, {} channel(s)) -> {}", seq.len(), seq.rows(), seq.cols(), seq.channels(), dir.display());
    if let Some(t) = truth {
        io::write_masks(masks, t)?;
        println!("truth: {}", t.display());
    }
    Ok(())
}

fn run_datagen(kind: &DatagenKind) -> Result<()> {
    match kind {
        DatagenKind::Cube { preset, seed, output, truth, anomalies } => {
            println!("parameters: preset = {preset:?}, seed = {seed}");
            let c = match preset {
                CubePreset::ThreeMaterials => presets::three_materials(*seed)?,
                CubePreset::PlantedAnomalies => presets::planted_anomalies(*seed)?,
                CubePreset::NestedMaterials => presets::nested_materials(*seed)?,
            };
            create_parent(output)?;
            let data = io::default_data_path(output);
            io::save_cube(&c.cube, output, &data)?;
            println!("cube: {}x{}x{} -> {} {}", c.cube.rows(), c.cube.cols(), c.cube.bands(), output.display(), data.display());
            if let Some(t) = truth {
                create_parent(t)?;
                io::write_label_grid(&c.labels, c.cube.cols(), t)?;
                println!("truth: {}", t.display());
            }
            if let Some(p) = anomalies {
                create_parent(p)?;
                let mut w = csv::Writer::from_path(p).map_err(|e| Error::Format(format!("{}: {e}", p.display())))?;
                let fail = |e: csv::Error| Error::Format(format!("{}: {e}", p.display()));
                w.write_record(["row", "col"]).map_err(fail)?;
                for a in &c.anomalies {
                    w.write_record([a.row.to_string(), a.col.to_string()]).map_err(fail)?;
                }
                w.flush().map_err(|e| Error::io(p, e))?;
                println!("anomalies: {} -> {}", c.anomalies.len(), p.display());
            }
        }
        DatagenKind::Manifold { dim, ambient, count, sigma, seed, output } => {
            println!("parameters: d = {dim}, n = {ambient}, N = {count}, sigma = {sigma}, seed = {seed}");
            if dim > ambient {
                return Err(Error::invalid(format!("intrinsic dimension {dim} exceeds ambient dimension {ambient}")));
            }
            let data = synth_manifold(*dim, *ambient, *count, *sigma, *seed)?;
            create_parent(output)?;
            io::write_matrix_csv(data.values(), output)?;
            println!("points: {} x {} -> {}", data.n_points(), data.n_coords(), output.display());
        }
        DatagenKind::Video { preset, seed, output, truth } => {
            println!("parameters: preset = {preset:?}, seed = {seed}");
            match preset {
                VideoPreset::Static => {
                    let v = presets::static_scene(*seed)?;
                    write_video(&v.frames, &v.masks, output, truth.as_deref())?;
                }
                VideoPreset::Flicker => {
                    let (bgd, rtd) = presets::flicker_scene(*seed)?;
                    write_video(&bgd.frames, &bgd.masks, &output.join("bgd"), None)?;
                    write_video(&rtd.frames, &rtd.masks, &output.join("rtd"), truth.as_deref())?;
                }
            }
        }
    }
    Ok(())
}

fn execute(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Epsilon(a) => run_epsilon(a),
        Command::DmEmbed(a) => run_dm(a),
        Command::DbEmbed(a) => run_db(a),
        Command::Wwg(a) => run_wwg(a),
        Command::Drilldown(a) => run_drill(a),
        Command::Subpixel(a) => run_subpixel(a),
        Command::BgsubStatic(a) => run_static(a),
        Command::BgsubDynamic(a) => run_dynamic(a),
        Command::Datagen(a) => run_datagen(&a.kind),
    }
}

fn thread_count() -> std::result::Result<usize, String> {
    match std::env::var("DIFFUSE_THREADS") {
        Ok(v) => v.trim().parse().map_err(|_| format!("DIFFUSE_THREADS must be a non-negative integer, got `{v}`")),
        Err(_) => Ok(0),
    }
}

/// Runs one command line (including the program name) and returns the exit
/// code. The summary goes to standard output, errors to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = match thread_count() {
        Ok(n) => n,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(&cli.command)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            1
        }
    }
}
