//! Command-line front end: argument parsing and the four subcommands.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use outcrop_core::segmentation::{
    DEFAULT_K, DEFAULT_MIN_REGION_SIZE, DEFAULT_THETA_TH, DEFAULT_T_TH,
};
use outcrop_core::{Format, GrowParams, Point3};

mod experiments;
mod extract;
mod scene;

pub use experiments::{
    bench_row, run_bench, run_sweep, sweep_counts, BenchRow, SweepTable, PAPER_SIZES,
};
pub use extract::{run_extract, ExtractReport, RunConfig};
pub use scene::{run_synth, SceneKind};

#[derive(Debug, Parser)]
#[command(
    name = "outcrop",
    version,
    about = "Extract planar fracture faces from outcrop point clouds"
)]
pub struct Cli {
    /// Worker threads; 0 uses one per core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment a point cloud and write labels, regions and a pole plot.
    Extract(ExtractArgs),
    /// Count detected planes over ranges of the two angle thresholds.
    Sweep(SweepArgs),
    /// Time the pipeline on synthetic scenes of increasing size.
    Bench(BenchArgs),
    /// Write a synthetic scene with ground-truth labels.
    Synth(SynthArgs),
}

#[derive(Clone, Debug, Args)]
pub struct GrowArgs {
    /// Neighborhood size used for normals, curvature and growth.
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// Smoothness threshold between a seed and a candidate normal (degrees).
    #[arg(long = "theta-th", default_value_t = DEFAULT_THETA_TH)]
    pub theta_th: f64,
    /// Maximum deviation of a new seed from the region's first normal (degrees).
    #[arg(long = "t-th", default_value_t = DEFAULT_T_TH)]
    pub t_th: f64,
    /// Regions need strictly more points than this to count as fractures.
    #[arg(long = "min-region-size", default_value_t = DEFAULT_MIN_REGION_SIZE)]
    pub min_region_size: usize,
}

impl GrowArgs {
    pub fn params(&self) -> GrowParams {
        GrowParams {
            k: self.k,
            theta_th: self.theta_th,
            t_th: self.t_th,
            min_region_size: self.min_region_size,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct InputArgs {
    /// Point file (ASCII XYZ or ASCII PLY).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    pub format: FormatArg,
    /// Scanner position used to orient normals, as X,Y,Z.
    #[arg(long, value_parser = parse_point, default_value = "0,0,0", allow_hyphen_values = true)]
    pub viewpoint: Point3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Auto,
    Xyz,
    Ply,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Auto => Format::Auto,
            FormatArg::Xyz => Format::Xyz,
            FormatArg::Ply => Format::Ply,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grow: GrowArgs,
    #[arg(long = "out-dir", default_value = "out")]
    pub out_dir: PathBuf,
    /// Also write growth_trace.csv.
    #[arg(long)]
    pub trace: bool,
    /// Also write features.csv with per-point normals and curvature.
    #[arg(long = "dump-features")]
    pub dump_features: bool,
}

#[derive(Clone, Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grow: GrowArgs,
    #[arg(long = "out-dir", default_value = "out")]
    pub out_dir: PathBuf,
    /// Comma-separated theta_th values (degrees).
    #[arg(
        long = "theta-range",
        value_delimiter = ',',
        default_value = "2,4,6,8,10"
    )]
    pub theta_range: Vec<f64>,
    /// Comma-separated t_th values (degrees).
    #[arg(long = "t-range", value_delimiter = ',', default_value = "5,10,20,30")]
    pub t_range: Vec<f64>,
}

#[derive(Clone, Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub grow: GrowArgs,
    #[arg(long = "out-dir", default_value = "out")]
    pub out_dir: PathBuf,
    /// Comma-separated target point counts.
    #[arg(long, value_delimiter = ',', default_value = "10000,100000,1000000")]
    pub sizes: Vec<usize>,
    /// Use the five reference sizes from 134,067 to 1,096,948 points.
    #[arg(long = "paper-sizes", conflicts_with = "sizes")]
    pub paper_sizes: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args)]
pub struct SynthArgs {
    #[arg(long = "out-dir", default_value = "out")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = SceneKind::TwoPlanes)]
    pub scene: SceneKind,
    /// JSON array of plane specs; replaces --scene.
    #[arg(long, conflicts_with = "scene")]
    pub spec: Option<PathBuf>,
    /// Number of planes for the random scene.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Grid spacing for the random scene (m).
    #[arg(long, default_value_t = 0.01)]
    pub spacing: f64,
    /// Noise standard deviation for the random scene (m).
    #[arg(long, default_value_t = 0.001)]
    pub noise: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

pub fn parse_point(s: &str) -> Result<Point3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected X,Y,Z, got `{s}`"));
    }
    let mut v = [0.0f64; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| format!("`{part}` is not a number"))?;
        if !slot.is_finite() {
            return Err(format!("`{part}` is not finite"));
        }
    }
    Ok(Point3::from_array(v))
}

/// Runs a parsed command line on a pool of `cli.threads` workers.
pub fn run(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .context("config: cannot start worker threads")?;
    pool.install(|| match cli.command {
        Command::Extract(args) => {
            let cfg = RunConfig::from_args(&args.input, &args.grow, &args.out_dir)?;
            let report = run_extract(&cfg, args.trace, args.dump_features)?;
            eprintln!(
                "{} fractures, mean region size {:.1} points, {} unassigned",
                report.fractures, report.mean_region_size, report.unassigned
            );
            Ok(())
        }
        Command::Sweep(args) => {
            let cfg = RunConfig::from_args(&args.input, &args.grow, &args.out_dir)?;
            run_sweep(&cfg, &args.theta_range, &args.t_range).map(|_| ())
        }
        Command::Bench(args) => {
            let sizes = if args.paper_sizes {
                PAPER_SIZES.to_vec()
            } else {
                args.sizes.clone()
            };
            if sizes.is_empty() || sizes.contains(&0) {
                bail!("config: sizes must be positive");
            }
            run_bench(&sizes, args.seed, &args.grow.params(), &args.out_dir).map(|_| ())
        }
        Command::Synth(args) => run_synth(&args),
    })
}
