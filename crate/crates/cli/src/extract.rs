use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use outcrop_core::features::compute_with_graph;
use outcrop_core::ingest::{write_features, write_growth_trace};
use outcrop_core::{
    classify_regions, grow_regions, grow_regions_traced, load_points, summarize_regions,
    write_outputs, Format, GrowParams, NeighborGraph, NeighborIndex, Point3, PointCloud,
};

use crate::{GrowArgs, InputArgs};

/// A validated extract or sweep configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: Format,
    pub viewpoint: Point3,
    pub out_dir: PathBuf,
    pub params: GrowParams,
}

impl RunConfig {
    pub fn from_args(input: &InputArgs, grow: &GrowArgs, out_dir: &Path) -> Result<Self> {
        let cfg = RunConfig {
            input: input.input.clone(),
            format: input.format.into(),
            viewpoint: input.viewpoint,
            out_dir: out_dir.to_path_buf(),
            params: grow.params(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks parameters and paths before any work starts. Creates the
    /// output directory.
    pub fn validate(&self) -> Result<()> {
        self.params.validate().context("config")?;
        if !self.input.is_file() {
            bail!("ingest: input file {} does not exist", self.input.display());
        }
        fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("write: cannot create {}", self.out_dir.display()))?;
        Ok(())
    }

    pub fn load(&self) -> Result<PointCloud> {
        let cloud = load_points(&self.input, self.format, self.viewpoint)
            .with_context(|| format!("ingest: reading {}", self.input.display()))?;
        cloud.validate().context("ingest")?;
        Ok(cloud)
    }
}

#[derive(Clone, Debug)]
pub struct ExtractReport {
    pub points: usize,
    pub fractures: usize,
    pub mean_region_size: f64,
    pub unassigned: usize,
    pub files: Vec<PathBuf>,
}

struct Stopwatch(Instant);

impl Stopwatch {
    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        report_stage(stage, now - self.0);
        self.0 = now;
    }
}

pub(crate) fn report_stage(stage: &str, elapsed: Duration) {
    eprintln!("{stage:>9}: {:10.1} ms", elapsed.as_secs_f64() * 1e3);
}

/// Load, index, features, grow, classify, summarize, write.
pub fn run_extract(cfg: &RunConfig, trace: bool, dump_features: bool) -> Result<ExtractReport> {
    let p = &cfg.params;
    let mut watch = Stopwatch(Instant::now());
    let cloud = cfg.load()?;
    watch.lap("ingest");

    let index = NeighborIndex::build(&cloud).context("index")?;
    let graph = NeighborGraph::build(&index, p.k).context("index")?;
    drop(index);
    watch.lap("index");

    let features = compute_with_graph(&cloud, &graph, p.k).context("features")?;
    watch.lap("features");

    let (segmentation, growth) = if trace {
        let (s, t) = grow_regions_traced(&features, &graph, p).context("grow")?;
        (s, Some(t))
    } else {
        (grow_regions(&features, &graph, p).context("grow")?, None)
    };
    watch.lap("grow");

    let classes = classify_regions(&segmentation, p.min_region_size);
    watch.lap("classify");
    let summary = summarize_regions(&cloud, &classes.fractures).context("summarize")?;
    watch.lap("summarize");
    if !summary.skipped.is_empty() {
        eprintln!(
            "skipped {} regions without a plane fit",
            summary.skipped.len()
        );
    }

    let out = &cfg.out_dir;
    let mut files: Vec<PathBuf> = write_outputs(&cloud, &summary.regions, out)
        .context("write")?
        .files
        .into_iter()
        .map(|(path, _)| path)
        .collect();
    if let Some(t) = &growth {
        let path = out.join("growth_trace.csv");
        write_growth_trace(t, &path).context("write")?;
        files.push(path);
    }
    if dump_features {
        let path = out.join("features.csv");
        write_features(&features, &path).context("write")?;
        files.push(path);
    }
    watch.lap("write");

    let fractures = summary.regions.len();
    let in_fractures: usize = summary.regions.iter().map(|r| r.point_indices.len()).sum();
    Ok(ExtractReport {
        points: cloud.len(),
        fractures,
        mean_region_size: if fractures == 0 {
            0.0
        } else {
            in_fractures as f64 / fractures as f64
        },
        unassigned: segmentation.unassigned.len(),
        files,
    })
}
