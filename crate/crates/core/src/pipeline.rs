//! End-to-end extraction: index, features, growth, classification, and
//! orientation, with wall-clock timing per stage.

use std::time::{Duration, Instant};

use crate::error::Result;
use crate::features::{compute_with_graph, LocalFeatures};
use crate::ingest::PointCloud;
use crate::orientation::{summarize_regions, FractureRegion};
use crate::segmentation::{
    classify_regions, grow_regions, grow_regions_traced, GrowParams, GrowthTrace, Segmentation,
};
use crate::spatial::{NeighborGraph, NeighborIndex};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageTimings {
    /// kd-tree plus the cached k-NN graph.
    pub build: Duration,
    pub features: Duration,
    pub grow: Duration,
    /// Classification and plane fitting.
    pub summarize: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.build + self.features + self.grow + self.summarize
    }
}

/// Everything the pipeline derives from one cloud.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub features: Vec<LocalFeatures>,
    pub segmentation: Segmentation,
    pub fractures: Vec<FractureRegion>,
    /// Fractures dropped because their points do not span a plane.
    pub skipped_degenerate: usize,
    pub trace: Option<GrowthTrace>,
    pub timings: StageTimings,
}

impl Extraction {
    /// Fracture id per point, `-1` for residue.
    pub fn labels(&self, n: usize) -> Vec<i64> {
        let mut labels = vec![-1; n];
        for r in &self.fractures {
            for &i in &r.point_indices {
                labels[i] = r.id as i64;
            }
        }
        labels
    }

    pub fn mean_fracture_size(&self) -> f64 {
        if self.fractures.is_empty() {
            return 0.0;
        }
        let total: usize = self.fractures.iter().map(|f| f.point_indices.len()).sum();
        total as f64 / self.fractures.len() as f64
    }
}

/// Neighbor structures and features, reusable across threshold settings.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub graph: NeighborGraph,
    pub features: Vec<LocalFeatures>,
    pub build_time: Duration,
    pub features_time: Duration,
}

pub fn prepare(cloud: &PointCloud, k: usize) -> Result<Prepared> {
    cloud.validate()?;
    let t = Instant::now();
    let index = NeighborIndex::build(cloud)?;
    let graph = NeighborGraph::build(&index, k)?;
    let build_time = t.elapsed();
    let t = Instant::now();
    let features = compute_with_graph(cloud, &graph, k)?;
    Ok(Prepared {
        graph,
        features,
        build_time,
        features_time: t.elapsed(),
    })
}

/// Grows, classifies, and summarizes on prepared features.
pub fn extract_prepared(
    cloud: &PointCloud,
    prepared: &Prepared,
    params: &GrowParams,
    trace: bool,
) -> Result<Extraction> {
    let t = Instant::now();
    let (segmentation, trace) = if trace {
        let (s, tr) = grow_regions_traced(&prepared.features, &prepared.graph, params)?;
        (s, Some(tr))
    } else {
        (
            grow_regions(&prepared.features, &prepared.graph, params)?,
            None,
        )
    };
    let grow = t.elapsed();

    let t = Instant::now();
    let classes = classify_regions(&segmentation, params.min_region_size);
    let summary = summarize_regions(cloud, &classes.fractures)?;
    let summarize = t.elapsed();

    Ok(Extraction {
        features: prepared.features.clone(),
        segmentation,
        fractures: summary.regions,
        skipped_degenerate: summary.skipped.len(),
        trace,
        timings: StageTimings {
            build: prepared.build_time,
            features: prepared.features_time,
            grow,
            summarize,
        },
    })
}

/// Runs the whole pipeline.
pub fn extract(cloud: &PointCloud, params: &GrowParams, trace: bool) -> Result<Extraction> {
    params.validate()?;
    let prepared = prepare(cloud, params.k)?;
    extract_prepared(cloud, &prepared, params, trace)
}
