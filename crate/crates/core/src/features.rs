//! Per-point surface normal and curvature from neighborhood PCA.
//!
//! The neighborhood of a query point is the point itself plus its k nearest
//! neighbors. The normal is the smallest-eigenvalue eigenvector of the
//! neighborhood covariance, flipped to face the scanner viewpoint; the
//! curvature is `λ0 / (λ0 + λ1 + λ2)`.

use rayon::prelude::*;

use crate::eigen::{eig_sym3, SymMat3};
use crate::error::{Error, Result};
use crate::geometry::{Point3, Vec3};
use crate::ingest::PointCloud;
use crate::spatial::{NeighborGraph, NeighborIndex};

/// Curvature assigned to degenerate neighborhoods: the isotropic maximum.
pub const DEGENERATE_CURVATURE: f64 = 1.0 / 3.0;

/// Eigenvalue sum (m²) below which a neighborhood counts as a single point.
const MIN_SPREAD: f64 = 1e-18;

/// `λ1 / λ2` below which a neighborhood counts as collinear.
const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalFeatures {
    pub normal: Vec3,
    pub curvature: f64,
    pub degenerate: bool,
}

impl LocalFeatures {
    pub const DEGENERATE: LocalFeatures = LocalFeatures {
        normal: Vec3::Z,
        curvature: DEGENERATE_CURVATURE,
        degenerate: true,
    };
}

/// Covariance of `points` about their mean, normalized by the count.
pub fn covariance(points: &[Point3]) -> (Point3, SymMat3) {
    let n = points.len() as f64;
    // Accumulate relative to the first point to limit cancellation on
    // georeferenced coordinates.
    let origin = points[0];
    let mut mean = Vec3::ZERO;
    for &p in points {
        mean += p - origin;
    }
    let mean = mean / n;
    let mut c = [0.0f64; 6];
    for &p in points {
        let d = p - origin - mean;
        c[0] += d.x * d.x;
        c[1] += d.x * d.y;
        c[2] += d.x * d.z;
        c[3] += d.y * d.y;
        c[4] += d.y * d.z;
        c[5] += d.z * d.z;
    }
    let m = SymMat3::new(c[0] / n, c[1] / n, c[2] / n, c[3] / n, c[4] / n, c[5] / n);
    (origin + mean, m)
}

/// Features of one neighborhood (`query` first, then its neighbors).
pub fn features_of_neighborhood(
    query: Point3,
    neighborhood: &[Point3],
    viewpoint: Point3,
) -> LocalFeatures {
    let (_, cov) = covariance(neighborhood);
    let Ok(eig) = eig_sym3(&cov) else {
        return LocalFeatures::DEGENERATE;
    };
    let [l0, l1, l2] = eig.values;
    let l0 = l0.max(0.0);
    let sum = l0 + l1.max(0.0) + l2.max(0.0);
    if sum < MIN_SPREAD || l1 <= RANK_TOLERANCE * l2 {
        return LocalFeatures::DEGENERATE;
    }
    let v0 = eig.vectors[0];
    // Orient toward the viewpoint; an exactly perpendicular view keeps +v0.
    let normal = if v0.dot(viewpoint - query) < 0.0 {
        -v0
    } else {
        v0
    };
    LocalFeatures {
        normal,
        curvature: (l0 / sum).min(DEGENERATE_CURVATURE),
        degenerate: false,
    }
}

/// Features for every point, using a cached neighbor graph.
///
/// Parallel over points; the output order and values do not depend on the
/// number of threads.
pub fn compute_with_graph(
    cloud: &PointCloud,
    graph: &NeighborGraph,
    k: usize,
) -> Result<Vec<LocalFeatures>> {
    check_k(cloud.len(), k)?;
    if graph.len() != cloud.len() {
        return Err(Error::LengthMismatch {
            what: "neighbor graph",
            expected: cloud.len(),
            actual: graph.len(),
        });
    }
    if graph.k() < k {
        return Err(Error::InvalidK {
            k,
            reason: format!("neighbor graph only holds {} neighbors", graph.k()),
        });
    }
    let points = &cloud.points;
    Ok((0..points.len())
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(k + 1),
            |hood, q| {
                hood.clear();
                hood.push(points[q]);
                hood.extend(graph.neighbors(q)[..k].iter().map(|&i| points[i as usize]));
                features_of_neighborhood(points[q], hood, cloud.viewpoint)
            },
        )
        .collect())
}

/// Features for every point, querying the kd-tree directly.
pub fn compute_local_features(
    cloud: &PointCloud,
    index: &NeighborIndex,
    k: usize,
) -> Result<Vec<LocalFeatures>> {
    check_k(cloud.len(), k)?;
    if index.len() != cloud.len() {
        return Err(Error::LengthMismatch {
            what: "neighbor index",
            expected: cloud.len(),
            actual: index.len(),
        });
    }
    let points = &cloud.points;
    (0..points.len())
        .into_par_iter()
        .map_init(
            || (Vec::with_capacity(k), Vec::with_capacity(k + 1)),
            |(nn, hood), q| {
                index.knn_into(q, k, nn)?;
                hood.clear();
                hood.push(points[q]);
                hood.extend(nn.iter().map(|n| points[n.index]));
                Ok(features_of_neighborhood(points[q], hood, cloud.viewpoint))
            },
        )
        .collect()
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::InvalidK {
            k,
            reason: "need at least 3 neighbors for a plane fit".into(),
        });
    }
    if k > n.saturating_sub(1) {
        return Err(Error::InvalidK {
            k,
            reason: format!("cloud has only {n} points"),
        });
    }
    Ok(())
}
