//! Region growing over local normals and curvatures.
//!
//! Each region starts at the unassigned point of minimum curvature. Growth
//! proceeds breadth-first through a FIFO seed queue: a neighbor joins the
//! region when its normal is within `theta_th` of the admitting seed's
//! normal, and becomes a seed itself when its normal is also within `t_th`
//! of the region's initial seed normal. Both comparisons are strict.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::features::LocalFeatures;
use crate::geometry::Vec3;
use crate::spatial::Neighborhoods;

pub const DEFAULT_K: usize = 30;
pub const DEFAULT_THETA_TH: f64 = 6.0;
pub const DEFAULT_T_TH: f64 = 20.0;
pub const DEFAULT_MIN_REGION_SIZE: usize = 100;

/// Region-growing parameters. Angles are in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowParams {
    pub k: usize,
    pub theta_th: f64,
    pub t_th: f64,
    pub min_region_size: usize,
}

impl Default for GrowParams {
    fn default() -> Self {
        GrowParams {
            k: DEFAULT_K,
            theta_th: DEFAULT_THETA_TH,
            t_th: DEFAULT_T_TH,
            min_region_size: DEFAULT_MIN_REGION_SIZE,
        }
    }
}

impl GrowParams {
    /// Checks the user-facing ranges: `k >= 3`, both angles in (0, 90),
    /// `min_region_size >= 1`.
    pub fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return Err(Error::InvalidK {
                k: self.k,
                reason: "need at least 3 neighbors".into(),
            });
        }
        for (name, v) in [("theta_th", self.theta_th), ("t_th", self.t_th)] {
            if !(v > 0.0 && v < 90.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must lie strictly between 0 and 90 degrees"
                )));
            }
        }
        if self.min_region_size == 0 {
            return Err(Error::InvalidParameter(
                "min_region_size must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The looser check applied by the grower itself: angles in (0, 180].
    fn validate_for_growth(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidK {
                k: 0,
                reason: "k must be positive".into(),
            });
        }
        for (name, v) in [("theta_th", self.theta_th), ("t_th", self.t_th)] {
            if !(v > 0.0 && v <= 180.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must lie in (0, 180] degrees"
                )));
            }
        }
        Ok(())
    }
}

/// One grown region, in admission order.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    /// The minimum-curvature point the region grew from.
    pub seed: usize,
    pub seed_normal: Vec3,
    pub points: Vec<usize>,
}

impl Region {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Regions in creation order plus the points that never entered one
/// (degenerate neighborhoods).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Segmentation {
    pub regions: Vec<Region>,
    pub unassigned: Vec<usize>,
}

impl Segmentation {
    /// Region id per point, `-1` for unassigned.
    pub fn labels(&self, n: usize) -> Vec<i64> {
        let mut labels = vec![-1; n];
        for (id, r) in self.regions.iter().enumerate() {
            for &p in &r.points {
                labels[p] = id as i64;
            }
        }
        labels
    }

    /// Verifies that regions and `unassigned` partition `0..n`.
    pub fn check_partition(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        let all = self
            .regions
            .iter()
            .flat_map(|r| r.points.iter())
            .chain(self.unassigned.iter());
        let mut count = 0;
        for &p in all {
            if p >= n {
                return Err(Error::InvalidIndex { index: p, len: n });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(format!(
                    "point {p} appears twice in the segmentation"
                )));
            }
            count += 1;
        }
        if count != n {
            return Err(Error::LengthMismatch {
                what: "segmentation",
                expected: n,
                actual: count,
            });
        }
        Ok(())
    }
}

/// One admission event recorded while growing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEvent {
    pub step: usize,
    pub region: usize,
    pub point: usize,
    /// `None` for a region's initial seed.
    pub admitted_by: Option<usize>,
    pub angle_to_seed: f64,
    pub angle_to_initial: f64,
    pub promoted: bool,
}

/// Full admission history, used for certificates and `growth_trace.csv`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GrowthTrace {
    pub events: Vec<TraceEvent>,
    /// For each region, the curvature order position of its initial seed.
    pub seed_order: Vec<usize>,
}

/// Grows regions over all non-degenerate points.
pub fn grow_regions<N: Neighborhoods>(
    features: &[LocalFeatures],
    neighbors: &N,
    params: &GrowParams,
) -> Result<Segmentation> {
    grow(features, neighbors, params, None)
}

/// As [`grow_regions`], also recording every admission.
pub fn grow_regions_traced<N: Neighborhoods>(
    features: &[LocalFeatures],
    neighbors: &N,
    params: &GrowParams,
) -> Result<(Segmentation, GrowthTrace)> {
    let mut trace = GrowthTrace::default();
    let seg = grow(features, neighbors, params, Some(&mut trace))?;
    Ok((seg, trace))
}

fn grow<N: Neighborhoods>(
    features: &[LocalFeatures],
    neighbors: &N,
    params: &GrowParams,
    mut trace: Option<&mut GrowthTrace>,
) -> Result<Segmentation> {
    params.validate_for_growth()?;
    let n = features.len();
    if neighbors.point_count() != n {
        return Err(Error::LengthMismatch {
            what: "features",
            expected: neighbors.point_count(),
            actual: n,
        });
    }

    let theta = params.theta_th;
    let t = params.t_th;

    let mut available = vec![false; n];
    let mut unassigned = Vec::new();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for (i, f) in features.iter().enumerate() {
        if f.degenerate {
            unassigned.push(i);
        } else {
            available[i] = true;
            order.push(i);
        }
    }
    // Ascending curvature, ties by lower index.
    order.sort_by(|&a, &b| {
        features[a]
            .curvature
            .total_cmp(&features[b].curvature)
            .then(a.cmp(&b))
    });

    let mut regions = Vec::new();
    let mut queue = VecDeque::new();
    let mut nbrs = Vec::with_capacity(params.k);
    let mut step = 0;
    for (rank, &p_min) in order.iter().enumerate() {
        if !available[p_min] {
            continue;
        }
        available[p_min] = false;
        let n_min = features[p_min].normal;
        let region_id = regions.len();
        let mut members = vec![p_min];
        if let Some(tr) = trace.as_deref_mut() {
            tr.seed_order.push(rank);
            tr.events.push(TraceEvent {
                step,
                region: region_id,
                point: p_min,
                admitted_by: None,
                angle_to_seed: 0.0,
                angle_to_initial: 0.0,
                promoted: true,
            });
        }
        step += 1;
        queue.clear();
        queue.push_back(p_min);
        while let Some(s) = queue.pop_front() {
            let n_s = features[s].normal;
            neighbors.neighbors_into(s, params.k, &mut nbrs)?;
            for &p in &nbrs {
                if !available[p] {
                    continue;
                }
                let n_i = features[p].normal;
                let to_seed = n_s.angle_deg(n_i);
                if to_seed >= theta {
                    continue;
                }
                available[p] = false;
                members.push(p);
                let to_initial = n_min.angle_deg(n_i);
                let promoted = to_initial < t;
                if promoted {
                    queue.push_back(p);
                }
                if let Some(tr) = trace.as_deref_mut() {
                    tr.events.push(TraceEvent {
                        step,
                        region: region_id,
                        point: p,
                        admitted_by: Some(s),
                        angle_to_seed: to_seed,
                        angle_to_initial: to_initial,
                        promoted,
                    });
                }
                step += 1;
            }
        }
        regions.push(Region {
            seed: p_min,
            seed_normal: n_min,
            points: members,
        });
    }

    let seg = Segmentation {
        regions,
        unassigned,
    };
    seg.check_partition(n)?;
    Ok(seg)
}

/// Fracture regions (strictly more than `min_region_size` points), renumbered
/// in creation order, and the residue of every other point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Classification {
    pub fractures: Vec<Vec<usize>>,
    pub residue: Vec<usize>,
}

impl Classification {
    /// Fracture id per point, `-1` for residue.
    pub fn labels(&self, n: usize) -> Vec<i64> {
        let mut labels = vec![-1; n];
        for (id, r) in self.fractures.iter().enumerate() {
            for &p in r {
                labels[p] = id as i64;
            }
        }
        labels
    }
}

pub fn classify_regions(seg: &Segmentation, min_region_size: usize) -> Classification {
    let mut out = Classification::default();
    for r in &seg.regions {
        if r.len() > min_region_size {
            out.fractures.push(r.points.clone());
        } else {
            out.residue.extend_from_slice(&r.points);
        }
    }
    out.residue.extend_from_slice(&seg.unassigned);
    out
}
