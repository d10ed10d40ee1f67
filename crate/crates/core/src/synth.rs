//! Synthetic outcrop scenes with exact ground truth, and scoring of a
//! segmentation against that truth.
//!
//! Randomness comes from [`SceneRng`]: ChaCha8 (`rand_chacha`) seeded from a
//! `u64`, uniform doubles as `(next_u64 >> 11) * 2^-53`, and standard normal
//! deviates by the Box-Muller transform (cosine branch first, sine branch
//! cached for the next call). Any implementation of those three steps
//! reproduces the clouds exactly.

use std::collections::{BTreeMap, HashMap};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point3, Vec3};
use crate::ingest::PointCloud;
use crate::orientation::dip_to_normal;

/// Deterministic, portable random source for scene generation.
pub struct SceneRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl SceneRng {
    pub fn new(seed: u64) -> Self {
        SceneRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal deviate.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - u lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// How jitter is applied to generated points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Along the surface normal only (range error).
    #[default]
    Normal,
    /// Independently on every axis.
    Isotropic,
}

/// A rectangular planar patch sampled on a regular grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneSpec {
    pub dip_direction: f64,
    pub dip: f64,
    pub center: Point3,
    /// Extent along strike and along dip, meters.
    pub extent: (f64, f64),
    pub spacing: f64,
    pub noise_sigma: f64,
    pub label: i64,
}

impl PlaneSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return bad(format!("spacing {} must be positive", self.spacing));
        }
        if !(self.extent.0 > 0.0 && self.extent.1 > 0.0)
            || !self.extent.0.is_finite()
            || !self.extent.1.is_finite()
        {
            return bad(format!("extent {:?} must be positive", self.extent));
        }
        if !(0.0..=90.0).contains(&self.dip) {
            return bad(format!("dip {} outside [0, 90]", self.dip));
        }
        if !(0.0..360.0).contains(&self.dip_direction) {
            return bad(format!(
                "dip direction {} outside [0, 360)",
                self.dip_direction
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise sigma {} must be >= 0", self.noise_sigma));
        }
        if !self.center.is_finite() {
            return bad("center must be finite".into());
        }
        Ok(())
    }

    pub fn normal(&self) -> Vec3 {
        dip_to_normal(self.dip_direction, self.dip)
    }

    /// Grid size (along strike, along dip).
    pub fn grid(&self) -> (usize, usize) {
        let n = |len: f64| (len / self.spacing).round() as usize + 1;
        (n(self.extent.0), n(self.extent.1))
    }

    pub fn point_count(&self) -> usize {
        let (a, b) = self.grid();
        a * b
    }

    /// Strike and down-dip unit vectors spanning the plane.
    fn basis(&self) -> (Vec3, Vec3) {
        let (sa, ca) = self.dip_direction.to_radians().sin_cos();
        let strike = Vec3::new(ca, -sa, 0.0);
        (strike, self.normal().cross(strike))
    }
}

/// A generated scene: the cloud, a truth label per point, and the true
/// upward normal of each planar label.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticScene {
    pub cloud: PointCloud,
    pub labels: Vec<i64>,
    pub normals: BTreeMap<i64, Vec3>,
}

pub fn generate_synthetic(specs: &[PlaneSpec], seed: u64) -> Result<SyntheticScene> {
    generate_synthetic_with(specs, seed, NoiseMode::Normal)
}

/// Samples every plane on its grid, adds Gaussian jitter, and places the
/// viewpoint on the mean upward-normal side at 10x the largest extent.
pub fn generate_synthetic_with(
    specs: &[PlaneSpec],
    seed: u64,
    mode: NoiseMode,
) -> Result<SyntheticScene> {
    if specs.is_empty() {
        return Err(Error::InvalidParameter("no plane specs given".into()));
    }
    for s in specs {
        s.validate()?;
    }
    let mut rng = SceneRng::new(seed);
    let total: usize = specs.iter().map(PlaneSpec::point_count).sum();
    let mut points = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut normals = BTreeMap::new();
    let mut center_sum = Vec3::ZERO;
    let mut normal_sum = Vec3::ZERO;
    let mut largest = 0.0f64;
    for spec in specs {
        let n = spec.normal();
        let (u, w) = spec.basis();
        let (cols, rows) = spec.grid();
        let half_u = (cols - 1) as f64 * spec.spacing / 2.0;
        let half_w = (rows - 1) as f64 * spec.spacing / 2.0;
        for j in 0..rows {
            let b = j as f64 * spec.spacing - half_w;
            for i in 0..cols {
                let a = i as f64 * spec.spacing - half_u;
                let p = spec.center + u * a + w * b;
                points.push(p + jitter(&mut rng, n, spec.noise_sigma, mode));
                labels.push(spec.label);
            }
        }
        normals.insert(spec.label, n);
        center_sum += spec.center;
        normal_sum += n;
        largest = largest.max(spec.extent.0).max(spec.extent.1);
    }
    let up = normal_sum.normalized().unwrap_or(Vec3::Z);
    let viewpoint = center_sum / specs.len() as f64 + up * (10.0 * largest);
    Ok(SyntheticScene {
        cloud: PointCloud::new(points, viewpoint),
        labels,
        normals,
    })
}

fn jitter(rng: &mut SceneRng, normal: Vec3, sigma: f64, mode: NoiseMode) -> Vec3 {
    if sigma == 0.0 {
        return Vec3::ZERO;
    }
    match mode {
        NoiseMode::Normal => normal * (sigma * rng.gaussian()),
        NoiseMode::Isotropic => Vec3::new(rng.gaussian(), rng.gaussian(), rng.gaussian()) * sigma,
    }
}

/// Points on a sphere (Fibonacci lattice) with radial Gaussian noise. Label 0.
pub fn generate_sphere(count: usize, radius: f64, noise_sigma: f64, seed: u64) -> SyntheticScene {
    let mut rng = SceneRng::new(seed);
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let points = (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            let dir = Vec3::new(r * c, r * s, z);
            dir * (radius + noise_sigma * rng.gaussian())
        })
        .collect();
    SyntheticScene {
        // Viewed from inside, so every normal has a well-defined orientation.
        cloud: PointCloud::new(points, Point3::ZERO),
        labels: vec![0; count],
        normals: BTreeMap::new(),
    }
}

/// Height field `z = f(x, y)` over `[0, size] x [0, size]` on a grid,
/// jittered vertically, viewed from high above its centre. Label 0.
pub fn generate_height_field(
    size: f64,
    spacing: f64,
    noise_sigma: f64,
    seed: u64,
    height: impl Fn(f64, f64) -> f64,
) -> SyntheticScene {
    let mut rng = SceneRng::new(seed);
    let n = (size / spacing).round() as usize + 1;
    let mut points = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (i as f64 * spacing, j as f64 * spacing);
            let z = height(x, y) + noise_sigma * rng.gaussian();
            points.push(Point3::new(x, y, z));
        }
    }
    SyntheticScene {
        cloud: PointCloud::new(points, Point3::new(size / 2.0, size / 2.0, 10.0 * size)),
        labels: vec![0; n * n],
        normals: BTreeMap::new(),
    }
}

/// Gently undulating 2 m x 2 m surface at 0.01 m spacing with 1 mm noise.
pub fn undulating_surface(seed: u64) -> SyntheticScene {
    generate_height_field(2.0, 0.01, 0.001, seed, |x, y| {
        0.25 * (3.0 * x).sin() + 0.2 * (2.5 * y).cos()
    })
}

/// Two well-separated planes of 121 x 121 points each.
pub fn two_plane_specs() -> Vec<PlaneSpec> {
    vec![
        PlaneSpec {
            dip_direction: 45.0,
            dip: 30.0,
            center: Point3::new(-1.0, 3.0, 0.0),
            extent: (1.2, 1.2),
            spacing: 0.01,
            noise_sigma: 0.001,
            label: 0,
        },
        PlaneSpec {
            dip_direction: 200.0,
            dip: 70.0,
            center: Point3::new(1.0, 3.0, 0.0),
            extent: (1.2, 1.2),
            spacing: 0.01,
            noise_sigma: 0.001,
            label: 1,
        },
    ]
}

/// `count` planes with random orientation (dip in [10, 85]) and extent in
/// [0.8, 1.0] m per side, centred on a 3 m lattice so no two planes touch.
pub fn random_plane_specs(
    count: usize,
    seed: u64,
    spacing: f64,
    noise_sigma: f64,
) -> Vec<PlaneSpec> {
    let mut rng = SceneRng::new(seed);
    let side = (count as f64).cbrt().ceil().max(1.0) as usize;
    (0..count)
        .map(|i| {
            let cell = Vec3::new(
                (i % side) as f64,
                ((i / side) % side) as f64,
                (i / (side * side)) as f64,
            );
            PlaneSpec {
                dip_direction: rng.range(0.0, 360.0),
                dip: rng.range(10.0, 85.0),
                center: cell * 3.0,
                extent: (rng.range(0.8, 1.0), rng.range(0.8, 1.0)),
                spacing,
                noise_sigma,
                label: i as i64,
            }
        })
        .collect()
}

/// Planar tiles at 0.01 m spacing whose total point count is within one
/// grid row of `target`: full 1 m x 1 m tiles (10,201 points) plus one
/// partial tile. Tiles sit on a 1.5 m grid with varied orientation.
pub fn bench_specs(target: usize, seed: u64) -> Vec<PlaneSpec> {
    const SPACING: f64 = 0.01;
    const FULL: usize = 101 * 101;
    let mut rng = SceneRng::new(seed);
    let full = target / FULL;
    let rest_rows = ((target - full * FULL) as f64 / 101.0).round() as usize;
    let tiles = full + usize::from(rest_rows >= 2);
    let per_row = (tiles as f64).sqrt().ceil().max(1.0) as usize;
    (0..tiles)
        .map(|i| {
            let rows = if i < full { 101 } else { rest_rows };
            PlaneSpec {
                dip_direction: rng.range(0.0, 360.0),
                dip: rng.range(10.0, 80.0),
                center: Point3::new((i % per_row) as f64 * 1.5, (i / per_row) as f64 * 1.5, 0.0),
                extent: (1.0, (rows - 1) as f64 * SPACING),
                spacing: SPACING,
                noise_sigma: 0.001,
                label: i as i64,
            }
        })
        .collect()
}

/// Match quality of one truth plane.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneScore {
    pub truth_label: i64,
    pub truth_size: usize,
    /// Matched predicted region id, if any.
    pub predicted: Option<i64>,
    pub overlap: usize,
    pub precision: f64,
    pub recall: f64,
    pub orientation_error_deg: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationScore {
    /// One entry per truth label, ascending by label.
    pub planes: Vec<PlaneScore>,
    /// Mean over matched planes with known orientations; 0 when none.
    pub mean_orientation_error_deg: f64,
    pub detected_planes: usize,
}

/// Scores predicted labels (`-1` = residue) against truth labels (negative
/// truth labels are ignored).
///
/// Each truth plane is matched one-to-one to a predicted region, greedily by
/// overlap size (ties: lower predicted id, then lower truth label).
/// Orientation error is the angle between the true and fitted upward normals
/// when both are supplied.
pub fn score_against_truth(
    truth: &[i64],
    predicted: &[i64],
    truth_normals: &BTreeMap<i64, Vec3>,
    predicted_normals: &BTreeMap<i64, Vec3>,
) -> Result<SegmentationScore> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            what: "predicted labels",
            expected: truth.len(),
            actual: predicted.len(),
        });
    }
    let mut truth_size: BTreeMap<i64, usize> = BTreeMap::new();
    let mut pred_size: BTreeMap<i64, usize> = BTreeMap::new();
    let mut overlap: HashMap<(i64, i64), usize> = HashMap::new();
    for (&t, &p) in truth.iter().zip(predicted) {
        if p >= 0 {
            *pred_size.entry(p).or_default() += 1;
        }
        if t < 0 {
            continue;
        }
        *truth_size.entry(t).or_default() += 1;
        if p >= 0 {
            *overlap.entry((t, p)).or_default() += 1;
        }
    }
    let mut pairs: Vec<((i64, i64), usize)> = overlap.into_iter().collect();
    pairs.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(a.0 .1.cmp(&b.0 .1))
            .then(a.0 .0.cmp(&b.0 .0))
    });

    let mut truth_match: BTreeMap<i64, (i64, usize)> = BTreeMap::new();
    let mut taken = std::collections::HashSet::new();
    for ((t, p), count) in pairs {
        if truth_match.contains_key(&t) || taken.contains(&p) {
            continue;
        }
        truth_match.insert(t, (p, count));
        taken.insert(p);
    }

    let mut planes = Vec::with_capacity(truth_size.len());
    let mut err_sum = 0.0;
    let mut err_n = 0;
    for (&t, &size) in &truth_size {
        let score = match truth_match.get(&t) {
            Some(&(p, count)) => {
                let err = match (truth_normals.get(&t), predicted_normals.get(&p)) {
                    (Some(a), Some(b)) => Some(a.angle_deg(*b)),
                    _ => None,
                };
                if let Some(e) = err {
                    err_sum += e;
                    err_n += 1;
                }
                PlaneScore {
                    truth_label: t,
                    truth_size: size,
                    predicted: Some(p),
                    overlap: count,
                    precision: count as f64 / pred_size[&p] as f64,
                    recall: count as f64 / size as f64,
                    orientation_error_deg: err,
                }
            }
            None => PlaneScore {
                truth_label: t,
                truth_size: size,
                predicted: None,
                overlap: 0,
                precision: 0.0,
                recall: 0.0,
                orientation_error_deg: None,
            },
        };
        planes.push(score);
    }
    Ok(SegmentationScore {
        planes,
        mean_orientation_error_deg: if err_n > 0 {
            err_sum / err_n as f64
        } else {
            0.0
        },
        detected_planes: pred_size.len(),
    })
}
