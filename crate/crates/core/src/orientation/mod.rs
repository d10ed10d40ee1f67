//! Plane fitting and geological orientation of fracture regions.
//!
//! Frame: x east, y north, z up. Plane normals are canonicalized to the upper
//! hemisphere (`n_z >= 0`) before converting to dip direction and dip, since a
//! plane and its flipped normal describe the same fracture.

mod stereonet;

pub use stereonet::{pole_svg, SvgOptions};

use crate::eigen::eig_sym3;
use crate::error::{Error, Result};
use crate::features::covariance;
use crate::geometry::{Point3, Vec3};
use crate::ingest::PointCloud;

/// `λ1 / λ2` at or below which a point set is treated as collinear.
const COLLINEAR_TOLERANCE: f64 = 1e-12;

/// Total-least-squares plane through a point set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneFit {
    pub normal: Vec3,
    pub centroid: Point3,
    pub rms_distance: f64,
}

/// Fits a plane by PCA: the normal is the eigenvector of the smallest
/// covariance eigenvalue, oriented so `n_z >= 0` (then `n_y > 0`, then
/// `n_x > 0` for horizontal normals).
pub fn fit_plane(points: &[Point3]) -> Result<PlaneFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let (centroid, cov) = covariance(points);
    let eig = eig_sym3(&cov)?;
    let [_, l1, l2] = eig.values;
    if l2 <= 0.0 || l1 <= COLLINEAR_TOLERANCE * l2 {
        return Err(Error::Collinear);
    }
    let normal = upward(eig.vectors[0]);
    let sum_sq: f64 = points
        .iter()
        .map(|&p| {
            let d = normal.dot(p - centroid);
            d * d
        })
        .sum();
    Ok(PlaneFit {
        normal,
        centroid,
        rms_distance: (sum_sq / points.len() as f64).sqrt(),
    })
}

/// Sign convention for plane normals: `n_z >= 0`; if `n_z == 0` then
/// `n_y > 0`; if both are zero then `n_x > 0`.
pub fn upward(n: Vec3) -> Vec3 {
    let flip = if n.z != 0.0 {
        n.z < 0.0
    } else if n.y != 0.0 {
        n.y < 0.0
    } else {
        n.x < 0.0
    };
    if flip {
        -n
    } else {
        n
    }
}

/// Dip direction and dip (degrees) of the plane with upward unit normal `n`.
///
/// Dip direction is the azimuth from north of the normal's horizontal
/// component, in [0, 360); dip is the plane's inclination, in [0, 90].
pub fn normal_to_dip(n: Vec3) -> Result<(f64, f64)> {
    let norm = n.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnit(norm));
    }
    if n.z < 0.0 {
        return Err(Error::InvalidParameter(
            "normal must point into the upper hemisphere (n_z >= 0)".into(),
        ));
    }
    let dip_direction = if n.x == 0.0 {
        if n.y >= 0.0 {
            0.0
        } else {
            180.0
        }
    } else if n.x > 0.0 {
        90.0 - (n.y / n.x).atan().to_degrees()
    } else {
        270.0 - (n.y / n.x).atan().to_degrees()
    };
    let horizontal = n.x * n.x + n.y * n.y;
    let dip = if horizontal == 0.0 {
        0.0
    } else {
        90.0 - (n.z.abs() / horizontal.sqrt()).atan().to_degrees()
    };
    Ok((dip_direction, dip))
}

/// Upward unit normal of a plane with the given dip direction and dip.
pub fn dip_to_normal(dip_direction: f64, dip: f64) -> Vec3 {
    let (sd, cd) = dip.to_radians().sin_cos();
    let (sa, ca) = dip_direction.to_radians().sin_cos();
    Vec3::new(sd * sa, sd * ca, cd)
}

/// A pole on the lower-hemisphere equal-area net.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole {
    pub trend: f64,
    pub plunge: f64,
    pub x: f64,
    pub y: f64,
}

/// Pole of a plane and its Schmidt-net position, with north up the `y` axis.
pub fn pole_and_project(dip_direction: f64, dip: f64, net_radius: f64) -> Result<Pole> {
    if !(0.0..360.0).contains(&dip_direction) {
        return Err(Error::InvalidParameter(format!(
            "dip direction {dip_direction} outside [0, 360)"
        )));
    }
    if !(0.0..=90.0).contains(&dip) {
        return Err(Error::InvalidParameter(format!(
            "dip {dip} outside [0, 90]"
        )));
    }
    if !(net_radius > 0.0 && net_radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "net radius {net_radius} must be positive"
        )));
    }
    let trend = (dip_direction + 180.0) % 360.0;
    let plunge = 90.0 - dip;
    let r = net_radius * std::f64::consts::SQRT_2 * ((90.0 - plunge) / 2.0).to_radians().sin();
    let (st, ct) = trend.to_radians().sin_cos();
    Ok(Pole {
        trend,
        plunge,
        x: r * st,
        y: r * ct,
    })
}

/// Summary of one extracted fracture.
#[derive(Clone, Debug, PartialEq)]
pub struct FractureRegion {
    pub id: usize,
    pub point_indices: Vec<usize>,
    pub centroid: Point3,
    pub plane_normal: Vec3,
    pub dip_direction: f64,
    pub dip: f64,
    pub pole: Pole,
    pub rms_plane_distance: f64,
}

/// Output of [`summarize_regions`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegionSummary {
    pub regions: Vec<FractureRegion>,
    /// Input positions of regions whose points do not define a plane.
    pub skipped: Vec<usize>,
}

/// Orientation of each region. Degenerate regions are skipped and listed;
/// surviving regions are numbered consecutively in input order.
pub fn summarize_regions(cloud: &PointCloud, fractures: &[Vec<usize>]) -> Result<RegionSummary> {
    let mut out = RegionSummary::default();
    let mut buf = Vec::new();
    for (pos, members) in fractures.iter().enumerate() {
        buf.clear();
        for &i in members {
            let p = cloud.points.get(i).ok_or(Error::InvalidIndex {
                index: i,
                len: cloud.len(),
            })?;
            buf.push(*p);
        }
        let fit = match fit_plane(&buf) {
            Ok(f) => f,
            Err(Error::TooFewPoints(_) | Error::Collinear) => {
                out.skipped.push(pos);
                continue;
            }
            Err(e) => return Err(e),
        };
        let (dip_direction, dip) = normal_to_dip(fit.normal)?;
        let pole = pole_and_project(dip_direction, dip, 1.0)?;
        out.regions.push(FractureRegion {
            id: out.regions.len(),
            point_indices: members.clone(),
            centroid: fit.centroid,
            plane_normal: fit.normal,
            dip_direction,
            dip,
            pole,
            rms_plane_distance: fit.rms_distance,
        });
    }
    Ok(out)
}
