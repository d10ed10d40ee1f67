//! Symmetric 3x3 eigen-decomposition.
//!
//! The fast path solves the characteristic cubic in trigonometric form,
//! recovers the eigenvector of the best-isolated eigenvalue from cross
//! products of `A - λI`, and resolves the remaining pair with a 2x2 rotation
//! in the orthogonal complement. Eigenvalues are then refined as Rayleigh
//! quotients. If the result fails the residual or orthogonality check, the
//! cyclic Jacobi method is used instead.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Symmetric 3x3 matrix stored as its six unique entries.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymMat3 {
    pub xx: f64,
    pub xy: f64,
    pub xz: f64,
    pub yy: f64,
    pub yz: f64,
    pub zz: f64,
}

impl SymMat3 {
    pub const fn new(xx: f64, xy: f64, xz: f64, yy: f64, yz: f64, zz: f64) -> Self {
        SymMat3 {
            xx,
            xy,
            xz,
            yy,
            yz,
            zz,
        }
    }

    pub const fn diagonal(a: f64, b: f64, c: f64) -> Self {
        SymMat3::new(a, 0.0, 0.0, b, 0.0, c)
    }

    pub fn to_rows(&self) -> [[f64; 3]; 3] {
        [
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz],
        ]
    }

    pub fn from_rows(m: &[[f64; 3]; 3]) -> Self {
        SymMat3::new(m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2])
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        Vec3::new(
            self.xx * v.x + self.xy * v.y + self.xz * v.z,
            self.xy * v.x + self.yy * v.y + self.yz * v.z,
            self.xz * v.x + self.yz * v.y + self.zz * v.z,
        )
    }

    pub fn is_finite(&self) -> bool {
        [self.xx, self.xy, self.xz, self.yy, self.yz, self.zz]
            .iter()
            .all(|v| v.is_finite())
    }

    fn max_abs(&self) -> f64 {
        [self.xx, self.xy, self.xz, self.yy, self.yz, self.zz]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn scaled(&self, s: f64) -> Self {
        SymMat3::new(
            self.xx * s,
            self.xy * s,
            self.xz * s,
            self.yy * s,
            self.yz * s,
            self.zz * s,
        )
    }

    fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    fn shifted(&self, lambda: f64) -> Self {
        SymMat3::new(
            self.xx - lambda,
            self.xy,
            self.xz,
            self.yy - lambda,
            self.yz,
            self.zz - lambda,
        )
    }

    fn det(&self) -> f64 {
        self.xx * (self.yy * self.zz - self.yz * self.yz)
            - self.xy * (self.xy * self.zz - self.yz * self.xz)
            + self.xz * (self.xy * self.yz - self.yy * self.xz)
    }

    /// `vᵀ A v`
    pub fn quadratic_form(&self, v: Vec3) -> f64 {
        v.dot(self.mul_vec(v))
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenDecomp {
    pub values: [f64; 3],
    pub vectors: [Vec3; 3],
}

/// Solves `A v = λ v` for a symmetric 3x3 matrix.
///
/// Eigenvector signs are canonical: each vector's largest-magnitude component
/// is positive (on a tie, the first nonzero component is positive).
pub fn eig_sym3(m: &SymMat3) -> Result<EigenDecomp> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = m.max_abs();
    if scale == 0.0 {
        return Ok(EigenDecomp {
            values: [0.0; 3],
            vectors: [Vec3::X, Vec3::Y, Vec3::Z],
        });
    }
    let a = m.scaled(1.0 / scale);
    let decomp = closed_form(&a)
        .filter(|d| is_accurate(&a, d))
        .unwrap_or_else(|| jacobi(&a));
    Ok(finish(decomp, scale))
}

fn finish(mut d: EigenDecomp, scale: f64) -> EigenDecomp {
    for v in &mut d.values {
        *v *= scale;
    }
    for v in &mut d.vectors {
        *v = canonical_sign(*v);
    }
    d
}

/// Closed-form path on a matrix scaled so its largest entry is 1.
fn closed_form(a: &SymMat3) -> Option<EigenDecomp> {
    let q = a.trace() / 3.0;
    let off = a.xy * a.xy + a.xz * a.xz + a.yz * a.yz;
    let p2 = (a.xx - q).powi(2) + (a.yy - q).powi(2) + (a.zz - q).powi(2) + 2.0 * off;
    let p = (p2 / 6.0).sqrt();
    if p <= 1e-12 {
        // Isotropic to working precision.
        return None;
    }
    let b = a.shifted(q).scaled(1.0 / p);
    let r = (b.det() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let mid = 3.0 * q - hi - lo;

    // Start from whichever extreme eigenvalue is further from the middle one.
    let first = if mid - lo >= hi - mid { lo } else { hi };
    let v_first = null_vector(&a.shifted(first))?;
    let (u, w) = complement_basis(v_first);
    // Restrict A to span{u, w} and diagonalize the 2x2 block.
    let auu = a.quadratic_form(u);
    let aww = a.quadratic_form(w);
    let auw = u.dot(a.mul_vec(w));
    let (c, s) = rotation_2x2(auu, auw, aww);
    let e1 = u * c - w * s;
    let e2 = u * s + w * c;

    let mut pairs = [
        (a.quadratic_form(v_first), v_first),
        (a.quadratic_form(e1), e1),
        (a.quadratic_form(e2), e2),
    ];
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Some(EigenDecomp {
        values: [pairs[0].0, pairs[1].0, pairs[2].0],
        vectors: [pairs[0].1, pairs[1].1, pairs[2].1],
    })
}

/// Unit vector spanning the (approximate) null space of a rank-2 matrix:
/// the longest cross product between its rows.
fn null_vector(m: &SymMat3) -> Option<Vec3> {
    let rows = m.to_rows();
    let r0 = Vec3::from_array(rows[0]);
    let r1 = Vec3::from_array(rows[1]);
    let r2 = Vec3::from_array(rows[2]);
    let candidates = [r0.cross(r1), r0.cross(r2), r1.cross(r2)];
    let best = candidates
        .into_iter()
        .max_by(|a, b| a.norm_squared().total_cmp(&b.norm_squared()))?;
    if best.norm_squared() <= 1e-30 {
        return None;
    }
    best.normalized()
}

/// Two unit vectors completing `n` to an orthonormal basis.
pub(crate) fn complement_basis(n: Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vec3::X
    } else if n.y.abs() <= n.z.abs() {
        Vec3::Y
    } else {
        Vec3::Z
    };
    let u = n.cross(helper).normalized().unwrap_or(Vec3::X);
    let w = n.cross(u);
    (u, w)
}

/// Jacobi rotation `(cos, sin)` that zeroes the off-diagonal of
/// `[[app, apq], [apq, aqq]]`.
fn rotation_2x2(app: f64, apq: f64, aqq: f64) -> (f64, f64) {
    if apq == 0.0 {
        return (1.0, 0.0);
    }
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c)
}

fn is_accurate(a: &SymMat3, d: &EigenDecomp) -> bool {
    let tol = 1e-11 * d.values[2].abs().max(1.0);
    let [v0, v1, v2] = d.vectors;
    let orthonormal = [v0.dot(v1), v0.dot(v2), v1.dot(v2)]
        .iter()
        .all(|x| x.abs() < 1e-11)
        && d.vectors.iter().all(|v| (v.norm() - 1.0).abs() < 1e-11);
    orthonormal
        && d.values
            .iter()
            .zip(&d.vectors)
            .all(|(&l, &v)| (a.mul_vec(v) - v * l).norm() <= tol)
}

/// Cyclic Jacobi iteration. Slow but unconditionally stable.
pub(crate) fn jacobi(m: &SymMat3) -> EigenDecomp {
    let mut a = m.to_rows();
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _sweep in 0..64 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        let diag = a[0][0].powi(2) + a[1][1].powi(2) + a[2][2].powi(2);
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let (c, s) = rotation_2x2(a[p][p], a[p][q], a[q][q]);
            // A <- Jᵀ A J with J the (p, q) rotation.
            for row in &mut a {
                let akp = row[p];
                let akq = row[q];
                row[p] = c * akp - s * akq;
                row[q] = s * akp + c * akq;
            }
            let (rp, rq) = (a[p], a[q]);
            for k in 0..3 {
                a[p][k] = c * rp[k] - s * rq[k];
                a[q][k] = s * rp[k] + c * rq[k];
            }
            for row in &mut v {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let mut pairs: Vec<(f64, Vec3)> = (0..3)
        .map(|j| (a[j][j], Vec3::new(v[0][j], v[1][j], v[2][j])))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    EigenDecomp {
        values: [pairs[0].0, pairs[1].0, pairs[2].0],
        vectors: [pairs[0].1, pairs[1].1, pairs[2].1],
    }
}

/// Flips `v` so its largest-magnitude component is positive; on a tie in
/// magnitude the first nonzero component decides.
pub fn canonical_sign(v: Vec3) -> Vec3 {
    let c = v.to_array();
    let max = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let lead = c.iter().copied().find(|x| x.abs() == max && *x != 0.0);
    let tied = c.iter().filter(|x| x.abs() == max).count() > 1;
    let decider = if tied {
        c.iter().copied().find(|x| *x != 0.0)
    } else {
        lead
    };
    match decider {
        Some(x) if x < 0.0 => -v,
        _ => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_invariants(m: &SymMat3, d: &EigenDecomp) {
        assert!(d.values[0] <= d.values[1] && d.values[1] <= d.values[2]);
        let tol = 1e-9 * d.values[2].abs().max(1.0);
        for (l, v) in d.values.iter().zip(&d.vectors) {
            assert!((v.norm() - 1.0).abs() < 1e-9);
            assert!((m.mul_vec(*v) - *v * *l).norm() <= tol, "residual");
        }
        let [a, b, c] = d.vectors;
        assert!(a.dot(b).abs() < 1e-9 && a.dot(c).abs() < 1e-9 && b.dot(c).abs() < 1e-9);
    }

    #[test]
    fn diagonal_gives_coordinate_axes() {
        let m = SymMat3::diagonal(1.0, 2.0, 3.0);
        let d = eig_sym3(&m).unwrap();
        assert_eq!(d.values, [1.0, 2.0, 3.0]);
        assert_eq!(d.vectors, [Vec3::X, Vec3::Y, Vec3::Z]);
    }

    #[test]
    fn unsorted_diagonal_is_sorted() {
        let m = SymMat3::diagonal(5.0, -1.0, 2.0);
        let d = eig_sym3(&m).unwrap();
        assert_eq!(d.values, [-1.0, 2.0, 5.0]);
        assert_eq!(d.vectors, [Vec3::Y, Vec3::Z, Vec3::X]);
    }

    #[test]
    fn isotropic_matrix() {
        let m = SymMat3::diagonal(2.5, 2.5, 2.5);
        let d = eig_sym3(&m).unwrap();
        assert_eq!(d.values, [2.5; 3]);
        check_invariants(&m, &d);
    }

    #[test]
    fn zero_matrix() {
        let d = eig_sym3(&SymMat3::default()).unwrap();
        assert_eq!(d.values, [0.0; 3]);
    }

    #[test]
    fn repeated_pair_is_resolved() {
        // Eigenvalues (1, 1, 4) in a rotated frame.
        let m = SymMat3::new(2.0, 1.0, 1.0, 2.0, 1.0, 2.0);
        let d = eig_sym3(&m).unwrap();
        assert!((d.values[0] - 1.0).abs() < 1e-14);
        assert!((d.values[1] - 1.0).abs() < 1e-14);
        assert!((d.values[2] - 4.0).abs() < 1e-14);
        check_invariants(&m, &d);
    }

    #[test]
    fn rank_one_and_tiny_scale() {
        let m = SymMat3::new(1e-20, 1e-20, 0.0, 1e-20, 0.0, 0.0);
        let d = eig_sym3(&m).unwrap();
        assert!(d.values[0].abs() < 1e-35);
        assert!((d.values[2] - 2e-20).abs() < 1e-34);
    }

    #[test]
    fn non_finite_rejected() {
        let m = SymMat3::new(f64::NAN, 0.0, 0.0, 1.0, 0.0, 1.0);
        assert!(matches!(eig_sym3(&m), Err(Error::NonFinite)));
    }

    #[test]
    fn jacobi_path_satisfies_invariants() {
        let m = SymMat3::new(4.0, 1.0, -2.0, 2.0, 0.5, 3.0);
        let d = finish(jacobi(&m), 1.0);
        check_invariants(&m, &d);
    }

    #[test]
    fn canonical_sign_rules() {
        assert_eq!(
            canonical_sign(Vec3::new(0.1, -0.9, 0.2)),
            Vec3::new(-0.1, 0.9, -0.2)
        );
        assert_eq!(
            canonical_sign(Vec3::new(-0.5, 0.5, 0.0)),
            Vec3::new(0.5, -0.5, 0.0)
        );
        assert_eq!(
            canonical_sign(Vec3::new(0.0, -0.5, 0.5)),
            Vec3::new(0.0, 0.5, -0.5)
        );
    }
}
