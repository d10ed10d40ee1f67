//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use outcrop_core::synth::SceneRng;
use outcrop_core::{Point3, Vec3};

/// Linear scan: all other points sorted by (distance, index).
pub fn brute_knn(points: &[Point3], query: usize, k: usize) -> Vec<(usize, f64)> {
    let q = points[query];
    let mut all: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != query)
        .map(|(i, p)| {
            let dx = q.x - p.x;
            let dy = q.y - p.y;
            let dz = q.z - p.z;
            (dx * dx + dy * dy + dz * dz, i)
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.truncate(k);
    all.into_iter().map(|(d2, i)| (i, d2.sqrt())).collect()
}

/// Classical cyclic Jacobi with threshold sweeps on a dense 3x3 matrix.
/// Returns eigenvalues ascending and the matching eigenvectors.
pub fn jacobi_oracle(m: [[f64; 3]; 3]) -> ([f64; 3], [Vec3; 3]) {
    let mut a = m;
    let mut v = [[0.0; 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..100 {
        let off: f64 = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off == 0.0 {
            break;
        }
        for p in 0..2 {
            for q in (p + 1)..3 {
                if a[p][q] == 0.0 {
                    continue;
                }
                let phi = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                let (s, c) = phi.sin_cos();
                // Rotation G in plane (p, q); A <- Gᵀ A G.
                let mut g = [[0.0; 3]; 3];
                for (i, row) in g.iter_mut().enumerate() {
                    row[i] = 1.0;
                }
                g[p][p] = c;
                g[q][q] = c;
                g[p][q] = s;
                g[q][p] = -s;
                a = mul(&transpose(&g), &mul(&a, &g));
                v = mul(&v, &g);
                a[p][q] = 0.0;
                a[q][p] = 0.0;
            }
        }
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let vals = [a[idx[0]][idx[0]], a[idx[1]][idx[1]], a[idx[2]][idx[2]]];
    let col = |j: usize| Vec3::new(v[0][j], v[1][j], v[2][j]);
    (vals, [col(idx[0]), col(idx[1]), col(idx[2])])
}

fn mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    r
}

fn transpose(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = a[j][i];
        }
    }
    r
}

/// Dense covariance about the mean, normalized by the count.
pub fn covariance_oracle(points: &[Point3]) -> [[f64; 3]; 3] {
    let n = points.len() as f64;
    let mut mean = [0.0; 3];
    for p in points {
        for (m, c) in mean.iter_mut().zip(p.to_array()) {
            *m += c / n;
        }
    }
    let mut c = [[0.0; 3]; 3];
    for p in points {
        let d = [p.x - mean[0], p.y - mean[1], p.z - mean[2]];
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] += d[i] * d[j] / n;
            }
        }
    }
    c
}

/// Random symmetric PSD matrix `B Bᵀ` with entries of B uniform in [-1, 1).
pub fn random_psd(rng: &mut SceneRng) -> [[f64; 3]; 3] {
    let mut b = [[0.0; 3]; 3];
    for row in &mut b {
        for x in row.iter_mut() {
            *x = rng.range(-1.0, 1.0);
        }
    }
    mul(&b, &transpose(&b))
}

/// Uniformly random rotation from a random unit quaternion.
pub fn random_rotation(rng: &mut SceneRng) -> outcrop_core::Mat3 {
    let (w, x, y, z) = loop {
        let q = [
            rng.gaussian(),
            rng.gaussian(),
            rng.gaussian(),
            rng.gaussian(),
        ];
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-6 {
            break (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
        }
    };
    outcrop_core::Mat3([
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ])
}

pub fn angle_between_lines_deg(a: Vec3, b: Vec3) -> f64 {
    let d = precise_angle_deg(a, b);
    d.min(180.0 - d)
}

/// Angle between unit vectors via `atan2`, accurate for tiny angles.
pub fn precise_angle_deg(a: Vec3, b: Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b)).to_degrees()
}

/// Eigenvalue disagreement as `(norm_relative, conditioned_relative)`: the
/// largest difference divided by the spectral radius, and the largest
/// per-eigenvalue relative difference over eigenvalues of at least 1e-3 of
/// the spectral radius. Smaller eigenvalues carry absolute rounding error of
/// order eps times the spectral radius in any double-precision solver.
pub fn eigenvalue_errors(got: &[f64; 3], want: &[f64; 3]) -> (f64, f64) {
    let radius = want
        .iter()
        .fold(0.0f64, |m, w| m.max(w.abs()))
        .max(f64::MIN_POSITIVE);
    let mut norm_rel = 0.0f64;
    let mut cond_rel = 0.0f64;
    for (g, w) in got.iter().zip(want) {
        norm_rel = norm_rel.max((g - w).abs() / radius);
        if w.abs() >= 1e-3 * radius {
            cond_rel = cond_rel.max((g - w).abs() / w.abs());
        }
    }
    (norm_rel, cond_rel)
}
