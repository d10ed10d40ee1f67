//! Shared fixtures for the benchmarks in `benches/`.

use outcrop_core::pipeline::{prepare, Prepared};
use outcrop_core::synth::{bench_specs, SceneRng};
use outcrop_core::{generate_synthetic, PointCloud, SymMat3};

/// Tiled planar scene with roughly `points` points at 0.01 m spacing.
pub fn tiled_scene(points: usize) -> PointCloud {
    generate_synthetic(&bench_specs(points, 1), 1)
        .expect("bench specs are valid")
        .cloud
}

pub fn prepared_scene(points: usize, k: usize) -> (PointCloud, Prepared) {
    let cloud = tiled_scene(points);
    let prepared = prepare(&cloud, k).expect("scene is large enough");
    (cloud, prepared)
}

/// Covariance-like matrices `B Bᵀ` with uniform entries in [-1, 1).
pub fn random_matrices(count: usize) -> Vec<SymMat3> {
    let mut rng = SceneRng::new(3);
    (0..count)
        .map(|_| {
            let b: Vec<f64> = (0..9).map(|_| rng.range(-1.0, 1.0)).collect();
            let dot = |i: usize, j: usize| (0..3).map(|c| b[3 * i + c] * b[3 * j + c]).sum::<f64>();
            SymMat3::new(
                dot(0, 0),
                dot(0, 1),
                dot(0, 2),
                dot(1, 1),
                dot(1, 2),
                dot(2, 2),
            )
        })
        .collect()
}
