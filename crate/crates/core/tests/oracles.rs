//! Implementation-vs-oracle checks for the numeric kernels.

mod common;

use common::{brute_knn, covariance_oracle, eigenvalue_errors, jacobi_oracle, random_psd};
use outcrop_core::features::compute_local_features;
use outcrop_core::synth::{generate_synthetic, PlaneSpec, SceneRng};
use outcrop_core::{eig_sym3, fit_plane, NeighborIndex, Point3, PointCloud, SymMat3, Vec3};

fn uniform_cloud(n: usize, seed: u64) -> Vec<Point3> {
    let mut rng = SceneRng::new(seed);
    (0..n)
        .map(|_| Point3::new(rng.uniform(), rng.uniform(), rng.uniform()))
        .collect()
}

#[test]
fn knn_matches_linear_scan_on_uniform_cloud() {
    let pts = uniform_cloud(10_000, 11);
    let index = NeighborIndex::from_points(&pts).unwrap();
    let mut rng = SceneRng::new(12);
    for _ in 0..100 {
        let q = (rng.uniform() * pts.len() as f64) as usize;
        for k in [1, 8, 30] {
            let got: Vec<_> = index
                .knn(q, k)
                .unwrap()
                .iter()
                .map(|n| (n.index, n.distance))
                .collect();
            assert_eq!(got, brute_knn(&pts, q, k), "query {q}, k {k}");
        }
    }
}

#[test]
fn knn_matches_linear_scan_on_gaussian_blob() {
    let mut rng = SceneRng::new(3);
    let pts: Vec<_> = (0..5_000)
        .map(|_| Point3::new(rng.gaussian(), rng.gaussian(), 0.2 * rng.gaussian()))
        .collect();
    let index = NeighborIndex::from_points(&pts).unwrap();
    for _ in 0..50 {
        let q = (rng.uniform() * pts.len() as f64) as usize;
        let got: Vec<_> = index
            .knn(q, 30)
            .unwrap()
            .iter()
            .map(|n| (n.index, n.distance))
            .collect();
        assert_eq!(got, brute_knn(&pts, q, 30));
    }
}

#[test]
fn knn_exhaustive_with_ties_on_integer_grid() {
    // A regular grid produces many exactly equal distances.
    let mut pts = Vec::new();
    for i in 0..6 {
        for j in 0..6 {
            for l in 0..3 {
                pts.push(Point3::new(i as f64, j as f64, l as f64));
            }
        }
    }
    let index = NeighborIndex::from_points(&pts).unwrap();
    let n = pts.len();
    for q in 0..n {
        let got: Vec<_> = index
            .knn(q, n - 1)
            .unwrap()
            .iter()
            .map(|nb| (nb.index, nb.distance))
            .collect();
        assert_eq!(got, brute_knn(&pts, q, n - 1));
        let got: Vec<_> = index.knn(q, 7).unwrap().iter().map(|nb| nb.index).collect();
        let want: Vec<_> = brute_knn(&pts, q, 7).iter().map(|x| x.0).collect();
        assert_eq!(got, want);
    }
}

#[test]
fn knn_is_repeatable_across_threads() {
    let pts = uniform_cloud(3_000, 5);
    let index = NeighborIndex::from_points(&pts).unwrap();
    let first: Vec<_> = (0..200).map(|q| index.knn(q, 20).unwrap()).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..4)
            .map(|_| {
                s.spawn(|| {
                    (0..200)
                        .map(|q| index.knn(q, 20).unwrap())
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), first);
        }
    });
}

#[test]
fn eigenvalues_match_jacobi_oracle() {
    let mut rng = SceneRng::new(2024);
    for _ in 0..1_000 {
        let m = random_psd(&mut rng);
        let (want, _) = jacobi_oracle(m);
        let got = eig_sym3(&SymMat3::from_rows(&m)).unwrap();
        let (norm_rel, cond_rel) = eigenvalue_errors(&got.values, &want);
        assert!(
            norm_rel <= 1e-9 && cond_rel <= 1e-9,
            "{:?} vs {:?}",
            got.values,
            want
        );
        // Eigenvectors agree up to sign wherever the eigenvalue is isolated.
        let (_, vecs) = jacobi_oracle(m);
        for i in 0..3 {
            let gap = (0..3)
                .filter(|&j| j != i)
                .map(|j| (want[i] - want[j]).abs())
                .fold(f64::INFINITY, f64::min);
            if gap > 1e-3 * want[2] {
                assert!(1.0 - got.vectors[i].dot(vecs[i]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn local_features_match_covariance_oracle_on_jittered_plane() {
    let spec = PlaneSpec {
        dip_direction: 30.0,
        dip: 40.0,
        center: Point3::new(1.0, 2.0, 3.0),
        extent: (0.4, 0.4),
        spacing: 0.01,
        noise_sigma: 0.001,
        label: 0,
    };
    let truth = spec.normal();
    let scene = generate_synthetic(&[spec], 8).unwrap();
    let cloud = &scene.cloud;
    let index = NeighborIndex::build(cloud).unwrap();
    let feats = compute_local_features(cloud, &index, 30).unwrap();
    for (q, f) in feats.iter().enumerate() {
        let mut hood = vec![cloud.points[q]];
        hood.extend(
            brute_knn(&cloud.points, q, 30)
                .iter()
                .map(|&(i, _)| cloud.points[i]),
        );
        let (vals, vecs) = jacobi_oracle(covariance_oracle(&hood));
        let sigma = vals[0].max(0.0) / (vals[0].max(0.0) + vals[1] + vals[2]);
        assert!((f.curvature - sigma).abs() < 1e-9, "point {q}");
        let mut v0 = vecs[0];
        if v0.dot(cloud.viewpoint - cloud.points[q]) < 0.0 {
            v0 = -v0;
        }
        assert!((f.normal - v0).norm() < 1e-6, "point {q}");
        assert!(f.curvature < 0.02);
        assert!(f.normal.angle_deg(truth) < 5.0);
    }
}

#[test]
fn noisy_plane_fit_recovers_truth() {
    let mut rng = SceneRng::new(77);
    for trial in 0..20 {
        let truth = Vec3::new(rng.gaussian(), rng.gaussian(), rng.gaussian().abs() + 0.1)
            .normalized()
            .unwrap();
        let (u, w) = {
            let a = if truth.x.abs() < 0.9 {
                Vec3::X
            } else {
                Vec3::Y
            };
            let u = truth.cross(a).normalized().unwrap();
            (u, truth.cross(u))
        };
        let pts: Vec<_> = (0..500)
            .map(|_| {
                u * rng.range(-1.0, 1.0)
                    + w * rng.range(-1.0, 1.0)
                    + truth * (0.002 * rng.gaussian())
            })
            .collect();
        let fit = fit_plane(&pts).unwrap();
        let (_, vecs) = jacobi_oracle(covariance_oracle(&pts));
        assert!(1.0 - fit.normal.dot(vecs[0]).abs() < 1e-12, "trial {trial}");
        assert!(fit.normal.angle_deg(truth) < 0.5, "trial {trial}");
        assert!(fit.rms_distance > 0.7 * 0.002 && fit.rms_distance < 1.3 * 0.002);
    }
}

#[test]
fn single_point_cloud_has_no_neighbors() {
    let cloud = PointCloud::new(vec![Point3::X], Point3::ZERO);
    let index = NeighborIndex::build(&cloud).unwrap();
    assert!(index.knn(0, 3).unwrap().is_empty());
}
