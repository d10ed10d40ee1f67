use std::fs;

use outcrop_core::ingest::{write_xyz, ENU_NOTE};
use outcrop_core::synth::{generate_synthetic, two_plane_specs};
use outcrop_core::{extract, load_points, write_outputs, Error, Format, GrowParams, Point3};

#[test]
fn xyz_round_trip_preserves_points_to_micrometres() {
    let scene = generate_synthetic(&two_plane_specs(), 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cloud.xyz");
    write_xyz(&scene.cloud, &path).unwrap();
    let back = load_points(&path, Format::Auto, scene.cloud.viewpoint).unwrap();
    assert_eq!(back.len(), scene.cloud.len());
    assert_eq!(back.crs_note, ENU_NOTE);
    for (a, b) in scene.cloud.points.iter().zip(&back.points) {
        assert!((*a - *b).norm() < 1e-6);
    }
}

#[test]
fn ply_and_xyz_agree() {
    let dir = tempfile::tempdir().unwrap();
    let xyz = dir.path().join("a.txt");
    let ply = dir.path().join("a.ply");
    fs::write(&xyz, "# header\n0 0 0\n1 0 0 255 0 0\n\n0 1 0.5\n").unwrap();
    fs::write(
        &ply,
        "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n\
         property uchar red\nend_header\n0 0 0 1\n1 0 0 2\n0 1 0.5 3\n",
    )
    .unwrap();
    let a = load_points(&xyz, Format::Auto, Point3::ZERO).unwrap();
    let b = load_points(&ply, Format::Auto, Point3::ZERO).unwrap();
    assert_eq!(a.points, b.points);
}

#[test]
fn malformed_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.xyz");
    fs::write(&path, "0 0 0\n1 2\n").unwrap();
    match load_points(&path, Format::Xyz, Point3::ZERO) {
        Err(Error::Malformed { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    let missing = dir.path().join("none.xyz");
    assert!(matches!(
        load_points(&missing, Format::Xyz, Point3::ZERO),
        Err(Error::Read { .. })
    ));
}

#[test]
fn outputs_are_written() {
    let scene = generate_synthetic(&two_plane_specs(), 1).unwrap();
    let ex = extract(&scene.cloud, &GrowParams::default(), false).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = write_outputs(&scene.cloud, &ex.fractures, dir.path()).unwrap();
    assert_eq!(report.files.len(), 3);
    let labels = fs::read_to_string(dir.path().join("labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), scene.cloud.len() + 1);
    let regions = fs::read_to_string(dir.path().join("regions.csv")).unwrap();
    assert_eq!(regions.lines().count(), ex.fractures.len() + 1);
    let svg = fs::read_to_string(dir.path().join("poles.svg")).unwrap();
    assert_eq!(svg.matches("<title>region").count(), ex.fractures.len());
}
