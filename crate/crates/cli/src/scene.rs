use std::fs;

use anyhow::{Context, Result};
use clap::ValueEnum;
use outcrop_core::ingest::{write_truth_labels, write_xyz};
use outcrop_core::synth::{
    generate_sphere, random_plane_specs, two_plane_specs, undulating_surface, SyntheticScene,
};
use outcrop_core::{generate_synthetic, PlaneSpec};
use serde_json::json;

use crate::SynthArgs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SceneKind {
    /// Two 1.2 m square planes, 14,641 points each.
    TwoPlanes,
    /// `--count` randomly oriented planes on a 3 m lattice.
    Random,
    /// A gently undulating 2 m square surface.
    Undulating,
    /// 40,000 points on a unit sphere, viewed from the centre.
    Sphere,
}

/// Writes `cloud.xyz`, `truth_labels.csv` and `scene.json` (viewpoint and
/// true plane normals).
pub fn run_synth(args: &SynthArgs) -> Result<()> {
    let scene = build(args)?;
    let dir = &args.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("write: cannot create {}", dir.display()))?;
    write_xyz(&scene.cloud, &dir.join("cloud.xyz")).context("write")?;
    write_truth_labels(&scene.labels, &dir.join("truth_labels.csv")).context("write")?;
    let v = scene.cloud.viewpoint;
    let normals: Vec<_> = scene
        .normals
        .iter()
        .map(|(label, n)| json!({ "label": label, "normal": n.to_array() }))
        .collect();
    let meta = json!({
        "points": scene.cloud.len(),
        "viewpoint": v.to_array(),
        "normals": normals,
    });
    let path = dir.join("scene.json");
    fs::write(&path, serde_json::to_string_pretty(&meta)? + "\n")
        .with_context(|| format!("write: {}", path.display()))?;
    eprintln!(
        "{} points; viewpoint {},{},{}",
        scene.cloud.len(),
        v.x,
        v.y,
        v.z
    );
    Ok(())
}

fn build(args: &SynthArgs) -> Result<SyntheticScene> {
    if let Some(path) = &args.spec {
        let text = fs::read_to_string(path)
            .with_context(|| format!("synth: reading {}", path.display()))?;
        let specs: Vec<PlaneSpec> = serde_json::from_str(&text)
            .with_context(|| format!("synth: parsing {}", path.display()))?;
        return generate_synthetic(&specs, args.seed).context("synth");
    }
    let scene = match args.scene {
        SceneKind::TwoPlanes => generate_synthetic(&two_plane_specs(), args.seed)?,
        SceneKind::Random => {
            let specs = random_plane_specs(args.count, args.seed, args.spacing, args.noise);
            generate_synthetic(&specs, args.seed)?
        }
        SceneKind::Undulating => undulating_surface(args.seed),
        SceneKind::Sphere => generate_sphere(40_000, 1.0, args.noise, args.seed),
    };
    Ok(scene)
}
