//! Automatic extraction of planar fracture faces from outcrop point clouds.
//!
//! The pipeline estimates a normal and a curvature for every point from the
//! PCA of its k-nearest-neighbor patch, grows regions from minimum-curvature
//! seeds under a local normal-deviation threshold and a seed-promotion
//! threshold against the region's initial normal, and reports each large
//! region's best-fit plane as dip direction / dip with its stereonet pole.
//!
//! ```no_run
//! use outcrop_core::{extract, load_points, Format, GrowParams, Point3};
//!
//! let cloud = load_points("scan.xyz".as_ref(), Format::Auto, Point3::ZERO)?;
//! let result = extract(&cloud, &GrowParams::default(), false)?;
//! for f in &result.fractures {
//!     println!("{}: {:.1}/{:.1}", f.id, f.dip_direction, f.dip);
//! }
//! # Ok::<(), outcrop_core::Error>(())
//! ```

pub mod eigen;
pub mod error;
pub mod features;
pub mod geometry;
pub mod ingest;
pub mod orientation;
pub mod pipeline;
pub mod segmentation;
pub mod spatial;
pub mod synth;

pub use eigen::{eig_sym3, EigenDecomp, SymMat3};
pub use error::{Error, Result};
pub use features::{compute_local_features, LocalFeatures};
pub use geometry::{Mat3, Point3, Vec3};
pub use ingest::{load_points, write_outputs, Format, PointCloud};
pub use orientation::{
    fit_plane, normal_to_dip, pole_and_project, summarize_regions, FractureRegion, PlaneFit, Pole,
};
pub use pipeline::{extract, Extraction, StageTimings};
pub use segmentation::{
    classify_regions, grow_regions, grow_regions_traced, Classification, GrowParams, Segmentation,
};
pub use spatial::{Neighbor, NeighborGraph, NeighborIndex, Neighborhoods};
pub use synth::{generate_synthetic, score_against_truth, PlaneSpec, SegmentationScore};
