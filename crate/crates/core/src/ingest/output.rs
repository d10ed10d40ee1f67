use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::PointCloud;
use crate::error::{Error, Result};
use crate::features::LocalFeatures;
use crate::orientation::{pole_svg, FractureRegion, SvgOptions};
use crate::segmentation::GrowthTrace;

/// Files produced by a writer, with their sizes in bytes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutputReport {
    pub files: Vec<(PathBuf, u64)>,
}

impl OutputReport {
    fn push(&mut self, path: PathBuf) -> Result<()> {
        let len = fs::metadata(&path)
            .map_err(|source| Error::Write {
                path: path.clone(),
                source,
            })?
            .len();
        self.files.push((path, len));
        Ok(())
    }
}

/// Writes `labels.csv`, `regions.csv` and `poles.svg` into `dir`.
///
/// Labels are derived from the regions' point sets; every other point is -1.
pub fn write_outputs(
    cloud: &PointCloud,
    regions: &[FractureRegion],
    dir: &Path,
) -> Result<OutputReport> {
    fs::create_dir_all(dir).map_err(|source| Error::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut labels = vec![-1i64; cloud.len()];
    for r in regions {
        for &i in &r.point_indices {
            let slot = labels.get_mut(i).ok_or(Error::InvalidIndex {
                index: i,
                len: cloud.len(),
            })?;
            *slot = r.id as i64;
        }
    }

    let mut report = OutputReport::default();

    let path = dir.join("labels.csv");
    write_with(&path, |w| {
        writeln!(w, "index,x,y,z,region")?;
        for (i, (p, l)) in cloud.points.iter().zip(&labels).enumerate() {
            writeln!(w, "{i},{},{},{},{l}", f6(p.x), f6(p.y), f6(p.z))?;
        }
        Ok(())
    })?;
    report.push(path)?;

    let path = dir.join("regions.csv");
    write_with(&path, |w| {
        writeln!(
            w,
            "region,points,centroid_x,centroid_y,centroid_z,normal_x,normal_y,normal_z,\
             dip_direction,dip,pole_trend,pole_plunge"
        )?;
        for r in regions {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.id,
                r.point_indices.len(),
                f6(r.centroid.x),
                f6(r.centroid.y),
                f6(r.centroid.z),
                f6(r.plane_normal.x),
                f6(r.plane_normal.y),
                f6(r.plane_normal.z),
                f6(r.dip_direction),
                f6(r.dip),
                f6(r.pole.trend),
                f6(r.pole.plunge),
            )?;
        }
        Ok(())
    })?;
    report.push(path)?;

    let path = dir.join("poles.svg");
    let svg = pole_svg(regions, &SvgOptions::default());
    write_with(&path, |w| w.write_all(svg.as_bytes()))?;
    report.push(path)?;

    Ok(report)
}

/// Debug dump of per-point features.
pub fn write_features(features: &[LocalFeatures], path: &Path) -> Result<()> {
    write_with(path, |w| {
        writeln!(w, "index,nx,ny,nz,sigma,degenerate")?;
        for (i, f) in features.iter().enumerate() {
            writeln!(
                w,
                "{i},{},{},{},{},{}",
                f6(f.normal.x),
                f6(f.normal.y),
                f6(f.normal.z),
                f6(f.curvature),
                u8::from(f.degenerate)
            )?;
        }
        Ok(())
    })
}

/// Admission history; the admitting seed of a region's initial point is -1.
pub fn write_growth_trace(trace: &GrowthTrace, path: &Path) -> Result<()> {
    write_with(path, |w| {
        writeln!(w, "step,region,point,seed,angle_to_seed,angle_to_nmin")?;
        for e in &trace.events {
            let seed = e.admitted_by.map_or(-1, |s| s as i64);
            writeln!(
                w,
                "{},{},{},{seed},{},{}",
                e.step,
                e.region,
                e.point,
                f6(e.angle_to_seed),
                f6(e.angle_to_initial)
            )?;
        }
        Ok(())
    })
}

/// `x y z` per line, six decimals.
pub fn write_xyz(cloud: &PointCloud, path: &Path) -> Result<()> {
    write_with(path, |w| {
        for p in &cloud.points {
            writeln!(w, "{} {} {}", f6(p.x), f6(p.y), f6(p.z))?;
        }
        Ok(())
    })
}

pub fn write_truth_labels(labels: &[i64], path: &Path) -> Result<()> {
    write_with(path, |w| {
        writeln!(w, "index,label")?;
        for (i, l) in labels.iter().enumerate() {
            writeln!(w, "{i},{l}")?;
        }
        Ok(())
    })
}

/// Fixed six-decimal rendering; negative zero prints as zero.
fn f6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn write_with(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let wrap = |source| Error::Write {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(wrap)?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(wrap)?;
    w.flush().map_err(wrap)
}
