//! Point-cloud input and pipeline output.
//!
//! Input is ASCII XYZ (`x y z` per line) or ASCII PLY. Outputs are CSV tables
//! with a header row and a standalone SVG pole plot; every numeric field is
//! written with six decimal places so repeated runs are byte-identical.

mod output;
mod ply;
mod xyz;

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

pub use output::{
    write_features, write_growth_trace, write_outputs, write_truth_labels, write_xyz, OutputReport,
};

use crate::error::{Error, Result};
use crate::geometry::Point3;

/// Default axis-convention tag: x east, y north, z up.
pub const ENU_NOTE: &str = "x=east,y=north,z=up";

/// An ordered, index-addressable set of points plus the scanner viewpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Point3>,
    pub viewpoint: Point3,
    pub crs_note: String,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>, viewpoint: Point3) -> Self {
        PointCloud {
            points,
            viewpoint,
            crs_note: ENU_NOTE.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the processing invariants: nonempty, all coordinates finite,
    /// finite viewpoint that does not coincide with every point.
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if let Some(i) = self.points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "point {i} has non-finite coordinates"
            )));
        }
        if !self.viewpoint.is_finite() {
            return Err(Error::InvalidParameter("viewpoint is not finite".into()));
        }
        if self.points.iter().all(|p| *p == self.viewpoint) {
            return Err(Error::InvalidParameter(
                "viewpoint coincides with every point".into(),
            ));
        }
        Ok(())
    }
}

/// Input file format.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Auto,
    Xyz,
    Ply,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Format::Auto),
            "xyz" => Ok(Format::Xyz),
            "ply" => Ok(Format::Ply),
            other => Err(Error::InvalidParameter(format!(
                "unknown format `{other}` (expected auto, xyz or ply)"
            ))),
        }
    }
}

/// Result of parsing a point file, before the viewpoint is attached.
#[derive(Debug)]
pub(crate) struct Parsed {
    pub points: Vec<Point3>,
    /// Records that carried more than three fields.
    pub extra_field_records: usize,
}

/// Loads a point cloud from `path`. Points keep file order.
pub fn load_points(path: &Path, format: Format, viewpoint: Point3) -> Result<PointCloud> {
    let read_err = |source| Error::Read {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(read_err)?;
    let mut reader = BufReader::new(file);

    let format = match format {
        Format::Auto => resolve_format(path, &mut reader)
            .map_err(read_err)?
            .ok_or_else(|| Error::UnknownFormat(path.to_path_buf()))?,
        f => f,
    };

    let parsed = match format {
        Format::Ply => ply::parse(reader)?,
        _ => xyz::parse(reader)?,
    };
    if parsed.points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if parsed.extra_field_records > 0 {
        log_extra_fields(path, parsed.extra_field_records);
    }
    Ok(PointCloud::new(parsed.points, viewpoint))
}

/// Parses an in-memory XYZ document.
pub fn parse_xyz(text: &str) -> Result<Vec<Point3>> {
    xyz::parse(text.as_bytes()).map(|p| p.points)
}

/// Parses an in-memory ASCII PLY document.
pub fn parse_ply(text: &str) -> Result<Vec<Point3>> {
    ply::parse(text.as_bytes()).map(|p| p.points)
}

fn log_extra_fields(path: &Path, count: usize) {
    eprintln!(
        "warning: {}: ignored trailing fields on {count} record(s)",
        path.display()
    );
}

/// Extension first, then a look at the first bytes of the file.
fn resolve_format<R: BufRead>(path: &Path, reader: &mut R) -> std::io::Result<Option<Format>> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("ply") => return Ok(Some(Format::Ply)),
        Some("xyz" | "txt" | "pts" | "asc") => return Ok(Some(Format::Xyz)),
        _ => {}
    }
    let head = reader.fill_buf()?;
    let head = &head[..head.len().min(64)];
    if head.starts_with(b"ply") {
        return Ok(Some(Format::Ply));
    }
    let text = String::from_utf8_lossy(head);
    let first = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .unwrap_or("");
    if first
        .split_whitespace()
        .next()
        .is_some_and(|tok| tok.parse::<f64>().is_ok())
    {
        return Ok(Some(Format::Xyz));
    }
    Ok(None)
}

pub(crate) fn read_to_lines<R: Read>(
    reader: R,
) -> impl Iterator<Item = (usize, std::io::Result<String>)> {
    BufReader::new(reader)
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn temp_file(name: &str, body: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        File::create(&path)
            .unwrap()
            .write_all(body.as_bytes())
            .unwrap();
        (dir, path)
    }

    #[test]
    fn loads_three_xyz_points_in_order() {
        let (_d, path) = temp_file("a.xyz", "0 0 0\n1 0 0\n0 1 0\n");
        let cloud = load_points(&path, Format::Auto, Point3::ZERO).unwrap();
        assert_eq!(cloud.points, vec![Point3::ZERO, Point3::X, Point3::Y]);
    }

    #[test]
    fn sniffs_ply_header_without_extension() {
        let body = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n\
                    property float y\nproperty float z\nend_header\n1 2 3\n";
        let (_d, path) = temp_file("cloud.dat", body);
        let cloud = load_points(&path, Format::Auto, Point3::ZERO).unwrap();
        assert_eq!(cloud.points, vec![Point3::new(1.0, 2.0, 3.0)]);
    }

    #[test]
    fn sniffs_xyz_without_extension() {
        let (_d, path) = temp_file("cloud.dat", "# header\n1 2 3\n");
        let cloud = load_points(&path, Format::Auto, Point3::ZERO).unwrap();
        assert_eq!(cloud.len(), 1);
    }

    #[test]
    fn unknown_content_is_rejected() {
        let (_d, path) = temp_file("cloud.dat", "hello world\n");
        assert!(matches!(
            load_points(&path, Format::Auto, Point3::ZERO),
            Err(Error::UnknownFormat(_))
        ));
    }

    #[test]
    fn missing_file_is_a_read_error() {
        let err =
            load_points(Path::new("/nonexistent/x.xyz"), Format::Auto, Point3::ZERO).unwrap_err();
        assert!(matches!(err, Error::Read { .. }));
    }

    #[test]
    fn zero_points_is_an_error() {
        let (_d, path) = temp_file("e.xyz", "# nothing\n\n");
        assert!(matches!(
            load_points(&path, Format::Xyz, Point3::ZERO),
            Err(Error::EmptyCloud)
        ));
    }

    #[test]
    fn validate_rejects_viewpoint_on_every_point() {
        let cloud = PointCloud::new(vec![Point3::ZERO; 3], Point3::ZERO);
        assert!(cloud.validate().is_err());
        let cloud = PointCloud::new(vec![Point3::ZERO, Point3::X], Point3::ZERO);
        assert!(cloud.validate().is_ok());
    }
}
