use std::io::Read;

use super::{read_to_lines, Parsed};
use crate::error::{Error, Result};
use crate::geometry::Point3;

/// Whitespace-separated `x y z` records. `#` lines and blank lines are
/// skipped; fields past the third are ignored and counted.
pub(crate) fn parse<R: Read>(reader: R) -> Result<Parsed> {
    let mut points = Vec::new();
    let mut extra = 0;
    for (line_no, line) in read_to_lines(reader) {
        let line = line.map_err(|e| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let mut xyz = [0.0; 3];
        for (i, slot) in xyz.iter_mut().enumerate() {
            let tok = fields.next().ok_or_else(|| Error::Malformed {
                line: line_no,
                message: format!("expected 3 coordinates, found {i}"),
            })?;
            *slot = parse_coord(tok, line_no)?;
        }
        if fields.next().is_some() {
            extra += 1;
        }
        points.push(Point3::from_array(xyz));
    }
    Ok(Parsed {
        points,
        extra_field_records: extra,
    })
}

pub(crate) fn parse_coord(tok: &str, line: usize) -> Result<f64> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(Error::Malformed {
            line,
            message: format!("non-finite coordinate `{tok}`"),
        }),
        Err(_) => Err(Error::Malformed {
            line,
            message: format!("invalid number `{tok}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_field_line_names_its_line() {
        let err = parse("0 0 0\n1 2\n".as_bytes()).unwrap_err();
        match err {
            Error::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_and_extra_fields() {
        let p = parse("# scan\n1 2 3 255 0 0\n\n4 5 6\n".as_bytes()).unwrap();
        assert_eq!(p.points.len(), 2);
        assert_eq!(p.extra_field_records, 1);
        assert_eq!(p.points[1], Point3::new(4.0, 5.0, 6.0));
    }

    #[test]
    fn rejects_nan_and_garbage() {
        assert!(parse("1 nan 3\n".as_bytes()).is_err());
        assert!(parse("1 x 3\n".as_bytes()).is_err());
        assert!(parse("1 inf 3\n".as_bytes()).is_err());
    }
}
