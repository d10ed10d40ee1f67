//! ASCII PLY reader. Only the `vertex` element's x/y/z properties are used;
//! records of other elements are skipped by count.

use std::io::Read;

use super::xyz::parse_coord;
use super::{read_to_lines, Parsed};
use crate::error::{Error, Result};
use crate::geometry::Point3;

struct Element {
    name: String,
    count: usize,
    properties: Vec<String>,
}

pub(crate) fn parse<R: Read>(reader: R) -> Result<Parsed> {
    let mut lines = read_to_lines(reader);
    let mut next_line = move || -> Result<Option<(usize, String)>> {
        match lines.next() {
            None => Ok(None),
            Some((n, Ok(l))) => Ok(Some((n, l))),
            Some((n, Err(e))) => Err(Error::Malformed {
                line: n,
                message: e.to_string(),
            }),
        }
    };

    match next_line()? {
        Some((_, l)) if l.trim() == "ply" => {}
        _ => return Err(Error::UnsupportedPly("missing `ply` magic line".into())),
    }

    let mut elements: Vec<Element> = Vec::new();
    let mut saw_format = false;
    loop {
        let (line_no, line) = next_line()?
            .ok_or_else(|| Error::UnsupportedPly("header has no `end_header`".into()))?;
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("format") => {
                let kind = toks.next().unwrap_or("");
                if kind != "ascii" {
                    return Err(Error::UnsupportedPly(format!(
                        "format `{kind}` (only ascii PLY is supported)"
                    )));
                }
                saw_format = true;
            }
            Some("element") => {
                let name = toks.next().unwrap_or("").to_string();
                let count =
                    toks.next()
                        .and_then(|c| c.parse().ok())
                        .ok_or_else(|| Error::Malformed {
                            line: line_no,
                            message: "element declaration needs a count".into(),
                        })?;
                elements.push(Element {
                    name,
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let el = elements.last_mut().ok_or_else(|| Error::Malformed {
                    line: line_no,
                    message: "property before any element".into(),
                })?;
                // The name is the last token for both scalar and list properties.
                let name = line.split_whitespace().last().unwrap_or("").to_string();
                el.properties.push(name);
            }
            Some("end_header") => break,
            Some("comment" | "obj_info") | None => {}
            Some(other) => {
                return Err(Error::Malformed {
                    line: line_no,
                    message: format!("unexpected header keyword `{other}`"),
                })
            }
        }
    }
    if !saw_format {
        return Err(Error::UnsupportedPly("header lacks a format line".into()));
    }

    let mut points = Vec::new();
    let mut extra = 0;
    for el in &elements {
        if el.name != "vertex" {
            for _ in 0..el.count {
                next_line()?.ok_or_else(|| truncated(&el.name))?;
            }
            continue;
        }
        let column = |axis: &str| {
            el.properties
                .iter()
                .position(|p| p == axis)
                .ok_or_else(|| Error::UnsupportedPly(format!("vertex element lacks `{axis}`")))
        };
        let cols = [column("x")?, column("y")?, column("z")?];
        points.reserve(el.count);
        for _ in 0..el.count {
            let (line_no, line) = next_line()?.ok_or_else(|| truncated("vertex"))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < el.properties.len() {
                return Err(Error::Malformed {
                    line: line_no,
                    message: format!(
                        "vertex record has {} fields, header declares {}",
                        fields.len(),
                        el.properties.len()
                    ),
                });
            }
            if fields.len() > el.properties.len() {
                extra += 1;
            }
            let mut xyz = [0.0; 3];
            for (slot, &c) in xyz.iter_mut().zip(&cols) {
                *slot = parse_coord(fields[c], line_no)?;
            }
            points.push(Point3::from_array(xyz));
        }
        // Later elements are irrelevant once the vertices are read.
        break;
    }
    if !elements.iter().any(|e| e.name == "vertex") {
        return Err(Error::UnsupportedPly("no vertex element".into()));
    }
    Ok(Parsed {
        points,
        extra_field_records: extra,
    })
}

fn truncated(element: &str) -> Error {
    Error::UnsupportedPly(format!("file ends inside `{element}` records"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "ply\nformat ascii 1.0\ncomment test\nelement vertex 5\n\
        property float x\nproperty float y\nproperty float z\nproperty uchar red\n";

    #[test]
    fn five_vertex_records() {
        let body = format!("{HEADER}end_header\n0 0 0 1\n1 0 0 1\n0 1 0 1\n0 0 1 1\n1 1 1 1\n");
        let p = parse(body.as_bytes()).unwrap();
        assert_eq!(p.points.len(), 5);
        assert_eq!(p.points[4], Point3::new(1.0, 1.0, 1.0));
    }

    #[test]
    fn property_order_is_respected() {
        let body = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float z\n\
                    property float x\nproperty float y\nend_header\n3 1 2\n";
        let p = parse(body.as_bytes()).unwrap();
        assert_eq!(p.points, vec![Point3::new(1.0, 2.0, 3.0)]);
    }

    #[test]
    fn skips_elements_declared_before_vertices() {
        let body = "ply\nformat ascii 1.0\nelement camera 1\nproperty float fx\n\
                    element vertex 2\nproperty float x\nproperty float y\nproperty float z\n\
                    element face 1\nproperty list uchar int vertex_indices\nend_header\n\
                    500\n1 2 3\n4 5 6\n3 0 1 1\n";
        let p = parse(body.as_bytes()).unwrap();
        assert_eq!(p.points.len(), 2);
        assert_eq!(p.points[0], Point3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn binary_is_rejected() {
        let body = "ply\nformat binary_little_endian 1.0\nelement vertex 0\nend_header\n";
        assert!(matches!(
            parse(body.as_bytes()),
            Err(Error::UnsupportedPly(m)) if m.contains("binary_little_endian")
        ));
    }

    #[test]
    fn missing_z_is_rejected() {
        let body = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n\
                    property float y\nend_header\n1 2\n";
        assert!(matches!(
            parse(body.as_bytes()),
            Err(Error::UnsupportedPly(_))
        ));
    }

    #[test]
    fn short_record_reports_line() {
        let body = format!("{HEADER}end_header\n0 0 0 1\n1 0\n");
        match parse(body.as_bytes()) {
            Err(Error::Malformed { line, .. }) => assert_eq!(line, 11),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_body_is_rejected() {
        let body = format!("{HEADER}end_header\n0 0 0 1\n");
        assert!(parse(body.as_bytes()).is_err());
    }
}
