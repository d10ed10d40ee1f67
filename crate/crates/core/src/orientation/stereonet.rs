use std::fmt::Write;

use super::FractureRegion;

/// Layout of the pole plot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvgOptions {
    /// Net radius in SVG user units.
    pub radius: f64,
    pub margin: f64,
    pub marker_radius: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            radius: 200.0,
            margin: 40.0,
            marker_radius: 3.0,
        }
    }
}

/// Standalone SVG 1.1 pole scatter on a lower-hemisphere equal-area net.
///
/// The primitive circle, N/E/S/W ticks, and one marker per region pole.
/// Output depends only on the inputs, so identical regions give identical
/// bytes.
pub fn pole_svg(regions: &[FractureRegion], opts: &SvgOptions) -> String {
    let r = opts.radius;
    let size = 2.0 * (r + opts.margin);
    let c = r + opts.margin;
    let tick = r * 0.05;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size:.3}" height="{size:.3}" viewBox="0 0 {size:.3} {size:.3}">"#
    );
    let _ = writeln!(
        s,
        "<title>Poles to fracture planes, lower-hemisphere equal-area ({} poles)</title>",
        regions.len()
    );
    let _ = writeln!(
        s,
        r#"<circle cx="{c:.3}" cy="{c:.3}" r="{r:.3}" fill="none" stroke="black" stroke-width="1.5"/>"#
    );
    let _ = writeln!(
        s,
        r#"<path d="M {:.3} {c:.3} L {:.3} {c:.3} M {c:.3} {:.3} L {c:.3} {:.3}" stroke="gray" stroke-width="0.75"/>"#,
        c - tick,
        c + tick,
        c - tick,
        c + tick
    );
    // (label, dx, dy) with y pointing north, i.e. up the page.
    for (label, dx, dy) in [
        ("N", 0.0, 1.0),
        ("E", 1.0, 0.0),
        ("S", 0.0, -1.0),
        ("W", -1.0, 0.0),
    ] {
        let (x0, y0) = (c + dx * r, c - dy * r);
        let (x1, y1) = (c + dx * (r + tick), c - dy * (r + tick));
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y1:.3}" stroke="black" stroke-width="1.5"/>"#
        );
        let (lx, ly) = (c + dx * (r + 3.0 * tick), c - dy * (r + 3.0 * tick));
        let _ = writeln!(
            s,
            r#"<text x="{lx:.3}" y="{ly:.3}" font-family="sans-serif" font-size="14" text-anchor="middle" dominant-baseline="middle">{label}</text>"#
        );
    }
    let _ = writeln!(s, r#"<g fill="black" stroke="none">"#);
    for region in regions {
        // Poles are projected on a unit net; scale to the drawing.
        let x = c + region.pole.x * r;
        let y = c - region.pole.y * r;
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}"><title>region {}: {:.1}/{:.1}</title></circle>"#,
            opts.marker_radius, region.id, region.dip_direction, region.dip
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}
