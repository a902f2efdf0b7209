//! SVG frames: α-cells shaded, the boundary drawn on top, pinned edges in red.

use std::fmt::Write as _;

use chessflow::flow::Snapshot;
use chessflow::geometry::Point;
use chessflow::medium::Phase;
use chessflow::Medium;

/// Axis-aligned view window in model coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct View {
    pub lo: Point<f64>,
    pub hi: Point<f64>,
}

impl View {
    /// Bounding box of `points` padded by `pad` on every side.
    pub fn around(points: &[Point<f64>], pad: f64) -> Self {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        View {
            lo: Point::new(lo.x - pad, lo.y - pad),
            hi: Point::new(hi.x + pad, hi.y + pad),
        }
    }
}

pub fn frame(snap: &Snapshot<f64>, medium: &Medium, view: &View, size: f64) -> String {
    let (w, h) = (view.hi.x - view.lo.x, view.hi.y - view.lo.y);
    let scale = size / w.max(h);
    // y grows upward in the model, downward in SVG
    let map = |p: Point<f64>| ((p.x - view.lo.x) * scale, (view.hi.y - p.y) * scale);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}">"#,
        w * scale,
        h * scale
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let c = medium.half_cell();
    let (i0, i1) = (
        (view.lo.x / c).floor() as i64,
        (view.hi.x / c).ceil() as i64,
    );
    let (j0, j1) = (
        (view.lo.y / c).floor() as i64,
        (view.hi.y / c).ceil() as i64,
    );
    let _ = writeln!(s, r##"<g fill="#d9d9d9">"##);
    for i in i0..i1 {
        for j in j0..j1 {
            if medium.cell_phase(i, j) == Phase::Alpha {
                let (x, y) = map(Point::new(i as f64 * c, (j + 1) as f64 * c));
                let _ = writeln!(
                    s,
                    r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}"/>"#,
                    c * scale,
                    c * scale
                );
            }
        }
    }
    let _ = writeln!(s, "</g>");
    let vs = snap.polyrect.vertices();
    let pts: Vec<String> = vs
        .iter()
        .map(|&p| {
            let (x, y) = map(p);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(
        s,
        r##"<polygon points="{}" fill="none" stroke="#1f4e99" stroke-width="2"/>"##,
        pts.join(" ")
    );
    let m = vs.len();
    for (i, &pinned) in snap.pinned.iter().enumerate() {
        if pinned && m > 0 {
            // edge i runs from vertex i to vertex i+1
            let (a, b) = (map(vs[i]), map(vs[(i + 1) % m]));
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c62828" stroke-width="3"/>"##,
                a.0, a.1, b.0, b.1
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="6" y="16" font-family="monospace" font-size="12">t = {:.5}</text>"#,
        snap.time
    );
    s.push_str("</svg>\n");
    s
}
