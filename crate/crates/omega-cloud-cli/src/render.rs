//! Deterministic SVG rendering. Polygons are filled, cloud arcs are bold
//! polylines (64 segments each), junctions are disk marks, and each arc's
//! supporting circle is a thin outline. Geometry is y-up, SVG is y-down,
//! so every emitted y is negated. Floats go through the shortest
//! round-trip formatter, which keeps the byte output a pure function of
//! the input files.

use crate::formats::Loaded;
use omega_cloud::{Cloud, ConvexPolygon};
use std::fmt::Write;

fn num(v: f64) -> String {
    // Avoid "-0" flapping for values that are exactly zero.
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

struct Bounds {
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
}

impl Bounds {
    fn new() -> Self {
        Bounds {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        }
    }

    fn add(&mut self, x: f64, y: f64) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    fn diameter(&self) -> f64 {
        let w = self.max_x - self.min_x;
        let h = self.max_y - self.min_y;
        (w * w + h * h).sqrt().max(1e-12)
    }
}

const ARC_SEGMENTS: usize = 64;

pub fn render_svg(items: &[Loaded]) -> String {
    let mut b = Bounds::new();
    for item in items {
        match item {
            Loaded::Polygon(p) => {
                for v in p.vertices() {
                    b.add(v.x, -v.y);
                }
            }
            Loaded::Cloud(c) => {
                for a in c.arcs() {
                    b.add(
                        a.circle.center.x - a.circle.radius,
                        -a.circle.center.y - a.circle.radius,
                    );
                    b.add(
                        a.circle.center.x + a.circle.radius,
                        -a.circle.center.y + a.circle.radius,
                    );
                }
            }
        }
    }
    let d = b.diameter();
    let margin = 0.05 * d;
    let vb_x = b.min_x - margin;
    let vb_y = b.min_y - margin;
    let vb_w = b.max_x - b.min_x + 2.0 * margin;
    let vb_h = b.max_y - b.min_y + 2.0 * margin;

    let hairline = d / 600.0;
    let thin = d / 300.0;
    let bold = d / 150.0;
    let dot = d / 120.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        num(vb_x),
        num(vb_y),
        num(vb_w),
        num(vb_h)
    );
    for item in items {
        match item {
            Loaded::Polygon(p) => render_polygon(&mut s, p, thin),
            Loaded::Cloud(c) => render_cloud(&mut s, c, hairline, bold, dot),
        }
    }
    s.push_str("</svg>\n");
    s
}

fn render_polygon(s: &mut String, p: &ConvexPolygon, thin: f64) {
    let mut path = String::new();
    for (i, v) in p.vertices().iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(path, "{}{} {} ", cmd, num(v.x), num(-v.y));
    }
    path.push('Z');
    let _ = writeln!(
        s,
        "<path class=\"polygon\" d=\"{}\" fill=\"#d9e2ef\" stroke=\"#2b3a55\" stroke-width=\"{}\"/>",
        path,
        num(thin)
    );
}

fn render_cloud(s: &mut String, c: &Cloud, hairline: f64, bold: f64, dot: f64) {
    for a in c.arcs() {
        let _ = writeln!(
            s,
            "<circle class=\"support\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#c3c9d4\" stroke-width=\"{}\"/>",
            num(a.circle.center.x),
            num(-a.circle.center.y),
            num(a.circle.radius),
            num(hairline)
        );
    }
    for a in c.arcs() {
        let mut pts = String::new();
        for k in 0..=ARC_SEGMENTS {
            let turn = a.measure * k as f64 / ARC_SEGMENTS as f64;
            let p = a.point_at_turn(turn);
            if k > 0 {
                pts.push(' ');
            }
            let _ = write!(pts, "{},{}", num(p.x), num(-p.y));
        }
        let _ = writeln!(
            s,
            "<polyline class=\"arc\" points=\"{}\" fill=\"none\" stroke=\"#1f4fa0\" stroke-width=\"{}\"/>",
            pts,
            num(bold)
        );
    }
    for piv in c.pivots() {
        let _ = writeln!(
            s,
            "<circle class=\"pivot\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#a8321f\"/>",
            num(piv.location.x),
            num(-piv.location.y),
            num(dot)
        );
    }
}
