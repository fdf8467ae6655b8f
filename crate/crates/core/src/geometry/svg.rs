//! Deterministic SVG 1.1 emission for Γ-spaces, embeddings, covers, and
//! wrapping-pattern tracks over the symbolic n-od C.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::graphword::{CVertex, VertexId};

use super::cover::ArcCover;
use super::embedding::PLEmbedding;
use super::gamma::GammaSpace;
use super::Point;

/// Rendering options.
#[derive(Debug, Clone)]
pub struct Style {
    pub scale: f64,
    pub stroke_width: f64,
    pub margin: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style { scale: 120.0, stroke_width: 1.2, margin: 30.0 }
    }
}

/// A drawing request: any subset of layers.
#[derive(Debug, Default)]
pub struct Scene {
    /// Γ-spaces, drawn with solid bodies and dotted tip segments.
    pub gamma_spaces: Vec<GammaSpace>,
    /// Embedded graphs.
    pub embeddings: Vec<PLEmbedding>,
    /// Covers, drawn as translucent bands over their complex.
    pub covers: Vec<ArcCover>,
    /// A track over the symbolic n-od C: the n, and the image sequence.
    pub track: Option<(u32, Vec<CVertex>)>,
    /// Labeled points.
    pub labels: Vec<(Point, String)>,
}

fn fmt_pt(p: Point, to: &Transform) -> String {
    let q = to.apply(p);
    format!("{:.3},{:.3}", q.x, q.y)
}

struct Transform {
    scale: f64,
    dx: f64,
    dy: f64,
}

impl Transform {
    fn apply(&self, p: Point) -> Point {
        // Flip y so mathematical orientation reads normally.
        Point::new(p.x * self.scale + self.dx, -p.y * self.scale + self.dy)
    }
}

fn polyline_path(pts: &[Point], to: &Transform) -> String {
    let mut d = String::new();
    for (i, p) in pts.iter().enumerate() {
        let _ = write!(d, "{}{}", if i == 0 { "M" } else { " L" }, fmt_pt(*p, to));
    }
    d
}

/// Positions of the symbolic n-od C for track rendering: branch at origin,
/// leg ℓ at angle 2π(ℓ-1)/n, unit spacing.
fn c_position(n: u32, c: CVertex) -> Point {
    match c {
        CVertex::Branch => Point::new(0.0, 0.0),
        CVertex::Leg { leg, j } => {
            let theta = std::f64::consts::TAU * (leg - 1) as f64 / n as f64;
            Point::new(theta.cos(), theta.sin()).scale(j as f64)
        }
    }
}

/// Renders a scene to a standalone SVG document.  Output is deterministic
/// for a fixed input.
pub fn render_svg(scene: &Scene, style: &Style) -> String {
    // Collect geometry to size the canvas.
    let mut pts: Vec<Point> = Vec::new();
    for g in &scene.gamma_spaces {
        for leg in &g.legs {
            pts.extend_from_slice(leg.points());
        }
    }
    for e in &scene.embeddings {
        for c in &e.edges {
            pts.extend(c.points.iter().map(|(p, _)| *p));
        }
    }
    for cov in &scene.covers {
        for leg in &cov.complex.legs {
            pts.extend_from_slice(leg.points());
        }
    }
    if let Some((n, track)) = &scene.track {
        let max_j = track.iter().map(|c| c.depth()).max().unwrap_or(1).max(1);
        for leg in 1..=*n {
            pts.push(c_position(*n, CVertex::Branch));
            pts.push(c_position(*n, CVertex::leg(leg, max_j + 1)));
        }
    }
    pts.extend(scene.labels.iter().map(|(p, _)| *p));
    if pts.is_empty() {
        pts.push(Point::new(0.0, 0.0));
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::MIN, f64::MIN);
    for p in &pts {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let to = Transform {
        scale: style.scale,
        dx: style.margin - x0 * style.scale,
        dy: style.margin + y1 * style.scale,
    };
    let width = (x1 - x0) * style.scale + 2.0 * style.margin;
    let height = (y1 - y0) * style.scale + 2.0 * style.margin;

    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );

    for g in &scene.gamma_spaces {
        for (i, leg) in g.legs.iter().enumerate() {
            // Solid body up to the tip start, dotted tip segment.
            let tip_s = leg.length() - 1.0;
            let mut body = vec![leg.first()];
            body.extend(
                leg.vertex_params()
                    .iter()
                    .zip(leg.points())
                    .filter(|(&s, _)| s > 0.0 && s < tip_s)
                    .map(|(_, p)| *p),
            );
            body.push(leg.point_at(tip_s));
            let _ = writeln!(
                out,
                "  <path d=\"{}\" fill=\"none\" stroke=\"#222222\" stroke-width=\"{}\"/>",
                polyline_path(&body, &to),
                style.stroke_width
            );
            let mut tip = vec![leg.point_at(tip_s)];
            tip.extend(
                leg.vertex_params()
                    .iter()
                    .zip(leg.points())
                    .filter(|(&s, _)| s > tip_s)
                    .map(|(_, p)| *p),
            );
            let _ = writeln!(
                out,
                "  <path d=\"{}\" fill=\"none\" stroke=\"#222222\" stroke-width=\"{}\" stroke-dasharray=\"4 3\" data-leg=\"{i}\"/>",
                polyline_path(&tip, &to),
                style.stroke_width
            );
        }
    }

    for cov in &scene.covers {
        for (idx, el) in cov.elements.iter().enumerate() {
            for (leg_idx, lo, hi) in &el.arcs {
                let leg = &cov.complex.legs[*leg_idx];
                let len = leg.length();
                let lo = super::approx(lo).max(0.0) * len;
                let hi = super::approx(hi).min(1.0) * len;
                let mut band = vec![leg.point_at(lo)];
                band.extend(
                    leg.vertex_params()
                        .iter()
                        .zip(leg.points())
                        .filter(|(&s, _)| s > lo && s < hi)
                        .map(|(_, p)| *p),
                );
                band.push(leg.point_at(hi));
                let _ = writeln!(
                    out,
                    "  <path d=\"{}\" fill=\"none\" stroke=\"hsl({},70%,55%)\" stroke-width=\"{}\" stroke-opacity=\"0.5\" data-element=\"{idx}\"/>",
                    polyline_path(&band, &to),
                    (idx * 47) % 360,
                    style.stroke_width * 4.0
                );
            }
        }
    }

    for e in &scene.embeddings {
        for c in &e.edges {
            let pts: Vec<Point> = c.points.iter().map(|(p, _)| *p).collect();
            let _ = writeln!(
                out,
                "  <path d=\"{}\" fill=\"none\" stroke=\"#b03030\" stroke-width=\"{}\"/>",
                polyline_path(&pts, &to),
                style.stroke_width * 0.8
            );
        }
        for (v, p) in &e.positions {
            let q = to.apply(*p);
            let _ = writeln!(
                out,
                "  <circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{}\" fill=\"#b03030\" data-vertex=\"{}\"/>",
                q.x,
                q.y,
                style.stroke_width * 1.6,
                v.0
            );
        }
    }

    if let Some((n, track)) = &scene.track {
        let max_j = track.iter().map(|c| c.depth()).max().unwrap_or(1).max(1);
        // The n-od C in grey.
        for leg in 1..=*n {
            let a = c_position(*n, CVertex::Branch);
            let b = c_position(*n, CVertex::leg(leg, max_j + 1));
            let _ = writeln!(
                out,
                "  <path d=\"{}\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"{}\"/>",
                polyline_path(&[a, b], &to),
                style.stroke_width
            );
        }
        // The track, offset slightly so turns at the branch stay visible.
        let offset = 0.12;
        let track_pts: Vec<Point> = track
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let p = c_position(*n, c);
                p.add(Point::new(0.0, offset * (1.0 + (k as f64) * 1e-3)))
            })
            .collect();
        let _ = writeln!(
            out,
            "  <path d=\"{}\" fill=\"none\" stroke=\"#2060c0\" stroke-width=\"{}\" marker-end=\"url(#arrow)\"/>",
            polyline_path(&track_pts, &to),
            style.stroke_width
        );
        let _ = writeln!(
            out,
            "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"8\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#2060c0\"/></marker></defs>"
        );
        for (k, p) in track_pts.iter().enumerate() {
            let q = to.apply(*p);
            let _ = writeln!(
                out,
                "  <circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{}\" fill=\"#2060c0\" data-tick=\"{k}\"/>",
                q.x,
                q.y,
                style.stroke_width
            );
        }
    }

    for (p, text) in &scene.labels {
        let q = to.apply(*p);
        let _ = writeln!(
            out,
            "  <text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\" fill=\"#333333\">{}</text>",
            q.x, q.y, escape(text)
        );
    }

    let _ = writeln!(out, "</svg>");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Convenience: a track scene from a cover restricted to a vertex sequence.
pub fn track_scene(n: u32, f: &BTreeMap<VertexId, CVertex>, pattern: &[VertexId]) -> Scene {
    let track = pattern.iter().filter_map(|v| f.get(v).copied()).collect();
    Scene { track: Some((n, track)), ..Default::default() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gamma::build_t0;

    #[test]
    fn t0_scene_has_four_legs_with_dotted_tips() {
        let scene = Scene { gamma_spaces: vec![build_t0(3)], ..Default::default() };
        let svg = render_svg(&scene, &Style::default());
        assert!(svg.starts_with("<?xml"));
        assert_eq!(svg.matches("stroke-dasharray").count(), 4);
        assert!(svg.contains("</svg>"));
    }

    #[test]
    fn empty_scene_is_valid_svg() {
        let svg = render_svg(&Scene::default(), &Style::default());
        assert!(svg.contains("<svg") && svg.contains("</svg>"));
    }

    #[test]
    fn deterministic_output() {
        let scene = Scene { gamma_spaces: vec![build_t0(2)], ..Default::default() };
        let a = render_svg(&scene, &Style::default());
        let b = render_svg(&scene, &Style::default());
        assert_eq!(a, b);
    }
}
