//! Piecewise-linear plane geometry: Γ-spaces, embeddings with projections,
//! open covers of embedded 1-complexes with their nerves, the geometric to
//! combinatorial cover extraction, and SVG figure emission.
//!
//! Coordinates are doubles.  Combinatorial decisions (nerve adjacency, chain
//! membership, alternation counts) are made in exact rational parameter
//! space along the 1-complex; geometric inequality premises are checked with
//! a relative tolerance of 1e-9.  Crossing tests use exact orientation
//! predicates on rationals converted losslessly from the doubles.

pub mod cover;
pub mod embedding;
pub mod gamma;
pub mod layout;
pub mod svg;

pub use cover::{
    extract_comb_cover, generate_cover, nerve, ArcCover, ArcElement, CoverGenError, ExtractError,
    ExtractionOutcome, PLComplex,
};
pub use embedding::{
    compose_embeddings, expand_via_geometry, image_complex, image_gamma_space,
    validate_embedding, EdgeCurve, EmbeddingViolation, GeometricExpansion, ImageComplex,
    PLEmbedding,
};
pub use gamma::{build_t0, GammaSpace, GammaSpaceViolation};
pub use layout::{layout_embedding, LayoutError};
pub use svg::{render_svg, Scene, Style};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::Rational;

/// Relative tolerance for geometric inequality checks.
pub const GEOM_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn unit(self) -> Point {
        let n = self.norm();
        Point::new(self.x / n, self.y / n)
    }

    /// Left normal (counterclockwise quarter turn).
    pub fn left_normal(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

fn big(x: f64) -> Rational {
    Rational::from_float(x).expect("finite coordinate")
}

/// Exact orientation sign of the triple (a, b, c): positive for a left turn.
///
/// A float filter answers the easy cases; near-degenerate ones fall back to
/// exact rational arithmetic.
pub fn orient(a: Point, b: Point, c: Point) -> i8 {
    let l = (b.x - a.x) * (c.y - a.y);
    let r = (b.y - a.y) * (c.x - a.x);
    let det = l - r;
    let bound = 3.331e-16 * (l.abs() + r.abs());
    if det > bound {
        return 1;
    }
    if det < -bound {
        return -1;
    }
    let v = (big(b.x) - big(a.x)) * (big(c.y) - big(a.y))
        - (big(b.y) - big(a.y)) * (big(c.x) - big(a.x));
    if v > Rational::zero() {
        1
    } else if v < Rational::zero() {
        -1
    } else {
        0
    }
}

fn between_exact(a: Point, b: Point, p: Point) -> bool {
    // Collinearity assumed; is p within the closed segment [a,b]?
    let (ax, ay, bx, by, px, py) = (big(a.x), big(a.y), big(b.x), big(b.y), big(p.x), big(p.y));
    let dot = (&px - &ax) * (&bx - &ax) + (&py - &ay) * (&by - &ay);
    let len2 = (&bx - &ax) * (&bx - &ax) + (&by - &ay) * (&by - &ay);
    dot >= Rational::zero() && dot <= len2
}

/// Exact closed-segment intersection test.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != o2 && o3 != o4 {
        return true;
    }
    (o1 == 0 && between_exact(a, b, c))
        || (o2 == 0 && between_exact(a, b, d))
        || (o3 == 0 && between_exact(c, d, a))
        || (o4 == 0 && between_exact(c, d, b))
}

/// Distance from a point to a closed segment.
pub fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2;
    p.dist(a.lerp(b, t.clamp(0.0, 1.0)))
}

/// Distance between two closed segments.
pub fn segment_segment_dist(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_dist(a, c, d)
        .min(point_segment_dist(b, c, d))
        .min(point_segment_dist(c, a, b))
        .min(point_segment_dist(d, a, b))
}

/// An open polyline with precomputed cumulative arc lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pts: Vec<Point>,
    cum: Vec<f64>,
}

impl Polyline {
    pub fn new(pts: Vec<Point>) -> Self {
        assert!(pts.len() >= 2, "polyline needs at least two points");
        let mut cum = Vec::with_capacity(pts.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in pts.windows(2) {
            acc += w[0].dist(w[1]);
            cum.push(acc);
        }
        Polyline { pts, cum }
    }

    pub fn points(&self) -> &[Point] {
        &self.pts
    }

    pub fn length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn first(&self) -> Point {
        self.pts[0]
    }

    pub fn last(&self) -> Point {
        *self.pts.last().unwrap()
    }

    /// Cumulative arc positions of the boundary and interior vertices.
    pub fn vertex_params(&self) -> &[f64] {
        &self.cum
    }

    /// Point at arc-length position `s`, clamped to the ends.
    pub fn point_at(&self, s: f64) -> Point {
        if s <= 0.0 {
            return self.first();
        }
        if s >= self.length() {
            return self.last();
        }
        let k = match self.cum.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(k) => return self.pts[k],
            Err(k) => k - 1,
        };
        let seg = self.cum[k + 1] - self.cum[k];
        self.pts[k].lerp(self.pts[k + 1], (s - self.cum[k]) / seg)
    }

    /// Unit tangent of the segment containing arc position `s` (the earlier
    /// segment at vertices).
    pub fn direction_at(&self, s: f64) -> Point {
        let mut k = match self.cum.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(k) => k,
            Err(k) => k.saturating_sub(1),
        };
        if k >= self.pts.len() - 1 {
            k = self.pts.len() - 2;
        }
        self.pts[k + 1].sub(self.pts[k]).unit()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.pts.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn reversed(&self) -> Polyline {
        let mut pts = self.pts.clone();
        pts.reverse();
        Polyline::new(pts)
    }

    pub fn min_segment_length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).fold(f64::INFINITY, f64::min)
    }
}

/// Lossless f64 -> rational conversion for the exact parameter space.
pub fn exact(x: f64) -> Rational {
    Rational::from_float(x).expect("finite parameter")
}

/// Rational -> f64 (rounded), for geometry realization only.
pub fn approx(r: &Rational) -> f64 {
    big_to_f64(r.numer()) / big_to_f64(r.denom())
}

fn big_to_f64(b: &BigInt) -> f64 {
    b.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_and_intersection() {
        let o = Point::new(0.0, 0.0);
        let e1 = Point::new(1.0, 0.0);
        let e2 = Point::new(0.0, 1.0);
        assert_eq!(orient(o, e1, e2), 1);
        assert_eq!(orient(o, e2, e1), -1);
        assert_eq!(orient(o, e1, Point::new(2.0, 0.0)), 0);
        assert!(segments_intersect(o, Point::new(1.0, 1.0), e1, e2));
        assert!(!segments_intersect(o, e1, e2, Point::new(1.0, 1.0)));
        // Shared endpoint counts as intersection.
        assert!(segments_intersect(o, e1, e1, Point::new(2.0, 5.0)));
    }

    #[test]
    fn polyline_params() {
        let p = Polyline::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 2.0),
        ]);
        assert_eq!(p.length(), 3.0);
        assert_eq!(p.point_at(0.5), Point::new(0.5, 0.0));
        assert_eq!(p.point_at(2.0), Point::new(1.0, 1.0));
        assert_eq!(p.direction_at(2.5), Point::new(0.0, 1.0));
    }

    #[test]
    fn exact_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0, -0.25] {
            assert_eq!(approx(&exact(x)), x);
        }
    }
}
