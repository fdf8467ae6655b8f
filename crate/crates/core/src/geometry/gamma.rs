//! Γ-spaces: planar (n+1)-ods with legs in proper circular order and
//! isometric straight tip segments carrying the marking.

use crate::graphword::Marking;
use crate::Rational;

use super::{approx, point_segment_dist, segments_intersect, Point, Polyline, GEOM_REL_TOL};

/// A Γ-space: an (n+1)-od in the plane.  `legs[i]` runs from the branch
/// point outward; the final unit of arc length of each leg is its straight
/// tip segment, so `m(b(i,t))` is the point at arc position `len - 1 + t`.
#[derive(Debug, Clone)]
pub struct GammaSpace {
    pub n: u32,
    pub branch: Point,
    pub legs: Vec<Polyline>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GammaSpaceViolation {
    WrongLegCount { got: usize, expected: usize },
    LegDoesNotStartAtBranch(usize),
    LegTooShort(usize),
    TipNotStraight(usize),
    NotInCircularOrder,
    LegsCross(usize, usize),
}

impl GammaSpace {
    pub fn new(n: u32, branch: Point, legs: Vec<Polyline>) -> Self {
        GammaSpace { n, branch, legs }
    }

    /// Realization of the marking: `m(o)` is the branch, `m(b(i,t))` sits on
    /// the tip segment of leg `i`.
    pub fn mark_point(&self, mark: &Marking) -> Point {
        match mark {
            Marking::Origin => self.branch,
            Marking::Ray { leg, t } => self.ray_point(*leg, t),
        }
    }

    pub fn ray_point(&self, leg: u32, t: &Rational) -> Point {
        let poly = &self.legs[leg as usize];
        poly.point_at(poly.length() - 1.0 + approx(t))
    }

    /// Arc position of `m(b(i,t))` along leg i.
    pub fn ray_param(&self, leg: u32, t: &Rational) -> f64 {
        self.legs[leg as usize].length() - 1.0 + approx(t)
    }

    /// Start point of the straight tip segment of a leg.
    pub fn tip_start(&self, leg: u32) -> Point {
        let poly = &self.legs[leg as usize];
        poly.point_at(poly.length() - 1.0)
    }

    pub fn tip_end(&self, leg: u32) -> Point {
        self.legs[leg as usize].last()
    }

    /// Machine check of the Γ-space axioms (PL form).
    pub fn validate(&self) -> Vec<GammaSpaceViolation> {
        let mut out = Vec::new();
        let expected = self.n as usize + 1;
        if self.legs.len() != expected {
            out.push(GammaSpaceViolation::WrongLegCount { got: self.legs.len(), expected });
            return out;
        }
        let scale = self.legs.iter().map(|l| l.length()).fold(1.0, f64::max);
        let tol = scale * GEOM_REL_TOL;
        for (i, leg) in self.legs.iter().enumerate() {
            if leg.first().dist(self.branch) > tol {
                out.push(GammaSpaceViolation::LegDoesNotStartAtBranch(i));
            }
            if leg.length() <= 1.0 + tol {
                out.push(GammaSpaceViolation::LegTooShort(i));
                continue;
            }
            // Every polyline vertex in the final unit must sit on the chord
            // from tip start to tip end.
            let tip_s = leg.length() - 1.0;
            let (a, b) = (leg.point_at(tip_s), leg.last());
            let straight = leg
                .vertex_params()
                .iter()
                .filter(|&&s| s > tip_s + tol)
                .all(|&s| point_segment_dist(leg.point_at(s), a, b) <= tol);
            if !straight {
                out.push(GammaSpaceViolation::TipNotStraight(i));
            }
        }
        if !self.circular_order_ok() {
            out.push(GammaSpaceViolation::NotInCircularOrder);
        }
        out.extend(self.leg_crossings());
        out
    }

    /// Legs must appear in the order 0..n (or its reverse) when sweeping
    /// around the branch, judged by the initial directions.
    fn circular_order_ok(&self) -> bool {
        let mut order: Vec<usize> = (0..self.legs.len()).collect();
        let angle = |i: usize| {
            let leg = &self.legs[i];
            leg.points()[1].sub(leg.points()[0]).angle()
        };
        order.sort_by(|&a, &b| angle(a).partial_cmp(&angle(b)).unwrap());
        let m = order.len();
        for shift in 0..m {
            let fwd = (0..m).all(|k| order[(shift + k) % m] == k);
            let rev = (0..m).all(|k| order[(shift + m - k) % m] == k);
            if fwd || rev {
                return true;
            }
        }
        false
    }

    fn leg_crossings(&self) -> Vec<GammaSpaceViolation> {
        let mut out = Vec::new();
        for i in 0..self.legs.len() {
            for j in i + 1..self.legs.len() {
                'pair: for (si, (a, b)) in self.legs[i].segments().enumerate() {
                    for (sj, (c, d)) in self.legs[j].segments().enumerate() {
                        if si == 0 && sj == 0 {
                            // Legs share the branch point.
                            if segments_shared_endpoint_only(a, b, c, d) {
                                continue;
                            }
                        }
                        if segments_intersect(a, b, c, d) {
                            out.push(GammaSpaceViolation::LegsCross(i, j));
                            break 'pair;
                        }
                    }
                }
            }
        }
        out
    }
}

/// True if the segments share exactly one endpoint and touch only there.
pub(super) fn segments_shared_endpoint_only(a: Point, b: Point, c: Point, d: Point) -> bool {
    let shared = if a == c {
        Some((b, d, a))
    } else if a == d {
        Some((b, c, a))
    } else if b == c {
        Some((a, d, b))
    } else if b == d {
        Some((a, c, b))
    } else {
        None
    };
    match shared {
        None => false,
        Some((p, q, s)) => {
            if super::orient(s, p, q) != 0 {
                // Non-collinear segments out of one point meet only there.
                true
            } else {
                // Collinear: they overlap iff the free ends point the same way.
                let dot = (super::big(p.x) - super::big(s.x))
                    * (super::big(q.x) - super::big(s.x))
                    + (super::big(p.y) - super::big(s.y)) * (super::big(q.y) - super::big(s.y));
                dot <= num_traits::Zero::zero()
            }
        }
    }
}

/// The reference Γ-space: branch at the origin, straight legs of length 2 to
/// the points `(2cos(iπ/n), 2sin(iπ/n))`, `i = 0..=n`.
pub fn build_t0(n: u32) -> GammaSpace {
    assert!(n >= 2);
    let o = Point::new(0.0, 0.0);
    let legs = (0..=n)
        .map(|i| {
            let theta = i as f64 * std::f64::consts::PI / n as f64;
            Polyline::new(vec![o, Point::new(2.0 * theta.cos(), 2.0 * theta.sin())])
        })
        .collect();
    GammaSpace::new(n, o, legs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    #[test]
    fn t0_landmarks() {
        let t0 = build_t0(3);
        assert_eq!(t0.branch, Point::new(0.0, 0.0));
        let e0 = t0.tip_end(0);
        assert!(e0.dist(Point::new(2.0, 0.0)) < 1e-12);
        let e3 = t0.tip_end(3);
        assert!(e3.dist(Point::new(-2.0, 0.0)) < 1e-12);
        assert!(t0.mark_point(&Marking::ray(0, ratio(0, 1))).dist(Point::new(1.0, 0.0)) < 1e-12);
        assert!(t0.mark_point(&Marking::ray(0, ratio(1, 1))).dist(Point::new(2.0, 0.0)) < 1e-12);
        assert_eq!(t0.mark_point(&Marking::Origin), t0.branch);
    }

    #[test]
    fn t0_validates() {
        for n in 2..=5 {
            let t0 = build_t0(n);
            assert!(t0.validate().is_empty(), "n={n}: {:?}", t0.validate());
        }
    }

    #[test]
    fn bad_spaces_rejected() {
        let o = Point::new(0.0, 0.0);
        // Too short for a tip segment.
        let short = GammaSpace::new(2, o, vec![
            Polyline::new(vec![o, Point::new(0.5, 0.0)]),
            Polyline::new(vec![o, Point::new(0.0, 2.0)]),
            Polyline::new(vec![o, Point::new(-2.0, 0.0)]),
        ]);
        assert!(short.validate().contains(&GammaSpaceViolation::LegTooShort(0)));

        // Bent inside the final unit.
        let bent = GammaSpace::new(2, o, vec![
            Polyline::new(vec![o, Point::new(1.5, 0.0), Point::new(1.9, 0.4)]),
            Polyline::new(vec![o, Point::new(0.0, 2.0)]),
            Polyline::new(vec![o, Point::new(-2.0, 0.0)]),
        ]);
        assert!(bent.validate().contains(&GammaSpaceViolation::TipNotStraight(0)));

        // Legs out of circular order: swap legs 1 and 2 of T0.
        let t0 = build_t0(2);
        let swapped = GammaSpace::new(2, o, vec![
            t0.legs[0].clone(),
            t0.legs[2].clone(),
            t0.legs[1].clone(),
        ]);
        assert!(swapped.validate().contains(&GammaSpaceViolation::NotInCircularOrder));

        // Crossing legs.
        let crossing = GammaSpace::new(2, o, vec![
            Polyline::new(vec![o, Point::new(2.0, 0.1)]),
            Polyline::new(vec![o, Point::new(0.1, 2.0), Point::new(2.5, 0.0)]),
            Polyline::new(vec![o, Point::new(-2.0, 0.0)]),
        ]);
        assert!(crossing
            .validate()
            .iter()
            .any(|v| matches!(v, GammaSpaceViolation::LegsCross(_, _))));
    }

    #[test]
    fn reversed_circular_order_accepted() {
        let t0 = build_t0(2);
        let rev = GammaSpace::new(
            2,
            t0.branch,
            vec![t0.legs[2].clone(), t0.legs[1].clone(), t0.legs[0].clone()],
        );
        assert!(rev.validate().is_empty());
    }
}
