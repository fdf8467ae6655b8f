//! Open covers of an embedded 1-complex by unions of sub-arcs, their nerves,
//! and the extraction of a combinatorial cover from a geometric one.
//!
//! Cover elements carry exact rational interval endpoints in the normalized
//! parameter space of each complex leg, so membership, overlap, and chain
//! decisions are exact; only diameters and neighborhood premises are
//! measured in floats.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::combcover::{check_cover, CoverViolation};
use crate::graphword::{CVertex, Graph, PlacedGraph, VertexId};
use crate::Rational;

use super::embedding::{ImageComplex, PLEmbedding};
use super::gamma::GammaSpace;
use super::{approx, exact, point_segment_dist, Point, Polyline, GEOM_REL_TOL};

/// A PL tree with a base point and legs running outward: the carrier of an
/// arc cover.  A Γ-space and the image of an embedded spider both reduce to
/// this shape.
#[derive(Debug, Clone)]
pub struct PLComplex {
    pub base_point: Point,
    pub legs: Vec<Polyline>,
}

impl PLComplex {
    pub fn from_gamma(g: &GammaSpace) -> Self {
        PLComplex { base_point: g.branch, legs: g.legs.clone() }
    }

    /// Point at a normalized exact parameter.
    pub fn point_at(&self, leg: usize, pos: &Rational) -> Point {
        let poly = &self.legs[leg];
        poly.point_at(approx(pos) * poly.length())
    }
}

/// One cover element: a finite union of open sub-arcs, each an open interval
/// `(lo, hi)` in a leg's normalized parameter space.  `lo < 0` makes the
/// element contain the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcElement {
    pub arcs: Vec<(usize, Rational, Rational)>,
}

impl ArcElement {
    pub fn contains_base(&self) -> bool {
        self.arcs.iter().any(|(_, lo, _)| lo < &Rational::zero())
    }

    pub fn contains(&self, leg: usize, pos: &Rational) -> bool {
        self.arcs.iter().any(|(l, lo, hi)| *l == leg && lo < pos && pos < hi)
    }

    fn overlaps(&self, other: &ArcElement) -> bool {
        if self.contains_base() && other.contains_base() {
            return true;
        }
        for (l1, lo1, hi1) in &self.arcs {
            for (l2, lo2, hi2) in &other.arcs {
                if l1 == l2 && lo1.max(lo2) < hi1.min(hi2) {
                    return true;
                }
            }
        }
        false
    }

    /// Realized polyline pieces of the element within the complex.
    fn pieces(&self, complex: &PLComplex) -> Vec<Vec<Point>> {
        let zero = Rational::zero();
        let one = Rational::one();
        self.arcs
            .iter()
            .map(|(leg, lo, hi)| {
                let poly = &complex.legs[*leg];
                let len = poly.length();
                let lo = approx(lo.max(&zero)) * len;
                let hi = approx(hi.min(&one)) * len;
                let mut pts = vec![poly.point_at(lo)];
                for &s in poly.vertex_params() {
                    if s > lo && s < hi {
                        pts.push(poly.point_at(s));
                    }
                }
                pts.push(poly.point_at(hi));
                pts
            })
            .collect()
    }

    /// Geometric diameter of the realized element.  Attained at piece
    /// breakpoints since distance is convex on segment pairs.
    pub fn diameter(&self, complex: &PLComplex) -> f64 {
        let pts: Vec<Point> = self.pieces(complex).into_iter().flatten().collect();
        let mut best = 0.0f64;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                best = best.max(a.dist(*b));
            }
        }
        best
    }

    /// Minimum distance from the element to a segment.
    pub fn dist_to_segment(&self, complex: &PLComplex, a: Point, b: Point) -> f64 {
        let mut best = f64::INFINITY;
        for piece in self.pieces(complex) {
            for w in piece.windows(2) {
                best = best.min(super::segment_segment_dist(w[0], w[1], a, b));
            }
            if piece.len() == 1 {
                best = best.min(point_segment_dist(piece[0], a, b));
            }
        }
        best
    }
}

/// An open cover of a PL complex with a designated branch element and the
/// nerve addressing `U(ℓ,j)` (element indices per nerve leg, outward).
#[derive(Debug, Clone)]
pub struct ArcCover {
    pub complex: PLComplex,
    pub elements: Vec<ArcElement>,
    pub branch_element: usize,
    pub nerve_legs: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum CoverGenError {
    #[error("mesh must be positive and above the resolution floor")]
    MeshTooSmall,
    #[error("cover axioms violated: {0}")]
    Invalid(String),
    #[error("nerve is not an n-od/arc: {0}")]
    BadNerve(String),
}

/// Nerve of a cover: one graph vertex per element, adjacent iff the
/// elements intersect.
pub fn nerve(elements: &[ArcElement]) -> Graph {
    let mut g = Graph::new();
    for i in 0..elements.len() {
        g.add_vertex(VertexId(i as u32));
        for j in 0..i {
            if elements[i].overlaps(&elements[j]) {
                g.add_edge(VertexId(i as u32), VertexId(j as u32)).unwrap();
            }
        }
    }
    g
}

impl ArcCover {
    /// Assembles and validates a cover: elements must cover the complex, no
    /// three may share a point, and the nerve must be a tree addressable as
    /// legs from the branch element.
    pub fn new(
        complex: PLComplex,
        elements: Vec<ArcElement>,
        branch_element: usize,
    ) -> Result<Self, CoverGenError> {
        validate_elements(&complex, &elements)?;
        let nerve_graph = nerve(&elements);
        let nerve_legs = address_nerve(&nerve_graph, branch_element, elements.len())?;
        Ok(ArcCover { complex, elements, branch_element, nerve_legs })
    }

    pub fn mesh(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| e.diameter(&self.complex))
            .fold(0.0, f64::max)
    }

    /// Nerve address of an element: (leg 1.., index 1..), or (any, 0) for
    /// the branch element.
    pub fn address_of(&self, element: usize) -> Option<(usize, usize)> {
        if element == self.branch_element {
            return Some((1, 0));
        }
        for (l, leg) in self.nerve_legs.iter().enumerate() {
            if let Some(j) = leg.iter().position(|&e| e == element) {
                return Some((l + 1, j + 1));
            }
        }
        None
    }

    /// Elements containing the given normalized position.
    pub fn elements_at(&self, leg: usize, pos: &Rational) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.contains(leg, pos) || (pos.is_zero() && e.contains_base()))
            .map(|(i, _)| i)
            .collect()
    }

    /// The unique nerve path between two elements.
    pub fn chain(&self, from: usize, to: usize) -> Vec<usize> {
        let g = nerve(&self.elements);
        let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = BTreeSet::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for w in g.neighbors(VertexId(x as u32)) {
                let w = w.0 as usize;
                if seen.insert(w) {
                    prev.insert(w, x);
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[&cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

fn validate_elements(complex: &PLComplex, elements: &[ArcElement]) -> Result<(), CoverGenError> {
    let one = Rational::one();
    let zero = Rational::zero();
    // Coverage per leg: merged open intervals must cover [0,1]; open covers
    // must genuinely overlap, so merging requires strict interleaving.
    for (leg, _) in complex.legs.iter().enumerate() {
        let mut ivs: Vec<(Rational, Rational)> = elements
            .iter()
            .flat_map(|e| e.arcs.iter())
            .filter(|(l, _, _)| *l == leg)
            .map(|(_, lo, hi)| (lo.clone(), hi.clone()))
            .collect();
        ivs.sort();
        let mut reach: Option<Rational> = None;
        for (lo, hi) in ivs {
            match &reach {
                None => {
                    if lo >= zero {
                        return Err(CoverGenError::Invalid(format!(
                            "leg {leg} uncovered near the base"
                        )));
                    }
                    reach = Some(hi);
                }
                Some(r) => {
                    if &lo >= r {
                        return Err(CoverGenError::Invalid(format!(
                            "leg {leg} uncovered at {r}"
                        )));
                    }
                    if &hi > r {
                        reach = Some(hi);
                    }
                }
            }
        }
        if reach.map_or(true, |r| r < one) {
            return Err(CoverGenError::Invalid(format!("leg {leg} tip uncovered")));
        }
    }
    // No three distinct elements share a point.
    let base_hits = elements.iter().filter(|e| e.contains_base()).count();
    if base_hits >= 3 {
        return Err(CoverGenError::Invalid("three elements contain the base".into()));
    }
    for a in 0..elements.len() {
        for b in a + 1..elements.len() {
            for c in b + 1..elements.len() {
                for (l1, lo1, hi1) in &elements[a].arcs {
                    for (l2, lo2, hi2) in &elements[b].arcs {
                        for (l3, lo3, hi3) in &elements[c].arcs {
                            if l1 == l2
                                && l2 == l3
                                && lo1.max(lo2).max(lo3) < hi1.min(hi2).min(hi3)
                            {
                                return Err(CoverGenError::Invalid(format!(
                                    "elements {a},{b},{c} share a point on leg {l1}"
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Addresses the nerve as legs outward from the branch element; the nerve
/// must be a tree whose branch-removed components are paths starting next to
/// the branch.
fn address_nerve(
    nerve: &Graph,
    branch: usize,
    count: usize,
) -> Result<Vec<Vec<usize>>, CoverGenError> {
    if branch >= count {
        return Err(CoverGenError::BadNerve("branch element out of range".into()));
    }
    if !nerve.is_connected() {
        return Err(CoverGenError::BadNerve("nerve disconnected".into()));
    }
    if nerve.edge_count() + 1 != nerve.vertex_count() {
        return Err(CoverGenError::BadNerve("nerve has a cycle".into()));
    }
    let b = VertexId(branch as u32);
    let mut legs = Vec::new();
    for first in nerve.neighbors(b) {
        let mut leg = vec![first.0 as usize];
        let (mut prev, mut cur) = (b, first);
        loop {
            let next: Vec<VertexId> = nerve.neighbors(cur).filter(|&w| w != prev).collect();
            match next.len() {
                0 => break,
                1 => {
                    prev = cur;
                    cur = next[0];
                    leg.push(cur.0 as usize);
                }
                _ => {
                    return Err(CoverGenError::BadNerve(format!(
                        "branching at element {cur} away from the branch element"
                    )))
                }
            }
        }
        legs.push(leg);
    }
    legs.sort_by_key(|l| l.first().copied());
    Ok(legs)
}

/// Chain cover of a complex with mesh below the bound: one branch element
/// around the base plus overlapping arc elements outward along each leg.
/// The nerve is an m-od for an m-legged complex (a chain for paths).
pub fn generate_cover(complex: &PLComplex, mesh: f64) -> Result<ArcCover, CoverGenError> {
    if mesh <= 0.0 {
        return Err(CoverGenError::MeshTooSmall);
    }
    let h = mesh / 3.0;
    let mut elements = Vec::new();
    let mut branch_arcs = Vec::new();
    let eps = exact(-1.0) / exact(1000.0);
    let mut total = 0usize;
    for (leg_idx, leg) in complex.legs.iter().enumerate() {
        let steps = (leg.length() / h).ceil() as usize;
        total += steps;
        if total > 100_000 {
            return Err(CoverGenError::MeshTooSmall);
        }
        let step = exact(1.0) / exact(steps as f64);
        let overlap = step.clone() / exact(4.0);
        branch_arcs.push((leg_idx, eps.clone(), step.clone() + overlap.clone()));
        for k in 1..steps {
            let lo = step.clone() * exact(k as f64) - overlap.clone();
            let hi = step.clone() * exact((k + 1) as f64) + overlap.clone();
            elements.push(ArcElement { arcs: vec![(leg_idx, lo, hi.min(exact(1.0)))] });
        }
    }
    elements.insert(0, ArcElement { arcs: branch_arcs });
    let cover = ArcCover::new(complex.clone(), elements, 0)?;
    let got = cover.mesh();
    if got >= mesh {
        return Err(CoverGenError::Invalid(format!(
            "generated mesh {got} exceeds requested {mesh}"
        )));
    }
    Ok(cover)
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("premise violated: {0}")]
    PremiseViolated(String),
    #[error("vertex {0} not covered by any element")]
    VertexNotCovered(VertexId),
}

/// Result of a geometric-to-combinatorial extraction.  `violations` is the
/// axiom check of the produced `f`; when the premises hold it must be empty.
#[derive(Debug)]
pub struct ExtractionOutcome {
    pub f: BTreeMap<VertexId, CVertex>,
    pub violations: Vec<CoverViolation>,
    pub notes: Vec<String>,
}

/// Extracts a candidate δ-combinatorial n-od cover from an n-od cover of an
/// embedded placed graph.
///
/// The label `g` on vertex-carrying elements comes from witness marks; the
/// branch element, if it carries no vertex, is labeled by the smallest leg
/// index whose tip-segment 2δ-neighborhood it meets (logged if several), or
/// `o`.  `f(z) = C(ℓ_z, A_z)` counts label alternations along the nerve
/// chain from the branch element.
///
/// With `enforce_premises`, the 4δ tip clearance of the target and the mesh
/// bound `2ε₁ + mesh ≤ δ` are required; without it the extraction runs
/// regardless and the caller inspects `violations`.
pub fn extract_comb_cover(
    pg: &PlacedGraph,
    emb: &PLEmbedding,
    target: &GammaSpace,
    image: &ImageComplex,
    cover: &ArcCover,
    delta: &Rational,
    enforce_premises: bool,
) -> Result<ExtractionOutcome, ExtractError> {
    let delta_f = approx(delta);
    let mut notes = Vec::new();
    if enforce_premises {
        let clearance = target_tip_clearance(target);
        if clearance <= 4.0 * delta_f * (1.0 + GEOM_REL_TOL) {
            return Err(ExtractError::PremiseViolated(format!(
                "tip clearance {clearance} is not above 4δ = {}",
                4.0 * delta_f
            )));
        }
        let mesh = cover.mesh();
        if 2.0 * emb.epsilon + mesh > delta_f * (1.0 + GEOM_REL_TOL) {
            return Err(ExtractError::PremiseViolated(format!(
                "2ε₁ + mesh = {} exceeds δ = {delta_f}",
                2.0 * emb.epsilon + mesh
            )));
        }
    }

    // U^V and the label g on it.
    let mut labels: BTreeMap<usize, Option<u32>> = BTreeMap::new();
    let mut vertex_element: BTreeMap<VertexId, usize> = BTreeMap::new();
    for v in pg.graph.vertices() {
        let (leg, pos) = &image.vertex_params[&v];
        let hits = cover.elements_at(*leg, pos);
        let Some(&w) = hits.first() else {
            return Err(ExtractError::VertexNotCovered(v));
        };
        vertex_element.insert(v, w);
        let class = pg.mark(v).ray_leg();
        for &h in &hits {
            match labels.get(&h) {
                Some(existing) if *existing != class => {
                    let msg = format!("element {h} carries two mark classes");
                    if enforce_premises {
                        return Err(ExtractError::PremiseViolated(msg));
                    }
                    notes.push(msg);
                }
                _ => {
                    labels.insert(h, class);
                }
            }
        }
    }

    // Extend g to the branch element via the 2δ tip neighborhoods.
    if !labels.contains_key(&cover.branch_element) {
        let be = &cover.elements[cover.branch_element];
        let mut hit: Vec<u32> = Vec::new();
        for i in 0..=target.n {
            let a = target.tip_start(i);
            let b = target.tip_end(i);
            if be.dist_to_segment(&cover.complex, a, b) < 2.0 * delta_f {
                hit.push(i);
            }
        }
        if hit.len() > 1 {
            notes.push(format!(
                "branch element meets {} tip neighborhoods; using the smallest",
                hit.len()
            ));
        }
        labels.insert(cover.branch_element, hit.first().copied());
    }

    // f via alternation counts along nerve chains.
    let mut f = BTreeMap::new();
    for v in pg.graph.vertices() {
        let w = vertex_element[&v];
        let chain = cover.chain(cover.branch_element, w);
        let mut alternations = 0u32;
        let mut last: Option<Option<u32>> = None;
        for &e in &chain {
            let Some(label) = labels.get(&e) else { continue };
            if let Some(prev) = &last {
                if prev != label {
                    alternations += 1;
                }
            }
            last = Some(*label);
        }
        let (leg, _) = cover.address_of(w).expect("addressed element");
        let c = if alternations == 0 {
            CVertex::Branch
        } else {
            CVertex::Leg { leg: leg as u32, j: alternations }
        };
        f.insert(v, c);
    }

    let violations = check_cover(pg, &f, delta);
    Ok(ExtractionOutcome { f, violations, notes })
}

/// Minimal distance between a tip segment and any other leg of the target.
pub fn target_tip_clearance(target: &GammaSpace) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..target.legs.len() {
        let a = target.tip_start(i as u32);
        let b = target.tip_end(i as u32);
        for (j, leg) in target.legs.iter().enumerate() {
            if i == j {
                continue;
            }
            for (c, d) in leg.segments() {
                best = best.min(super::segment_segment_dist(a, b, c, d));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gamma::build_t0;
    use crate::graphword::as_nod;
    use crate::ratio;

    fn path_complex() -> PLComplex {
        PLComplex {
            base_point: Point::new(0.0, 0.0),
            legs: vec![Polyline::new(vec![Point::new(0.0, 0.0), Point::new(4.0, 0.0)])],
        }
    }

    #[test]
    fn four_element_chain_has_path_nerve() {
        let complex = path_complex();
        let q = |a: i64, b: i64| ratio(a, b);
        let elements = vec![
            ArcElement { arcs: vec![(0, q(-1, 100), q(3, 10))] },
            ArcElement { arcs: vec![(0, q(1, 4), q(11, 20))] },
            ArcElement { arcs: vec![(0, q(1, 2), q(4, 5))] },
            ArcElement { arcs: vec![(0, q(3, 4), q(1, 1))] },
        ];
        let cover = ArcCover::new(complex, elements, 0).unwrap();
        let g = nerve(&cover.elements);
        assert_eq!(g.edge_count(), 3);
        let map = as_nod(&g).unwrap();
        assert!(map.is_arc);
        assert_eq!(cover.nerve_legs.len(), 1);
        assert_eq!(cover.nerve_legs[0], vec![1, 2, 3]);
    }

    #[test]
    fn triple_intersections_rejected() {
        let complex = path_complex();
        let q = |a: i64, b: i64| ratio(a, b);
        let elements = vec![
            ArcElement { arcs: vec![(0, q(-1, 100), q(6, 10))] },
            ArcElement { arcs: vec![(0, q(1, 4), q(8, 10))] },
            ArcElement { arcs: vec![(0, q(1, 2), q(1, 1))] },
        ];
        assert!(matches!(
            ArcCover::new(complex, elements, 0),
            Err(CoverGenError::Invalid(_))
        ));
    }

    #[test]
    fn coverage_gaps_rejected() {
        let complex = path_complex();
        let q = |a: i64, b: i64| ratio(a, b);
        let elements = vec![
            ArcElement { arcs: vec![(0, q(-1, 100), q(3, 10))] },
            // Touching at 3/10 is not overlapping: open sets miss the point.
            ArcElement { arcs: vec![(0, q(3, 10), q(1, 1))] },
        ];
        assert!(matches!(
            ArcCover::new(complex, elements, 0),
            Err(CoverGenError::Invalid(_))
        ));
    }

    #[test]
    fn generated_cover_of_t0_is_a_4od() {
        let t0 = build_t0(3);
        let complex = PLComplex::from_gamma(&t0);
        let cover = generate_cover(&complex, 0.5).unwrap();
        assert!(cover.mesh() < 0.5);
        let g = nerve(&cover.elements);
        let map = as_nod(&g).unwrap();
        assert!(!map.is_arc);
        assert_eq!(map.legs.len(), 4);
        assert_eq!(map.branch, VertexId(0));
    }

    #[test]
    fn generated_cover_of_path_is_a_chain() {
        let cover = generate_cover(&path_complex(), 0.7).unwrap();
        let g = nerve(&cover.elements);
        let map = as_nod(&g).unwrap();
        assert!(map.is_arc);
        assert_eq!(cover.nerve_legs.len(), 1);
    }

    #[test]
    fn mesh_floor_enforced() {
        assert!(matches!(
            generate_cover(&path_complex(), 0.0),
            Err(CoverGenError::MeshTooSmall)
        ));
        assert!(matches!(
            generate_cover(&path_complex(), 1e-7),
            Err(CoverGenError::MeshTooSmall)
        ));
    }

    #[test]
    fn tip_clearance_of_t0() {
        // Adjacent tip segments of T0 (n=2) sit 1 apart from the other legs.
        let c = target_tip_clearance(&build_t0(2));
        assert!((c - 1.0).abs() < 1e-9, "{c}");
    }
}
