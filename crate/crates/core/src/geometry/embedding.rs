//! Plane embeddings of placed graphs with explicit projections onto a
//! Γ-space, their machine validation, the image viewed as a Γ-space or as a
//! bare 1-complex, and composition of two embedding levels.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expansion::{chi_expand, Expansion, ExpansionError, ExpansionWord};
use crate::graphword::{Marking, PlacedGraph, VertexId};
use crate::Rational;

use super::cover::PLComplex;
use super::gamma::{segments_shared_endpoint_only, GammaSpace};
use super::{exact, segments_intersect, Point, Polyline, GEOM_REL_TOL};

/// The embedded curve of one edge `{u,v}` (`u` the origin-marked endpoint),
/// as polyline breakpoints paired with strictly increasing arc parameters on
/// the target leg.  Parameters run from 0 (the branch) to the parameter of
/// the ray endpoint's mark.
#[derive(Debug, Clone)]
pub struct EdgeCurve {
    pub u: VertexId,
    pub v: VertexId,
    pub leg: u32,
    pub points: Vec<(Point, f64)>,
}

impl EdgeCurve {
    pub fn polyline(&self) -> Polyline {
        Polyline::new(self.points.iter().map(|(p, _)| *p).collect())
    }

    pub fn last_param(&self) -> f64 {
        self.points.last().unwrap().1
    }

    /// Source point at target parameter `s` (piecewise-linear inverse of π).
    pub fn point_at_param(&self, s: f64) -> Point {
        let pts = &self.points;
        if s <= pts[0].1 {
            return pts[0].0;
        }
        for w in pts.windows(2) {
            let ((p0, s0), (p1, s1)) = (w[0], w[1]);
            if s <= s1 {
                let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 1.0 };
                return p0.lerp(p1, t);
            }
        }
        pts.last().unwrap().0
    }
}

/// An ⟨ω,T,ε⟩-embedding: vertex positions plus per-edge curves with their
/// projection data.
#[derive(Debug, Clone)]
pub struct PLEmbedding {
    pub epsilon: f64,
    pub positions: BTreeMap<VertexId, Point>,
    pub edges: Vec<EdgeCurve>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EmbeddingViolation {
    MissingVertex(VertexId),
    MissingEdge(VertexId, VertexId),
    WrongLeg { u: VertexId, v: VertexId },
    EndpointMismatch { u: VertexId, v: VertexId },
    NotMonotone { u: VertexId, v: VertexId },
    VertexProjection { v: VertexId, err: f64 },
    TooFar { u: VertexId, v: VertexId, dist: f64 },
    Crossing { e1: usize, e2: usize },
}

/// Checks every ⟨ω,T,ε⟩-embedding invariant: per-edge monotone projection
/// onto the right arc, vertex marks projected exactly, sup-distance below ε,
/// and pairwise non-crossing curves.
///
/// Distances are compared at curve breakpoints densified with the target's
/// own vertex parameters; between consecutive samples both the curve and its
/// projection are affine in a common parameter, so the distance is convex
/// and the samples bound it.
pub fn validate_embedding(
    pg: &PlacedGraph,
    emb: &PLEmbedding,
    target: &GammaSpace,
) -> Vec<EmbeddingViolation> {
    let mut out = Vec::new();
    let scale = target.legs.iter().map(|l| l.length()).fold(1.0, f64::max);
    let tol = scale * GEOM_REL_TOL;

    for v in pg.graph.vertices() {
        if !emb.positions.contains_key(&v) {
            out.push(EmbeddingViolation::MissingVertex(v));
        }
    }
    if !out.is_empty() {
        return out;
    }

    // Every graph edge must have exactly one curve, origin endpoint first.
    let mut curve_index: BTreeMap<(VertexId, VertexId), &EdgeCurve> = BTreeMap::new();
    for c in &emb.edges {
        curve_index.insert((c.u, c.v), c);
    }
    for (a, b) in pg.graph.edges() {
        let (u, v) = if pg.mark(a).is_origin() { (a, b) } else { (b, a) };
        let Some(curve) = curve_index.get(&(u, v)) else {
            out.push(EmbeddingViolation::MissingEdge(u, v));
            continue;
        };
        let Marking::Ray { leg, t } = pg.mark(v) else { continue };
        if curve.leg != *leg {
            out.push(EmbeddingViolation::WrongLeg { u, v });
            continue;
        }
        let pts = &curve.points;
        // Endpoints: positions and exact projection of the marks.
        if pts[0].0 != emb.positions[&u] || pts.last().unwrap().0 != emb.positions[&v] {
            out.push(EmbeddingViolation::EndpointMismatch { u, v });
        }
        if pts[0].1.abs() > tol {
            out.push(EmbeddingViolation::VertexProjection { v: u, err: pts[0].1.abs() });
        }
        let want_end = target.ray_param(*leg, t);
        let got_end = curve.last_param();
        if (got_end - want_end).abs() > tol {
            out.push(EmbeddingViolation::VertexProjection { v, err: (got_end - want_end).abs() });
        }
        if !pts.windows(2).all(|w| w[0].1 < w[1].1) {
            out.push(EmbeddingViolation::NotMonotone { u, v });
            continue;
        }
        // Sup-distance at densified parameters.
        let leg_poly = &target.legs[*leg as usize];
        let mut params: Vec<f64> = pts.iter().map(|(_, s)| *s).collect();
        params.extend(
            leg_poly
                .vertex_params()
                .iter()
                .copied()
                .filter(|s| *s > pts[0].1 && *s < got_end),
        );
        params.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for s in params {
            let src = curve.point_at_param(s);
            let dst = leg_poly.point_at(s);
            let d = src.dist(dst);
            if d >= emb.epsilon - tol {
                out.push(EmbeddingViolation::TooFar { u, v, dist: d });
                break;
            }
        }
    }

    out.extend(crossing_violations(emb));
    out
}

fn crossing_violations(emb: &PLEmbedding) -> Vec<EmbeddingViolation> {
    let mut out = Vec::new();
    let polys: Vec<Vec<Point>> =
        emb.edges.iter().map(|c| c.points.iter().map(|(p, _)| *p).collect()).collect();
    let bboxes: Vec<(f64, f64, f64, f64)> = polys
        .iter()
        .map(|pts| {
            let (mut x0, mut y0, mut x1, mut y1) =
                (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
            for p in pts {
                x0 = x0.min(p.x);
                y0 = y0.min(p.y);
                x1 = x1.max(p.x);
                y1 = y1.max(p.y);
            }
            (x0, y0, x1, y1)
        })
        .collect();
    for i in 0..polys.len() {
        'pair: for j in i..polys.len() {
            if i != j {
                let (a, b) = (bboxes[i], bboxes[j]);
                if a.2 < b.0 || b.2 < a.0 || a.3 < b.1 || b.3 < a.1 {
                    continue;
                }
            }
            for (si, wa) in polys[i].windows(2).enumerate() {
                let sj_start = if i == j { si + 1 } else { 0 };
                for (sj, wb) in polys[j].windows(2).enumerate().skip(sj_start) {
                    let (a, b, c, d) = (wa[0], wa[1], wb[0], wb[1]);
                    if i == j && sj == si + 1 {
                        // Consecutive segments share one breakpoint.
                        if !segments_shared_endpoint_only(a, b, c, d) {
                            out.push(EmbeddingViolation::Crossing { e1: i, e2: j });
                            continue 'pair;
                        }
                        continue;
                    }
                    if segments_intersect(a, b, c, d) {
                        // Distinct curves may touch at a shared graph vertex.
                        if i != j && segments_shared_endpoint_only(a, b, c, d) {
                            let shared = if a == c || a == d { a } else { b };
                            let is_vertex = (shared == polys[i][0]
                                || shared == *polys[i].last().unwrap())
                                && (shared == polys[j][0] || shared == *polys[j].last().unwrap());
                            if is_vertex {
                                continue;
                            }
                        }
                        out.push(EmbeddingViolation::Crossing { e1: i, e2: j });
                        continue 'pair;
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("the graph is not a spider rooted at {0}: branching away from the root")]
    NotASpider(VertexId),
    #[error("missing curve for edge {0},{1}")]
    MissingCurve(VertexId, VertexId),
}

/// The image of an embedding, viewed as a bare 1-complex with legs running
/// from the base vertex outward, plus exact per-vertex arc positions
/// (normalized to [0,1] per leg).
#[derive(Debug, Clone)]
pub struct ImageComplex {
    pub complex: PLComplex,
    pub base: VertexId,
    /// vertex -> (leg index, normalized exact arc position).
    pub vertex_params: BTreeMap<VertexId, (usize, Rational)>,
}

/// Maximal simple paths from `base`; the tree must not branch away from it.
fn spider_arms(pg: &PlacedGraph, base: VertexId) -> Result<Vec<Vec<VertexId>>, ImageError> {
    let mut arms = Vec::new();
    for first in pg.graph.neighbors(base) {
        let mut arm = vec![base, first];
        let (mut prev, mut cur) = (base, first);
        loop {
            let next: Vec<VertexId> = pg.graph.neighbors(cur).filter(|&w| w != prev).collect();
            match next.len() {
                0 => break,
                1 => {
                    prev = cur;
                    cur = next[0];
                    arm.push(cur);
                }
                _ => return Err(ImageError::NotASpider(base)),
            }
        }
        arms.push(arm);
    }
    Ok(arms)
}

fn curve_for<'e>(
    emb: &'e PLEmbedding,
    pg: &PlacedGraph,
    a: VertexId,
    b: VertexId,
) -> Result<(&'e EdgeCurve, bool), ImageError> {
    let (u, v) = if pg.mark(a).is_origin() { (a, b) } else { (b, a) };
    let curve = emb
        .edges
        .iter()
        .find(|c| c.u == u && c.v == v)
        .ok_or(ImageError::MissingCurve(a, b))?;
    // Forward means traversal a -> b follows the stored u -> v order.
    Ok((curve, a == u))
}

/// Builds the image complex of an embedded spider, legs ordered by the arm
/// order at `base` (neighbor id order).
pub fn image_complex(
    pg: &PlacedGraph,
    emb: &PLEmbedding,
    base: VertexId,
) -> Result<ImageComplex, ImageError> {
    let arms = spider_arms(pg, base)?;
    let mut legs = Vec::new();
    let mut vertex_params: BTreeMap<VertexId, (usize, Rational)> = BTreeMap::new();
    vertex_params.insert(base, (0, Rational::from_integer(0.into())));
    let mut absolute: Vec<Vec<(VertexId, f64)>> = Vec::new();
    for (leg_idx, arm) in arms.iter().enumerate() {
        let mut pts: Vec<Point> = vec![emb.positions[&base]];
        let mut acc = 0.0f64;
        let mut vparams = Vec::new();
        for pair in arm.windows(2) {
            let (curve, forward) = curve_for(emb, pg, pair[0], pair[1])?;
            let mut piece: Vec<Point> = curve.points.iter().map(|(p, _)| *p).collect();
            if !forward {
                piece.reverse();
            }
            for p in piece.iter().skip(1) {
                acc += pts.last().unwrap().dist(*p);
                pts.push(*p);
            }
            vparams.push((pair[1], acc));
        }
        for &(v, s) in &vparams {
            vertex_params.insert(v, (leg_idx, exact(s)));
        }
        absolute.push(vparams);
        legs.push(Polyline::new(pts));
    }
    // Normalize to [0,1] per leg.
    for (leg_idx, leg) in legs.iter().enumerate() {
        let len = exact(leg.length());
        for (v, _) in &absolute[leg_idx] {
            let (l, s) = vertex_params[v].clone();
            vertex_params.insert(*v, (l, s / len.clone()));
        }
    }
    Ok(ImageComplex {
        complex: PLComplex { base_point: emb.positions[&base], legs },
        base,
        vertex_params,
    })
}

/// The image of an embedded (n+1)-od word as a Γ-space: leg `i` of the
/// image is the concatenated curve along Γ-leg `i` of the word.
pub fn image_gamma_space(word: &ExpansionWord, emb: &PLEmbedding) -> GammaSpace {
    let branch_pos = emb.positions[&word.branch];
    let pg = &word.pg;
    let legs = word
        .legs
        .iter()
        .map(|leg| {
            let mut pts = vec![branch_pos];
            let mut prev = word.branch;
            for &v in leg {
                let (curve, forward) = curve_for(emb, pg, prev, v).expect("word edge curve");
                let mut piece: Vec<Point> = curve.points.iter().map(|(p, _)| *p).collect();
                if !forward {
                    piece.reverse();
                }
                pts.extend(piece.into_iter().skip(1));
                prev = v;
            }
            Polyline::new(pts)
        })
        .collect();
    GammaSpace::new(pg.n, branch_pos, legs)
}

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("expansion failed: {0}")]
    Expansion(#[from] ExpansionError),
    #[error("missing curve for edge {0},{1}")]
    MissingCurve(VertexId, VertexId),
    #[error("projection not monotone: cut parameters collide on edge {0},{1}")]
    ProjectionNotMonotone(VertexId, VertexId),
}

/// The geometric counterpart of the χ-expansion: positions of the inserted
/// vertices along the second-level embedding, the composed embedding of the
/// expanded graph, and the per-inserted-vertex geometric marks read back
/// from the composed projection.
#[derive(Debug)]
pub struct GeometricExpansion {
    pub expansion: Expansion,
    pub composed: PLEmbedding,
    pub inserted_positions: BTreeMap<VertexId, Point>,
    /// Per inserted vertex: the target leg its edge projects into and the
    /// target arc parameter of the cut under π₁∘π₂.  An origin mark reads
    /// back as parameter 0; a ray mark `b(i,t)` as `len(leg i) - 1 + t`.
    pub geometric_marks: BTreeMap<VertexId, (u32, f64)>,
}

/// Composes two embedding levels: `e1` embeds the word over `target`, `e2`
/// embeds `g` over the image Γ-space of `e1`.  The result is an embedding of
/// the χ-expansion of `g` over `target` with projection `π₁ ∘ π₂` and bound
/// `ε₁ + ε₂`.
pub fn compose_embeddings(
    g: &PlacedGraph,
    word: &ExpansionWord,
    _target: &GammaSpace,
    e1: &PLEmbedding,
    e2: &PLEmbedding,
) -> Result<GeometricExpansion, ComposeError> {
    let expansion = chi_expand(g, word)?;

    // Per word leg: cut positions a_p (arc position on T1's leg of Ω₁ of the
    // p-th word vertex) and per word edge the transfer map from T1 arc
    // positions to target parameters.
    struct Piece {
        leg: u32,
        // (t1 arc position, target param), monotone in position.
        table: Vec<(f64, f64)>,
    }
    let mut cuts: Vec<Vec<f64>> = Vec::new();
    let mut pieces: Vec<Vec<Piece>> = Vec::new();
    for leg in &word.legs {
        let mut acc = 0.0f64;
        let mut prev = word.branch;
        let mut prev_pt = e1.positions[&word.branch];
        let mut leg_cuts = vec![0.0];
        let mut leg_pieces = Vec::new();
        for &v in leg {
            let (curve, forward) = curve_for(e1, &word.pg, prev, v)
                .map_err(|_| ComposeError::MissingCurve(prev, v))?;
            let mut table = Vec::new();
            let pts: Vec<(Point, f64)> = if forward {
                curve.points.clone()
            } else {
                curve.points.iter().rev().cloned().collect()
            };
            for (p, s_t) in &pts {
                if *p != prev_pt || table.is_empty() {
                    acc += prev_pt.dist(*p);
                    prev_pt = *p;
                }
                table.push((acc, *s_t));
            }
            leg_pieces.push(Piece { leg: curve.leg, table });
            leg_cuts.push(acc);
            prev = v;
        }
        cuts.push(leg_cuts);
        pieces.push(leg_pieces);
    }

    let transfer = |leg: usize, piece_idx: usize, pos: f64| -> f64 {
        let piece = &pieces[leg][piece_idx];
        let t = &piece.table;
        if pos <= t[0].0 {
            return t[0].1;
        }
        for w in t.windows(2) {
            if pos <= w[1].0 {
                let span = w[1].0 - w[0].0;
                let frac = if span > 0.0 { (pos - w[0].0) / span } else { 1.0 };
                return w[0].1 + (w[1].1 - w[0].1) * frac;
            }
        }
        t.last().unwrap().1
    };

    let mut composed_edges = Vec::new();
    let mut inserted_positions = BTreeMap::new();
    let mut geometric_marks = BTreeMap::new();
    let mut positions: BTreeMap<VertexId, Point> =
        g.graph.vertices().map(|v| (v, e2.positions[&v])).collect();

    for ((u, v), chain) in &expansion.chains {
        let Marking::Ray { leg: i, .. } = g.mark(*v) else { unreachable!() };
        let i = *i as usize;
        let curve = e2
            .edges
            .iter()
            .find(|c| c.u == *u && c.v == *v)
            .ok_or(ComposeError::MissingCurve(*u, *v))?;
        let sigma_end = curve.last_param();
        let kappa = chain.len() - 1;
        // Cut parameters along T1 leg i for the inserted vertices.
        let mut cut_params = Vec::with_capacity(kappa + 1);
        for p in 0..=kappa {
            let a = if p == kappa { sigma_end } else { cuts[i][p] };
            cut_params.push(a);
        }
        if !cut_params.windows(2).all(|w| w[0] < w[1]) {
            return Err(ComposeError::ProjectionNotMonotone(*u, *v));
        }
        for (p, &z) in chain.iter().enumerate() {
            if expansion.inserted.contains(&z) {
                let pt = curve.point_at_param(cut_params[p]);
                positions.insert(z, pt);
                inserted_positions.insert(z, pt);
                // Geometric mark: target param of the cut under π₁∘π₂,
                // measured on the word-vertex side (end of piece p-1 /
                // start of piece p share the position).
                let piece = &pieces[i][p];
                let s_t = transfer(i, p, cut_params[p]);
                geometric_marks.insert(z, (piece.leg, s_t));
            }
        }
        // One composed curve per chain edge, oriented from its o-marked end.
        for p in 0..kappa {
            let (za, zb) = (chain[p], chain[p + 1]);
            let (lo, hi) = (cut_params[p], cut_params[p + 1]);
            let piece = &pieces[i][p];
            // Breakpoints: piece boundaries plus curve breakpoints inside.
            let mut sub: Vec<(Point, f64)> = Vec::new();
            sub.push((curve.point_at_param(lo), transfer(i, p, lo)));
            for (pt, sigma) in &curve.points {
                if *sigma > lo && *sigma < hi {
                    sub.push((*pt, transfer(i, p, *sigma)));
                }
            }
            sub.push((curve.point_at_param(hi), transfer(i, p, hi)));
            let a_origin = expansion.expanded.mark(za).is_origin();
            let (cu, cv) = if a_origin { (za, zb) } else { (zb, za) };
            if !a_origin {
                sub.reverse();
            }
            // Snap endpoints to the stored positions for exact sharing.
            sub.first_mut().unwrap().0 = positions[&cu];
            sub.last_mut().unwrap().0 = positions[&cv];
            composed_edges.push(EdgeCurve { u: cu, v: cv, leg: piece.leg, points: sub });
        }
    }

    let composed = PLEmbedding {
        epsilon: e1.epsilon + e2.epsilon,
        positions,
        edges: composed_edges,
    };
    Ok(GeometricExpansion { expansion, composed, inserted_positions, geometric_marks })
}

/// Positions of inserted word vertices along the second-level embedding,
/// with their geometric marks cross-checkable against the combinatorial
/// expansion.
pub fn expand_via_geometry(
    g: &PlacedGraph,
    word: &ExpansionWord,
    target: &GammaSpace,
    e1: &PLEmbedding,
    e2: &PLEmbedding,
) -> Result<GeometricExpansion, ComposeError> {
    compose_embeddings(g, word, target, e1, e2)
}
