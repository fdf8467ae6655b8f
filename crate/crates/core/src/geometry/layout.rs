//! Nested-lane routing of placed trees along a Γ-space.
//!
//! Every edge of a placed graph projects onto an initial arc of one target
//! leg, so the drawing decomposes into a small disk around the branch
//! (holding the origin-marked vertices and the chords connecting them to
//! the corridors) and one corridor per leg (holding the ray-marked vertices
//! and constant-offset wires).  Routing assigns each wire a lane chosen so
//! that wire triangles nest by depth inside each corridor and chord
//! endpoint pairs never interleave around the disk.
//!
//! The router handles spiders (trees that do not branch away from the
//! chosen root) whose arms wind monotonically around the branch in one
//! shared direction, with strict depth ordering wherever two arms turn in
//! the same corridor.  That covers words, stars, and paths; anything else
//! is reported as unroutable rather than drawn badly.  Outputs are intended
//! to be machine-checked with [`super::validate_embedding`].

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graphword::{Marking, PlacedGraph, VertexId};

use super::embedding::{EdgeCurve, PLEmbedding};
use super::gamma::GammaSpace;
use super::{Point, Polyline};

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("placed graph is not a tree")]
    NotATree,
    #[error("placement function invalid")]
    InvalidPlacement,
    #[error("ambient n mismatch: graph {0}, target {1}")]
    AmbientMismatch(u32, u32),
    #[error("target fails the Γ-space checks")]
    TargetInvalid,
    #[error("epsilon too large for the target clearances")]
    EpsilonTooLarge,
    #[error("not routable by nested lanes: {0}")]
    NotRoutable(String),
}

/// One stop of an arm in a corridor: the ray vertex, its wires, and whether
/// the arm ends there.
struct Visit {
    vertex: VertexId,
    wedge: usize,
    depth: f64,
    entry_wire: usize,
    exit_wire: Option<usize>,
}

struct Wire {
    o_end: VertexId,
    ray_end: VertexId,
    wedge: usize,
    s_end: f64,
}

struct Spider {
    root_ray: Option<(usize, f64)>,
    wires: Vec<Wire>,
    /// Per arm, the visits in travel order.
    arms: Vec<Vec<Visit>>,
    /// Per arm, the wire leaving the root.
    first_wire: Vec<usize>,
}

fn spider_structure(
    pg: &PlacedGraph,
    target: &GammaSpace,
    root: VertexId,
) -> Result<Spider, LayoutError> {
    let mut wires = Vec::new();
    let mut arms = Vec::new();
    let mut first_wire = Vec::new();
    let ray_of = |v: VertexId| -> Option<(usize, f64)> {
        match pg.mark(v) {
            Marking::Origin => None,
            Marking::Ray { leg, t } => Some((*leg as usize, target.ray_param(*leg, t))),
        }
    };
    for first in pg.graph.neighbors(root) {
        let mut arm_vertices = vec![root, first];
        let (mut prev, mut cur) = (root, first);
        loop {
            let next: Vec<VertexId> = pg.graph.neighbors(cur).filter(|&w| w != prev).collect();
            match next.len() {
                0 => break,
                1 => {
                    prev = cur;
                    cur = next[0];
                    arm_vertices.push(cur);
                }
                _ => {
                    return Err(LayoutError::NotRoutable(
                        "tree branches away from the root".into(),
                    ))
                }
            }
        }
        // Wires along the arm, and the visit of each ray vertex.
        let mut visits: Vec<Visit> = Vec::new();
        let mut fw = None;
        for pair in arm_vertices.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (o_end, ray_end) = if pg.mark(a).is_origin() { (a, b) } else { (b, a) };
            let (wedge, s_end) = ray_of(ray_end).expect("alternation");
            let wid = wires.len();
            wires.push(Wire { o_end, ray_end, wedge, s_end });
            if fw.is_none() {
                fw = Some(wid);
            }
            if ray_end == b {
                // Arriving at a new ray vertex.
                visits.push(Visit {
                    vertex: b,
                    wedge,
                    depth: s_end,
                    entry_wire: wid,
                    exit_wire: None,
                });
            } else {
                // Leaving a ray vertex (b is origin-marked).
                match visits.last_mut() {
                    Some(v) if v.vertex == a => v.exit_wire = Some(wid),
                    // The departure from a ray-marked root.
                    _ => {}
                }
            }
        }
        first_wire.push(fw.expect("arm has an edge"));
        arms.push(visits);
    }
    Ok(Spider { root_ray: ray_of(root), wires, arms, first_wire })
}

/// Winding direction around the branch: +1 counterclockwise, -1 clockwise.
fn pick_direction(spider: &Spider, wedge_count: usize) -> Result<i32, LayoutError> {
    let mut votes = 0i64;
    for (a, visits) in spider.arms.iter().enumerate() {
        let mut seq: Vec<usize> = Vec::new();
        if let Some((w, _)) = spider.root_ray {
            seq.push(w);
        }
        seq.extend(visits.iter().map(|v| v.wedge));
        for pair in seq.windows(2) {
            let ccw = (pair[1] + wedge_count - pair[0]) % wedge_count;
            if ccw == 0 {
                return Err(LayoutError::NotRoutable(format!(
                    "arm {a} revisits corridor {} consecutively",
                    pair[0]
                )));
            }
            let cw = wedge_count - ccw;
            votes += cw as i64 - ccw as i64;
        }
    }
    Ok(if votes >= 0 { 1 } else { -1 })
}

/// Outer-to-inner arm order from per-corridor depth dominance.
fn arm_order(spider: &Spider, tol: f64) -> Result<Vec<usize>, LayoutError> {
    let arm_count = spider.arms.len();
    // groups[wedge] = (arm, depth, is_leaf)
    let mut groups: BTreeMap<usize, Vec<(usize, f64, bool)>> = BTreeMap::new();
    for (a, visits) in spider.arms.iter().enumerate() {
        for v in visits {
            groups.entry(v.wedge).or_default().push((a, v.depth, v.exit_wire.is_none()));
        }
    }
    let mut outer = vec![vec![false; arm_count]; arm_count];
    for list in groups.values() {
        for (i, &(a1, d1, leaf1)) in list.iter().enumerate() {
            for &(a2, d2, leaf2) in &list[i + 1..] {
                if a1 == a2 {
                    continue;
                }
                if (d1 - d2).abs() <= tol {
                    if leaf1 && leaf2 {
                        continue;
                    }
                    return Err(LayoutError::NotRoutable(format!(
                        "arms {a1} and {a2} turn at the same depth in one corridor"
                    )));
                }
                if d1 > d2 {
                    outer[a1][a2] = true;
                } else {
                    outer[a2][a1] = true;
                }
            }
        }
    }
    // Kahn's toposort, ties by arm index.
    let mut indeg = vec![0usize; arm_count];
    for a in 0..arm_count {
        for b in 0..arm_count {
            if outer[a][b] {
                indeg[b] += 1;
            }
        }
    }
    let mut order = Vec::new();
    let mut ready: Vec<usize> = (0..arm_count).filter(|&a| indeg[a] == 0).collect();
    while let Some(a) = ready.pop() {
        order.push(a);
        for b in 0..arm_count {
            if outer[a][b] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    ready.push(b);
                }
            }
        }
        ready.sort_by(|x, y| y.cmp(x));
    }
    if order.len() != arm_count {
        return Err(LayoutError::NotRoutable("cyclic depth dominance between arms".into()));
    }
    Ok(order)
}

struct Frame {
    point: Point,
    normal: Point,
}

/// Offset frame at arc position `s`: the miter normal at polyline vertices,
/// the segment normal elsewhere.
fn frame_at(leg: &Polyline, s: f64) -> Frame {
    let params = leg.vertex_params();
    let pts = leg.points();
    for (k, &sk) in params.iter().enumerate() {
        if (s - sk).abs() < 1e-12 && k > 0 && k + 1 < pts.len() {
            let n1 = pts[k].sub(pts[k - 1]).unit().left_normal();
            let n2 = pts[k + 1].sub(pts[k]).unit().left_normal();
            let denom = 1.0 + n1.x * n2.x + n1.y * n2.y;
            return Frame { point: pts[k], normal: n1.add(n2).scale(1.0 / denom) };
        }
    }
    Frame { point: leg.point_at(s), normal: leg.direction_at(s).left_normal() }
}

fn offset_point(leg: &Polyline, s: f64, z: f64) -> Point {
    let f = frame_at(leg, s);
    f.point.add(f.normal.scale(z))
}

/// Knots of a constant-offset run along a leg: endpoints plus every interior
/// leg vertex, each with its projection parameter.
fn offset_run(leg: &Polyline, s_from: f64, s_to: f64, z: f64) -> Vec<(Point, f64)> {
    let mut params = vec![s_from];
    params.extend(
        leg.vertex_params().iter().copied().filter(|&s| s > s_from + 1e-12 && s < s_to - 1e-12),
    );
    params.push(s_to);
    params.into_iter().map(|s| (offset_point(leg, s, z), s)).collect()
}

/// Maximum lane distortion over the interior vertices of all legs.
fn miter_factor(target: &GammaSpace) -> Option<f64> {
    let mut worst: f64 = 1.0;
    for leg in &target.legs {
        let pts = leg.points();
        for k in 1..pts.len() - 1 {
            let d1 = pts[k].sub(pts[k - 1]).unit();
            let d2 = pts[k + 1].sub(pts[k]).unit();
            let cos_turn = d1.x * d2.x + d1.y * d2.y;
            // cos(theta/2)^2 = (1+cos theta)/2
            let half = ((1.0 + cos_turn) / 2.0).max(0.0).sqrt();
            if half < 0.2 {
                return None; // near-reversal bend, lanes are meaningless
            }
            worst = worst.max(1.0 / half);
        }
    }
    Some(worst)
}

/// Minimum distance between different legs, ignoring their shared start.
fn leg_separation(target: &GammaSpace, rho: f64) -> f64 {
    let mut best = f64::INFINITY;
    let base = target.branch;
    for i in 0..target.legs.len() {
        for j in i + 1..target.legs.len() {
            for (a, b) in target.legs[i].segments() {
                for (c, d) in target.legs[j].segments() {
                    // Clip out the neighborhood of the base.
                    let clip = |p: Point, q: Point| -> Option<(Point, Point)> {
                        let (dp, dq) = (p.dist(base), q.dist(base));
                        if dp >= rho && dq >= rho {
                            return Some((p, q));
                        }
                        if dp < rho && dq < rho {
                            return None;
                        }
                        let (near, far) = if dp < dq { (p, q) } else { (q, p) };
                        let mut lo = 0.0f64;
                        let mut hi = 1.0f64;
                        for _ in 0..40 {
                            let mid = 0.5 * (lo + hi);
                            if near.lerp(far, mid).dist(base) < rho {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        Some((near.lerp(far, hi), far))
                    };
                    if let (Some((a1, b1)), Some((c1, d1))) = (clip(a, b), clip(c, d)) {
                        best = best.min(super::segment_segment_dist(a1, b1, c1, d1));
                    }
                }
            }
        }
    }
    best
}

/// The angular gap between adjacent initial leg directions.
fn min_angle_gap(target: &GammaSpace) -> f64 {
    let mut angles: Vec<f64> = target
        .legs
        .iter()
        .map(|l| l.points()[1].sub(l.points()[0]).angle())
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best = f64::INFINITY;
    for k in 0..angles.len() {
        let next = if k + 1 == angles.len() {
            angles[0] + std::f64::consts::TAU
        } else {
            angles[k + 1]
        };
        best = best.min(next - angles[k]);
    }
    best
}

/// Routes a placed tree along the target as a ⟨ω,T,ε⟩-embedding.
pub fn layout_embedding(
    pg: &PlacedGraph,
    target: &GammaSpace,
    epsilon: f64,
) -> Result<PLEmbedding, LayoutError> {
    if !pg.is_valid() {
        return Err(LayoutError::InvalidPlacement);
    }
    if !pg.graph.is_tree() {
        return Err(LayoutError::NotATree);
    }
    if pg.n != target.n {
        return Err(LayoutError::AmbientMismatch(pg.n, target.n));
    }
    if !target.validate().is_empty() {
        return Err(LayoutError::TargetInvalid);
    }
    if !(epsilon > 0.0) {
        return Err(LayoutError::EpsilonTooLarge);
    }
    let wedge_count = target.legs.len();

    // Root at a max-degree vertex (smallest id on ties).
    let root = pg
        .graph
        .vertices()
        .max_by_key(|&v| (pg.graph.degree(v), std::cmp::Reverse(v)))
        .expect("non-empty graph");
    layout_embedding_rooted(pg, target, epsilon, root, wedge_count)
}

/// Same as [`layout_embedding`] with an explicit spider root.
pub fn layout_embedding_from(
    pg: &PlacedGraph,
    target: &GammaSpace,
    epsilon: f64,
    root: VertexId,
) -> Result<PLEmbedding, LayoutError> {
    if !pg.is_valid() {
        return Err(LayoutError::InvalidPlacement);
    }
    if !pg.graph.is_tree() {
        return Err(LayoutError::NotATree);
    }
    if pg.n != target.n {
        return Err(LayoutError::AmbientMismatch(pg.n, target.n));
    }
    if !target.validate().is_empty() {
        return Err(LayoutError::TargetInvalid);
    }
    layout_embedding_rooted(pg, target, epsilon, root, target.legs.len())
}

fn layout_embedding_rooted(
    pg: &PlacedGraph,
    target: &GammaSpace,
    epsilon: f64,
    root: VertexId,
    wedge_count: usize,
) -> Result<PLEmbedding, LayoutError> {
    let spider = spider_structure(pg, target, root)?;
    let dir = pick_direction(&spider, wedge_count)?;

    // Geometric budget.
    let tip_clear = target
        .legs
        .iter()
        .map(|l| l.length() - 1.0)
        .fold(f64::INFINITY, f64::min);
    let first_seg = target
        .legs
        .iter()
        .map(|l| l.points()[0].dist(l.points()[1]))
        .fold(f64::INFINITY, f64::min);
    let min_seg = target
        .legs
        .iter()
        .map(|l| l.min_segment_length())
        .fold(f64::INFINITY, f64::min);
    let shallowest = spider
        .wires
        .iter()
        .map(|w| w.s_end)
        .fold(f64::INFINITY, f64::min);
    let rho = (epsilon / 4.0)
        .min(first_seg * 0.8)
        .min(tip_clear * 0.5)
        .min(shallowest * 0.5);
    let Some(mf) = miter_factor(target) else {
        return Err(LayoutError::EpsilonTooLarge);
    };
    let sep = leg_separation(target, rho);
    let gap = min_angle_gap(target);
    let width = (0.45 * epsilon)
        .min(0.9 * epsilon / mf)
        .min(0.4 * sep / mf)
        .min(0.25 * rho * gap)
        .min(0.4 * min_seg);
    if !(width > 1e-12 && rho > 1e-12) {
        return Err(LayoutError::EpsilonTooLarge);
    }
    let order = arm_order(&spider, width * 1e-6)?;

    // Port assembly: two-sided lists per wedge; entries on the IN side,
    // exits on the OUT side, outer arms first.
    let mut low: Vec<Vec<usize>> = vec![Vec::new(); wedge_count];
    let mut high: Vec<Vec<usize>> = vec![Vec::new(); wedge_count];
    let (in_side, out_side) = if dir > 0 {
        (&mut low, &mut high)
    } else {
        (&mut high, &mut low)
    };
    for &arm in &order {
        if let Some((w, _)) = spider.root_ray {
            out_side[w].push(spider.first_wire[arm]);
        }
        for visit in &spider.arms[arm] {
            in_side[visit.wedge].push(visit.entry_wire);
            if let Some(exit) = visit.exit_wire {
                out_side[visit.wedge].push(exit);
            }
        }
    }

    // Lane offsets.
    let mut lane = vec![0.0f64; spider.wires.len()];
    let mut wedge_ports: Vec<Vec<usize>> = Vec::with_capacity(wedge_count);
    for w in 0..wedge_count {
        let mut seq = low[w].clone();
        seq.extend(high[w].iter().rev());
        let k_total = seq.len();
        for (k, &wid) in seq.iter().enumerate() {
            lane[wid] = width * (2.0 * (k + 1) as f64 / (k_total + 1) as f64 - 1.0);
        }
        wedge_ports.push(seq);
    }

    // Group data per ray vertex.
    struct Group {
        wedge: usize,
        depth: f64,
        wire_ids: Vec<usize>,
        z_lo: f64,
        z_hi: f64,
        apex_z: f64,
    }
    let mut groups: BTreeMap<VertexId, Group> = BTreeMap::new();
    for (wid, wire) in spider.wires.iter().enumerate() {
        let g = groups.entry(wire.ray_end).or_insert(Group {
            wedge: wire.wedge,
            depth: wire.s_end,
            wire_ids: Vec::new(),
            z_lo: f64::INFINITY,
            z_hi: f64::NEG_INFINITY,
            apex_z: 0.0,
        });
        g.wire_ids.push(wid);
        g.z_lo = g.z_lo.min(lane[wid]);
        g.z_hi = g.z_hi.max(lane[wid]);
    }
    for g in groups.values_mut() {
        g.apex_z = 0.5 * (g.z_lo + g.z_hi);
    }
    // Laminar-depth feasibility: anything inside a group's lane hull must be
    // strictly shallower, and nothing may pass through a hull it is inside.
    let mut deepest_inner: BTreeMap<VertexId, f64> = BTreeMap::new();
    for (v, g) in &groups {
        let mut deepest = 0.0f64;
        for (v2, g2) in &groups {
            if v == v2 || g.wedge != g2.wedge {
                continue;
            }
            let inside = g2.z_lo > g.z_lo && g2.z_hi < g.z_hi;
            if inside {
                if g2.depth >= g.depth {
                    return Err(LayoutError::NotRoutable(format!(
                        "group at {v2} nests inside {v} without being shallower"
                    )));
                }
                deepest = deepest.max(g2.depth);
            } else if g2.z_lo < g.z_lo && g2.z_hi > g.z_hi {
                // g inside g2: fine, handled from g2's perspective.
            } else if g2.z_hi > g.z_lo && g2.z_lo < g.z_hi {
                return Err(LayoutError::NotRoutable(format!(
                    "lane hulls of {v} and {v2} interleave"
                )));
            }
        }
        deepest_inner.insert(*v, deepest);
    }

    // Positions.
    let mut positions: BTreeMap<VertexId, Point> = BTreeMap::new();
    for (v, g) in &groups {
        let leg = &target.legs[g.wedge];
        positions.insert(*v, offset_point(leg, g.depth, g.apex_z));
    }
    // Mouth points.
    let mouth: Vec<Point> = spider
        .wires
        .iter()
        .enumerate()
        .map(|(wid, w)| offset_point(&target.legs[w.wedge], rho, lane[wid]))
        .collect();
    // Disk vertices: origin-marked vertices at depth-pulled chord centroids.
    let mut o_ports: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for (wid, w) in spider.wires.iter().enumerate() {
        o_ports.entry(w.o_end).or_default().push(wid);
    }
    // Global cyclic order of ports for nesting depth.
    let mut global_index: BTreeMap<usize, usize> = BTreeMap::new();
    {
        let mut idx = 0usize;
        for seq in &wedge_ports {
            for &wid in seq {
                global_index.insert(wid, idx);
                idx += 1;
            }
        }
    }
    let intervals: BTreeMap<VertexId, (usize, usize)> = o_ports
        .iter()
        .map(|(v, wids)| {
            let lo = wids.iter().map(|w| global_index[w]).min().unwrap();
            let hi = wids.iter().map(|w| global_index[w]).max().unwrap();
            (*v, (lo, hi))
        })
        .collect();
    let total_ports = global_index.len();
    let max_nest = intervals.len().max(1) as f64;
    for (v, wids) in &o_ports {
        let (lo, hi) = intervals[v];
        // Ports strictly inside the minor arc between the extremes: chords
        // containing more material bow further toward the branch.
        let inside = global_index.values().filter(|&&g| g > lo && g < hi).count()
            - wids.iter().filter(|w| global_index[w] > lo && global_index[w] < hi).count();
        let outside = total_ports - inside - wids.len();
        let depth = inside.min(outside) as f64;
        let centroid = wids
            .iter()
            .map(|w| mouth[*w])
            .fold(Point::new(0.0, 0.0), |acc, p| acc.add(p))
            .scale(1.0 / wids.len() as f64);
        let pull = 0.25 + 0.6 * (depth + 1.0) / (max_nest + 2.0);
        positions.insert(*v, centroid.add(target.branch.sub(centroid).scale(pull)));
    }

    // Edge curves.
    let mut edges = Vec::new();
    for (wid, wire) in spider.wires.iter().enumerate() {
        let leg = &target.legs[wire.wedge];
        let group = &groups[&wire.ray_end];
        let z = lane[wid];
        let mut points: Vec<(Point, f64)> = vec![(positions[&wire.o_end], 0.0)];
        let single = group.wire_ids.len() == 1;
        let jog_len = if single {
            0.0
        } else {
            let floor = deepest_inner[&wire.ray_end].max(rho);
            let room = (group.depth - floor).max(0.0);
            (0.35 * (group.depth - rho)).min(0.45 * room).min(0.45)
        };
        let run_to = group.depth - jog_len;
        if run_to <= rho {
            return Err(LayoutError::NotRoutable(format!(
                "no corridor room before {}",
                wire.ray_end
            )));
        }
        points.extend(offset_run(leg, rho, run_to, z));
        if !single {
            points.push((positions[&wire.ray_end], group.depth));
        } else {
            // The constant-lane run already ends at the vertex.
            let last = points.last_mut().unwrap();
            last.0 = positions[&wire.ray_end];
        }
        edges.push(EdgeCurve {
            u: wire.o_end,
            v: wire.ray_end,
            leg: wire.wedge as u32,
            points,
        });
    }

    Ok(PLEmbedding { epsilon, positions, edges })
}
