//! Wrapping patterns and their interaction under a cover: detection,
//! the away/toward/across trichotomy, branch-star trajectories, reversal
//! points, and wrapping complexes with their sync checks.
//!
//! The propositions behind the checks here are theorems whenever `f` is a
//! valid cover, so on such inputs every checker must come back clean; a
//! reported violation flags either an invalid `f` upstream or an
//! implementation bug.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graphword::{CVertex, PlacedGraph, VertexId};

/// A sequence of consecutive vertices `w₀..w_k`, `k` a positive multiple of
/// `2(n+1)`, whose marks cycle `b(0,·), o, b(1,·), o, …, b(n,·), o, b(0,·)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WrappingPattern {
    pub vertices: Vec<VertexId>,
}

impl WrappingPattern {
    pub fn k(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Validates the template against the ambient placed graph.
    pub fn validate(&self, pg: &PlacedGraph) -> bool {
        let period = 2 * (pg.n as usize + 1);
        let k = self.k();
        if k == 0 || k % period != 0 {
            return false;
        }
        let simple = self.vertices.iter().collect::<BTreeSet<_>>().len() == self.vertices.len();
        if !simple {
            return false;
        }
        for w in self.vertices.windows(2) {
            if !pg.graph.contains_edge(w[0], w[1]) {
                return false;
            }
        }
        self.vertices.iter().enumerate().all(|(p, &v)| {
            let mark = pg.mark(v);
            if p % 2 == 0 {
                mark.ray_leg() == Some(((p / 2) % (pg.n as usize + 1)) as u32)
            } else {
                mark.is_origin()
            }
        })
    }
}

/// Detection scope: only the maximal patterns, or also every aligned
/// sub-pattern of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetectScope {
    #[default]
    Maximal,
    WithAlignedSubpatterns,
}

/// All wrapping patterns of `pg`, over simple paths.
///
/// Detection enumerates simple paths only; every use of patterns in the
/// source material is along subdivided edges, and a non-simple candidate is
/// never classified.  With [`DetectScope::Maximal`], a pattern is dropped if
/// it occurs inside a longer one at an aligned offset (a multiple of the
/// period `2(n+1)`).
pub fn detect_wrapping_patterns(pg: &PlacedGraph, scope: DetectScope) -> Vec<WrappingPattern> {
    let period = 2 * (pg.n as usize + 1);
    let mut all: BTreeSet<Vec<VertexId>> = BTreeSet::new();
    // Grow template-matching simple paths forward from every b(0,·) vertex.
    for start in pg.graph.vertices() {
        if pg.mark(start).ray_leg() != Some(0) {
            continue;
        }
        let mut path = vec![start];
        let mut on_path = BTreeSet::from([start]);
        grow(pg, &mut path, &mut on_path, period, &mut all);
    }
    let mut patterns: Vec<Vec<VertexId>> = all.into_iter().collect();
    if scope == DetectScope::Maximal {
        let set: BTreeSet<&Vec<VertexId>> = patterns.iter().collect();
        let dominated: Vec<bool> = patterns
            .iter()
            .map(|p| {
                set.iter().any(|q| {
                    q.len() > p.len()
                        && q.windows(p.len()).step_by(period).any(|w| w == p.as_slice())
                })
            })
            .collect();
        patterns = patterns
            .into_iter()
            .zip(dominated)
            .filter(|(_, d)| !d)
            .map(|(p, _)| p)
            .collect();
    }
    patterns.into_iter().map(|vertices| WrappingPattern { vertices }).collect()
}

fn grow(
    pg: &PlacedGraph,
    path: &mut Vec<VertexId>,
    on_path: &mut BTreeSet<VertexId>,
    period: usize,
    out: &mut BTreeSet<Vec<VertexId>>,
) {
    let pos = path.len(); // position of the vertex about to be appended
    if pos > 1 && (pos - 1) % period == 0 {
        out.insert(path.clone());
    }
    let last = *path.last().unwrap();
    let want_origin = pos % 2 == 1;
    let want_leg = ((pos / 2) % (pg.n as usize + 1)) as u32;
    for next in pg.graph.neighbors(last) {
        if on_path.contains(&next) {
            continue;
        }
        let mark = pg.mark(next);
        let matches = if want_origin {
            mark.is_origin()
        } else {
            mark.ray_leg() == Some(want_leg)
        };
        if matches {
            path.push(next);
            on_path.insert(next);
            grow(pg, path, on_path, period, out);
            on_path.remove(&next);
            path.pop();
        }
    }
}

/// A branch-star trajectory: `v₀..v_{2q}` with even positions at `C(ℓ_p,1)`
/// for pairwise-distinct legs and odd positions at the branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchStarTrajectory {
    pub vertices: Vec<VertexId>,
    /// Leg labels at even positions, in order.
    pub legs: Vec<u32>,
}

/// Outcome of the trichotomy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternClass {
    /// `f(w_p) = C(ℓ, j+p)`.
    Away { leg: u32, j: u32 },
    /// `f(w_p) = C(ℓ, j-p)`, `j >= k`.
    Toward { leg: u32, j: u32 },
    /// Descends leg ℓ₁, crosses via a branch-star trajectory, ascends leg ℓ₂.
    Across {
        leg1: u32,
        leg2: u32,
        j1: u32,
        j2: u32,
        trajectory: BranchStarTrajectory,
    },
}

impl fmt::Display for PatternClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternClass::Away { leg, j } => write!(f, "away(leg {leg}, j {j})"),
            PatternClass::Toward { leg, j } => write!(f, "toward(leg {leg}, j {j})"),
            PatternClass::Across { leg1, leg2, j1, j2, .. } => {
                write!(f, "across(leg {leg1} -> leg {leg2}, j1 {j1}, j2 {j2})")
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WrappingError {
    #[error("pattern does not match the wrapping template")]
    InvalidPattern,
    #[error("f is not total on the pattern")]
    PartialCover,
    #[error("no trichotomy alternative fits; C1/C2 must be violated upstream")]
    ClassificationImpossible,
    #[error("pattern does not meet the branch")]
    DoesNotMeetBranch,
    #[error("index graph Q is disconnected")]
    Disconnected,
}

fn images(
    pattern: &WrappingPattern,
    f: &BTreeMap<VertexId, CVertex>,
) -> Result<Vec<CVertex>, WrappingError> {
    pattern
        .vertices
        .iter()
        .map(|v| f.get(v).copied().ok_or(WrappingError::PartialCover))
        .collect()
}

fn at(leg: u32, j: u32) -> CVertex {
    if j == 0 {
        CVertex::Branch
    } else {
        CVertex::Leg { leg, j }
    }
}

/// Classifies a wrapping pattern under `f` into exactly one of the three
/// trichotomy alternatives.
pub fn classify(
    pg: &PlacedGraph,
    pattern: &WrappingPattern,
    f: &BTreeMap<VertexId, CVertex>,
) -> Result<PatternClass, WrappingError> {
    if !pattern.validate(pg) {
        return Err(WrappingError::InvalidPattern);
    }
    let c = images(pattern, f)?;
    let k = pattern.k();

    // (a) Away: determined by c0 and c1.
    let away = match (c[0], c[1]) {
        (CVertex::Branch, CVertex::Leg { leg, j: 1 }) => Some((leg, 0)),
        (CVertex::Leg { leg, j }, CVertex::Leg { leg: l2, j: j2 }) if leg == l2 && j2 == j + 1 => {
            Some((leg, j))
        }
        _ => None,
    };
    if let Some((leg, j)) = away {
        if (0..=k).all(|p| c[p] == at(leg, j + p as u32)) {
            return Ok(PatternClass::Away { leg, j });
        }
        return Err(WrappingError::ClassificationImpossible);
    }

    // (b)/(c) start by descending some leg ℓ₁ from j₁.
    let CVertex::Leg { leg: leg1, j: j1 } = c[0] else {
        return Err(WrappingError::ClassificationImpossible);
    };
    if j1 as usize >= k {
        if (0..=k).all(|p| c[p] == at(leg1, j1 - p as u32)) {
            return Ok(PatternClass::Toward { leg: leg1, j: j1 });
        }
        return Err(WrappingError::ClassificationImpossible);
    }

    // (c) Across.
    if !(0..=j1 as usize).all(|p| c[p] == at(leg1, j1 - p as u32)) {
        return Err(WrappingError::ClassificationImpossible);
    }
    let CVertex::Leg { leg: leg2, j: j2 } = c[k] else {
        return Err(WrappingError::ClassificationImpossible);
    };
    if leg2 == leg1 || j2 < 1 || (j1 + j2) as usize > k {
        return Err(WrappingError::ClassificationImpossible);
    }
    if !(0..=j2 as usize).all(|p| c[k - p] == at(leg2, j2 - p as u32)) {
        return Err(WrappingError::ClassificationImpossible);
    }
    let lo = j1 as usize - 1;
    let hi = k - j2 as usize + 1;
    let traj_imgs = &c[lo..=hi];
    let mut legs = Vec::new();
    for (p, &cv) in traj_imgs.iter().enumerate() {
        match (p % 2 == 0, cv) {
            (true, CVertex::Leg { leg, j: 1 }) => legs.push(leg),
            (false, CVertex::Branch) => {}
            _ => return Err(WrappingError::ClassificationImpossible),
        }
    }
    let q = (traj_imgs.len() - 1) / 2;
    let distinct = legs.iter().collect::<BTreeSet<_>>().len() == legs.len();
    if traj_imgs.len() % 2 == 0 || q < 1 || q > pg.n as usize - 1 || !distinct {
        return Err(WrappingError::ClassificationImpossible);
    }
    Ok(PatternClass::Across {
        leg1,
        leg2,
        j1,
        j2,
        trajectory: BranchStarTrajectory {
            vertices: pattern.vertices[lo..=hi].to_vec(),
            legs,
        },
    })
}

/// Whether some `f(w_p)` is the branch of C.
pub fn meets_branch(pattern: &WrappingPattern, f: &BTreeMap<VertexId, CVertex>) -> bool {
    pattern.vertices.iter().any(|v| f.get(v) == Some(&CVertex::Branch))
}

/// The (possibly empty) prefix `w₀..w_{p-1}` for minimal `p` with `f(w_p)`
/// in the branch-star.  Defined only for patterns meeting the branch.
pub fn pre_branch_star_segment(
    pattern: &WrappingPattern,
    f: &BTreeMap<VertexId, CVertex>,
) -> Result<Vec<VertexId>, WrappingError> {
    if !meets_branch(pattern, f) {
        return Err(WrappingError::DoesNotMeetBranch);
    }
    let c = images(pattern, f)?;
    let p = c.iter().position(|cv| cv.in_branch_star()).unwrap();
    Ok(pattern.vertices[..p].to_vec())
}

/// Number of `b(i*,·)` marks in a vertex sequence.
pub fn count_istar_marks(pg: &PlacedGraph, vertices: &[VertexId], istar: u32) -> usize {
    vertices.iter().filter(|v| pg.mark(**v).ray_leg() == Some(istar)).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReversalKind {
    Start,
    End,
}

/// A leg vertex `C(ℓ,j)`, `j ≥ 2`, where two patterns share an endpoint
/// image but diverge at the adjacent step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReversalPoint {
    pub at: CVertex,
    pub kind: ReversalKind,
    /// Indices (into the supplied pattern list) of one witnessing pair.
    pub witnesses: (usize, usize),
}

/// All reversal points witnessed by a list of patterns, per the equivalent
/// formulation: equal image at position 0 with different images at position
/// 1 (start type), or equal at the final position with different penultimate
/// images (end type).  One witness pair is kept per (vertex, kind).
pub fn find_reversal_points(
    patterns: &[WrappingPattern],
    f: &BTreeMap<VertexId, CVertex>,
) -> Vec<ReversalPoint> {
    let mut found: BTreeMap<(CVertex, ReversalKind), (usize, usize)> = BTreeMap::new();
    let img = |v: &VertexId| f.get(v).copied();
    for (a, pa) in patterns.iter().enumerate() {
        for (b, pb) in patterns.iter().enumerate().skip(a + 1) {
            let (ka, kb) = (pa.k(), pb.k());
            if let (Some(c0a), Some(c0b)) = (img(&pa.vertices[0]), img(&pb.vertices[0])) {
                if c0a == c0b
                    && !c0a.in_branch_star()
                    && img(&pa.vertices[1]) != img(&pb.vertices[1])
                {
                    found.entry((c0a, ReversalKind::Start)).or_insert((a, b));
                }
            }
            if let (Some(cka), Some(ckb)) = (img(&pa.vertices[ka]), img(&pb.vertices[kb])) {
                if cka == ckb
                    && !cka.in_branch_star()
                    && img(&pa.vertices[ka - 1]) != img(&pb.vertices[kb - 1])
                {
                    found.entry((cka, ReversalKind::End)).or_insert((a, b));
                }
            }
        }
    }
    found
        .into_iter()
        .map(|((at, kind), witnesses)| ReversalPoint { at, kind, witnesses })
        .collect()
}

/// A wrapping complex: patterns indexed by the vertices of a connected graph
/// Q, with an edge iff the patterns share a start image, or share an end
/// image with equal length.
#[derive(Debug, Clone)]
pub struct WrappingComplex {
    pub patterns: Vec<WrappingPattern>,
    pub q_edges: BTreeSet<(usize, usize)>,
}

fn q_edge(pa: &WrappingPattern, pb: &WrappingPattern, f: &BTreeMap<VertexId, CVertex>) -> bool {
    let img = |v: &VertexId| f.get(v).copied();
    let shared_start =
        img(&pa.vertices[0]).is_some() && img(&pa.vertices[0]) == img(&pb.vertices[0]);
    let shared_end = pa.k() == pb.k()
        && img(&pa.vertices[pa.k()]).is_some()
        && img(&pa.vertices[pa.k()]) == img(&pb.vertices[pb.k()]);
    shared_start || shared_end
}

fn component_labels(count: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<usize> {
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..count).collect();
    for &(a, b) in edges {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        parent[ra] = rb;
    }
    (0..count).map(|x| root(&mut parent, x)).collect()
}

/// Derives Q from the edge rule; fails if Q is disconnected.
pub fn build_complex(
    patterns: Vec<WrappingPattern>,
    f: &BTreeMap<VertexId, CVertex>,
) -> Result<WrappingComplex, WrappingError> {
    assert!(!patterns.is_empty());
    let mut q_edges = BTreeSet::new();
    for a in 0..patterns.len() {
        for b in a + 1..patterns.len() {
            if q_edge(&patterns[a], &patterns[b], f) {
                q_edges.insert((a, b));
            }
        }
    }
    let comps = component_labels(patterns.len(), &q_edges);
    if comps.iter().any(|&c| c != comps[0]) {
        return Err(WrappingError::Disconnected);
    }
    Ok(WrappingComplex { patterns, q_edges })
}

/// Partitions a pattern list into wrapping complexes (the Q-components).
pub fn complexes_of(
    patterns: &[WrappingPattern],
    f: &BTreeMap<VertexId, CVertex>,
) -> Vec<WrappingComplex> {
    if patterns.is_empty() {
        return Vec::new();
    }
    let mut edges = BTreeSet::new();
    for a in 0..patterns.len() {
        for b in a + 1..patterns.len() {
            if q_edge(&patterns[a], &patterns[b], f) {
                edges.insert((a, b));
            }
        }
    }
    let comps = component_labels(patterns.len(), &edges);
    let mut by_comp: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in comps.iter().enumerate() {
        by_comp.entry(c).or_default().push(i);
    }
    by_comp
        .into_values()
        .map(|members| {
            let sub: Vec<WrappingPattern> = members.iter().map(|&i| patterns[i].clone()).collect();
            build_complex(sub, f).expect("a Q-component is connected")
        })
        .collect()
}

/// One conclusion of the sync propositions failing on concrete data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyncViolation {
    /// Equal image at different positions without the branch/origin escape.
    PositionalSync { q1: usize, p1: usize, q2: usize, p2: usize },
    /// Pre-branch-star segments with different `b(i*,·)` counts.
    IstarCount { q1: usize, q2: usize, c1: usize, c2: usize },
    /// A pattern not confined to one side of a reversal point.
    SideStraddled { q: usize, at: CVertex },
    /// A start-type (end-type) reversal point hit away from position 0 (k).
    ReversalPosition { q: usize, p: usize, at: CVertex },
    /// A reversal-point split produced a disconnected part.
    SplitDisconnected { at: CVertex },
}

/// Report from [`verify_complex_sync`]; empty means every conclusion holds.
#[derive(Debug, Clone, Default)]
pub struct SyncReport {
    pub violations: Vec<SyncViolation>,
    /// Sizes ( |Q₁|, |Q₂| ) of each reversal-point split performed.
    pub splits: Vec<(CVertex, usize, usize)>,
}

impl SyncReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the sync conclusions on a wrapping complex:
///
/// 1. positional sync — equal images imply equal positions, except the
///    branch image on origin-marked vertices;
/// 2. patterns meeting the branch have pre-branch-star segments with the same
///    number of `b(i*,·)` marks;
/// 3. every reversal point splits the complex into two wrapping complexes,
///    hit only at the matching endpoint position.
pub fn verify_complex_sync(
    pg: &PlacedGraph,
    complex: &WrappingComplex,
    f: &BTreeMap<VertexId, CVertex>,
    istar: u32,
) -> SyncReport {
    let mut report = SyncReport::default();
    let pats = &complex.patterns;
    let img: Vec<Vec<Option<CVertex>>> = pats
        .iter()
        .map(|p| p.vertices.iter().map(|v| f.get(v).copied()).collect())
        .collect();

    // (1) positional sync, including pairs inside a single pattern.
    for q1 in 0..pats.len() {
        for q2 in q1..pats.len() {
            for p1 in 0..img[q1].len() {
                let start2 = if q1 == q2 { p1 + 1 } else { 0 };
                for p2 in start2..img[q2].len() {
                    let (Some(c1), Some(c2)) = (img[q1][p1], img[q2][p2]) else { continue };
                    if c1 != c2 || p1 == p2 {
                        continue;
                    }
                    let both_origin = pg.mark(pats[q1].vertices[p1]).is_origin()
                        && pg.mark(pats[q2].vertices[p2]).is_origin();
                    if !(both_origin && c1 == CVertex::Branch) {
                        report.violations.push(SyncViolation::PositionalSync { q1, p1, q2, p2 });
                    }
                }
            }
        }
    }

    // (2) equal i*-counts of pre-branch-star segments.
    let segments: Vec<Option<usize>> = pats
        .iter()
        .map(|p| {
            pre_branch_star_segment(p, f).ok().map(|seg| count_istar_marks(pg, &seg, istar))
        })
        .collect();
    for q1 in 0..pats.len() {
        for q2 in q1 + 1..pats.len() {
            if let (Some(c1), Some(c2)) = (segments[q1], segments[q2]) {
                if c1 != c2 {
                    report.violations.push(SyncViolation::IstarCount { q1, q2, c1, c2 });
                }
            }
        }
    }

    // (3) reversal points: hit positions, confinement, connected split.
    for rp in find_reversal_points(pats, f) {
        let mut side_near = Vec::new();
        let mut side_far = Vec::new();
        for (q, imgs) in img.iter().enumerate() {
            let mut all_near = true;
            let mut all_far = true;
            for (p, c) in imgs.iter().enumerate() {
                let Some(c) = *c else { continue };
                if c == rp.at {
                    let expected = match rp.kind {
                        ReversalKind::Start => 0,
                        ReversalKind::End => pats[q].k(),
                    };
                    if p != expected {
                        report.violations.push(SyncViolation::ReversalPosition {
                            q,
                            p,
                            at: rp.at,
                        });
                    }
                    continue;
                }
                match side_of(c, rp.at) {
                    Side::Near => all_far = false,
                    Side::Far => all_near = false,
                }
            }
            if all_near {
                side_near.push(q);
            } else if all_far {
                side_far.push(q);
            } else {
                report.violations.push(SyncViolation::SideStraddled { q, at: rp.at });
            }
        }
        report.splits.push((rp.at, side_near.len(), side_far.len()));
        for side in [&side_near, &side_far] {
            if side.is_empty() {
                continue;
            }
            let index_of: BTreeMap<usize, usize> =
                side.iter().enumerate().map(|(i, &q)| (q, i)).collect();
            let renamed: BTreeSet<(usize, usize)> = complex
                .q_edges
                .iter()
                .filter(|(a, b)| side.contains(a) && side.contains(b))
                .map(|&(a, b)| (index_of[&a], index_of[&b]))
                .collect();
            let comps = component_labels(side.len(), &renamed);
            if comps.iter().any(|&c| c != comps[0]) {
                report.violations.push(SyncViolation::SplitDisconnected { at: rp.at });
            }
        }
    }
    report
}

enum Side {
    /// Branch side of `C − C(ℓ,j)`.
    Near,
    /// The far part of leg ℓ.
    Far,
}

fn side_of(c: CVertex, cut: CVertex) -> Side {
    let CVertex::Leg { leg, j } = cut else { unreachable!("reversal points sit on a leg") };
    match c {
        CVertex::Leg { leg: l, j: jj } if l == leg && jj > j => Side::Far,
        _ => Side::Near,
    }
}

/// The component-confinement observation: all of `f(w₁..w_k)` lies in one
/// component of `C − f(w₀)`, and all of `f(w₀..w_{k−1})` in one component of
/// `C − f(w_k)`.
pub fn check_component_confinement(
    pattern: &WrappingPattern,
    f: &BTreeMap<VertexId, CVertex>,
) -> bool {
    let Ok(c) = images(pattern, f) else { return false };
    let k = pattern.k();
    let confined = |removed: CVertex, rest: &[CVertex]| -> bool {
        let inside: Vec<CVertex> = rest.iter().copied().filter(|&x| x != removed).collect();
        inside.windows(2).all(|w| w[0].same_component_without(w[1], removed))
    };
    confined(c[0], &c[1..]) && confined(c[k], &c[..k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combcover::check_cover;
    use crate::fixtures::figure3;
    use crate::graphword::{Graph, Marking};
    use crate::ratio;

    fn vid(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn figure3_detected_as_single_maximal_pattern() {
        let (pg, _) = figure3();
        let pats = detect_wrapping_patterns(&pg, DetectScope::Maximal);
        assert_eq!(pats.len(), 1);
        assert_eq!(pats[0].k(), 16);
        assert_eq!(pats[0].vertices[0], vid(0));
        let with_subs = detect_wrapping_patterns(&pg, DetectScope::WithAlignedSubpatterns);
        assert_eq!(with_subs.len(), 3); // k=16 plus the two aligned k=8 halves
    }

    #[test]
    fn non_advancing_path_has_no_pattern() {
        let marks: Vec<Marking> = (0..9)
            .map(|i| if i % 2 == 0 { Marking::ray(0, ratio(1, 2)) } else { Marking::Origin })
            .collect();
        let graph =
            Graph::from_parts((0..9).map(vid), (0..8).map(|i| (vid(i), vid(i + 1)))).unwrap();
        let omega = marks.into_iter().enumerate().map(|(i, m)| (vid(i as u32), m)).collect();
        let pg = PlacedGraph::new(graph, 2, omega);
        assert!(detect_wrapping_patterns(&pg, DetectScope::Maximal).is_empty());
    }

    #[test]
    fn figure3_classifies_across() {
        let (pg, f) = figure3();
        let pats = detect_wrapping_patterns(&pg, DetectScope::Maximal);
        match classify(&pg, &pats[0], &f).unwrap() {
            PatternClass::Across { leg1, leg2, j1, j2, trajectory } => {
                assert_eq!((leg1, leg2, j1, j2), (3, 1, 5, 9));
                assert_eq!(trajectory.vertices, (4..=8).map(vid).collect::<Vec<_>>());
                assert_eq!(trajectory.legs, vec![3, 2, 1]);
            }
            other => panic!("expected across, got {other}"),
        }
    }

    #[test]
    fn literal_away_and_toward() {
        let (pg, _) = figure3();
        let pattern = WrappingPattern { vertices: (0..=16).map(vid).collect() };
        let away: BTreeMap<VertexId, CVertex> =
            (0..=16).map(|p| (vid(p), CVertex::leg(1, p + 2))).collect();
        assert_eq!(classify(&pg, &pattern, &away).unwrap(), PatternClass::Away { leg: 1, j: 2 });
        let toward: BTreeMap<VertexId, CVertex> =
            (0..=16).map(|p| (vid(p), CVertex::leg(2, 16 + 3 - p))).collect();
        assert_eq!(
            classify(&pg, &pattern, &toward).unwrap(),
            PatternClass::Toward { leg: 2, j: 19 }
        );
    }

    #[test]
    fn figure3_pre_branch_star_segment() {
        let (pg, f) = figure3();
        let pats = detect_wrapping_patterns(&pg, DetectScope::Maximal);
        let seg = pre_branch_star_segment(&pats[0], &f).unwrap();
        assert_eq!(seg, (0..4).map(vid).collect::<Vec<_>>());
        assert_eq!(count_istar_marks(&pg, &seg, 1), 1);
        assert_eq!(count_istar_marks(&pg, &seg, 0), 1);
    }

    #[test]
    fn pattern_starting_at_branch_has_empty_segment() {
        let (pg, _) = figure3();
        let pattern = WrappingPattern { vertices: (0..=16).map(vid).collect() };
        let no_branch: BTreeMap<VertexId, CVertex> =
            (0..=16).map(|p| (vid(p), CVertex::leg(1, p + 1))).collect();
        assert_eq!(
            pre_branch_star_segment(&pattern, &no_branch),
            Err(WrappingError::DoesNotMeetBranch)
        );
        let from_branch: BTreeMap<VertexId, CVertex> = (0..=16)
            .map(|p| (vid(p), if p == 0 { CVertex::Branch } else { CVertex::leg(1, p) }))
            .collect();
        assert_eq!(
            pre_branch_star_segment(&pattern, &from_branch).unwrap(),
            Vec::<VertexId>::new()
        );
        let _ = pg;
    }

    #[test]
    fn identical_patterns_make_no_reversal_point() {
        let (_, f) = figure3();
        let p = WrappingPattern { vertices: (0..=16).map(vid).collect() };
        assert!(find_reversal_points(&[p.clone(), p], &f).is_empty());
    }

    /// Two k=6 patterns (n=2) sharing f(w₀)=C(1,3): one goes away, the other
    /// across. Start-type reversal at C(1,3).
    #[test]
    fn synthetic_start_type_reversal() {
        let pa = WrappingPattern { vertices: (0..=6).map(vid).collect() };
        let pb = WrappingPattern { vertices: (0..=6).map(|p| vid(100 + p)).collect() };
        let mut f = BTreeMap::new();
        for p in 0..=6u32 {
            f.insert(vid(p), CVertex::leg(1, 3 + p));
        }
        let b_imgs = [
            CVertex::leg(1, 3),
            CVertex::leg(1, 2),
            CVertex::leg(1, 1),
            CVertex::Branch,
            CVertex::leg(2, 1),
            CVertex::leg(2, 2),
            CVertex::leg(2, 3),
        ];
        for (p, &c) in b_imgs.iter().enumerate() {
            f.insert(vid(100 + p as u32), c);
        }
        let points = find_reversal_points(&[pa, pb], &f);
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].at, CVertex::leg(1, 3));
        assert_eq!(points[0].kind, ReversalKind::Start);
    }

    #[test]
    fn single_pattern_complex_is_clean() {
        let (pg, f) = figure3();
        let pats = detect_wrapping_patterns(&pg, DetectScope::Maximal);
        let complex = build_complex(pats, &f).unwrap();
        assert_eq!(complex.patterns.len(), 1);
        let istar = crate::combcover::find_istar(&pg, &f).unwrap();
        let report = verify_complex_sync(&pg, &complex, &f, istar);
        assert!(report.is_clean(), "{:?}", report.violations);
    }

    #[test]
    fn disjoint_patterns_fail_complex_build() {
        let (_, f0) = figure3();
        let pa = WrappingPattern { vertices: (0..=16).map(vid).collect() };
        let mut f = f0.clone();
        let pb = WrappingPattern { vertices: (0..=16).map(|p| vid(200 + p)).collect() };
        for p in 0..=16u32 {
            f.insert(vid(200 + p), CVertex::leg(2, 40 + p));
        }
        assert!(matches!(build_complex(vec![pa, pb], &f), Err(WrappingError::Disconnected)));
    }

    #[test]
    fn component_confinement_on_figure3() {
        let (_, f) = figure3();
        let pat = WrappingPattern { vertices: (0..=16).map(vid).collect() };
        assert!(check_component_confinement(&pat, &f));
    }

    #[test]
    fn figure3_cover_is_valid_fixture() {
        let (pg, f) = figure3();
        assert!(check_cover(&pg, &f, &ratio(1, 4)).is_empty());
    }
}
