//! Finite graphs, n-od leg addressing, the marking alphabet Γ, placement
//! functions, and the (nonstandard) vertex/edge removal rules.
//!
//! Vertex ids are opaque integers; no geometric data lives here.  All values
//! are immutable after construction and safe to share among threads.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::Rational;

/// Opaque vertex identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A symbolic element of Γ: the origin mark `o`, or a ray mark `b(leg, t)`
/// with `leg` in `0..=n` and exact rational `t` in `[0,1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Marking {
    Origin,
    Ray { leg: u32, t: Rational },
}

impl Marking {
    pub fn ray(leg: u32, t: Rational) -> Self {
        Marking::Ray { leg, t }
    }

    pub fn is_origin(&self) -> bool {
        matches!(self, Marking::Origin)
    }

    /// Ray leg index, if this is a ray mark.
    pub fn ray_leg(&self) -> Option<u32> {
        match self {
            Marking::Origin => None,
            Marking::Ray { leg, .. } => Some(*leg),
        }
    }

    pub fn ray_t(&self) -> Option<&Rational> {
        match self {
            Marking::Origin => None,
            Marking::Ray { t, .. } => Some(t),
        }
    }

    /// Checks leg and parameter ranges for ambient `n`.
    pub fn in_range(&self, n: u32) -> bool {
        match self {
            Marking::Origin => true,
            Marking::Ray { leg, t } => {
                *leg <= n && !t.is_negative() && *t <= Rational::one()
            }
        }
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marking::Origin => write!(f, "o"),
            Marking::Ray { leg, t } => write!(f, "b({leg},{t})"),
        }
    }
}

trait IsNegative {
    fn is_negative(&self) -> bool;
}

impl IsNegative for Rational {
    fn is_negative(&self) -> bool {
        self < &Rational::zero()
    }
}

/// An undirected finite graph without self-loops or duplicate edges.
///
/// Isolated vertices are allowed (vertex removal can create them).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at {0}")]
    SelfLoop(VertexId),
    #[error("vertex {0} not present")]
    VertexNotPresent(VertexId),
    #[error("edge {{{0},{1}}} not present")]
    EdgeNotPresent(VertexId, VertexId),
}

impl Graph {
    pub fn new() -> Self {
        Graph { adj: BTreeMap::new() }
    }

    /// Build a graph from vertex ids and unordered edge pairs.
    pub fn from_parts<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut g = Graph::new();
        for v in vertices {
            g.add_vertex(v);
        }
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: VertexId) {
        self.adj.entry(v).or_default();
    }

    /// Adds an edge, inserting endpoints as needed. Duplicate edges collapse.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn contains_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj.get(&u).is_some_and(|s| s.contains(&v))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    /// Edges as ordered pairs (u < v), in deterministic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, nbrs)| nbrs.iter().copied().filter(move |&v| u < v).map(move |v| (u, v)))
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, |s| s.len())
    }

    pub fn is_connected(&self) -> bool {
        let mut it = self.adj.keys();
        let Some(&start) = it.next() else { return true };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.adj.len()
    }

    /// Whether the graph is a tree (connected, |E| = |V| - 1).
    pub fn is_tree(&self) -> bool {
        !self.adj.is_empty()
            && self.is_connected()
            && self.edge_count() + 1 == self.vertex_count()
    }

    /// Subgraph generated by `V(G) \ {v}`.  Incident edges are dropped;
    /// every other vertex stays, even if it ends up isolated.
    pub fn remove_vertex(&self, v: VertexId) -> Result<Graph, GraphError> {
        if !self.contains_vertex(v) {
            return Err(GraphError::VertexNotPresent(v));
        }
        let mut adj = BTreeMap::new();
        for (&u, nbrs) in &self.adj {
            if u == v {
                continue;
            }
            let filtered: BTreeSet<VertexId> = nbrs.iter().copied().filter(|&w| w != v).collect();
            adj.insert(u, filtered);
        }
        Ok(Graph { adj })
    }

    /// Removes the edge `{u,v}`, and drops an endpoint iff that edge was the
    /// only one connected to it.
    pub fn remove_edge(&self, u: VertexId, v: VertexId) -> Result<Graph, GraphError> {
        if !self.contains_edge(u, v) {
            return Err(GraphError::EdgeNotPresent(u, v));
        }
        let mut g = self.clone();
        g.adj.get_mut(&u).unwrap().remove(&v);
        g.adj.get_mut(&v).unwrap().remove(&u);
        if g.adj[&u].is_empty() {
            g.adj.remove(&u);
        }
        if g.adj[&v].is_empty() {
            g.adj.remove(&v);
        }
        Ok(g)
    }
}

impl Default for Graph {
    fn default() -> Self {
        Graph::new()
    }
}

/// Address of a vertex inside an m-od graph: `(leg, index)` with index
/// counted outward from the branch; index 0 denotes the branch for any leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NOdAddress {
    pub leg: u32,
    pub index: u32,
}

/// The full address map of an m-od (or arc) graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NOdMap {
    /// The vertex playing the role of `G(·,0)`.
    pub branch: VertexId,
    /// Leg ℓ (1-based) is `legs[ℓ-1]`, ordered from the branch outward.
    pub legs: Vec<Vec<VertexId>>,
    /// True when the graph has no vertex of degree ≥ 3 (arc / 2-od case).
    pub is_arc: bool,
}

impl NOdMap {
    pub fn leg_count(&self) -> usize {
        self.legs.len()
    }

    pub fn vertex_at(&self, addr: NOdAddress) -> Option<VertexId> {
        if addr.index == 0 {
            return Some(self.branch);
        }
        self.legs
            .get((addr.leg as usize).checked_sub(1)?)
            .and_then(|leg| leg.get(addr.index as usize - 1))
            .copied()
    }

    pub fn address_of(&self, v: VertexId) -> Option<NOdAddress> {
        if v == self.branch {
            return Some(NOdAddress { leg: 1, index: 0 });
        }
        for (i, leg) in self.legs.iter().enumerate() {
            if let Some(j) = leg.iter().position(|&w| w == v) {
                return Some(NOdAddress { leg: i as u32 + 1, index: j as u32 + 1 });
            }
        }
        None
    }

    /// All vertices covered by the addressing (branch plus legs).
    pub fn all_vertices(&self) -> BTreeSet<VertexId> {
        let mut out: BTreeSet<VertexId> = self.legs.iter().flatten().copied().collect();
        out.insert(self.branch);
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NOdError {
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph has {0} vertices of degree >= 3; an n-od graph has exactly one")]
    MultipleBranches(usize),
    #[error("vertex of degree {0} >= 3 found together with other branch-like structure")]
    Malformed(usize),
    #[error("graph is empty")]
    Empty,
}

/// Recognizes an m-od (or arc) graph and addresses its vertices by leg.
///
/// Exactly one vertex of degree ≥ 3 yields an m-od with that vertex as the
/// branch.  With no such vertex the graph is a path (arc / 2-od); the branch
/// role is then given to the middle vertex of the path (nearer endpoint with
/// the smaller id breaks the tie), so paths address as 2-ods.  Legs are
/// enumerated by the smallest vertex id they contain.
pub fn as_nod(graph: &Graph) -> Result<NOdMap, NOdError> {
    if graph.vertex_count() == 0 {
        return Err(NOdError::Empty);
    }
    if !graph.is_connected() {
        return Err(NOdError::NotConnected);
    }
    let branch_candidates: Vec<VertexId> =
        graph.vertices().filter(|&v| graph.degree(v) >= 3).collect();
    let (branch, is_arc) = match branch_candidates.len() {
        0 => (arc_midpoint(graph), true),
        1 => (branch_candidates[0], false),
        k => return Err(NOdError::MultipleBranches(k)),
    };
    // Walk each leg from the branch outward. Non-branch vertices must have
    // degree 1 or 2 for the addressing to be a bijection.
    let mut legs: Vec<Vec<VertexId>> = Vec::new();
    for first in graph.neighbors(branch) {
        let mut leg = vec![first];
        let mut prev = branch;
        let mut cur = first;
        loop {
            if cur != branch && graph.degree(cur) >= 3 {
                return Err(NOdError::Malformed(graph.degree(cur)));
            }
            let next: Vec<VertexId> = graph.neighbors(cur).filter(|&w| w != prev).collect();
            match next.len() {
                0 => break,
                1 => {
                    prev = cur;
                    cur = next[0];
                    if cur == branch {
                        // Cycle back to the branch: not a tree shape.
                        return Err(NOdError::Malformed(graph.degree(branch)));
                    }
                    leg.push(cur);
                }
                _ => return Err(NOdError::Malformed(next.len() + 1)),
            }
        }
        legs.push(leg);
    }
    legs.sort_by_key(|leg| leg.iter().min().copied());
    let map = NOdMap { branch, legs, is_arc };
    debug_assert_eq!(map.all_vertices().len(), graph.vertex_count());
    Ok(map)
}

/// Middle vertex of a path graph, deterministic.
fn arc_midpoint(graph: &Graph) -> VertexId {
    if graph.vertex_count() == 1 {
        return graph.vertices().next().unwrap();
    }
    let endpoints: Vec<VertexId> = graph.vertices().filter(|&v| graph.degree(v) == 1).collect();
    debug_assert_eq!(endpoints.len(), 2, "connected, no deg>=3, >1 vertex: must be a path");
    let start = *endpoints.iter().min().unwrap();
    // Walk the path, take the floor-middle vertex.
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = start;
    loop {
        let next = graph.neighbors(cur).find(|&w| w != prev);
        match next {
            Some(w) => {
                prev = cur;
                cur = w;
                order.push(cur);
            }
            None => break,
        }
    }
    order[(order.len() - 1) / 2]
}

/// A symbolic vertex of the infinite n-od `C`: the branch `C(·,0)` or a leg
/// vertex `C(ℓ,j)` with ℓ ≥ 1, j ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CVertex {
    Branch,
    Leg { leg: u32, j: u32 },
}

impl CVertex {
    pub fn leg(leg: u32, j: u32) -> Self {
        debug_assert!(leg >= 1 && j >= 1);
        CVertex::Leg { leg, j }
    }

    /// Adjacency in C: Branch ↔ C(ℓ,1); C(ℓ,j) ↔ C(ℓ,j+1); nothing else.
    pub fn adjacent(self, other: CVertex) -> bool {
        match (self, other) {
            (CVertex::Branch, CVertex::Leg { j, .. })
            | (CVertex::Leg { j, .. }, CVertex::Branch) => j == 1,
            (CVertex::Leg { leg: l1, j: j1 }, CVertex::Leg { leg: l2, j: j2 }) => {
                l1 == l2 && j1.abs_diff(j2) == 1
            }
            (CVertex::Branch, CVertex::Branch) => false,
        }
    }

    /// The branch-star of C: the branch together with the first vertex of
    /// each leg.
    pub fn in_branch_star(self) -> bool {
        match self {
            CVertex::Branch => true,
            CVertex::Leg { j, .. } => j == 1,
        }
    }

    /// Distance to the branch along C.
    pub fn depth(self) -> u32 {
        match self {
            CVertex::Branch => 0,
            CVertex::Leg { j, .. } => j,
        }
    }

    /// Whether `self` and `other` lie in the same component of `C - removed`.
    ///
    /// `C - C(ℓ,j)` has two components (the far part of leg ℓ, and everything
    /// else); `C - Branch` has one component per leg.  Panics if either
    /// vertex equals `removed`.
    pub fn same_component_without(self, other: CVertex, removed: CVertex) -> bool {
        assert!(self != removed && other != removed);
        match removed {
            CVertex::Branch => match (self, other) {
                (CVertex::Leg { leg: l1, .. }, CVertex::Leg { leg: l2, .. }) => l1 == l2,
                _ => unreachable!("branch was removed"),
            },
            CVertex::Leg { leg, j } => {
                let far = |v: CVertex| matches!(v, CVertex::Leg { leg: l, j: jj } if l == leg && jj > j);
                far(self) == far(other)
            }
        }
    }
}

impl fmt::Display for CVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CVertex::Branch => write!(f, "C(.,0)"),
            CVertex::Leg { leg, j } => write!(f, "C({leg},{j})"),
        }
    }
}

/// A finite graph together with an ambient `n` and a placement function
/// `ω : V(G) → Γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedGraph {
    pub graph: Graph,
    pub n: u32,
    pub omega: BTreeMap<VertexId, Marking>,
}

/// A single violation of the placement alternation rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlacementViolation {
    /// Vertex has no mark assigned.
    MissingMark(VertexId),
    /// Mark out of range for the ambient n (leg > n or t outside [0,1]).
    MarkOutOfRange(VertexId),
    /// Edge whose endpoints do not alternate origin/ray.
    NoAlternation(VertexId, VertexId),
}

impl fmt::Display for PlacementViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlacementViolation::MissingMark(v) => write!(f, "vertex {v} has no mark"),
            PlacementViolation::MarkOutOfRange(v) => write!(f, "mark of {v} out of range"),
            PlacementViolation::NoAlternation(u, v) => {
                write!(f, "edge {{{u},{v}}} does not alternate o/ray")
            }
        }
    }
}

impl PlacedGraph {
    pub fn new(graph: Graph, n: u32, omega: BTreeMap<VertexId, Marking>) -> Self {
        PlacedGraph { graph, n, omega }
    }

    pub fn mark(&self, v: VertexId) -> &Marking {
        &self.omega[&v]
    }

    /// Checks that every edge has exactly one Origin endpoint and one Ray
    /// endpoint, and that all marks are present and in range.
    /// Empty result means valid.
    pub fn validate_placement(&self) -> Vec<PlacementViolation> {
        let mut out = Vec::new();
        for v in self.graph.vertices() {
            match self.omega.get(&v) {
                None => out.push(PlacementViolation::MissingMark(v)),
                Some(m) if !m.in_range(self.n) => {
                    out.push(PlacementViolation::MarkOutOfRange(v))
                }
                _ => {}
            }
        }
        for (u, v) in self.graph.edges() {
            let (Some(mu), Some(mv)) = (self.omega.get(&u), self.omega.get(&v)) else {
                continue;
            };
            if mu.is_origin() == mv.is_origin() {
                out.push(PlacementViolation::NoAlternation(u, v));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate_placement().is_empty()
    }
}

/// The simple (n+1)-od star with center marked `o` and the tip of each leg i
/// marked `b(i,1)`: the base case of the no-cover argument.
pub fn star_iota(n: u32) -> PlacedGraph {
    let center = VertexId(0);
    let mut graph = Graph::new();
    let mut omega = BTreeMap::new();
    omega.insert(center, Marking::Origin);
    for i in 0..=n {
        let tip = VertexId(i + 1);
        graph.add_edge(center, tip).unwrap();
        omega.insert(tip, Marking::ray(i, Rational::one()));
    }
    PlacedGraph::new(graph, n, omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn vid(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn star_iota_is_valid() {
        for n in 2..=4 {
            let pg = star_iota(n);
            assert!(pg.validate_placement().is_empty());
            assert_eq!(pg.graph.vertex_count() as u32, n + 2);
        }
    }

    #[test]
    fn alternation_violations_detected() {
        let g = Graph::from_parts([vid(0), vid(1)], [(vid(0), vid(1))]).unwrap();
        let both_origin = PlacedGraph::new(
            g.clone(),
            2,
            BTreeMap::from([(vid(0), Marking::Origin), (vid(1), Marking::Origin)]),
        );
        assert_eq!(both_origin.validate_placement().len(), 1);

        let both_ray = PlacedGraph::new(
            g,
            2,
            BTreeMap::from([
                (vid(0), Marking::ray(0, ratio(1, 1))),
                (vid(1), Marking::ray(1, ratio(1, 1))),
            ]),
        );
        assert_eq!(both_ray.validate_placement().len(), 1);
    }

    #[test]
    fn mark_range_checked() {
        let g = Graph::from_parts([vid(0)], []).unwrap();
        let pg = PlacedGraph::new(
            g,
            2,
            BTreeMap::from([(vid(0), Marking::ray(3, ratio(1, 2)))]),
        );
        assert_eq!(pg.validate_placement().len(), 1);
    }

    #[test]
    fn as_nod_on_star() {
        let pg = star_iota(3);
        let map = as_nod(&pg.graph).unwrap();
        assert!(!map.is_arc);
        assert_eq!(map.branch, vid(0));
        assert_eq!(map.leg_count(), 4);
        assert!(map.legs.iter().all(|l| l.len() == 1));
    }

    #[test]
    fn as_nod_on_path() {
        let g = Graph::from_parts(
            (0..5).map(vid),
            (0..4).map(|i| (vid(i), vid(i + 1))),
        )
        .unwrap();
        let map = as_nod(&g).unwrap();
        assert!(map.is_arc);
        assert_eq!(map.leg_count(), 2);
        assert_eq!(map.all_vertices().len(), 5);
    }

    #[test]
    fn as_nod_rejects_two_branch_vertices() {
        // "H" shape: two degree-3 vertices joined by an edge.
        let mut g = Graph::new();
        g.add_edge(vid(0), vid(1)).unwrap();
        g.add_edge(vid(0), vid(2)).unwrap();
        g.add_edge(vid(0), vid(3)).unwrap();
        g.add_edge(vid(3), vid(4)).unwrap();
        g.add_edge(vid(3), vid(5)).unwrap();
        assert_eq!(as_nod(&g), Err(NOdError::MultipleBranches(2)));
    }

    #[test]
    fn as_nod_rejects_disconnected() {
        let g = Graph::from_parts([vid(0), vid(1)], []).unwrap();
        assert_eq!(as_nod(&g), Err(NOdError::NotConnected));
    }

    #[test]
    fn address_round_trip() {
        let pg = star_iota(3);
        let map = as_nod(&pg.graph).unwrap();
        for v in pg.graph.vertices() {
            let addr = map.address_of(v).unwrap();
            assert_eq!(map.vertex_at(addr), Some(v));
        }
    }

    #[test]
    fn remove_edge_drops_leaf_endpoint() {
        let pg = star_iota(2);
        let g = pg.graph.remove_edge(vid(0), vid(1)).unwrap();
        assert!(!g.contains_vertex(vid(1)));
        assert!(g.contains_vertex(vid(0)));
        assert_eq!(g.vertex_count(), 3);
    }

    #[test]
    fn remove_edge_keeps_interior_endpoints() {
        let g = Graph::from_parts(
            (0..4).map(vid),
            (0..3).map(|i| (vid(i), vid(i + 1))),
        )
        .unwrap();
        let h = g.remove_edge(vid(1), vid(2)).unwrap();
        assert!(h.contains_vertex(vid(1)));
        assert!(h.contains_vertex(vid(2)));
        assert_eq!(h.edge_count(), 2);
        assert!(!h.is_connected());
    }

    #[test]
    fn remove_vertex_keeps_isolated_leaves() {
        let pg = star_iota(3);
        let g = pg.graph.remove_vertex(vid(0)).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 0);
        assert!(!g.is_connected());
    }

    #[test]
    fn removal_errors() {
        let g = Graph::from_parts([vid(0), vid(1)], [(vid(0), vid(1))]).unwrap();
        assert!(g.remove_vertex(vid(9)).is_err());
        assert!(g.remove_edge(vid(0), vid(9)).is_err());
    }

    /// Enumerate all connected labeled graphs on `n` vertices.
    fn connected_graphs(n: u32) -> Vec<Graph> {
        let pairs: Vec<(u32, u32)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut out = Vec::new();
        for mask in 0u64..(1 << pairs.len()) {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &(i, j))| (vid(i), vid(j)));
            let g = Graph::from_parts((0..n).map(vid), edges).unwrap();
            if g.is_connected() {
                out.push(g);
            }
        }
        out
    }

    #[test]
    fn two_removable_vertices_keep_connectivity() {
        // Exhaustive on small orders; larger orders are sampled in the
        // integration suite.
        for n in 2..=5 {
            for g in connected_graphs(n) {
                let ok = g
                    .vertices()
                    .filter(|&v| g.remove_vertex(v).unwrap().is_connected())
                    .count();
                assert!(ok >= 2, "graph with {} vertices had {} removable", n, ok);
            }
        }
    }

    #[test]
    fn one_removable_edge_keeps_connectivity() {
        for n in 2..=5 {
            for g in connected_graphs(n) {
                if g.edge_count() == 0 {
                    continue;
                }
                let ok = g
                    .edges()
                    .filter(|&(u, v)| g.remove_edge(u, v).unwrap().is_connected())
                    .count();
                assert!(ok >= 1);
            }
        }
    }

    #[test]
    fn cvertex_adjacency() {
        let b = CVertex::Branch;
        let l11 = CVertex::leg(1, 1);
        let l12 = CVertex::leg(1, 2);
        let l21 = CVertex::leg(2, 1);
        assert!(b.adjacent(l11));
        assert!(l11.adjacent(l12));
        assert!(!l11.adjacent(l21));
        assert!(!b.adjacent(l12));
        assert!(!b.adjacent(b));
    }

    #[test]
    fn cvertex_components() {
        let cut = CVertex::leg(1, 3);
        assert!(CVertex::leg(1, 4).same_component_without(CVertex::leg(1, 9), cut));
        assert!(!CVertex::leg(1, 4).same_component_without(CVertex::leg(1, 2), cut));
        assert!(CVertex::leg(1, 2).same_component_without(CVertex::leg(2, 5), cut));
        assert!(CVertex::Branch.same_component_without(CVertex::leg(2, 1), cut));
        assert!(!CVertex::leg(1, 1).same_component_without(CVertex::leg(2, 1), CVertex::Branch));
        assert!(CVertex::leg(2, 1).same_component_without(CVertex::leg(2, 7), CVertex::Branch));
    }
}
