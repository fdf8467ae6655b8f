//! The χ-expansion substitution on placed graphs, and the descent of covers
//! from the expanded graph back to the original.
//!
//! An expansion word is an (n+1)-od placed graph whose branch mark is not
//! `o` and whose endpoints are marked `b(i(e),1)`.  Expanding a placed graph
//! substitutes, for every edge `{u,v}` with `ω(u)=o`, `ω(v)=b(i,t)`, the
//! whole leg `i` of the word: the origin endpoint is re-marked with the
//! word's branch mark, the interior picks up the leg's marks, and the ray
//! endpoint is re-marked `b(i(e),t)` for the leg's endpoint index `i(e)`.
//!
//! The module is purely combinatorial; the geometric half of expansion lives
//! in the geometry module.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::combcover::{check_cover, CombCover, CoverViolation};
use crate::graphword::{as_nod, CVertex, Graph, Marking, PlacedGraph, VertexId};
use crate::Rational;

/// An (n+1)-od placed graph usable as a substitution word.
///
/// `legs[i]` is Γ-leg `i` of the word, branch excluded, ordered outward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionWord {
    pub pg: PlacedGraph,
    pub branch: VertexId,
    pub legs: Vec<Vec<VertexId>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("word graph is not an (n+1)-od: {0}")]
    NotAnNOd(String),
    #[error("word placement function is invalid")]
    InvalidPlacement,
    #[error("word branch must not be marked o")]
    BranchMarkedOrigin,
    #[error("endpoint of leg {0} must be marked b(i,1)")]
    EndpointNotTipMark(usize),
}

impl ExpansionWord {
    /// Wraps an (n+1)-od placed graph, taking Γ-leg `i` to be the i-th leg in
    /// the canonical addressing (legs ordered by smallest vertex id).
    pub fn new(pg: PlacedGraph) -> Result<Self, WordError> {
        let map = as_nod(&pg.graph).map_err(|e| WordError::NotAnNOd(e.to_string()))?;
        let word = ExpansionWord { branch: map.branch, legs: map.legs, pg };
        word.validate()?;
        Ok(word)
    }

    pub fn validate(&self) -> Result<(), WordError> {
        let n = self.pg.n;
        if !self.pg.is_valid() {
            return Err(WordError::InvalidPlacement);
        }
        if self.legs.len() != n as usize + 1 {
            return Err(WordError::NotAnNOd(format!(
                "{} legs, expected {}",
                self.legs.len(),
                n + 1
            )));
        }
        if self.pg.mark(self.branch).is_origin() {
            return Err(WordError::BranchMarkedOrigin);
        }
        for (i, leg) in self.legs.iter().enumerate() {
            let Some(&end) = leg.last() else {
                return Err(WordError::NotAnNOd(format!("leg {i} is empty")));
            };
            let mark = self.pg.mark(end);
            let tip = mark.ray_leg().is_some()
                && mark.ray_t().map(|t| t == &Rational::from_integer(1.into())) == Some(true);
            if !tip {
                return Err(WordError::EndpointNotTipMark(i));
            }
        }
        Ok(())
    }

    /// Number of vertices on leg `i`, branch excluded (the chain length κ).
    pub fn kappa(&self, i: u32) -> usize {
        self.legs[i as usize].len()
    }

    /// The index `i(e)` with `χ(e) = b(i(e),1)` for the endpoint of leg `i`.
    pub fn endpoint_index(&self, i: u32) -> u32 {
        let end = *self.legs[i as usize].last().unwrap();
        self.pg.mark(end).ray_leg().unwrap()
    }

    /// Mark of `G_χ(i,p)`; p = 0 is the branch.
    pub fn mark_at(&self, i: u32, p: usize) -> &Marking {
        if p == 0 {
            self.pg.mark(self.branch)
        } else {
            self.pg.mark(self.legs[i as usize][p - 1])
        }
    }
}

/// Result of a χ-expansion: the subdivided placed graph plus per-edge
/// provenance.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub original: PlacedGraph,
    pub expanded: PlacedGraph,
    /// Per original edge `(u, v)` with `ω(u) = o`: the chain `z₀..z_κ`,
    /// where `z₀ = u` and `z_κ = v`.
    pub chains: BTreeMap<(VertexId, VertexId), Vec<VertexId>>,
    /// Vertices of the expanded graph not present in the original.
    pub inserted: BTreeSet<VertexId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpansionError {
    #[error("invalid word: {0}")]
    InvalidWord(#[from] WordError),
    #[error("input placement function is invalid")]
    InvalidPlacement,
    #[error("input graph must have at least one edge")]
    Degenerate,
    #[error("ambient n mismatch between graph ({0}) and word ({1})")]
    MismatchedN(u32, u32),
}

impl Expansion {
    /// True for vertices inherited from the original graph.
    pub fn is_original(&self, v: VertexId) -> bool {
        !self.inserted.contains(&v)
    }
}

/// Expands every edge of `pg` by the word, exactly once.
///
/// The placement alternation makes the `o` endpoint of each edge unique, so
/// the substitution orientation is forced.  Inserted vertex ids are
/// allocated deterministically from (edge index, position), so expansions
/// are reproducible.
pub fn chi_expand(pg: &PlacedGraph, word: &ExpansionWord) -> Result<Expansion, ExpansionError> {
    word.validate()?;
    if !pg.is_valid() {
        return Err(ExpansionError::InvalidPlacement);
    }
    if pg.graph.edge_count() == 0 {
        return Err(ExpansionError::Degenerate);
    }
    if pg.n != word.pg.n {
        return Err(ExpansionError::MismatchedN(pg.n, word.pg.n));
    }

    let max_kappa = (0..=pg.n).map(|i| word.kappa(i)).max().unwrap();
    let base = pg.graph.vertices().map(|v| v.0).max().unwrap() + 1;
    let mut graph = Graph::new();
    let mut omega: BTreeMap<VertexId, Marking> = BTreeMap::new();
    let mut chains = BTreeMap::new();
    let mut inserted = BTreeSet::new();

    for (edge_idx, (a, b)) in pg.graph.edges().enumerate() {
        let (u, v) = if pg.mark(a).is_origin() { (a, b) } else { (b, a) };
        let Marking::Ray { leg: i, t } = pg.mark(v).clone() else { unreachable!() };
        let kappa = word.kappa(i);
        let mut chain = Vec::with_capacity(kappa + 1);
        chain.push(u);
        for p in 1..kappa {
            let z = VertexId(base + (edge_idx * max_kappa + (p - 1)) as u32);
            inserted.insert(z);
            chain.push(z);
        }
        chain.push(v);
        for w in chain.windows(2) {
            graph.add_edge(w[0], w[1]).expect("chain ids are fresh");
        }
        // ω⁺ along the chain: word marks for p < κ, re-marked ray endpoint.
        for (p, &z) in chain.iter().enumerate().take(kappa) {
            omega.insert(z, word.mark_at(i, p).clone());
        }
        omega.insert(v, Marking::ray(word.endpoint_index(i), t));
        chains.insert((u, v), chain);
    }

    let expanded = PlacedGraph::new(graph, pg.n, omega);
    debug_assert!(expanded.is_valid());
    Ok(Expansion { original: pg.clone(), expanded, chains, inserted })
}

/// Contracts every inserted chain back to a single edge; the result must be
/// the original graph.
pub fn contract(exp: &Expansion) -> Graph {
    let mut g = Graph::new();
    for v in exp.original.graph.vertices() {
        g.add_vertex(v);
    }
    for (u, v) in exp.chains.keys() {
        g.add_edge(*u, *v).unwrap();
    }
    g
}

/// How a coincident pair under `f⁺` is classified by the descent condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    /// Both original, both marked `o` by the original ω.
    OriginalOrigins,
    /// Both original, rays on one leg of Γ under the original ω.
    OriginalSameLeg,
    /// Both inserted.
    BothInserted,
    /// None of the three alternatives.
    Violating,
}

/// Report of the descent-condition check.
#[derive(Debug, Clone, Default)]
pub struct DescentReport {
    /// Pairs with equal `f⁺` falling outside alternatives A/B/C.
    pub violating_pairs: Vec<(VertexId, VertexId)>,
    /// Violations of the cover axioms by `f⁺` itself on the expanded graph.
    pub cover_violations: Vec<CoverViolation>,
}

impl DescentReport {
    pub fn passes(&self) -> bool {
        self.violating_pairs.is_empty() && self.cover_violations.is_empty()
    }
}

fn classify_pair(exp: &Expansion, u: VertexId, v: VertexId) -> PairClass {
    match (exp.is_original(u), exp.is_original(v)) {
        (true, true) => {
            let (mu, mv) = (exp.original.mark(u), exp.original.mark(v));
            if mu.is_origin() && mv.is_origin() {
                PairClass::OriginalOrigins
            } else if mu.ray_leg().is_some() && mu.ray_leg() == mv.ray_leg() {
                PairClass::OriginalSameLeg
            } else {
                PairClass::Violating
            }
        }
        (false, false) => PairClass::BothInserted,
        _ => PairClass::Violating,
    }
}

/// Classifies every coincident pair of `f⁺` into A (original origins),
/// B (original rays on one leg), or C (both inserted), and reports the rest.
pub fn check_descent_condition(
    exp: &Expansion,
    fplus: &BTreeMap<VertexId, CVertex>,
    delta: &Rational,
) -> DescentReport {
    let mut report = DescentReport {
        violating_pairs: Vec::new(),
        cover_violations: check_cover(&exp.expanded, fplus, delta),
    };
    let mut fibers: BTreeMap<CVertex, Vec<VertexId>> = BTreeMap::new();
    for (&v, &c) in fplus {
        fibers.entry(c).or_default().push(v);
    }
    for group in fibers.values() {
        for (a, &u) in group.iter().enumerate() {
            for &v in &group[a + 1..] {
                if classify_pair(exp, u, v) == PairClass::Violating {
                    report.violating_pairs.push((u, v));
                }
            }
        }
    }
    report
}

#[derive(Debug, Error)]
pub enum DescentError {
    #[error("descent condition violated by {} pairs", .0.violating_pairs.len())]
    ConditionViolated(DescentReport),
}

/// Descends a cover of the expanded graph to a cover of the original.
///
/// Follows the fiber construction: `C^V` is the image of the original
/// vertices, `S` the branch fiber (the branch itself if hit, otherwise the
/// lowest origin-class images per leg), and `f(u) = C(ℓ, A_u)` renumbers leg
/// positions by counting `C^V`-vertices at or below, excluding `S`.
pub fn descend_cover(
    exp: &Expansion,
    fplus: &BTreeMap<VertexId, CVertex>,
    delta: &Rational,
) -> Result<CombCover, DescentError> {
    let report = check_descent_condition(exp, fplus, delta);
    if !report.passes() {
        return Err(DescentError::ConditionViolated(report));
    }

    let original_vertices: Vec<VertexId> = exp.original.graph.vertices().collect();
    let cv: BTreeSet<CVertex> = original_vertices.iter().map(|v| fplus[v]).collect();
    // g on C^V, well-defined by conditions A/B.
    let mut g: BTreeMap<CVertex, Option<u32>> = BTreeMap::new();
    for &u in &original_vertices {
        g.insert(fplus[&u], exp.original.mark(u).ray_leg());
    }

    let s: BTreeSet<CVertex> = if cv.contains(&CVertex::Branch) {
        BTreeSet::from([CVertex::Branch])
    } else {
        cv.iter()
            .copied()
            .filter(|&c| {
                let CVertex::Leg { leg, j } = c else { return false };
                g[&c].is_none()
                    && !(1..j).any(|j2| cv.contains(&CVertex::Leg { leg, j: j2 }))
            })
            .collect()
    };

    let mut f = BTreeMap::new();
    for &u in &original_vertices {
        let cu = fplus[&u];
        if s.contains(&cu) {
            f.insert(u, CVertex::Branch);
            continue;
        }
        let CVertex::Leg { leg, j } = cu else {
            // Branch image outside S is impossible: Branch in C^V forces
            // S = {Branch}.
            unreachable!("branch image must lie in S");
        };
        let a_u = (1..=j)
            .map(|j2| CVertex::Leg { leg, j: j2 })
            .filter(|c| cv.contains(c) && !s.contains(c))
            .count() as u32;
        f.insert(u, CVertex::Leg { leg, j: a_u });
    }
    debug_assert!(
        check_cover(&exp.original, &f, delta).is_empty(),
        "descended cover must verify; this is a theorem"
    );
    Ok(CombCover { f, delta: delta.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combcover::{enumerate_covers, search_cover, SearchConfig};
    use crate::fixtures::path_graph;
    use crate::graphword::star_iota;
    use crate::ratio;

    fn vid(i: u32) -> VertexId {
        VertexId(i)
    }

    /// Word with 2-vertex legs: every leg reads (branch) b(0,1); o; b(i,1).
    fn tiny_word(n: u32) -> ExpansionWord {
        let mut graph = Graph::new();
        let mut omega = BTreeMap::new();
        let branch = vid(0);
        omega.insert(branch, Marking::ray(0, ratio(1, 1)));
        for i in 0..=n {
            let mid = vid(1 + 2 * i);
            let end = vid(2 + 2 * i);
            graph.add_edge(branch, mid).unwrap();
            graph.add_edge(mid, end).unwrap();
            omega.insert(mid, Marking::Origin);
            omega.insert(end, Marking::ray(i, ratio(1, 1)));
        }
        ExpansionWord::new(PlacedGraph::new(graph, n, omega)).unwrap()
    }

    #[test]
    fn tiny_word_expansion_of_one_edge() {
        let pg = path_graph(vec![Marking::Origin, Marking::ray(1, ratio(1, 3))], 2);
        let word = tiny_word(2);
        let exp = chi_expand(&pg, &word).unwrap();
        // kappa = 2: chain u, z, v.
        let chain = exp.chains.values().next().unwrap();
        assert_eq!(chain.len(), 3);
        assert_eq!(exp.expanded.mark(chain[0]), &Marking::ray(0, ratio(1, 1)));
        assert_eq!(exp.expanded.mark(chain[1]), &Marking::Origin);
        // endpoint of word leg 1 is marked b(1,1), so i(e) = 1 and t is kept.
        assert_eq!(exp.expanded.mark(chain[2]), &Marking::ray(1, ratio(1, 3)));
        assert!(exp.expanded.is_valid());
    }

    #[test]
    fn expansion_size_law() {
        let pg = star_iota(2);
        let word = tiny_word(2);
        let exp = chi_expand(&pg, &word).unwrap();
        let kappa_sum: usize = pg
            .graph
            .edges()
            .map(|(a, b)| {
                let v = if pg.mark(a).is_origin() { b } else { a };
                word.kappa(pg.mark(v).ray_leg().unwrap())
            })
            .sum();
        assert_eq!(exp.expanded.graph.edge_count(), kappa_sum);
    }

    #[test]
    fn contraction_round_trips() {
        let pg = star_iota(3);
        let word = tiny_word(3);
        let exp = chi_expand(&pg, &word).unwrap();
        assert_eq!(contract(&exp), pg.graph);
    }

    #[test]
    fn degenerate_graph_rejected() {
        let g = Graph::from_parts([vid(0)], []).unwrap();
        let pg = PlacedGraph::new(g, 2, BTreeMap::from([(vid(0), Marking::Origin)]));
        assert!(matches!(
            chi_expand(&pg, &tiny_word(2)),
            Err(ExpansionError::Degenerate)
        ));
    }

    #[test]
    fn word_invariants_enforced() {
        // Branch marked o is rejected.
        let mut graph = Graph::new();
        let mut omega = BTreeMap::new();
        omega.insert(vid(0), Marking::Origin);
        for i in 0..=2u32 {
            graph.add_edge(vid(0), vid(i + 1)).unwrap();
            omega.insert(vid(i + 1), Marking::ray(i, ratio(1, 1)));
        }
        assert!(matches!(
            ExpansionWord::new(PlacedGraph::new(graph, 2, omega)),
            Err(WordError::BranchMarkedOrigin)
        ));
    }

    #[test]
    fn descent_condition_mixed_pair_violates() {
        let pg = path_graph(vec![Marking::Origin, Marking::ray(0, ratio(1, 1))], 2);
        let word = tiny_word(2);
        let exp = chi_expand(&pg, &word).unwrap();
        let chain = exp.chains.values().next().unwrap().clone();
        // Map an original and an inserted vertex together.
        let f = BTreeMap::from([
            (chain[0], CVertex::leg(1, 1)),
            (chain[1], CVertex::leg(1, 1)),
            (chain[2], CVertex::leg(1, 2)),
        ]);
        let report = check_descent_condition(&exp, &f, &ratio(1, 2));
        assert_eq!(report.violating_pairs.len(), 1);
    }

    #[test]
    fn descent_on_searched_covers() {
        // Expand a 3-vertex path and descend every found cover of the
        // expansion whose pairs pass the condition.
        let pg = path_graph(
            vec![Marking::Origin, Marking::ray(0, ratio(1, 1)), Marking::Origin],
            2,
        );
        let word = tiny_word(2);
        let exp = chi_expand(&pg, &word).unwrap();
        let delta = ratio(1, 2);
        let covers = enumerate_covers(&exp.expanded, &delta, 200).unwrap();
        assert!(!covers.is_empty());
        let mut descended = 0;
        for cover in &covers {
            if check_descent_condition(&exp, &cover.f, &delta).passes() {
                let down = descend_cover(&exp, &cover.f, &delta).unwrap();
                assert!(check_cover(&pg, &down.f, &delta).is_empty());
                descended += 1;
            }
        }
        assert!(descended > 0);
    }

    #[test]
    fn descent_single_leg_image_sends_minimal_origin_to_branch() {
        // Two-edge path, expansion by the tiny word; pick a branch-avoiding
        // cover whose lowest original image is a single origin-marked
        // vertex: that image is exactly S, and its vertex descends to the
        // branch of C.
        let pg = path_graph(
            vec![Marking::Origin, Marking::ray(0, ratio(1, 1)), Marking::Origin],
            2,
        );
        let word = tiny_word(2);
        let exp = chi_expand(&pg, &word).unwrap();
        let delta = ratio(1, 2);
        let covers = enumerate_covers(&exp.expanded, &delta, 2000).unwrap();
        let originals: Vec<VertexId> = pg.graph.vertices().collect();
        let wanted = covers.iter().find_map(|c| {
            if c.f.values().any(|&cv| matches!(cv, CVertex::Branch))
                || !check_descent_condition(&exp, &c.f, &delta).passes()
            {
                return None;
            }
            let mut by_depth: Vec<(&VertexId, CVertex)> =
                originals.iter().map(|v| (v, c.f[v])).collect();
            by_depth.sort_by_key(|(_, cv)| cv.depth());
            let (&lowest, low_img) = by_depth[0];
            let unique_minimum = by_depth[1].1.depth() > low_img.depth();
            (unique_minimum && pg.mark(lowest).is_origin()).then_some((c, lowest))
        });
        let (cover, lowest) = wanted.expect("a suitable branch-avoiding cover exists");
        let down = descend_cover(&exp, &cover.f, &delta).unwrap();
        assert_eq!(down.f[&lowest], CVertex::Branch);
        assert_eq!(down.f.values().filter(|&&c| c == CVertex::Branch).count(), 1);
    }

    #[test]
    fn star_expansion_covers_all_fail_descent_condition() {
        // The star itself is Unsat, so no cover of any expansion of it may
        // pass the A/B/C condition: descending one would cover the star.
        let pg = star_iota(2);
        let delta = ratio(1, 4);
        assert!(search_cover(&pg, &delta, &SearchConfig::default()).unwrap().is_unsat());
        let word = tiny_word(2);
        let exp = chi_expand(&pg, &word).unwrap();
        let covers = enumerate_covers(&exp.expanded, &delta, 500).unwrap();
        assert!(!covers.is_empty(), "the tiny-word expansion itself is coverable");
        for cover in &covers {
            assert!(!check_descent_condition(&exp, &cover.f, &delta).passes());
        }
    }
}
