//! Ingram's graph-word, the expansion tower, and the end-to-end no-cover
//! verification pipeline.
//!
//! The word for parameter `n` is the (n+1)-od whose leg `i` reads, branch
//! included, `b(0,1), o, b(1, 1-i/n), o, …, b(n, 1-i/n), o, b(0,1)`: each
//! leg is one full wrapping pattern.  For `0 < δ < 1/n` no δ-combinatorial
//! n-od cover of the word exists; [`verify_no_cover`] decides this by
//! exhaustive search, and a `Sat` answer at any tower level would contradict
//! the theory, so it is surfaced as a loud verdict rather than trusted.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combcover::{search_cover, SearchConfig, SearchError, SearchOutcome, SearchStats};
use crate::expansion::{chi_expand, Expansion, ExpansionError, ExpansionWord};
use crate::graphword::{star_iota, Graph, Marking, PlacedGraph, VertexId};
use crate::{ratio, Rational};

/// Ingram's graph-word for a given `n ≥ 2`.
#[derive(Debug, Clone)]
pub struct IngramWord {
    pub n: u32,
    pub word: ExpansionWord,
}

/// Builds Ingram's graph-word: legs of `2n+2` vertices (branch excluded),
/// with `χ(G(i,0)) = χ(G(i,2n+2)) = b(0,1)`, `χ(G(i,2q)) = b(q, 1-i/n)` for
/// `q` in `1..=n`, and `o` at odd positions.
pub fn ingram_word(n: u32) -> IngramWord {
    assert!(n >= 2, "the word is defined for n >= 2");
    let branch = VertexId(0);
    let per_leg = 2 * n + 2;
    let mut graph = Graph::new();
    let mut omega = BTreeMap::new();
    omega.insert(branch, Marking::ray(0, ratio(1, 1)));
    for i in 0..=n {
        let base = 1 + i * per_leg;
        let mut prev = branch;
        for p in 1..=per_leg {
            let v = VertexId(base + p - 1);
            graph.add_edge(prev, v).unwrap();
            let mark = if p % 2 == 1 {
                Marking::Origin
            } else if p == per_leg {
                Marking::ray(0, ratio(1, 1))
            } else {
                Marking::ray(p / 2, ratio((n - i) as i64, n as i64))
            };
            omega.insert(v, mark);
            prev = v;
        }
    }
    let pg = PlacedGraph::new(graph, n, omega);
    let word = ExpansionWord::new(pg).expect("the word satisfies the word invariants");
    IngramWord { n, word }
}

/// An iterated expansion tower: level 0 is the base placed graph, level L+1
/// is the χ-expansion of level L by Ingram's word.
#[derive(Debug, Clone)]
pub struct Tower {
    pub n: u32,
    pub base: PlacedGraph,
    pub levels: Vec<Expansion>,
}

impl Tower {
    /// The placed graph at a level (0 = base).
    pub fn level(&self, l: usize) -> &PlacedGraph {
        if l == 0 {
            &self.base
        } else {
            &self.levels[l - 1].expanded
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Materializes `depth` iterated expansions above the star base.
pub fn build_tower(n: u32, depth: usize) -> Result<Tower, ExpansionError> {
    build_tower_from(star_iota(n), n, depth)
}

/// Same, over a caller-supplied base.
pub fn build_tower_from(base: PlacedGraph, n: u32, depth: usize) -> Result<Tower, ExpansionError> {
    let word = ingram_word(n);
    let mut levels = Vec::with_capacity(depth);
    let mut current = base.clone();
    for _ in 0..depth {
        let exp = chi_expand(&current, &word.word)?;
        current = exp.expanded.clone();
        levels.push(exp);
    }
    Ok(Tower { n, base, levels })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("delta must satisfy 0 < delta < 1/n")]
    DeltaOutOfRange,
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Machine-readable verdict of a no-cover verification run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Verdict {
    pub n: u32,
    pub delta: String,
    /// "unsat", "sat" or "budget-exceeded".
    pub outcome: String,
    /// Set when the outcome is "sat": the expected-impossible witness, as
    /// vertex -> image strings.  Its existence falsifies the theory.
    pub unexpected_witness: Option<BTreeMap<String, String>>,
    pub vertices: usize,
    pub edges: usize,
    pub stats: SearchStats,
}

impl Verdict {
    pub fn is_unsat(&self) -> bool {
        self.outcome == "unsat"
    }
}

/// Decides, by exhaustive search, that Ingram's word for `n` admits no
/// δ-combinatorial n-od cover.  Requires `0 < δ < 1/n`.
pub fn verify_no_cover(
    n: u32,
    delta: &Rational,
    config: &SearchConfig,
) -> Result<Verdict, VerifyError> {
    verify_no_cover_of(&ingram_word(n).word.pg, n, delta, config)
}

/// Runs the same verification against an arbitrary tower level.
pub fn verify_no_cover_of(
    pg: &PlacedGraph,
    n: u32,
    delta: &Rational,
    config: &SearchConfig,
) -> Result<Verdict, VerifyError> {
    use num_traits::Zero;
    if delta <= &Rational::zero() || delta >= &ratio(1, n as i64) {
        return Err(VerifyError::DeltaOutOfRange);
    }
    let outcome = search_cover(pg, delta, config)?;
    let (label, witness, stats) = match outcome {
        SearchOutcome::Unsat(stats) => ("unsat", None, stats),
        SearchOutcome::BudgetExceeded(stats) => ("budget-exceeded", None, stats),
        SearchOutcome::Sat(cover, stats) => {
            let witness = cover
                .f
                .iter()
                .map(|(v, c)| (v.to_string(), c.to_string()))
                .collect();
            ("sat", Some(witness), stats)
        }
    };
    Ok(Verdict {
        n,
        delta: delta.to_string(),
        outcome: label.to_string(),
        unexpected_witness: witness,
        vertices: pg.graph.vertex_count(),
        edges: pg.graph.edge_count(),
        stats,
    })
}
