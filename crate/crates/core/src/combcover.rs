//! Exact verification of the cover axioms C1–C3 and a complete decision
//! procedure for the existence of a δ-combinatorial n-od cover.
//!
//! A candidate cover is a total map `f : V(G) → V(C)` into the infinite n-od
//! `C` together with a tolerance δ.  The three axioms:
//!
//! * **C1** — equal images carry equal mark classes (both `o`, or rays on the
//!   same leg of Γ);
//! * **C2** — `f` is a graph homomorphism into the adjacency of `C`;
//! * **C3** — whenever `v₁,v₂,v₃` are consecutive with `f(v₁) ≠ f(v₃)`,
//!   `f(v₂)` off the branch, and some other vertex `v` shares `f(v₂)` with
//!   ray parameters `s < t` on one leg, then `t − s < δ` strictly.
//!
//! The search enumerates homomorphic placements depth-first over a spanning
//! tree rooted at a max-degree vertex.  Soundness of an `Unsat` answer rests
//! on: the image of `f` is connected with at most `|V(G)|` vertices, so after
//! normalizing by the leg-permutation symmetry of `C` (first leg used is leg
//! 1, next fresh leg is 2, ...) and by translation along a single leg when
//! the image avoids the branch, every cover fits within leg index
//! `j ≤ |V(G)| + 1`.  The search enumerates exactly that normalized space.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphword::{CVertex, PlacedGraph, VertexId};
use crate::Rational;

/// A candidate or verified δ-combinatorial n-od cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombCover {
    pub f: BTreeMap<VertexId, CVertex>,
    pub delta: Rational,
}

impl CombCover {
    pub fn value(&self, v: VertexId) -> Option<CVertex> {
        self.f.get(&v).copied()
    }
}

/// One violation of the cover axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverViolation {
    /// `f` is missing on a vertex.
    Unmapped(VertexId),
    /// `f` maps to a leg index outside `1..=n`.
    LegOutOfRange(VertexId),
    /// C1: equal image, incompatible marks.
    C1(VertexId, VertexId),
    /// C2: adjacent vertices with non-adjacent images.
    C2(VertexId, VertexId),
    /// C3: the straight-through triple (v1,v2,v3) and witness v with t-s >= δ.
    C3 {
        v1: VertexId,
        v2: VertexId,
        v3: VertexId,
        v: VertexId,
    },
}

impl fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverViolation::Unmapped(v) => write!(f, "f undefined on {v}"),
            CoverViolation::LegOutOfRange(v) => write!(f, "f({v}) uses a leg outside 1..=n"),
            CoverViolation::C1(u, v) => write!(f, "C1 violated by {u},{v}"),
            CoverViolation::C2(u, v) => write!(f, "C2 violated by edge {u},{v}"),
            CoverViolation::C3 { v1, v2, v3, v } => {
                write!(f, "C3 violated: triple {v1},{v2},{v3} with witness {v}")
            }
        }
    }
}

fn range_violations(pg: &PlacedGraph, f: &BTreeMap<VertexId, CVertex>) -> Vec<CoverViolation> {
    let mut out = Vec::new();
    for v in pg.graph.vertices() {
        match f.get(&v) {
            None => out.push(CoverViolation::Unmapped(v)),
            Some(CVertex::Leg { leg, j }) if *leg < 1 || *leg > pg.n || *j < 1 => {
                out.push(CoverViolation::LegOutOfRange(v))
            }
            _ => {}
        }
    }
    out
}

/// C1: whenever f(u) = f(v), both marks are Origin or both are rays on one leg.
pub fn check_c1(pg: &PlacedGraph, f: &BTreeMap<VertexId, CVertex>) -> Vec<CoverViolation> {
    let mut groups: BTreeMap<CVertex, Vec<VertexId>> = BTreeMap::new();
    for (&v, &c) in f {
        if pg.graph.contains_vertex(v) {
            groups.entry(c).or_default().push(v);
        }
    }
    let mut out = Vec::new();
    for group in groups.values() {
        for (a, &u) in group.iter().enumerate() {
            for &v in &group[a + 1..] {
                let cu = pg.mark(u).ray_leg();
                let cv = pg.mark(v).ray_leg();
                if cu != cv {
                    out.push(CoverViolation::C1(u, v));
                }
            }
        }
    }
    out
}

/// C2: f is a homomorphism into C's adjacency.
pub fn check_c2(pg: &PlacedGraph, f: &BTreeMap<VertexId, CVertex>) -> Vec<CoverViolation> {
    let mut out = Vec::new();
    for (u, v) in pg.graph.edges() {
        let (Some(&cu), Some(&cv)) = (f.get(&u), f.get(&v)) else { continue };
        if !cu.adjacent(cv) {
            out.push(CoverViolation::C2(u, v));
        }
    }
    out
}

/// C3, implemented exactly as quantified: for every consecutive triple
/// `v₁,v₂,v₃` (`v₁ ≠ v₃`, `f(v₁) ≠ f(v₃)`, `f(v₂)` not the branch) and every
/// `v ∉ {v₁,v₂,v₃}` with `f(v) = f(v₂)`, `ω(v₂) = b(i,s)`, `ω(v) = b(i,t)`,
/// `s < t`: require `t − s < δ`.
pub fn check_c3(
    pg: &PlacedGraph,
    f: &BTreeMap<VertexId, CVertex>,
    delta: &Rational,
) -> Vec<CoverViolation> {
    let mut out = Vec::new();
    for v2 in pg.graph.vertices() {
        let Some(&c2) = f.get(&v2) else { continue };
        if c2 == CVertex::Branch {
            continue;
        }
        let nbrs: Vec<VertexId> = pg.graph.neighbors(v2).collect();
        for (a, &v1) in nbrs.iter().enumerate() {
            for &v3 in &nbrs[a + 1..] {
                let (Some(&c1), Some(&c3)) = (f.get(&v1), f.get(&v3)) else { continue };
                if c1 == c3 {
                    continue;
                }
                for (&v, &cv) in f {
                    if cv != c2 || v == v1 || v == v2 || v == v3 {
                        continue;
                    }
                    if !pg.graph.contains_vertex(v) {
                        continue;
                    }
                    if let (Some(i2), Some(iv)) = (pg.mark(v2).ray_leg(), pg.mark(v).ray_leg()) {
                        if i2 != iv {
                            continue;
                        }
                        let s = pg.mark(v2).ray_t().unwrap();
                        let t = pg.mark(v).ray_t().unwrap();
                        if s < t && &(t - s) >= delta {
                            out.push(CoverViolation::C3 { v1, v2, v3, v });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Conjunction of the three axiom checks plus totality/range.
pub fn check_cover(
    pg: &PlacedGraph,
    f: &BTreeMap<VertexId, CVertex>,
    delta: &Rational,
) -> Vec<CoverViolation> {
    let mut out = range_violations(pg, f);
    out.extend(check_c1(pg, f));
    out.extend(check_c2(pg, f));
    out.extend(check_c3(pg, f, delta));
    out
}

/// Builds a verified cover or returns the violations.
pub fn verify_cover(
    pg: &PlacedGraph,
    f: BTreeMap<VertexId, CVertex>,
    delta: Rational,
) -> Result<CombCover, Vec<CoverViolation>> {
    let violations = check_cover(pg, &f, &delta);
    if violations.is_empty() {
        Ok(CombCover { f, delta })
    } else {
        Err(violations)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("input graph must be connected and non-empty")]
    InvalidInput,
    #[error("delta must be positive")]
    NonPositiveDelta,
    #[error("placement function invalid: {0} violations")]
    InvalidPlacement(usize),
}

/// Counters reported by the search.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_micros: u128,
}

impl SearchStats {
    pub fn elapsed(&self) -> Duration {
        Duration::from_micros(self.elapsed_micros as u64)
    }
}

/// Outcome of the cover search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Sat(CombCover, SearchStats),
    Unsat(SearchStats),
    BudgetExceeded(SearchStats),
}

impl SearchOutcome {
    pub fn stats(&self) -> &SearchStats {
        match self {
            SearchOutcome::Sat(_, s) | SearchOutcome::Unsat(s) | SearchOutcome::BudgetExceeded(s) => s,
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, SearchOutcome::Sat(..))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SearchOutcome::Unsat(..))
    }
}

/// Search configuration.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Node budget (assignments explored); `None` = unbounded.  With several
    /// workers the cutoff is enforced against each worker's view of the
    /// global counter, so the total may overshoot; the Sat/Unsat verdict is
    /// unaffected.
    pub budget_nodes: Option<u64>,
    /// Worker threads over the root-assignment frontier.
    pub jobs: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget_nodes: None, jobs: 1 }
    }
}

// ---------------------------------------------------------------------------
// Search internals: compact indexed representation
// ---------------------------------------------------------------------------

/// Compact encoding of a CVertex: 0 = branch, else (leg-1)*jcap + j.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Code(u32);

struct Instance {
    n: u32,
    /// Max leg index j explored (inclusive).
    jcap: u32,
    ids: Vec<VertexId>,
    /// DFS preorder over a spanning tree; order[0] is the root.
    order: Vec<u32>,
    /// Parent (in `order` position terms: parent_pos[k] < k), 0 for the root.
    parent_pos: Vec<u32>,
    /// Adjacency by vertex index.
    adj: Vec<Vec<u32>>,
    /// 0 = origin, 1+leg = ray class.
    class: Vec<u32>,
    /// far[u*nv+v] = marks on one leg, t_u < t_v, and t_v - t_u >= delta.
    far: Vec<bool>,
}

impl Instance {
    fn build(pg: &PlacedGraph, delta: &Rational) -> Instance {
        let ids: Vec<VertexId> = pg.graph.vertices().collect();
        let nv = ids.len();
        let index: BTreeMap<VertexId, u32> =
            ids.iter().enumerate().map(|(k, &v)| (v, k as u32)).collect();
        let mut adj = vec![Vec::new(); nv];
        for (u, v) in pg.graph.edges() {
            let (iu, iv) = (index[&u], index[&v]);
            adj[iu as usize].push(iv);
            adj[iv as usize].push(iu);
        }
        // Root at a max-degree vertex (smallest id on ties), DFS preorder.
        let root = (0..nv as u32)
            .max_by_key(|&k| (adj[k as usize].len(), std::cmp::Reverse(ids[k as usize])))
            .unwrap();
        let mut order = Vec::with_capacity(nv);
        let mut parent_pos = vec![0u32; nv];
        let mut pos_of = vec![u32::MAX; nv];
        let mut stack = vec![(root, 0u32)];
        let mut seen = vec![false; nv];
        seen[root as usize] = true;
        while let Some((v, ppos)) = stack.pop() {
            let pos = order.len() as u32;
            order.push(v);
            parent_pos[pos as usize] = ppos;
            pos_of[v as usize] = pos;
            for &w in adj[v as usize].iter().rev() {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push((w, pos));
                }
            }
        }
        let class: Vec<u32> = ids
            .iter()
            .map(|&v| match pg.mark(v).ray_leg() {
                None => 0,
                Some(leg) => 1 + leg,
            })
            .collect();
        let mut far = vec![false; nv * nv];
        for (a, &u) in ids.iter().enumerate() {
            for (b, &v) in ids.iter().enumerate() {
                if a == b {
                    continue;
                }
                let (mu, mv) = (pg.mark(u), pg.mark(v));
                if let (Some(lu), Some(lv)) = (mu.ray_leg(), mv.ray_leg()) {
                    if lu == lv {
                        let (s, t) = (mu.ray_t().unwrap(), mv.ray_t().unwrap());
                        if s < t && &(t - s) >= delta {
                            far[a * nv + b] = true;
                        }
                    }
                }
            }
        }
        Instance {
            n: pg.n,
            jcap: nv as u32 + 1,
            ids,
            order,
            parent_pos,
            adj,
            class,
            far,
        }
    }

    fn nv(&self) -> usize {
        self.ids.len()
    }

    fn code(&self, c: CVertex) -> Code {
        match c {
            CVertex::Branch => Code(0),
            CVertex::Leg { leg, j } => Code((leg - 1) * self.jcap + j),
        }
    }

    fn decode(&self, code: Code) -> CVertex {
        if code.0 == 0 {
            CVertex::Branch
        } else {
            CVertex::Leg { leg: (code.0 - 1) / self.jcap + 1, j: (code.0 - 1) % self.jcap + 1 }
        }
    }

    fn code_leg(&self, code: Code) -> u32 {
        if code.0 == 0 { 0 } else { (code.0 - 1) / self.jcap + 1 }
    }

    fn code_count(&self) -> usize {
        (self.n * self.jcap + 1) as usize
    }
}

/// Mutable search state for one worker.
struct State<'a> {
    inst: &'a Instance,
    /// Code assigned to each vertex index (by vertex index, not order position).
    value: Vec<Code>,
    assigned: Vec<bool>,
    /// Vertices currently mapped to each code.
    fiber: Vec<Vec<u32>>,
    max_leg_used: u32,
    nodes: u64,
}

const UNSET: Code = Code(u32::MAX);

enum Walk {
    Done,
    Exhausted,
    Aborted,
}

impl<'a> State<'a> {
    fn new(inst: &'a Instance) -> Self {
        State {
            inst,
            value: vec![UNSET; inst.nv()],
            assigned: vec![false; inst.nv()],
            fiber: vec![Vec::new(); inst.code_count()],
            max_leg_used: 0,
            nodes: 0,
        }
    }

    /// Incremental feasibility of assigning `code` to vertex `x`.
    fn feasible(&self, x: u32, code: Code) -> bool {
        let inst = self.inst;
        let nv = inst.nv();
        // C1 on the fiber: all members share x's mark class.
        if let Some(&w) = self.fiber[code.0 as usize].first() {
            if inst.class[w as usize] != inst.class[x as usize] {
                return false;
            }
        }
        // C2 on non-tree edges: every assigned neighbor must map adjacently.
        let cx = inst.decode(code);
        for &y in &inst.adj[x as usize] {
            if self.assigned[y as usize] && !inst.decode(self.value[y as usize]).adjacent(cx) {
                return false;
            }
        }
        // C3, three roles for x. All marks/params are precomputed in `far`.
        // Role middle: x = v2.
        if code.0 != 0 {
            let nbrs = &inst.adj[x as usize];
            let mut flank = false;
            'outer: for (a, &v1) in nbrs.iter().enumerate() {
                if !self.assigned[v1 as usize] {
                    continue;
                }
                for &v3 in &nbrs[a + 1..] {
                    if self.assigned[v3 as usize] && self.value[v1 as usize] != self.value[v3 as usize]
                    {
                        flank = true;
                        break 'outer;
                    }
                }
            }
            if flank {
                for &w in &self.fiber[code.0 as usize] {
                    // w shares the image; flanking pair exists around x.
                    // Need a pair avoiding w itself.
                    if self.flanking_pair_avoiding(x, w)
                        && inst.far[x as usize * nv + w as usize]
                    {
                        return false;
                    }
                }
            }
        }
        // Role other: x = v (shares code with some assigned middle v2).
        for &v2 in &self.fiber[code.0 as usize] {
            if inst.far[v2 as usize * nv + x as usize]
                && self.value[v2 as usize].0 != 0
                && self.flanking_pair_avoiding(v2, x)
            {
                return false;
            }
        }
        // Role flank: x = v1; some assigned neighbor v2 (off branch) has
        // another assigned neighbor v3 with f(v3) != code, and a far mate.
        for &v2 in &inst.adj[x as usize] {
            if !self.assigned[v2 as usize] || self.value[v2 as usize].0 == 0 {
                continue;
            }
            let c2 = self.value[v2 as usize];
            let mut differing_v3 = false;
            for &v3 in &inst.adj[v2 as usize] {
                if v3 != x && self.assigned[v3 as usize] && self.value[v3 as usize] != code {
                    differing_v3 = true;
                    break;
                }
            }
            if !differing_v3 {
                continue;
            }
            for &w in &self.fiber[c2.0 as usize] {
                if w != v2
                    && w != x
                    && inst.far[v2 as usize * nv + w as usize]
                    && self.flanking_pair_avoiding_with(v2, w, x, code)
                {
                    return false;
                }
            }
        }
        true
    }

    /// Does v2 have two assigned neighbors v1 != v3 with different values,
    /// neither equal to `avoid`?
    fn flanking_pair_avoiding(&self, v2: u32, avoid: u32) -> bool {
        let nbrs = &self.inst.adj[v2 as usize];
        for (a, &v1) in nbrs.iter().enumerate() {
            if v1 == avoid || !self.assigned[v1 as usize] {
                continue;
            }
            for &v3 in &nbrs[a + 1..] {
                if v3 == avoid || !self.assigned[v3 as usize] {
                    continue;
                }
                if self.value[v1 as usize] != self.value[v3 as usize] {
                    return true;
                }
            }
        }
        false
    }

    /// Same, treating `extra` as assigned with value `extra_code`.
    fn flanking_pair_avoiding_with(&self, v2: u32, avoid: u32, extra: u32, extra_code: Code) -> bool {
        let val = |v: u32| -> Option<Code> {
            if v == extra {
                Some(extra_code)
            } else if self.assigned[v as usize] {
                Some(self.value[v as usize])
            } else {
                None
            }
        };
        let nbrs = &self.inst.adj[v2 as usize];
        for (a, &v1) in nbrs.iter().enumerate() {
            if v1 == avoid {
                continue;
            }
            let Some(c1) = val(v1) else { continue };
            for &v3 in &nbrs[a + 1..] {
                if v3 == avoid {
                    continue;
                }
                let Some(c3) = val(v3) else { continue };
                if c1 != c3 {
                    return true;
                }
            }
        }
        false
    }

    fn assign(&mut self, x: u32, code: Code) -> u32 {
        self.value[x as usize] = code;
        self.assigned[x as usize] = true;
        self.fiber[code.0 as usize].push(x);
        self.nodes += 1;
        let leg = self.inst.code_leg(code);
        let prev = self.max_leg_used;
        if leg > self.max_leg_used {
            self.max_leg_used = leg;
        }
        prev
    }

    fn unassign(&mut self, x: u32, code: Code, prev_max_leg: u32) {
        self.assigned[x as usize] = false;
        self.value[x as usize] = UNSET;
        let fib = &mut self.fiber[code.0 as usize];
        let pos = fib.iter().rposition(|&w| w == x).unwrap();
        fib.swap_remove(pos);
        self.max_leg_used = prev_max_leg;
    }

    /// Candidate codes for the vertex at order position `pos` (>= 1):
    /// neighbors of the parent's value under the fresh-leg symmetry rule.
    fn candidates(&self, pos: usize) -> Vec<Code> {
        let inst = self.inst;
        let parent = inst.order[inst.parent_pos[pos] as usize];
        let pcode = self.value[parent as usize];
        let mut out = Vec::with_capacity(4);
        match inst.decode(pcode) {
            CVertex::Branch => {
                let top = (self.max_leg_used + 1).min(inst.n);
                for leg in 1..=top {
                    out.push(inst.code(CVertex::Leg { leg, j: 1 }));
                }
            }
            CVertex::Leg { leg, j } => {
                if j == 1 {
                    out.push(Code(0));
                } else {
                    out.push(inst.code(CVertex::Leg { leg, j: j - 1 }));
                }
                if j + 1 <= inst.jcap {
                    out.push(inst.code(CVertex::Leg { leg, j: j + 1 }));
                }
            }
        }
        out
    }

    /// Depth-first extension from order position `pos`; calls `emit` on each
    /// complete assignment.  Returns Exhausted normally, Done if `emit`
    /// requested a stop, Aborted on budget/foreign-stop.
    fn extend<F>(&mut self, pos: usize, ctl: &Control, emit: &mut F) -> Walk
    where
        F: FnMut(&State) -> bool,
    {
        if pos == self.inst.nv() {
            return if emit(self) { Walk::Done } else { Walk::Exhausted };
        }
        if ctl.should_stop(self.nodes) {
            return Walk::Aborted;
        }
        let x = self.inst.order[pos];
        for code in self.candidates(pos) {
            if !self.feasible(x, code) {
                continue;
            }
            let prev = self.assign(x, code);
            let walk = self.extend(pos + 1, ctl, emit);
            self.unassign(x, code, prev);
            match walk {
                Walk::Exhausted => {}
                done_or_aborted => return done_or_aborted,
            }
        }
        Walk::Exhausted
    }
}

/// Shared stop control across workers.
struct Control {
    budget: Option<u64>,
    global_nodes: AtomicU64,
    stop: AtomicBool,
    budget_hit: AtomicBool,
    /// Nodes contributed by this worker since last sync, checked cheaply.
    sync_mask: u64,
}

impl Control {
    fn new(budget: Option<u64>) -> Self {
        Control {
            budget,
            global_nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
            budget_hit: AtomicBool::new(false),
            // Budgeted runs must notice the cutoff promptly; unbudgeted runs
            // only poll the stop flag occasionally.
            sync_mask: if budget.is_some() { 0 } else { 0x3ff },
        }
    }

    fn should_stop(&self, local_nodes: u64) -> bool {
        if local_nodes & self.sync_mask != 0 {
            return false;
        }
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        if let Some(b) = self.budget {
            if self.global_nodes.load(Ordering::Relaxed) + local_nodes > b {
                self.budget_hit.store(true, Ordering::Relaxed);
                self.stop.store(true, Ordering::Relaxed);
                return true;
            }
        }
        false
    }
}

fn root_codes(inst: &Instance) -> Vec<Code> {
    let mut out = vec![Code(0)];
    for j in 1..=inst.jcap {
        out.push(inst.code(CVertex::Leg { leg: 1, j }));
    }
    out
}

fn cover_from_state(inst: &Instance, st: &State, delta: &Rational) -> CombCover {
    let f = inst
        .ids
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, inst.decode(st.value[k])))
        .collect();
    CombCover { f, delta: delta.clone() }
}

/// Complete search for a δ-combinatorial n-od cover.
///
/// Returns `Sat` with a verified witness, `Unsat` when no cover exists, or
/// `BudgetExceeded` when the node budget ran out first.
pub fn search_cover(
    pg: &PlacedGraph,
    delta: &Rational,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    use num_traits::Zero;
    if delta <= &Rational::zero() {
        return Err(SearchError::NonPositiveDelta);
    }
    if pg.graph.vertex_count() == 0 || !pg.graph.is_connected() {
        return Err(SearchError::InvalidInput);
    }
    let placement_violations = pg.validate_placement();
    if !placement_violations.is_empty() {
        return Err(SearchError::InvalidPlacement(placement_violations.len()));
    }
    let start = Instant::now();
    let inst = Instance::build(pg, delta);
    let ctl = Control::new(config.budget_nodes);
    let witness: Mutex<Option<CombCover>> = Mutex::new(None);
    let roots = root_codes(&inst);
    let next_root = AtomicUsize::new(0);
    let jobs = config.jobs.max(1).min(roots.len());

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| {
                let mut st = State::new(&inst);
                loop {
                    let r = next_root.fetch_add(1, Ordering::Relaxed);
                    if r >= roots.len() || ctl.stop.load(Ordering::Relaxed) {
                        break;
                    }
                    let code = roots[r];
                    let x = inst.order[0];
                    if !st.feasible(x, code) {
                        continue;
                    }
                    let prev = st.assign(x, code);
                    let mut emit = |s: &State| {
                        let cover = cover_from_state(&inst, s, delta);
                        debug_assert!(check_cover(pg, &cover.f, delta).is_empty());
                        *witness.lock().unwrap() = Some(cover);
                        true
                    };
                    let walk = st.extend(1, &ctl, &mut emit);
                    st.unassign(x, code, prev);
                    if matches!(walk, Walk::Done) {
                        ctl.stop.store(true, Ordering::Relaxed);
                        break;
                    }
                }
                ctl.global_nodes.fetch_add(st.nodes, Ordering::Relaxed);
            });
        }
    });

    let stats = SearchStats {
        nodes: ctl.global_nodes.load(Ordering::Relaxed),
        elapsed_micros: start.elapsed().as_micros(),
    };
    let found = witness.into_inner().unwrap();
    Ok(match found {
        Some(cover) => SearchOutcome::Sat(cover, stats),
        None if ctl.budget_hit.load(Ordering::Relaxed) => SearchOutcome::BudgetExceeded(stats),
        None => SearchOutcome::Unsat(stats),
    })
}

/// Enumerates verified covers (up to `cap`), for fixture generation and
/// property tests.  Single-threaded, no budget.
pub fn enumerate_covers(
    pg: &PlacedGraph,
    delta: &Rational,
    cap: usize,
) -> Result<Vec<CombCover>, SearchError> {
    use num_traits::Zero;
    if delta <= &Rational::zero() {
        return Err(SearchError::NonPositiveDelta);
    }
    if pg.graph.vertex_count() == 0 || !pg.graph.is_connected() {
        return Err(SearchError::InvalidInput);
    }
    let inst = Instance::build(pg, delta);
    let ctl = Control::new(None);
    let mut found = Vec::new();
    let mut st = State::new(&inst);
    let x = inst.order[0];
    for code in root_codes(&inst) {
        if found.len() >= cap {
            break;
        }
        if !st.feasible(x, code) {
            continue;
        }
        let prev = st.assign(x, code);
        let mut emit = |s: &State| {
            found.push(cover_from_state(&inst, s, delta));
            found.len() >= cap
        };
        st.extend(1, &ctl, &mut emit);
        st.unassign(x, code, prev);
    }
    Ok(found)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IstarError {
    #[error("every leg of Gamma is hit by a branch-star fiber; C1/C2 must be violated upstream")]
    NotFound,
}

/// Some `i*` in `0..=n` such that no vertex mapped into the branch-star of C
/// carries the mark `b(i*,·)`.  Smallest qualifying index on ties.
pub fn find_istar(pg: &PlacedGraph, f: &BTreeMap<VertexId, CVertex>) -> Result<u32, IstarError> {
    let mut blocked = vec![false; pg.n as usize + 2];
    for (&v, &c) in f {
        if c.in_branch_star() && pg.graph.contains_vertex(v) {
            if let Some(leg) = pg.mark(v).ray_leg() {
                if leg <= pg.n {
                    blocked[leg as usize] = true;
                }
            }
        }
    }
    (0..=pg.n).find(|&i| !blocked[i as usize]).ok_or(IstarError::NotFound)
}

/// Relabels the legs of C in a cover by `perm` (perm[ℓ-1] is the new index
/// of leg ℓ).  Covers are closed under this operation.
pub fn permute_legs(cover: &CombCover, perm: &[u32]) -> CombCover {
    let f = cover
        .f
        .iter()
        .map(|(&v, &c)| {
            let c2 = match c {
                CVertex::Branch => CVertex::Branch,
                CVertex::Leg { leg, j } => CVertex::Leg { leg: perm[leg as usize - 1], j },
            };
            (v, c2)
        })
        .collect();
    CombCover { f, delta: cover.delta.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{figure3, path_graph};
    use crate::graphword::{star_iota, Graph, Marking};
    use crate::ratio;
    use std::collections::BTreeMap;

    fn vid(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn c1_rejects_mixed_fiber() {
        let pg = star_iota(3);
        let f: BTreeMap<VertexId, CVertex> =
            pg.graph.vertices().map(|v| (v, CVertex::Branch)).collect();
        assert!(!check_c1(&pg, &f).is_empty());
    }

    #[test]
    fn c1_accepts_same_leg_fiber() {
        let g = Graph::from_parts([vid(0), vid(1)], []).unwrap();
        let pg = PlacedGraph::new(
            g,
            3,
            BTreeMap::from([
                (vid(0), Marking::ray(0, ratio(1, 2))),
                (vid(1), Marking::ray(0, ratio(1, 1))),
            ]),
        );
        let f = BTreeMap::from([(vid(0), CVertex::leg(1, 4)), (vid(1), CVertex::leg(1, 4))]);
        assert!(check_c1(&pg, &f).is_empty());
    }

    #[test]
    fn figure3_passes_all_checks() {
        let (pg, f) = figure3();
        assert!(pg.is_valid());
        assert!(check_c1(&pg, &f).is_empty());
        assert!(check_c2(&pg, &f).is_empty());
        assert!(check_c3(&pg, &f, &ratio(1, 4)).is_empty());
        assert!(check_cover(&pg, &f, &ratio(1, 4)).is_empty());
    }

    #[test]
    fn c2_requires_branch_between_legs() {
        let g = Graph::from_parts([vid(0), vid(1)], [(vid(0), vid(1))]).unwrap();
        let pg = PlacedGraph::new(
            g,
            3,
            BTreeMap::from([(vid(0), Marking::Origin), (vid(1), Marking::ray(0, ratio(1, 1)))]),
        );
        let ok = BTreeMap::from([(vid(0), CVertex::leg(1, 1)), (vid(1), CVertex::leg(1, 2))]);
        assert!(check_c2(&pg, &ok).is_empty());
        let bad = BTreeMap::from([(vid(0), CVertex::leg(1, 1)), (vid(1), CVertex::leg(2, 1))]);
        assert_eq!(check_c2(&pg, &bad).len(), 1);
    }

    /// Path marked o, b(0,0), o plus a detached witness vertex marked
    /// b(0,1/2) sharing the middle image.
    fn c3_fixture() -> (PlacedGraph, BTreeMap<VertexId, CVertex>) {
        let mut g = Graph::from_parts(
            (0..3).map(vid),
            (0..2).map(|i| (vid(i), vid(i + 1))),
        )
        .unwrap();
        g.add_edge(vid(3), vid(0)).unwrap();
        let pg = PlacedGraph::new(
            g,
            2,
            BTreeMap::from([
                (vid(0), Marking::Origin),
                (vid(1), Marking::ray(0, ratio(0, 1))),
                (vid(2), Marking::Origin),
                (vid(3), Marking::ray(0, ratio(1, 2))),
            ]),
        );
        let f = BTreeMap::from([
            (vid(0), CVertex::leg(1, 2)),
            (vid(1), CVertex::leg(1, 3)),
            (vid(2), CVertex::leg(1, 4)),
            (vid(3), CVertex::leg(1, 3)),
        ]);
        (pg, f)
    }

    #[test]
    fn c3_strict_threshold() {
        let (pg, f) = c3_fixture();
        // 1/2 - 0 >= 1/4: violation.
        assert_eq!(check_c3(&pg, &f, &ratio(1, 4)).len(), 1);
        // 1/2 - 0 < 3/4: fine.
        assert!(check_c3(&pg, &f, &ratio(3, 4)).is_empty());
        // Boundary: t - s = delta is still a violation (strict <).
        assert_eq!(check_c3(&pg, &f, &ratio(1, 2)).len(), 1);
    }

    #[test]
    fn c3_vacuous_without_repeats() {
        let (pg, f) = figure3();
        assert!(check_c3(&pg, &f, &ratio(1, 1000)).is_empty());
    }

    #[test]
    fn star_is_unsat_by_pigeonhole() {
        for n in 2..=4 {
            let pg = star_iota(n);
            let out = search_cover(&pg, &ratio(1, 2 * n as i64), &SearchConfig::default()).unwrap();
            assert!(out.is_unsat(), "star n={n} should be Unsat");
        }
    }

    #[test]
    fn short_path_is_sat() {
        let pg = path_graph(
            vec![Marking::Origin, Marking::ray(0, ratio(1, 1)), Marking::Origin],
            2,
        );
        let out = search_cover(&pg, &ratio(1, 4), &SearchConfig::default()).unwrap();
        match out {
            SearchOutcome::Sat(cover, _) => {
                assert!(check_cover(&pg, &cover.f, &cover.delta).is_empty());
            }
            other => panic!("expected Sat, got {other:?}"),
        }
    }

    #[test]
    fn budget_exceeded_reported() {
        let pg = star_iota(4);
        let config = SearchConfig { budget_nodes: Some(1), jobs: 1 };
        let out = search_cover(&pg, &ratio(1, 8), &config).unwrap();
        assert!(matches!(out, SearchOutcome::BudgetExceeded(_)));
    }

    #[test]
    fn search_rejects_disconnected() {
        let g = Graph::from_parts([vid(0), vid(1)], []).unwrap();
        let pg = PlacedGraph::new(
            g,
            2,
            BTreeMap::from([(vid(0), Marking::Origin), (vid(1), Marking::Origin)]),
        );
        assert_eq!(
            search_cover(&pg, &ratio(1, 4), &SearchConfig::default()),
            Err(SearchError::InvalidInput)
        );
    }

    #[test]
    fn istar_on_figure3() {
        let (pg, f) = figure3();
        assert_eq!(find_istar(&pg, &f), Ok(1));
    }

    #[test]
    fn istar_with_empty_branch_star() {
        let g = Graph::from_parts([vid(0)], []).unwrap();
        let pg = PlacedGraph::new(g, 2, BTreeMap::from([(vid(0), Marking::ray(0, ratio(1, 2)))]));
        let f = BTreeMap::from([(vid(0), CVertex::leg(1, 5))]);
        assert_eq!(find_istar(&pg, &f), Ok(0));
    }

    #[test]
    fn permuted_witness_still_verifies() {
        let (pg, f) = figure3();
        let cover = CombCover { f, delta: ratio(1, 4) };
        let permuted = permute_legs(&cover, &[2, 3, 1]);
        assert!(check_cover(&pg, &permuted.f, &permuted.delta).is_empty());
    }

    #[test]
    fn enumerate_finds_multiple_witnesses() {
        let pg = path_graph(
            vec![Marking::Origin, Marking::ray(0, ratio(1, 1)), Marking::Origin],
            2,
        );
        let covers = enumerate_covers(&pg, &ratio(1, 4), 50).unwrap();
        assert!(covers.len() > 1);
        for c in &covers {
            assert!(check_cover(&pg, &c.f, &c.delta).is_empty());
        }
    }
}
