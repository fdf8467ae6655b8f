//! Text interchange formats: placed graphs, covers, and scenes.
//!
//! Documents are JSON with a fixed canonical printing (sorted ids, fixed
//! field order, rationals as reduced `p/q` strings with `/1` omitted), so
//! parse→print round-trips are byte-stable.
//!
//! Placed graph document:
//!
//! ```json
//! {
//!   "n": 3,
//!   "vertices": [{"id": 0, "mark": "o"}, {"id": 1, "mark": {"leg": 0, "t": "1/2"}}],
//!   "edges": [[0, 1]]
//! }
//! ```
//!
//! Cover document: `{"delta": "1/4", "f": {"0": "branch", "1": {"leg": 1, "j": 2}}}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::Value;
use thiserror::Error;

use crate::combcover::CombCover;
use crate::graphword::{CVertex, Graph, Marking, PlacedGraph, VertexId};
use crate::Rational;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("document error: {0}")]
    Document(String),
    #[error("malformed rational: {0}")]
    Rational(String),
    #[error("graph error: {0}")]
    Graph(String),
}

fn doc_err<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Document(msg.into()))
}

/// Prints a rational in reduced form, omitting a denominator of 1.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn rational_from_str(s: &str) -> Result<Rational, FormatError> {
    let bad = || FormatError::Rational(s.to_string());
    match s.split_once('/') {
        None => {
            let p = BigInt::from_str(s.trim()).map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
    }
}

fn mark_to_json(mark: &Marking) -> String {
    match mark {
        Marking::Origin => "\"o\"".to_string(),
        Marking::Ray { leg, t } => {
            format!("{{\"leg\": {leg}, \"t\": \"{}\"}}", rational_to_string(t))
        }
    }
}

/// Canonical placed-graph document.
pub fn placed_graph_to_json(pg: &PlacedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"n\": {},", pg.n);
    let _ = writeln!(out, "  \"vertices\": [");
    let vertices: Vec<VertexId> = pg.graph.vertices().collect();
    for (k, v) in vertices.iter().enumerate() {
        let comma = if k + 1 == vertices.len() { "" } else { "," };
        let mark = pg
            .omega
            .get(v)
            .map(mark_to_json)
            .unwrap_or_else(|| "\"o\"".to_string());
        let _ = writeln!(out, "    {{\"id\": {}, \"mark\": {}}}{}", v.0, mark, comma);
    }
    let _ = writeln!(out, "  ],");
    let _ = writeln!(out, "  \"edges\": [");
    let edges: Vec<(VertexId, VertexId)> = pg.graph.edges().collect();
    for (k, (u, v)) in edges.iter().enumerate() {
        let comma = if k + 1 == edges.len() { "" } else { "," };
        let _ = writeln!(out, "    [{}, {}]{}", u.0, v.0, comma);
    }
    let _ = writeln!(out, "  ]");
    let _ = write!(out, "}}");
    out
}

fn as_u32(v: &Value, what: &str) -> Result<u32, FormatError> {
    v.as_u64()
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| FormatError::Document(format!("{what} must be a small non-negative integer")))
}

fn parse_mark(v: &Value) -> Result<Marking, FormatError> {
    match v {
        Value::String(s) if s == "o" => Ok(Marking::Origin),
        Value::Object(m) => {
            let leg = as_u32(m.get("leg").unwrap_or(&Value::Null), "mark.leg")?;
            let t = m
                .get("t")
                .and_then(|t| t.as_str())
                .ok_or_else(|| FormatError::Document("mark.t must be a string".into()))?;
            Ok(Marking::Ray { leg, t: rational_from_str(t)? })
        }
        _ => doc_err("mark must be \"o\" or {leg, t}"),
    }
}

pub fn placed_graph_from_json(s: &str) -> Result<PlacedGraph, FormatError> {
    let root: Value = serde_json::from_str(s)?;
    let n = as_u32(root.get("n").unwrap_or(&Value::Null), "n")?;
    let Some(vertices) = root.get("vertices").and_then(|v| v.as_array()) else {
        return doc_err("missing vertices array");
    };
    let mut graph = Graph::new();
    let mut omega = BTreeMap::new();
    for item in vertices {
        let id = as_u32(item.get("id").unwrap_or(&Value::Null), "vertex id")?;
        let mark = parse_mark(item.get("mark").unwrap_or(&Value::Null))?;
        graph.add_vertex(VertexId(id));
        omega.insert(VertexId(id), mark);
    }
    let Some(edges) = root.get("edges").and_then(|v| v.as_array()) else {
        return doc_err("missing edges array");
    };
    for e in edges {
        let Some(pair) = e.as_array().filter(|p| p.len() == 2) else {
            return doc_err("edges must be [u, v] pairs");
        };
        let u = VertexId(as_u32(&pair[0], "edge endpoint")?);
        let v = VertexId(as_u32(&pair[1], "edge endpoint")?);
        if !graph.contains_vertex(u) || !graph.contains_vertex(v) {
            return doc_err(format!("edge [{},{}] references unknown vertex", u.0, v.0));
        }
        graph.add_edge(u, v).map_err(|e| FormatError::Graph(e.to_string()))?;
    }
    Ok(PlacedGraph::new(graph, n, omega))
}

fn cvertex_to_json(c: CVertex) -> String {
    match c {
        CVertex::Branch => "\"branch\"".to_string(),
        CVertex::Leg { leg, j } => format!("{{\"leg\": {leg}, \"j\": {j}}}"),
    }
}

/// Canonical cover document.
pub fn cover_to_json(cover: &CombCover) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"delta\": \"{}\",", rational_to_string(&cover.delta));
    let _ = writeln!(out, "  \"f\": {{");
    let entries: Vec<(&VertexId, &CVertex)> = cover.f.iter().collect();
    for (k, (v, c)) in entries.iter().enumerate() {
        let comma = if k + 1 == entries.len() { "" } else { "," };
        let _ = writeln!(out, "    \"{}\": {}{}", v.0, cvertex_to_json(**c), comma);
    }
    let _ = writeln!(out, "  }}");
    let _ = write!(out, "}}");
    out
}

fn parse_cvertex(v: &Value) -> Result<CVertex, FormatError> {
    match v {
        Value::String(s) if s == "branch" => Ok(CVertex::Branch),
        Value::Object(m) => {
            let leg = as_u32(m.get("leg").unwrap_or(&Value::Null), "image.leg")?;
            let j = as_u32(m.get("j").unwrap_or(&Value::Null), "image.j")?;
            if leg < 1 || j < 1 {
                return doc_err("image leg and j must be >= 1");
            }
            Ok(CVertex::Leg { leg, j })
        }
        _ => doc_err("image must be \"branch\" or {leg, j}"),
    }
}

pub fn cover_from_json(s: &str) -> Result<CombCover, FormatError> {
    let root: Value = serde_json::from_str(s)?;
    let delta = root
        .get("delta")
        .and_then(|d| d.as_str())
        .ok_or_else(|| FormatError::Document("missing delta".into()))?;
    let delta = rational_from_str(delta)?;
    let Some(fmap) = root.get("f").and_then(|f| f.as_object()) else {
        return doc_err("missing f map");
    };
    let mut f = BTreeMap::new();
    for (key, val) in fmap {
        let id: u32 = key
            .parse()
            .map_err(|_| FormatError::Document(format!("bad vertex key {key:?}")))?;
        f.insert(VertexId(id), parse_cvertex(val)?);
    }
    Ok(CombCover { f, delta })
}
