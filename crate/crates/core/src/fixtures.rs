//! Shared in-crate test fixtures.

use std::collections::BTreeMap;

use crate::graphword::{CVertex, Graph, Marking, PlacedGraph, VertexId};
use crate::ratio;

fn vid(i: u32) -> VertexId {
    VertexId(i)
}

/// A path graph with the given marks, vertex ids 0..len.
pub fn path_graph(marks: Vec<Marking>, n: u32) -> PlacedGraph {
    let count = marks.len() as u32;
    let graph =
        Graph::from_parts((0..count).map(vid), (0..count - 1).map(|i| (vid(i), vid(i + 1))))
            .unwrap();
    let omega = marks.into_iter().enumerate().map(|(i, m)| (vid(i as u32), m)).collect();
    PlacedGraph::new(graph, n, omega)
}

/// The 17-vertex across-the-branch example (n = 3): marks
/// b(0,1/2), o, b(1,3/4), o, b(2,0), o, b(3,1), o, b(0,2/5), o, b(1,1/2), o,
/// b(2,1/3), o, b(3,1/2), o, b(0,1), with images descending leg 3, crossing
/// the branch via leg 2, and ascending leg 1.
pub fn figure3() -> (PlacedGraph, BTreeMap<VertexId, CVertex>) {
    let marks = vec![
        Marking::ray(0, ratio(1, 2)),
        Marking::Origin,
        Marking::ray(1, ratio(3, 4)),
        Marking::Origin,
        Marking::ray(2, ratio(0, 1)),
        Marking::Origin,
        Marking::ray(3, ratio(1, 1)),
        Marking::Origin,
        Marking::ray(0, ratio(2, 5)),
        Marking::Origin,
        Marking::ray(1, ratio(1, 2)),
        Marking::Origin,
        Marking::ray(2, ratio(1, 3)),
        Marking::Origin,
        Marking::ray(3, ratio(1, 2)),
        Marking::Origin,
        Marking::ray(0, ratio(1, 1)),
    ];
    let pg = path_graph(marks, 3);
    let images = [
        CVertex::leg(3, 5),
        CVertex::leg(3, 4),
        CVertex::leg(3, 3),
        CVertex::leg(3, 2),
        CVertex::leg(3, 1),
        CVertex::Branch,
        CVertex::leg(2, 1),
        CVertex::Branch,
        CVertex::leg(1, 1),
        CVertex::leg(1, 2),
        CVertex::leg(1, 3),
        CVertex::leg(1, 4),
        CVertex::leg(1, 5),
        CVertex::leg(1, 6),
        CVertex::leg(1, 7),
        CVertex::leg(1, 8),
        CVertex::leg(1, 9),
    ];
    let f = images.iter().enumerate().map(|(i, &c)| (vid(i as u32), c)).collect();
    (pg, f)
}
