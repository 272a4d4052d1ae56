//! Named fixture graphs used across the test suite and shipped as JSON
//! files in `fixtures/`.

use crate::graph::CellGraph;

/// Star on 4 cells with centre vertex 2.
pub fn figure1_star() -> CellGraph {
    CellGraph::new(4, &[(1, 2), (2, 3), (2, 4)]).unwrap()
}

/// 4 cells: a triangle {2,3,4} with a pendant vertex 1 attached to 2.
pub fn figure1_mixed() -> CellGraph {
    CellGraph::new(4, &[(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap()
}

/// 3-regular non-bipartite graph on 6 cells.
pub fn figure1_cubic() -> CellGraph {
    CellGraph::new(
        6,
        &[(1, 2), (2, 3), (2, 4), (3, 4), (3, 5), (4, 6), (5, 6), (1, 5), (1, 6)],
    )
    .unwrap()
}

/// Bipartite graph on 10 cells with parts {1,3,5,7,8,9,10} / {2,4,6} and
/// mixed degrees on both sides.
pub fn figure2() -> CellGraph {
    CellGraph::new(
        10,
        &[
            (1, 2),
            (2, 3),
            (3, 4),
            (3, 6),
            (2, 5),
            (4, 5),
            (2, 7),
            (4, 7),
            (2, 8),
            (4, 8),
            (6, 8),
            (2, 9),
            (6, 9),
            (4, 9),
            (6, 10),
        ],
    )
    .unwrap()
}

/// A (3,4)-graph on 8 cells with parts {1,2,3,4} / {5,6,7,8}.
pub fn figure3() -> CellGraph {
    CellGraph::new(
        8,
        &[
            (4, 8),
            (4, 7),
            (4, 6),
            (2, 8),
            (2, 5),
            (2, 6),
            (1, 6),
            (1, 5),
            (1, 7),
            (3, 7),
            (3, 5),
            (3, 8),
        ],
    )
    .unwrap()
}

/// Bipartite tree on 7 cells whose S^1-invariant Hessian appears
/// explicitly in the test suite.
pub fn figure4() -> CellGraph {
    CellGraph::new(7, &[(1, 2), (2, 3), (3, 4), (4, 6), (3, 5), (5, 7)]).unwrap()
}

/// The 3-cube graph Q3: vertices 1..=8, vertex v <-> bit pattern v-1.
pub fn cube_q3() -> CellGraph {
    let mut edges = Vec::new();
    for u in 0u32..8 {
        for b in 0..3 {
            let v = u ^ (1 << b);
            if u < v {
                edges.push((u as usize + 1, v as usize + 1));
            }
        }
    }
    CellGraph::new(8, &edges).unwrap()
}

/// K_{4,4} minus a perfect matching, parts {1..4} / {5..8}; a (3,4)-graph.
pub fn k44_minus_matching() -> CellGraph {
    let mut edges = Vec::new();
    for i in 1..=4usize {
        for j in 1..=4usize {
            if i != j {
                edges.push((i, 4 + j));
            }
        }
    }
    CellGraph::new(8, &edges).unwrap()
}

/// The Petersen graph: outer C5 on 1..=5, spokes to 6..=10, inner pentagram.
pub fn petersen() -> CellGraph {
    CellGraph::new(
        10,
        &[
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (1, 5),
            (1, 6),
            (2, 7),
            (3, 8),
            (4, 9),
            (5, 10),
            (6, 8),
            (8, 10),
            (7, 10),
            (7, 9),
            (6, 9),
        ],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shapes() {
        assert_eq!(figure1_star().degree(2).unwrap(), 3);
        assert_eq!(figure2().n(), 10);
        assert_eq!(figure3().is_dm_graph(), Some((3, 4)));
        assert_eq!(cube_q3().is_dm_graph(), Some((3, 4)));
        assert_eq!(k44_minus_matching().is_dm_graph(), Some((3, 4)));
        assert_eq!(petersen().is_regular(), Some(3));
        assert!(petersen().bipartition().is_none());
        assert_eq!(figure4().n(), 7);
    }

    /// The JSON fixture files shipped with the crate match the constructors.
    #[test]
    fn fixture_files_match() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
        for (name, g) in [
            ("figure1_star", figure1_star()),
            ("figure2", figure2()),
            ("figure3", figure3()),
            ("figure4", figure4()),
            ("cube_q3", cube_q3()),
            ("k44_minus_matching", k44_minus_matching()),
            ("petersen", petersen()),
            ("ring4", crate::graph::CellGraph::ring(4).unwrap()),
            ("ring5", crate::graph::CellGraph::ring(5).unwrap()),
        ] {
            let path = format!("{dir}/{name}.json");
            let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
            let parsed = CellGraph::from_json_str(&text).unwrap();
            assert_eq!(parsed, g, "fixture file {name}.json");
        }
    }
}
