//! Cell graphs: connected undirected simple graphs, optionally with loops.
//!
//! Vertices are labelled `1..=n`. Loops are stored but never contribute to
//! input sets or degrees, and a loop makes the graph non-bipartite.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Connected undirected simple graph with optional loops.
///
/// Immutable after construction; all queries are read-only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellGraph {
    n: usize,
    /// Canonicalized as (min, max), sorted, no duplicates.
    edges: Vec<(usize, usize)>,
    loops: BTreeSet<usize>,
    /// adj[v-1] = sorted input set I(v), loops excluded.
    adj: Vec<Vec<usize>>,
}

/// A 2-colouring of the vertex set: every edge crosses the parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub part1: Vec<usize>,
    pub part2: Vec<usize>,
}

impl Bipartition {
    /// Which part (1 or 2) vertex `v` belongs to.
    pub fn part_of(&self, v: usize) -> usize {
        if self.part1.contains(&v) {
            1
        } else {
            2
        }
    }
}

/// Serialized form: `{"n": int, "edges": [[u,v],...], "loops": [v,...]}`.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    loops: Vec<usize>,
}

impl CellGraph {
    /// Builds a graph from an edge list, rejecting out-of-range endpoints,
    /// duplicate edges, self-pairs and disconnected graphs.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::with_loops(n, edges, &[])
    }

    pub fn with_loops(n: usize, edges: &[(usize, usize)], loops: &[usize]) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut canon: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u < 1 || u > n {
                return Err(Error::VertexOutOfRange(u, n));
            }
            if v < 1 || v > n {
                return Err(Error::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!(
                    "self-pair ({u},{v}) must be declared as a loop"
                )));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if canon.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        let mut loop_set = BTreeSet::new();
        for &v in loops {
            if v < 1 || v > n {
                return Err(Error::VertexOutOfRange(v, n));
            }
            loop_set.insert(v);
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &canon {
            adj[u - 1].push(v);
            adj[v - 1].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = CellGraph { n, edges: canon, loops: loop_set, adj };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// Cycle C_n, n >= 3.
    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("ring needs n >= 3, got {n}")));
        }
        let edges: Vec<_> = (1..=n).map(|i| (i, i % n + 1)).collect();
        Self::new(n, &edges)
    }

    /// Complete graph K_n, n >= 2.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph(format!("complete graph needs n >= 2, got {n}")));
        }
        let mut edges = Vec::new();
        for u in 1..=n {
            for v in (u + 1)..=n {
                edges.push((u, v));
            }
        }
        Self::new(n, &edges)
    }

    /// Complete bipartite graph K_{m,n} with part 1 = {1..m}, part 2 = {m+1..m+n}.
    pub fn complete_bipartite(m: usize, n: usize) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::InvalidGraph("complete bipartite parts must be nonempty".into()));
        }
        let mut edges = Vec::new();
        for u in 1..=m {
            for v in (m + 1)..=(m + n) {
                edges.push((u, v));
            }
        }
        Self::new(m + n, &edges)
    }

    /// Star K_{1,n-1} centred at vertex 1, n >= 2 total vertices.
    pub fn star(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph(format!("star needs n >= 2, got {n}")));
        }
        let edges: Vec<_> = (2..=n).map(|v| (1, v)).collect();
        Self::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn loops(&self) -> impl Iterator<Item = usize> + '_ {
        self.loops.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < 1 || v > self.n {
            Err(Error::VertexOutOfRange(v, self.n))
        } else {
            Ok(())
        }
    }

    /// Input set I(v): neighbours of v, loops excluded.
    pub fn neighbors(&self, v: usize) -> Result<&[usize]> {
        self.check_vertex(v)?;
        Ok(&self.adj[v - 1])
    }

    /// d(v) = |I(v)|.
    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.adj[v - 1].len())
    }

    /// Degrees of all vertices, indexed by v-1.
    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(|a| a.len()).collect()
    }

    /// Some(d) iff every vertex has degree d.
    pub fn is_regular(&self) -> Option<usize> {
        let d = self.adj[0].len();
        if self.adj.iter().all(|a| a.len() == d) {
            Some(d)
        } else {
            None
        }
    }

    /// Is the graph complete (all-to-all coupling)?
    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * (self.n - 1) / 2
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([1usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v - 1] {
                if !seen[u - 1] {
                    seen[u - 1] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == self.n
    }

    /// BFS 2-colouring. Returns the unique bipartition with vertex 1 in
    /// `part1`, or `None` if the graph has an odd cycle or a loop.
    pub fn bipartition(&self) -> Option<Bipartition> {
        if !self.loops.is_empty() {
            return None;
        }
        let mut colour = vec![u8::MAX; self.n];
        colour[0] = 0;
        let mut queue = VecDeque::from([1usize]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v - 1] {
                if colour[u - 1] == u8::MAX {
                    colour[u - 1] = 1 - colour[v - 1];
                    queue.push_back(u);
                } else if colour[u - 1] == colour[v - 1] {
                    return None;
                }
            }
        }
        let part1 = (1..=self.n).filter(|&v| colour[v - 1] == 0).collect();
        let part2 = (1..=self.n).filter(|&v| colour[v - 1] == 1).collect();
        Some(Bipartition { part1, part2 })
    }

    /// Some((d, m)) iff the graph is d-regular, bipartite and both parts
    /// have size m.
    pub fn is_dm_graph(&self) -> Option<(usize, usize)> {
        let d = self.is_regular()?;
        let bp = self.bipartition()?;
        if bp.part1.len() == bp.part2.len() {
            Some((d, bp.part1.len()))
        } else {
            None
        }
    }

    pub fn to_json_string(&self) -> String {
        let j = GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            loops: self.loops.iter().copied().collect(),
        };
        serde_json::to_string_pretty(&j).expect("graph serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: GraphJson = serde_json::from_str(s)?;
        let edges: Vec<_> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::with_loops(j.n, &edges, &j.loops)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn degree_examples() {
        // Star K_{1,3} with the centre labelled 2.
        let star = CellGraph::new(4, &[(2, 1), (2, 3), (2, 4)]).unwrap();
        assert_eq!(star.degree(2).unwrap(), 3);
        let edge = CellGraph::new(2, &[(1, 2)]).unwrap();
        assert_eq!(edge.degree(1).unwrap(), 1);
        let g = fixtures::figure2();
        assert_eq!(g.degree(2).unwrap(), 6);
        assert_eq!(g.degree(4).unwrap(), 5);
        assert_eq!(g.degree(6).unwrap(), 4);
        assert!(matches!(g.degree(11), Err(Error::VertexOutOfRange(11, 10))));
    }

    #[test]
    fn regularity() {
        assert_eq!(CellGraph::ring(5).unwrap().is_regular(), Some(2));
        assert_eq!(fixtures::figure2().is_regular(), None);
        assert_eq!(CellGraph::complete(4).unwrap().is_regular(), Some(3));
    }

    #[test]
    fn bipartition_examples() {
        let path = CellGraph::new(3, &[(1, 2), (2, 3)]).unwrap();
        let bp = path.bipartition().unwrap();
        assert_eq!(bp.part1, vec![1, 3]);
        assert_eq!(bp.part2, vec![2]);

        assert!(CellGraph::complete(3).unwrap().bipartition().is_none());

        let bp = fixtures::figure2().bipartition().unwrap();
        assert_eq!(bp.part1, vec![1, 3, 5, 7, 8, 9, 10]);
        assert_eq!(bp.part2, vec![2, 4, 6]);
    }

    #[test]
    fn loops_force_non_bipartite() {
        let g = CellGraph::with_loops(3, &[(1, 2), (2, 3)], &[2]).unwrap();
        assert!(g.bipartition().is_none());
        // Loops are excluded from degrees and input sets.
        assert_eq!(g.degree(2).unwrap(), 2);
        assert_eq!(g.neighbors(2).unwrap(), &[1, 3]);
    }

    #[test]
    fn dm_graph_examples() {
        assert_eq!(fixtures::cube_q3().is_dm_graph(), Some((3, 4)));
        assert_eq!(fixtures::figure3().is_dm_graph(), Some((3, 4)));
        assert_eq!(CellGraph::ring(5).unwrap().is_dm_graph(), None);
        // K_{2,3} is bipartite but not regular.
        assert_eq!(CellGraph::complete_bipartite(2, 3).unwrap().is_dm_graph(), None);
    }

    #[test]
    fn constructors() {
        let r4 = CellGraph::ring(4).unwrap();
        assert_eq!(r4.edges(), &[(1, 2), (1, 4), (2, 3), (3, 4)]);
        let k23 = CellGraph::complete_bipartite(2, 3).unwrap();
        assert_eq!(k23.edges().len(), 6);
        assert!(CellGraph::new(3, &[(1, 2), (2, 1), (2, 3)]).is_err());
        assert!(CellGraph::ring(2).is_err());
        assert!(CellGraph::new(4, &[(1, 2), (3, 4)]).is_err()); // disconnected
    }

    #[test]
    fn degree_sum_equality_on_bipartite_fixtures() {
        for g in [fixtures::figure2(), fixtures::figure3(), fixtures::cube_q3()] {
            let bp = g.bipartition().unwrap();
            let s1: usize = bp.part1.iter().map(|&v| g.degree(v).unwrap()).sum();
            let s2: usize = bp.part2.iter().map(|&v| g.degree(v).unwrap()).sum();
            assert_eq!(s1, s2);
        }
    }

    #[test]
    fn json_round_trip() {
        let g = fixtures::figure3();
        let s = g.to_json_string();
        let h = CellGraph::from_json_str(&s).unwrap();
        assert_eq!(g, h);
    }

    /// Exhaustively check: bipartition absent <=> an odd cycle exists,
    /// for every connected graph on up to 6 vertices (sampled by proptest
    /// over edge masks).
    #[test]
    fn bipartite_iff_no_odd_cycle_small() {
        for n in 2..=6usize {
            let pairs: Vec<(usize, usize)> = (1..=n)
                .flat_map(|u| ((u + 1)..=n).map(move |v| (u, v)))
                .collect();
            let m = pairs.len();
            for mask in 0u32..(1 << m) {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &e)| e)
                    .collect();
                let Ok(g) = CellGraph::new(n, &edges) else { continue };
                let has_odd = has_odd_cycle(&g);
                assert_eq!(g.bipartition().is_none(), has_odd, "n={n} mask={mask}");
            }
        }
    }

    /// Brute-force odd cycle search by DFS over all simple cycles.
    fn has_odd_cycle(g: &CellGraph) -> bool {
        fn dfs(g: &CellGraph, start: usize, v: usize, visited: &mut Vec<usize>) -> bool {
            for &u in g.neighbors(v).unwrap() {
                if u == start && visited.len() >= 3 && visited.len() % 2 == 1 {
                    return true;
                }
                if u > start && !visited.contains(&u) {
                    visited.push(u);
                    if dfs(g, start, u, visited) {
                        return true;
                    }
                    visited.pop();
                }
            }
            false
        }
        (1..=g.n()).any(|s| dfs(g, s, s, &mut vec![s]))
    }
}
