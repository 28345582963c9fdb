//! Variable-adjacency graphs.
//!
//! Nodes are variables, edges are fusion pairs `(i, j, w)` stored once with
//! `i < j`. An adjacency index is built at construction so the flow solver can
//! walk neighborhoods without rebuilding it on every proximal step.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<Edge>,
    // CSR adjacency: for node u, adj[offsets[u]..offsets[u + 1]] holds (neighbor, edge index).
    offsets: Vec<usize>,
    adj: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from an edge list.
    ///
    /// Endpoints are reordered so that `i < j` and zero-weight edges are
    /// dropped. Everything else that breaks an invariant is an error.
    pub fn from_edges<I>(num_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut kept = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop on node {a}")));
            }
            if w == 0.0 {
                continue;
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            kept.push(Edge { i, j, w });
        }
        let graph = Self::assemble(num_nodes, kept);
        graph.validate()?;
        Ok(graph)
    }

    /// A graph with no edges.
    pub fn empty(num_nodes: usize) -> Self {
        Self::assemble(num_nodes, Vec::new())
    }

    fn assemble(num_nodes: usize, edges: Vec<Edge>) -> Self {
        let mut degree = vec![0usize; num_nodes + 1];
        for e in &edges {
            if e.i < num_nodes && e.j < num_nodes {
                degree[e.i] += 1;
                degree[e.j] += 1;
            }
        }
        let mut offsets = vec![0usize; num_nodes + 1];
        for u in 0..num_nodes {
            offsets[u + 1] = offsets[u] + degree[u];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![(0, 0); offsets[num_nodes]];
        for (k, e) in edges.iter().enumerate() {
            if e.i < num_nodes && e.j < num_nodes {
                adj[fill[e.i]] = (e.j, k);
                fill[e.i] += 1;
                adj[fill[e.j]] = (e.i, k);
                fill[e.j] += 1;
            }
        }
        Graph {
            num_nodes,
            edges,
            offsets,
            adj,
        }
    }

    /// Checks every invariant and reports the first one violated.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.edges.len());
        for e in &self.edges {
            if e.i >= self.num_nodes || e.j >= self.num_nodes {
                return Err(Error::NodeOutOfRange {
                    i: e.i,
                    j: e.j,
                    num_nodes: self.num_nodes,
                });
            }
            if e.i >= e.j {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) is not stored with i < j",
                    e.i, e.j
                )));
            }
            if !seen.insert((e.i, e.j)) {
                return Err(Error::DuplicateEdge { i: e.i, j: e.j });
            }
            if !(e.w > 0.0) || !e.w.is_finite() {
                return Err(Error::NonpositiveWeight {
                    i: e.i,
                    j: e.j,
                    w: e.w,
                });
            }
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `u` as `(neighbor, edge index)` pairs.
    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.w).collect()
    }

    /// Connected components, ignoring edges for which `active` is false.
    /// Components are listed in order of their smallest node.
    pub fn components_where(&self, active: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.num_nodes];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for root in 0..self.num_nodes {
            if label[root] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![root];
            label[root] = id;
            stack.push(root);
            while let Some(u) = stack.pop() {
                for &(v, k) in self.neighbors(u) {
                    if label[v] == usize::MAX && active(k) {
                        label[v] = id;
                        members.push(v);
                        stack.push(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Parses the edge-list text format: a `nodes <N>` header followed by
    /// `i j w` lines. Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let mut parts = header.split_whitespace();
        let num_nodes = match (parts.next(), parts.next(), parts.next()) {
            (Some("nodes"), Some(n), None) => n
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad node count {n:?}: {e}")))?,
            _ => return Err(Error::Parse(format!("expected `nodes <N>` header, got {header:?}"))),
        };
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected `i j w`, got {line:?}",
                    lineno + 1
                )));
            }
            let bad = |what: &str, e: &dyn std::fmt::Display| {
                Error::Parse(format!("line {}: bad {what}: {e}", lineno + 1))
            };
            let i = fields[0].parse::<usize>().map_err(|e| bad("node index", &e))?;
            let j = fields[1].parse::<usize>().map_err(|e| bad("node index", &e))?;
            let w = fields[2].parse::<f64>().map_err(|e| bad("weight", &e))?;
            edges.push((i, j, w));
        }
        Self::from_edges(num_nodes, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("nodes {}\n", self.num_nodes);
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.i, e.j, e.w);
        }
        out
    }
}

/// Path graph 0 - 1 - ... - (n-1) with unit weights.
pub fn path_graph(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument("path graph needs at least one node".into()));
    }
    Graph::from_edges(n, (1..n).map(|k| (k - 1, k, 1.0)))
}

/// 4-neighborhood grid, row-major node numbering, unit weights.
pub fn grid_graph_2d(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "grid dimensions must be positive, got {rows}x{cols}"
        )));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1), 1.0));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c), 1.0));
            }
        }
    }
    Graph::from_edges(rows * cols, edges)
}

/// 6-neighborhood voxel grid, x fastest, unit weights.
pub fn grid_graph_3d(nx: usize, ny: usize, nz: usize) -> Result<Graph> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::InvalidArgument(format!(
            "grid dimensions must be positive, got {nx}x{ny}x{nz}"
        )));
    }
    let id = |x: usize, y: usize, z: usize| (z * ny + y) * nx + x;
    let mut edges = Vec::new();
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                if x + 1 < nx {
                    edges.push((id(x, y, z), id(x + 1, y, z), 1.0));
                }
                if y + 1 < ny {
                    edges.push((id(x, y, z), id(x, y + 1, z), 1.0));
                }
                if z + 1 < nz {
                    edges.push((id(x, y, z), id(x, y, z + 1), 1.0));
                }
            }
        }
    }
    Graph::from_edges(nx * ny * nz, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_2d_counts() {
        let g = grid_graph_2d(2, 2).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (4, 4));
        let g = grid_graph_2d(1, 1).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (1, 0));
        let g = grid_graph_2d(3, 3).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (9, 12));
    }

    #[test]
    fn grid_2d_edge_count_formula_exhaustive() {
        for r in 1..=20 {
            for c in 1..=20 {
                let g = grid_graph_2d(r, c).unwrap();
                assert_eq!(g.num_edges(), r * (c - 1) + c * (r - 1), "{r}x{c}");
                assert!(g.edges().iter().all(|e| e.w == 1.0 && e.i < e.j));
            }
        }
    }

    #[test]
    fn grid_3d_counts() {
        let g = grid_graph_3d(1, 1, 1).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (1, 0));
        let g = grid_graph_3d(2, 1, 1).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (2, 1));
        let g = grid_graph_3d(2, 2, 2).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (8, 12));
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(grid_graph_2d(0, 3), Err(Error::InvalidArgument(_))));
        assert!(matches!(grid_graph_3d(2, 0, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn construction_is_canonical() {
        assert_eq!(grid_graph_2d(5, 7).unwrap(), grid_graph_2d(5, 7).unwrap());
        assert_eq!(grid_graph_3d(3, 4, 2).unwrap(), grid_graph_3d(3, 4, 2).unwrap());
    }

    #[test]
    fn validate_reports_first_violation() {
        assert!(grid_graph_2d(2, 2).unwrap().validate().is_ok());
        assert!(matches!(
            Graph::from_edges(3, [(3, 1, 1.0)]),
            Err(Error::NodeOutOfRange { i: 1, j: 3, .. })
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1, 1.0), (0, 1, 1.0)]),
            Err(Error::DuplicateEdge { i: 0, j: 1 })
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge { .. })
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1, -1.0)]),
            Err(Error::NonpositiveWeight { .. })
        ));
    }

    #[test]
    fn zero_weight_edges_dropped() {
        let g = Graph::from_edges(3, [(0, 1, 0.0), (2, 1, 0.5)]).unwrap();
        assert_eq!(g.edges(), &[Edge { i: 1, j: 2, w: 0.5 }]);
    }

    #[test]
    fn edge_list_text_roundtrip() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (1, 3, 2.5)]).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "nodes 4\n0 1 1\n1 3 2.5\n");
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
        assert!(Graph::parse_edge_list("0 1 1\n").is_err());
        assert!(Graph::parse_edge_list("nodes 2\n0 1\n").is_err());
    }

    #[test]
    fn disconnected_components() {
        let g = Graph::from_edges(5, [(0, 1, 1.0), (3, 4, 1.0)]).unwrap();
        let comps = g.components_where(|_| true);
        assert_eq!(comps, vec![vec![0, 1], vec![2], vec![3, 4]]);
        let comps = g.components_where(|k| k == 0);
        assert_eq!(comps.len(), 4);
    }
}
