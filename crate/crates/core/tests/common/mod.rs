#![allow(dead_code)]

use nngfl::{grid_graph_2d, path_graph, Graph, SignConstraint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const MODES: [SignConstraint; 3] = [
    SignConstraint::Nonnegative,
    SignConstraint::Nonpositive,
    SignConstraint::Unconstrained,
];

#[derive(Debug, Clone, Copy)]
pub enum GraphKind {
    Path,
    Grid,
    Random,
}

pub const GRAPH_KINDS: [GraphKind; 3] = [GraphKind::Path, GraphKind::Grid, GraphKind::Random];

/// A graph with at most `max_d` nodes (at least 2) and unit weights.
pub fn random_graph(rng: &mut ChaCha8Rng, kind: GraphKind, max_d: usize) -> Graph {
    match kind {
        GraphKind::Path => path_graph(rng.random_range(2..=max_d)).unwrap(),
        GraphKind::Grid => loop {
            let rows = rng.random_range(1..=max_d);
            let cols = rng.random_range(1..=max_d / rows);
            if rows * cols >= 2 {
                break grid_graph_2d(rows, cols).unwrap();
            }
        },
        GraphKind::Random => {
            let d = rng.random_range(2..=max_d);
            let p = rng.random_range(0.2..0.7);
            let mut edges = Vec::new();
            for i in 0..d {
                for j in i + 1..d {
                    if rng.random_bool(p) {
                        edges.push((i, j, 1.0));
                    }
                }
            }
            Graph::from_edges(d, edges).unwrap()
        }
    }
}

/// Same topology with weights drawn from `[lo, hi)`.
pub fn reweight(rng: &mut ChaCha8Rng, g: &Graph, lo: f64, hi: f64) -> Graph {
    let edges: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .map(|e| (e.i, e.j, rng.random_range(lo..hi)))
        .collect();
    Graph::from_edges(g.num_nodes(), edges).unwrap()
}

pub fn normal_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let v: f64 = StandardNormal.sample(rng);
            scale * v
        })
        .collect()
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
