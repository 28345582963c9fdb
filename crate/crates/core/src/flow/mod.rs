//! Minimum quadratic cost flow.
//!
//! The dual of the graph total-variation problem asks for antisymmetric edge
//! flows `xi` with `|xi_e| <= theta_e` minimizing `0.5 * ||z - s||^2`, where
//! `s_i` is the net flow leaving node `i`. Shifting every node by
//! `gamma_i = max(|z_i|, sum of incident theta)` turns this into a flow on a
//! source/sink network with nonnegative node targets `y = z + gamma`.
//!
//! The solver is a divide-and-conquer parametric max-flow: for a block of
//! nodes sharing one unknown potential it guesses the block mean, runs one
//! max-flow to find which nodes sit above that level, saturates the edges
//! crossing the cut and recurses on both sides. A block whose flow saturates
//! every source arc is already at its optimal common level.

mod dinic;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use dinic::Dinic;

/// Source/sink network for one total-variation dual.
#[derive(Debug, Clone, Serialize)]
pub struct FlowNetwork<'g> {
    #[serde(skip)]
    pub graph: &'g Graph,
    /// Edge capacities, one per graph edge.
    pub theta: Vec<f64>,
    /// Node shifts.
    pub gamma: Vec<f64>,
    /// Shifted node targets, `z + gamma`.
    pub y: Vec<f64>,
    /// The unshifted prox center. Kept to avoid recovering it as `y - gamma`.
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowSolution {
    /// Net flow along each edge from `edge.i` to `edge.j`.
    pub xi: Vec<f64>,
    /// Net outflow per node.
    pub s: Vec<f64>,
    /// `0.5 * ||z - s||^2`.
    pub dual_objective: f64,
}

pub fn build_network<'g>(z: &[f64], graph: &'g Graph, theta: &[f64]) -> Result<FlowNetwork<'g>> {
    if z.len() != graph.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "z has {} entries but the graph has {} nodes",
            z.len(),
            graph.num_nodes()
        )));
    }
    if theta.len() != graph.num_edges() {
        return Err(Error::DimensionMismatch(format!(
            "theta has {} entries but the graph has {} edges",
            theta.len(),
            graph.num_edges()
        )));
    }
    if let Some(t) = theta.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "edge capacities must be finite and nonnegative, got {t}"
        )));
    }
    let gamma: Vec<f64> = (0..z.len())
        .map(|u| {
            let incident: f64 = graph.neighbors(u).iter().map(|&(_, k)| theta[k]).sum();
            z[u].abs().max(incident)
        })
        .collect();
    let y = z.iter().zip(&gamma).map(|(a, b)| a + b).collect();
    Ok(FlowNetwork {
        graph,
        theta: theta.to_vec(),
        gamma,
        y,
        z: z.to_vec(),
    })
}

/// Net outflow per node for the given edge flows.
pub fn aggregate(graph: &Graph, xi: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; graph.num_nodes()];
    for (e, &x) in graph.edges().iter().zip(xi) {
        s[e.i] += x;
        s[e.j] -= x;
    }
    s
}

/// `0.5 * ||z - s||^2`.
pub fn dual_objective(z: &[f64], s: &[f64]) -> f64 {
    0.5 * z.iter().zip(s).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

/// Solves the quadratic-cost flow exactly up to floating point.
///
/// Blocks whose shifted targets already agree to within
/// `tol * (1 + ||z||_inf)` are not split further.
pub fn solve_quadratic_flow(net: &FlowNetwork<'_>, tol: f64) -> Result<FlowSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let graph = net.graph;
    let d = graph.num_nodes();
    let z = &net.z;
    let theta = &net.theta;
    let z_inf = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let spread_tol = tol * (1.0 + z_inf);
    let theta_max = theta.iter().fold(0.0f64, |m, v| m.max(*v));

    let mut xi = vec![0.0; graph.num_edges()];
    let mut shifted = z.clone();
    let mut local = vec![usize::MAX; d];
    let mut members: Vec<usize> = Vec::new();
    let mut pair_arcs: Vec<(usize, usize)> = Vec::new();
    let mut net_flow = Dinic::default();

    let mut stack = graph.components_where(|k| theta[k] > 0.0);
    stack.reverse();
    let mut budget = 2 * d + 8;

    while let Some(block) = stack.pop() {
        if block.len() < 2 {
            continue;
        }
        budget = budget.checked_sub(1).ok_or_else(|| Error::SolverFailure {
            stage: "quadratic flow",
            residual: f64::NAN,
            best: xi.clone(),
        })?;

        let n = block.len();
        let mean = block.iter().map(|&u| shifted[u]).sum::<f64>() / n as f64;
        let (lo, hi) = block.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &u| {
            (lo.min(shifted[u]), hi.max(shifted[u]))
        });
        if hi - lo <= spread_tol {
            continue;
        }

        for (k, &u) in block.iter().enumerate() {
            local[u] = k;
        }
        let (src, sink) = (n, n + 1);
        net_flow.reset(n + 2);
        let mut supply = 0.0;
        let mut scale = theta_max;
        for (k, &u) in block.iter().enumerate() {
            let c = shifted[u] - mean;
            scale = scale.max(c.abs());
            if c > 0.0 {
                net_flow.add_arc_pair(src, k, c, 0.0);
                supply += c;
            } else if c < 0.0 {
                net_flow.add_arc_pair(k, sink, -c, 0.0);
            }
        }
        pair_arcs.clear();
        for &u in &block {
            for &(v, e) in graph.neighbors(u) {
                if u < v && local[v] != usize::MAX && theta[e] > 0.0 {
                    let a = net_flow.add_arc_pair(local[u], local[v], theta[e], theta[e]);
                    pair_arcs.push((e, a));
                }
            }
        }

        let eps = 1e-14 * scale;
        let flow = net_flow.max_flow(src, sink, eps);
        let saturated = supply - flow <= 1e-12 * supply;

        let mut split = None;
        if !saturated {
            let reach = net_flow.reaches_sink(sink, eps);
            members.clear();
            members.extend((0..n).filter(|&k| !reach[k]).map(|k| block[k]));
            if !members.is_empty() && members.len() < n {
                split = Some(std::mem::take(&mut members));
            }
        }

        match split {
            None => {
                // optimal common level: keep the internal flows
                for &(e, a) in &pair_arcs {
                    // arcs were added from edge.i to edge.j
                    xi[e] = 0.5 * (net_flow.cap[a ^ 1] - net_flow.cap[a]);
                }
                for &u in &block {
                    local[u] = usize::MAX;
                }
            }
            Some(upper) => {
                let mut in_upper = vec![false; n];
                for &u in &upper {
                    in_upper[local[u]] = true;
                }
                let lower: Vec<usize> = block
                    .iter()
                    .copied()
                    .filter(|&u| !in_upper[local[u]])
                    .collect();
                for &(e, _) in &pair_arcs {
                    let edge = graph.edges()[e];
                    let (ui, uj) = (in_upper[local[edge.i]], in_upper[local[edge.j]]);
                    if ui != uj {
                        let t = theta[e];
                        let (hi_node, lo_node) = if ui { (edge.i, edge.j) } else { (edge.j, edge.i) };
                        xi[e] = if ui { t } else { -t };
                        shifted[hi_node] -= t;
                        shifted[lo_node] += t;
                    }
                }
                for &u in &block {
                    local[u] = usize::MAX;
                }
                stack.push(lower);
                stack.push(upper);
            }
        }
    }

    let s = aggregate(graph, &xi);
    let dual_objective = dual_objective(z, &s);
    Ok(FlowSolution {
        xi,
        s,
        dual_objective,
    })
}
