//! Total-variation proximal operator on a graph:
//! `argmin_b 0.5 * ||b - z||^2 + sum_e theta_e * |b_i - b_j|`.
//!
//! Solved through its flow dual; the primal point is read off the optimal
//! flows as `z - s`.

use crate::error::{Error, Result};
use crate::flow::{self, FlowSolution};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy)]
pub struct TvInstance<'a> {
    pub z: &'a [f64],
    pub graph: &'a Graph,
    pub theta: &'a [f64],
}

impl<'a> TvInstance<'a> {
    pub fn new(z: &'a [f64], graph: &'a Graph, theta: &'a [f64]) -> Result<Self> {
        let inst = TvInstance { z, graph, theta };
        inst.check()?;
        Ok(inst)
    }

    fn check(&self) -> Result<()> {
        if self.z.len() != self.graph.num_nodes() || self.theta.len() != self.graph.num_edges() {
            return Err(Error::DimensionMismatch(format!(
                "z/theta lengths {}/{} do not match graph with {} nodes and {} edges",
                self.z.len(),
                self.theta.len(),
                self.graph.num_nodes(),
                self.graph.num_edges()
            )));
        }
        if self.theta.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::InvalidArgument("edge thresholds must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Returns the prox point together with the dual flows that certify it.
pub fn tv_prox_with_flows(inst: &TvInstance<'_>, tol: f64) -> Result<(Vec<f64>, FlowSolution)> {
    inst.check()?;
    let net = flow::build_network(inst.z, inst.graph, inst.theta)?;
    let sol = flow::solve_quadratic_flow(&net, tol)?;
    let beta = inst.z.iter().zip(&sol.s).map(|(z, s)| z - s).collect();
    Ok((beta, sol))
}

pub fn tv_prox(inst: &TvInstance<'_>, tol: f64) -> Result<Vec<f64>> {
    tv_prox_with_flows(inst, tol).map(|(beta, _)| beta)
}

/// `sum_e theta_e * |b_i - b_j|`.
pub fn tv_penalty(beta: &[f64], graph: &Graph, theta: &[f64]) -> f64 {
    graph
        .edges()
        .iter()
        .zip(theta)
        .map(|(e, t)| t * (beta[e.i] - beta[e.j]).abs())
        .sum()
}

pub fn tv_objective(beta: &[f64], inst: &TvInstance<'_>) -> Result<f64> {
    inst.check()?;
    if beta.len() != inst.z.len() {
        return Err(Error::DimensionMismatch(format!(
            "beta has {} entries, expected {}",
            beta.len(),
            inst.z.len()
        )));
    }
    let fit: f64 = beta.iter().zip(inst.z).map(|(b, z)| (b - z) * (b - z)).sum();
    Ok(0.5 * fit + tv_penalty(beta, inst.graph, inst.theta))
}

/// Primal objective at `beta` minus the dual objective
/// `0.5 * ||z||^2 - 0.5 * ||z - s||^2` of the flows in `sol`.
///
/// Flows exceeding their capacity by more than `tol` are rejected.
pub fn tv_duality_gap(beta: &[f64], sol: &FlowSolution, inst: &TvInstance<'_>, tol: f64) -> Result<f64> {
    if sol.xi.len() != inst.graph.num_edges() {
        return Err(Error::DimensionMismatch(format!(
            "{} edge flows for {} edges",
            sol.xi.len(),
            inst.graph.num_edges()
        )));
    }
    for (k, (x, t)) in sol.xi.iter().zip(inst.theta).enumerate() {
        if x.abs() > t + tol {
            return Err(Error::InvalidArgument(format!(
                "flow {x} on edge {k} exceeds capacity {t}"
            )));
        }
    }
    let primal = tv_objective(beta, inst)?;
    let s = flow::aggregate(inst.graph, &sol.xi);
    let z_sq: f64 = inst.z.iter().map(|v| v * v).sum();
    let dual = 0.5 * z_sq - flow::dual_objective(inst.z, &s);
    Ok(primal - dual)
}
