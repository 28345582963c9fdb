//! Proximal operator of the sign-constrained generalized fused lasso penalty.
//!
//! The total-variation prox is computed first; the l1 shrinkage and the sign
//! constraint are then applied coordinate by coordinate. Coordinates removed
//! by the threshold come out as exact zeros.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tvprox::{tv_prox, TvInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConstraint {
    Nonnegative,
    Nonpositive,
    Unconstrained,
}

impl SignConstraint {
    /// Projects a single coordinate onto the feasible half-line.
    pub fn project(self, v: f64) -> f64 {
        match self {
            SignConstraint::Nonnegative => v.max(0.0),
            SignConstraint::Nonpositive => v.min(0.0),
            SignConstraint::Unconstrained => v,
        }
    }

    /// Amount by which `v` violates the constraint.
    pub fn violation(self, v: f64) -> f64 {
        match self {
            SignConstraint::Nonnegative => (-v).max(0.0),
            SignConstraint::Nonpositive => v.max(0.0),
            SignConstraint::Unconstrained => 0.0,
        }
    }
}

impl std::str::FromStr for SignConstraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonnegative" | "nonneg" => Ok(SignConstraint::Nonnegative),
            "nonpositive" | "nonpos" => Ok(SignConstraint::Nonpositive),
            "unconstrained" | "none" => Ok(SignConstraint::Unconstrained),
            other => Err(Error::Parse(format!("unknown sign constraint {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProxInstance<'a> {
    pub z: &'a [f64],
    pub graph: &'a Graph,
    /// l1 threshold shared by every coordinate.
    pub theta_node: f64,
    /// Fusion threshold per edge.
    pub theta_edge: &'a [f64],
    pub constraint: SignConstraint,
}

impl ProxInstance<'_> {
    fn check(&self) -> Result<()> {
        if !(self.theta_node >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "node threshold must be nonnegative, got {}",
                self.theta_node
            )));
        }
        TvInstance::new(self.z, self.graph, self.theta_edge).map(|_| ())
    }

    pub fn tv(&self) -> TvInstance<'_> {
        TvInstance {
            z: self.z,
            graph: self.graph,
            theta: self.theta_edge,
        }
    }

    /// `0.5 * ||b - z||^2 + theta_node * ||b||_1 + TV(b)`; infinite when `b`
    /// violates the sign constraint.
    pub fn objective(&self, beta: &[f64]) -> f64 {
        if beta.iter().any(|&b| self.constraint.violation(b) > 0.0) {
            return f64::INFINITY;
        }
        let fit: f64 = beta.iter().zip(self.z).map(|(b, z)| (b - z) * (b - z)).sum();
        let l1: f64 = beta.iter().map(|b| b.abs()).sum();
        0.5 * fit + self.theta_node * l1 + crate::tvprox::tv_penalty(beta, self.graph, self.theta_edge)
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

pub fn fused_prox(inst: &ProxInstance<'_>, tol: f64) -> Result<Vec<f64>> {
    inst.check()?;
    match inst.constraint {
        SignConstraint::Nonpositive => {
            let flipped: Vec<f64> = inst.z.iter().map(|v| -v).collect();
            let mirror = ProxInstance {
                z: &flipped,
                constraint: SignConstraint::Nonnegative,
                ..*inst
            };
            let beta = fused_prox(&mirror, tol)?;
            Ok(beta.into_iter().map(|b| if b == 0.0 { 0.0 } else { -b }).collect())
        }
        SignConstraint::Nonnegative => {
            let tilde = tv_prox(&inst.tv(), tol)?;
            Ok(tilde
                .into_iter()
                .map(|b| soft_threshold(b, inst.theta_node).max(0.0))
                .collect())
        }
        SignConstraint::Unconstrained => {
            let tilde = tv_prox(&inst.tv(), tol)?;
            Ok(tilde
                .into_iter()
                .map(|b| soft_threshold(b, inst.theta_node))
                .collect())
        }
    }
}

/// Indices of exactly nonzero coefficients.
pub fn support(beta: &[f64]) -> Vec<usize> {
    beta.iter()
        .enumerate()
        .filter(|(_, b)| **b != 0.0)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktReport {
    pub max_stationarity_residual: f64,
    pub complementarity_violation: f64,
    pub feasibility_violation: f64,
}

impl KktReport {
    pub fn max(&self) -> f64 {
        self.max_stationarity_residual
            .max(self.complementarity_violation)
            .max(self.feasibility_violation)
    }
}

/// Evaluates the optimality conditions of the constrained prox at `beta`.
///
/// Coordinates with `|b_i| <= tol` are treated as zero and edges with
/// `|b_i - b_j| <= tol` as tied; their subgradients and multipliers are
/// chosen to minimize the stationarity residual. Subgradients of tied edges
/// are shared by both endpoints, so they are fitted jointly by an
/// accelerated projected gradient on the squared residual.
pub fn check_kkt(beta: &[f64], inst: &ProxInstance<'_>, tol: f64) -> KktReport {
    let d = inst.z.len();
    let theta_n = inst.theta_node;
    let mut base: Vec<f64> = beta.iter().zip(inst.z).map(|(b, z)| b - z).collect();
    let mut interval = vec![(0.0f64, 0.0f64); d];
    let mut feasibility = 0.0f64;

    for i in 0..d {
        let b = beta[i];
        feasibility = feasibility.max(inst.constraint.violation(b));
        if b.abs() > tol {
            base[i] += theta_n * b.signum();
        } else {
            interval[i] = match inst.constraint {
                SignConstraint::Unconstrained => (-theta_n, theta_n),
                SignConstraint::Nonnegative => (f64::NEG_INFINITY, theta_n),
                SignConstraint::Nonpositive => (-theta_n, f64::INFINITY),
            };
        }
    }

    let mut tied: Vec<(usize, usize, f64)> = Vec::new();
    for (e, &t) in inst.graph.edges().iter().zip(inst.theta_edge) {
        let diff = beta[e.i] - beta[e.j];
        if diff.abs() > tol {
            base[e.i] += t * diff.signum();
            base[e.j] -= t * diff.signum();
        } else if t > 0.0 {
            tied.push((e.i, e.j, t));
        }
    }

    let residual_at = |flow: &[f64], g: &mut Vec<f64>| {
        g.clear();
        g.extend_from_slice(&base);
        for (&(i, j, _), f) in tied.iter().zip(flow) {
            g[i] += f;
            g[j] -= f;
        }
        for (gi, &(lo, hi)) in g.iter_mut().zip(&interval) {
            *gi += (-*gi).clamp(lo, hi);
        }
    };

    let mut g = Vec::with_capacity(d);
    let mut flow = vec![0.0; tied.len()];
    residual_at(&flow, &mut g);
    if !tied.is_empty() {
        fit_tied_subgradients(&tied, &mut flow, &mut g, d, tol, &residual_at);
    }

    let stationarity = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // recover the multipliers from the chosen node terms
    let mut w = base.clone();
    for (&(i, j, _), f) in tied.iter().zip(&flow) {
        w[i] += f;
        w[j] -= f;
    }
    let mut complementarity = 0.0f64;
    for i in 0..d {
        if beta[i].abs() > tol {
            continue;
        }
        let v = (-w[i]).clamp(interval[i].0, interval[i].1);
        let alpha = match inst.constraint {
            SignConstraint::Nonnegative => (-theta_n - v).max(0.0),
            SignConstraint::Nonpositive => (v - theta_n).max(0.0),
            SignConstraint::Unconstrained => 0.0,
        };
        complementarity = complementarity.max((alpha * beta[i]).abs());
    }

    KktReport {
        max_stationarity_residual: stationarity,
        complementarity_violation: complementarity,
        feasibility_violation: feasibility,
    }
}

fn fit_tied_subgradients(
    tied: &[(usize, usize, f64)],
    flow: &mut [f64],
    g: &mut Vec<f64>,
    d: usize,
    tol: f64,
    residual_at: &impl Fn(&[f64], &mut Vec<f64>),
) {
    let mut degree = vec![0usize; d];
    for &(i, j, _) in tied {
        degree[i] += 1;
        degree[j] += 1;
    }
    let max_deg = degree.into_iter().max().unwrap_or(1).max(1) as f64;
    // gradient of 0.5 * ||g||^2 in the flows is Lipschitz with constant 2 * max degree
    let step = 1.0 / (2.0 * max_deg);
    let target = 1e-3 * tol;
    let max_iters = 200_000;

    let mut prev = flow.to_vec();
    let mut y = flow.to_vec();
    let mut t = 1.0f64;
    let mut best = (g.iter().fold(0.0f64, |m, v| m.max(v.abs())), flow.to_vec());
    let mut prev_obj = f64::INFINITY;

    for _ in 0..max_iters {
        residual_at(&y, g);
        for (k, &(i, j, cap)) in tied.iter().enumerate() {
            flow[k] = (y[k] - step * (g[i] - g[j])).clamp(-cap, cap);
        }
        residual_at(flow, g);
        let worst = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if worst < best.0 {
            best = (worst, flow.to_vec());
        }
        if worst <= target {
            break;
        }
        let obj: f64 = g.iter().map(|v| v * v).sum();
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if obj > prev_obj {
            // restart momentum
            t = 1.0;
            y.copy_from_slice(flow);
        } else {
            let momentum = (t - 1.0) / t_next;
            for k in 0..flow.len() {
                y[k] = flow[k] + momentum * (flow[k] - prev[k]);
            }
            t = t_next;
        }
        prev.copy_from_slice(flow);
        prev_obj = obj;
    }
    flow.copy_from_slice(&best.1);
    residual_at(flow, g);
}
