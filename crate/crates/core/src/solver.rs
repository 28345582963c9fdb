//! Proximal-gradient solver (ISTA / FISTA) for the sign-constrained
//! generalized fused lasso with squared or logistic loss.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusedprox::{check_kkt, fused_prox, KktReport, ProxInstance, SignConstraint};
use crate::graph::Graph;
use crate::tvprox::tv_penalty;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    /// `sum_i log(1 + exp(-y_i (beta^T x_i + c)))` with a learned, unpenalized bias `c`.
    LogisticWithBias,
    /// `0.5 * ||X^T beta - y||^2`, no bias.
    Squared,
}

impl std::str::FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" | "logistic-with-bias" => Ok(Loss::LogisticWithBias),
            "squared" => Ok(Loss::Squared),
            other => Err(Error::Parse(format!("unknown loss {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    /// Features by samples (`d x N`).
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub graph: Graph,
    pub loss: Loss,
    pub constraint: SignConstraint,
}

impl Problem {
    pub fn validate(&self) -> Result<()> {
        let (d, n) = self.x.dim();
        if n != self.y.len() {
            return Err(Error::DimensionMismatch(format!(
                "X has {n} sample columns but y has {} labels",
                self.y.len()
            )));
        }
        if self.graph.num_nodes() != d {
            return Err(Error::DimensionMismatch(format!(
                "X has {d} feature rows but the graph has {} nodes",
                self.graph.num_nodes()
            )));
        }
        if !(self.lambda1 >= 0.0) || !(self.lambda2 >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "penalties must be nonnegative, got lambda1={} lambda2={}",
                self.lambda1, self.lambda2
            )));
        }
        if self.loss == Loss::LogisticWithBias {
            if let Some(bad) = self.y.iter().find(|v| **v != 1.0 && **v != -1.0) {
                return Err(Error::InvalidArgument(format!(
                    "logistic labels must be -1 or +1, found {bad}"
                )));
            }
        }
        Ok(())
    }

    pub fn num_features(&self) -> usize {
        self.x.nrows()
    }

    /// Full objective: loss plus both penalties.
    pub fn objective(&self, beta: ArrayView1<'_, f64>, bias: f64) -> f64 {
        let preds = predict(self.x.view(), beta);
        self.objective_from_preds(beta, &preds, bias)
    }

    fn objective_from_preds(&self, beta: ArrayView1<'_, f64>, preds: &Array1<f64>, bias: f64) -> f64 {
        loss_from_preds(self.loss, preds.view(), bias, self.y.view()) + self.penalty(beta)
    }

    pub fn penalty(&self, beta: ArrayView1<'_, f64>) -> f64 {
        let l1: f64 = beta.iter().map(|b| b.abs()).sum();
        let weights = self.graph.weights();
        let tv = match beta.as_slice() {
            Some(b) => tv_penalty(b, &self.graph, &weights),
            None => tv_penalty(&beta.to_vec(), &self.graph, &weights),
        };
        self.lambda1 * l1 + self.lambda2 * tv
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LipschitzMode {
    /// Largest squared singular value by power iteration, inflated by 1%.
    ExactSpectral,
    /// Start from `initial` and multiply by `growth` whenever the quadratic
    /// upper model is violated.
    Backtracking { initial: f64, growth: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Acceleration {
    Ista,
    Fista,
}

impl std::str::FromStr for Acceleration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ista" => Ok(Acceleration::Ista),
            "fista" => Ok(Acceleration::Fista),
            other => Err(Error::Parse(format!("unknown acceleration {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Relative objective change that ends the iteration.
    pub tol: f64,
    pub lipschitz: LipschitzMode,
    pub accel: Acceleration,
    /// Tolerance handed to the flow-based prox.
    pub prox_tol: f64,
    /// Seeds the power-iteration start vector.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 2000,
            tol: 1e-7,
            lipschitz: LipschitzMode::ExactSpectral,
            accel: Acceleration::Fista,
            prox_tol: 1e-10,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.prox_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if let LipschitzMode::Backtracking { initial, growth } = self.lipschitz {
            if !(initial > 0.0) || !(growth > 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "backtracking needs initial > 0 and growth > 1, got {initial} and {growth}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub beta: Vec<f64>,
    pub bias: f64,
    /// `F(beta_k)` for `k = 0, 1, ...`, starting at `beta_0 = 0`.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_l: f64,
}

impl FitResult {
    pub fn objective(&self) -> f64 {
        self.objective_trace.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `X^T v` for a features-by-samples `X`, walking rows contiguously and
/// skipping zero coefficients.
pub fn predict(x: ArrayView2<'_, f64>, v: ArrayView1<'_, f64>) -> Array1<f64> {
    if !x.is_standard_layout() {
        return x.t().dot(&v);
    }
    let mut out = Array1::<f64>::zeros(x.ncols());
    for (row, &c) in x.outer_iter().zip(v.iter()) {
        if c != 0.0 {
            out.scaled_add(c, &row);
        }
    }
    out
}

/// `log(1 + exp(-m))` without overflow.
fn log1p_exp_neg(m: f64) -> f64 {
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

/// `1 / (1 + exp(m))` without overflow.
fn sigmoid_neg(m: f64) -> f64 {
    if m > 0.0 {
        let e = (-m).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + m.exp())
    }
}

fn loss_from_preds(loss: Loss, preds: ArrayView1<'_, f64>, bias: f64, y: ArrayView1<'_, f64>) -> f64 {
    match loss {
        Loss::Squared => 0.5 * preds.iter().zip(y).map(|(p, t)| (p - t) * (p - t)).sum::<f64>(),
        Loss::LogisticWithBias => preds
            .iter()
            .zip(y)
            .map(|(p, t)| log1p_exp_neg(t * (p + bias)))
            .sum(),
    }
}

/// Per-sample derivative of the loss with respect to the prediction.
fn dloss_from_preds(loss: Loss, preds: ArrayView1<'_, f64>, bias: f64, y: ArrayView1<'_, f64>) -> Array1<f64> {
    match loss {
        Loss::Squared => &preds - &y,
        Loss::LogisticWithBias => preds
            .iter()
            .zip(y)
            .map(|(p, t)| -t * sigmoid_neg(t * (p + bias)))
            .collect(),
    }
}

/// Logistic loss with bias and its exact gradient in `(beta, c)`.
pub fn logistic_loss_grad(
    beta: ArrayView1<'_, f64>,
    c: f64,
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
) -> (f64, Array1<f64>, f64) {
    let preds = predict(x, beta);
    let loss = loss_from_preds(Loss::LogisticWithBias, preds.view(), c, y);
    let r = dloss_from_preds(Loss::LogisticWithBias, preds.view(), c, y);
    (loss, x.dot(&r), r.sum())
}

pub fn squared_loss_grad(beta: ArrayView1<'_, f64>, x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> (f64, Array1<f64>) {
    let preds = predict(x, beta);
    let loss = loss_from_preds(Loss::Squared, preds.view(), 0.0, y);
    let r = dloss_from_preds(Loss::Squared, preds.view(), 0.0, y);
    (loss, x.dot(&r))
}

const LIPSCHITZ_FLOOR: f64 = 1e-12;
const LANCZOS_MAX_STEPS: usize = 400;

/// Upper estimate of the Lipschitz constant of the loss gradient.
///
/// Squared loss: `sigma_max(X)^2`. Logistic: `sigma_max([X; 1^T])^2 / 4`, the
/// row of ones accounting for the bias. The eigenvalue comes from Lanczos
/// with full reorthogonalization on the sample-side Gram operator and is
/// inflated by 1%. An all-zero design returns a small positive floor.
pub fn estimate_lipschitz(x: ArrayView2<'_, f64>, loss: Loss, seed: u64) -> Result<f64> {
    let n = x.ncols();
    if x.nrows() == 0 || n == 0 {
        return Err(Error::InvalidArgument("design matrix is empty".into()));
    }
    let with_bias = loss == Loss::LogisticWithBias;
    let apply = |u: &Array1<f64>| -> Array1<f64> {
        let mut out = predict(x, x.dot(u).view());
        if with_bias {
            out += u.sum();
        }
        out
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Array1<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = q.dot(&q).sqrt();
    q /= norm;

    let steps = n.min(LANCZOS_MAX_STEPS);
    let mut basis: Vec<Array1<f64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut ritz_prev = f64::NAN;
    let mut ritz = 0.0;
    let mut converged = false;
    for _ in 0..steps {
        let mut w = apply(&q);
        let a = w.dot(&q);
        alpha.push(a);
        basis.push(q);
        // two passes of Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = w.dot(v);
                w.scaled_add(-c, v);
            }
        }
        ritz = largest_tridiagonal_eigenvalue(&alpha, &beta);
        let b = w.dot(&w).sqrt();
        if b <= 1e-13 * ritz.abs().max(f64::MIN_POSITIVE) || ritz == 0.0 {
            converged = true;
            break;
        }
        if (ritz - ritz_prev).abs() <= 1e-10 * ritz {
            converged = true;
            break;
        }
        ritz_prev = ritz;
        beta.push(b);
        q = w / b;
    }
    if !converged && basis.len() < n {
        return Err(Error::SolverFailure {
            stage: "lanczos",
            residual: (ritz - ritz_prev).abs() / ritz,
            best: basis.last().map(|v| v.to_vec()).unwrap_or_default(),
        });
    }
    let sigma_sq = ritz.max(0.0) * 1.01;
    let l = if with_bias { sigma_sq / 4.0 } else { sigma_sq };
    Ok(l.max(LIPSCHITZ_FLOOR))
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `a` and off-diagonal `b` (`b.len() == a.len() - 1`), by Sturm bisection.
fn largest_tridiagonal_eigenvalue(a: &[f64], b: &[f64]) -> f64 {
    let k = a.len();
    let radius = |i: usize| {
        let left = if i > 0 { b[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < k { b[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..k).map(|i| a[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..k).map(|i| a[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    // number of eigenvalues strictly below `s`
    let below = |s: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..k {
            let off = if i > 0 { b[i - 1] * b[i - 1] / d } else { 0.0 };
            d = a[i] - s - off;
            if d == 0.0 {
                d = -f64::EPSILON * (s.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Minimizes the composite objective from `beta_0 = 0`, `c_0 = 0`.
///
/// Returns the best iterate seen. In ISTA mode the recorded trace is
/// nonincreasing: a step that would raise the objective (possible only
/// through rounding or an inexact prox) ends the run instead.
pub fn fit(p: &Problem, cfg: &SolverConfig) -> Result<FitResult> {
    p.validate()?;
    cfg.validate()?;
    let d = p.num_features();
    let n = p.y.len();
    let weights = p.graph.weights();
    let fit_bias = p.loss == Loss::LogisticWithBias;

    let mut lip = match cfg.lipschitz {
        LipschitzMode::ExactSpectral => estimate_lipschitz(p.x.view(), p.loss, cfg.seed)?,
        LipschitzMode::Backtracking { initial, .. } => initial,
    };

    let mut beta = Array1::<f64>::zeros(d);
    let mut bias = 0.0;
    let mut preds = Array1::<f64>::zeros(n);
    let mut f_prev = p.objective_from_preds(beta.view(), &preds, bias);
    if !f_prev.is_finite() {
        return Err(Error::NumericalFailure {
            stage: "fit",
            value: f_prev,
            iterations: 0,
            trace: vec![f_prev],
        });
    }
    let mut trace = vec![f_prev];
    let mut best = (f_prev, beta.clone(), bias);

    // extrapolated point
    let mut y_beta = beta.clone();
    let mut y_bias = bias;
    let mut y_preds = preds.clone();
    let mut t = 1.0f64;

    let mut converged = false;
    let mut iterations = 0;
    let mut theta_edge = vec![0.0; weights.len()];

    for k in 1..=cfg.max_iters {
        iterations = k;
        let y_loss = loss_from_preds(p.loss, y_preds.view(), y_bias, p.y.view());
        let r = dloss_from_preds(p.loss, y_preds.view(), y_bias, p.y.view());
        let grad = p.x.dot(&r);
        let grad_bias = if fit_bias { r.sum() } else { 0.0 };

        let (new_beta, new_bias, new_preds, new_loss) = loop {
            let step = 1.0 / lip;
            let z: Vec<f64> = y_beta.iter().zip(&grad).map(|(b, g)| b - step * g).collect();
            for (te, w) in theta_edge.iter_mut().zip(&weights) {
                *te = p.lambda2 * w / lip;
            }
            let inst = ProxInstance {
                z: &z,
                graph: &p.graph,
                theta_node: p.lambda1 / lip,
                theta_edge: &theta_edge,
                constraint: p.constraint,
            };
            let cand = Array1::from(fused_prox(&inst, cfg.prox_tol)?);
            let cand_bias = if fit_bias { y_bias - step * grad_bias } else { 0.0 };
            let cand_preds = predict(p.x.view(), cand.view());
            let cand_loss = loss_from_preds(p.loss, cand_preds.view(), cand_bias, p.y.view());

            if let LipschitzMode::Backtracking { growth, .. } = cfg.lipschitz {
                let db = &cand - &y_beta;
                let dc = cand_bias - y_bias;
                let model = y_loss + grad.dot(&db) + grad_bias * dc + 0.5 * lip * (db.dot(&db) + dc * dc);
                if cand_loss.is_finite() && cand_loss > model + 1e-12 * model.abs().max(1.0) {
                    lip *= growth;
                    continue;
                }
            }
            break (cand, cand_bias, cand_preds, cand_loss);
        };

        let f_new = new_loss + p.penalty(new_beta.view());
        if !f_new.is_finite() {
            trace.push(f_new);
            return Err(Error::NumericalFailure {
                stage: "fit",
                value: f_new,
                iterations: k,
                trace,
            });
        }
        if cfg.accel == Acceleration::Ista && f_new > f_prev {
            converged = f_new - f_prev <= cfg.tol * (1.0 + f_prev.abs());
            iterations = k - 1;
            break;
        }
        trace.push(f_new);
        if f_new < best.0 {
            best = (f_new, new_beta.clone(), new_bias);
        }

        match cfg.accel {
            Acceleration::Fista => {
                let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
                let momentum = (t - 1.0) / t_next;
                y_beta = &new_beta + &((&new_beta - &beta) * momentum);
                y_bias = new_bias + momentum * (new_bias - bias);
                y_preds = &new_preds + &((&new_preds - &preds) * momentum);
                t = t_next;
            }
            Acceleration::Ista => {
                y_beta = new_beta.clone();
                y_bias = new_bias;
                y_preds = new_preds.clone();
            }
        }
        beta = new_beta;
        bias = new_bias;
        preds = new_preds;

        let change = (f_new - f_prev).abs();
        f_prev = f_new;
        if change <= cfg.tol * (1.0 + f_new.abs()) {
            converged = true;
            break;
        }
    }

    let (_, beta, bias) = best;
    Ok(FitResult {
        beta: beta.to_vec(),
        bias,
        objective_trace: trace,
        iterations,
        converged,
        final_l: lip,
    })
}

/// Optimality residual of the full problem at `(beta, bias)`.
///
/// The stationarity report is that of the prox subproblem centred at
/// `beta - grad loss(beta)` with unit step, whose residual coincides with
/// the subgradient residual of the full objective. The second value is the
/// bias gradient (zero for the squared loss).
pub fn full_kkt(p: &Problem, beta: &[f64], bias: f64, tol: f64) -> Result<(KktReport, f64)> {
    p.validate()?;
    let b = ArrayView1::from(beta);
    let (grad, grad_bias) = match p.loss {
        Loss::Squared => {
            let (_, g) = squared_loss_grad(b, p.x.view(), p.y.view());
            (g, 0.0)
        }
        Loss::LogisticWithBias => {
            let (_, g, gc) = logistic_loss_grad(b, bias, p.x.view(), p.y.view());
            (g, gc)
        }
    };
    let z: Vec<f64> = beta.iter().zip(&grad).map(|(b, g)| b - g).collect();
    let theta_edge: Vec<f64> = p.graph.weights().iter().map(|w| p.lambda2 * w).collect();
    let inst = ProxInstance {
        z: &z,
        graph: &p.graph,
        theta_node: p.lambda1,
        theta_edge: &theta_edge,
        constraint: p.constraint,
    };
    Ok((check_kkt(beta, &inst, tol), grad_bias))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::path_graph;
    use ndarray::array;

    #[test]
    fn logistic_at_origin() {
        let x = array![[1.0, -2.0, 0.5], [0.3, 0.0, 4.0]];
        let y = array![1.0, 1.0, -1.0];
        let (loss, _, gc) = logistic_loss_grad(Array1::zeros(2).view(), 0.0, x.view(), y.view());
        assert!((loss - 3.0 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(gc, -0.5);
    }

    #[test]
    fn logistic_saturated_margins() {
        let x = array![[1.0, -1.0]];
        let y = array![1.0, -1.0];
        let (loss, g, gc) = logistic_loss_grad(array![1e4].view(), 0.0, x.view(), y.view());
        assert!(loss >= 0.0 && loss < 1e-300);
        assert!(g[0].abs() < 1e-300 && gc.abs() < 1e-300);
        let (loss, g, _) = logistic_loss_grad(array![-1e3].view(), 0.0, x.view(), y.view());
        assert!((loss - 2e3).abs() < 1e-9);
        assert!(g.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn squared_hand_values() {
        let (loss, g) = squared_loss_grad(array![0.0, 0.0].view(), Array2::eye(2).view(), array![0.0, 0.0].view());
        assert_eq!((loss, g[0], g[1]), (0.0, 0.0, 0.0));
        let (loss, g) = squared_loss_grad(array![1.0].view(), array![[2.0]].view(), array![4.0].view());
        assert_eq!((loss, g[0]), (2.0, -4.0));
    }

    #[test]
    fn lipschitz_examples() {
        let l = estimate_lipschitz(Array2::eye(3).view(), Loss::Squared, 1).unwrap();
        assert!((l - 1.01).abs() < 1e-6, "{l}");
        let l = estimate_lipschitz(array![[3.0]].view(), Loss::LogisticWithBias, 1).unwrap();
        assert!((l - 10.0 / 4.0 * 1.01).abs() < 1e-6, "{l}");
        let l = estimate_lipschitz(Array2::zeros((3, 4)).view(), Loss::Squared, 1).unwrap();
        assert_eq!(l, LIPSCHITZ_FLOOR);
    }

    #[test]
    fn lipschitz_matches_largest_singular_value() {
        let x = Array2::from_diag(&array![1.0, 2.0, 3.0, 0.5]);
        let l = estimate_lipschitz(x.view(), Loss::Squared, 4).unwrap();
        assert!((l - 9.0 * 1.01).abs() < 1e-8, "{l}");
        // [[1, 1]] plus the bias row of ones has Gram [[2, 2], [2, 2]]
        let l = estimate_lipschitz(array![[1.0, 1.0]].view(), Loss::LogisticWithBias, 4).unwrap();
        assert!((l - 4.0 / 4.0 * 1.01).abs() < 1e-8, "{l}");
    }

    #[test]
    fn tridiagonal_eigenvalue() {
        // eigenvalues of [[2, 1], [1, 2]] are 1 and 3
        assert!((largest_tridiagonal_eigenvalue(&[2.0, 2.0], &[1.0]) - 3.0).abs() < 1e-12);
        assert!((largest_tridiagonal_eigenvalue(&[-4.0], &[]) + 4.0).abs() < 1e-12);
        // path Laplacian on 3 nodes: 0, 1, 3
        let l = largest_tridiagonal_eigenvalue(&[1.0, 2.0, 1.0], &[-1.0, -1.0]);
        assert!((l - 3.0).abs() < 1e-12, "{l}");
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.lipschitz = LipschitzMode::Backtracking { initial: 1.0, growth: 1.0 };
        assert!(cfg.validate().is_err());
        cfg = SolverConfig { tol: 0.0, ..SolverConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn problem_validation() {
        let p = Problem {
            x: Array2::zeros((2, 3)),
            y: array![1.0, 0.0, -1.0],
            lambda1: 0.0,
            lambda2: 0.0,
            graph: path_graph(2).unwrap(),
            loss: Loss::LogisticWithBias,
            constraint: SignConstraint::Nonnegative,
        };
        assert!(p.validate().is_err());
        let p = Problem { loss: Loss::Squared, ..p };
        assert!(p.validate().is_ok());
        let p = Problem { graph: path_graph(3).unwrap(), ..p };
        assert!(matches!(p.validate(), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn huge_lambda1_gives_zero() {
        let x = array![[1.0, 2.0, -1.0, 0.5], [0.0, 1.0, 1.0, -2.0], [3.0, -1.0, 0.2, 0.1]];
        let y = array![1.0, -2.0, 0.5, 3.0];
        let (_, g0) = squared_loss_grad(Array1::zeros(3).view(), x.view(), y.view());
        let gmax = g0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let p = Problem {
            x,
            y,
            lambda1: 2.0 * gmax,
            lambda2: 0.3,
            graph: path_graph(3).unwrap(),
            loss: Loss::Squared,
            constraint: SignConstraint::Nonnegative,
        };
        let res = fit(&p, &SolverConfig::default()).unwrap();
        assert_eq!(res.beta, vec![0.0; 3]);
        assert!(res.converged);
    }

    #[test]
    fn backtracking_grows_l() {
        let x = array![[1.0, 2.0, -1.0, 0.5], [0.0, 1.0, 1.0, -2.0]];
        let y = array![1.0, -1.0, -1.0, 1.0];
        let p = Problem {
            x,
            y,
            lambda1: 0.01,
            lambda2: 0.01,
            graph: path_graph(2).unwrap(),
            loss: Loss::LogisticWithBias,
            constraint: SignConstraint::Unconstrained,
        };
        let cfg = SolverConfig {
            lipschitz: LipschitzMode::Backtracking { initial: 1e-3, growth: 2.0 },
            ..SolverConfig::default()
        };
        let res = fit(&p, &cfg).unwrap();
        assert!(res.final_l > 1e-3);
        let exact = fit(&p, &SolverConfig::default()).unwrap();
        assert!((res.objective() - exact.objective()).abs() < 1e-5);
    }
}
