//! Slow reference solvers used to cross-check the fast paths.
//!
//! None of these routines touch the max-flow code: the prox references work
//! on the edge-dual with a projected gradient, and the min-norm-point
//! reference runs Wolfe's algorithm over the cut function's base polytope
//! using Edmonds' greedy vertices. Sizes are guarded; these are meant for
//! instances with a few dozen variables at most.

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::flow::aggregate;
use crate::fusedprox::{ProxInstance, SignConstraint};
use crate::graph::Graph;
use crate::solver::{estimate_lipschitz, Loss, Problem};

pub const PROX_ORACLE_MAX_DIM: usize = 15;
pub const MNP_ORACLE_MAX_DIM: usize = 25;

#[derive(Debug, Clone)]
pub struct DualSolution {
    pub beta: Vec<f64>,
    /// Edge multipliers, `|u_e| <= theta_e`; for the pure total-variation
    /// case these are the dual flows.
    pub flows: Vec<f64>,
    /// Primal objective minus dual objective at the returned pair.
    pub gap: f64,
}

fn separable_prox(v: f64, theta: f64, constraint: SignConstraint) -> f64 {
    match constraint {
        SignConstraint::Unconstrained => {
            if v > theta {
                v - theta
            } else if v < -theta {
                v + theta
            } else {
                0.0
            }
        }
        SignConstraint::Nonnegative => (v - theta).max(0.0),
        SignConstraint::Nonpositive => (v + theta).min(0.0),
    }
}

/// Solves the constrained fused prox by accelerated projected gradient
/// ascent on the box-constrained edge dual, stopping on the duality gap.
/// No size guard; see [`prox_oracle`].
pub fn dual_projected_gradient(inst: &ProxInstance<'_>, max_iters: usize) -> DualSolution {
    let g = inst.graph;
    let d = inst.z.len();
    let edges = g.edges();
    let caps = inst.theta_edge;
    let z_sq: f64 = inst.z.iter().map(|v| v * v).sum();
    let target = 1e-14 * (1.0 + z_sq);
    let max_deg = (0..d).map(|u| g.degree(u)).max().unwrap_or(0).max(1) as f64;
    let step = 1.0 / (2.0 * max_deg);

    let primal_at = |u: &[f64], beta: &mut Vec<f64>| {
        let s = aggregate(g, u);
        beta.clear();
        beta.extend(
            inst.z
                .iter()
                .zip(&s)
                .map(|(z, s)| separable_prox(z - s, inst.theta_node, inst.constraint)),
        );
    };
    let gap_at = |u: &[f64], beta: &[f64]| -> f64 {
        edges
            .iter()
            .zip(u)
            .zip(caps)
            .map(|((e, ue), t)| {
                let delta = beta[e.i] - beta[e.j];
                t * delta.abs() - ue * delta
            })
            .sum()
    };

    let m = edges.len();
    let mut u = vec![0.0; m];
    let mut prev = u.clone();
    let mut y = u.clone();
    let mut t = 1.0f64;
    let mut beta = Vec::with_capacity(d);
    primal_at(&u, &mut beta);
    let mut best = DualSolution {
        beta: beta.clone(),
        flows: u.clone(),
        gap: gap_at(&u, &beta),
    };
    if m == 0 {
        best.gap = 0.0;
        return best;
    }

    for _ in 0..max_iters {
        if best.gap <= target {
            break;
        }
        primal_at(&y, &mut beta);
        for (k, e) in edges.iter().enumerate() {
            let grad = beta[e.i] - beta[e.j];
            u[k] = (y[k] + step * grad).clamp(-caps[k], caps[k]);
        }
        primal_at(&u, &mut beta);
        let gap = gap_at(&u, &beta);
        if gap < best.gap {
            best = DualSolution {
                beta: beta.clone(),
                flows: u.clone(),
                gap,
            };
        }
        // restart when the step moves against the momentum direction
        let along: f64 = u
            .iter()
            .zip(&y)
            .zip(&prev)
            .map(|((un, yk), pk)| (un - yk) * (un - pk))
            .sum();
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if along < 0.0 {
            t = 1.0;
            y.copy_from_slice(&u);
        } else {
            let momentum = (t - 1.0) / t_next;
            for k in 0..m {
                y[k] = u[k] + momentum * (u[k] - prev[k]);
            }
            t = t_next;
        }
        prev.copy_from_slice(&u);
    }
    best
}

/// Reference solution of the constrained fused prox for `d <= 15`.
pub fn prox_oracle(inst: &ProxInstance<'_>) -> Result<Vec<f64>> {
    if inst.z.len() > PROX_ORACLE_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "prox oracle is limited to {PROX_ORACLE_MAX_DIM} variables, got {}",
            inst.z.len()
        )));
    }
    let sol = dual_projected_gradient(inst, 2_000_000);
    let z_sq: f64 = inst.z.iter().map(|v| v * v).sum();
    if sol.gap > 1e-12 * (1.0 + z_sq) {
        return Err(Error::SolverFailure {
            stage: "prox oracle",
            residual: sol.gap,
            best: sol.beta,
        });
    }
    Ok(sol.beta)
}

/// Projected subgradient descent on the prox objective with steps
/// `c / sqrt(t)`, `c = ||z||_inf`, returning the running average.
pub fn subgradient_prox(inst: &ProxInstance<'_>, iters: usize) -> Vec<f64> {
    let d = inst.z.len();
    let c = inst.z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut beta: Vec<f64> = inst.z.iter().map(|&v| inst.constraint.project(v)).collect();
    let mut avg = beta.clone();
    if c == 0.0 {
        return vec![0.0; d];
    }
    let mut grad = vec![0.0; d];
    for t in 1..=iters {
        for i in 0..d {
            let b = beta[i];
            grad[i] = b - inst.z[i] + inst.theta_node * sign(b);
        }
        for (e, th) in inst.graph.edges().iter().zip(inst.theta_edge) {
            let s = th * sign(beta[e.i] - beta[e.j]);
            grad[e.i] += s;
            grad[e.j] -= s;
        }
        let step = c / (t as f64).sqrt();
        for i in 0..d {
            beta[i] = inst.constraint.project(beta[i] - step * grad[i]);
        }
        let w = 1.0 / (t as f64 + 1.0);
        for i in 0..d {
            avg[i] += w * (beta[i] - avg[i]);
        }
    }
    avg
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `f(S) = lambda * sum over edges leaving S of w_ij`.
#[derive(Debug, Clone, Copy)]
pub struct CutFunction<'a> {
    pub graph: &'a Graph,
    pub lambda: f64,
}

impl CutFunction<'_> {
    pub fn eval(&self, in_set: &[bool]) -> f64 {
        self.lambda
            * self
                .graph
                .edges()
                .iter()
                .filter(|e| in_set[e.i] != in_set[e.j])
                .map(|e| e.w)
                .sum::<f64>()
    }

    /// Edmonds' greedy vertex of the base polytope minimizing `<w, s>`:
    /// visit coordinates by increasing `w` (ties by index) and assign
    /// marginal cut values.
    pub fn greedy_vertex(&self, w: &[f64]) -> Vec<f64> {
        let d = self.graph.num_nodes();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
        let mut in_set = vec![false; d];
        let mut s = vec![0.0; d];
        for &v in &order {
            let mut gain = 0.0;
            for &(u, k) in self.graph.neighbors(v) {
                let wk = self.graph.edges()[k].w;
                if in_set[u] {
                    gain -= wk;
                } else {
                    gain += wk;
                }
            }
            s[v] = self.lambda * gain;
            in_set[v] = true;
        }
        s
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `||z - s||^2` over the base polytope of `cut` with Wolfe's
/// min-norm-point algorithm. Stops once the Wolfe gap
/// `<x, x> - min_q <x, q - z>` (an upper bound on the objective error) is
/// at most `tol`.
pub fn mnp_oracle(z: &[f64], cut: &CutFunction<'_>, tol: f64) -> Result<Vec<f64>> {
    let d = z.len();
    if d != cut.graph.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "z has {d} entries for a {}-node cut function",
            cut.graph.num_nodes()
        )));
    }
    if d > MNP_ORACLE_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "min-norm-point oracle is limited to {MNP_ORACLE_MAX_DIM} variables, got {d}"
        )));
    }
    // work with shifted points p = q - z and find the min-norm point of their hull
    let shift = |q: Vec<f64>| -> Vec<f64> { q.iter().zip(z).map(|(a, b)| a - b).collect() };
    let neg_z: Vec<f64> = z.iter().map(|v| -v).collect();
    let mut points = vec![shift(cut.greedy_vertex(&neg_z))];
    let mut lam = vec![1.0];
    let mut x = points[0].clone();

    let combine = |points: &[Vec<f64>], coef: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; d];
        for (p, c) in points.iter().zip(coef) {
            for (o, v) in out.iter_mut().zip(p) {
                *o += c * v;
            }
        }
        out
    };

    let max_major = 10_000;
    for _ in 0..max_major {
        let q = shift(cut.greedy_vertex(&x));
        let xx = dot(&x, &x);
        let scale = points.iter().chain(std::iter::once(&q)).map(|p| dot(p, p)).fold(1.0f64, f64::max);
        let gap = xx - dot(&x, &q);
        if gap <= tol || gap <= 1e-15 * scale {
            return Ok(x.iter().zip(z).map(|(a, b)| a + b).collect());
        }
        if points.iter().any(|p| p == &q) {
            // no further progress possible in floating point
            return Ok(x.iter().zip(z).map(|(a, b)| a + b).collect());
        }
        points.push(q);
        lam.push(0.0);

        loop {
            let alpha = affine_minimizer(&points)?;
            if alpha.iter().all(|&a| a > 1e-15) {
                lam = alpha;
                x = combine(&points, &lam);
                break;
            }
            let mut theta = 1.0f64;
            for (l, a) in lam.iter().zip(&alpha) {
                if *a <= 1e-15 && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lam.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            let mut keep = lam.iter().map(|l| *l > 1e-15).collect::<Vec<_>>();
            if keep.iter().all(|k| *k) {
                // drop the smallest weight to guarantee progress
                let (idx, _) = lam
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .expect("nonempty");
                keep[idx] = false;
            }
            let mut k = 0;
            points.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            let mut k = 0;
            lam.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            let total: f64 = lam.iter().sum();
            for l in &mut lam {
                *l /= total;
            }
            x = combine(&points, &lam);
            if points.len() == 1 {
                break;
            }
        }
    }
    Err(Error::SolverFailure {
        stage: "min-norm point",
        residual: dot(&x, &x),
        best: x.iter().zip(z).map(|(a, b)| a + b).collect(),
    })
}

/// Coefficients `alpha` (summing to one) of the point of smallest norm in
/// the affine hull of `points`.
///
/// Writes the point as `p_0 + sum_i mu_i (p_i - p_0)` and solves the least
/// squares problem in `mu` by Householder QR, which keeps the conditioning
/// of the difference matrix instead of squaring it. Directions that are
/// numerically dependent get `mu_i = 0`.
fn affine_minimizer(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = points.len();
    if k == 0 {
        return Err(Error::InvalidArgument("no points".into()));
    }
    let d = points[0].len();
    let m = k - 1;
    // column-major difference matrix and right-hand side -p_0
    let mut a: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(x, y)| x - y).collect())
        .collect();
    let mut b: Vec<f64> = points[0].iter().map(|v| -v).collect();
    let scale = a
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);

    let mut diag = vec![0.0; m];
    let mut row = 0;
    let mut order = Vec::with_capacity(m);
    for j in 0..m {
        if row >= d {
            continue;
        }
        let norm = a[j][row..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-13 * scale {
            continue;
        }
        let alpha = if a[j][row] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][row..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv > 0.0 {
            for col in a.iter_mut().skip(j) {
                let proj = 2.0 * col[row..].iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() / vv;
                for (x, y) in col[row..].iter_mut().zip(&v) {
                    *x -= proj * y;
                }
            }
            let proj = 2.0 * b[row..].iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() / vv;
            for (x, y) in b[row..].iter_mut().zip(&v) {
                *x -= proj * y;
            }
        }
        diag[j] = a[j][row];
        order.push((j, row));
        row += 1;
    }
    // back substitution over the pivot columns
    let mut mu = vec![0.0; m];
    for idx in (0..order.len()).rev() {
        let (j, r) = order[idx];
        let mut acc = b[r];
        for &(jj, _) in &order[idx + 1..] {
            acc -= a[jj][r] * mu[jj];
        }
        mu[j] = acc / diag[j];
    }
    let mut alpha = Vec::with_capacity(k);
    alpha.push(1.0 - mu.iter().sum::<f64>());
    alpha.extend(mu);
    Ok(alpha)
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .expect("nonempty range");
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::SolverFailure {
                stage: "dense solve",
                residual: 0.0,
                best: Vec::new(),
            });
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    Ok(x)
}

/// Central differences `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn finite_diff_grad(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Least-squares coefficients for a features-by-samples design via the
/// normal equations `(X X^T) b = X y`.
pub fn least_squares(x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> Result<Vec<f64>> {
    let gram = x.dot(&x.t());
    let rhs = x.dot(&y);
    let a = gram.outer_iter().map(|row| row.to_vec()).collect();
    solve_dense(a, rhs.to_vec())
}

/// Reference fit: accelerated proximal gradient whose prox is the dual
/// projected gradient above. Slow; for small problems only.
pub fn fit_oracle(p: &Problem, max_iters: usize) -> Result<(Vec<f64>, f64)> {
    p.validate()?;
    if p.num_features() > PROX_ORACLE_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "fit oracle is limited to {PROX_ORACLE_MAX_DIM} variables"
        )));
    }
    let d = p.num_features();
    let fit_bias = p.loss == Loss::LogisticWithBias;
    let lip = estimate_lipschitz(p.x.view(), p.loss, 7)? * 1.05;
    let weights = p.graph.weights();
    let theta_edge: Vec<f64> = weights.iter().map(|w| p.lambda2 * w / lip).collect();

    let grad_at = |b: &Array1<f64>, c: f64| -> (Array1<f64>, f64) {
        let preds = p.x.t().dot(b);
        let r: Array1<f64> = match p.loss {
            Loss::Squared => &preds - &p.y,
            Loss::LogisticWithBias => preds
                .iter()
                .zip(&p.y)
                .map(|(m, t)| -t / (1.0 + (t * (m + c)).exp()))
                .collect(),
        };
        let gc = if fit_bias { r.sum() } else { 0.0 };
        (p.x.dot(&r), gc)
    };

    let mut beta = Array1::<f64>::zeros(d);
    let mut bias = 0.0;
    let mut y_beta = beta.clone();
    let mut y_bias = bias;
    let mut t = 1.0f64;
    let mut f_prev = p.objective(beta.view(), bias);
    for _ in 0..max_iters {
        let (g, gc) = grad_at(&y_beta, y_bias);
        let z: Vec<f64> = y_beta.iter().zip(&g).map(|(b, g)| b - g / lip).collect();
        let inst = ProxInstance {
            z: &z,
            graph: &p.graph,
            theta_node: p.lambda1 / lip,
            theta_edge: &theta_edge,
            constraint: p.constraint,
        };
        let next = Array1::from(dual_projected_gradient(&inst, 200_000).beta);
        let next_bias = if fit_bias { y_bias - gc / lip } else { 0.0 };
        let f = p.objective(next.view(), next_bias);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if f > f_prev {
            // monotone restart
            t = 1.0;
            y_beta = beta.clone();
            y_bias = bias;
            continue;
        }
        let momentum = (t - 1.0) / t_next;
        y_beta = &next + &((&next - &beta) * momentum);
        y_bias = next_bias + momentum * (next_bias - bias);
        t = t_next;
        let done = (f_prev - f).abs() <= 1e-14 * (1.0 + f.abs());
        beta = next;
        bias = next_bias;
        f_prev = f;
        if done {
            break;
        }
    }
    Ok((beta.to_vec(), bias))
}
