//! Synthetic data, the runtime scaling benchmark and the cross-validated
//! stability study.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusedprox::SignConstraint;
use crate::graph::{grid_graph_2d, Graph};
use crate::solver::{fit, predict, FitResult, Loss, Problem, SolverConfig};
use crate::stability::{estimation_stability, multiset_dice, support_set};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaKind {
    /// Independent standard normal coefficients.
    GaussianRandom,
    /// A few constant positive rectangles on the grid, zero elsewhere.
    PiecewiseNonnegative,
}

impl std::str::FromStr for BetaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "gaussian-random" => Ok(BetaKind::GaussianRandom),
            "piecewise" | "piecewise-nonnegative" => Ok(BetaKind::PiecewiseNonnegative),
            other => Err(Error::Parse(format!("unknown coefficient kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    /// Number of variables; a perfect square laid out as a 2D grid.
    pub d: usize,
    /// Defaults to `d / 2` when `None`.
    pub n_samples: Option<usize>,
    pub noise: f64,
    pub beta_kind: BetaKind,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(d: usize, beta_kind: BetaKind, seed: u64) -> Self {
        SyntheticSpec {
            d,
            n_samples: None,
            noise: 0.01,
            beta_kind,
            seed,
        }
    }

    pub fn samples(&self) -> usize {
        self.n_samples.unwrap_or(self.d / 2)
    }

    pub fn side(&self) -> Result<usize> {
        let side = (self.d as f64).sqrt().round() as usize;
        if self.d < 4 || side * side != self.d {
            return Err(Error::InvalidArgument(format!(
                "d must be a perfect square of at least 4, got {}",
                self.d
            )));
        }
        if self.samples() == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        if !(self.noise >= 0.0) {
            return Err(Error::InvalidArgument(format!("noise must be nonnegative, got {}", self.noise)));
        }
        Ok(side)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    /// Features by samples.
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub graph: Graph,
    pub true_beta: Vec<f64>,
}

/// Draws `X` and `y = X^T beta + noise * n` for a generated `beta`.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    let side = spec.side()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let beta = match spec.beta_kind {
        BetaKind::GaussianRandom => (0..spec.d).map(|_| StandardNormal.sample(&mut rng)).collect(),
        BetaKind::PiecewiseNonnegative => piecewise_beta(side, &mut rng),
    };
    synthesize(spec, side, beta, &mut rng)
}

/// Same recipe with caller-supplied coefficients.
pub fn gen_synthetic_with_beta(spec: &SyntheticSpec, beta: Vec<f64>) -> Result<SyntheticData> {
    let side = spec.side()?;
    if beta.len() != spec.d {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for d = {}",
            beta.len(),
            spec.d
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    synthesize(spec, side, beta, &mut rng)
}

fn synthesize(spec: &SyntheticSpec, side: usize, beta: Vec<f64>, rng: &mut ChaCha8Rng) -> Result<SyntheticData> {
    let n = spec.samples();
    // sample-major draw order: x_1, then x_2, ...
    let mut x = Array2::<f64>::zeros((spec.d, n));
    for mut col in x.axis_iter_mut(Axis(1)) {
        for v in col.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
    }
    let b = Array1::from(beta.clone());
    let mut y = predict(x.view(), b.view());
    for v in y.iter_mut() {
        let noise: f64 = StandardNormal.sample(rng);
        *v += spec.noise * noise;
    }
    Ok(SyntheticData {
        x,
        y,
        graph: grid_graph_2d(side, side)?,
        true_beta: beta,
    })
}

fn piecewise_beta(side: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut beta = vec![0.0; side * side];
    let patch = (side / 4).max(1);
    let patches = 3;
    for _ in 0..patches {
        let h = rng.random_range(patch..=patch + patch / 2).min(side);
        let w = rng.random_range(patch..=patch + patch / 2).min(side);
        let r0 = rng.random_range(0..=side - h);
        let c0 = rng.random_range(0..=side - w);
        let value = rng.random_range(0.5..1.5);
        for r in r0..r0 + h {
            for c in c0..c0 + w {
                beta[r * side + c] = value;
            }
        }
    }
    beta
}

/// `+1` for the `floor(N / 2)` largest scores and `-1` otherwise (ties by
/// index), i.e. thresholding at the median.
pub fn balanced_labels(scores: &Array1<f64>) -> Array1<f64> {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut labels = Array1::from_elem(n, -1.0);
    for &i in &order[..n / 2] {
        labels[i] = 1.0;
    }
    labels
}

/// Regularization used when none is given: `0.1 * ||X y||_inf / N`.
pub fn default_lambda(x: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let xy = x.dot(y);
    0.1 * xy.iter().fold(0.0f64, |m, v| m.max(v.abs())) / y.len() as f64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub d: usize,
    pub n_samples: usize,
    pub edges: usize,
    pub lambda: Vec<f64>,
    pub times: Vec<f64>,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    pub median_time: f64,
    pub median_iterations: f64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
    pub config: SolverConfig,
    pub trials: usize,
    pub seed: u64,
}

impl BenchmarkReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,n_samples,edges,trials_ok,median_time_s,median_iterations,failures\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6},{},{}",
                r.d,
                r.n_samples,
                r.edges,
                r.times.len(),
                r.median_time,
                r.median_iterations,
                r.failures.len()
            );
        }
        out
    }
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times `fit` on synthetic nonnegative squared-loss problems, one problem
/// per trial (seed `seed + trial`), with `lambda1 = lambda2 = default_lambda`.
pub fn run_benchmark(dims: &[usize], cfg: &SolverConfig, trials: usize, seed: u64) -> Result<BenchmarkReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let mut rows = Vec::with_capacity(dims.len());
    for &d in dims {
        let base = SyntheticSpec::new(d, BetaKind::GaussianRandom, seed);
        base.side()?;
        let mut row = BenchmarkRow {
            d,
            n_samples: base.samples(),
            edges: 0,
            lambda: Vec::new(),
            times: Vec::new(),
            iterations: Vec::new(),
            converged: Vec::new(),
            median_time: f64::NAN,
            median_iterations: f64::NAN,
            failures: Vec::new(),
        };
        for trial in 0..trials {
            let spec = SyntheticSpec {
                seed: seed.wrapping_add(trial as u64),
                ..base
            };
            let data = gen_synthetic(&spec)?;
            let lambda = default_lambda(&data.x, &data.y);
            row.edges = data.graph.num_edges();
            let problem = Problem {
                x: data.x,
                y: data.y,
                lambda1: lambda,
                lambda2: lambda,
                graph: data.graph,
                loss: Loss::Squared,
                constraint: SignConstraint::Nonnegative,
            };
            let start = Instant::now();
            match fit(&problem, cfg) {
                Ok(res) => {
                    row.times.push(start.elapsed().as_secs_f64());
                    row.iterations.push(res.iterations);
                    row.converged.push(res.converged);
                    row.lambda.push(lambda);
                }
                Err(e) => row.failures.push(format!("trial {trial}: {e}")),
            }
        }
        row.median_time = median(&row.times);
        let iters: Vec<f64> = row.iterations.iter().map(|&i| i as f64).collect();
        row.median_iterations = median(&iters);
        rows.push(row);
    }
    Ok(BenchmarkReport {
        rows,
        config: *cfg,
        trials,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Plain lasso: no fusion, no sign constraint.
    Lasso,
    /// Generalized fused lasso without sign constraint.
    Gfl,
    /// Nonnegative generalized fused lasso.
    N2gfl,
}

impl ModelKind {
    pub fn constraint(self) -> SignConstraint {
        match self {
            ModelKind::N2gfl => SignConstraint::Nonnegative,
            _ => SignConstraint::Unconstrained,
        }
    }

    /// Grid point actually used for this model.
    pub fn effective(self, lambda1: f64, lambda2: f64) -> (f64, f64) {
        match self {
            ModelKind::Lasso => (lambda1, 0.0),
            _ => (lambda1, lambda2),
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lasso" => Ok(ModelKind::Lasso),
            "gfl" => Ok(ModelKind::Gfl),
            "n2gfl" => Ok(ModelKind::N2gfl),
            other => Err(Error::Parse(format!("unknown model {other:?}"))),
        }
    }
}

/// Assigns each sample to one of `folds` folds, stratified by label.
/// Within each class the order is shuffled and samples are dealt round
/// robin, continuing from where the previous class stopped.
pub fn stratified_folds(y: &Array1<f64>, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least two folds, got {folds}")));
    }
    if y.len() < folds {
        return Err(Error::InvalidArgument(format!(
            "{} samples cannot fill {folds} folds",
            y.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut classes: Vec<f64> = y.iter().copied().collect();
    classes.sort_by(f64::total_cmp);
    classes.dedup();
    let mut assignment = vec![0usize; y.len()];
    let mut next = 0usize;
    for class in classes {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub accuracy: f64,
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
    pub bias: f64,
    pub support_size: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridScore {
    pub lambda1: f64,
    pub lambda2: f64,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvReport {
    pub model: ModelKind,
    pub lambda1: f64,
    pub lambda2: f64,
    pub folds: usize,
    /// Mean held-out accuracy at the chosen grid point.
    pub accuracy: f64,
    /// `None` when every fold produced an all-zero coefficient vector.
    pub es: Option<f64>,
    /// `None` when every fold produced an empty support.
    pub mdc: Option<f64>,
    pub fold_summaries: Vec<FoldSummary>,
    pub grid: Vec<GridScore>,
    pub betas: Vec<Vec<f64>>,
}

impl CvReport {
    pub fn support_sizes(&self) -> Vec<usize> {
        self.fold_summaries.iter().map(|f| f.support_size).collect()
    }
}

#[derive(Debug, Clone)]
pub struct CvSettings {
    pub folds: usize,
    pub grid: Vec<(f64, f64)>,
    pub model: ModelKind,
    pub solver: SolverConfig,
    pub seed: u64,
    /// Worker threads for the fold-by-grid fits.
    pub jobs: usize,
}

fn columns(x: &Array2<f64>, idx: &[usize]) -> Array2<f64> {
    x.select(Axis(1), idx)
}

fn accuracy(x: &Array2<f64>, y: &Array1<f64>, beta: &[f64], bias: f64) -> f64 {
    let scores = predict(x.view(), ArrayView1::from(beta));
    let correct = scores
        .iter()
        .zip(y)
        .filter(|(s, t)| {
            let pred = if **s + bias >= 0.0 { 1.0 } else { -1.0 };
            pred == **t
        })
        .count();
    correct as f64 / y.len() as f64
}

/// Stratified K-fold logistic cross-validation over a `(lambda1, lambda2)`
/// grid, followed by stability of the per-fold coefficients at the grid
/// point with the best mean accuracy (ties go to the smaller `lambda1`, then
/// the smaller `lambda2`).
pub fn cross_validate(x: &Array2<f64>, y: &Array1<f64>, graph: &Graph, settings: &CvSettings) -> Result<CvReport> {
    let k = settings.folds;
    if settings.grid.is_empty() {
        return Err(Error::InvalidArgument("empty parameter grid".into()));
    }
    if x.ncols() != y.len() || x.nrows() != graph.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "X is {}x{}, y has {} labels, graph has {} nodes",
            x.nrows(),
            x.ncols(),
            y.len(),
            graph.num_nodes()
        )));
    }
    let assignment = stratified_folds(y, k, settings.seed)?;

    let mut splits = Vec::with_capacity(k);
    for fold in 0..k {
        let test: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] == fold).collect();
        let train: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] != fold).collect();
        for (part, idx) in [("held-out", &test), ("training", &train)] {
            let first = y[idx[0]];
            if idx.iter().all(|&i| y[i] == first) {
                return Err(Error::DegenerateFold {
                    fold,
                    reason: format!("{part} labels are all {first}"),
                });
            }
        }
        let train_x = columns(x, &train);
        let train_y = y.select(Axis(0), &train);
        let test_x = columns(x, &test);
        let test_y = y.select(Axis(0), &test);
        splits.push((train_x, train_y, test_x, test_y));
    }

    let mut grid: Vec<(f64, f64)> = Vec::new();
    for &(l1, l2) in &settings.grid {
        let point = settings.model.effective(l1, l2);
        if !grid.contains(&point) {
            grid.push(point);
        }
    }

    let tasks: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..k).map(move |f| (g, f))).collect();
    let run = |&(gi, fold): &(usize, usize)| -> Result<(FitResult, f64)> {
        let (l1, l2) = grid[gi];
        let (train_x, train_y, test_x, test_y) = &splits[fold];
        let problem = Problem {
            x: train_x.clone(),
            y: train_y.clone(),
            lambda1: l1,
            lambda2: l2,
            graph: graph.clone(),
            loss: Loss::LogisticWithBias,
            constraint: settings.model.constraint(),
        };
        let res = fit(&problem, &settings.solver)?;
        let acc = accuracy(test_x, test_y, &res.beta, res.bias);
        Ok((res, acc))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let results: Vec<Result<(FitResult, f64)>> = pool.install(|| tasks.par_iter().map(run).collect());
    let results: Vec<(FitResult, f64)> = results.into_iter().collect::<Result<_>>()?;

    let scores: Vec<GridScore> = grid
        .iter()
        .enumerate()
        .map(|(gi, &(lambda1, lambda2))| GridScore {
            lambda1,
            lambda2,
            mean_accuracy: results[gi * k..(gi + 1) * k].iter().map(|(_, a)| a).sum::<f64>() / k as f64,
        })
        .collect();
    let chosen = (0..grid.len())
        .max_by(|&a, &b| {
            let (sa, sb) = (&scores[a], &scores[b]);
            sa.mean_accuracy
                .total_cmp(&sb.mean_accuracy)
                .then(sb.lambda1.total_cmp(&sa.lambda1))
                .then(sb.lambda2.total_cmp(&sa.lambda2))
        })
        .expect("grid is nonempty");

    let chosen_fits = &results[chosen * k..(chosen + 1) * k];
    let betas: Vec<Vec<f64>> = chosen_fits.iter().map(|(r, _)| r.beta.clone()).collect();
    let supports: Vec<BTreeSet<usize>> = betas.iter().map(|b| support_set(b)).collect();
    let es = match estimation_stability(x.view(), &betas) {
        Ok(v) => Some(v),
        Err(Error::UndefinedMetric(_)) => None,
        Err(e) => return Err(e),
    };
    let mdc = match multiset_dice(&supports) {
        Ok(v) => Some(v),
        Err(Error::UndefinedMetric(_)) => None,
        Err(e) => return Err(e),
    };
    let fold_summaries = chosen_fits
        .iter()
        .enumerate()
        .map(|(fold, (r, acc))| FoldSummary {
            fold,
            accuracy: *acc,
            iterations: r.iterations,
            converged: r.converged,
            objective: r.objective(),
            bias: r.bias,
            support_size: supports[fold].len(),
        })
        .collect();

    Ok(CvReport {
        model: settings.model,
        lambda1: grid[chosen].0,
        lambda2: grid[chosen].1,
        folds: k,
        accuracy: scores[chosen].mean_accuracy,
        es,
        mdc,
        fold_summaries,
        grid: scores,
        betas,
    })
}

/// Default settings of the synthetic stability comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyConfig {
    pub d: usize,
    /// Noise added to `beta^T x` before labels are thresholded at the median.
    pub noise: f64,
    pub folds: usize,
    pub grid: Vec<(f64, f64)>,
    pub solver: SolverConfig,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            d: 400,
            noise: 3.0,
            folds: 10,
            grid: parse_grid("0.0625:8:8,0.5:16:11").expect("valid grid literal"),
            solver: SolverConfig::default(),
            seed: 0,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub true_support_size: usize,
    pub lasso: CvReport,
    pub gfl: CvReport,
    pub n2gfl: CvReport,
}

/// Cross-validates lasso, GFL and nonnegative GFL on one piecewise
/// nonnegative synthetic data set with balanced labels.
pub fn stability_study(cfg: &StudyConfig) -> Result<StudyReport> {
    let spec = SyntheticSpec {
        noise: cfg.noise,
        ..SyntheticSpec::new(cfg.d, BetaKind::PiecewiseNonnegative, cfg.seed)
    };
    let data = gen_synthetic(&spec)?;
    if data.true_beta.iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidArgument("planted coefficients must be nonnegative".into()));
    }
    let labels = balanced_labels(&data.y);
    let run = |model| {
        let settings = CvSettings {
            folds: cfg.folds,
            grid: cfg.grid.clone(),
            model,
            solver: cfg.solver,
            seed: cfg.seed,
            jobs: cfg.jobs,
        };
        cross_validate(&data.x, &labels, &data.graph, &settings)
    };
    Ok(StudyReport {
        config: cfg.clone(),
        true_support_size: support_set(&data.true_beta).len(),
        lasso: run(ModelKind::Lasso)?,
        gfl: run(ModelKind::Gfl)?,
        n2gfl: run(ModelKind::N2gfl)?,
    })
}

/// Expands `"a:b:steps"` into `steps` values from `a` to `b`: geometric when
/// both ends are positive, linear otherwise.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("bad number {s:?} in range {spec:?}: {e}")))
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [a, b, steps] => {
            let (a, b) = (num(a)?, num(b)?);
            let steps: usize = steps
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad step count in range {spec:?}: {e}")))?;
            if steps == 0 {
                return Err(Error::Parse(format!("range {spec:?} has zero steps")));
            }
            if steps == 1 {
                return Ok(vec![a]);
            }
            let geometric = a > 0.0 && b > 0.0;
            Ok((0..steps)
                .map(|i| {
                    let f = i as f64 / (steps - 1) as f64;
                    if geometric {
                        a * (b / a).powf(f)
                    } else {
                        a + (b - a) * f
                    }
                })
                .collect())
        }
        _ => Err(Error::Parse(format!("expected `a:b:steps`, got {spec:?}"))),
    }
}

/// Parses `"l1a:l1b:steps,l2a:l2b:steps"` into the Cartesian grid.
pub fn parse_grid(spec: &str) -> Result<Vec<(f64, f64)>> {
    let (l1, l2) = spec
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("grid {spec:?} needs a lambda1 and a lambda2 range")))?;
    let l1 = parse_range(l1)?;
    let l2 = parse_range(l2)?;
    Ok(l1.iter().flat_map(|&a| l2.iter().map(move |&b| (a, b))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_zero_beta_gives_zero_labels() {
        let spec = SyntheticSpec {
            noise: 0.0,
            ..SyntheticSpec::new(16, BetaKind::GaussianRandom, 3)
        };
        let data = gen_synthetic_with_beta(&spec, vec![0.0; 16]).unwrap();
        assert!(data.y.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn synthetic_is_deterministic() {
        let spec = SyntheticSpec::new(36, BetaKind::PiecewiseNonnegative, 11);
        let a = gen_synthetic(&spec).unwrap();
        let b = gen_synthetic(&spec).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.y, b.y);
        assert!(a.true_beta.iter().all(|v| *v >= 0.0));
        assert!(a.true_beta.iter().any(|v| *v > 0.0));
    }

    #[test]
    fn default_shape() {
        let spec = SyntheticSpec::new(400, BetaKind::GaussianRandom, 0);
        let data = gen_synthetic(&spec).unwrap();
        assert_eq!(data.x.dim(), (400, 200));
        assert_eq!(data.graph.num_edges(), 760);
    }

    #[test]
    fn spec_validation() {
        assert!(gen_synthetic(&SyntheticSpec::new(10, BetaKind::GaussianRandom, 0)).is_err());
        assert!(gen_synthetic(&SyntheticSpec::new(1, BetaKind::GaussianRandom, 0)).is_err());
        let spec = SyntheticSpec {
            n_samples: Some(0),
            ..SyntheticSpec::new(4, BetaKind::GaussianRandom, 0)
        };
        assert!(gen_synthetic(&spec).is_err());
    }

    #[test]
    fn labels_are_balanced() {
        let scores = Array1::from(vec![0.3, -1.0, 2.0, 0.3, 5.0, -2.0]);
        let labels = balanced_labels(&scores);
        assert_eq!(labels.to_vec(), vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn folds_partition_and_stratify() {
        let y = Array1::from((0..53).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>());
        let folds = stratified_folds(&y, 5, 9).unwrap();
        assert_eq!(folds.len(), 53);
        for class in [1.0, -1.0] {
            let counts: Vec<usize> = (0..5)
                .map(|f| (0..53).filter(|&i| folds[i] == f && y[i] == class).count())
                .collect();
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            assert!(hi - lo <= 1, "{counts:?}");
        }
        assert_eq!(folds, stratified_folds(&y, 5, 9).unwrap());
        assert!(stratified_folds(&y, 1, 0).is_err());
    }

    #[test]
    fn ranges_and_grids() {
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = parse_range("0.01:1:3").unwrap();
        assert!((g[1] - 0.1).abs() < 1e-15);
        assert_eq!(parse_range("0.5").unwrap(), vec![0.5]);
        assert!(parse_range("1:2").is_err());
        let grid = parse_grid("1:2:2,0:0.5:2").unwrap();
        assert_eq!(grid, vec![(1.0, 0.0), (1.0, 0.5), (2.0, 0.0), (2.0, 0.5)]);
        assert!(parse_grid("1:2:2").is_err());
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}
