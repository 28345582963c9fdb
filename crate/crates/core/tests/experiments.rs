use std::collections::BTreeSet;

use ndarray::{Array1, Array2};
use nngfl::experiments::{
    cross_validate, gen_synthetic, run_benchmark, stratified_folds, BetaKind, CvSettings, ModelKind, SyntheticSpec,
};
use nngfl::stability::{estimation_stability, multiset_dice};
use nngfl::{grid_graph_2d, Error, SolverConfig};
use proptest::prelude::*;

fn separable_data() -> (Array2<f64>, Array1<f64>) {
    // feature 0 carries the label, the rest is a fixed pattern
    let n = 40;
    let d = 9;
    let x = Array2::from_shape_fn((d, n), |(i, j)| {
        if i == 0 {
            if j % 2 == 0 {
                3.0
            } else {
                -3.0
            }
        } else {
            (((i * 7 + j * 3) % 11) as f64 - 5.0) / 10.0
        }
    });
    let y = (0..n).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    (x, y)
}

fn settings(model: ModelKind, grid: Vec<(f64, f64)>) -> CvSettings {
    CvSettings {
        folds: 4,
        grid,
        model,
        solver: SolverConfig::default(),
        seed: 1,
        jobs: 2,
    }
}

#[test]
fn separable_data_is_classified_perfectly() {
    let (x, y) = separable_data();
    let g = grid_graph_2d(3, 3).unwrap();
    for model in [ModelKind::Lasso, ModelKind::Gfl, ModelKind::N2gfl] {
        let report = cross_validate(&x, &y, &g, &settings(model, vec![(0.1, 0.1)])).unwrap();
        assert_eq!(report.accuracy, 1.0, "{model:?}");
        assert_eq!(report.folds, 4);
        assert_eq!(report.fold_summaries.len(), 4);
    }
}

#[test]
fn lasso_ignores_the_fusion_weight() {
    let (x, y) = separable_data();
    let g = grid_graph_2d(3, 3).unwrap();
    let report = cross_validate(&x, &y, &g, &settings(ModelKind::Lasso, vec![(0.1, 5.0), (0.2, 7.0)])).unwrap();
    assert_eq!(report.lambda2, 0.0);
    assert!(report.grid.iter().all(|s| s.lambda2 == 0.0));
}

#[test]
fn nonnegative_model_returns_nonnegative_coefficients() {
    let (x, y) = separable_data();
    let g = grid_graph_2d(3, 3).unwrap();
    let report = cross_validate(&x, &y, &g, &settings(ModelKind::N2gfl, vec![(0.05, 0.05)])).unwrap();
    assert!(report.betas.iter().flatten().all(|b| *b >= 0.0));
}

#[test]
fn grid_ties_prefer_smaller_weights() {
    let (x, y) = separable_data();
    let g = grid_graph_2d(3, 3).unwrap();
    let grid = vec![(0.2, 0.1), (0.1, 0.2), (0.1, 0.1)];
    let report = cross_validate(&x, &y, &g, &settings(ModelKind::Gfl, grid)).unwrap();
    assert_eq!((report.lambda1, report.lambda2), (0.1, 0.1));
}

#[test]
fn worker_count_does_not_change_the_report() {
    let (x, y) = separable_data();
    let g = grid_graph_2d(3, 3).unwrap();
    let grid = vec![(0.1, 0.1), (0.3, 0.05)];
    let mut one = settings(ModelKind::N2gfl, grid.clone());
    one.jobs = 1;
    let mut three = settings(ModelKind::N2gfl, grid);
    three.jobs = 3;
    let a = cross_validate(&x, &y, &g, &one).unwrap();
    let b = cross_validate(&x, &y, &g, &three).unwrap();
    assert_eq!(a.betas, b.betas);
    assert_eq!(a.accuracy, b.accuracy);
}

#[test]
fn single_class_fold_is_reported() {
    let (x, _) = separable_data();
    let mut y = Array1::from_elem(40, -1.0);
    y[0] = 1.0;
    let g = grid_graph_2d(3, 3).unwrap();
    match cross_validate(&x, &y, &g, &settings(ModelKind::Gfl, vec![(0.1, 0.1)])) {
        Err(Error::DegenerateFold { .. }) => {}
        other => panic!("expected a degenerate fold, got {other:?}"),
    }
}

#[test]
fn benchmark_records_every_trial() {
    let report = run_benchmark(&[400], &SolverConfig::default(), 3, 5).unwrap();
    let row = &report.rows[0];
    assert_eq!(row.times.len(), 3);
    assert!(row.failures.is_empty());
    let mut sorted = row.times.clone();
    sorted.sort_by(f64::total_cmp);
    assert_eq!(row.median_time, sorted[1]);
    assert!(report.to_csv().lines().count() == 2);
}

#[test]
fn benchmark_iterations_are_reproducible() {
    let a = run_benchmark(&[400], &SolverConfig::default(), 1, 7).unwrap();
    let b = run_benchmark(&[400], &SolverConfig::default(), 1, 7).unwrap();
    assert_eq!(a.rows[0].iterations, b.rows[0].iterations);
    assert_eq!(a.rows[0].lambda, b.rows[0].lambda);
}

#[test]
fn benchmark_rejects_non_square_sizes() {
    assert!(run_benchmark(&[10], &SolverConfig::default(), 1, 0).is_err());
}

#[test]
fn planted_piecewise_support_is_nonnegative() {
    let data = gen_synthetic(&SyntheticSpec::new(400, BetaKind::PiecewiseNonnegative, 0)).unwrap();
    assert!(data.true_beta.iter().all(|b| *b >= 0.0));
    assert!(data.true_beta.iter().filter(|b| **b > 0.0).count() > 20);
}

fn set_strategy() -> impl Strategy<Value = BTreeSet<usize>> {
    proptest::collection::btree_set(0usize..30, 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn folds_partition_with_stratified_balance(n in 4usize..120, k in 2usize..8, seed in any::<u64>(), ratio in 0.1f64..0.9) {
        prop_assume!(n >= k);
        let positives = ((n as f64) * ratio) as usize;
        let y: Array1<f64> = (0..n).map(|i| if i < positives { 1.0 } else { -1.0 }).collect();
        let folds = stratified_folds(&y, k, seed).unwrap();
        prop_assert_eq!(folds.len(), n);
        prop_assert!(folds.iter().all(|f| *f < k));
        for class in [1.0, -1.0] {
            let counts: Vec<usize> = (0..k).map(|f| (0..n).filter(|&i| folds[i] == f && y[i] == class).count()).collect();
            prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
        }
        let sizes: Vec<usize> = (0..k).map(|f| folds.iter().filter(|x| **x == f).count()).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn dice_is_bounded_and_order_free(sets in proptest::collection::vec(set_strategy(), 2..6)) {
        prop_assume!(sets.iter().any(|s| !s.is_empty()));
        let value = multiset_dice(&sets).unwrap();
        prop_assert!((0.0..=1.0).contains(&value));
        let mut reversed = sets.clone();
        reversed.reverse();
        prop_assert_eq!(value, multiset_dice(&reversed).unwrap());
    }

    #[test]
    fn estimation_stability_is_nonnegative_and_order_free(seed in 0u64..500, k in 2usize..6) {
        let d = 5;
        let n = 7;
        let x = Array2::from_shape_fn((d, n), |(i, j)| (((seed as usize + i * 13 + j * 7) % 17) as f64 - 8.0) / 4.0);
        let betas: Vec<Vec<f64>> = (0..k)
            .map(|f| (0..d).map(|i| 1.0 + ((seed as usize + f * 5 + i * 3) % 7) as f64 / 3.0).collect())
            .collect();
        let value = estimation_stability(x.view(), &betas).unwrap();
        prop_assert!(value >= 0.0);
        let mut rotated = betas.clone();
        rotated.rotate_left(1);
        let other = estimation_stability(x.view(), &rotated).unwrap();
        prop_assert!((value - other).abs() <= 1e-12 * (1.0 + value));
    }
}
