mod common;

use nngfl::flow::{build_network, solve_quadratic_flow};
use nngfl::oracle::{dual_projected_gradient, prox_oracle};
use nngfl::tvprox::{tv_penalty, tv_prox_with_flows};
use nngfl::{
    check_kkt, fused_prox, grid_graph_2d, path_graph, tv_duality_gap, tv_objective, tv_prox, Graph, ProxInstance,
    SignConstraint, TvInstance,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn graph_from_seed(seed: u64, kind: usize, max_d: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_graph(&mut rng, GRAPH_KINDS[kind], max_d)
}

fn values(d: usize, seed: u64, scale: f64) -> Vec<f64> {
    normal_vec(&mut ChaCha8Rng::seed_from_u64(seed), d, scale)
}

fn thresholds(m: usize, seed: u64) -> Vec<f64> {
    uniform_vec(&mut ChaCha8Rng::seed_from_u64(seed), m, 0.0, 2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fused_prox_matches_oracle(seed in any::<u64>(), kind in 0usize..3, mode in 0usize..3, tn in 0.0f64..2.0) {
        let g = graph_from_seed(seed, kind, 10);
        let z = values(g.num_nodes(), seed ^ 1, 2.0);
        let te = thresholds(g.num_edges(), seed ^ 2);
        let inst = ProxInstance { z: &z, graph: &g, theta_node: tn, theta_edge: &te, constraint: MODES[mode] };
        let fast = fused_prox(&inst, 1e-12).unwrap();
        let slow = prox_oracle(&inst).unwrap();
        prop_assert!(max_abs_diff(&fast, &slow) <= 1e-6, "{fast:?} vs {slow:?}");
        prop_assert!(check_kkt(&fast, &inst, 1e-9).max() <= 1e-6);
        prop_assert!(fast.iter().all(|b| MODES[mode].violation(*b) == 0.0));
    }

    #[test]
    fn nonpositive_mode_mirrors_nonnegative(seed in any::<u64>(), kind in 0usize..3, tn in 0.0f64..2.0) {
        let g = graph_from_seed(seed, kind, 20);
        let z = values(g.num_nodes(), seed ^ 3, 2.0);
        let neg: Vec<f64> = z.iter().map(|v| -v).collect();
        let te = thresholds(g.num_edges(), seed ^ 4);
        let pos = fused_prox(&ProxInstance { z: &neg, graph: &g, theta_node: tn, theta_edge: &te, constraint: SignConstraint::Nonnegative }, 1e-12).unwrap();
        let negp = fused_prox(&ProxInstance { z: &z, graph: &g, theta_node: tn, theta_edge: &te, constraint: SignConstraint::Nonpositive }, 1e-12).unwrap();
        let mirrored: Vec<f64> = pos.iter().map(|v| -v).collect();
        prop_assert!(max_abs_diff(&negp, &mirrored) <= 1e-12);
    }

    #[test]
    fn tv_prox_conserves_mass_and_closes_gap(seed in any::<u64>(), rows in 1usize..9, cols in 1usize..9) {
        let g = grid_graph_2d(rows, cols).unwrap();
        let z = values(rows * cols, seed, 3.0);
        let theta = thresholds(g.num_edges(), seed ^ 5);
        let inst = TvInstance::new(&z, &g, &theta).unwrap();
        let (beta, sol) = tv_prox_with_flows(&inst, 1e-12).unwrap();
        let mass = beta.iter().sum::<f64>() - z.iter().sum::<f64>();
        prop_assert!(mass.abs() <= 1e-8);
        let z_sq: f64 = z.iter().map(|v| v * v).sum();
        prop_assert!(tv_duality_gap(&beta, &sol, &inst, 1e-12).unwrap() <= 1e-8 * (1.0 + z_sq));
        prop_assert!(sol.xi.iter().zip(&theta).all(|(x, t)| x.abs() <= t + 1e-12));
    }

    #[test]
    fn tv_prox_is_nonexpansive(seed in any::<u64>(), kind in 0usize..3) {
        let g = graph_from_seed(seed, kind, 30);
        let d = g.num_nodes();
        let z1 = values(d, seed ^ 6, 2.0);
        let z2 = values(d, seed ^ 7, 2.0);
        let theta = thresholds(g.num_edges(), seed ^ 8);
        let b1 = tv_prox(&TvInstance::new(&z1, &g, &theta).unwrap(), 1e-12).unwrap();
        let b2 = tv_prox(&TvInstance::new(&z2, &g, &theta).unwrap(), 1e-12).unwrap();
        let db: Vec<f64> = b1.iter().zip(&b2).map(|(a, b)| a - b).collect();
        let dz: Vec<f64> = z1.iter().zip(&z2).map(|(a, b)| a - b).collect();
        prop_assert!(norm(&db) <= norm(&dz) * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn tv_prox_is_monotone_in_z(seed in any::<u64>(), kind in 0usize..3, bump in 0.0f64..3.0) {
        let g = graph_from_seed(seed, kind, 20);
        let d = g.num_nodes();
        let z1 = values(d, seed ^ 9, 2.0);
        let mut z2 = z1.clone();
        z2[(seed % d as u64) as usize] += bump;
        let theta = thresholds(g.num_edges(), seed ^ 10);
        let b1 = tv_prox(&TvInstance::new(&z1, &g, &theta).unwrap(), 1e-12).unwrap();
        let b2 = tv_prox(&TvInstance::new(&z2, &g, &theta).unwrap(), 1e-12).unwrap();
        prop_assert!(b1.iter().zip(&b2).all(|(a, b)| *b >= a - 1e-9));
    }

    #[test]
    fn flow_matches_dual_oracle(seed in any::<u64>(), kind in 0usize..3) {
        let g = graph_from_seed(seed, kind, 15);
        let z = values(g.num_nodes(), seed ^ 11, 2.0);
        let theta = thresholds(g.num_edges(), seed ^ 12);
        let flow = solve_quadratic_flow(&build_network(&z, &g, &theta).unwrap(), 1e-12).unwrap();
        let inst = ProxInstance { z: &z, graph: &g, theta_node: 0.0, theta_edge: &theta, constraint: SignConstraint::Unconstrained };
        let dual = dual_projected_gradient(&inst, 2_000_000);
        let flow_beta: Vec<f64> = z.iter().zip(&flow.s).map(|(a, b)| a - b).collect();
        let scale = 1.0 + z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(max_abs_diff(&flow_beta, &dual.beta) <= 1e-6 * scale);
    }

    #[test]
    fn tv_prox_beats_perturbations(seed in any::<u64>(), kind in 0usize..3, step in -0.1f64..0.1) {
        let g = graph_from_seed(seed, kind, 20);
        let d = g.num_nodes();
        let z = values(d, seed ^ 13, 2.0);
        let theta = thresholds(g.num_edges(), seed ^ 14);
        let inst = TvInstance::new(&z, &g, &theta).unwrap();
        let beta = tv_prox(&inst, 1e-12).unwrap();
        let best = tv_objective(&beta, &inst).unwrap();
        let dir = values(d, seed ^ 15, 1.0);
        let moved: Vec<f64> = beta.iter().zip(&dir).map(|(b, v)| b + step * v).collect();
        prop_assert!(tv_objective(&moved, &inst).unwrap() >= best - 1e-10);
    }
}

#[test]
fn large_thresholds_collapse_to_the_mean() {
    let g = path_graph(5).unwrap();
    let z = [1.0, -2.0, 4.0, 0.5, 3.0];
    let theta = vec![100.0; 4];
    let beta = tv_prox(&TvInstance::new(&z, &g, &theta).unwrap(), 1e-12).unwrap();
    for b in beta {
        assert!((b - 1.3).abs() < 1e-12);
    }
}

#[test]
fn penalty_of_constant_vector_is_zero() {
    let g = grid_graph_2d(3, 3).unwrap();
    assert_eq!(tv_penalty(&[2.0; 9], &g, &vec![1.0; g.num_edges()]), 0.0);
}

#[test]
fn flow_solver_handles_large_grid() {
    let g = grid_graph_2d(60, 60).unwrap();
    let z = values(3600, 99, 2.0);
    let theta = vec![0.3; g.num_edges()];
    let inst = TvInstance::new(&z, &g, &theta).unwrap();
    let (beta, sol) = tv_prox_with_flows(&inst, 1e-12).unwrap();
    let z_sq: f64 = z.iter().map(|v| v * v).sum();
    assert!(tv_duality_gap(&beta, &sol, &inst, 1e-10).unwrap() <= 1e-9 * (1.0 + z_sq));
}
