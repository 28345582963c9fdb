//! Nonnegative generalized fused lasso.
//!
//! Minimizes `loss(beta) + lambda1 * ||beta||_1 + lambda2 * sum_(i,j) w_ij |beta_i - beta_j|`
//! over an adjacency graph, optionally under a sign constraint, with an
//! accelerated proximal-gradient loop whose proximal step is solved exactly
//! through a quadratic-cost network flow.

pub mod error;
pub mod experiments;
pub mod flow;
pub mod fusedprox;
pub mod graph;
pub mod oracle;
pub mod solver;
pub mod stability;
pub mod tvprox;

pub use error::{Error, Result};
pub use fusedprox::{check_kkt, fused_prox, support, KktReport, ProxInstance, SignConstraint};
pub use graph::{grid_graph_2d, grid_graph_3d, path_graph, Edge, Graph};
pub use solver::{fit, FitResult, Loss, Problem, SolverConfig};

pub use tvprox::{tv_duality_gap, tv_objective, tv_prox, TvInstance};
