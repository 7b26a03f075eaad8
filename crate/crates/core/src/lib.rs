//! Pathway-based kernel boosting for binary classification.
//!
//! Each boosting iteration fits one kernel learner per gene pathway to a
//! second-order approximation of the log loss, keeps the best one and takes
//! a line-searched, shrunken step along it. The norm of a pathway's
//! accumulated coefficients measures its importance.
//!
//! ```no_run
//! use pkb::{fit, FitConfig, Penalty, SimModel, SimSpec};
//!
//! let sim = pkb::simulation::generate(&SimSpec::new(SimModel::Model1, 20, 1)).unwrap();
//! let config = FitConfig { penalty: Penalty::L2, max_iters: 50, nu: 0.1, ..FitConfig::default() };
//! let model = fit(&sim.data, &sim.pathways, &sim.labels, &config).unwrap();
//! for (name, w) in model.pathway_weights().iter().take(5) {
//!     println!("{name}\t{w:.4}");
//! }
//! ```

pub mod boosting;
pub mod cli;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod kernels;
pub mod linalg;
pub mod model;
pub mod simulation;
pub mod solvers;

pub use boosting::{fit, fit_cv, select_t_by_cv, BoostState, CvOutcome, FitConfig, Lambda};
pub use data::{load_expression_csv, load_gmt, load_labels, ExpressionDataset, LabelVector, Pathway, PathwayCollection};
pub use error::{PkbError, Result};
pub use evaluation::{evaluate, sweep_lambda, Evaluation, FoldResult, LambdaSweep};
pub use kernels::{build_kernel_set, KernelKind, KernelSet, KernelSpec};
pub use model::{PkbModel, Prediction};
pub use simulation::{generate, OutcomeRule, SimData, SimModel, SimSpec};
pub use solvers::Penalty;
