//! Trained models: prediction, pathway weights and the on-disk format.
//!
//! A model file is a single JSON object:
//!
//! ```text
//! {
//!   "format": "pkb-model",
//!   "version": 1,
//!   "kernel": { "kind": "rbf", "scale_inner_product": true },
//!   "config": { ... },            // training configuration
//!   "lambda": 0.0123,             // λ actually used
//!   "initial_value": 0.0,         // F₀
//!   "intercept": 0.04,            // accumulated C, including F₀
//!   "iterations": 120,
//!   "loss_history": [ ... ],
//!   "selection_history": [ ... ],
//!   "pathway_names": [ ... ],     // all M pathways, in training order
//!   "weights": [ ... ],           // ‖β^(m)‖₂ per pathway
//!   "components": [               // pathways with nonzero β^(m) only
//!     {
//!       "pathway": 3,
//!       "genes": ["g16", "g17"],
//!       "support": [0, 5, 9],     // training rows with β_i ≠ 0
//!       "beta": [0.1, -0.2, 0.05],
//!       "rows": [[...], [...], [...]]  // expression of those rows on `genes`
//!     }
//!   ]
//! }
//! ```
//!
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! saved and reloaded model predicts bit-identically.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boosting::{BoostState, FitConfig};
use crate::data::{ExpressionDataset, PathwayCollection};
use crate::error::{PkbError, Result};
use crate::kernels::KernelSpec;

pub const MODEL_FORMAT: &str = "pkb-model";
pub const MODEL_VERSION: u32 = 1;

/// One selected pathway's share of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub pathway: usize,
    pub genes: Vec<String>,
    pub support: Vec<usize>,
    pub beta: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PkbModel {
    format: String,
    version: u32,
    kernel: KernelSpec,
    config: FitConfig,
    lambda: f64,
    initial_value: f64,
    intercept: f64,
    iterations: usize,
    loss_history: Vec<f64>,
    selection_history: Vec<usize>,
    pathway_names: Vec<String>,
    weights: Vec<f64>,
    components: Vec<Component>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub scores: Vec<f64>,
    /// `sign(score)`, with a zero score labelled +1.
    pub labels: Vec<f64>,
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl PkbModel {
    pub(crate) fn from_state(
        state: &BoostState,
        data: &ExpressionDataset,
        pathways: &PathwayCollection,
        config: &FitConfig,
        lambda: f64,
    ) -> Self {
        let weights: Vec<f64> = state.beta_acc.iter().map(|b| norm2(b)).collect();
        let components = state
            .beta_acc
            .iter()
            .enumerate()
            .filter(|(_, b)| b.iter().any(|&x| x != 0.0))
            .map(|(m, b)| {
                let genes = &pathways.get(m).genes;
                let support: Vec<usize> = (0..b.len()).filter(|&i| b[i] != 0.0).collect();
                Component {
                    pathway: m,
                    genes: genes.iter().map(|&g| data.gene_ids()[g].clone()).collect(),
                    beta: support.iter().map(|&i| b[i]).collect(),
                    rows: support.iter().map(|&i| genes.iter().map(|&g| data.value(i, g)).collect()).collect(),
                    support,
                }
            })
            .collect();
        PkbModel {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            kernel: config.kernel,
            config: config.clone(),
            lambda,
            initial_value: state.initial_value,
            intercept: state.intercept,
            iterations: state.t,
            loss_history: state.loss_history.clone(),
            selection_history: state.selection_history.clone(),
            pathway_names: pathways.names(),
            weights,
            components,
        }
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn config(&self) -> &FitConfig {
        &self.config
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn initial_value(&self) -> f64 {
        self.initial_value
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    /// Boosting iterations actually performed.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn loss_history(&self) -> &[f64] {
        &self.loss_history
    }

    pub fn selection_history(&self) -> &[usize] {
        &self.selection_history
    }

    pub fn pathway_names(&self) -> &[String] {
        &self.pathway_names
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// `‖β^(m)‖₂` in pathway order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(name, weight)` pairs sorted by descending weight, ties by name.
    pub fn pathway_weights(&self) -> Vec<(String, f64)> {
        sorted_weights(&self.pathway_names, &self.weights)
    }

    /// Scores `Σ_m K_m(x_train, x)ᵀ β^(m) + C` for every sample of `data`.
    /// Genes are matched by id.
    pub fn predict(&self, data: &ExpressionDataset) -> Result<Prediction> {
        let mut scores = vec![self.intercept; data.n_samples()];
        for comp in &self.components {
            let cols = comp
                .genes
                .iter()
                .map(|g| data.gene_index(g).ok_or_else(|| PkbError::MissingGene(g.clone())))
                .collect::<Result<Vec<_>>>()?;
            let p_m = cols.len();
            let mut x = vec![0.0; p_m];
            for (i, score) in scores.iter_mut().enumerate() {
                for (xj, &c) in x.iter_mut().zip(&cols) {
                    *xj = data.value(i, c);
                }
                *score += comp
                    .rows
                    .iter()
                    .zip(&comp.beta)
                    .map(|(row, b)| self.kernel.eval(row, &x, p_m) * b)
                    .sum::<f64>();
            }
        }
        let labels = scores.iter().map(|&s| if s >= 0.0 { 1.0 } else { -1.0 }).collect();
        Ok(Prediction { scores, labels })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: PkbModel = serde_json::from_str(text)?;
        if model.format != MODEL_FORMAT {
            return Err(PkbError::ModelFormat(format!("unexpected format tag `{}`", model.format)));
        }
        if model.version != MODEL_VERSION {
            return Err(PkbError::ModelFormat(format!("unsupported version {}", model.version)));
        }
        model.check()?;
        Ok(model)
    }

    fn check(&self) -> Result<()> {
        let m = self.pathway_names.len();
        if self.weights.len() != m {
            return Err(PkbError::ModelFormat(format!("{} weights for {m} pathways", self.weights.len())));
        }
        for c in &self.components {
            if c.pathway >= m {
                return Err(PkbError::ModelFormat(format!("component for unknown pathway {}", c.pathway)));
            }
            if c.beta.len() != c.support.len() || c.rows.len() != c.support.len() {
                return Err(PkbError::ModelFormat(format!("pathway {}: support, beta and rows differ in length", c.pathway)));
            }
            if c.rows.iter().any(|r| r.len() != c.genes.len()) {
                return Err(PkbError::ModelFormat(format!("pathway {}: row length differs from gene count", c.pathway)));
            }
        }
        self.kernel.validate()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()? + "\n").map_err(|e| PkbError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| PkbError::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Sorts `(name, weight)` pairs by descending weight, ties by name.
pub fn sorted_weights(names: &[String], weights: &[f64]) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = names.iter().cloned().zip(weights.iter().copied()).collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}
