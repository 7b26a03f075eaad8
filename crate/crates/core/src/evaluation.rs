//! Nested cross-validation.
//!
//! The data are split into stratified outer folds. For each fold the other
//! folds form the training split: the stopping iteration is chosen there by
//! inner cross-validation, a model is refit on the whole training split for
//! that many iterations, and its error is measured on the held-out fold.

use std::fmt::Write as _;
use std::path::Path;

use log::info;
use serde::Serialize;

use crate::boosting::{boost, check_training_inputs, cv_on_kernels, stratified_folds, FitConfig};
use crate::data::{ExpressionDataset, LabelVector, PathwayCollection};
use crate::error::{PkbError, Result};
use crate::kernels::build_kernel_set;
use crate::model::{sorted_weights, PkbModel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub lambda: f64,
    pub t_star: usize,
    pub test_error: f64,
    /// Pathway weights of the refit model, in pathway order.
    pub weights: Vec<f64>,
    /// Training loss of the refit model.
    pub loss_history: Vec<f64>,
    /// Training loss of every inner-fold model.
    pub inner_loss_histories: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub pathway_names: Vec<String>,
    pub folds: Vec<FoldResult>,
    pub mean_error: f64,
    pub mean_weights: Vec<f64>,
}

impl Evaluation {
    /// All training-loss histories produced along the way.
    pub fn loss_histories(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.folds
            .iter()
            .flat_map(|f| std::iter::once(&f.loss_history).chain(f.inner_loss_histories.iter()))
    }

    /// `(name, mean weight)` sorted by descending weight, ties by name.
    pub fn sorted_mean_weights(&self) -> Vec<(String, f64)> {
        sorted_weights(&self.pathway_names, &self.mean_weights)
    }

    /// CSV with one row per outer fold and a final `mean` row.
    pub fn folds_csv(&self) -> String {
        let mut out = String::from("fold,n_train,n_test,lambda,t_star,test_error\n");
        for f in &self.folds {
            let _ = writeln!(
                out,
                "{},{},{},{:.12e},{},{:.12e}",
                f.fold + 1,
                f.n_train,
                f.n_test,
                f.lambda,
                f.t_star,
                f.test_error
            );
        }
        let _ = writeln!(out, "mean,,,,,{:.12e}", self.mean_error);
        out
    }

    /// CSV `pathway,weight` sorted by descending mean weight.
    pub fn weights_csv(&self) -> String {
        weights_csv(&self.sorted_mean_weights())
    }

    /// Writes `folds.csv` and `weights.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| PkbError::io(dir, e))?;
        for (name, text) in [("folds.csv", self.folds_csv()), ("weights.csv", self.weights_csv())] {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| PkbError::io(&path, e))?;
        }
        Ok(())
    }
}

pub fn weights_csv(weights: &[(String, f64)]) -> String {
    let mut out = String::from("pathway,weight\n");
    for (name, w) in weights {
        let _ = writeln!(out, "{name},{w:.12e}");
    }
    out
}

/// Fraction of positions where the two label vectors differ.
pub fn error_rate(predicted: &[f64], truth: &[f64]) -> f64 {
    let wrong = predicted.iter().zip(truth).filter(|(p, t)| p != t).count();
    wrong as f64 / truth.len() as f64
}

/// Runs the nested protocol with `outer_folds` outer folds. Kernels are
/// computed once on the full data and restricted to each split.
pub fn evaluate(
    data: &ExpressionDataset,
    pathways: &PathwayCollection,
    y: &LabelVector,
    config: &FitConfig,
    outer_folds: usize,
) -> Result<Evaluation> {
    config.validate()?;
    check_training_inputs(data, y)?;
    let kernels = build_kernel_set(data, pathways, &config.kernel)?;
    let assignment = stratified_folds(y, outer_folds, config.seed)?;
    let mut folds = Vec::with_capacity(outer_folds);
    for fold in 0..outer_folds {
        let train: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] != fold).collect();
        let test: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] == fold).collect();
        let y_train = y.select(&train)?;
        let y_test: Vec<f64> = test.iter().map(|&i| y.values()[i]).collect();
        let k_train = kernels.subset(&train);
        let lambda = config.resolve_lambda(&k_train, &y_train);
        let inner_seed = config.seed.wrapping_add(fold as u64 + 1);
        let cv = cv_on_kernels(&k_train, &y_train, config, lambda, inner_seed)?;
        let (state, _) = boost(&k_train, &y_train, config.penalty, lambda, config.nu, cv.t_star, None)?;
        let model = PkbModel::from_state(&state, &data.select_samples(&train), pathways, config, lambda);
        let pred = model.predict(&data.select_samples(&test))?;
        let test_error = error_rate(&pred.labels, &y_test);
        info!("outer fold {}: T* = {}, test error {:.6}", fold + 1, cv.t_star, test_error);
        folds.push(FoldResult {
            fold,
            n_train: train.len(),
            n_test: test.len(),
            lambda,
            t_star: cv.t_star,
            test_error,
            weights: model.weights().to_vec(),
            loss_history: state.loss_history,
            inner_loss_histories: cv.fold_loss_histories,
        });
    }
    let k = folds.len() as f64;
    let mean_error = folds.iter().map(|f| f.test_error).sum::<f64>() / k;
    let mean_weights = (0..pathways.len())
        .map(|m| folds.iter().map(|f| f.weights[m]).sum::<f64>() / k)
        .collect();
    Ok(Evaluation {
        pathway_names: pathways.names(),
        folds,
        mean_error,
        mean_weights,
    })
}

/// One nested evaluation per entry of `config.lambda_grid_factors`, each
/// scaling λ on top of `config.lambda_factor`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaSweep {
    pub factors: Vec<f64>,
    pub runs: Vec<Evaluation>,
}

impl LambdaSweep {
    /// Index of the run with the lowest mean error; the first one wins ties.
    pub fn best(&self) -> usize {
        let mut best = 0;
        for (i, run) in self.runs.iter().enumerate() {
            if run.mean_error < self.runs[best].mean_error {
                best = i;
            }
        }
        best
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("factor,mean_error\n");
        for (f, run) in self.factors.iter().zip(&self.runs) {
            let _ = writeln!(out, "{f:.12e},{:.12e}", run.mean_error);
        }
        out
    }

    /// Writes `sweep.csv`, the best run's reports into `dir` and every run's
    /// reports into `dir/factor_<i>`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        self.runs[self.best()].write(dir)?;
        for (i, run) in self.runs.iter().enumerate() {
            run.write(dir.join(format!("factor_{}", i + 1)))?;
        }
        let path = dir.join("sweep.csv");
        std::fs::write(&path, self.summary_csv()).map_err(|e| PkbError::io(&path, e))
    }
}

pub fn sweep_lambda(
    data: &ExpressionDataset,
    pathways: &PathwayCollection,
    y: &LabelVector,
    config: &FitConfig,
    outer_folds: usize,
) -> Result<LambdaSweep> {
    config.validate()?;
    if config.lambda_grid_factors.is_empty() {
        return Err(PkbError::InvalidConfig("the λ grid is empty".into()));
    }
    let mut runs = Vec::with_capacity(config.lambda_grid_factors.len());
    for &factor in &config.lambda_grid_factors {
        let run_config = FitConfig {
            lambda_factor: config.lambda_factor * factor,
            ..config.clone()
        };
        let run = evaluate(data, pathways, y, &run_config, outer_folds)?;
        info!("λ factor {factor}: mean test error {:.6}", run.mean_error);
        runs.push(run);
    }
    Ok(LambdaSweep {
        factors: config.lambda_grid_factors.clone(),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_rate_counts_mismatches() {
        assert_eq!(error_rate(&[1.0, 1.0, -1.0, 1.0], &[1.0, -1.0, -1.0, -1.0]), 0.5);
        // a constant +1 predictor errs on exactly the negatives
        let truth = [1.0, 1.0, 1.0, -1.0, 1.0];
        assert_eq!(error_rate(&[1.0; 5], &truth), 0.2);
    }

    #[test]
    fn csv_layout() {
        let ev = Evaluation {
            pathway_names: vec!["a".into(), "b".into()],
            folds: vec![FoldResult {
                fold: 0,
                n_train: 4,
                n_test: 2,
                lambda: 0.5,
                t_star: 3,
                test_error: 0.25,
                weights: vec![0.1, 0.2],
                loss_history: vec![],
                inner_loss_histories: vec![],
            }],
            mean_error: 0.25,
            mean_weights: vec![0.1, 0.2],
        };
        assert_eq!(
            ev.folds_csv(),
            "fold,n_train,n_test,lambda,t_star,test_error\n1,4,2,5.000000000000e-1,3,2.500000000000e-1\nmean,,,,,2.500000000000e-1\n"
        );
        assert_eq!(ev.weights_csv(), "pathway,weight\nb,2.000000000000e-1\na,1.000000000000e-1\n");
    }
}
