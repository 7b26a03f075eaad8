//! The boosting loop.
//!
//! Starting from the best constant, every iteration computes the log-loss
//! derivatives, fits one penalized kernel learner per pathway, keeps the one
//! with the smallest working loss, line-searches its step length on the true
//! loss, and adds the shrunken step to the fit. Coefficients accumulate per
//! pathway, so the final model is `Σ_m K_m(·) β^(m) + C`.

use faer::Mat;
use log::{debug, info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{ExpressionDataset, LabelVector, PathwayCollection};
use crate::error::{PkbError, Result};
use crate::kernels::{build_kernel_set, KernelSet, KernelSpec};
use crate::linalg::matvec;
use crate::model::PkbModel;
use crate::solvers::{
    center_into, compute_derivatives, intercept_from_fitted, lambda_max, line_search, log_loss, solve_l1, solve_l2_dual,
    working_loss, BaseLearnerFit, DerivativeState, Penalty,
};

/// λ returned by [`auto_lambda`] when every pathway's `λ_max` is zero.
pub const AUTO_LAMBDA_FALLBACK: f64 = 1e-3;
/// Fraction of the median `λ_max` used as the automatic λ.
pub const AUTO_LAMBDA_FRACTION: f64 = 0.2;
pub const DEFAULT_LAMBDA_GRID: [f64; 5] = [1.0 / 25.0, 1.0 / 5.0, 1.0, 5.0, 25.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lambda {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub penalty: Penalty,
    pub lambda: Lambda,
    /// Multiplies the resolved λ (automatic or fixed).
    pub lambda_factor: f64,
    /// Shrinkage applied to every step.
    pub nu: f64,
    /// Iterations to run, or the largest iteration count scanned by CV.
    pub max_iters: usize,
    pub inner_folds: usize,
    pub kernel: KernelSpec,
    pub seed: u64,
    pub lambda_grid_factors: Vec<f64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            penalty: Penalty::L1,
            lambda: Lambda::Auto,
            lambda_factor: 1.0,
            nu: 0.05,
            max_iters: 500,
            inner_folds: 3,
            kernel: KernelSpec::rbf(),
            seed: 0,
            lambda_grid_factors: DEFAULT_LAMBDA_GRID.to_vec(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(PkbError::InvalidConfig(msg));
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return bad(format!("learning rate must lie in (0, 1], got {}", self.nu));
        }
        if let Lambda::Fixed(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("λ must be positive, got {l}"));
            }
        }
        if !(self.lambda_factor > 0.0 && self.lambda_factor.is_finite()) {
            return bad(format!("λ factor must be positive, got {}", self.lambda_factor));
        }
        if self.inner_folds < 2 {
            return bad("at least 2 inner folds are required".into());
        }
        if self.lambda_grid_factors.iter().any(|f| !(*f > 0.0)) {
            return bad("λ grid factors must be positive".into());
        }
        self.kernel.validate()
    }

    /// The λ actually used on `kernels`/`y`: the automatic or fixed base
    /// value times `lambda_factor`.
    pub fn resolve_lambda(&self, kernels: &KernelSet, y: &LabelVector) -> f64 {
        let base = match self.lambda {
            Lambda::Fixed(l) => l,
            Lambda::Auto => {
                let f0 = init_intercept(y);
                let deriv = compute_derivatives(y.values(), &vec![f0; y.len()]);
                let l = auto_lambda(&deriv, kernels, self.penalty);
                info!("automatic λ = {l:.6e}");
                l
            }
        };
        base * self.lambda_factor
    }
}

/// Best constant fit `log(N₊/N₋)`.
pub fn init_intercept(y: &LabelVector) -> f64 {
    let (pos, neg) = y.class_counts();
    (pos as f64 / neg as f64).ln()
}

/// Median of the per-pathway `λ_max` values times [`AUTO_LAMBDA_FRACTION`],
/// or [`AUTO_LAMBDA_FALLBACK`] when that is zero.
pub fn lambda_from_maxima(maxima: &[f64]) -> f64 {
    let mut sorted = maxima.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        return AUTO_LAMBDA_FALLBACK;
    }
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let l = AUTO_LAMBDA_FRACTION * median;
    if l > 0.0 {
        l
    } else {
        AUTO_LAMBDA_FALLBACK
    }
}

/// Automatic λ from the derivatives at the constant model: one λ scale is
/// shared by both penalties.
pub fn auto_lambda(deriv: &DerivativeState, kernels: &KernelSet, _penalty: Penalty) -> f64 {
    let n = deriv.len();
    let maxima: Vec<f64> = kernels
        .matrices()
        .par_iter()
        .map_init(
            || Mat::<f64>::zeros(n, n),
            |buf, k| {
                let et = center_into(&deriv.eta, &deriv.w, k, buf);
                lambda_max(buf, &et)
            },
        )
        .collect();
    lambda_from_maxima(&maxima)
}

/// Kernels plus whatever per-fit precomputation the penalty's solver needs.
pub(crate) struct PreparedKernels<'a> {
    kernels: &'a KernelSet,
    /// `K_m²`, used by the dual ridge solve.
    squares: Option<Vec<Mat<f64>>>,
}

impl<'a> PreparedKernels<'a> {
    pub(crate) fn new(kernels: &'a KernelSet, penalty: Penalty) -> Self {
        let squares = match penalty {
            Penalty::L1 => None,
            Penalty::L2 => Some(kernels.matrices().par_iter().map(|k| k * k).collect()),
        };
        PreparedKernels { kernels, squares }
    }
}

struct PathwayFit {
    fit: BaseLearnerFit,
    fitted: Vec<f64>,
}

fn fit_pathway(
    m: usize,
    deriv: &DerivativeState,
    prepared: &PreparedKernels<'_>,
    lambda: f64,
    penalty: Penalty,
    buf: &mut Mat<f64>,
) -> Result<PathwayFit> {
    let k = prepared.kernels.matrix(m);
    let beta = match (penalty, &prepared.squares) {
        (Penalty::L2, Some(squares)) => solve_l2_dual(k, &squares[m], &deriv.eta, &deriv.w, lambda),
        (Penalty::L2, None) => {
            let et = center_into(&deriv.eta, &deriv.w, k, buf);
            crate::solvers::solve_l2(buf, &et, lambda)
        }
        (Penalty::L1, _) => {
            let et = center_into(&deriv.eta, &deriv.w, k, buf);
            solve_l1(buf, &et, lambda)
        }
    }
    .map_err(|e| PkbError::InPathway {
        pathway: m,
        source: Box::new(e),
    })?;
    let kb = matvec(k, &beta);
    let intercept = intercept_from_fitted(&deriv.eta, &deriv.w, &kb);
    let regularized_loss = working_loss(deriv, &kb, intercept) + penalty.value(&beta, lambda);
    let fitted = kb.iter().map(|v| v + intercept).collect();
    Ok(PathwayFit {
        fit: BaseLearnerFit {
            pathway_index: m,
            beta,
            intercept,
            regularized_loss,
        },
        fitted,
    })
}

fn select_prepared(
    deriv: &DerivativeState,
    prepared: &PreparedKernels<'_>,
    lambda: f64,
    penalty: Penalty,
) -> Result<PathwayFit> {
    let n = deriv.len();
    let fits: Vec<Result<PathwayFit>> = (0..prepared.kernels.len())
        .into_par_iter()
        .map_init(
            || Mat::<f64>::zeros(n, n),
            |buf, m| fit_pathway(m, deriv, prepared, lambda, penalty, buf),
        )
        .collect();
    let mut best: Option<PathwayFit> = None;
    for fit in fits {
        let fit = fit?;
        // strict comparison keeps the lowest index on ties
        if best.as_ref().is_none_or(|b| fit.fit.regularized_loss < b.fit.regularized_loss) {
            best = Some(fit);
        }
    }
    Ok(best.expect("kernel sets are never empty"))
}

/// Fits every pathway's penalized learner and returns the one with the
/// smallest working loss (lowest pathway index on ties).
pub fn select_base_learner(
    deriv: &DerivativeState,
    kernels: &KernelSet,
    lambda: f64,
    penalty: Penalty,
) -> Result<BaseLearnerFit> {
    let prepared = PreparedKernels::new(kernels, penalty);
    Ok(select_prepared(deriv, &prepared, lambda, penalty)?.fit)
}

/// Training state after some number of iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostState {
    /// Current fit at the training samples.
    pub f: Vec<f64>,
    /// Accumulated coefficients, one vector per pathway.
    pub beta_acc: Vec<Vec<f64>>,
    /// Accumulated intercept, including the initial constant.
    pub intercept: f64,
    pub initial_value: f64,
    /// Iterations completed.
    pub t: usize,
    /// Training loss of `F_0, F_1, …, F_t` (length `t + 1`).
    pub loss_history: Vec<f64>,
    /// Pathway chosen at each iteration.
    pub selection_history: Vec<usize>,
    /// Line-search step at each iteration (before shrinkage).
    pub step_history: Vec<f64>,
    /// Iterations stopped before the limit because the step was degenerate.
    pub stopped_early: bool,
}

impl BoostState {
    fn new(y: &LabelVector, n_pathways: usize) -> Self {
        let f0 = init_intercept(y);
        let f = vec![f0; y.len()];
        BoostState {
            loss_history: vec![log_loss(y.values(), &f)],
            f,
            beta_acc: vec![vec![0.0; y.len()]; n_pathways],
            intercept: f0,
            initial_value: f0,
            t: 0,
            selection_history: Vec::new(),
            step_history: Vec::new(),
            stopped_early: false,
        }
    }
}

/// Held-out samples tracked during training.
pub(crate) struct Validation<'a> {
    /// Per pathway, kernel between training rows and held-out columns.
    pub cross: Vec<Mat<f64>>,
    pub y: &'a [f64],
}

/// Runs the boosting loop on precomputed kernels. When `validation` is
/// given, returns the held-out log loss after each iteration as well.
pub(crate) fn boost(
    kernels: &KernelSet,
    y: &LabelVector,
    penalty: Penalty,
    lambda: f64,
    nu: f64,
    iterations: usize,
    validation: Option<&Validation<'_>>,
) -> Result<(BoostState, Vec<f64>)> {
    if kernels.n_samples() != y.len() {
        return Err(PkbError::DimensionMismatch(format!(
            "{} kernel rows for {} labels",
            kernels.n_samples(),
            y.len()
        )));
    }
    let prepared = PreparedKernels::new(kernels, penalty);
    let mut state = BoostState::new(y, kernels.len());
    let mut val_f = validation.map(|v| vec![state.initial_value; v.y.len()]);
    let mut val_curve = Vec::new();

    for t in 0..iterations {
        let deriv = compute_derivatives(y.values(), &state.f);
        let best = select_prepared(&deriv, &prepared, lambda, penalty)?;
        if best.fit.beta.iter().all(|&b| b == 0.0) {
            warn!("iteration {}: best learner has all-zero coefficients, stopping", t + 1);
            state.stopped_early = true;
            break;
        }
        let d = line_search(y.values(), &state.f, &best.fitted)?;
        if d == 0.0 {
            warn!("iteration {}: no descent along the selected learner, stopping", t + 1);
            state.stopped_early = true;
            break;
        }
        let scale = nu * d;
        let m = best.fit.pathway_index;
        for (fi, gi) in state.f.iter_mut().zip(&best.fitted) {
            *fi += scale * gi;
        }
        for (acc, b) in state.beta_acc[m].iter_mut().zip(&best.fit.beta) {
            *acc += scale * b;
        }
        state.intercept += scale * best.fit.intercept;
        state.t += 1;
        state.selection_history.push(m);
        state.step_history.push(d);
        let loss = log_loss(y.values(), &state.f);
        state.loss_history.push(loss);
        let line = format!(
            "iteration {}: pathway {} ({}), step {:.12e}, training loss {:.12e}",
            t + 1,
            m,
            kernels.names()[m],
            d,
            loss
        );
        if validation.is_some() {
            debug!("{line}");
        } else {
            info!("{line}");
        }
        if let (Some(v), Some(vf)) = (validation, val_f.as_mut()) {
            let inc = crate::linalg::tmatvec(&v.cross[m], &best.fit.beta);
            for (fi, gi) in vf.iter_mut().zip(inc) {
                *fi += scale * (gi + best.fit.intercept);
            }
            val_curve.push(log_loss(v.y, vf));
        }
    }
    Ok((state, val_curve))
}

/// Trains a model for exactly `config.max_iters` iterations (fewer if a
/// step degenerates).
pub fn fit(data: &ExpressionDataset, pathways: &PathwayCollection, y: &LabelVector, config: &FitConfig) -> Result<PkbModel> {
    config.validate()?;
    check_training_inputs(data, y)?;
    let kernels = build_kernel_set(data, pathways, &config.kernel)?;
    let lambda = config.resolve_lambda(&kernels, y);
    let (state, _) = boost(&kernels, y, config.penalty, lambda, config.nu, config.max_iters, None)?;
    Ok(PkbModel::from_state(&state, data, pathways, config, lambda))
}

/// Chooses the iteration count by inner cross-validation (scanning up to
/// `config.max_iters`), then trains on all samples for that many iterations.
pub fn fit_cv(
    data: &ExpressionDataset,
    pathways: &PathwayCollection,
    y: &LabelVector,
    config: &FitConfig,
) -> Result<(PkbModel, CvOutcome)> {
    config.validate()?;
    check_training_inputs(data, y)?;
    let kernels = build_kernel_set(data, pathways, &config.kernel)?;
    let lambda = config.resolve_lambda(&kernels, y);
    let cv = cv_on_kernels(&kernels, y, config, lambda, config.seed)?;
    let (state, _) = boost(&kernels, y, config.penalty, lambda, config.nu, cv.t_star, None)?;
    Ok((PkbModel::from_state(&state, data, pathways, config, lambda), cv))
}

pub(crate) fn check_training_inputs(data: &ExpressionDataset, y: &LabelVector) -> Result<()> {
    if data.n_samples() != y.len() {
        return Err(PkbError::DimensionMismatch(format!(
            "{} samples but {} labels",
            data.n_samples(),
            y.len()
        )));
    }
    if data.n_samples() < 2 {
        return Err(PkbError::InvalidDataset("at least two training samples are required".into()));
    }
    Ok(())
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin.
/// Returns the fold id of every sample.
pub fn stratified_folds(y: &LabelVector, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(PkbError::InvalidConfig("at least 2 folds are required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; y.len()];
    let mut next = 0;
    for class in [1.0, -1.0] {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y.values()[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            fold_of[i] = next % k;
            next += 1;
        }
    }
    for fold in 0..k {
        let held: Vec<f64> = (0..y.len()).filter(|&i| fold_of[i] == fold).map(|i| y.values()[i]).collect();
        let rest: Vec<f64> = (0..y.len()).filter(|&i| fold_of[i] != fold).map(|i| y.values()[i]).collect();
        let two_class = |v: &[f64]| v.contains(&1.0) && v.contains(&-1.0);
        if !two_class(&held) || !two_class(&rest) {
            return Err(PkbError::Stratification { fold });
        }
    }
    Ok(fold_of)
}

/// 1-based position of the smallest value; the lowest index wins ties.
pub fn argmin_iteration(curve: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in curve.iter().enumerate() {
        if *v < curve[best] {
            best = i;
        }
    }
    best + 1
}

/// Result of the inner cross-validation.
#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub t_star: usize,
    pub lambda: f64,
    /// Held-out loss after 1..=T iterations, averaged over folds.
    pub mean_curve: Vec<f64>,
    pub fold_curves: Vec<Vec<f64>>,
    /// Training loss histories of the fold models.
    pub fold_loss_histories: Vec<Vec<f64>>,
}

/// Picks the iteration count minimizing the fold-averaged held-out loss.
pub fn select_t_by_cv(data: &ExpressionDataset, pathways: &PathwayCollection, y: &LabelVector, config: &FitConfig) -> Result<CvOutcome> {
    config.validate()?;
    check_training_inputs(data, y)?;
    let kernels = build_kernel_set(data, pathways, &config.kernel)?;
    let lambda = config.resolve_lambda(&kernels, y);
    cv_on_kernels(&kernels, y, config, lambda, config.seed)
}

pub(crate) fn cv_on_kernels(kernels: &KernelSet, y: &LabelVector, config: &FitConfig, lambda: f64, seed: u64) -> Result<CvOutcome> {
    let folds = stratified_folds(y, config.inner_folds, seed)?;
    let t_max = config.max_iters;
    let mut fold_curves = Vec::with_capacity(config.inner_folds);
    let mut fold_loss_histories = Vec::with_capacity(config.inner_folds);
    for fold in 0..config.inner_folds {
        let train: Vec<usize> = (0..y.len()).filter(|&i| folds[i] != fold).collect();
        let held: Vec<usize> = (0..y.len()).filter(|&i| folds[i] == fold).collect();
        let y_train = y.select(&train)?;
        let y_held: Vec<f64> = held.iter().map(|&i| y.values()[i]).collect();
        let sub = kernels.subset(&train);
        let validation = Validation {
            cross: (0..kernels.len()).map(|m| kernels.block(m, &train, &held)).collect(),
            y: &y_held,
        };
        let (state, mut curve) = boost(&sub, &y_train, config.penalty, lambda, config.nu, t_max, Some(&validation))?;
        // a stopped fit keeps its last value for the remaining iterations
        let last = curve.last().copied().unwrap_or_else(|| log_loss(&y_held, &vec![state.initial_value; held.len()]));
        curve.resize(t_max, last);
        debug!("inner fold {fold}: best held-out loss at iteration {}", argmin_iteration(&curve));
        fold_curves.push(curve);
        fold_loss_histories.push(state.loss_history);
    }
    let mean_curve: Vec<f64> = (0..t_max)
        .map(|t| fold_curves.iter().map(|c| c[t]).sum::<f64>() / fold_curves.len() as f64)
        .collect();
    let t_star = argmin_iteration(&mean_curve);
    info!("cross-validated iteration count T* = {t_star}");
    Ok(CvOutcome {
        t_star,
        lambda,
        mean_curve,
        fold_curves,
        fold_loss_histories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::build_kernel_set;
    use crate::solvers::{lambda_max, weighted_centering};
    use approx::assert_abs_diff_eq;

    fn labels(v: &[f64]) -> LabelVector {
        LabelVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn initial_constant() {
        assert_eq!(init_intercept(&labels(&[1.0, -1.0, 1.0, -1.0])), 0.0);
        assert_abs_diff_eq!(init_intercept(&labels(&[1.0, 1.0, 1.0, -1.0])), 3f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(init_intercept(&labels(&[-1.0, 1.0, -1.0, -1.0])), -(3f64.ln()), epsilon = 1e-15);

        // golden-section oracle on the constant log loss
        let y = [1.0, 1.0, 1.0, -1.0];
        let phi = |r: f64| log_loss(&y, &[r; 4]);
        let (mut a, mut b) = (-10.0, 10.0);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        while b - a > 1e-10 {
            let (x1, x2) = (b - g * (b - a), a + g * (b - a));
            if phi(x1) < phi(x2) {
                b = x2
            } else {
                a = x1
            }
        }
        // comparing function values limits golden section to about √ε
        assert_abs_diff_eq!(0.5 * (a + b), 3f64.ln(), epsilon = 1e-6);
    }

    #[test]
    fn lambda_rule() {
        assert_eq!(lambda_from_maxima(&[0.0, 0.0]), AUTO_LAMBDA_FALLBACK);
        // K̃ = I, η̃ = (1,0,0,0), N = 4: λ_max = 2/4
        let kt = Mat::<f64>::identity(4, 4);
        let lmax = lambda_max(&kt, &[1.0, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(lmax, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(lambda_from_maxima(&[lmax]), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(lambda_from_maxima(&[2.0 * lmax]), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(lambda_from_maxima(&[3.0, 1.0, 2.0, 10.0]), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn auto_lambda_is_homogeneous_in_eta() {
        let k = Mat::from_fn(4, 4, |i, j| (-((i as f64 - j as f64).powi(2)) / 3.0).exp());
        let ks = KernelSet::from_matrices(vec![k.clone(), &k * &k], vec!["a".into(), "b".into()], KernelSpec::rbf()).unwrap();
        let deriv = compute_derivatives(&[1.0, -1.0, 1.0, 1.0], &[0.2, -0.1, 0.0, 0.5]);
        let base = auto_lambda(&deriv, &ks, Penalty::L1);
        let doubled = DerivativeState {
            eta: deriv.eta.iter().map(|e| 2.0 * e).collect(),
            ..deriv.clone()
        };
        assert_abs_diff_eq!(auto_lambda(&doubled, &ks, Penalty::L1), 2.0 * base, epsilon = 1e-14);
        assert_eq!(auto_lambda(&deriv, &ks, Penalty::L2), base);
    }

    #[test]
    fn auto_lambda_falls_back_on_zero_gradient() {
        let k = Mat::<f64>::identity(4, 4);
        let ks = KernelSet::from_matrices(vec![k], vec!["a".into()], KernelSpec::rbf()).unwrap();
        // balanced labels at F₀ = 0: η = -2y has zero weighted mean but the
        // identity kernel still sees it, so use a constant η instead
        let deriv = DerivativeState {
            h: vec![0.1; 4],
            q: vec![0.25; 4],
            eta: vec![0.4; 4],
            w: vec![0.125; 4],
        };
        assert_eq!(auto_lambda(&deriv, &ks, Penalty::L1), AUTO_LAMBDA_FALLBACK);
    }

    #[test]
    fn argmin_rules() {
        assert_eq!(argmin_iteration(&[0.7, 0.5, 0.6]), 2);
        assert_eq!(argmin_iteration(&[0.5, 0.4, 0.4]), 2);
        assert_eq!(argmin_iteration(&[0.9, 0.8, 0.7, 0.6]), 4);
    }

    #[test]
    fn folds_are_stratified_and_seeded() {
        let y = labels(&[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0]);
        let a = stratified_folds(&y, 3, 4).unwrap();
        assert_eq!(a, stratified_folds(&y, 3, 4).unwrap());
        for fold in 0..3 {
            let pos = (0..12).filter(|&i| a[i] == fold && y.values()[i] > 0.0).count();
            let neg = (0..12).filter(|&i| a[i] == fold && y.values()[i] < 0.0).count();
            assert_eq!((pos, neg), (2, 2));
        }
        let sparse = labels(&[1.0, 1.0, 1.0, 1.0, -1.0]);
        assert!(matches!(stratified_folds(&sparse, 3, 0), Err(PkbError::Stratification { .. })));
    }

    fn two_pathway_toy() -> (ExpressionDataset, PathwayCollection, LabelVector) {
        let x = [0.1, 1.2, -0.3, 0.8, -1.1, 0.4, 0.9, -0.7, 0.0, 1.5, -0.4, -0.2];
        let ds = ExpressionDataset::new(
            x.to_vec(),
            (0..6).map(|i| format!("s{i}")).collect(),
            vec!["g0".into(), "g1".into()],
        )
        .unwrap();
        let pws = PathwayCollection::new(
            vec![
                crate::data::Pathway { name: "p0".into(), genes: vec![0] },
                crate::data::Pathway { name: "p1".into(), genes: vec![1] },
            ],
            2,
        )
        .unwrap();
        (ds, pws, labels(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0]))
    }

    #[test]
    fn single_pathway_is_selected() {
        let (ds, pws, y) = two_pathway_toy();
        let one = PathwayCollection::new(vec![pws.get(1).clone()], 2).unwrap();
        let ks = build_kernel_set(&ds, &one, &KernelSpec::rbf()).unwrap();
        let deriv = compute_derivatives(y.values(), &[0.0; 6]);
        for penalty in [Penalty::L1, Penalty::L2] {
            assert_eq!(select_base_learner(&deriv, &ks, 0.01, penalty).unwrap().pathway_index, 0);
        }
    }

    #[test]
    fn duplicate_pathways_tie_to_first() {
        let (ds, pws, y) = two_pathway_toy();
        let dup = PathwayCollection::new(
            vec![
                pws.get(1).clone(),
                crate::data::Pathway { name: "copy".into(), genes: vec![1] },
                pws.get(0).clone(),
            ],
            2,
        )
        .unwrap();
        let ks = build_kernel_set(&ds, &dup, &KernelSpec::rbf()).unwrap();
        let deriv = compute_derivatives(y.values(), &[0.0; 6]);
        for penalty in [Penalty::L1, Penalty::L2] {
            let best = select_base_learner(&deriv, &ks, 0.01, penalty).unwrap();
            assert!(best.pathway_index == 0 || best.pathway_index == 2);
        }
        // equal losses resolve to the lower index
        let same = KernelSet::from_matrices(
            vec![ks.matrix(0).clone(), ks.matrix(0).clone()],
            vec!["a".into(), "b".into()],
            KernelSpec::rbf(),
        )
        .unwrap();
        assert_eq!(select_base_learner(&deriv, &same, 0.01, Penalty::L2).unwrap().pathway_index, 0);
    }

    #[test]
    fn pathway_spanning_the_target_is_selected() {
        // Pathway 2's centered kernel reproduces −η̃ exactly through its first
        // column; the other two are orthogonal to η̃.
        let n = 6;
        let y = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let deriv = compute_derivatives(&y, &[0.0; 6]);
        let w = &deriv.w;
        let (et, _) = weighted_centering(&deriv.eta, w, &Mat::<f64>::identity(n, n));
        // uniform weights here, so centering is a scaled mean removal
        let ortho: Vec<f64> = vec![1.0, 1.0, -1.0, -1.0, 0.0, 0.0];
        assert_abs_diff_eq!(crate::linalg::dot(&ortho, &et), 0.0, epsilon = 1e-14);
        let rank_one = |v: &[f64]| Mat::from_fn(n, n, |i, j| v[i] * v[j]);
        let target: Vec<f64> = deriv.eta.iter().map(|e| -e).collect();
        let ks = KernelSet::from_matrices(
            vec![rank_one(&ortho), Mat::<f64>::zeros(n, n), rank_one(&target)],
            vec!["a".into(), "b".into(), "c".into()],
            KernelSpec::rbf(),
        )
        .unwrap();
        for penalty in [Penalty::L1, Penalty::L2] {
            let best = select_base_learner(&deriv, &ks, 1e-4, penalty).unwrap();
            assert_eq!(best.pathway_index, 2);
            // exhaustive comparison against every pathway's own loss
            let prepared = PreparedKernels::new(&ks, penalty);
            let mut buf = Mat::<f64>::zeros(n, n);
            for m in 0..3 {
                let other = fit_pathway(m, &deriv, &prepared, 1e-4, penalty, &mut buf).unwrap();
                assert!(best.regularized_loss <= other.fit.regularized_loss);
            }
        }
    }

    #[test]
    fn one_l2_step_matches_scripted_oracle() {
        // 4 samples, one pathway, ν = 1, T = 1
        let ds = ExpressionDataset::new(
            vec![0.2, -0.5, 1.0, 0.3],
            (0..4).map(|i| format!("s{i}")).collect(),
            vec!["g".into()],
        )
        .unwrap();
        let pws = PathwayCollection::new(vec![crate::data::Pathway { name: "p".into(), genes: vec![0] }], 1).unwrap();
        let y = labels(&[1.0, -1.0, 1.0, 1.0]);
        let config = FitConfig {
            penalty: Penalty::L2,
            lambda: Lambda::Fixed(1e-4),
            nu: 1.0,
            max_iters: 1,
            ..FitConfig::default()
        };
        let model = fit(&ds, &pws, &y, &config).unwrap();

        let x: [f64; 4] = [0.2, -0.5, 1.0, 0.3];
        let k = Mat::from_fn(4, 4, |i, j| (-(x[i] - x[j]) * (x[i] - x[j])).exp());
        let f0 = 3f64.ln();
        let deriv = compute_derivatives(y.values(), &[f0; 4]);
        let (et, kt) = weighted_centering(&deriv.eta, &deriv.w, &k);
        let beta = crate::solvers::solve_l2(&kt, &et, 1e-4).unwrap();
        let c = crate::solvers::recover_intercept(&deriv.eta, &deriv.w, &k, &beta);
        let g: Vec<f64> = matvec(&k, &beta).iter().map(|v| v + c).collect();
        let d = line_search(y.values(), &[f0; 4], &g).unwrap();
        let expected: Vec<f64> = g.iter().map(|gi| f0 + d * gi).collect();

        let scores = model.predict(&ds).unwrap().scores;
        for i in 0..4 {
            assert_abs_diff_eq!(scores[i], expected[i], epsilon = 1e-8);
        }
        assert_eq!(model.iterations(), 1);
    }

    #[test]
    fn huge_lambda_gives_constant_model() {
        let (ds, pws, _) = two_pathway_toy();
        let y = LabelVector::new(vec![1.0, 1.0, 1.0, -1.0, 1.0, -1.0]).unwrap();
        let config = FitConfig {
            penalty: Penalty::L1,
            lambda: Lambda::Fixed(1e6),
            max_iters: 1,
            ..FitConfig::default()
        };
        let model = fit(&ds, &pws, &y, &config).unwrap();
        assert_eq!(model.iterations(), 0);
        let pred = model.predict(&ds).unwrap();
        assert!(pred.scores.iter().all(|&s| s == 2f64.ln()));
        assert!(pred.labels.iter().all(|&l| l == 1.0));
        assert!(model.pathway_weights().iter().all(|(_, w)| *w == 0.0));
    }

    #[test]
    fn config_validation() {
        let ok = FitConfig::default();
        assert!(ok.validate().is_ok());
        assert!(FitConfig { nu: 0.0, ..ok.clone() }.validate().is_err());
        assert!(FitConfig { nu: 1.5, ..ok.clone() }.validate().is_err());
        assert!(FitConfig { max_iters: 0, ..ok.clone() }.validate().is_err());
        assert!(FitConfig { lambda: Lambda::Fixed(-1.0), ..ok.clone() }.validate().is_err());
        assert!(FitConfig { inner_folds: 1, ..ok }.validate().is_err());
    }
}
