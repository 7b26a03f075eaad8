//! The inner machinery of one boosting step.
//!
//! At the current fit `F`, the log loss is replaced by its second-order
//! expansion. With `η_i = h_i/q_i` and weights `w_i = q_i/2`, the best
//! increment `Kβ + c` inside one pathway minimizes
//!
//! ```text
//! (1/N) (η + Kβ + 1c)ᵀ W (η + Kβ + 1c) + Ω(β)
//! ```
//!
//! Eliminating `c` with the weighted-centering projector turns this into an
//! intercept-free least-squares problem in `(η̃, K̃)`, solved by coordinate
//! descent (L1) or a Cholesky solve (L2). The intercept is then recovered from
//! the stationarity condition in `c`.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{PkbError, Result};
use crate::linalg::{dot, matvec, spd_solve, spd_solve_conditioned, spd_well_conditioned, tmatvec};

/// Floor applied to the second derivative before dividing by it.
pub const CURVATURE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Penalty {
    L1,
    L2,
}

impl Penalty {
    pub fn value(&self, beta: &[f64], lambda: f64) -> f64 {
        match self {
            Penalty::L1 => lambda * beta.iter().map(|b| b.abs()).sum::<f64>(),
            Penalty::L2 => lambda * dot(beta, beta),
        }
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^{-z})` without overflow.
#[inline]
pub fn softplus_neg(z: f64) -> f64 {
    (-z).max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean log loss `(1/N) Σ log(1 + exp(-y_i F_i))`.
pub fn log_loss(y: &[f64], f: &[f64]) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    y.iter().zip(f).map(|(&yi, &fi)| softplus_neg(yi * fi)).sum::<f64>() / y.len() as f64
}

/// First and second derivatives of the log loss at the current fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeState {
    pub h: Vec<f64>,
    /// Second derivatives before clamping.
    pub q: Vec<f64>,
    /// `h / max(q, CURVATURE_FLOOR)`
    pub eta: Vec<f64>,
    /// `max(q, CURVATURE_FLOOR) / 2`
    pub w: Vec<f64>,
}

impl DerivativeState {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

pub fn compute_derivatives(y: &[f64], f: &[f64]) -> DerivativeState {
    let n = y.len();
    let (mut h, mut q, mut eta, mut w) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for (&yi, &fi) in y.iter().zip(f) {
        let z = yi * fi;
        let s_pos = sigmoid(z);
        let s_neg = sigmoid(-z);
        let hi = -yi * s_neg;
        let qi = s_pos * s_neg;
        let qc = qi.max(CURVATURE_FLOOR);
        h.push(hi);
        q.push(qi);
        eta.push(hi / qc);
        w.push(qc / 2.0);
    }
    DerivativeState { h, q, eta, w }
}

/// Applies `W^{1/2} (I − 1 wᵀ / Σw)` to `η` and to `K`.
pub fn weighted_centering(eta: &[f64], w: &[f64], k: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let mut kt = Mat::<f64>::zeros(k.nrows(), k.ncols());
    let et = center_into(eta, w, k, &mut kt);
    (et, kt)
}

/// [`weighted_centering`] writing `K̃` into a caller-owned buffer.
pub(crate) fn center_into(eta: &[f64], w: &[f64], k: &Mat<f64>, kt: &mut Mat<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    let sqrt_w: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let eta_mean = dot(w, eta) / total;
    let et = eta.iter().zip(&sqrt_w).map(|(e, s)| s * (e - eta_mean)).collect();
    for j in 0..k.ncols() {
        let col = k.col_as_slice(j);
        let mean = dot(w, col) / total;
        for ((o, &kij), s) in kt.col_as_slice_mut(j).iter_mut().zip(col).zip(&sqrt_w) {
            *o = s * (kij - mean);
        }
    }
    et
}

/// Ridge step: solves `(K̃ᵀK̃ + NλI) β = −K̃ᵀη̃`.
pub fn solve_l2(kt: &Mat<f64>, et: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let n = kt.nrows() as f64;
    let mut gram = kt.transpose() * kt;
    for i in 0..gram.nrows() {
        gram[(i, i)] += n * lambda;
    }
    let rhs: Vec<f64> = tmatvec(kt, et).into_iter().map(|v| -v).collect();
    spd_solve(&gram, &rhs).ok_or_else(|| PkbError::DimensionMismatch("ridge system is not positive definite".into()))
}

/// Ridge step in its dual form, using a precomputed `K²`:
/// `β = −K̃ᵀ (K̃K̃ᵀ + NλI)^{-1} η̃` with `K̃K̃ᵀ = W^{1/2} P K² Pᵀ W^{1/2}`.
///
/// Algebraically identical to [`solve_l2`] but needs no `O(N³)` product per
/// call, only a Cholesky factorization.
pub fn solve_l2_dual(k: &Mat<f64>, k_sq: &Mat<f64>, eta: &[f64], w: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let n = eta.len();
    let total: f64 = w.iter().sum();
    let v: Vec<f64> = w.iter().map(|x| x / total).collect();
    let d: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let a = matvec(k_sq, &v);
    let b = dot(&v, &a);
    let eta_mean = dot(&v, eta);
    let et: Vec<f64> = eta.iter().zip(&d).map(|(e, s)| s * (e - eta_mean)).collect();

    let ridge = n as f64 * lambda;
    let mut g = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        let kcol = k_sq.col_as_slice(j);
        let gcol = g.col_as_slice_mut(j);
        for i in 0..n {
            gcol[i] = d[i] * d[j] * (kcol[i] - a[i] - a[j] + b);
        }
        gcol[j] += ridge;
    }
    let alpha = spd_solve(&g, &et).ok_or_else(|| PkbError::DimensionMismatch("ridge system is not positive definite".into()))?;
    let u: Vec<f64> = alpha.iter().zip(&d).map(|(a, s)| a * s).collect();
    let u_sum: f64 = u.iter().sum();
    let u: Vec<f64> = u.iter().zip(&v).map(|(ui, vi)| ui - vi * u_sum).collect();
    Ok(matvec(k, &u).into_iter().map(|x| -x).collect())
}

#[derive(Debug, Clone, Copy)]
pub struct LassoOptions {
    /// Relative KKT tolerance: a zero coefficient is optimal when
    /// `|(2/N) K̃_jᵀ(η̃ + K̃β)| ≤ λ (1 + tol)`.
    pub tol: f64,
    /// Limit on restricted solves and working-set rounds together.
    pub max_sweeps: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        LassoOptions {
            tol: 1e-9,
            max_sweeps: 10_000,
        }
    }
}

/// Columns added to the working set per round.
const WORKING_SET_BATCH: usize = 10;

/// Restricted Gram matrices whose squared Cholesky pivots span more than
/// the inverse of this are treated as singular.
const PIVOT_RATIO: f64 = 1e-10;

/// Smallest λ for which `β = 0` solves the L1 problem: `max_j |(2/N) K̃_jᵀ η̃|`.
pub fn lambda_max(kt: &Mat<f64>, et: &[f64]) -> f64 {
    let n = et.len() as f64;
    (0..kt.ncols())
        .map(|j| (2.0 / n * dot(kt.col_as_slice(j), et)).abs())
        .fold(0.0, f64::max)
}

/// LASSO step: minimizes `(1/N)‖η̃ + K̃β‖² + λ‖β‖₁`.
///
/// Works on a growing set of columns. Each round adds the columns that
/// violate the optimality conditions most, then solves the problem
/// restricted to the set exactly: with the signs of the coefficients fixed
/// it is a quadratic, and a coefficient that would change sign leaves the
/// set. The loop ends when no column outside the set violates the
/// conditions.
pub fn solve_l1(kt: &Mat<f64>, et: &[f64], lambda: f64) -> Result<Vec<f64>> {
    solve_l1_with(kt, et, lambda, LassoOptions::default())
}

pub fn solve_l1_with(kt: &Mat<f64>, et: &[f64], lambda: f64, opts: LassoOptions) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let p = kt.ncols();
    if lambda >= lambda_max(kt, et) {
        return Ok(vec![0.0; p]);
    }
    let t = kt.nrows() as f64 * lambda / 2.0;
    let mut ws = WorkingSet {
        idx: Vec::new(),
        b: Vec::new(),
        s: Vec::new(),
        gram: Mat::zeros(0, 0),
        c: Vec::new(),
    };
    let mut steps = 0;
    loop {
        // gradient of the quadratic part, up to the factor 2/N
        let mut resid = et.to_vec();
        for (&j, &bj) in ws.idx.iter().zip(&ws.b) {
            for (r, &c) in resid.iter_mut().zip(kt.col_as_slice(j)) {
                *r += c * bj;
            }
        }
        let grad = tmatvec(kt, &resid);
        let mut in_set = vec![false; p];
        for &j in &ws.idx {
            in_set[j] = true;
        }
        let mut violators: Vec<usize> = (0..p).filter(|&j| !in_set[j] && grad[j].abs() > t * (1.0 + opts.tol)).collect();
        if violators.is_empty() {
            return Ok(ws.to_dense(p));
        }
        steps += 1;
        if steps >= opts.max_sweeps {
            return Err(PkbError::NotConverged {
                sweeps: steps,
                last_iterate: ws.to_dense(p),
            });
        }
        violators.sort_by(|&a, &b| grad[b].abs().total_cmp(&grad[a].abs()).then(a.cmp(&b)));
        violators.truncate(WORKING_SET_BATCH.max(ws.idx.len()));
        ws.extend(kt, et, &violators, &grad);
        if !ws.solve(t, &mut steps, opts) {
            return Err(PkbError::NotConverged {
                sweeps: steps,
                last_iterate: ws.to_dense(p),
            });
        }
    }
}

/// Columns in play, their coefficients and signs, and the matching blocks
/// `G = K̃_Wᵀ K̃_W` and `c = K̃_Wᵀ η̃`.
struct WorkingSet {
    idx: Vec<usize>,
    b: Vec<f64>,
    s: Vec<f64>,
    gram: Mat<f64>,
    c: Vec<f64>,
}

impl WorkingSet {
    fn to_dense(&self, p: usize) -> Vec<f64> {
        let mut beta = vec![0.0; p];
        for (&j, &bj) in self.idx.iter().zip(&self.b) {
            beta[j] = bj;
        }
        beta
    }

    /// Adds columns at zero with the sign that decreases the objective.
    fn extend(&mut self, kt: &Mat<f64>, et: &[f64], cols: &[usize], grad: &[f64]) {
        let n = kt.nrows();
        let old = self.idx.len();
        let mut idx = self.idx.clone();
        idx.extend_from_slice(cols);
        let all = Mat::from_fn(n, idx.len(), |i, k| kt[(i, idx[k])]);
        // rows for the new columns against every column
        let fresh = all.subcols(old, cols.len()).transpose() * &all;
        let prev = &self.gram;
        let gram = Mat::from_fn(idx.len(), idx.len(), |i, k| match (i < old, k < old) {
            (true, true) => prev[(i, k)],
            (false, _) => fresh[(i - old, k)],
            (true, false) => fresh[(k - old, i)],
        });
        for &j in cols {
            self.b.push(0.0);
            self.s.push(-grad[j].signum());
            self.c.push(dot(kt.col_as_slice(j), et));
        }
        self.idx = idx;
        self.gram = gram;
    }

    /// Keeps the positions for which `keep` holds.
    fn retain(&mut self, keep: impl Fn(usize) -> bool) {
        let kept: Vec<usize> = (0..self.idx.len()).filter(|&k| keep(k)).collect();
        self.gram = Mat::from_fn(kept.len(), kept.len(), |a, b| self.gram[(kept[a], kept[b])]);
        self.idx = kept.iter().map(|&k| self.idx[k]).collect();
        self.b = kept.iter().map(|&k| self.b[k]).collect();
        self.s = kept.iter().map(|&k| self.s[k]).collect();
        self.c = kept.iter().map(|&k| self.c[k]).collect();
    }

    /// Exact minimizer over the current columns. Returns `false` when the
    /// step budget runs out.
    fn solve(&mut self, t: f64, steps: &mut usize, opts: LassoOptions) -> bool {
        loop {
            let a = self.idx.len();
            if a == 0 {
                return true;
            }
            *steps += 1;
            if *steps >= opts.max_sweeps {
                return false;
            }
            let rhs: Vec<f64> = (0..a).map(|i| -self.c[i] - t * self.s[i]).collect();
            let target = match spd_solve_conditioned(&self.gram, &rhs, PIVOT_RATIO) {
                Some(v) if v.iter().all(|x| x.is_finite()) => v,
                _ if self.settle() => continue,
                _ => return self.descend(t, steps, opts),
            };
            // columns still at zero whose target has the wrong sign leave together
            let stuck: Vec<usize> = (0..a).filter(|&i| self.b[i] == 0.0 && target[i] * self.s[i] <= 0.0).collect();
            if !stuck.is_empty() {
                self.retain(|i| !stuck.contains(&i));
                continue;
            }
            // the safe step stops where the first coefficient hits zero
            let mut alpha = 1.0;
            let mut hit = None;
            for i in 0..a {
                if target[i] * self.s[i] <= 0.0 {
                    let frac = self.b[i] / (self.b[i] - target[i]);
                    if frac < alpha {
                        alpha = frac;
                        hit = Some(i);
                    }
                }
            }
            let Some(hit) = hit else {
                self.b = target;
                return true;
            };
            let mut safe: Vec<f64> = (0..a).map(|i| self.b[i] + alpha * (target[i] - self.b[i])).collect();
            safe[hit] = 0.0;
            // the full step with sign violations clipped often gets further
            let clipped: Vec<f64> = (0..a).map(|i| if target[i] * self.s[i] > 0.0 { target[i] } else { 0.0 }).collect();
            self.b = if self.objective(&clipped, t) < self.objective(&safe, t) {
                clipped
            } else {
                safe
            };
            let nonzero: Vec<bool> = self.b.iter().map(|&v| v != 0.0).collect();
            self.retain(|i| nonzero[i]);
        }
    }

    fn factors(&self, cols: &[usize]) -> bool {
        let g = Mat::from_fn(cols.len(), cols.len(), |a, b| self.gram[(cols[a], cols[b])]);
        spd_well_conditioned(&g, PIVOT_RATIO)
    }

    /// Handles a singular Gram matrix right after new columns joined at
    /// zero. Columns independent of the nonzero ones are admitted in order
    /// and the others dropped. When none is independent, the first one
    /// enters by pivoting along the null direction, which leaves the fit
    /// unchanged and lowers the L1 norm until an old coefficient reaches
    /// zero. Returns `false` when neither applies.
    fn settle(&mut self) -> bool {
        let active: Vec<usize> = (0..self.idx.len()).filter(|&i| self.b[i] != 0.0).collect();
        let fresh: Vec<usize> = (0..self.idx.len()).filter(|&i| self.b[i] == 0.0).collect();
        if fresh.is_empty() || !self.factors(&active) {
            return false;
        }
        let mut keep = active.clone();
        for &z in &fresh {
            keep.push(z);
            if !self.factors(&keep) {
                keep.pop();
            }
        }
        if keep.len() > active.len() {
            let keep_set: Vec<bool> = (0..self.idx.len()).map(|i| keep.contains(&i)).collect();
            self.retain(|i| keep_set[i]);
            return true;
        }
        if active.is_empty() {
            return false;
        }
        let z = fresh[0];
        let g_aa = Mat::from_fn(active.len(), active.len(), |a, b| self.gram[(active[a], active[b])]);
        let g_az: Vec<f64> = active.iter().map(|&i| self.gram[(i, z)]).collect();
        let Some(coef) = spd_solve(&g_aa, &g_az) else {
            return false;
        };
        let sigma = self.s[z];
        let rate = 1.0 - sigma * active.iter().zip(&coef).map(|(&i, c)| self.s[i] * c).sum::<f64>();
        if rate >= 0.0 {
            return false;
        }
        // b_active -= α σ coef, b_z = α σ; stop at the first zero crossing
        let mut alpha = f64::INFINITY;
        let mut hit = None;
        for (k, &i) in active.iter().enumerate() {
            let d = -sigma * coef[k];
            if self.b[i] * d < 0.0 {
                let a = -self.b[i] / d;
                if a < alpha {
                    alpha = a;
                    hit = Some(i);
                }
            }
        }
        let Some(hit) = hit else {
            return false;
        };
        for (k, &i) in active.iter().enumerate() {
            self.b[i] -= alpha * sigma * coef[k];
        }
        self.b[hit] = 0.0;
        self.b[z] = alpha * sigma;
        let keep_set: Vec<bool> = (0..self.idx.len()).map(|i| i == z || (i != hit && self.b[i] != 0.0)).collect();
        self.retain(|i| keep_set[i]);
        true
    }

    /// `N` times the restricted objective, less the constant `‖η̃‖²/N`.
    fn objective(&self, b: &[f64], t: f64) -> f64 {
        let gb = matvec(&self.gram, b);
        2.0 * dot(&self.c, b) + dot(b, &gb) + 2.0 * t * b.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// Coordinate descent on `G`, for singular or ill-conditioned Gram
    /// matrices. Runs until the restricted KKT conditions hold to `opts.tol`;
    /// zeroed columns leave the set afterwards.
    fn descend(&mut self, t: f64, steps: &mut usize, opts: LassoOptions) -> bool {
        let a = self.idx.len();
        let gradient = |ws: &WorkingSet| -> Vec<f64> { ws.c.iter().zip(matvec(&ws.gram, &ws.b)).map(|(x, y)| x + y).collect() };
        let mut grad = gradient(self);
        loop {
            *steps += 1;
            if *steps >= opts.max_sweeps {
                return false;
            }
            for i in 0..a {
                let gii = self.gram[(i, i)];
                if gii == 0.0 {
                    continue;
                }
                let new = soft_threshold(gii * self.b[i] - grad[i], t) / gii;
                let delta = new - self.b[i];
                if delta != 0.0 {
                    for (g, &gk) in grad.iter_mut().zip(self.gram.col_as_slice(i)) {
                        *g += gk * delta;
                    }
                    self.b[i] = new;
                }
            }
            // refresh to shed the drift of the running updates
            grad = gradient(self);
            let worst = (0..a)
                .map(|i| {
                    if self.b[i] == 0.0 {
                        (grad[i].abs() - t).max(0.0)
                    } else {
                        (grad[i] + t * self.b[i].signum()).abs()
                    }
                })
                .fold(0.0f64, f64::max);
            if worst <= opts.tol * t {
                break;
            }
        }
        for i in 0..a {
            self.s[i] = self.b[i].signum();
        }
        let nonzero: Vec<bool> = self.b.iter().map(|&v| v != 0.0).collect();
        self.retain(|i| nonzero[i]);
        true
    }
}

#[inline]
fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(PkbError::InvalidConfig(format!("penalty λ must be positive, got {lambda}")))
    }
}

/// Minimizer over `c` of the weighted quadratic for fixed `β`:
/// `c = −Σ w_i (η_i + (Kβ)_i) / Σ w_i`.
pub fn recover_intercept(eta: &[f64], w: &[f64], k: &Mat<f64>, beta: &[f64]) -> f64 {
    let kb = matvec(k, beta);
    intercept_from_fitted(eta, w, &kb)
}

pub(crate) fn intercept_from_fitted(eta: &[f64], w: &[f64], kb: &[f64]) -> f64 {
    let num: f64 = w.iter().zip(eta).zip(kb).map(|((wi, e), k)| wi * (e + k)).sum();
    -num / w.iter().sum::<f64>()
}

/// The base learner chosen for one pathway.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseLearnerFit {
    pub pathway_index: usize,
    pub beta: Vec<f64>,
    pub intercept: f64,
    pub regularized_loss: f64,
}

/// Working loss `(1/N) Σ w_i (η_i + f_i)² + Ω(β)` with `f = Kβ + c`.
pub fn regularized_loss(fit: &BaseLearnerFit, deriv: &DerivativeState, k: &Mat<f64>, lambda: f64, penalty: Penalty) -> f64 {
    let kb = matvec(k, &fit.beta);
    working_loss(deriv, &kb, fit.intercept) + penalty.value(&fit.beta, lambda)
}

pub(crate) fn working_loss(deriv: &DerivativeState, kb: &[f64], c: f64) -> f64 {
    let n = deriv.len() as f64;
    deriv
        .w
        .iter()
        .zip(&deriv.eta)
        .zip(kb)
        .map(|((w, e), k)| {
            let r = e + k + c;
            w * r * r
        })
        .sum::<f64>()
        / n
}

/// Largest step the line search will take.
pub const MAX_STEP: f64 = 100.0;

fn step_derivative(y: &[f64], f: &[f64], dir: &[f64], d: f64) -> f64 {
    let n = y.len() as f64;
    -y.iter()
        .zip(f)
        .zip(dir)
        .map(|((&yi, &fi), &gi)| yi * gi * sigmoid(-yi * (fi + d * gi)))
        .sum::<f64>()
        / n
}

fn step_curvature(y: &[f64], f: &[f64], dir: &[f64], d: f64) -> f64 {
    let n = y.len() as f64;
    y.iter()
        .zip(f)
        .zip(dir)
        .map(|((&yi, &fi), &gi)| {
            let z = yi * (fi + d * gi);
            gi * gi * sigmoid(z) * sigmoid(-z)
        })
        .sum::<f64>()
        / n
}

/// Step length minimizing `φ(d) = L(y, F + d·f)` over `(0, MAX_STEP]`.
///
/// `φ` is convex, so the minimizer is the root of `φ′`. A log-spaced scan
/// brackets the root and a safeguarded Newton iteration refines it until
/// `|φ′| ≤ 1e-8` or the bracket is narrower than `1e-10`. Returns
/// `MAX_STEP` when `φ` still decreases there, and `0` when `f` is not a
/// descent direction.
pub fn line_search(y: &[f64], f: &[f64], dir: &[f64]) -> Result<f64> {
    if dir.iter().all(|&g| g == 0.0) {
        return Err(PkbError::ZeroDirection);
    }
    const DERIV_TOL: f64 = 1e-8;
    const WIDTH_TOL: f64 = 1e-10;
    let dphi = |d: f64| step_derivative(y, f, dir, d);

    if dphi(0.0) >= 0.0 {
        return Ok(0.0);
    }
    if dphi(MAX_STEP) < 0.0 {
        return Ok(MAX_STEP);
    }
    let (mut lo, mut hi) = (0.0, MAX_STEP);
    let mut d = MAX_STEP;
    while d > 1e-12 {
        d /= 10.0;
        let g = dphi(d);
        if g.abs() <= DERIV_TOL {
            return Ok(d);
        }
        if g < 0.0 {
            lo = d;
            break;
        }
        hi = d;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let g = dphi(x);
        if g.abs() <= DERIV_TOL {
            return Ok(x);
        }
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= WIDTH_TOL {
            break;
        }
        let curv = step_curvature(y, f, dir, x);
        let newton = x - g / curv;
        x = if curv > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(if lo > 0.0 { 0.5 * (lo + hi) } else { hi })
}
