//! Thin helpers over `faer` for the handful of dense operations the solvers need.

use faer::linalg::solvers::Solve;
use faer::{ColRef, Mat, Side};

/// Inner product with eight independent accumulators, so the loop vectorizes.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// `a * x`.
pub fn matvec(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    let y = a * ColRef::from_slice(x);
    y.iter().copied().collect()
}

/// `aᵀ * x`.
pub fn tmatvec(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    let y = a.transpose() * ColRef::from_slice(x);
    y.iter().copied().collect()
}

/// Solves `a x = b` for symmetric positive-definite `a` by Cholesky.
/// Returns `None` when the factorization fails.
pub fn spd_solve(a: &Mat<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let llt = a.llt(Side::Lower).ok()?;
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = llt.solve(&rhs);
    Some(x.col_as_slice(0).to_vec())
}

fn pivots_in_range(l: faer::MatRef<'_, f64>, min_ratio: f64) -> bool {
    let (lo, hi) = (0..l.nrows())
        .map(|i| l[(i, i)] * l[(i, i)])
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
    lo >= min_ratio * hi
}

/// Like [`spd_solve`], but also gives up when the squared Cholesky pivots
/// span more than `1 / min_ratio`, i.e. when `a` is numerically singular.
pub fn spd_solve_conditioned(a: &Mat<f64>, b: &[f64], min_ratio: f64) -> Option<Vec<f64>> {
    let llt = a.llt(Side::Lower).ok()?;
    if !pivots_in_range(llt.L(), min_ratio) {
        return None;
    }
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = llt.solve(&rhs);
    Some(x.col_as_slice(0).to_vec())
}

/// Whether [`spd_solve_conditioned`] would accept `a`.
pub fn spd_well_conditioned(a: &Mat<f64>, min_ratio: f64) -> bool {
    a.llt(Side::Lower).is_ok_and(|llt| pivots_in_range(llt.L(), min_ratio))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &Mat<f64>) -> f64 {
    a.self_adjoint_eigenvalues(Side::Lower)
        .expect("symmetric eigendecomposition")
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_solve() {
        let a = Mat::from_fn(2, 2, |i, j| [[4.0, 1.0], [1.0, 3.0]][i][j]);
        assert_eq!(matvec(&a, &[1.0, 2.0]), vec![6.0, 7.0]);
        assert_eq!(tmatvec(&a, &[1.0, 0.0]), vec![4.0, 1.0]);
        let x = spd_solve(&a, &[6.0, 7.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
        let indefinite = Mat::from_fn(2, 2, |i, j| [[1.0, 2.0], [2.0, 1.0]][i][j]);
        assert!(spd_solve(&indefinite, &[1.0, 1.0]).is_none());
        assert!((min_eigenvalue(&indefinite) + 1.0).abs() < 1e-12);
        assert_eq!(spd_solve_conditioned(&a, &[6.0, 7.0], 1e-10), Some(x));
        let singular = Mat::from_fn(2, 2, |i, j| [[1.0, 1.0], [1.0, 1.0 + 1e-14]][i][j]);
        assert!(spd_solve_conditioned(&singular, &[1.0, 1.0], 1e-10).is_none());
    }
}
