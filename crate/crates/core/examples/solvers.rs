//! The two base-learner subproblems on a random instance: ridge (L2) and
//! lasso (L1) on the weighted-centered design.

use faer::Mat;
use pkb::solvers::{
    compute_derivatives, lambda_max, recover_intercept, solve_l1, solve_l2, weighted_centering,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> pkb::Result<()> {
    let n = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let k = &a * a.transpose();
    let y: Vec<f64> = (0..n).map(|i| if i % 3 == 0 { -1.0 } else { 1.0 }).collect();
    let f = vec![0.2; n];

    let deriv = compute_derivatives(&y, &f);
    let (et, kt) = weighted_centering(&deriv.eta, &deriv.w, &k);
    let lmax = lambda_max(&kt, &et);
    println!("lambda_max = {lmax:.6}");

    for frac in [1.0, 0.5, 0.1, 0.01] {
        let lambda = frac * lmax;
        let beta = solve_l1(&kt, &et, lambda)?;
        let nnz = beta.iter().filter(|b| **b != 0.0).count();
        let c = recover_intercept(&deriv.eta, &deriv.w, &k, &beta);
        println!("L1 lambda = {lambda:.3e}: {nnz} nonzero, intercept {c:+.4}");
    }

    let beta = solve_l2(&kt, &et, 0.1)?;
    let norm = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
    println!("L2 lambda = 0.1: |beta| = {norm:.4}");
    Ok(())
}
