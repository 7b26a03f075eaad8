//! Choose the number of boosting iterations by inner cross-validation.

use pkb::{generate, select_t_by_cv, FitConfig, Penalty, SimModel, SimSpec};

fn main() -> pkb::Result<()> {
    let mut spec = SimSpec::new(SimModel::Model3, 20, 5);
    spec.n_samples = 300;
    let sim = generate(&spec)?;
    let config = FitConfig {
        penalty: Penalty::L2,
        nu: 0.1,
        max_iters: 150,
        ..FitConfig::default()
    };
    let cv = select_t_by_cv(&sim.data, &sim.pathways, &sim.labels, &config)?;
    println!("lambda {:.3e}, T* = {}", cv.lambda, cv.t_star);
    for (t, loss) in cv.mean_curve.iter().enumerate().step_by(10) {
        println!("  t = {t:>3}  held-out loss {loss:.4}");
    }
    Ok(())
}
