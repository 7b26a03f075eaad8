//! Nested cross-validation on simulated data, written as CSV reports.
//!
//! cargo run --release --example evaluate -- [out_dir]

use pkb::{evaluate, generate, FitConfig, Penalty, SimModel, SimSpec};

fn main() -> pkb::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "eval_out".to_string());
    let mut spec = SimSpec::new(SimModel::Model2, 20, 9);
    spec.n_samples = 300;
    let sim = generate(&spec)?;

    let config = FitConfig {
        penalty: Penalty::L1,
        nu: 0.1,
        max_iters: 60,
        ..FitConfig::default()
    };
    let ev = evaluate(&sim.data, &sim.pathways, &sim.labels, &config, 3)?;
    for f in &ev.folds {
        println!("fold {}: T* = {:>3}, test error {:.3}", f.fold + 1, f.t_star, f.test_error);
    }
    println!("mean test error {:.3}", ev.mean_error);
    let truth: Vec<&str> = sim.relevant.iter().map(|&m| sim.pathways.get(m).name.as_str()).collect();
    println!("relevant: {}", truth.join(", "));
    for (name, w) in ev.sorted_mean_weights().iter().take(5) {
        println!("  {name:<12} {w:.4}");
    }
    ev.write(&out)?;
    println!("reports in {out}/");
    Ok(())
}
