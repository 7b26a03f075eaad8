//! Fit on one simulated dataset for a fixed number of iterations and score
//! a second, independent one.

use pkb::{fit, generate, FitConfig, Penalty, SimModel, SimSpec};

fn main() -> pkb::Result<()> {
    let mut spec = SimSpec::new(SimModel::Model1, 20, 1);
    spec.n_samples = 300;
    let train = generate(&spec)?;
    spec.seed = 2;
    let test = generate(&spec)?;

    let config = FitConfig {
        penalty: Penalty::L1,
        nu: 0.1,
        max_iters: 60,
        ..FitConfig::default()
    };
    let model = fit(&train.data, &train.pathways, &train.labels, &config)?;
    let history = model.loss_history();
    println!(
        "lambda {:.3e}, {} iterations, training loss {:.4} -> {:.4}",
        model.lambda(),
        model.iterations(),
        history[0],
        history[history.len() - 1]
    );

    let pred = model.predict(&test.data)?;
    let wrong = pred.labels.iter().zip(test.labels.values()).filter(|(p, t)| p != t).count();
    println!("test error {:.3}", wrong as f64 / pred.labels.len() as f64);

    println!("top pathways:");
    for (name, w) in model.pathway_weights().iter().take(5) {
        println!("  {name:<12} {w:.4}");
    }
    Ok(())
}
