//! Generate a synthetic dataset and write it in the CSV/GMT input formats.
//!
//! cargo run --release --example simulate -- [model] [out_dir]

use pkb::{generate, SimModel, SimSpec};

fn main() -> pkb::Result<()> {
    let mut args = std::env::args().skip(1);
    let model: u8 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let out = args.next().unwrap_or_else(|| "sim_out".to_string());

    let spec = SimSpec::new(SimModel::from_id(model)?, 50, 7);
    let sim = generate(&spec)?;
    let (pos, neg) = sim.labels.class_counts();
    println!(
        "model {model}: {} samples x {} genes, {} pathways, {pos} positive / {neg} negative",
        sim.data.n_samples(),
        sim.data.n_genes(),
        sim.pathways.len()
    );
    let relevant: Vec<String> = sim.relevant.iter().map(|&m| sim.pathways.get(m).name.clone()).collect();
    println!("relevant pathways: {}", relevant.join(", "));

    sim.write(&out, &spec)?;
    println!("wrote {out}/expression.csv, pathways.gmt, labels.csv, ground_truth.json");
    Ok(())
}
