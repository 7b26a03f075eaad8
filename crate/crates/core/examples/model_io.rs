use pkb::{fit, generate, FitConfig, PkbModel, SimModel, SimSpec};

fn main() -> pkb::Result<()> {
    let mut spec = SimSpec::new(SimModel::Model2, 10, 4);
    spec.n_samples = 120;
    let sim = generate(&spec)?;
    let config = FitConfig {
        max_iters: 20,
        nu: 0.1,
        ..FitConfig::default()
    };
    let model = fit(&sim.data, &sim.pathways, &sim.labels, &config)?;

    let dir = std::env::temp_dir().join("pkb_model_io");
    let path = dir.join("model.json");
    std::fs::create_dir_all(&dir).unwrap();
    model.save(&path)?;
    let loaded = PkbModel::load(&path)?;
    println!("saved {} components to {}", loaded.components().len(), path.display());

    let a = model.predict(&sim.data)?;
    let b = loaded.predict(&sim.data)?;
    assert_eq!(a.scores, b.scores);
    println!("reloaded model reproduces all {} scores exactly", a.scores.len());
    Ok(())
}
