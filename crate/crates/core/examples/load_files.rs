//! Read expression, gene-set and label files. Pathways that lose all genes
//! after matching against the expression matrix are reported and dropped.

use std::fs;

use pkb::{load_expression_csv, load_gmt, load_labels};

fn main() -> pkb::Result<()> {
    let dir = std::env::temp_dir().join("pkb_load_files");
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("expr.csv"), "sample,TP53,BRCA1,EGFR,MYC\na,0.1,1.2,-0.3,2.0\nb,0.4,0.2,0.8,-1.1\nc,-0.6,0.9,0.0,0.5\n").unwrap();
    fs::write(dir.join("sets.gmt"), "repair\tdesc\tTP53\tBRCA1\ngrowth\tdesc\tEGFR\tMYC\tKRAS\nother\tdesc\tFOO\n").unwrap();
    fs::write(dir.join("labels.csv"), "sample,label\nc,0\na,1\nb,1\n").unwrap();

    let expr = load_expression_csv(dir.join("expr.csv"), true)?;
    println!("{} samples, genes {:?}", expr.n_samples(), expr.gene_ids());
    let gmt = load_gmt(dir.join("sets.gmt"), &expr)?;
    for p in gmt.pathways.iter() {
        println!("{}: {} genes", p.name, p.genes.len());
    }
    println!("omitted: {:?}", gmt.omitted);
    let labels = load_labels(dir.join("labels.csv"), &expr)?;
    println!("labels in sample order: {:?}", labels.values());
    Ok(())
}
