//! Pathway kernels: one Gram matrix per gene set.

use pkb::kernels::kernel_value;
use pkb::{build_kernel_set, generate, KernelSpec, SimModel, SimSpec};

fn main() -> pkb::Result<()> {
    let u = [0.5, -1.0, 2.0];
    let v = [0.0, 1.0, 1.5];
    for spec in [KernelSpec::rbf(), KernelSpec::poly3(), KernelSpec::linear()] {
        println!("{:?}: k(u, v) = {:.6}", spec.kind, kernel_value(&u, &v, &spec, u.len())?);
    }

    let mut spec = SimSpec::new(SimModel::Model1, 4, 3);
    spec.n_samples = 6;
    let sim = generate(&spec)?;
    let kernels = build_kernel_set(&sim.data, &sim.pathways, &KernelSpec::rbf())?;
    println!("{} kernels of size {}", kernels.len(), kernels.n_samples());
    let k = kernels.matrix(0);
    println!("{}:", kernels.names()[0]);
    for i in 0..k.nrows() {
        let row: Vec<String> = (0..k.ncols()).map(|j| format!("{:.3}", k[(i, j)])).collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}
