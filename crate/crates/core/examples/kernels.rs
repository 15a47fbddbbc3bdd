//! Kernel values and the derivative constants `L` and `Q`.

use gp_bnb::kernels::KernelSpec;

fn main() -> gp_bnb::error::Result<()> {
    let kernels = [
        ("squared exponential", KernelSpec::squared_exponential(vec![0.5])?),
        ("matern 5/2", KernelSpec::matern(2.5, vec![0.5])?),
        ("matern 7/2", KernelSpec::matern(3.5, vec![0.5])?),
    ];
    println!("{:<20} {:>10} {:>10} {:>10} {:>10}", "kernel", "k(0,0.5)", "k(0,1)", "L", "Q");
    for (name, k) in &kernels {
        let b = k.derivative_bounds()?;
        println!(
            "{name:<20} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            k.eval(&[0.0], &[0.5])?,
            k.eval(&[0.0], &[1.0])?,
            b.l,
            b.q
        );
    }

    // anisotropic lengthscales: the shortest axis sets both constants
    let k = KernelSpec::squared_exponential(vec![0.3, 1.0])?.with_signal_variance(2.0)?;
    let b = k.derivative_bounds()?;
    println!("\nanisotropic SE, lengthscales {:?}, variance 2: L = {:.4}, Q = {:.4}", k.lengthscales(), b.l, b.q);

    let pts = vec![vec![0.0, 0.0], vec![0.5, 0.0], vec![0.0, 0.5]];
    println!("gram matrix:\n{:.4}", k.gram_matrix(&pts)?);
    Ok(())
}
