//! Noise-free GP posterior: prediction, incremental updates, the residual
//! view of the predictive deviation, and projection onto sampled sections.

use gp_bnb::gp::GpPosterior;
use gp_bnb::kernels::KernelSpec;

fn main() -> gp_bnb::error::Result<()> {
    let kernel = KernelSpec::squared_exponential(vec![0.2])?;
    let jitter = GpPosterior::default_jitter(&kernel);
    let f = |x: f64| (6.0 * x).sin() + 0.5 * x;

    let xs: Vec<Vec<f64>> = [0.0, 0.3, 0.7].iter().map(|&x| vec![x]).collect();
    let ys: Vec<f64> = xs.iter().map(|x| f(x[0])).collect();
    let gp = GpPosterior::fit(kernel.clone(), xs, ys, jitter)?;

    // two more samples, folded in without refactorizing
    let more: Vec<Vec<f64>> = vec![vec![0.5], vec![1.0]];
    let more_y: Vec<f64> = more.iter().map(|x| f(x[0])).collect();
    let gp = gp.update(more, more_y)?;

    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "x", "f(x)", "mean", "std", "residual");
    for i in 0..=10 {
        let x = [i as f64 / 10.0];
        let (m, s) = gp.predict(&x)?;
        println!("{:>6.2} {:>10.5} {:>10.5} {:>10.2e} {:>10.2e}", x[0], f(x[0]), m, s, gp.residual_norm(&x)?);
    }

    // minimum-norm interpolant of another function through the same points
    let h: Vec<f64> = gp.points().iter().map(|p| p[0] * p[0]).collect();
    let interp = gp.project(&h)?;
    println!("\nprojected x^2 at 0.4: {:.5} (true 0.16)", interp.eval(&[0.4])?);
    println!("squared RKHS norm of the projection: {:.5}", interp.rkhs_norm_squared());
    Ok(())
}
