//! Ground-truth objectives: GP prior draws and synthetic quadratic peaks.

use gp_bnb::kernels::KernelSpec;
use gp_bnb::lattice::{BoxDomain, DyadicLattice};
use gp_bnb::sampler::{estimate_peak_constants, sample_gp_prior, synthetic_peak, verify_peak_condition};

fn main() -> gp_bnb::error::Result<()> {
    let lat = DyadicLattice::new(BoxDomain::unit(1), 7)?;
    let kernel = KernelSpec::squared_exponential(vec![0.2])?;

    for seed in 0..3 {
        let draw = sample_gp_prior(&kernel, &lat, seed)?;
        println!(
            "draw {seed}: max {:.4} at {:?}, gap to runner-up {:.2e}",
            draw.max_value(),
            draw.argmax_point(),
            draw.top_two_gap()
        );
        match estimate_peak_constants(&draw, 0.05, 0.1) {
            Some((c1, c2)) => println!("        local quadratic envelope: c1 = {c1:.3}, c2 = {c2:.3}"),
            None => println!("        no quadratic envelope around the maximizer"),
        }
    }

    let peak = synthetic_peak(&lat, &[0.375], 1.0, 2.0, 1.0, 0.2)?;
    println!("\nsynthetic peak: max {} at {:?}", peak.max_value(), peak.argmax_point());
    println!("f(0.5) = {:.6}", peak.evaluate(&[0.5])?);
    println!("peak condition holds: {}", verify_peak_condition(&peak, &[0.375], 2.0, 1.0, 0.2));
    println!("off-lattice query rejected: {}", peak.evaluate(&[0.1234]).is_err());
    Ok(())
}
