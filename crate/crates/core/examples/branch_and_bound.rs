//! One branch-and-bound run on a GP draw, round by round.

use gp_bnb::bnb::{run, BnbConfig};
use gp_bnb::kernels::KernelSpec;
use gp_bnb::lattice::{BoxDomain, DyadicLattice};
use gp_bnb::sampler::sample_gp_prior;

fn main() -> gp_bnb::error::Result<()> {
    let lat = DyadicLattice::new(BoxDomain::unit(1), 9)?;
    let kernel = KernelSpec::squared_exponential(vec![0.2])?;
    let objective = sample_gp_prior(&kernel, &lat, 2024)?;
    let config = BnbConfig::new(lat, kernel, 0.1, 400)?;
    let trace = run(&config, &objective)?;

    println!("{:>4} {:>10} {:>6} {:>6} {:>10} {:>10} {:>9}", "iter", "delta", "N", "new", "radius", "sigma_max", "relevant");
    for it in &trace.iterations {
        println!(
            "{:>4} {:>10.3e} {:>6} {:>6} {:>10.4} {:>10.2e} {:>9}",
            it.iteration, it.delta, it.n_total, it.n_new, it.next_radius, it.sigma_max, it.relevant_count
        );
    }
    println!("\nstopped: {:?} after {} samples", trace.stop, trace.len());
    println!("maximizer {:?}, best sample regret {:.3e}", objective.argmax_point(), trace.best_regret().unwrap());
    println!("cumulative regret {:.4}", trace.total_cumulative_regret());
    Ok(())
}
