//! How often the confidence envelope fails on GP draws, and how often the
//! maximizer is shrunk out of the search region.

use gp_bnb::harness::{envelope_coverage, CoverageConfig};
use gp_bnb::kernels::KernelSpec;
use gp_bnb::lattice::{BoxDomain, DyadicLattice};
use gp_bnb::sampler::derive_seeds;

fn main() -> gp_bnb::error::Result<()> {
    let lattice = DyadicLattice::new(BoxDomain::unit(1), 7)?;
    let kernel = KernelSpec::squared_exponential(vec![0.2])?;
    for alpha in [0.1, 0.5, 0.999] {
        let rep = envelope_coverage(&CoverageConfig {
            kernel: kernel.clone(),
            lattice: lattice.clone(),
            alpha,
            budget: 1000,
            seeds: derive_seeds(5, 100),
        })?;
        println!(
            "alpha {alpha:<6} violations {:>3}/{}  (limit {:.3})  maximizer exits {:>3}  worst ratio {:.3}",
            rep.violations, rep.replications, rep.rate_limit, rep.exits, rep.worst_ratio
        );
    }
    Ok(())
}
