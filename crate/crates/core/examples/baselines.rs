//! Branch and bound against plain lattice GP-UCB and Lipschitz elimination
//! on the same objective.

use gp_bnb::baselines::{lipschitz_eliminate, lipschitz_run, plain_ucb_run, UcbBaselineConfig, UcbMode};
use gp_bnb::bnb::{run, BnbConfig};
use gp_bnb::kernels::KernelSpec;
use gp_bnb::lattice::{BoxDomain, DyadicLattice};
use gp_bnb::metrics::{last_quartile_share, padded_cumulative};
use gp_bnb::sampler::{sample_gp_prior, synthetic_peak};

fn main() -> gp_bnb::error::Result<()> {
    let lat = DyadicLattice::new(BoxDomain::unit(1), 9)?;
    let kernel = KernelSpec::squared_exponential(vec![0.2])?;
    let budget = 400;
    let objective = sample_gp_prior(&kernel, &lat, 7)?;

    let bnb = run(&BnbConfig::new(lat.clone(), kernel.clone(), 0.1, budget)?, &objective)?;
    let ucb_cfg = UcbBaselineConfig::new(lat.clone(), kernel, 0.1, budget, UcbMode::UnsampledOnly)?;
    let ucb = plain_ucb_run(&ucb_cfg, &objective)?;
    for (name, tr) in [("branch and bound", &bnb), ("plain UCB", &ucb)] {
        let cum = padded_cumulative(tr, budget);
        println!(
            "{name:<17} samples {:>4}  cumulative regret {:>9.4}  last-quartile share {:>6.2}%",
            tr.len(),
            cum.last().unwrap(),
            100.0 * last_quartile_share(&cum)
        );
    }

    // cone elimination: every point whose Lipschitz upper bound falls below
    // the incumbent can be dropped
    let samples = vec![(vec![0.0], 0.0), (vec![0.5], 1.0), (vec![1.0], 0.0)];
    let candidates: Vec<Vec<f64>> = (0..=10).map(|i| vec![i as f64 / 10.0]).collect();
    let e = lipschitz_eliminate(&samples, 2.0, &candidates)?;
    let kept: Vec<f64> = e.kept.iter().map(|&i| candidates[i][0]).collect();
    println!("\ncone elimination with L = 2 keeps {kept:?}");

    let peak = synthetic_peak(&lat, &[0.61], 0.0, 2.0, 1.0, 0.2)?;
    let tr = lipschitz_run(&peak, 3.0, 100)?;
    println!("Lipschitz optimizer on a quadratic peak: best regret {:.2e} in {} samples", tr.best_regret().unwrap(), tr.len());
    Ok(())
}
