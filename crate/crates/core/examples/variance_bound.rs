//! Measured posterior deviation on uniform covers versus `Q δ² / 4`.

use gp_bnb::harness::verify_variance_bound;
use gp_bnb::kernels::KernelSpec;
use gp_bnb::lattice::BoxDomain;

fn main() -> gp_bnb::error::Result<()> {
    let cases = [
        ("SE, l = 0.5, d = 1", KernelSpec::squared_exponential(vec![0.5])?, 1),
        ("Matern 5/2, l = 0.5, d = 1", KernelSpec::matern(2.5, vec![0.5])?, 1),
        ("SE, l = 0.7, d = 2", KernelSpec::squared_exponential(vec![0.7, 0.7])?, 2),
    ];
    for (name, kernel, d) in cases {
        let rep = verify_variance_bound(&kernel, &BoxDomain::unit(d), &[0.2, 0.1, 0.05])?;
        println!("{name}  (Q = {:.4})", rep.q);
        for r in &rep.rows {
            println!(
                "  delta {:<5} samples {:>4}  sup sigma {:.3e}  bound {:.3e}  {}",
                r.delta,
                r.samples,
                r.measured,
                r.bound,
                if r.within { "ok" } else { "exceeded" }
            );
        }
        let ratios: Vec<String> = rep.decay_ratios.iter().map(|r| format!("{r:.2}")).collect();
        println!("  decay ratios per halving: {}\n", ratios.join(", "));
    }
    Ok(())
}
