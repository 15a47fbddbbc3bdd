//! Fitting `r_t ≈ A exp(−τ t / (ln t)^{d/4})` to planted and measured traces.

use gp_bnb::bnb::{run, BnbConfig};
use gp_bnb::kernels::KernelSpec;
use gp_bnb::lattice::{BoxDomain, DyadicLattice};
use gp_bnb::metrics::{fit_rate_series, median_positive_envelope, scaled_time, RateFit};
use gp_bnb::sampler::synthetic_peak;

fn show(label: &str, fit: &RateFit) {
    match fit {
        RateFit::Fitted(e) => println!(
            "{label}: A = {:.4e}, tau = {:.6}, R^2 = {:.4}, {} points",
            e.a_hat, e.tau_hat, e.r_squared, e.n_points
        ),
        RateFit::Undefined { zeros, .. } => println!("{label}: undefined ({zeros} zero regrets)"),
    }
}

fn main() -> gp_bnb::error::Result<()> {
    let ts: Vec<usize> = (10..=500).collect();
    let planted: Vec<f64> = ts.iter().map(|&t| (-0.5 * scaled_time(t as f64, 1)).exp()).collect();
    show("planted tau = 0.5", &fit_rate_series(&ts, &planted, 1)?);

    let lat = DyadicLattice::new(BoxDomain::unit(1), 10)?;
    let config = BnbConfig::new(lat.clone(), KernelSpec::squared_exponential(vec![0.25])?, 0.1, 400)?;
    let mut traces = Vec::new();
    for k in 0..20 {
        let peak = 0.2 + 0.6 * (k as f64 + 0.5) / 20.0;
        traces.push(run(&config, &synthetic_peak(&lat, &[peak], 0.0, 2.0, 1.0, 0.2)?)?);
    }
    let envelope = median_positive_envelope(&traces, 400);
    let all: Vec<usize> = (1..=400).collect();
    show("median envelope over 20 peaks", &fit_rate_series(&all, &envelope, 1)?);
    Ok(())
}
