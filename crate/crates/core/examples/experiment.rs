//! A JSON-configured paired experiment written to a scratch directory.

use gp_bnb::harness::{compare, ExperimentConfig};

const CONFIG: &str = r#"{
    "domain": {"lower": [0.0, 0.0], "upper": [1.0, 1.0]},
    "max_depth": 5,
    "kernel": {"family": "squared_exponential", "lengthscales": [0.3, 0.3]},
    "objective": {"kind": "gp_draw"},
    "baselines": [{"kind": "plain_ucb"}, {"kind": "lipschitz", "lipschitz": 20.0}],
    "alpha": 0.1,
    "budget": 300,
    "replications": 4,
    "master_seed": 99,
    "output": "unused"
}"#;

fn main() -> gp_bnb::error::Result<()> {
    let mut cfg = ExperimentConfig::from_json(CONFIG)?;
    cfg.output = std::env::temp_dir().join("gp-bnb-example");
    let outcome = compare(&cfg)?;
    for a in &outcome.aggregates {
        println!(
            "{:<10} median final regret {:.3e}  median cumulative {:.3}  envelope violations {:?}",
            a.optimizer, a.median_final_regret, a.median_cumulative_regret, a.envelope_violation_rate
        );
    }
    println!("files in {}", cfg.output.display());

    // validation reports every bad field at once
    let bad = CONFIG.replace("\"alpha\": 0.1", "\"alpha\": 2.0").replace("\"budget\": 300", "\"budget\": 0");
    if let Err(e) = ExperimentConfig::from_json(&bad) {
        println!("\n{e}");
    }
    Ok(())
}
