use std::path::Path;
use std::process::Command;

fn gp_bnb() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gp-bnb"))
}

fn config(out: &Path, extra: &str) -> String {
    format!(
        r#"{{
            "domain": {{"lower": [0.0], "upper": [1.0]}},
            "max_depth": 6,
            "kernel": {{"family": "squared_exponential", "lengthscales": [0.2]}},
            "objective": {{"kind": "gp_draw"}},
            "alpha": 0.1,
            "budget": 40,
            "replications": 2,
            "master_seed": 3,
            "output": {:?}{extra}
        }}"#,
        out
    )
}

fn code(cmd: &mut Command) -> i32 {
    cmd.output().unwrap().status.code().unwrap()
}

#[test]
fn run_and_compare_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, config(&dir.path().join("out"), "")).unwrap();
    assert_eq!(code(gp_bnb().arg("run").arg(&path)), 0);
    assert!(dir.path().join("out/metadata.json").exists());
    assert!(dir.path().join("out/traces/bnb_0000.csv").exists());

    let cmp = dir.path().join("cmp");
    assert_eq!(code(gp_bnb().arg("compare").arg(&path).arg("--out").arg(&cmp)), 0);
    assert!(cmp.join("comparison.csv").exists());
    assert!(cmp.join("traces/plain_ucb_0001.csv").exists());
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, config(&dir.path().join("out"), r#", "colour": "red""#)).unwrap();
    let out = gp_bnb().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    assert_eq!(code(gp_bnb().arg("run").arg(dir.path().join("missing.json"))), 1);
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(code(gp_bnb().arg("run").arg(&path)), 1);
    assert_eq!(code(gp_bnb().arg("no-such-command")), 1);
    assert_eq!(code(gp_bnb().args(["coverage", "--alpha", "1.5"])), 1);
}

#[test]
fn runtime_failure_exits_two() {
    // the output path is a regular file, so writing artifacts fails
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, config(&blocker.join("out"), "")).unwrap();
    assert_eq!(code(gp_bnb().arg("run").arg(&path)), 2);
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(gp_bnb().arg("--help")), 0);
}

#[test]
fn verify_variance_bound_prints_a_table() {
    let out = gp_bnb().args(["verify-variance-bound", "--deltas", "0.2,0.1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Q = "));
    assert_eq!(text.matches("within").count(), 2, "{text}");
}

#[test]
fn coverage_reports_a_rate() {
    let out = gp_bnb()
        .args(["coverage", "--replications", "5", "--depth", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("violations"));
}

#[test]
fn fit_rate_reads_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let mut text = String::from("t,iter,x,f_x,regret,cum_regret,delta,beta,region_radius,n_new\n");
    let mut cum = 0.0;
    for t in 1..=200usize {
        let r = 2.0 * (-0.05 * t as f64 / (t as f64).ln().powf(0.25).max(1.0)).exp();
        cum += r;
        text.push_str(&format!("{t},1,0.5,{},{r},{cum},0.1,1,1,1\n", -r));
    }
    std::fs::write(&path, text).unwrap();
    let out = gp_bnb().arg("fit-rate").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("tau_hat"));

    std::fs::write(&path, "a,b\n1,2\n").unwrap();
    assert_eq!(code(gp_bnb().arg("fit-rate").arg(&path)), 1);
}
