use std::path::PathBuf;
use std::process::Command;

fn mlb() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mlb"))
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mlb-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn verify_scope_runs_only_matching_suites() {
    let out = mlb().args(["verify", "--scope", "zero_chain"]).env("MLB_WORKERS", "2").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("suite zero_chain.jump passed"));
    assert!(text.contains("suite zero_chain.geo passed"));
    assert!(!text.contains("reference."));
}

#[test]
fn unknown_scope_fails() {
    let out = mlb().args(["verify", "--scope", "no_such_suite"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn run_is_byte_identical_across_reruns_and_worker_counts() {
    let dir = scratch_dir("run");
    let config = dir.join("sweep.toml");
    std::fs::write(
        &config,
        r#"
version = 1
case = "sc"
algorithms = ["svrg", "point_prox"]
seeds = 3
max_passes = 200

[grid]
n = [4]
l = [16.0]
mu_x = [1.0]
eps = [1e-2, 1e-3, 5.0]
"#,
    )
    .unwrap();
    let mut csvs = Vec::new();
    for (k, workers) in ["1", "3"].iter().enumerate() {
        let out_dir = dir.join(format!("out{k}"));
        let out = mlb()
            .args(["--workers", workers, "run", "--config"])
            .arg(&config)
            .arg("--output-dir")
            .arg(&out_dir)
            .args(["--seed", "11"])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).contains("skipping"));
        csvs.push(std::fs::read(out_dir.join("runs.csv")).unwrap());
        let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["skipped"].as_array().unwrap().len(), 1);
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.remove(0)).unwrap();
    assert!(text.starts_with("case,n,L,mu_x,mu_y,R_x,R_y,eps,algorithm,seed,queries_to_eps,final_gap,budget_N,gap_at_budget\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 3);
}

#[test]
fn curve_flags_invalid_points() {
    let out = mlb().args(["curve", "--case", "cc_avg", "--n", "4,16", "--l", "2", "--eps", "1e-3,10"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().filter(|r| r.contains(",false,")).count(), 2);
}

#[test]
fn geo_writes_a_table() {
    let dir = scratch_dir("geo");
    let out = mlb().args(["geo", "--m", "2,4", "--p", "0", "--trials", "1000", "--output-dir"]).arg(&dir).output().unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("geo.csv")).unwrap();
    assert!(text.starts_with("m,p,threshold,exact_tail,mc_estimate,mc_lower_99,pass"));
    assert_eq!(text.lines().count(), 3);
}
