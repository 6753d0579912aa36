use std::path::Path;
use std::process::{Command, Output};

use ess_toolkit::io::read_distribution;
use ess_toolkit::parse_json_report;

fn toolkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ess-toolkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = toolkit(&[
        "run", "--dist", "uniform:n=100", "--eps", "0.2", "--beta", "0.2", "--mode", "bicriteria",
        "--trials", "3", "--seed", "7", "--out", path_str(&out), "--format", "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = parse_json_report(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report.trials.len(), 3);
    assert_eq!(report.config.master_seed, 7);
    assert!(report.trials.iter().all(|t| t.samp_queries == 335_000));
    assert!(String::from_utf8_lossy(&o.stdout).contains("successes="));
}

#[test]
fn run_writes_a_csv_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let o = toolkit(&[
        "run", "--dist", "point_mass", "--eps", "0.9", "--beta", "0.2", "--mode", "unicriterion",
        "--trials", "2", "--seed", "1", "--out", path_str(&out), "--format", "csv",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("trial,seed,estimate,"));
}

#[test]
fn gen_then_exact_on_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("u.csv");
    let o = toolkit(&["gen", "--spec", "uniform:n=1000", "--out", path_str(&file)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_distribution(&file).unwrap().len(), 1000);

    let o = toolkit(&["exact", "--dist", path_str(&file), "--eps", "0.1"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("ess=900"));
}

#[test]
fn gen_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("z.json");
    let o = toolkit(&["gen", "--spec", "zipf:n=50,s=1.5,pad=5", "--out", path_str(&file)]);
    assert!(o.status.success());
    let dist = read_distribution(&file).unwrap();
    assert_eq!(dist.len(), 55);
    assert_eq!(dist.support_size(), 50);
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = toolkit(&[
        "run", "--dist", "uniform:n=10", "--eps", "1.5", "--beta", "0.1", "--mode", "bicriteria",
        "--trials", "1", "--seed", "0", "--out", path_str(&out), "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "label,prob\n1,0.5\n2,0.4\n").unwrap();
    let o = toolkit(&["exact", "--dist", path_str(&bad), "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = toolkit(&["exact", "--dist", "nonsense", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("r.json");
    let o = toolkit(&["gen", "--spec", "uniform:n=10", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(1));
}
