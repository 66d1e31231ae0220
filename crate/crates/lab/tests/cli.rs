use std::path::Path;
use std::process::Command;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stable-sde-lab"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> i32 {
    let status = lab().args(["run", "--config"]).arg(config).arg("--out").arg(out).args(extra).output().unwrap().status;
    status.code().unwrap()
}

#[test]
fn passing_run_exits_zero_and_writes_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg =
        write_config(tmp.path(), "c.toml", "experiment = \"ladder-monotone\"\nreplicates = 1\ncutoffs = [0.01]\n");
    let out = tmp.path().join("out");
    assert_eq!(run(&cfg, &out, &[]), 0);
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("name,value,threshold,pass\n"));
    assert!(summary.contains("ladder_violations,0.0000000000000000e0,0.0000000000000000e0,true"));
    let ladder = std::fs::read_to_string(out.join("ladder.csv")).unwrap();
    assert!(ladder.starts_with("eps,t,x\n"));
}

#[test]
fn config_errors_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    for (i, text) in [
        "experiment = \"weak-agree\"\nunknown_key = 1\n",
        "experiment = \"counterexample\"\nbeta = 1.0\n",
        "experiment = \"weak-agree\"\nalpha = 0.5\nbeta = 0.5\n",
        "this is not toml",
    ]
    .iter()
    .enumerate()
    {
        let cfg = write_config(tmp.path(), &format!("{i}.toml"), text);
        assert_eq!(run(&cfg, &out, &[]), 3, "{text}");
    }
    assert_eq!(run(&tmp.path().join("missing.toml"), &out, &[]), 3);
}

#[test]
fn statistical_failure_exits_one() {
    // an unreachable KS threshold turns a healthy run into a statistical failure
    let tmp = tempfile::tempdir().unwrap();
    let cfg =
        write_config(tmp.path(), "c.toml", "experiment = \"weak-agree\"\nreplicates = 200\nks_threshold = 0.999999\n");
    assert_eq!(run(&cfg, &tmp.path().join("out"), &[]), 1);
}

#[test]
fn seed_override_and_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", "experiment = \"weak-agree\"\nreplicates = 300\nseed = 1\n");
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert_eq!(run(&cfg, &a, &["--threads", "1"]), 0);
    assert_eq!(run(&cfg, &b, &["--threads", "4"]), 0);
    assert_eq!(run(&cfg, &c, &["--seed", "2"]), 0);
    let read = |d: &Path| std::fs::read(d.join("report.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn replicates_are_independent_of_the_replicate_count() {
    // replicate 0's artifacts do not move when more replicates run
    let tmp = tempfile::tempdir().unwrap();
    let small = write_config(tmp.path(), "s.toml", "experiment = \"strong-construct\"\nreplicates = 2\n");
    let large = write_config(tmp.path(), "l.toml", "experiment = \"strong-construct\"\nreplicates = 50\n");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(run(&small, &a, &[]), 0);
    assert_eq!(run(&large, &b, &[]), 0);
    for f in ["driver.csv", "solution.csv", "ladder.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}
