use std::fs;
use std::process::{Command, Output};

fn qg(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qg"));
    cmd.args(args).env_remove("QG_LOG");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn setup(forcing: &str, experiment: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("forcing.toml"), forcing).unwrap();
    let config = format!(
        "[model]\nnu = 1.0\nr = 1.0\nbeta = 0.1\nnx = 16\n\n[forcing]\nfile = \"forcing.toml\"\n\n[output]\ndir = \"out\"\n\n[experiment]\n{experiment}\n"
    );
    fs::write(dir.path().join("run.toml"), config).unwrap();
    dir
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn successful_run_exits_zero() {
    let dir = setup("mean = [[1, 1, 0.1]]\n", "");
    let out = qg(&["stationary", "--config", &path(&dir, "run.toml")], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/manifest.json").exists());
    assert!(dir.path().join("out/omega0.qgf").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("held: newton residual below tolerance"));
}

#[test]
fn out_flag_and_jobs_are_honoured() {
    let dir = setup("eta = 2.0\nmean = [[1, 1, 0.1]]\n[[terms]]\nmodes = [[2, 1, 0.2]]\nomega = 1.0\n", "epsilons = [0.5, 0.25]");
    let out = qg(&["aux-v", "--config", &path(&dir, "run.toml"), "--jobs", "2", "--out", &path(&dir, "elsewhere")], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("elsewhere/aux_v.csv").exists());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn invalid_config_exits_one_and_lists_every_issue() {
    let dir = setup("mean = [[1, 1, 0.1]]\n", "epsilons = [0.1, 0.2]\nbogus = 1");
    let out = qg(&["compare", "--config", &path(&dir, "run.toml")], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("experiment.epsilons: epsilons must be strictly decreasing"), "{err}");
    assert!(err.contains("experiment.bogus: unknown key"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn missing_config_and_bad_jobs_exit_one() {
    assert_eq!(qg(&["simulate", "--config", "/nonexistent/run.toml"], &[]).status.code(), Some(1));
    let dir = setup("mean = [[1, 1, 0.1]]\n", "");
    assert_eq!(qg(&["simulate", "--config", &path(&dir, "run.toml"), "--jobs", "0"], &[]).status.code(), Some(1));
}

#[test]
fn contract_violation_exits_two() {
    let dir = setup("mean = [[1, 1, 0.1]]\n", "epsilons = [0.5, 0.25]");
    let out = qg(&["aux-v", "--config", &path(&dir, "run.toml")], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("VIOLATED"));
    assert!(dir.path().join("out/manifest.json").exists());
}

#[test]
fn log_level_comes_from_the_environment() {
    let dir = setup("mean = [[1, 1, 0.1]]\n", "");
    let quiet = qg(&["stationary", "--config", &path(&dir, "run.toml")], &[]);
    assert!(quiet.stderr.is_empty(), "{}", String::from_utf8_lossy(&quiet.stderr));
    let chatty = qg(&["stationary", "--config", &path(&dir, "run.toml")], &[("QG_LOG", "info")]);
    assert!(String::from_utf8_lossy(&chatty.stderr).contains("stationary state"));
}

#[test]
fn help_lists_every_subcommand() {
    let out = qg(&["--help"], &[]);
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["simulate", "compare", "aux-v", "stationary", "spectrum", "decay", "bounded", "frequencies", "attractor"] {
        assert!(text.contains(sub), "{sub}");
    }
}
