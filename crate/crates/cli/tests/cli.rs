use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn dotspin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dotspin")).args(args).env_remove("DOTSPIN_THREADS").output().unwrap()
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(path: &Path) -> Output {
    dotspin(&["run", path.to_str().unwrap()])
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const ORACLE: &str = r#"
scenario = "oracle-compare"
[couplings]
k_a = 1.0
k_b = 0.6
j = 2.0
[bath]
n = 6
[state]
name = "singlet-triplet-mix"
r = 0.3
[time]
t_max = 4.0
samples = 9
"#;

#[test]
fn list_scenarios_names_every_scenario() {
    let out = dotspin(&["list-scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["separate", "common-symmetric", "common-asymmetric", "optimize", "oracle-compare", "fig1", "fig6"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn validation_failures_exit_one_with_field_messages() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "bad.toml", "scenario = \"common-asymmetric\"\n[couplings]\nk_a = 1.0\nk_b = 0.5\n");
    let out = dotspin(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("couplings.j: missing"), "{}", stderr(&out));

    let path = write_config(&dir, "sep.toml", &ORACLE.replace("oracle-compare", "separate"));
    let out = run(&path);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("couplings.j"));

    let path = write_config(&dir, "big.toml", &ORACLE.replace("n = 6", "n = 13"));
    assert_eq!(run(&path).status.code(), Some(1));

    let path = write_config(&dir, "typo.toml", &ORACLE.replace("[time]", "[time]\nt_maks = 1.0"));
    assert_eq!(run(&path).status.code(), Some(1));

    assert_eq!(run(&dir.path().join("absent.toml")).status.code(), Some(1));
}

#[test]
fn oracle_compare_passes_and_fails_by_tolerance() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "ok.toml", ORACLE);
    let out = run(&path);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("ok.csv")).unwrap();
    assert!(csv.contains("# oracle_dimension = 256"));

    let tight = format!("{ORACLE}[oracle]\ntolerance = 1e-30\n");
    let path = write_config(&dir, "tight.toml", &tight);
    let out = run(&path);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("exceeds tolerance"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    for (name, body) in [("fig5.toml", "scenario = \"fig5\"\n"), ("oracle.toml", ORACLE)] {
        let path = write_config(&dir, name, body);
        let csv = path.with_extension("csv");
        assert!(run(&path).status.success());
        let first = fs::read(&csv).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_dotspin"))
            .args(["run", path.to_str().unwrap()])
            .env("DOTSPIN_THREADS", "1")
            .output()
            .unwrap();
        assert!(out.status.success());
        assert_eq!(first, fs::read(&csv).unwrap(), "{name}");
    }
}

#[test]
fn figure_scenarios_write_expected_columns() {
    let dir = TempDir::new().unwrap();
    let expected = [
        ("fig1", "t,purity_c0.0,purity_c0.6,purity_c0.8,purity_c1.0,concurrence_c1.0"),
        ("fig3", "t,D,D_A"),
        ("fig4", "t,pi_xx,pi_zz,concurrence,D"),
        ("fig6", "delta,separable,singlet,triplet,optimal,gamma_opt"),
    ];
    for (fig, header) in expected {
        let out_path = dir.path().join(format!("{fig}-out.csv"));
        let body = format!("scenario = \"{fig}\"\noutput = {:?}\n", out_path.to_str().unwrap());
        let path = write_config(&dir, &format!("{fig}.toml"), &body);
        let out = run(&path);
        assert!(out.status.success(), "{fig}: {}", stderr(&out));
        let text = fs::read_to_string(&out_path).unwrap();
        let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
        assert_eq!(lines.next(), Some(header), "{fig}");
        assert!(text.starts_with("# "));
    }
}

#[test]
fn bad_thread_override_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_dotspin"))
        .arg("list-scenarios")
        .env("DOTSPIN_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
