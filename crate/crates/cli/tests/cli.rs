use std::path::Path;
use std::process::{Command, Output};

fn linresp(config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linresp"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SPECTRUM: &str = "kind = \"spectrum\"\nresolution = 32\n[params]\nu0 = [0.4]\n";

#[test]
fn passing_run_writes_csv_svg_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "spec.toml", SPECTRUM);
    let out = dir.path().join("out");
    let o = linresp(&cfg, &out, &["--plot"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for f in [
        "spec.eigendata.csv",
        "spec.decay.csv",
        "spec.decay.svg",
        "spec.report.json",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("spec.report.json")).unwrap())
            .unwrap();
    let names: Vec<&str> = report["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["positivity", "decay"]);
    assert_eq!(report["passed"], true);
}

#[test]
fn failed_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "kind = \"spectrum\"\nassertions = [\"lambda\"]\n[params]\nexpected-lambda = 2.0\n",
    );
    let o = linresp(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL lambda"));
}

#[test]
fn config_errors_exit_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "typo.toml",
        "kind = \"spectrum\"\nresoluton = 64\n",
    );
    let o = linresp(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("typo.toml:2:1"), "{err}");

    let cfg = write(dir.path(), "ok.toml", SPECTRUM);
    let o = linresp(&cfg, &dir.path().join("out"), &["--resolution", "7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // T' = 2 + 3cos(2πx) changes sign
    let cfg = write(
        dir.path(),
        "fold.toml",
        "kind = \"spectrum\"\n[map]\nfamily = \"kink\"\nexponent = 1.0\namplitude = 3.0\n[params]\nu0 = [1.0]\n",
    );
    let o = linresp(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(String::from_utf8_lossy(&o.stderr).contains("experiment spectrum"));
}

#[test]
fn missing_config_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = linresp(
        &dir.path().join("absent.toml"),
        &dir.path().join("out"),
        &[],
    );
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn seed_controls_random_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "spec.toml", SPECTRUM);
    let read = |sub: &str| std::fs::read(dir.path().join(sub).join("spec.decay.csv")).unwrap();
    linresp(&cfg, &dir.path().join("a"), &[]);
    linresp(&cfg, &dir.path().join("b"), &[]);
    linresp(&cfg, &dir.path().join("c"), &["--seed", "7"]);
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
}
