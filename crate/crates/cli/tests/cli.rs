use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quatfol_cli::{exit, run, Format, RunConfig};

fn quatfol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatfol")).args(args).output().unwrap()
}

fn repo_file(rel: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", rel].iter().collect();
    p.to_string_lossy().into_owned()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Machine output is byte-identical across processes and matches the
/// checked-in golden file. Set `QUATFOL_BLESS=1` to regenerate it.
#[test]
fn machine_report_is_deterministic_and_golden() {
    let args = [
        "--scenario",
        "q-times-circle",
        "--samples",
        "2",
        "--format",
        "machine",
        "--seed",
        "3",
    ];
    let first = quatfol(&args);
    let second = quatfol(&args);
    assert_eq!(first.status.code(), Some(exit::OK));
    assert_eq!(first.stdout, second.stdout);
    let path = golden("q-times-circle.machine");
    if std::env::var_os("QUATFOL_BLESS").is_some() {
        std::fs::write(&path, &first.stdout).unwrap();
    }
    let expected = std::fs::read(&path).unwrap();
    assert_eq!(
        String::from_utf8_lossy(&first.stdout),
        String::from_utf8_lossy(&expected)
    );
}

#[test]
fn machine_format_shape() {
    let out = run(&RunConfig {
        samples: Some(2),
        format: Format::Machine,
        ..RunConfig::new("qr-linear")
    });
    assert_eq!(out.exit_code, exit::OK);
    for line in out.output.lines() {
        assert_eq!(line.split('\t').count(), 4, "{line:?}");
    }
    assert!(out.output.lines().any(|l| l.starts_with("geodesy.total\ttrue\t")));
    assert!(out
        .output
        .lines()
        .any(|l| l.starts_with("property:ruled-equivalence\tholds\t")));
}

#[test]
fn linear_product_exits_zero() {
    let out = quatfol(&["--scenario", "qr-linear"]);
    assert_eq!(out.status.code(), Some(exit::OK));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("totally geodesic foliation: EQUIVALENT (4/4 true)"),
        "{text}"
    );
}

#[test]
fn non_cr_and_corrupted_scenarios_exit_two() {
    assert_eq!(
        quatfol(&["--scenario", "tilted-plane"]).status.code(),
        Some(exit::FAILED)
    );
    let wrong = repo_file("scenarios/wrong-ranks.scn");
    assert_eq!(quatfol(&["--scenario", &wrong]).status.code(), Some(exit::FAILED));
}

#[test]
fn vanishing_tolerance_is_inconclusive() {
    let out = run(&RunConfig {
        tol: Some(1e-300),
        ..RunConfig::new("twisted-product")
    });
    assert_eq!(out.exit_code, exit::INCONCLUSIVE, "{}", out.output);
}

#[test]
fn configuration_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scn");
    std::fs::write(&bad, "chart.builtin = plane\ngrid.margin = 7\n").unwrap();
    for args in [
        vec!["--scenario", "no-such-scenario"],
        vec!["--scenario", bad.to_str().unwrap()],
        vec!["--scenario", "plane", "--tol", "-1"],
        vec!["--scenario", "plane", "--samples", "0"],
        vec!["--scenario", "plane", "--format", "xml"],
        vec![],
    ] {
        let out = quatfol(&args);
        assert_eq!(out.status.code(), Some(exit::CONFIG), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn scenario_files_and_listing() {
    let out = quatfol(&["--scenario", &repo_file("scenarios/paraboloid.scn")]);
    assert_eq!(out.status.code(), Some(exit::OK));
    let list = String::from_utf8(quatfol(&["--list-scenarios"]).stdout).unwrap();
    for name in ["qr-linear", "q-times-circle", "twisted-product", "tilted-plane"] {
        assert!(list.contains(name));
    }
}
