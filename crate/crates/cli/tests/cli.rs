use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lab"));
    cmd.args(args).env_remove("LAB_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL: &str = r#"
output_dir = "out"

[[experiment]]
name = "krein"
kind = "krein-check"
boundary = { robin = 2.0 }
lambda = [-5.0]
radius = 5
grid = 400

[[experiment]]
name = "pair"
kind = "weyl-robin-pair"
boundary = { robin = 0.0 }
b2 = 1.0
radius = 200

[[experiment]]
name = "diagram"
kind = "diagram-check"
geometry = { kind = "half-cylinder", n = 2 }
radius = 10
samples = 5
grid = 20000
seed = 3
"#;

#[test]
fn list_shows_ten_experiments() {
    let out = lab(&["list"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains('\u{2192}')).count(), 10);
    assert!(text.contains("krein-check \u{2192} Krein resolvent formula"));
    assert!(text.contains("weyl-robin-pair \u{2192} "));
}

#[test]
fn runs_and_reproduces_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let first = lab(&["run", &cfg], &[]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let out = dir.path().join("out");
    let snapshot: Vec<Vec<u8>> = ["krein.csv", "krein.meta", "pair.csv", "diagram.csv"]
        .iter()
        .map(|f| std::fs::read(out.join(f)).unwrap())
        .collect();
    let second = lab(&["run", &cfg], &[("LAB_THREADS", "1")]);
    assert_eq!(second.status.code(), Some(0));
    for (f, bytes) in ["krein.csv", "krein.meta", "pair.csv", "diagram.csv"].iter().zip(&snapshot) {
        assert_eq!(&std::fs::read(out.join(f)).unwrap(), bytes, "{f} differs between runs");
    }
    let meta = String::from_utf8(snapshot[1].clone()).unwrap();
    assert!(meta.contains("grid = 400"));
    assert!(meta.contains("tolerance = "), "defaults must be echoed");
    let csv = String::from_utf8(snapshot[2].clone()).unwrap();
    assert!(csv.starts_with("j,xi_1,s_j,s_j_times_j^3\n"));
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        "output_dir = 'out'\n",
        "[[experiment]]\nname = 'x'\nkind = 'dirichlet-weyl'\nt = [10.0]\nbogus = 1\n",
        "[[experiment]]\nname = 'x'\nkind = 'no-such-experiment'\n",
        "[[experiment]]\nname = 'x'\nkind = 'krein-check'\nboundary = { robin = 1.0 }\n",
    ] {
        let cfg = write_config(dir.path(), body);
        let out = lab(&["run", &cfg], &[]);
        assert_eq!(out.status.code(), Some(2), "config {body:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = lab(&["run", dir.path().join("missing.toml").to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let cfg = write_config(dir.path(), SMALL);
    assert_eq!(lab(&["run", &cfg], &[("LAB_THREADS", "zero")]).status.code(), Some(2));
}

#[test]
fn unknown_key_is_reported_with_its_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[[experiment]]\nname = 'x'\nkind = 'dirichlet-weyl'\nt = [10.0]\nbogus = 1\n");
    let err = String::from_utf8(lab(&["run", &cfg], &[]).stderr).unwrap();
    assert!(err.contains("bogus"), "{err}");
    assert!(err.contains("line 5"), "{err}");
}

#[test]
fn failed_checks_and_domain_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let strict = "output_dir = 'out'\n[[experiment]]\nname = 'k'\nkind = 'krein-check'\nboundary = { robin = 2.0 }\nlambda = [-5.0]\nradius = 2\ngrid = 200\ntolerance = 1e-30\n";
    let out = lab(&["run", &write_config(dir.path(), strict)], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(dir.path().join("out/k.csv").exists());

    let cut = "output_dir = 'out'\n[[experiment]]\nname = 'm'\nkind = 'mfunction-scan'\ngeometry = { kind = 'half-cylinder', n = 2 }\nboundary = { robin = 1.0 }\nlambda = [5.0]\nradius = 3\n";
    let out = lab(&["run", &write_config(dir.path(), cut)], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("mode"));
}
