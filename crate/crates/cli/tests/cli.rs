use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_profilekit"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn make_writes_uniform_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["make", "--roots", "uniform_grid:-1:0", "--n", "100", "--out", "u.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(dir.path(), &["roots", "--input", "u.json"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let roots: Vec<f64> = text.lines().skip(1).map(|l| l.parse().unwrap()).collect();
    assert_eq!(text.lines().next(), Some("root"));
    assert_eq!(roots.len(), 100);
    for (j, r) in roots.iter().enumerate() {
        assert!((r - (-1.0 + j as f64 / 100.0)).abs() < 1e-8);
    }
}

#[test]
fn file_generator_skips_comments() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("r.csv"), "-1\n# skipped\n-2\n\n-3\n").unwrap();
    let o = run(dir.path(), &["make", "--roots", "file:r.csv", "--out", "p.json"]);
    assert_eq!(code(&o), 0);
    let o = run(dir.path(), &["roots", "--input", "p.json"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 4);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["make", "--roots", "stirling", "--n", "300"];
    let (a, b) = (run(dir.path(), &args), run(dir.path(), &args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let s1 = run(dir.path(), &["suite", "--only", "1", "--seed", "7"]);
    let s2 = run(dir.path(), &["suite", "--only", "1", "--seed", "7"]);
    assert_eq!(code(&s1), 0);
    let strip = |o: &Output| String::from_utf8_lossy(&o.stdout).split(" (").next().unwrap().to_string();
    assert_eq!(strip(&s1), strip(&s2));
}

#[test]
fn repeated_differentiation_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["diff", "--a", "0", "--b", "1", "--ell", "300", "--roots", "uniform_grid:0:1", "--n", "600", "--out", "d.json"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(dir.path(), &["compare", "--closed-form", "mu_kappa:0.5", "--input", "d.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("arg,empirical,closed_form,abs_error,sup_error,mean_error,n,runtime_s\n"));
    let summary: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(summary[0], "summary");
    assert!(summary[4].parse::<f64>().unwrap() <= 1e-2);
    assert_eq!(summary[6], "600");
}

#[test]
fn lambert_generator_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["make", "--t-poly", "400:200:1:1", "--out", "t.json"])), 0);
    let o = run(dir.path(), &["compare", "--closed-form", "nu_aa:1:0.5", "--input", "t.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // an impossible tolerance fails with exit code 1
    let o = run(dir.path(), &["compare", "--closed-form", "nu_aa:1:0.5", "--input", "t.json", "--tol", "1e-9"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn conv_checks_degree_law() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["make", "--roots", "dirac:-1:3", "--n", "4", "--out", "a.json"]);
    run(dir.path(), &["make", "--roots", "dirac:-2:2", "--n", "4", "--out", "b.json"]);
    let o = run(dir.path(), &["conv", "--op", "boxplus", "a.json", "b.json", "--out", "c.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(dir.path(), &["roots", "--input", "c.json"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 2);
    run(dir.path(), &["make", "--roots", "dirac:-1:1", "--n", "4", "--out", "e.json"]);
    let o = run(dir.path(), &["conv", "--op", "boxplus", "e.json", "b.json"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn transform_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["make", "--roots", "uniform_grid:0:1", "--n", "50", "--out", "p.json"]);
    let o = run(
        dir.path(),
        &["transform", "--kind", "S", "--input", "p.json", "--t-grid", "-0.6:-0.1:6", "--sidecar", "s.json"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("arg,value\n"));
    let side = std::fs::read_to_string(dir.path().join("s.json")).unwrap();
    assert!(side.contains("\"kind\":\"S\""));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&run(p, &["make", "--roots", "uniform_grid:-1:0", "--n", "5001"])), 2);
    assert_eq!(code(&run(p, &["make", "--roots", "gauss:0:1", "--n", "5"])), 2);
    assert_eq!(code(&run(p, &["make", "-n", "5"])), 2);
    assert_eq!(code(&run(p, &["transform", "--kind", "X", "--roots", "binomial", "--n", "3", "--t-grid", "1:2:2"])), 2);
    assert_eq!(code(&run(p, &["roots", "--input", "missing.json"])), 1);
    assert_eq!(code(&run(p, &["make", "--roots", "uniform_grid:-1:1", "--n", "4"])), 1);
    assert_eq!(code(&run(p, &["suite", "--only", "12"])), 2);
    assert_eq!(code(&run(p, &["--help"])), 0);
    assert_eq!(code(&run(p, &["-h"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_profilekit"))
        .args(["suite", "--only", "2"])
        .env("PROFILEKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_profilekit"))
        .args(["suite", "--only", "2"])
        .env("PROFILEKIT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}
