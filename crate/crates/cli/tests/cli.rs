use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphereform"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn radius_of_rp2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["radius", "--group", "antipodal", "--dim", "2", "--delta", "0.02"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let csv = std::fs::read_to_string(dir.path().join("radius.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "radius");
    let (lo, hi): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
    assert!(lo <= std::f64::consts::FRAC_PI_2 && std::f64::consts::FRAC_PI_2 <= hi);
    assert_eq!(row[3], "true");
    assert_eq!(row[6], "");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], true);
    assert!(summary["wall_time_ms"].is_u64());
}

#[test]
fn octonionic_fibration_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["fibration-check", "--fibration", "octonionic", "--samples", "32"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).contains("PASS octonionic.curvature_four"));
}

#[test]
fn lens_space_has_a_cyclic_vector() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["cyclic", "--group", "z5", "--rep", "r1+r2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("cyclic vector found; radius < π/2"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["radius"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["radius", "--group", "nope"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["radius", "--no-such-flag"], dir.path()).status.code(), Some(1));
    assert_eq!(
        run(&["cyclic", "--group", "z5", "--samples", "2"], dir.path())
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn failed_checks_exit_two() {
    // the suite includes the doubled Q8 criterion, which has no cyclic vector
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["suite"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{o:?}");
    assert!(stdout(&o).contains("FAIL c3.q8_doubled.cyclic_vector"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], false);
}

#[test]
fn config_files_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(&cfg, r#"{"command": "index", "seed": 4}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--seed", "5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let csv = std::fs::read_to_string(dir.path().join("index.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",5,")));
    let single = run(&["index", "--curvature", "4", "--length", "1.0"], dir.path());
    assert_eq!(single.status.code(), Some(0));
}

#[test]
fn equivalence_and_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["equivalence", "--group", "z5", "--rep", "r1", "--other", "r4"],
        dir.path(),
    );
    assert!(stdout(&o).starts_with("equivalent"));
    let o = run(
        &["equivalence", "--group", "z5", "--rep", "r1", "--other", "r2"],
        dir.path(),
    );
    assert!(stdout(&o).starts_with("not equivalent"));
    let o = run(&["decompose", "--group", "q8", "--rep", "2d"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("multiplicity 2"));
}

#[test]
fn thread_cap_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sphereform"))
        .args(["index", "--out"])
        .arg(dir.path())
        .env("SPHEREFORM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_sphereform"))
        .args(["index", "--out"])
        .arg(dir.path())
        .env("SPHEREFORM_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
