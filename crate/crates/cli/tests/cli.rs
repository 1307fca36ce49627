use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chiralsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chiralsep")).args(args).output().expect("binary runs")
}

fn preset_json(name: &str) -> Value {
    let out = chiralsep(&["presets", "show", name]);
    assert!(out.status.success());
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_config(dir: &Path, config: &Value) -> String {
    let path = dir.join("scenario.json");
    fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn run_preset(name: &str, dir: &Path) -> Value {
    let out = chiralsep(&["run", "--preset", name, "--out-dir", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn populations(summary: &Value) -> ([f64; 3], [f64; 3]) {
    let fp = &summary["final_populations"];
    (serde_json::from_value(fp["left"].clone()).unwrap(), serde_json::from_value(fp["right"].clone()).unwrap())
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_owned()).collect()
}

#[test]
fn presets_list_names_all_three() {
    let out = chiralsep(&["presets", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig3-perfect", "fig3-duration-error", "fig3-all-errors"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn unknown_preset_is_config_error() {
    assert_eq!(chiralsep(&["presets", "show", "nope"]).status.code(), Some(1));
    assert_eq!(chiralsep(&["run", "--preset", "nope"]).status.code(), Some(1));
}

#[test]
fn perfect_preset_separates_completely() {
    let dir = tempfile::tempdir().unwrap();
    let (l, r) = populations(&run_preset("fig3-perfect", dir.path()));
    for (got, want) in l.iter().chain(&r).zip([0.5, 0.5, 0.0, 0.0, 0.0, 1.0]) {
        assert!((got - want).abs() <= 1e-3, "{l:?} {r:?}");
    }
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("t,p1_L,p2_L,p3_L,p1_R,p2_R,p3_R"));
}

#[test]
fn duration_error_preset() {
    let dir = tempfile::tempdir().unwrap();
    let (_, r) = populations(&run_preset("fig3-duration-error", dir.path()));
    assert!((r[2] - 0.976).abs() <= 5e-3, "{r:?}");
    assert!((r[0] - 0.012).abs() <= 5e-3 && (r[1] - 0.012).abs() <= 5e-3, "{r:?}");
}

#[test]
fn all_errors_preset() {
    let dir = tempfile::tempdir().unwrap();
    let (l, r) = populations(&run_preset("fig3-all-errors", dir.path()));
    assert!((l[0] + l[1] - 0.988).abs() <= 5e-3, "{l:?}");
    assert!((r[2] - 0.964).abs() <= 5e-3, "{r:?}");
}

#[test]
fn invalid_field_exits_1_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = preset_json("fig3-perfect");
    config["pulses"][1]["width"] = Value::from(-1.0);
    let path = write_config(dir.path(), &config);
    let out = chiralsep(&["run", &path, "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pulses[1].width"));
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn unknown_field_and_bad_usage_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = preset_json("fig3-perfect");
    config["bogus"] = Value::from(1);
    let path = write_config(dir.path(), &config);
    assert_eq!(chiralsep(&["run", &path]).status.code(), Some(1));
    assert_eq!(chiralsep(&["run", "--engine", "magic", "--preset", "fig3-perfect"]).status.code(), Some(1));
}

#[test]
fn norm_drift_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = preset_json("fig3-perfect");
    config["method"] = Value::from("fourth-order-fixed-step");
    config["window"]["dt"] = Value::from(0.5);
    config["window"]["record_stride"] = Value::from(1);
    let path = write_config(dir.path(), &config);
    let out = chiralsep(&["run", &path, "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn dumped_config_round_trips_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let dump = chiralsep(&["run", "--preset", "fig3-all-errors", "--dump-effective-config"]);
    assert!(dump.status.success());
    let dumped = dir.path().join("effective.json");
    fs::write(&dumped, &dump.stdout).unwrap();

    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(chiralsep(&["run", "--preset", "fig3-all-errors", "--out-dir", a.to_str().unwrap()]).status.success());
    assert!(chiralsep(&["run", dumped.to_str().unwrap(), "--out-dir", b.to_str().unwrap()]).status.success());
    for f in ["trace.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn engine_flag_overrides_config() {
    let dump = chiralsep(&["run", "--preset", "fig3-perfect", "--engine", "perturbative", "--dump-effective-config"]);
    let config: Value = serde_json::from_slice(&dump.stdout).unwrap();
    assert_eq!(config["engine"], "perturbative");

    let dir = tempfile::tempdir().unwrap();
    let summary = {
        let out = chiralsep(&[
            "run", "--preset", "fig3-perfect", "--engine", "exact-algebraic", "--out-dir", dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
        serde_json::from_str::<Value>(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap()
    };
    assert_eq!(summary["engine"], "exact-algebraic");
    let (l, r) = populations(&summary);
    for (got, want) in l.iter().chain(&r).zip([0.5, 0.5, 0.0, 0.0, 0.0, 1.0]) {
        assert!((got - want).abs() < 1e-12, "{l:?} {r:?}");
    }
}

fn sweep_csv(engine: &str, delta: &[f64], delta_prime: &[f64], delta_phi: &[f64]) -> String {
    let dir = tempfile::tempdir().unwrap();
    let mut config = preset_json("fig3-perfect");
    config["engine"] = Value::from(engine);
    config["sweep"] = serde_json::json!({ "delta": delta, "delta_prime": delta_prime, "delta_phi": delta_phi });
    let path = write_config(dir.path(), &config);
    let out = chiralsep(&["sweep", &path, "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("sweep_summary.json").exists());
    fs::read_to_string(dir.path().join("sweep.csv")).unwrap()
}

#[test]
fn sweep_single_point_has_unit_excess() {
    let csv = sweep_csv("exact-algebraic", &[0.0], &[0.0], &[0.0]);
    assert_eq!(
        csv.lines().next(),
        Some("delta,delta_prime,delta_phi,p1_L,p2_L,p3_L,p1_R,p2_R,p3_R,ee_retained,ee_ionized")
    );
    let ee: f64 = column(&csv, "ee_retained")[0].parse().unwrap();
    assert_eq!(ee, 1.0);
}

#[test]
fn sweep_step2_area_axis() {
    let csv = sweep_csv("exact-algebraic", &[0.0], &[0.0, 0.05, 0.1571], &[0.0]);
    let p3r: Vec<f64> = column(&csv, "p3_R").iter().map(|s| s.parse().unwrap()).collect();
    for (got, want) in p3r.iter().zip([1.0, 0.9975, 0.9755]) {
        assert!((got - want).abs() < 1e-4, "{got} vs {want}");
    }
}

#[test]
fn sweep_perturbative_tracks_exact() {
    let grid = [-0.1, 0.0, 0.1];
    let pert = sweep_csv("perturbative", &grid, &grid, &grid);
    let exact = sweep_csv("exact-algebraic", &grid, &grid, &grid);
    for (lp, le) in pert.lines().zip(exact.lines()).skip(1) {
        let p: Vec<f64> = lp.split(',').take(9).map(|s| s.parse().unwrap()).collect();
        let e: Vec<f64> = le.split(',').take(9).map(|s| s.parse().unwrap()).collect();
        assert_eq!(p[..3], e[..3]);
        let eps = p[..3].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let diff = p[3..].iter().zip(&e[3..]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff <= 10.0 * eps.powi(3) + 1e-14, "{lp}");
    }
}
