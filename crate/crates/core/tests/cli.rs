use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_nearfield-bd");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("NEARFIELD_BD_THREADS").output().unwrap()
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_owned()
}

fn body(out: &[u8]) -> String {
    let text = String::from_utf8(out.to_vec()).unwrap();
    text.lines().skip(1).collect::<Vec<_>>().join("\n")
}

#[test]
fn presets_listing_is_stable() {
    let a = run(&["presets"]);
    assert!(a.status.success());
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    for name in ["fig2", "fig6", "fig12a", "fig15", "table1"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    assert_eq!(a.stdout, run(&["presets"]).stdout);
}

#[test]
fn lobe_catalog_preset_has_integer_nulls() {
    let out = run(&["run", "--preset", "table1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# nearfield-bd v"));
    assert!(text.lines().next().unwrap().ends_with("experiment=lobe-catalog preset=table1"));
    assert_eq!(lines.next().unwrap(), "k,kind,l,z_over_dF,gain_db,side");
    let nulls: Vec<f64> = lines
        .filter(|l| l.split(',').nth(1) == Some("null") && l.ends_with(",near"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(nulls, vec![1.0, 2.0, 3.0]);
}

#[test]
fn custom_config_is_labelled_custom_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "a.json",
        r#"{"experiment": "bd-vs-eta", "params": {"etas": {"start": 0.5, "stop": 2, "points": 5}, "focus": "1dB"}}"#,
    );
    let a = run(&["run", "--config", &cfg]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let first = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(first.lines().next().unwrap().ends_with("experiment=bd-vs-eta preset=custom"));
    assert_eq!(first.lines().count(), 7);
    assert_eq!(body(&a.stdout), body(&run(&["run", "--config", &cfg]).stdout));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a3db.csv");
    let out = run(&["run", "--preset", "a3db", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "eta,a3db,a3db_times_1_plus_eta2");
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "mc.json",
        r#"{
            "experiment": "sum-rate-vs-snr",
            "geometry": {"n_per_side": 20, "sizing": {"mode": "element-diagonal", "value": "0.5lambda"}, "carrier_hz": 3e9},
            "seed": 1,
            "params": {"snr_db": {"values": [20]}, "users": 3, "n_trials": 20}
        }"#,
    );
    let base = run(&["run", "--config", &cfg]);
    assert!(base.status.success(), "{}", String::from_utf8_lossy(&base.stderr));
    let same = run(&["run", "--config", &cfg, "--seed", "1"]);
    let other = run(&["run", "--config", &cfg, "--seed", "7"]);
    assert_eq!(body(&base.stdout), body(&same.stdout));
    assert_ne!(body(&base.stdout), body(&other.stdout));
    assert!(body(&other.stdout).lines().last().unwrap().ends_with(",7"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "mc.json",
        r#"{
            "experiment": "sum-rate-vs-users",
            "geometry": {"n_per_side": 20, "sizing": {"mode": "element-diagonal", "value": "0.5lambda"}, "carrier_hz": 3e9},
            "params": {"users": {"values": [2, 3]}, "snr_db": 10, "n_trials": 30}
        }"#,
    );
    let one = Command::new(BIN)
        .args(["run", "--config", &cfg])
        .env("NEARFIELD_BD_THREADS", "1")
        .output()
        .unwrap();
    let two = run(&["run", "--config", &cfg, "--threads", "2"]);
    assert!(one.status.success() && two.status.success());
    assert_eq!(body(&one.stdout), body(&two.stdout));
    let zero = Command::new(BIN)
        .args(["run", "--config", &cfg])
        .env("NEARFIELD_BD_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(
        dir.path(),
        "empty.json",
        r#"{"experiment": "bd-vs-eta", "params": {"etas": {"values": []}, "focus": "1dB"}}"#,
    );
    let unitless = write_config(
        dir.path(),
        "unitless.json",
        r#"{"experiment": "bd-vs-eta", "params": {"etas": {"values": [1]}, "focus": "300"}}"#,
    );
    let unknown_field = write_config(dir.path(), "extra.json", r#"{"experiment": "a3db-curve", "bogus": 1}"#);
    for args in [
        vec!["run", "--config", empty.as_str()],
        vec!["run", "--config", unitless.as_str()],
        vec!["run", "--config", unknown_field.as_str()],
        vec!["run", "--preset", "fig99"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    }
}

#[test]
fn reactive_distances_exit_3_with_indices() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "near.json",
        r#"{
            "experiment": "gain-profile",
            "params": {"focus": "1dB", "kind": "exact", "distances": {"values": ["10dF", "2000dF"]}}
        }"#,
    );
    let out = run(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("sweep index 0"), "{err}");
    assert!(!err.contains("sweep index 1"));
}

#[test]
fn exactly_one_source_required() {
    assert!(!run(&["run"]).status.success());
    assert!(!run(&["run", "--preset", "a3db", "--config", "x.json"]).status.success());
}
