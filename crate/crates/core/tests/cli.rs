use std::path::Path;
use std::process::{Command, Output};

fn fogform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fogform")).args(args).env_remove("FOGFORM_CONFIG").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn solve_without_neighbors_splits_local_and_cloud() {
    let o = fogform(&["solve", "--set", "J=0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let cloud = out.lines().find(|l| l.starts_with("cloud")).unwrap();
    let alpha: f64 = cloud.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((alpha - 0.601).abs() < 1e-3, "{out}");
}

#[test]
fn zero_eta_reports_latency_as_cost() {
    let o = fogform(&["solve", "--set", "eta=0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let value = |label: &str| -> String {
        out.lines().find(|l| l.starts_with(label)).unwrap().split('=').nth(1).unwrap().trim().to_string()
    };
    assert_eq!(value("max delay"), value("total cost"));
}

#[test]
fn overload_fails_with_capacities() {
    let o = fogform(&["solve", "--set", "x_i=100"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("infeasible") && err.contains("caps"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let o = fogform(&["experiment", "fig7", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ratio-cdf"));

    let o = fogform(&["solve", "--set", "radio.bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("radio.bogus"));

    let o = fogform(&["experiment", "ratio-cdf", "--out", out, "--workers", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ratio_cdf_is_reproducible_across_workers() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, workers) in [(&a, "1"), (&b, "4")] {
        let o = fogform(&[
            "experiment",
            "ratio-cdf",
            "--set",
            "iterations=100",
            "--seed",
            "7",
            "--workers",
            workers,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let csv = read(&a.path().join("ratio-cdf.csv"));
    assert_eq!(csv.lines().count(), 101);
    assert_eq!(csv.lines().next(), Some("rank,ratio,cdf"));
    assert_eq!(csv, read(&b.path().join("ratio-cdf.csv")));
}

#[test]
fn offline_sweep_covers_both_link_rates() {
    let dir = tempfile::tempdir().unwrap();
    let o = fogform(&["experiment", "offline-sweep", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read(&dir.path().join("offline-sweep.csv")).lines().count(), 17);
}

#[test]
fn manifest_records_overrides_and_regenerates() {
    let first = tempfile::tempdir().unwrap();
    let o = fogform(&[
        "experiment",
        "online-vs-offline",
        "--set",
        "x_i=12",
        "--set",
        "iterations=50",
        "--out",
        first.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = first.path().join("online-vs-offline.manifest");
    let text = read(&manifest);
    assert!(text.contains("x_i = 12.0"), "{text}");
    assert!(text.contains("experiment = \"online-vs-offline\""));

    let second = tempfile::tempdir().unwrap();
    let o = fogform(&[
        "experiment",
        "online-vs-offline",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        second.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read(&first.path().join("online-vs-offline.csv")), read(&second.path().join("online-vs-offline.csv")));
}

#[test]
fn config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "J = 0\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fogform")).args(["solve"]).env("FOGFORM_CONFIG", &cfg).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("J = 0"));
}

#[test]
fn choose_j_reports_selection() {
    let dir = tempfile::tempdir().unwrap();
    let o = fogform(&["experiment", "choose-j", "--set", "link_mode=fixed", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("chosen J = 4"), "{}", stdout(&o));
}
