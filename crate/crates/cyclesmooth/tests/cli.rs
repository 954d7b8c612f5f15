use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cyclesmooth::cycle_file::{parse_cycle, read_cycle};
use cyclesmooth::export::{parse_front_csv, parse_front_json, parse_trajectory_csv};
use cyclesmooth_core::SmoothingMode;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cyclesmooth"));
    cmd.env_remove("RUST_LOG");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn repo(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn dir_arg(d: &Path) -> String {
    d.to_string_lossy().into_owned()
}

fn read(p: PathBuf) -> String {
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn summary_value(summary: &str, key: &str) -> f64 {
    summary
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .and_then(|v| v.split_whitespace().next())
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no {key} in {summary}"))
}

#[test]
fn simulate_writes_trajectory_and_summary() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&[
        "simulate",
        "--cycle",
        &repo("data/cycles/hwfet.csv"),
        "--config",
        &repo("configs/medium_duty_truck.toml"),
        "--out",
        &dir_arg(out.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = parse_trajectory_csv(&read(out.path().join("hwfet_trajectory.csv"))).unwrap();
    assert_eq!(rows.len(), 7650);
    assert_eq!(rows.last().unwrap().time_s, 765.0);
    let summary = read(out.path().join("hwfet_summary.txt"));
    for key in ["fuel_g", "fuel_g_per_100km", "distance_m", "trip_time_s", "rms_tracking_error_m_s"] {
        summary_value(&summary, key);
    }
    assert_eq!(summary_value(&summary, "trip_time_s"), 765.0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().next(), Some("cycle: hwfet"));
}

#[test]
fn missing_cycle_file_is_an_input_error() {
    let out = tempfile::tempdir().unwrap();
    let missing = out.path().join("nowhere.csv");
    let o = run(&["simulate", "--cycle", &dir_arg(&missing), "--out", &dir_arg(out.path())]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nowhere.csv"));
}

#[test]
fn override_changes_tracking() {
    let out = tempfile::tempdir().unwrap();
    let rms = |extra: &[&str]| {
        let mut args = vec!["simulate", "--cycle", "bundled:la92"];
        let dir = dir_arg(out.path());
        args.extend(["--out", dir.as_str()]);
        args.extend(extra);
        let o = run(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        summary_value(&read(out.path().join("la92_summary.txt")), "rms_tracking_error_m_s")
    };
    let base = rms(&[]);
    let stiff = rms(&["--set", "driver.kp=2000"]);
    assert!(stiff < base, "kp=2000 rms {stiff} vs default {base}");
}

#[test]
fn bad_override_and_config_errors() {
    let out = tempfile::tempdir().unwrap();
    let dir = dir_arg(out.path());
    let o = run(&["simulate", "--cycle", "bundled:hwfet", "--out", &dir, "--set", "driver.nope=1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["simulate", "--cycle", "bundled:hwfet", "--out", &dir, "--set", "vehicle.mass_kg=-1"]);
    assert_eq!(o.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("vehicle.mass_kg") && stderr.contains("line "), "{stderr}");

    let cfg = out.path().join("bad.toml");
    std::fs::write(&cfg, "[vehicle]\nmass_kg = \n").unwrap();
    let o = run(&["simulate", "--cycle", "bundled:hwfet", "--out", &dir, "--config", &dir_arg(&cfg)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.toml"));
}

#[test]
fn malformed_cycle_reports_line() {
    let out = tempfile::tempdir().unwrap();
    let cycle = out.path().join("broken.csv");
    std::fs::write(&cycle, "time_s,speed_mps\n0,0\n1,x\n").unwrap();
    let o = run(&["simulate", "--cycle", &dir_arg(&cycle), "--out", &dir_arg(out.path())]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn divergence_exits_4() {
    let out = tempfile::tempdir().unwrap();
    let cycle = out.path().join("fast.csv");
    std::fs::write(&cycle, "time_s,speed_mps\n0,0\n1,160\n2,160\n3,160\n4,160\n5,160\n").unwrap();
    // a featherweight truck with no drag or rolling loss runs away
    let o = run(&[
        "simulate",
        "--cycle",
        &dir_arg(&cycle),
        "--out",
        &dir_arg(out.path()),
        "--set",
        "vehicle.mass_kg=5",
        "--set",
        "vehicle.drag_coeff=0.000001",
        "--set",
        "vehicle.rolling_coeff=0.000001",
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverged"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["fly"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--cycle", "bundled:la92", "--m", "9..2"]).status.code(), Some(2));
    assert_eq!(run(&["smooth", "--cycle", "bundled:la92", "--m", "2", "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--cycle", "bundled:nyc"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_writes_62_rows_and_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(a.path(), "0"), (b.path(), "1")] {
        let o = run(&[
            "sweep",
            "--cycle",
            &repo("data/cycles/la92.csv"),
            "--m",
            "0..30",
            "--modes",
            "everywhere,preserve-stops",
            "--threads",
            threads,
            "--gnuplot",
            "--out",
            &dir_arg(dir),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let stdout = String::from_utf8_lossy(&o.stdout);
        assert!(stdout.contains("max_savings:") && stdout.contains("max_spacing:"));
    }
    let rows = parse_front_csv(&read(a.path().join("la92_front.csv"))).unwrap();
    assert_eq!(rows.len(), 62);
    assert_eq!(rows.iter().filter(|r| r.mode == SmoothingMode::PreserveStops).count(), 31);
    let front = parse_front_json(&read(a.path().join("la92_front.json"))).unwrap();
    assert_eq!(front.points().count(), 62);
    assert!(a.path().join("la92_front.gp").exists());
    for name in ["la92_front.csv", "la92_front.json", "la92_front.gp"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn sweep_m0_is_a_zero_row() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["sweep", "--cycle", "bundled:hwfet", "--m", "0", "--modes", "everywhere", "--out", &dir_arg(out.path())]);
    assert!(o.status.success());
    let rows = parse_front_csv(&read(out.path().join("hwfet_front.csv"))).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].m, rows[0].fuel_savings_pct, rows[0].spacing_m), (0, 0.0, 0.0));
}

#[test]
fn smooth_round_trips_and_feeds_simulate() {
    let out = tempfile::tempdir().unwrap();
    let dir = dir_arg(out.path());
    let la92 = repo("data/cycles/la92.csv");
    let o = run(&["smooth", "--cycle", &la92, "--m", "5", "--mode", "preserve-stops", "--out", &dir]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let smoothed_path = out.path().join("la92_m5_preserve-stops.csv");
    let smoothed = read_cycle(&smoothed_path).unwrap();
    let original = read_cycle(Path::new(&la92)).unwrap();
    assert_eq!(smoothed.len(), original.len());
    for (o, s) in original.speeds().iter().zip(smoothed.speeds()) {
        assert!(*o != 0.0 || *s == 0.0);
    }
    let o = run(&["simulate", "--cycle", &dir_arg(&smoothed_path), "--out", &dir]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(&["smooth", "--cycle", &la92, "--m", "0", "--out", &dir]);
    assert!(o.status.success());
    let identity = parse_cycle(&read(out.path().join("la92_m0_everywhere.csv")), "la92").unwrap();
    assert_eq!(identity.speeds(), original.speeds());
    assert_eq!(identity.dt_s(), original.dt_s());
}

#[test]
fn dt_flag_sets_simulation_step() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--cycle", "bundled:hwfet", "--dt", "0.5", "--out", &dir_arg(out.path())]);
    assert!(o.status.success());
    let rows = parse_trajectory_csv(&read(out.path().join("hwfet_trajectory.csv"))).unwrap();
    assert_eq!(rows.len(), 1530);
    let o = run(&["simulate", "--cycle", "bundled:hwfet", "--dt", "0.3", "--out", &dir_arg(out.path())]);
    assert_eq!(o.status.code(), Some(3));
}
