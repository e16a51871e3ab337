use std::path::PathBuf;
use std::process::{Command, Output};

use diacell::experiment::{parse_readings_csv, READINGS_HEADER};

fn diacell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diacell")).args(args).output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("diacell-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn negative_rate_is_a_config_error() {
    let out = diacell(&["static-sweep", "--rate-hz", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rate_hz"), "{}", stderr(&out));
}

#[test]
fn bad_file_value_names_its_key() {
    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "trials = 4\n").unwrap();
    let out = diacell(&["static-sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("trials"));

    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let out = diacell(&["table", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no_such_key"));
}

#[test]
fn flag_overrides_file_and_defaults_fill_the_rest() {
    let cfg = scratch("sweep.cfg");
    std::fs::write(&cfg, "# short sweep\nsweep_start = 120\nsweep_end = 200\ntrials = 1\n").unwrap();
    let out = diacell(&["static-sweep", "--config", cfg.to_str().unwrap(), "--sweep-end", "140"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let echo = stderr(&out);
    assert!(echo.contains("sweep_end = 140"));
    assert!(echo.contains("sweep_step = 10"));
    assert!(echo.contains("rate_hz = 2000"));
    let records = parse_readings_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let applied: Vec<f64> = records.iter().map(|r| r.applied_p1.unwrap()).collect();
    assert_eq!(applied, vec![120.0, 130.0, 140.0]);
}

#[test]
fn empty_sweep_is_a_config_error() {
    let out = diacell(&["static-sweep", "--sweep-start", "180", "--sweep-end", "120"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("sweep_end"));
}

#[test]
fn empty_step_list_succeeds_without_events() {
    let out = diacell(&["staircase", "--steps", "", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = stderr(&out);
    let tail: Vec<&str> = report.lines().skip_while(|l| !l.starts_with("mode,")).collect();
    assert_eq!(tail, vec!["mode,step_index,step_pa,level_pa,delta_f_hz,detected"]);
}

#[test]
fn dead_signal_is_a_runtime_error() {
    let out = diacell(&["static-sweep", "--a0", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let out = diacell(&["table", "--out", "/nonexistent-dir/table.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(diacell(&["table", "--bogus"]).status.code(), Some(2));
}

#[test]
fn static_sweep_writes_the_documented_csv() {
    let path = scratch("sweep.csv");
    let out = diacell(&["static-sweep", "--trials", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some(READINGS_HEADER));
    let records = parse_readings_csv(&text).unwrap();
    assert_eq!(records.len(), 11);
    for r in &records {
        assert!((r.p_avg.unwrap() - r.applied_p1.unwrap()).abs() <= 2.0);
    }
}

#[test]
fn staircase_report_file() {
    let report = scratch("report.csv");
    let out = diacell(&["staircase", "--trials", "1", "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("single,0,0.5,150.5,") && lines[1].ends_with(",false"));
    assert!(lines[4].starts_with("dual,0,0.5,150.5,") && lines[4].ends_with(",true"));
    let records = parse_readings_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(records.len(), 16);
}

#[test]
fn generate_and_compare_wire() {
    let out = diacell(&["table", "--generate"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let freqs: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(freqs.len(), 11);
    assert!(freqs.windows(2).all(|w| w[1] < w[0]));

    let out = diacell(&["table", "--compare-wire", "--q", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((ratio - 2f64.sqrt() * 0.5f64.sqrt()).abs() <= 1e-12);
    }
}

#[test]
fn help_lists_defaults() {
    let out = diacell(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("trials = 5"));
    assert!(text.contains("staircase"));
}
