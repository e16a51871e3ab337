use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};

use diacell::experiment::{self, RunConfig, KEYS};
use diacell::{Error, Result};

const FLAG_KEYS: &[&str] = &["clamp", "generate", "compare_wire"];

fn key_help(key: &str) -> &'static str {
    match key {
        "seed" => "Base seed for all noise streams",
        "mode" => "Cell mode: single | dual",
        "noise" => "Opto-coupler noise standard deviation (V)",
        "trials" => "Trials per reading; the median is reported (odd)",
        "out" => "Output CSV path (stdout when omitted)",
        "table" => "Calibration table CSV (built-in table when omitted)",
        "clamp" => "Saturate table lookups at the end knots",
        "rate_hz" => "Sampling rate (Hz)",
        "on_s" => "Excitation slot length (s)",
        "off_s" => "Sensing slot length (s)",
        "adc_bits" => "ADC resolution (bits)",
        "v_lo" => "ADC lower input rail (V)",
        "v_hi" => "ADC upper input rail (V)",
        "a0" => "Opto-coupler amplitude at release (V)",
        "tau" => "Ring-down decay constant (s)",
        "phase" => "Initial phase (rad)",
        "threshold_hz" => "Summed frequency change counted as a step (Hz)",
        "edge_band_hz" => "Estimates this far outside the table saturate instead of failing (Hz)",
        "sweep_start" => "First sweep pressure (Pa)",
        "sweep_end" => "Last sweep pressure (Pa)",
        "sweep_step" => "Sweep increment (Pa)",
        "baseline" => "Staircase baseline pressure (Pa)",
        "steps" => "Comma-separated staircase step sizes (Pa)",
        "cycles_per_step" => "Cycles held at each staircase level",
        "q" => "Wire alignment factor for --compare-wire",
        "tx_lo" => "Pressure mapped to 4 mA on the average channel (Pa)",
        "tx_hi" => "Pressure mapped to 20 mA on the average channel (Pa)",
        "diff_lo" => "Differential pressure mapped to 4 mA (Pa)",
        "diff_hi" => "Differential pressure mapped to 20 mA (Pa)",
        "dac_bits" => "Transmitter DAC resolution (bits)",
        "generate" => "table: emit a table generated from the mechanics model",
        "compare_wire" => "table: compare single and dual vibrating-wire frequencies",
        "report" => "staircase: write the detection report CSV here",
        _ => "",
    }
}

fn option_args() -> Vec<Arg> {
    let mut args = vec![Arg::new("config")
        .long("config")
        .value_name("PATH")
        .help("key = value configuration file; flags override its values")];
    for &key in KEYS {
        let arg = Arg::new(key).long(key.replace('_', "-")).help(key_help(key));
        args.push(if FLAG_KEYS.contains(&key) {
            arg.action(ArgAction::SetTrue)
        } else {
            arg.value_name("VALUE").allow_negative_numbers(true)
        });
    }
    args
}

fn cli() -> Command {
    let defaults = RunConfig::default().to_string();
    Command::new("diacell")
        .about("Dual-diaphragm vibrating-cantilever pressure cell simulator")
        .after_help(format!("Defaults:\n{defaults}"))
        .subcommand_required(true)
        .subcommand(
            Command::new("table")
                .about("Emit the calibration table")
                .args(option_args()),
        )
        .subcommand(
            Command::new("static-sweep")
                .about("Apply each sweep pressure to both tracks and record the cell output")
                .args(option_args()),
        )
        .subcommand(
            Command::new("staircase")
                .about("Apply a step staircase in single and dual mode and report detections")
                .args(option_args()),
        )
}

fn resolve(matches: &ArgMatches) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = matches.get_one::<String>("config") {
        cfg.apply_file(Path::new(path))?;
    }
    for &key in KEYS {
        if FLAG_KEYS.contains(&key) {
            if matches.get_flag(key) {
                cfg.set(key, "true")?;
            }
        } else if let Some(value) = matches.get_one::<String>(key) {
            cfg.set(key, value)?;
        }
    }
    eprint!("{cfg}");
    cfg.validate()?;
    Ok(cfg)
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        }),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io {
            path: "<stdout>".into(),
            source: e,
        }),
    }
}

fn readings_text(records: &[experiment::ReadingRecord]) -> Result<String> {
    let mut buf = Vec::new();
    experiment::write_readings_csv(records, &mut buf).map_err(|e| Error::Io {
        path: "<buffer>".into(),
        source: e,
    })?;
    Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
}

fn run(name: &str, matches: &ArgMatches) -> Result<()> {
    let cfg = resolve(matches)?;
    match name {
        "table" => write_output(&cfg.out, &experiment::run_table(&cfg)?),
        "static-sweep" => {
            let records = experiment::run_static_sweep(&cfg)?;
            write_output(&cfg.out, &readings_text(&records)?)
        }
        "staircase" => {
            let outcome = experiment::run_staircase(&cfg)?;
            let report = outcome.report_csv();
            eprint!("{report}");
            if let Some(path) = &cfg.report {
                write_output(&Some(path.clone()), &report)?;
            }
            write_output(&cfg.out, &readings_text(&outcome.records)?)
        }
        other => unreachable!("unknown subcommand {other}"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = cli().get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    match run(name, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 1 })
        }
    }
}
