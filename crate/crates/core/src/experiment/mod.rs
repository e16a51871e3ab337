//! Experiment runners behind the `diacell` command line: the calibration
//! table dump, the static pressure sweep and the three-step staircase.

mod config;
mod records;

pub use config::{RunConfig, KEYS};
pub use records::{emit_csv, parse_readings_csv, write_readings_csv, ReadingRecord, READINGS_HEADER};

use std::fmt::Write as _;

use crate::calibration::{generate_table, write_table, CalibrationTable};
use crate::cantilever::{CantileverSpec, PivotGeometry};
use crate::cell::{detect_steps, frequency_change, median_of_trials, CellConfig, CellMode, CellReading};
use crate::error::{Error, Result};
use crate::shell::DiaphragmSpec;
use crate::wire::{dual_wire_frequency, tension_from_pressure, wire_frequency};

pub const WIRE_HEADER: &str = "pressure_pa,single_hz,dual_hz,ratio";
pub const REPORT_HEADER: &str = "mode,step_index,step_pa,level_pa,delta_f_hz,detected";

fn check_in_table(cfg: &CellConfig, key: &str, p: f64) -> Result<()> {
    let (lo, hi) = cfg.table.pressure_range();
    if (lo..=hi).contains(&p) {
        Ok(())
    } else {
        Err(Error::config(
            key,
            format!("{p} Pa lies outside the table range [{lo}, {hi}]"),
        ))
    }
}

/// Median-of-`trials` reading at every sweep point, both tracks at the set
/// pressure.
pub fn run_static_sweep(run: &RunConfig) -> Result<Vec<ReadingRecord>> {
    run.validate()?;
    let cell = run.cell_config()?;
    let points = run.sweep_points()?;
    for &p in &points {
        check_in_table(&cell, "sweep_start", p)?;
    }
    let (tx_avg, tx_diff) = (run.average_transmitter(), run.differential_transmitter());
    points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let reading = median_of_trials(&cell, p, p, run.trials, i as u64)?;
            Ok(ReadingRecord::from_reading(&reading, &tx_avg, &tx_diff))
        })
        .collect()
}

/// Detection verdict for one staircase step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepVerdict {
    pub mode: CellMode,
    pub step_index: usize,
    pub step_pa: f64,
    /// Pressure level after the step.
    pub level_pa: f64,
    pub delta_f_hz: Option<f64>,
    pub detected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseOutcome {
    /// SINGLE-mode readings followed by DUAL-mode readings.
    pub records: Vec<ReadingRecord>,
    pub verdicts: Vec<StepVerdict>,
}

impl StaircaseOutcome {
    pub fn verdict(&self, mode: CellMode, step_index: usize) -> Option<&StepVerdict> {
        self.verdicts
            .iter()
            .find(|v| v.mode == mode && v.step_index == step_index)
    }

    pub fn report_csv(&self) -> String {
        let mut out = format!("{REPORT_HEADER}\n");
        for v in &self.verdicts {
            let delta = v.delta_f_hz.map(|d| d.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                v.mode, v.step_index, v.step_pa, v.level_pa, delta, v.detected
            );
        }
        out
    }
}

/// Pressure levels of the staircase: the baseline, then cumulative steps.
pub fn staircase_levels(baseline: f64, steps: &[f64]) -> Vec<f64> {
    std::iter::once(baseline)
        .chain(steps.iter().scan(baseline, |level, s| {
            *level += s;
            Some(*level)
        }))
        .collect()
}

/// Applies the staircase to the same cell in SINGLE and then DUAL mode
/// and reports which steps each mode resolves.
pub fn run_staircase(run: &RunConfig) -> Result<StaircaseOutcome> {
    run.validate()?;
    let levels = staircase_levels(run.baseline, &run.steps);
    let base_cell = run.cell_config()?;
    for &level in &levels {
        check_in_table(&base_cell, "baseline", level)?;
    }
    let (tx_avg, tx_diff) = (run.average_transmitter(), run.differential_transmitter());

    let mut records = Vec::new();
    let mut verdicts = Vec::new();
    let mut cycle = 0u64;
    for mode in [CellMode::Single, CellMode::Dual] {
        let cell = CellConfig {
            mode,
            ..base_cell.clone()
        };
        let mut readings: Vec<CellReading> = Vec::new();
        // Index of the first reading at each level.
        let mut level_starts = Vec::new();
        for &level in &levels {
            level_starts.push(readings.len());
            for _ in 0..run.cycles_per_step {
                readings.push(median_of_trials(&cell, level, level, run.trials, cycle)?);
                cycle += 1;
            }
        }
        let events = detect_steps(&readings, &cell);
        for (i, &start) in level_starts.iter().enumerate().skip(1) {
            let (before, after) = (&readings[start - 1], &readings[start]);
            verdicts.push(StepVerdict {
                mode,
                step_index: i - 1,
                step_pa: run.steps[i - 1],
                level_pa: levels[i],
                delta_f_hz: frequency_change(before, after, mode),
                detected: events.iter().any(|e| e.to_cycle == after.cycle_index),
            });
        }
        records.extend(
            readings
                .iter()
                .map(|r| ReadingRecord::from_reading(r, &tx_avg, &tx_diff)),
        );
    }
    Ok(StaircaseOutcome { records, verdicts })
}

/// The table selected by the configuration, or a physics-generated one
/// over the sweep pressures when `generate` is set.
pub fn active_table(run: &RunConfig) -> Result<CalibrationTable> {
    run.validate()?;
    if run.generate {
        let pressures = run.sweep_points()?;
        return generate_table(
            &DiaphragmSpec::default(),
            &CantileverSpec::default(),
            &PivotGeometry::default(),
            &pressures,
        );
    }
    Ok(run.cell_config()?.table)
}

/// CSV output of the `table` subcommand.
pub fn run_table(run: &RunConfig) -> Result<String> {
    if run.compare_wire {
        return compare_wire_csv(run);
    }
    let table = active_table(run)?;
    let mut buf = Vec::new();
    write_table(&table, &mut buf).map_err(|e| Error::io("<table>", e.into()))?;
    Ok(String::from_utf8(buf).expect("table CSV is UTF-8"))
}

/// Single- versus dual-diaphragm wire frequencies over the sweep.
pub fn compare_wire_csv(run: &RunConfig) -> Result<String> {
    run.validate()?;
    let spec = run.wire_spec();
    let mut out = format!("{WIRE_HEADER}\n");
    for p in run.sweep_points()? {
        if !(p > 0.0) {
            return Err(Error::config("sweep_start", "wire comparison needs pressures > 0"));
        }
        let t = tension_from_pressure(p, spec.diaphragm_area);
        let single = wire_frequency(t, &spec)?;
        let dual = dual_wire_frequency(t, t, &spec)?;
        let _ = writeln!(out, "{p},{single},{dual},{}", dual / single);
    }
    Ok(out)
}
