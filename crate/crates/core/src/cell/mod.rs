//! Measurement-cycle orchestration for the single or dual diaphragm cell.
//!
//! Both strips share one excitation pulse and one sensing slot. Each
//! active channel's ring-down is sampled, its frequency estimated and the
//! calibration table inverted to a pressure; the pair yields average and
//! differential pressure.

mod transmitter;

pub use transmitter::{dac_code, ideal_current, to_current, TransmitterSpec};

use std::fmt;
use std::str::FromStr;

use crate::calibration::{default_table, CalibrationTable};
use crate::error::{Error, Result};
use crate::signal::{
    derive_seed, sample_window, AdcSpec, ExcitationSchedule, FrequencyEstimator, OptoSignalModel, DEFAULT_RATE_HZ,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellMode {
    /// One diaphragm, one pressure track.
    Single,
    /// Two diaphragms on separate tracks.
    Dual,
}

impl CellMode {
    pub fn channels(self) -> usize {
        match self {
            CellMode::Single => 1,
            CellMode::Dual => 2,
        }
    }
}

impl fmt::Display for CellMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellMode::Single => "single",
            CellMode::Dual => "dual",
        })
    }
}

impl FromStr for CellMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "single" => Ok(CellMode::Single),
            "dual" => Ok(CellMode::Dual),
            other => Err(format!("expected `single` or `dual`, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellConfig {
    pub table: CalibrationTable,
    /// Opto-coupler models for channel 1 and channel 2.
    pub channels: [OptoSignalModel; 2],
    pub adc: AdcSpec,
    pub sched: ExcitationSchedule,
    pub rate_hz: f64,
    pub mode: CellMode,
    /// Minimum summed frequency change reported as a step (Hz).
    pub detection_threshold_hz: f64,
    /// Estimates this close outside the table's frequency span saturate
    /// at the end knot instead of flagging out-of-range (Hz).
    pub edge_band_hz: f64,
}

impl Default for CellConfig {
    fn default() -> Self {
        Self {
            table: default_table(),
            channels: [
                OptoSignalModel::default(),
                OptoSignalModel {
                    seed: 1,
                    ..OptoSignalModel::default()
                },
            ],
            adc: AdcSpec::default(),
            sched: ExcitationSchedule::default(),
            rate_hz: DEFAULT_RATE_HZ,
            mode: CellMode::Dual,
            detection_threshold_hz: 0.5,
            edge_band_hz: 1.0,
        }
    }
}

impl CellConfig {
    pub fn validate(&self) -> Result<()> {
        for ch in &self.channels {
            ch.validate()?;
        }
        self.adc.validate()?;
        self.sched.validate()?;
        let f_max = self.table.frequency_range().1;
        if !(self.rate_hz.is_finite() && self.rate_hz > 2.0 * f_max) {
            return Err(Error::invalid(
                "rate_hz",
                format!(
                    "must exceed twice the highest table frequency ({f_max} Hz), got {}",
                    self.rate_hz
                ),
            ));
        }
        if !(self.detection_threshold_hz.is_finite() && self.detection_threshold_hz > 0.0) {
            return Err(Error::invalid("detection_threshold_hz", "must be > 0"));
        }
        if !(self.edge_band_hz.is_finite() && self.edge_band_hz >= 0.0) {
            return Err(Error::invalid("edge_band_hz", "must be >= 0"));
        }
        if self.sched.samples_per_window(self.rate_hz) < 4 {
            return Err(Error::invalid("off_s", "sensing slot holds fewer than 4 samples"));
        }
        Ok(())
    }

    /// Virtual start time of `cycle` (s).
    pub fn cycle_time(&self, cycle: u64) -> f64 {
        self.sched.cycle_start(cycle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelStatus {
    Ok,
    NoVibration,
    OutOfRange,
    /// Channel not present in single-diaphragm mode.
    Unsupported,
}

impl ChannelStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelStatus::Ok => "OK",
            ChannelStatus::NoVibration => "NO_VIBRATION",
            ChannelStatus::OutOfRange => "OUT_OF_RANGE",
            ChannelStatus::Unsupported => "UNSUPPORTED",
        }
    }
}

impl fmt::Display for ChannelStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [
            ChannelStatus::Ok,
            ChannelStatus::NoVibration,
            ChannelStatus::OutOfRange,
            ChannelStatus::Unsupported,
        ]
        .into_iter()
        .find(|st| st.as_str() == s)
        .ok_or_else(|| format!("unknown channel status `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelReading {
    /// Pressure applied to this track (Pa).
    pub applied: Option<f64>,
    /// Estimated vibration frequency (Hz).
    pub frequency: Option<f64>,
    /// Pressure recovered from the lookup table (Pa).
    pub pressure: Option<f64>,
    pub status: ChannelStatus,
}

impl ChannelReading {
    fn unsupported() -> Self {
        Self {
            applied: None,
            frequency: None,
            pressure: None,
            status: ChannelStatus::Unsupported,
        }
    }
}

/// Output of one measurement cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellReading {
    pub cycle_index: u64,
    pub mode: CellMode,
    pub channels: [ChannelReading; 2],
    pub p_avg: Option<f64>,
    pub p_diff: Option<f64>,
}

impl CellReading {
    fn assemble(cycle_index: u64, mode: CellMode, channels: [ChannelReading; 2]) -> Self {
        let (p_avg, p_diff) = match mode {
            CellMode::Single => (channels[0].pressure, channels[0].pressure.map(|_| 0.0)),
            CellMode::Dual => match (channels[0].pressure, channels[1].pressure) {
                (Some(p1), Some(p2)) => {
                    let (avg, diff) = derive_reading(p1, p2);
                    (Some(avg), Some(diff))
                }
                _ => (None, None),
            },
        };
        Self {
            cycle_index,
            mode,
            channels,
            p_avg,
            p_diff,
        }
    }

    pub fn p1(&self) -> Option<f64> {
        self.channels[0].pressure
    }

    pub fn p2(&self) -> Option<f64> {
        self.channels[1].pressure
    }

    pub fn f1(&self) -> Option<f64> {
        self.channels[0].frequency
    }

    pub fn f2(&self) -> Option<f64> {
        self.channels[1].frequency
    }

    pub fn all_ok(&self) -> bool {
        self.channels[..self.mode.channels()]
            .iter()
            .all(|c| c.status == ChannelStatus::Ok)
    }
}

/// Average and differential pressure of a channel pair.
pub fn derive_reading(p1: f64, p2: f64) -> (f64, f64) {
    ((p1 + p2) / 2.0, p1 - p2)
}

/// Runs one cycle and its sensing slot. Per-channel failures are reported
/// through [`ChannelStatus`]; only an invalid configuration is an error.
pub fn run_cycle(cfg: &CellConfig, p1: f64, p2: f64, cycle_index: u64) -> Result<CellReading> {
    cfg.validate()?;
    let estimator = FrequencyEstimator::new(cfg.sched.samples_per_window(cfg.rate_hz));
    run_trial(cfg, &estimator, [p1, p2], cycle_index, 0)
}

fn run_trial(
    cfg: &CellConfig,
    estimator: &FrequencyEstimator,
    applied: [f64; 2],
    cycle_index: u64,
    trial: u64,
) -> Result<CellReading> {
    let mut channels = [ChannelReading::unsupported(); 2];
    for (ch, slot) in channels.iter_mut().enumerate().take(cfg.mode.channels()) {
        *slot = measure_channel(cfg, estimator, &cfg.channels[ch], applied[ch], cycle_index, trial)?;
    }
    Ok(CellReading::assemble(cycle_index, cfg.mode, channels))
}

fn measure_channel(
    cfg: &CellConfig,
    estimator: &FrequencyEstimator,
    model: &OptoSignalModel,
    applied: f64,
    cycle_index: u64,
    trial: u64,
) -> Result<ChannelReading> {
    let mut reading = ChannelReading {
        applied: Some(applied),
        frequency: None,
        pressure: None,
        status: ChannelStatus::Ok,
    };
    let f_true = match cfg.table.frequency_from_pressure(applied) {
        Ok(f) => f,
        Err(Error::OutOfRange { .. }) => {
            reading.status = ChannelStatus::OutOfRange;
            return Ok(reading);
        }
        Err(e) => return Err(e),
    };
    let model = OptoSignalModel {
        seed: derive_seed(model.seed, cycle_index, trial),
        ..*model
    };
    let window = sample_window(f_true, &model, &cfg.adc, &cfg.sched, cfg.rate_hz)?;
    let f_est = match estimator.estimate(&window) {
        Ok(f) => f,
        Err(Error::NoVibration { .. }) => {
            reading.status = ChannelStatus::NoVibration;
            return Ok(reading);
        }
        Err(e) => return Err(e),
    };
    reading.frequency = Some(f_est);

    let (f_lo, f_hi) = cfg.table.frequency_range();
    let lookup = if f_est >= f_lo - cfg.edge_band_hz && f_est <= f_hi + cfg.edge_band_hz {
        f_est.clamp(f_lo, f_hi)
    } else {
        f_est
    };
    match cfg.table.pressure_from_frequency(lookup) {
        Ok(p) => reading.pressure = Some(p),
        Err(Error::OutOfRange { .. }) => reading.status = ChannelStatus::OutOfRange,
        Err(e) => return Err(e),
    }
    Ok(reading)
}

fn median_of(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

/// Median of a set of trial values (mean of the middle pair for even counts).
pub fn median(values: &[f64]) -> Option<f64> {
    median_of(&mut values.to_vec())
}

/// Runs `trials` cycles with independent noise and reports the
/// element-wise median of the per-channel pressures and frequencies.
pub fn median_of_trials(cfg: &CellConfig, p1: f64, p2: f64, trials: usize, cycle_index: u64) -> Result<CellReading> {
    if trials == 0 || trials.is_multiple_of(2) {
        return Err(Error::invalid("trials", format!("must be odd and >= 1 (got {trials})")));
    }
    cfg.validate()?;
    let estimator = FrequencyEstimator::new(cfg.sched.samples_per_window(cfg.rate_hz));
    let runs = (0..trials as u64)
        .map(|t| run_trial(cfg, &estimator, [p1, p2], cycle_index, t))
        .collect::<Result<Vec<_>>>()?;
    if trials == 1 {
        return Ok(runs[0]);
    }

    let active = cfg.mode.channels();
    let all_silent = runs.iter().all(|r| {
        r.channels[..active]
            .iter()
            .all(|c| c.status == ChannelStatus::NoVibration)
    });
    if all_silent {
        return Err(Error::AllTrialsFailed(trials));
    }

    let mut channels = runs[0].channels;
    for (ch, slot) in channels.iter_mut().enumerate().take(active) {
        let ok: Vec<&ChannelReading> = runs
            .iter()
            .map(|r| &r.channels[ch])
            .filter(|c| c.status == ChannelStatus::Ok)
            .collect();
        if ok.is_empty() {
            continue;
        }
        let mut pressures: Vec<f64> = ok.iter().filter_map(|c| c.pressure).collect();
        let mut freqs: Vec<f64> = ok.iter().filter_map(|c| c.frequency).collect();
        *slot = ChannelReading {
            applied: slot.applied,
            frequency: median_of(&mut freqs),
            pressure: median_of(&mut pressures),
            status: ChannelStatus::Ok,
        };
    }
    Ok(CellReading::assemble(cycle_index, cfg.mode, channels))
}

/// A frequency change between consecutive cycles large enough to count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepEvent {
    pub from_cycle: u64,
    pub to_cycle: u64,
    /// Summed absolute frequency change over the active channels (Hz).
    pub delta_f_hz: f64,
}

/// Summed absolute frequency change between two readings, or `None` when
/// an active channel has no frequency estimate in either.
pub fn frequency_change(prev: &CellReading, next: &CellReading, mode: CellMode) -> Option<f64> {
    (0..mode.channels())
        .map(|ch| Some((next.channels[ch].frequency? - prev.channels[ch].frequency?).abs()))
        .sum()
}

/// Scans time-ordered readings for steps of at least the configured
/// threshold.
pub fn detect_steps(readings: &[CellReading], cfg: &CellConfig) -> Vec<StepEvent> {
    readings
        .windows(2)
        .filter_map(|pair| {
            let delta = frequency_change(&pair[0], &pair[1], cfg.mode)?;
            (delta >= cfg.detection_threshold_hz).then_some(StepEvent {
                from_cycle: pair[0].cycle_index,
                to_cycle: pair[1].cycle_index,
                delta_f_hz: delta,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reading_with(cycle: u64, mode: CellMode, f1: f64, f2: f64) -> CellReading {
        let ch = |f| ChannelReading {
            applied: None,
            frequency: Some(f),
            pressure: Some(150.0),
            status: ChannelStatus::Ok,
        };
        let channels = match mode {
            CellMode::Single => [ch(f1), ChannelReading::unsupported()],
            CellMode::Dual => [ch(f1), ch(f2)],
        };
        CellReading::assemble(cycle, mode, channels)
    }

    #[test]
    fn derive_reading_arithmetic() {
        assert_eq!(derive_reading(120.0, 100.0), (110.0, 20.0));
        assert_eq!(derive_reading(137.5, 137.5), (137.5, 0.0));
        assert_eq!(derive_reading(0.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn median_definition() {
        assert_eq!(median(&[138.0, 139.0, 140.0, 141.0, 200.0]), Some(140.0));
        assert_eq!(median(&[200.0, 141.0, 138.0, 140.0, 139.0]), Some(140.0));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("dual".parse::<CellMode>().unwrap(), CellMode::Dual);
        assert_eq!("SINGLE".parse::<CellMode>().unwrap(), CellMode::Single);
        assert!("triple".parse::<CellMode>().is_err());
        assert_eq!(
            "OUT_OF_RANGE".parse::<ChannelStatus>().unwrap(),
            ChannelStatus::OutOfRange
        );
    }

    #[test]
    fn step_detection_thresholds() {
        let cfg = CellConfig::default();
        let flat = [
            reading_with(0, CellMode::Dual, 220.0, 220.0),
            reading_with(1, CellMode::Dual, 220.0, 220.0),
        ];
        assert!(detect_steps(&flat, &cfg).is_empty());

        let dual = [
            reading_with(0, CellMode::Dual, 220.0, 220.0),
            reading_with(1, CellMode::Dual, 219.7, 219.7),
        ];
        let events = detect_steps(&dual, &cfg);
        assert_eq!(events.len(), 1);
        assert!((events[0].delta_f_hz - 0.6).abs() < 1e-9);

        let single_cfg = CellConfig {
            mode: CellMode::Single,
            ..CellConfig::default()
        };
        let single = [
            reading_with(0, CellMode::Single, 220.0, 0.0),
            reading_with(1, CellMode::Single, 219.7, 0.0),
        ];
        assert!(detect_steps(&single, &single_cfg).is_empty());
    }

    #[test]
    fn single_mode_has_no_differential() {
        let cfg = CellConfig {
            mode: CellMode::Single,
            ..CellConfig::default()
        };
        let r = run_cycle(&cfg, 140.0, 999.0, 0).unwrap();
        assert_eq!(r.channels[1].status, ChannelStatus::Unsupported);
        assert_eq!(r.p_diff, Some(0.0));
        assert_eq!(r.p_avg, r.p1());
        assert!((r.p1().unwrap() - 140.0).abs() <= 2.0);
    }

    #[test]
    fn below_table_is_out_of_range() {
        let r = run_cycle(&CellConfig::default(), 50.0, 140.0, 0).unwrap();
        assert_eq!(r.channels[0].status, ChannelStatus::OutOfRange);
        assert_eq!(r.channels[1].status, ChannelStatus::Ok);
        assert_eq!(r.p_avg, None);
    }

    #[test]
    fn silent_strips() {
        let silent = OptoSignalModel {
            a0: 0.0,
            ..OptoSignalModel::default()
        };
        let cfg = CellConfig {
            channels: [silent, silent],
            ..CellConfig::default()
        };
        let r = run_cycle(&cfg, 140.0, 140.0, 0).unwrap();
        assert_eq!(r.channels[0].status, ChannelStatus::NoVibration);
        assert!(matches!(
            median_of_trials(&cfg, 140.0, 140.0, 3, 0),
            Err(Error::AllTrialsFailed(3))
        ));
    }

    #[test]
    fn invalid_config_is_a_hard_error() {
        let cfg = CellConfig {
            rate_hz: 400.0,
            ..CellConfig::default()
        };
        assert!(run_cycle(&cfg, 140.0, 140.0, 0).is_err());
        assert!(median_of_trials(&CellConfig::default(), 140.0, 140.0, 4, 0).is_err());
    }

    #[test]
    fn single_trial_median_is_run_cycle() {
        let cfg = CellConfig {
            channels: [
                OptoSignalModel {
                    noise_sigma: 0.02,
                    seed: 5,
                    ..Default::default()
                },
                OptoSignalModel {
                    noise_sigma: 0.02,
                    seed: 6,
                    ..Default::default()
                },
            ],
            ..CellConfig::default()
        };
        assert_eq!(
            median_of_trials(&cfg, 130.0, 170.0, 1, 4).unwrap(),
            run_cycle(&cfg, 130.0, 170.0, 4).unwrap()
        );
    }
}
