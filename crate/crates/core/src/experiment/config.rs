//! Run configuration: documented defaults, overridden by a `key = value`
//! file, overridden in turn by command-line flags.

use std::fmt;
use std::path::PathBuf;

use crate::calibration::{default_table, load_table};
use crate::cell::{CellConfig, CellMode, TransmitterSpec};
use crate::error::{Error, Result};
use crate::signal::{derive_seed, AdcSpec, ExcitationSchedule, OptoSignalModel};
use crate::wire::WireSpec;

/// Every recognized key, in echo order.
pub const KEYS: &[&str] = &[
    "seed",
    "mode",
    "noise",
    "trials",
    "out",
    "table",
    "clamp",
    "rate_hz",
    "on_s",
    "off_s",
    "adc_bits",
    "v_lo",
    "v_hi",
    "a0",
    "tau",
    "phase",
    "threshold_hz",
    "edge_band_hz",
    "sweep_start",
    "sweep_end",
    "sweep_step",
    "baseline",
    "steps",
    "cycles_per_step",
    "q",
    "tx_lo",
    "tx_hi",
    "diff_lo",
    "diff_hi",
    "dac_bits",
    "generate",
    "compare_wire",
    "report",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub mode: CellMode,
    /// Opto-coupler noise standard deviation (V).
    pub noise: f64,
    pub trials: usize,
    pub out: Option<PathBuf>,
    /// Calibration table file; the built-in table when absent.
    pub table: Option<PathBuf>,
    pub clamp: bool,
    pub rate_hz: f64,
    pub on_s: f64,
    pub off_s: f64,
    pub adc_bits: u8,
    pub v_lo: f64,
    pub v_hi: f64,
    pub a0: f64,
    pub tau: f64,
    pub phase: f64,
    pub threshold_hz: f64,
    pub edge_band_hz: f64,
    pub sweep_start: f64,
    pub sweep_end: f64,
    pub sweep_step: f64,
    pub baseline: f64,
    pub steps: Vec<f64>,
    pub cycles_per_step: usize,
    /// Wire alignment factor for the wire comparison.
    pub q: f64,
    pub tx_lo: f64,
    pub tx_hi: f64,
    pub diff_lo: f64,
    pub diff_hi: f64,
    pub dac_bits: u8,
    pub generate: bool,
    pub compare_wire: bool,
    /// Staircase detection report file.
    pub report: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            mode: CellMode::Dual,
            noise: 0.0,
            trials: 5,
            out: None,
            table: None,
            clamp: false,
            rate_hz: 2000.0,
            on_s: 0.4,
            off_s: 0.6,
            adc_bits: 8,
            v_lo: -1.25,
            v_hi: 1.25,
            a0: 1.0,
            tau: 0.2,
            phase: 0.0,
            threshold_hz: 0.5,
            edge_band_hz: 1.0,
            sweep_start: 100.0,
            sweep_end: 200.0,
            sweep_step: 10.0,
            baseline: 150.0,
            steps: vec![0.5, 1.0, 4.0],
            cycles_per_step: 2,
            q: 0.98,
            tx_lo: 100.0,
            tx_hi: 200.0,
            diff_lo: -50.0,
            diff_hi: 50.0,
            dac_bits: 8,
            generate: false,
            compare_wire: false,
            report: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(Error::config(key, format!("expected a boolean, got `{other}`"))),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn optional_path(value: &str) -> Option<PathBuf> {
    let v = value.trim();
    (!v.is_empty()).then(|| PathBuf::from(v))
}

impl RunConfig {
    /// Sets one key from its textual value. Keys may use `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let k = key.as_str();
        match k {
            "seed" => self.seed = parse_value(k, value)?,
            "mode" => self.mode = value.parse().map_err(|e: String| Error::config(k, e))?,
            "noise" => self.noise = parse_value(k, value)?,
            "trials" => self.trials = parse_value(k, value)?,
            "out" => self.out = optional_path(value),
            "table" => self.table = optional_path(value),
            "clamp" => self.clamp = parse_bool(k, value)?,
            "rate_hz" => self.rate_hz = parse_value(k, value)?,
            "on_s" => self.on_s = parse_value(k, value)?,
            "off_s" => self.off_s = parse_value(k, value)?,
            "adc_bits" => self.adc_bits = parse_value(k, value)?,
            "v_lo" => self.v_lo = parse_value(k, value)?,
            "v_hi" => self.v_hi = parse_value(k, value)?,
            "a0" => self.a0 = parse_value(k, value)?,
            "tau" => self.tau = parse_value(k, value)?,
            "phase" => self.phase = parse_value(k, value)?,
            "threshold_hz" => self.threshold_hz = parse_value(k, value)?,
            "edge_band_hz" => self.edge_band_hz = parse_value(k, value)?,
            "sweep_start" => self.sweep_start = parse_value(k, value)?,
            "sweep_end" => self.sweep_end = parse_value(k, value)?,
            "sweep_step" => self.sweep_step = parse_value(k, value)?,
            "baseline" => self.baseline = parse_value(k, value)?,
            "steps" => self.steps = parse_list(k, value)?,
            "cycles_per_step" => self.cycles_per_step = parse_value(k, value)?,
            "q" => self.q = parse_value(k, value)?,
            "tx_lo" => self.tx_lo = parse_value(k, value)?,
            "tx_hi" => self.tx_hi = parse_value(k, value)?,
            "diff_lo" => self.diff_lo = parse_value(k, value)?,
            "diff_hi" => self.diff_hi = parse_value(k, value)?,
            "dac_bits" => self.dac_bits = parse_value(k, value)?,
            "generate" => self.generate = parse_bool(k, value)?,
            "compare_wire" => self.compare_wire = parse_bool(k, value)?,
            "report" => self.report = optional_path(value),
            _ => return Err(Error::config(k, "unknown key")),
        }
        Ok(())
    }

    /// Applies a `key = value` file. Blank lines and `#` comments are
    /// ignored.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", n + 1), "expected `key = value`"))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &std::path::Path) -> Result<()> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        self.apply_file_text(&text)
    }

    /// Checks every value before any simulation starts.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rate_hz", self.rate_hz),
            ("on_s", self.on_s),
            ("off_s", self.off_s),
            ("tau", self.tau),
            ("threshold_hz", self.threshold_hz),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(key, format!("must be > 0 (got {v})")));
            }
        }
        let non_negative = [
            ("noise", self.noise),
            ("a0", self.a0),
            ("edge_band_hz", self.edge_band_hz),
        ];
        for (key, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(key, format!("must be >= 0 (got {v})")));
            }
        }
        if self.trials == 0 || self.trials.is_multiple_of(2) {
            return Err(Error::config(
                "trials",
                format!("must be odd and >= 1 (got {})", self.trials),
            ));
        }
        if self.cycles_per_step == 0 {
            return Err(Error::config("cycles_per_step", "must be >= 1"));
        }
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(Error::config("q", format!("must lie in (0, 1] (got {})", self.q)));
        }
        if !(self.tx_lo < self.tx_hi) {
            return Err(Error::config("tx_lo", "must be below tx_hi"));
        }
        if !(self.diff_lo < self.diff_hi) {
            return Err(Error::config("diff_lo", "must be below diff_hi"));
        }
        if !(1..=24).contains(&self.dac_bits) {
            return Err(Error::config("dac_bits", "must lie in [1, 24]"));
        }
        if self.generate && self.compare_wire {
            return Err(Error::config("generate", "cannot be combined with compare_wire"));
        }
        if let Some(step) = self.steps.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::config("steps", format!("step sizes must be > 0 (got {step})")));
        }
        self.cell_config().map(|_| ())
    }

    /// Sweep pressures `sweep_start, sweep_start + step, …, ≤ sweep_end`.
    pub fn sweep_points(&self) -> Result<Vec<f64>> {
        let (start, end, step) = (self.sweep_start, self.sweep_end, self.sweep_step);
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::config("sweep_start", "must be finite"));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::config("sweep_step", format!("must be > 0 (got {step})")));
        }
        if end < start {
            return Err(Error::config(
                "sweep_end",
                format!("empty sweep range [{start}, {end}]"),
            ));
        }
        let n = ((end - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| start + i as f64 * step).collect())
    }

    pub fn channel_model(&self, channel: u64) -> OptoSignalModel {
        OptoSignalModel {
            a0: self.a0,
            tau: self.tau,
            phase: self.phase,
            noise_sigma: self.noise,
            seed: derive_seed(self.seed, u64::MAX, channel),
        }
    }

    /// Builds the simulated cell described by this configuration.
    pub fn cell_config(&self) -> Result<CellConfig> {
        let table = match &self.table {
            Some(path) => load_table(path).map_err(|e| Error::config("table", e.to_string()))?,
            None => default_table(),
        }
        .with_clamp(self.clamp);
        let cfg = CellConfig {
            table,
            channels: [self.channel_model(0), self.channel_model(1)],
            adc: AdcSpec {
                bits: self.adc_bits,
                v_lo: self.v_lo,
                v_hi: self.v_hi,
            },
            sched: ExcitationSchedule {
                on_s: self.on_s,
                off_s: self.off_s,
            },
            rate_hz: self.rate_hz,
            mode: self.mode,
            detection_threshold_hz: self.threshold_hz,
            edge_band_hz: self.edge_band_hz,
        };
        cfg.validate().map_err(|e| match e {
            Error::InvalidSpec { field, reason } => Error::config(field, reason),
            other => Error::config("cell", other.to_string()),
        })?;
        Ok(cfg)
    }

    pub fn average_transmitter(&self) -> TransmitterSpec {
        TransmitterSpec {
            dac_bits: self.dac_bits,
            ..TransmitterSpec::with_range(self.tx_lo, self.tx_hi)
        }
    }

    pub fn differential_transmitter(&self) -> TransmitterSpec {
        TransmitterSpec {
            dac_bits: self.dac_bits,
            ..TransmitterSpec::with_range(self.diff_lo, self.diff_hi)
        }
    }

    pub fn wire_spec(&self) -> WireSpec {
        WireSpec {
            q: self.q,
            ..WireSpec::default()
        }
    }
}

impl fmt::Display for RunConfig {
    /// The resolved configuration in the same `key = value` format the
    /// parser accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let steps = self.steps.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let values: Vec<String> = vec![
            self.seed.to_string(),
            self.mode.to_string(),
            self.noise.to_string(),
            self.trials.to_string(),
            path(&self.out),
            path(&self.table),
            self.clamp.to_string(),
            self.rate_hz.to_string(),
            self.on_s.to_string(),
            self.off_s.to_string(),
            self.adc_bits.to_string(),
            self.v_lo.to_string(),
            self.v_hi.to_string(),
            self.a0.to_string(),
            self.tau.to_string(),
            self.phase.to_string(),
            self.threshold_hz.to_string(),
            self.edge_band_hz.to_string(),
            self.sweep_start.to_string(),
            self.sweep_end.to_string(),
            self.sweep_step.to_string(),
            self.baseline.to_string(),
            steps,
            self.cycles_per_step.to_string(),
            self.q.to_string(),
            self.tx_lo.to_string(),
            self.tx_hi.to_string(),
            self.diff_lo.to_string(),
            self.diff_hi.to_string(),
            self.dac_bits.to_string(),
            self.generate.to_string(),
            self.compare_wire.to_string(),
            path(&self.report),
        ];
        for (key, value) in KEYS.iter().zip(values) {
            writeln!(f, "{key} = {value}")?;
        }
        Ok(())
    }
}
