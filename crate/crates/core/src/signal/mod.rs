//! Opto-coupler signal synthesis and the acquisition chain: duty-cycled
//! excitation, sample-and-hold, ADC quantization, circular sample storage
//! and FFT frequency estimation.
//!
//! Simulation time is virtual. Each cycle begins with the excitation slot
//! (`on_s`), followed by the sensing slot (`off_s`) during which the
//! decaying vibration is sampled at the D-CLK rate.

mod adc;
mod estimate;
mod window;

pub use adc::AdcSpec;
pub use estimate::{estimate_frequency, FrequencyEstimator, FFT_LEN, PEAK_TO_MEDIAN_MIN};
pub use window::{sample_window, SampleWindow};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// CPU clock of the controller (Hz).
pub const CPU_CLOCK_HZ: f64 = 20e6;
/// Divider from the CPU clock down to D-CLK.
pub const DCLK_DIVIDER: f64 = 10_000.0;
/// Default sampling rate, `CPU_CLOCK_HZ / DCLK_DIVIDER`.
pub const DEFAULT_RATE_HZ: f64 = CPU_CLOCK_HZ / DCLK_DIVIDER;

/// Electromagnet drive timing for one measurement cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationSchedule {
    /// Excitation slot; no sensing happens here (s).
    pub on_s: f64,
    /// Sensing slot during which the strip rings down (s).
    pub off_s: f64,
}

impl Default for ExcitationSchedule {
    fn default() -> Self {
        Self { on_s: 0.4, off_s: 0.6 }
    }
}

impl ExcitationSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.on_s.is_finite() && self.on_s > 0.0) {
            return Err(Error::invalid("on_s", "must be > 0"));
        }
        if !(self.off_s.is_finite() && self.off_s > 0.0) {
            return Err(Error::invalid("off_s", "must be > 0"));
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        self.on_s + self.off_s
    }

    pub fn cycle_start(&self, cycle: u64) -> f64 {
        cycle as f64 * self.period()
    }

    /// `[start, end)` of the sensing slot of `cycle`, in virtual seconds.
    pub fn sensing_window(&self, cycle: u64) -> (f64, f64) {
        let start = self.cycle_start(cycle) + self.on_s;
        (start, start + self.off_s)
    }

    /// Number of D-CLK ticks inside one sensing slot.
    pub fn samples_per_window(&self, rate_hz: f64) -> usize {
        // Guard against 0.6 * 2000 landing a hair below 1200.
        (self.off_s * rate_hz * (1.0 + 1e-12)).floor() as usize
    }

    /// Virtual time of sample `k` in the sensing slot of `cycle`.
    pub fn sample_instant(&self, cycle: u64, k: usize, rate_hz: f64) -> f64 {
        self.sensing_window(cycle).0 + k as f64 / rate_hz
    }
}

/// Ringing strip as seen through the opto-coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptoSignalModel {
    /// Amplitude at release (V).
    pub a0: f64,
    /// Exponential decay constant (s).
    pub tau: f64,
    /// Initial phase (rad).
    pub phase: f64,
    /// Standard deviation of additive Gaussian noise (V).
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for OptoSignalModel {
    fn default() -> Self {
        Self {
            a0: 1.0,
            tau: 0.2,
            phase: 0.0,
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

impl OptoSignalModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.a0.is_finite() && self.a0 >= 0.0) {
            return Err(Error::invalid("a0", "must be >= 0"));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::invalid("tau", "must be > 0"));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::invalid("noise_sigma", "must be >= 0"));
        }
        if !self.phase.is_finite() {
            return Err(Error::invalid("phase", "must be finite"));
        }
        Ok(())
    }

    /// Noise sample `index` of this model's stream. Depends only on
    /// `(seed, index)`, so samples can be drawn in any order.
    pub fn noise(&self, index: u64) -> f64 {
        if self.noise_sigma == 0.0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let z: f64 = rng.sample(StandardNormal);
        self.noise_sigma * z
    }
}

/// Opto-coupler voltage `t` seconds after release; `index` selects the
/// noise sample.
pub fn synthesize_opto_signal(f_hz: f64, model: &OptoSignalModel, t: f64, index: u64) -> f64 {
    let clean = model.a0 * (-t / model.tau).exp() * (2.0 * std::f64::consts::PI * f_hz * t + model.phase).cos();
    clean + model.noise(index)
}

/// Mixes a base seed with a cycle and trial number into an independent
/// stream seed (SplitMix64 finalizer).
pub fn derive_seed(base: u64, cycle: u64, trial: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(base) ^ cycle) ^ trial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_rate_is_divided_clock() {
        assert_eq!(DEFAULT_RATE_HZ, 2000.0);
    }

    #[test]
    fn schedule_timing() {
        let s = ExcitationSchedule::default();
        assert_eq!(s.period(), 1.0);
        assert_eq!(s.samples_per_window(2000.0), 1200);
        assert_eq!(s.sensing_window(3), (3.4, 4.0));
        assert!(ExcitationSchedule { on_s: 0.0, off_s: 0.6 }.validate().is_err());
    }

    #[test]
    fn signal_shape() {
        let m = OptoSignalModel {
            phase: 0.3,
            ..Default::default()
        };
        assert_eq!(synthesize_opto_signal(200.0, &m, 0.0, 0), m.a0 * 0.3f64.cos());

        // 200 Hz at t = 0.2 s is a whole number of periods.
        let m = OptoSignalModel::default();
        assert_relative_eq!(
            synthesize_opto_signal(200.0, &m, m.tau, 0),
            m.a0 / std::f64::consts::E,
            max_relative = 1e-12
        );

        let silent = OptoSignalModel { a0: 0.0, ..m };
        assert!((0..100).all(|k| synthesize_opto_signal(222.0, &silent, k as f64 * 1e-3, k) == 0.0));
    }

    #[test]
    fn noise_is_deterministic_and_seeded() {
        let m = OptoSignalModel {
            noise_sigma: 0.1,
            seed: 7,
            ..Default::default()
        };
        assert_eq!(m.noise(42), m.noise(42));
        assert_ne!(m.noise(42), m.noise(43));
        let other = OptoSignalModel { seed: 8, ..m };
        assert_ne!(m.noise(42), other.noise(42));
        let n = 4000;
        let mean = (0..n).map(|k| m.noise(k)).sum::<f64>() / n as f64;
        let var = (0..n).map(|k| (m.noise(k) - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01);
        assert!((var.sqrt() - 0.1).abs() < 0.01);
    }

    #[test]
    fn derived_seeds_differ() {
        let s = derive_seed(1, 0, 0);
        assert_ne!(s, derive_seed(1, 1, 0));
        assert_ne!(s, derive_seed(1, 0, 1));
        assert_ne!(s, derive_seed(2, 0, 0));
        assert_eq!(s, derive_seed(1, 0, 0));
    }
}
