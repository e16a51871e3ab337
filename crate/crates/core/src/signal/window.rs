use log::warn;

use super::{synthesize_opto_signal, AdcSpec, ExcitationSchedule, OptoSignalModel};
use crate::error::{Error, Result};

/// RAM region filled by the sampling interrupt: a fixed number of code
/// slots and a write pointer that wraps to the start at the upper limit.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleWindow {
    rate_hz: f64,
    codes: Vec<u16>,
    write_index: usize,
    stored: u64,
    aliasing_risk: bool,
}

impl SampleWindow {
    /// Empty window. Panics if `capacity` is zero.
    pub fn new(capacity: usize, rate_hz: f64) -> Self {
        assert!(capacity > 0, "sample window needs at least one slot");
        Self {
            rate_hz,
            codes: vec![0; capacity],
            write_index: 0,
            stored: 0,
            aliasing_risk: false,
        }
    }

    pub fn rate_hz(&self) -> f64 {
        self.rate_hz
    }

    pub fn capacity(&self) -> usize {
        self.codes.len()
    }

    pub fn write_index(&self) -> usize {
        self.write_index
    }

    /// Total number of stores since creation, including overwritten ones.
    pub fn stores(&self) -> u64 {
        self.stored
    }

    pub fn is_full(&self) -> bool {
        self.stored >= self.codes.len() as u64
    }

    /// Raw slot contents in address order.
    pub fn codes(&self) -> &[u16] {
        &self.codes
    }

    /// Set when the sampling rate was at or below twice the signal
    /// frequency while the window was filled.
    pub fn aliasing_risk(&self) -> bool {
        self.aliasing_risk
    }

    /// Interrupt service step: store at the pointer, advance, wrap.
    pub fn isr_store(&mut self, code: u16) {
        self.codes[self.write_index] = code;
        self.write_index += 1;
        if self.write_index == self.codes.len() {
            self.write_index = 0;
        }
        self.stored += 1;
    }

    /// Stored codes oldest first.
    pub fn chronological(&self) -> impl Iterator<Item = u16> + '_ {
        let (head, tail) = if self.is_full() {
            self.codes.split_at(self.write_index)
        } else {
            (&self.codes[..0], &self.codes[..self.write_index])
        };
        tail.iter().chain(head).copied()
    }
}

/// Samples one sensing slot of a strip ringing at `f_hz`.
///
/// Sample `k` is taken `k / rate_hz` seconds after release and stored
/// through [`SampleWindow::isr_store`]. Rates at or below `2·f_hz` only
/// raise a warning.
pub fn sample_window(
    f_hz: f64,
    model: &OptoSignalModel,
    adc: &AdcSpec,
    sched: &ExcitationSchedule,
    rate_hz: f64,
) -> Result<SampleWindow> {
    model.validate()?;
    adc.validate()?;
    sched.validate()?;
    if !(rate_hz.is_finite() && rate_hz > 0.0) {
        return Err(Error::invalid("rate_hz", format!("must be > 0 (got {rate_hz})")));
    }
    let capacity = sched.samples_per_window(rate_hz);
    if capacity == 0 {
        return Err(Error::invalid("off_s", "sensing slot shorter than one sample period"));
    }

    let mut window = SampleWindow::new(capacity, rate_hz);
    if rate_hz <= 2.0 * f_hz {
        warn!("sampling at {rate_hz} Hz aliases a {f_hz} Hz signal");
        window.aliasing_risk = true;
    }
    for k in 0..capacity {
        let t = k as f64 / rate_hz;
        let v = synthesize_opto_signal(f_hz, model, t, k as u64);
        window.isr_store(adc.quantize(v));
    }
    Ok(window)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_window_has_1200_codes() {
        let w = sample_window(
            222.0,
            &OptoSignalModel::default(),
            &AdcSpec::default(),
            &ExcitationSchedule::default(),
            2000.0,
        )
        .unwrap();
        assert_eq!(w.capacity(), 1200);
        assert_eq!(w.stores(), 1200);
        assert_eq!(w.write_index(), 0);
        assert!(w.is_full());
        assert!(!w.aliasing_risk());
    }

    #[test]
    fn dc_input_sits_mid_scale() {
        let dc = OptoSignalModel {
            a0: 0.0,
            ..Default::default()
        };
        let w = sample_window(222.0, &dc, &AdcSpec::default(), &ExcitationSchedule::default(), 2000.0).unwrap();
        assert!(w.codes().iter().all(|&c| c == 128));
    }

    #[test]
    fn full_scale_codes_stay_in_range() {
        let loud = OptoSignalModel {
            a0: 5.0,
            ..Default::default()
        };
        let w = sample_window(
            222.0,
            &loud,
            &AdcSpec::default(),
            &ExcitationSchedule::default(),
            2000.0,
        )
        .unwrap();
        assert!(w.codes().iter().all(|&c| c <= 255));
        assert!(w.codes().contains(&255) && w.codes().contains(&0));
    }

    #[test]
    fn wraparound() {
        let mut w = SampleWindow::new(1200, 2000.0);
        assert_eq!(w.write_index(), 0);
        for k in 0..1200 {
            w.isr_store(k as u16);
        }
        assert_eq!(w.write_index(), 0);
        for k in 0..100 {
            w.isr_store(5000 + k);
        }
        assert_eq!(w.write_index(), 100);
        let chrono: Vec<u16> = w.chronological().collect();
        assert_eq!(chrono[0], 100);
        assert_eq!(chrono[1199], 5099);
    }

    #[test]
    fn partial_window_is_not_full() {
        let mut w = SampleWindow::new(10, 2000.0);
        w.isr_store(1);
        w.isr_store(2);
        assert!(!w.is_full());
        assert_eq!(w.chronological().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn aliasing_is_flagged_but_computed() {
        let w = sample_window(
            1200.0,
            &OptoSignalModel::default(),
            &AdcSpec::default(),
            &ExcitationSchedule::default(),
            2000.0,
        )
        .unwrap();
        assert!(w.aliasing_risk());
        assert_eq!(w.stores(), 1200);
    }
}
