use crate::error::{Error, Result};

/// Uniform mid-tread ADC: `2^bits` levels spread over `[v_lo, v_hi]`,
/// inputs rounded to the nearest level and clamped at the rails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcSpec {
    pub bits: u8,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl Default for AdcSpec {
    fn default() -> Self {
        Self {
            bits: 8,
            v_lo: -1.25,
            v_hi: 1.25,
        }
    }
}

impl AdcSpec {
    pub fn validate(&self) -> Result<()> {
        if !(4..=16).contains(&self.bits) {
            return Err(Error::invalid(
                "adc_bits",
                format!("must lie in [4, 16] (got {})", self.bits),
            ));
        }
        if !(self.v_lo.is_finite() && self.v_hi.is_finite() && self.v_lo < self.v_hi) {
            return Err(Error::invalid("v_lo", "input range must satisfy v_lo < v_hi"));
        }
        Ok(())
    }

    pub fn max_code(&self) -> u16 {
        ((1u32 << self.bits) - 1) as u16
    }

    /// Volts per code step.
    pub fn lsb(&self) -> f64 {
        (self.v_hi - self.v_lo) / f64::from(self.max_code())
    }

    pub fn quantize(&self, v: f64) -> u16 {
        let max = f64::from(self.max_code());
        let scaled = (v - self.v_lo) / (self.v_hi - self.v_lo) * max;
        if scaled.is_nan() {
            return 0;
        }
        scaled.round().clamp(0.0, max) as u16
    }

    pub fn code_to_voltage(&self, code: u16) -> f64 {
        self.v_lo + f64::from(code) / f64::from(self.max_code()) * (self.v_hi - self.v_lo)
    }
}
