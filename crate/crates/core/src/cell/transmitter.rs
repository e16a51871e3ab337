use crate::error::{Error, Result};

/// Current-loop output stage: pressure mapped linearly onto 4–20 mA and
/// produced by a DAC with `dac_bits` of resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitterSpec {
    pub p_lo: f64,
    pub p_hi: f64,
    pub i_lo_ma: f64,
    pub i_hi_ma: f64,
    pub dac_bits: u8,
}

impl TransmitterSpec {
    /// Average-pressure channel over the 100–200 Pa operating range.
    pub fn average() -> Self {
        Self::with_range(100.0, 200.0)
    }

    /// Differential channel over −50..+50 Pa.
    pub fn differential() -> Self {
        Self::with_range(-50.0, 50.0)
    }

    pub fn with_range(p_lo: f64, p_hi: f64) -> Self {
        Self {
            p_lo,
            p_hi,
            i_lo_ma: 4.0,
            i_hi_ma: 20.0,
            dac_bits: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_lo.is_finite() && self.p_hi.is_finite() && self.p_lo < self.p_hi) {
            return Err(Error::invalid("p_lo", "transmitter range must satisfy p_lo < p_hi"));
        }
        if !(1..=24).contains(&self.dac_bits) {
            return Err(Error::invalid("dac_bits", "must lie in [1, 24]"));
        }
        Ok(())
    }

    fn span_ma(&self) -> f64 {
        self.i_hi_ma - self.i_lo_ma
    }

    /// Largest deviation between the ideal and the quantized current.
    pub fn max_quantization_error_ma(&self) -> f64 {
        self.span_ma() / f64::from((1u32 << self.dac_bits) - 1) / 2.0
    }
}

impl Default for TransmitterSpec {
    fn default() -> Self {
        Self::average()
    }
}

/// Loop current before the DAC, clamped to the rails.
pub fn ideal_current(p: f64, tx: &TransmitterSpec) -> f64 {
    let i = tx.i_lo_ma + tx.span_ma() * (p - tx.p_lo) / (tx.p_hi - tx.p_lo);
    i.clamp(tx.i_lo_ma, tx.i_hi_ma)
}

/// DAC code driving the current loop for pressure `p`.
pub fn dac_code(p: f64, tx: &TransmitterSpec) -> u32 {
    let max = f64::from((1u32 << tx.dac_bits) - 1);
    ((ideal_current(p, tx) - tx.i_lo_ma) / tx.span_ma() * max).round() as u32
}

/// Loop current after quantization (mA).
pub fn to_current(p: f64, tx: &TransmitterSpec) -> f64 {
    let max = f64::from((1u32 << tx.dac_bits) - 1);
    tx.i_lo_ma + f64::from(dac_code(p, tx)) / max * tx.span_ma()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_midpoint() {
        let tx = TransmitterSpec::average();
        assert_eq!(ideal_current(100.0, &tx), 4.0);
        assert_eq!(ideal_current(200.0, &tx), 20.0);
        assert_eq!(ideal_current(150.0, &tx), 12.0);
        assert_eq!(to_current(100.0, &tx), 4.0);
        assert_eq!(to_current(200.0, &tx), 20.0);
    }

    #[test]
    fn clamps_outside_range() {
        let tx = TransmitterSpec::average();
        assert_eq!(ideal_current(0.0, &tx), 4.0);
        assert_eq!(ideal_current(1e6, &tx), 20.0);
        assert_eq!(dac_code(1e6, &tx), 255);
    }

    #[test]
    fn differential_range() {
        let tx = TransmitterSpec::differential();
        assert_eq!(ideal_current(0.0, &tx), 12.0);
        assert_eq!(ideal_current(-50.0, &tx), 4.0);
        assert_eq!(ideal_current(40.0, &tx), 18.4);
    }
}
