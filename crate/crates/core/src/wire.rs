//! Vibrating-wire pickup stretched between diaphragm vertices.
//!
//! A dual-diaphragm wire cell sees the vector sum of both diaphragm
//! tensions, so with equal pressures its frequency is `√(2q)` times that of
//! a single-diaphragm wire. A single wire carries one frequency only: the
//! dual wire cell reports an average-pressure signal and cannot resolve a
//! differential pressure.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireSpec {
    /// Stretched length (m).
    pub length: f64,
    /// Wire mass (kg).
    pub mass: f64,
    /// Alignment factor, slightly below 1 in practice.
    pub q: f64,
    /// Diaphragm area (m²).
    pub diaphragm_area: f64,
}

impl Default for WireSpec {
    fn default() -> Self {
        Self {
            length: 0.05,
            mass: 5e-4,
            q: 0.98,
            diaphragm_area: std::f64::consts::PI * 0.025 * 0.025,
        }
    }
}

impl WireSpec {
    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("length", self.length),
            ("mass", self.mass),
            ("diaphragm_area", self.diaphragm_area),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0 (got {value})")));
            }
        }
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(Error::invalid("q", format!("must lie in (0, 1] (got {})", self.q)));
        }
        Ok(())
    }

    /// Mass per unit length (kg/m).
    pub fn mu(&self) -> f64 {
        self.mass / self.length
    }
}

/// Tension transmitted by a diaphragm of area `area` at pressure `p`.
pub fn tension_from_pressure(p: f64, area: f64) -> f64 {
    p * area
}

/// Fundamental frequency of a wire under tension `tension`.
pub fn wire_frequency(tension: f64, spec: &WireSpec) -> Result<f64> {
    if !(tension > 0.0) {
        return Err(Error::OutOfDomain {
            what: "tension",
            value: tension,
            domain: "(0, inf)".into(),
        });
    }
    spec.validate()?;
    Ok((tension / spec.mu()).sqrt() / (2.0 * spec.length))
}

/// Fundamental frequency of a wire pulled by two diaphragms.
///
/// `q` is taken from `spec` unvalidated so that the degenerate `q = 0`
/// case evaluates to zero.
pub fn dual_wire_frequency(t1: f64, t2: f64, spec: &WireSpec) -> Result<f64> {
    let total = t1 + t2;
    if !(total > 0.0) {
        return Err(Error::OutOfDomain {
            what: "t1 + t2",
            value: total,
            domain: "(0, inf)".into(),
        });
    }
    if !(spec.length > 0.0 && spec.mass > 0.0 && (0.0..=1.0).contains(&spec.q)) {
        return Err(Error::invalid("wire", "length and mass must be > 0, q in [0, 1]"));
    }
    Ok((total * spec.q / spec.mu()).sqrt() / (2.0 * spec.length))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_wire() -> WireSpec {
        WireSpec {
            length: 0.5,
            mass: 0.005,
            q: 1.0,
            diaphragm_area: 1.0,
        }
    }

    #[test]
    fn tension() {
        assert_eq!(tension_from_pressure(0.0, 1.0), 0.0);
        assert_eq!(
            tension_from_pressure(200.0, 0.3),
            2.0 * tension_from_pressure(100.0, 0.3)
        );
        let area = std::f64::consts::PI * 0.025 * 0.025;
        assert_relative_eq!(
            tension_from_pressure(100.0, area),
            0.196_349_540_849_362_1,
            max_relative = 1e-12
        );
    }

    #[test]
    fn single_wire() {
        let spec = unit_wire();
        assert_relative_eq!(wire_frequency(100.0, &spec).unwrap(), 100.0, max_relative = 1e-14);
        assert_relative_eq!(wire_frequency(400.0, &spec).unwrap(), 200.0, max_relative = 1e-14);
        let short = WireSpec {
            length: 0.25,
            mass: 0.0025,
            ..spec
        };
        assert_relative_eq!(wire_frequency(100.0, &short).unwrap(), 200.0, max_relative = 1e-14);
        assert!(wire_frequency(0.0, &spec).is_err());
    }

    #[test]
    fn dual_wire() {
        let spec = unit_wire();
        let single = wire_frequency(100.0, &spec).unwrap();
        assert_relative_eq!(
            dual_wire_frequency(100.0, 100.0, &spec).unwrap(),
            2f64.sqrt() * single,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            dual_wire_frequency(100.0, 0.0, &spec).unwrap(),
            single,
            max_relative = 1e-14
        );
        assert_eq!(
            dual_wire_frequency(1.0, 1.0, &WireSpec { q: 0.0, ..spec }).unwrap(),
            0.0
        );
        assert!(dual_wire_frequency(0.0, 0.0, &spec).is_err());
    }
}
