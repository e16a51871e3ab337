//! First-mode vibration of the strip cantilever and the pressure to
//! free-length mapping of the sliding hinge.

use std::f64::consts::PI;

use crate::calibration::CalibrationTable;
use crate::error::{Error, Result};

/// First clamped-free eigenvalue `β₁·l`.
pub const BETA1_L: f64 = 1.875;
/// `(β₁·l)²`, the frequency coefficient of the first mode.
pub const FREQ_COEFF: f64 = 3.515;
/// Mode-shape weight of the `sinh − sin` term.
pub const MODE_SIGMA: f64 = 0.734;

/// Mechanical parameters of the vibrating strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CantileverSpec {
    /// Elastic modulus of the strip (Pa).
    pub modulus: f64,
    /// Strip width (m).
    pub width: f64,
    /// Strip thickness (m).
    pub thickness: f64,
    /// Total strip length (m).
    pub length: f64,
    /// Material density (kg/m³).
    pub density: f64,
}

impl Default for CantileverSpec {
    /// 0.5 mm × 4 cm strip; width and density are assumed (5 mm, 2700 kg/m³).
    fn default() -> Self {
        Self {
            modulus: 210e9,
            width: 5e-3,
            thickness: 5e-4,
            length: 0.04,
            density: 2700.0,
        }
    }
}

impl CantileverSpec {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("modulus", self.modulus),
            ("width", self.width),
            ("thickness", self.thickness),
            ("length", self.length),
            ("density", self.density),
        ];
        for (field, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0 (got {value})")));
            }
        }
        if self.thickness >= self.length / 10.0 {
            return Err(Error::invalid("thickness", "must be below length/10"));
        }
        Ok(())
    }

    /// Mass per unit length `ρ·b·t` (kg/m).
    pub fn linear_density(&self) -> f64 {
        self.density * self.width * self.thickness
    }
}

/// Area moment of inertia `I = b·t³/12`.
pub fn second_moment(spec: &CantileverSpec) -> Result<f64> {
    spec.validate()?;
    Ok(spec.width * spec.thickness.powi(3) / 12.0)
}

/// First-mode natural frequency (Hz) for a free length `l_free`.
pub fn natural_frequency(spec: &CantileverSpec, l_free: f64) -> Result<f64> {
    let i = second_moment(spec)?;
    if !(l_free > 0.0 && l_free <= spec.length) {
        return Err(Error::OutOfDomain {
            what: "l_free",
            value: l_free,
            domain: format!("(0, {}]", spec.length),
        });
    }
    let omega = FREQ_COEFF / (l_free * l_free) * (spec.modulus * i / spec.linear_density()).sqrt();
    Ok(omega / (2.0 * PI))
}

/// Unnormalized first-mode shape at `βx`.
pub fn mode_function(beta_x: f64) -> f64 {
    beta_x.cosh() - beta_x.cos() - MODE_SIGMA * (beta_x.sinh() - beta_x.sin())
}

/// Vibration envelope at distance `x` from the hinge, scaled so the tip
/// amplitude equals `y_tip`.
pub fn mode_shape(l_free: f64, x: f64, y_tip: f64) -> Result<f64> {
    if !(l_free > 0.0 && l_free.is_finite()) {
        return Err(Error::OutOfDomain {
            what: "l_free",
            value: l_free,
            domain: "(0, inf)".into(),
        });
    }
    if !(0.0..=l_free).contains(&x) {
        return Err(Error::OutOfDomain {
            what: "x",
            value: x,
            domain: format!("[0, {l_free}]"),
        });
    }
    let beta = BETA1_L / l_free;
    Ok(y_tip / mode_function(BETA1_L) * mode_function(beta * x))
}

/// Hinge placement and the calibrated pressure/length range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotGeometry {
    /// Vertex-to-pivot distance at maximum pressure (m).
    pub gap_at_pmax: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Free length at `p_min` (m).
    pub l_min: f64,
    /// Free length at `p_max` (m).
    pub l_max: f64,
}

impl Default for PivotGeometry {
    fn default() -> Self {
        Self {
            gap_at_pmax: 0.005,
            p_min: 100.0,
            p_max: 200.0,
            l_min: 0.025,
            l_max: 0.035,
        }
    }
}

impl PivotGeometry {
    pub fn validate(&self, strip: &CantileverSpec) -> Result<()> {
        if !(self.gap_at_pmax > 0.0) {
            return Err(Error::invalid("gap_at_pmax", "must be > 0"));
        }
        if !(self.p_min < self.p_max) {
            return Err(Error::invalid("p_min", "must be below p_max"));
        }
        if !(self.l_min > 0.0 && self.l_min < self.l_max) {
            return Err(Error::invalid("l_min", "must satisfy 0 < l_min < l_max"));
        }
        if self.l_max > strip.length {
            return Err(Error::invalid("l_max", "must not exceed the strip length"));
        }
        Ok(())
    }
}

/// How the free length is derived from pressure.
pub enum LengthModel<'a> {
    /// Interpolate the (pressure, length) columns of a calibration table.
    Calibrated(&'a CalibrationTable),
    /// The vertex drift slides the strip through the hinge one-to-one.
    Physics(&'a dyn Fn(f64) -> Result<f64>),
}

/// Free strip length beyond the hinge at pressure `p`.
///
/// With `clamp` set, pressures outside `[p_min, p_max]` are pinned to the
/// nearest end instead of failing.
pub fn free_length_from_pressure(geom: &PivotGeometry, model: LengthModel<'_>, p: f64, clamp: bool) -> Result<f64> {
    let (lo, hi) = match &model {
        LengthModel::Calibrated(table) => table.pressure_range(),
        LengthModel::Physics(_) => (geom.p_min, geom.p_max),
    };
    let p = if (lo..=hi).contains(&p) {
        p
    } else if clamp && !p.is_nan() {
        p.clamp(lo, hi)
    } else {
        return Err(Error::OutOfRange {
            what: "pressure",
            value: p,
            lo,
            hi,
        });
    };
    match model {
        LengthModel::Calibrated(table) => table.length_from_pressure(p),
        LengthModel::Physics(drift) => Ok(geom.l_min + (drift(p)? - drift(geom.p_min)?)),
    }
}
