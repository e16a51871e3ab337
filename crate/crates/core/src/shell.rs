//! Shallow spherical shell diaphragm under uniform pressure.
//!
//! The pressure-induced vertex deflection `f` is the real root of the
//! depressed cubic `f³ + α·f = η`, where `α` depends only on thickness and
//! Poisson ratio and `η` is proportional to the applied pressure. The
//! deflected surface follows `w(r) = f·(1 − (r/ra)²)²`.

use crate::error::{Error, Result};

/// Geometry and elastic constants of one diaphragm. SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiaphragmSpec {
    /// Rim radius (m).
    pub ra: f64,
    /// Plate thickness (m).
    pub h: f64,
    /// Unloaded shell height at the vertex (m).
    pub f0: f64,
    /// Young's modulus (Pa).
    pub youngs_modulus: f64,
    /// Poisson ratio.
    pub nu: f64,
}

impl Default for DiaphragmSpec {
    /// The prototype diaphragm: 2.5 cm radius, 1.0 mm thick, 0.5 cm rise,
    /// E = 210 GN/m², ν = 0.3.
    fn default() -> Self {
        Self {
            ra: 0.025,
            h: 1.0e-3,
            f0: 0.005,
            youngs_modulus: 210e9,
            nu: 0.3,
        }
    }
}

impl DiaphragmSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [("ra", self.ra), ("h", self.h), ("youngs_modulus", self.youngs_modulus)];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0 (got {value})")));
            }
        }
        if !(self.f0.is_finite() && self.f0 >= 0.0) {
            return Err(Error::invalid("f0", format!("must be >= 0 (got {})", self.f0)));
        }
        if !(self.nu > 0.0 && self.nu < 0.5) {
            return Err(Error::invalid("nu", format!("must lie in (0, 0.5) (got {})", self.nu)));
        }
        Ok(())
    }

    /// True when the plate is too thick for thin-plate theory (h/ra > 0.1).
    /// This is a warning condition; solutions are still computed.
    pub fn thin_plate_warning(&self) -> bool {
        self.h / self.ra > 0.1
    }

    fn poisson_factor(&self) -> f64 {
        (1.0 + self.nu) * (23.0 - 9.0 * self.nu)
    }

    /// Linear coefficient `α` of the deflection cubic (m²).
    pub fn alpha(&self) -> f64 {
        56.0 * self.h * self.h / self.poisson_factor()
    }

    /// Constant term `η` of the deflection cubic at pressure `p` (m³).
    pub fn eta(&self, p: f64) -> Result<f64> {
        let d = flexural_rigidity(self)?;
        let eta = 7.0 * p * self.ra.powi(4) * self.h * self.h / (8.0 * d * self.poisson_factor());
        if !eta.is_finite() {
            return Err(Error::NumericOverflow("eta"));
        }
        Ok(eta)
    }
}

/// Intermediate and final quantities of one deflection solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellSolution {
    /// Flexural rigidity (N·m).
    pub d: f64,
    pub alpha: f64,
    pub eta: f64,
    /// Cardano auxiliary `A` (m).
    pub a_aux: f64,
    /// Pressure-induced vertex deflection (m).
    pub f: f64,
    /// Applied pressure (Pa).
    pub p: f64,
}

impl ShellSolution {
    /// `|f³ + α·f − η|`.
    pub fn residual(&self) -> f64 {
        (self.f.powi(3) + self.alpha * self.f - self.eta).abs()
    }
}

/// `D = E·h³ / (12·(1 − ν²))`.
pub fn flexural_rigidity(spec: &DiaphragmSpec) -> Result<f64> {
    spec.validate()?;
    Ok(spec.youngs_modulus * spec.h.powi(3) / (12.0 * (1.0 - spec.nu * spec.nu)))
}

/// Real root of `f³ + α·f = η` for `α ≥ 0`, `η ≥ 0`.
///
/// Returns `(A, f)`. With `u = A` and `v = α/(3A)` the Cardano root is
/// `u − v`; since `u³ − v³ = η` and `u·v = α/3` it is evaluated as
/// `η / (u² + α/3 + v²)`, which has no cancellation when `η ≪ α^{3/2}`.
pub fn solve_depressed_cubic(alpha: f64, eta: f64) -> Result<(f64, f64)> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::OutOfDomain {
            what: "alpha",
            value: alpha,
            domain: "[0, inf)".into(),
        });
    }
    if !(eta >= 0.0) {
        return Err(Error::OutOfDomain {
            what: "eta",
            value: eta,
            domain: "[0, inf)".into(),
        });
    }
    if !eta.is_finite() {
        return Err(Error::NumericOverflow("eta"));
    }

    // sqrt(α³/27 + η²/4) without forming the cubes.
    let root_term = (alpha / 3.0).powf(1.5).hypot(eta / 2.0);
    let a_aux = (eta / 2.0 + root_term).cbrt();
    if !a_aux.is_finite() {
        return Err(Error::NumericOverflow("cardano auxiliary"));
    }
    if eta == 0.0 {
        return Ok((a_aux, 0.0));
    }
    if a_aux == 0.0 {
        // α³/27 + η²/4 underflowed: linearized small-deflection limit.
        return Ok((a_aux, eta / alpha));
    }
    let v = alpha / (3.0 * a_aux);
    let f = eta / (a_aux * a_aux + alpha / 3.0 + v * v);
    if !f.is_finite() {
        return Err(Error::NumericOverflow("vertex deflection"));
    }
    Ok((a_aux, f))
}

/// Vertex deflection and intermediates for pressure `p`.
pub fn solve_vertex_height(spec: &DiaphragmSpec, p: f64) -> Result<ShellSolution> {
    spec.validate()?;
    if !(p >= 0.0) {
        return Err(Error::OutOfDomain {
            what: "pressure",
            value: p,
            domain: "[0, inf)".into(),
        });
    }
    let d = flexural_rigidity(spec)?;
    let alpha = spec.alpha();
    let eta = spec.eta(p)?;
    let (a_aux, f) = solve_depressed_cubic(alpha, eta)?;
    Ok(ShellSolution {
        d,
        alpha,
        eta,
        a_aux,
        f,
        p,
    })
}

/// Deflection at radial distance `r` from the vertex.
pub fn shell_profile(sol: &ShellSolution, spec: &DiaphragmSpec, r: f64) -> Result<f64> {
    if !(0.0..=spec.ra).contains(&r) {
        return Err(Error::OutOfDomain {
            what: "r",
            value: r,
            domain: format!("[0, {}]", spec.ra),
        });
    }
    let s = 1.0 - (r / spec.ra).powi(2);
    Ok(sol.f * s * s)
}

/// Vertex displacement relative to the unloaded diaphragm.
pub fn vertex_drift(spec: &DiaphragmSpec, p: f64) -> Result<f64> {
    Ok(solve_vertex_height(spec, p)?.f)
}
