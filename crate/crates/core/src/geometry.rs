//! Jacobi coordinates and the mass-scaling reduction to standard form.
//!
//! Two identical heavy nuclei A, B at `x_A`, `x_B` and one light nucleus C at
//! `x_C`, all on a line. Internal coordinates are the heavy-heavy separation
//! `W = x_B - x_A` and the light-nucleus offset from the heavy midpoint
//! `Z = x_C - (x_A + x_B)/2`. Heavy masses scale as `epsilon^-4 mu`, the
//! light one as `epsilon^-3 nu`; rescaling W and Z brings the kinetic terms
//! to the standard `(mu, nu) = (2, 1)` form and transforms the fitted
//! potential coefficients by closed-form power laws.

use crate::error::{Error, Result};
use crate::surface::NormalFormCoefficients;

/// Positions and masses of the three collinear nuclei, in atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuclearConfiguration {
    pub x_a: f64,
    pub x_b: f64,
    pub x_c: f64,
    pub m_a: f64,
    pub m_b: f64,
    pub m_c: f64,
}

impl NuclearConfiguration {
    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("m_a", self.m_a), ("m_b", self.m_b), ("m_c", self.m_c)] {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {m}")));
            }
        }
        let asym = (self.m_a - self.m_b).abs() / self.m_a.max(self.m_b);
        if asym > 1e-12 {
            return Err(Error::invalid(format!(
                "heavy masses must be identical (symmetric case): relative difference {asym:e}"
            )));
        }
        if ![self.x_a, self.x_b, self.x_c].iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("positions must be finite"));
        }
        Ok(())
    }
}

/// Internal-coordinate frame with its mass parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiFrame {
    /// Three-body center of mass.
    pub r: f64,
    /// Heavy-heavy separation `x_B - x_A`.
    pub w: f64,
    /// Light-nucleus offset from the heavy midpoint.
    pub z: f64,
    pub mu: f64,
    pub nu: f64,
    pub epsilon: f64,
}

impl JacobiFrame {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.nu > 0.0) {
            return Err(Error::invalid("mu and nu must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.w.is_finite() && self.z.is_finite()) {
            return Err(Error::invalid("W and Z must be finite"));
        }
        Ok(())
    }
}

/// Center of mass and internal coordinates from Cartesian positions.
pub fn jacobi_from_cartesian(c: &NuclearConfiguration) -> Result<(f64, f64, f64)> {
    c.validate()?;
    let total = c.m_a + c.m_b + c.m_c;
    let r = (c.m_a * c.x_a + c.m_b * c.x_b + c.m_c * c.x_c) / total;
    let w = c.x_b - c.x_a;
    let z = c.x_c - 0.5 * (c.x_a + c.x_b);
    Ok((r, w, z))
}

/// Inverse of [`jacobi_from_cartesian`] for given masses.
pub fn cartesian_from_jacobi(
    r: f64,
    w: f64,
    z: f64,
    m_a: f64,
    m_b: f64,
    m_c: f64,
) -> (f64, f64, f64) {
    let total = m_a + m_b + m_c;
    // midpoint of the heavy pair from R = x_ab + (m_c/M) Z (equal heavy masses)
    let x_ab = r - m_c * z / total;
    let x_a = x_ab - 0.5 * w;
    let x_b = x_ab + 0.5 * w;
    let x_c = x_ab + z;
    (x_a, x_b, x_c)
}

/// Dimensionless mass parameters `(mu, nu) = (m_A eps^4, m_C eps^3)`.
pub fn mass_parameters(m_a: f64, m_c: f64, epsilon: f64) -> Result<(f64, f64)> {
    if !(m_a > 0.0 && m_c > 0.0) {
        return Err(Error::invalid("masses must be positive"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("epsilon must lie in (0, 1)"));
    }
    let e2 = epsilon * epsilon;
    Ok((m_a * e2 * e2, m_c * e2 * epsilon))
}

/// Rescale fitted coefficients (atomic units, physical Jacobi coordinates,
/// masses `mu`, `nu`) to the standard form with `mu = 2`, `nu = 1`.
///
/// The substitutions `W = sqrt(2/mu) W'`, `Z = sqrt(1/nu) Z'` turn the kinetic
/// terms into `-(eps^4/2) d^2/dW'^2 - (eps^3/2) d^2/dZ'^2` and act on the
/// potential coefficients as closed-form power laws; acting on coefficients
/// analytically avoids compounding surface-fit error.
pub fn rescale_coefficients_to_standard_form(
    raw: &NormalFormCoefficients,
    mu: f64,
    nu: f64,
) -> Result<NormalFormCoefficients> {
    if !(mu > 0.0 && nu > 0.0) {
        return Err(Error::invalid(format!(
            "mu and nu must be positive, got mu = {mu}, nu = {nu}"
        )));
    }
    let sw = (2.0 / mu).sqrt();
    Ok(NormalFormCoefficients {
        e0: raw.e0,
        w0: raw.w0 / sw,
        a1: raw.a1 * (2.0 / mu),
        a2: raw.a2 / nu,
        a3: raw.a3 * sw / nu,
        a4: raw.a4 / (nu * nu),
        epsilon_convention: raw.epsilon_convention,
    })
}

/// Magnitude of the neglected `eps nu / (2 mu)` kinetic cross correction,
/// recorded for transparency in the expansion report.
pub fn dropped_kinetic_factor(epsilon: f64, mu: f64, nu: f64) -> f64 {
    epsilon * nu / (2.0 * mu)
}
