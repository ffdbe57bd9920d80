//! Physical and empirical parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Constant linear-friction coefficient adopted by the structural analyses on
/// the suspended-rest manifold when no constant `mu` is configured. The
/// verdicts there (block invertibility, determinant sign) depend only on the
/// coefficient being positive.
pub const DEFAULT_ANALYSIS_MU: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("invalid parameter `{field}`: {reason}")]
pub struct ParameterError {
    pub field: &'static str,
    pub reason: &'static str,
}

/// All physical and empirical constants of the model.
///
/// The defaults carry the relaxation-experiment friction and moment-viscosity
/// values together with standard literature values for the sediment
/// constants; every field is overridable through the JSON configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Gravity [m/s^2].
    pub g: f64,
    /// Water density [kg/m^3].
    pub rho_w: f64,
    /// Sediment density [kg/m^3].
    pub rho_s: f64,
    /// Grain diameter [m].
    pub d_s: f64,
    /// Geometric mean grain size of the suspended mixture [m].
    pub d_sg: f64,
    /// Kinematic viscosity of water [m^2/s].
    pub nu_w: f64,
    /// Manning-type quadratic bottom-friction coefficient [-].
    pub epsilon: f64,
    /// Constant linear-friction coefficient for the fast source split.
    /// `None` means the linearization `mu = epsilon * |u_b|` is evaluated per
    /// call, which makes the fast+slow split reduce to the full source.
    pub mu: Option<f64>,
    /// Moment relaxation viscosity [m^2/s].
    pub nu: f64,
    /// Bed porosity [-].
    pub psi: f64,
    /// Critical Shields number [-].
    pub theta_c: f64,
    /// Bed drag coefficient [-].
    pub c_d: f64,
    /// Fast-slow scale parameter in `S_fast + delta * S_slow` [-].
    pub delta: f64,
    /// Dry-state floor for the water height [m].
    pub h_min: f64,
}

impl Default for Parameters {
    fn default() -> Self {
        Self {
            g: 9.81,
            rho_w: 1000.0,
            rho_s: 2650.0,
            d_s: 1e-3,
            d_sg: 1e-3,
            nu_w: 1e-6,
            epsilon: 15.0,
            mu: None,
            nu: 10.0,
            psi: 0.4,
            theta_c: 0.047,
            c_d: 0.01,
            delta: 1.0,
            h_min: 1e-8,
        }
    }
}

impl Parameters {
    pub fn validate(&self) -> Result<(), ParameterError> {
        fn check(cond: bool, field: &'static str, reason: &'static str) -> Result<(), ParameterError> {
            if cond {
                Ok(())
            } else {
                Err(ParameterError { field, reason })
            }
        }
        check(self.g > 0.0 && self.g.is_finite(), "g", "must be positive")?;
        check(self.rho_w > 0.0 && self.rho_w.is_finite(), "rho_w", "must be positive")?;
        check(
            self.rho_s > self.rho_w && self.rho_s.is_finite(),
            "rho_s",
            "must exceed rho_w",
        )?;
        check(self.d_s > 0.0 && self.d_s.is_finite(), "d_s", "must be positive")?;
        check(self.d_sg > 0.0 && self.d_sg.is_finite(), "d_sg", "must be positive")?;
        check(self.nu_w > 0.0 && self.nu_w.is_finite(), "nu_w", "must be positive")?;
        check(
            self.epsilon >= 0.0 && self.epsilon.is_finite(),
            "epsilon",
            "must be non-negative",
        )?;
        if let Some(mu) = self.mu {
            check(mu > 0.0 && mu.is_finite(), "mu", "must be positive when set")?;
        }
        check(self.nu >= 0.0 && self.nu.is_finite(), "nu", "must be non-negative")?;
        check(
            (0.0..1.0).contains(&self.psi),
            "psi",
            "must lie in [0, 1)",
        )?;
        check(
            self.theta_c >= 0.0 && self.theta_c.is_finite(),
            "theta_c",
            "must be non-negative",
        )?;
        check(self.c_d >= 0.0 && self.c_d.is_finite(), "c_d", "must be non-negative")?;
        check(
            self.delta > 0.0 && self.delta <= 1.0,
            "delta",
            "must lie in (0, 1]",
        )?;
        check(self.h_min > 0.0 && self.h_min.is_finite(), "h_min", "must be positive")?;
        Ok(())
    }

    /// Effective linear-friction coefficient at a given bottom velocity.
    pub fn mu_eff(&self, u_b: f64) -> f64 {
        self.mu.unwrap_or(self.epsilon * u_b.abs())
    }

    /// Constant friction coefficient used by the structural analyses.
    pub fn mu_for_analysis(&self) -> f64 {
        self.mu.unwrap_or(DEFAULT_ANALYSIS_MU)
    }

    pub fn one_minus_psi(&self) -> f64 {
        1.0 - self.psi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Parameters::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range_values() {
        let mut p = Parameters::default();
        p.nu = -1.0;
        let err = p.validate().unwrap_err();
        assert_eq!(err.field, "nu");

        let mut p = Parameters::default();
        p.rho_s = 500.0;
        assert_eq!(p.validate().unwrap_err().field, "rho_s");

        let mut p = Parameters::default();
        p.psi = 1.0;
        assert_eq!(p.validate().unwrap_err().field, "psi");

        let mut p = Parameters::default();
        p.delta = 0.0;
        assert_eq!(p.validate().unwrap_err().field, "delta");
    }

    #[test]
    fn mu_eff_linearizes_quadratic_friction() {
        let p = Parameters::default();
        assert_eq!(p.mu_eff(0.5), 15.0 * 0.5);
        assert_eq!(p.mu_eff(-0.5), 15.0 * 0.5);
        let mut fixed = p;
        fixed.mu = Some(2.0);
        assert_eq!(fixed.mu_eff(-0.5), 2.0);
    }
}
