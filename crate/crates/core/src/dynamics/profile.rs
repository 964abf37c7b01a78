use serde::{Deserialize, Serialize};

use crate::error::argument;
use crate::Result;

/// Scale factor `a(τ)` in conformal time, flat at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ScaleFactorProfile {
    /// `a(τ) = a0`.
    Constant { a0: f64 },
    /// `a²(τ) = 1 + ε (1 + tanh(ρ τ))`, from `a = 1` to `a = sqrt(1 + 2ε)`.
    Tanh { epsilon: f64, rho: f64 },
}

/// `1 - tanh(x)` without cancellation for large `x`.
fn one_minus_tanh(x: f64) -> f64 {
    2.0 / (1.0 + (2.0 * x).exp())
}

impl ScaleFactorProfile {
    pub fn constant(a0: f64) -> Result<Self> {
        let p = ScaleFactorProfile::Constant { a0 };
        p.validate()?;
        Ok(p)
    }

    pub fn tanh(epsilon: f64, rho: f64) -> Result<Self> {
        let p = ScaleFactorProfile::Tanh { epsilon, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScaleFactorProfile::Constant { a0 } if !(a0 > 0.0 && a0.is_finite()) => {
                argument(format!("constant scale factor must be positive, got {a0}"))
            }
            ScaleFactorProfile::Tanh { epsilon, rho }
                if !(epsilon > 0.0 && epsilon.is_finite() && rho > 0.0 && rho.is_finite()) =>
            {
                argument(format!("tanh profile needs epsilon > 0 and rho > 0, got ({epsilon}, {rho})"))
            }
            _ => Ok(()),
        }
    }

    pub fn a_squared(&self, tau: f64) -> f64 {
        match *self {
            ScaleFactorProfile::Constant { a0 } => a0 * a0,
            ScaleFactorProfile::Tanh { epsilon, rho } => 1.0 + epsilon * (1.0 + (rho * tau).tanh()),
        }
    }

    pub fn a(&self, tau: f64) -> f64 {
        self.a_squared(tau).sqrt()
    }

    /// `da/dτ`.
    pub fn a_dot(&self, tau: f64) -> f64 {
        match *self {
            ScaleFactorProfile::Constant { .. } => 0.0,
            ScaleFactorProfile::Tanh { epsilon, rho } => {
                let sech = 1.0 / (rho * tau).cosh();
                epsilon * rho * sech * sech / (2.0 * self.a(tau))
            }
        }
    }

    /// `a(-∞)`.
    pub fn a_in(&self) -> f64 {
        match *self {
            ScaleFactorProfile::Constant { a0 } => a0,
            ScaleFactorProfile::Tanh { .. } => 1.0,
        }
    }

    /// `a(+∞)`.
    pub fn a_out(&self) -> f64 {
        match *self {
            ScaleFactorProfile::Constant { a0 } => a0,
            ScaleFactorProfile::Tanh { epsilon, .. } => (1.0 + 2.0 * epsilon).sqrt(),
        }
    }

    /// Distance of `a²` from its asymptote on the side of `τ`:
    /// `ε (1 + tanh ρτ)` for `τ < 0`, `ε (1 - tanh ρτ)` for `τ >= 0`.
    pub fn asymptotic_deviation(&self, tau: f64) -> f64 {
        match *self {
            ScaleFactorProfile::Constant { .. } => 0.0,
            ScaleFactorProfile::Tanh { epsilon, rho } => epsilon * one_minus_tanh(rho * tau.abs()),
        }
    }

    /// Smallest `T >= 0` with `asymptotic_deviation(±τ) < tol` for `|τ| >= T`.
    pub fn asymptotic_time(&self, tol: f64) -> f64 {
        match *self {
            ScaleFactorProfile::Constant { .. } => 0.0,
            // ε·2/(1 + e^{2ρT}) < tol  <=>  e^{2ρT} > 2ε/tol - 1
            ScaleFactorProfile::Tanh { epsilon, rho } => {
                let arg = 2.0 * epsilon / tol - 1.0;
                if arg <= 1.0 {
                    0.0
                } else {
                    arg.ln() / (2.0 * rho)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_limits() {
        let p = ScaleFactorProfile::tanh(1.0, 1.0).unwrap();
        assert!((p.a(-50.0) - 1.0).abs() < 1e-15);
        assert!((p.a(50.0) - 3f64.sqrt()).abs() < 1e-15);
        assert!((p.a_squared(0.0) - 2.0).abs() < 1e-15);
        assert_eq!(p.a_out(), 3f64.sqrt());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = ScaleFactorProfile::tanh(0.7, 1.3).unwrap();
        for tau in [-2.0, -0.3, 0.0, 0.5, 1.7] {
            let h = 1e-5;
            let fd = (p.a(tau + h) - p.a(tau - h)) / (2.0 * h);
            assert!((fd - p.a_dot(tau)).abs() < 1e-9);
        }
    }

    #[test]
    fn asymptotic_time_bounds_deviation() {
        let p = ScaleFactorProfile::tanh(1.0, 0.5).unwrap();
        for tol in [1e-6, 1e-10] {
            let t = p.asymptotic_time(tol);
            assert!(p.asymptotic_deviation(t) <= tol * (1.0 + 1e-9));
            assert!(p.asymptotic_deviation(-t) <= tol * (1.0 + 1e-9));
            assert!(p.asymptotic_deviation(0.9 * t) > tol);
        }
        assert_eq!(ScaleFactorProfile::constant(2.0).unwrap().asymptotic_time(1e-9), 0.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(ScaleFactorProfile::constant(0.0).is_err());
        assert!(ScaleFactorProfile::tanh(-1.0, 1.0).is_err());
        assert!(ScaleFactorProfile::tanh(1.0, 0.0).is_err());
    }
}
