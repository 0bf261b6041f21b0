//! Time forcing `h(t)` of the reaction term.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `h(t)`: continuous and positive on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForcingH {
    /// `h ≡ 1`.
    One,
    /// `h(t) = (1 + t)^q` with `q > -1`; comparable to `t^q` for large `t`.
    PowerLaw { q: f64 },
    /// `h(t) = e^{σt}` with `σ > 0`.
    Exponential { sigma: f64 },
}

impl ForcingH {
    pub fn power_law(q: f64) -> Result<Self> {
        let f = ForcingH::PowerLaw { q };
        f.validate()?;
        Ok(f)
    }

    pub fn exponential(sigma: f64) -> Result<Self> {
        let f = ForcingH::Exponential { sigma };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ForcingH::One => Ok(()),
            ForcingH::PowerLaw { q } if q > -1.0 && q.is_finite() => Ok(()),
            ForcingH::PowerLaw { q } => Err(invalid(format!("power-law exponent must exceed -1, got {q}"))),
            ForcingH::Exponential { sigma } if sigma > 0.0 && sigma.is_finite() => Ok(()),
            ForcingH::Exponential { sigma } => Err(invalid(format!("exponential rate must be positive, got {sigma}"))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ForcingH::One => 1.0,
            ForcingH::PowerLaw { q } => (1.0 + t).powf(q),
            ForcingH::Exponential { sigma } => (sigma * t).exp(),
        }
    }

    /// `H(t) = ∫₀ᵗ h(s) ds`.
    pub fn integral(&self, t: f64) -> f64 {
        match *self {
            ForcingH::One => t,
            ForcingH::PowerLaw { q } => {
                let e = q + 1.0;
                ((1.0 + t).powf(e) - 1.0) / e
            }
            ForcingH::Exponential { sigma } => (sigma * t).exp_m1() / sigma,
        }
    }
}

impl fmt::Display for ForcingH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForcingH::One => write!(f, "h=1"),
            ForcingH::PowerLaw { q } => write!(f, "h=(1+t)^{q}"),
            ForcingH::Exponential { sigma } => write!(f, "h=exp({sigma} t)"),
        }
    }
}
