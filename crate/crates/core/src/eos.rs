//! Barotropic equations of state for the two phases.
//!
//! Both closures share the form `p(rho) = kappa (rho / rho0)^gamma - p_inf`;
//! the ideal gas is the special case `p_inf = 0`. Alongside the direct
//! evaluations this module provides the split of pressure and enthalpy into
//! a part linear in the density about a frozen [`ReferenceState`] (the "hat"
//! part, treated implicitly by the scheme) and the nonlinear remainder (the
//! "bar" part, treated explicitly).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EosError {
    #[error("density must be positive and finite, got {0}")]
    NonPositiveDensity(f64),
    #[error("invalid equation of state parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("pressure {0} is not attainable by this equation of state")]
    UnattainablePressure(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EosKind {
    IdealGas,
    StiffenedGas,
}

/// Parameters of one phase's equation of state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseEos {
    pub kind: EosKind,
    pub gamma: f64,
    pub kappa: f64,
    #[serde(default = "default_rho0")]
    pub rho0: f64,
    #[serde(default)]
    pub p_inf: f64,
}

fn default_rho0() -> f64 {
    1.0
}

#[inline]
fn check_density(rho: f64) -> Result<(), EosError> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(EosError::NonPositiveDensity(rho))
    }
}

impl PhaseEos {
    pub fn ideal_gas(gamma: f64, kappa: f64) -> Self {
        Self {
            kind: EosKind::IdealGas,
            gamma,
            kappa,
            rho0: 1.0,
            p_inf: 0.0,
        }
    }

    pub fn stiffened_gas(gamma: f64, kappa: f64, p_inf: f64) -> Self {
        Self {
            kind: EosKind::StiffenedGas,
            gamma,
            kappa,
            rho0: 1.0,
            p_inf,
        }
    }

    pub fn with_rho0(mut self, rho0: f64) -> Self {
        self.rho0 = rho0;
        self
    }

    /// Checks the parameter ranges. An ideal gas must carry `p_inf = 0`.
    pub fn validate(&self) -> Result<(), EosError> {
        let bad = |name, value| Err(EosError::InvalidParameter { name, value });
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return bad("gamma", self.gamma);
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad("kappa", self.kappa);
        }
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return bad("rho0", self.rho0);
        }
        match self.kind {
            EosKind::IdealGas if self.p_inf != 0.0 => bad("p_inf", self.p_inf),
            EosKind::StiffenedGas if !(self.p_inf >= 0.0 && self.p_inf.is_finite()) => {
                bad("p_inf", self.p_inf)
            }
            _ => Ok(()),
        }
    }

    #[inline]
    fn p_inf(&self) -> f64 {
        match self.kind {
            EosKind::IdealGas => 0.0,
            EosKind::StiffenedGas => self.p_inf,
        }
    }

    /// `kappa (rho / rho0)^gamma`, the pressure without the stiffening shift.
    #[inline]
    fn power_term(&self, rho: f64) -> f64 {
        self.kappa * (rho / self.rho0).powf(self.gamma)
    }

    pub fn pressure(&self, rho: f64) -> Result<f64, EosError> {
        check_density(rho)?;
        Ok(self.power_term(rho) - self.p_inf())
    }

    /// Squared sound speed `dp/drho = gamma (p + p_inf) / rho`.
    pub fn sound_speed_sq(&self, rho: f64) -> Result<f64, EosError> {
        check_density(rho)?;
        Ok(self.gamma * self.power_term(rho) / rho)
    }

    pub fn internal_energy(&self, rho: f64) -> Result<f64, EosError> {
        let p = self.pressure(rho)?;
        Ok((p + self.gamma * self.p_inf()) / (rho * (self.gamma - 1.0)))
    }

    /// Specific enthalpy `h = e + p / rho`.
    pub fn enthalpy(&self, rho: f64) -> Result<f64, EosError> {
        let p = self.pressure(rho)?;
        Ok(self.internal_energy(rho)? + p / rho)
    }

    /// Pressure, enthalpy and squared sound speed from a single power evaluation.
    #[inline]
    pub fn evaluate(&self, rho: f64) -> Result<EosPoint, EosError> {
        check_density(rho)?;
        let pow = self.power_term(rho);
        let p_inf = self.p_inf();
        let p = pow - p_inf;
        let gm1 = self.gamma - 1.0;
        Ok(EosPoint {
            pressure: p,
            enthalpy: (p + self.gamma * p_inf) / (rho * gm1) + p / rho,
            sound_speed_sq: self.gamma * pow / rho,
        })
    }

    /// Inverse of [`pressure`](Self::pressure).
    pub fn density_at_pressure(&self, p: f64) -> Result<f64, EosError> {
        let shifted = (p + self.p_inf()) / self.kappa;
        if !(shifted > 0.0 && shifted.is_finite()) {
            return Err(EosError::UnattainablePressure(p));
        }
        Ok(self.rho0 * shifted.powf(1.0 / self.gamma))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosPoint {
    pub pressure: f64,
    pub enthalpy: f64,
    pub sound_speed_sq: f64,
}

/// Linearization anchor of one phase, frozen for a whole run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceState {
    pub rho_rs: f64,
    pub p_rs: f64,
    pub h_rs: f64,
    pub c2_rs: f64,
    /// `p_rs - rho_rs * c2_rs`, the constant part of the linear pressure.
    pub eta_rs: f64,
}

impl ReferenceState {
    pub fn new(eos: &PhaseEos, rho_rs: f64) -> Result<Self, EosError> {
        let pt = eos.evaluate(rho_rs)?;
        Ok(Self {
            rho_rs,
            p_rs: pt.pressure,
            h_rs: pt.enthalpy,
            c2_rs: pt.sound_speed_sq,
            eta_rs: pt.pressure - rho_rs * pt.sound_speed_sq,
        })
    }

    /// `p_rs + c2_rs (rho - rho_rs)`; defined for every real `rho`.
    #[inline]
    pub fn linear_pressure(&self, rho: f64) -> f64 {
        self.p_rs + self.c2_rs * (rho - self.rho_rs)
    }

    /// `h_rs + c2_rs / rho_rs (rho - rho_rs)`.
    #[inline]
    pub fn linear_enthalpy(&self, rho: f64) -> f64 {
        self.h_rs + self.c2_rs / self.rho_rs * (rho - self.rho_rs)
    }
}

/// Returns `(p_hat, p_bar)` with `p_hat + p_bar = p(rho)`.
pub fn split_pressure(
    eos: &PhaseEos,
    rs: &ReferenceState,
    rho: f64,
) -> Result<(f64, f64), EosError> {
    let p = eos.pressure(rho)?;
    let p_hat = rs.linear_pressure(rho);
    Ok((p_hat, p - p_hat))
}

/// Returns `(h_hat, h_bar)` with `h_hat + h_bar = h(rho)`.
pub fn split_enthalpy(
    eos: &PhaseEos,
    rs: &ReferenceState,
    rho: f64,
) -> Result<(f64, f64), EosError> {
    let h = eos.enthalpy(rho)?;
    let h_hat = rs.linear_enthalpy(rho);
    Ok((h_hat, h - h_hat))
}
