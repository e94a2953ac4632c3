//! Variable sets, closures, fluxes, sources and wave speeds of the
//! nondimensional isentropic two-phase model.
//!
//! The evolved vector is `W = (rho, alpha rho, alpha rho1, rho u, u1 - u2)`.
//! Mixture variables `Q = (alpha, rho, chi, u, u1 - u2)` and phase variables
//! `V = (alpha, rho1, u1, rho2, u2)` are derived from it. Density scalings
//! enter through `rho = alpha varrho1 rho1 + (1 - alpha) varrho2 rho2` and
//! `chi = varrho1 alpha rho1 / rho`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::eos::{EosError, PhaseEos, ReferenceState};

/// Open-interval margin for volume and mass fractions.
pub const FRACTION_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum StateError {
    #[error("mixture density must be positive, got {0}")]
    NonPositiveMixtureDensity(f64),
    #[error("volume fraction {0} outside (0, 1)")]
    VolumeFraction(f64),
    #[error("mass fraction {0} outside (0, 1)")]
    MassFraction(f64),
    #[error("phase {phase} density must be positive, got {value}")]
    NonPositivePhaseDensity { phase: u8, value: f64 },
    #[error("non-finite state component")]
    NonFinite,
    #[error(transparent)]
    Eos(#[from] EosError),
}

/// Cell state `W`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateVec {
    pub rho: f64,
    pub alpha_rho: f64,
    pub alpha_rho1: f64,
    pub mom: f64,
    pub w_rel: f64,
}

impl StateVec {
    pub const fn from_array(a: [f64; 5]) -> Self {
        Self {
            rho: a[0],
            alpha_rho: a[1],
            alpha_rho1: a[2],
            mom: a[3],
            w_rel: a[4],
        }
    }

    pub const fn to_array(self) -> [f64; 5] {
        [self.rho, self.alpha_rho, self.alpha_rho1, self.mom, self.w_rel]
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha_rho / self.rho
    }

    #[inline]
    pub fn velocity(&self) -> f64 {
        self.mom / self.rho
    }

    #[inline]
    pub fn mass_fraction(&self, s: &ScalingParams) -> f64 {
        s.varrho1 * self.alpha_rho1 / self.rho
    }

    /// Mixture variables `Q`.
    pub fn to_mix(&self, s: &ScalingParams) -> Result<MixVec, StateError> {
        if !self.to_array().iter().all(|c| c.is_finite()) {
            return Err(StateError::NonFinite);
        }
        if self.rho <= 0.0 {
            return Err(StateError::NonPositiveMixtureDensity(self.rho));
        }
        let q = MixVec {
            alpha: self.alpha(),
            rho: self.rho,
            chi: self.mass_fraction(s),
            u: self.velocity(),
            w_rel: self.w_rel,
        };
        q.check()?;
        Ok(q)
    }

    /// Phase variables `V`.
    pub fn to_phase(&self, s: &ScalingParams) -> Result<PhaseVec, StateError> {
        let q = self.to_mix(s)?;
        let v = PhaseVec {
            alpha: q.alpha,
            rho1: self.alpha_rho1 / q.alpha,
            u1: q.u + (1.0 - q.chi) * q.w_rel,
            rho2: (self.rho - s.varrho1 * self.alpha_rho1) / (s.varrho2 * (1.0 - q.alpha)),
            u2: q.u - q.chi * q.w_rel,
        };
        v.check_densities()?;
        Ok(v)
    }
}

/// Mixture variables `Q = (alpha, rho, chi, u, u1 - u2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixVec {
    pub alpha: f64,
    pub rho: f64,
    pub chi: f64,
    pub u: f64,
    pub w_rel: f64,
}

impl MixVec {
    fn check(&self) -> Result<(), StateError> {
        check_fraction(self.alpha).map_err(StateError::VolumeFraction)?;
        check_fraction(self.chi).map_err(StateError::MassFraction)?;
        Ok(())
    }

    pub fn to_state(&self, s: &ScalingParams) -> Result<StateVec, StateError> {
        self.check()?;
        if self.rho <= 0.0 {
            return Err(StateError::NonPositiveMixtureDensity(self.rho));
        }
        Ok(StateVec {
            rho: self.rho,
            alpha_rho: self.alpha * self.rho,
            alpha_rho1: self.chi * self.rho / s.varrho1,
            mom: self.rho * self.u,
            w_rel: self.w_rel,
        })
    }
}

fn check_fraction(x: f64) -> Result<(), f64> {
    if x > FRACTION_EPS && x < 1.0 - FRACTION_EPS {
        Ok(())
    } else {
        Err(x)
    }
}

/// Phase variables `V = (alpha, rho1, u1, rho2, u2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseVec {
    pub alpha: f64,
    pub rho1: f64,
    pub u1: f64,
    pub rho2: f64,
    pub u2: f64,
}

impl PhaseVec {
    fn check_densities(&self) -> Result<(), StateError> {
        if !(self.rho1 > 0.0) {
            return Err(StateError::NonPositivePhaseDensity { phase: 1, value: self.rho1 });
        }
        if !(self.rho2 > 0.0) {
            return Err(StateError::NonPositivePhaseDensity { phase: 2, value: self.rho2 });
        }
        Ok(())
    }

    pub fn to_state(&self, s: &ScalingParams) -> Result<StateVec, StateError> {
        check_fraction(self.alpha).map_err(StateError::VolumeFraction)?;
        self.check_densities()?;
        let m1 = self.alpha * s.varrho1 * self.rho1;
        let rho = m1 + (1.0 - self.alpha) * s.varrho2 * self.rho2;
        let chi = m1 / rho;
        let u = chi * self.u1 + (1.0 - chi) * self.u2;
        Ok(StateVec {
            rho,
            alpha_rho: self.alpha * rho,
            alpha_rho1: self.alpha * self.rho1,
            mom: rho * u,
            w_rel: self.u1 - self.u2,
        })
    }

    /// Mixture velocity `chi u1 + (1 - chi) u2`.
    pub fn mixture_velocity(&self, s: &ScalingParams) -> f64 {
        let m1 = self.alpha * s.varrho1 * self.rho1;
        let rho = m1 + (1.0 - self.alpha) * s.varrho2 * self.rho2;
        let chi = m1 / rho;
        chi * self.u1 + (1.0 - chi) * self.u2
    }
}

/// Phase Mach numbers and density scalings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingParams {
    pub m1: f64,
    pub m2: f64,
    #[serde(default = "one")]
    pub varrho1: f64,
    #[serde(default = "one")]
    pub varrho2: f64,
}

fn one() -> f64 {
    1.0
}

impl ScalingParams {
    pub fn new(m1: f64, m2: f64) -> Self {
        Self {
            m1,
            m2,
            varrho1: 1.0,
            varrho2: 1.0,
        }
    }

    pub fn same_mach(m: f64) -> Self {
        Self::new(m, m)
    }

    pub fn is_valid(&self) -> bool {
        [self.m1, self.m2, self.varrho1, self.varrho2]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
    }

    #[inline]
    pub fn inv_m1_sq(&self) -> f64 {
        1.0 / (self.m1 * self.m1)
    }

    #[inline]
    pub fn inv_m2_sq(&self) -> f64 {
        1.0 / (self.m2 * self.m2)
    }
}

/// Pressure relaxation time; `Infinite` switches the relaxation off.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RelaxationTime {
    #[default]
    Infinite,
    Finite(f64),
}

impl RelaxationTime {
    pub fn rate(&self) -> f64 {
        match self {
            Self::Infinite => 0.0,
            Self::Finite(tau) => 1.0 / tau,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }
}

impl Serialize for RelaxationTime {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Infinite => ser.serialize_str("inf"),
            Self::Finite(tau) => ser.serialize_f64(*tau),
        }
    }
}

impl<'de> Deserialize<'de> for RelaxationTime {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(tau) if tau > 0.0 && tau.is_finite() => Ok(Self::Finite(tau)),
            Raw::Num(tau) => Err(serde::de::Error::custom(format!(
                "relaxation time must be positive and finite (use \"inf\" to disable), got {tau}"
            ))),
            Raw::Text(s) if matches!(s.as_str(), "inf" | "infinity" | "none") => {
                Ok(Self::Infinite)
            }
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "unrecognised relaxation time {s:?}"
            ))),
        }
    }
}

/// Everything derived from one cell state that the flux and wave-speed
/// formulas need.
#[derive(Debug, Clone, Copy)]
pub struct CellPhases {
    pub alpha: f64,
    pub chi: f64,
    pub u: f64,
    pub phase: PhaseVec,
    pub p1: f64,
    pub p2: f64,
    pub h1: f64,
    pub h2: f64,
    pub c2_1: f64,
    pub c2_2: f64,
}

/// The three partial fluxes of the operator splitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSplit {
    pub acoustic: [f64; 5],
    pub transport: [f64; 5],
    pub mixture: [f64; 5],
}

impl FluxSplit {
    pub fn total(&self) -> [f64; 5] {
        std::array::from_fn(|k| self.acoustic[k] + self.transport[k] + self.mixture[k])
    }
}

/// Closure of the two-phase system: both equations of state plus scalings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPhaseModel {
    pub eos1: PhaseEos,
    pub eos2: PhaseEos,
    pub scaling: ScalingParams,
}

impl TwoPhaseModel {
    pub fn new(eos1: PhaseEos, eos2: PhaseEos, scaling: ScalingParams) -> Self {
        Self { eos1, eos2, scaling }
    }

    pub fn cell(&self, w: &StateVec) -> Result<CellPhases, StateError> {
        let s = &self.scaling;
        let q = w.to_mix(s)?;
        let v = w.to_phase(s)?;
        let e1 = self.eos1.evaluate(v.rho1)?;
        let e2 = self.eos2.evaluate(v.rho2)?;
        Ok(CellPhases {
            alpha: q.alpha,
            chi: q.chi,
            u: q.u,
            phase: v,
            p1: e1.pressure,
            p2: e2.pressure,
            h1: e1.enthalpy,
            h2: e2.enthalpy,
            c2_1: e1.sound_speed_sq,
            c2_2: e2.sound_speed_sq,
        })
    }

    /// Wave speeds `u, u1 -+ c1/M1, u2 -+ c2/M2`.
    pub fn eigenvalues_full(&self, v: &PhaseVec) -> Result<[f64; 5], StateError> {
        let s = &self.scaling;
        let c1 = self.eos1.sound_speed_sq(v.rho1)?.sqrt() / s.m1;
        let c2 = self.eos2.sound_speed_sq(v.rho2)?.sqrt() / s.m2;
        Ok([
            v.mixture_velocity(s),
            v.u1 - c1,
            v.u1 + c1,
            v.u2 - c2,
            v.u2 + c2,
        ])
    }

    /// Largest acoustic speed magnitude `max(|u1 +- c1/M1|, |u2 +- c2/M2|)`.
    pub fn max_acoustic_speed(&self, cell: &CellPhases) -> f64 {
        let c1 = cell.c2_1.sqrt() / self.scaling.m1;
        let c2 = cell.c2_2.sqrt() / self.scaling.m2;
        (cell.phase.u1.abs() + c1).max(cell.phase.u2.abs() + c2)
    }

    /// Largest magnitude over all five wave speeds.
    pub fn max_wave_speed(&self, cell: &CellPhases) -> f64 {
        self.max_acoustic_speed(cell).max(cell.u.abs())
    }

    /// Splits the full flux into the acoustic (`f^a`), transport (`f^b`) and
    /// mixture (`f^c`) parts about the given reference states.
    pub fn flux_split(
        &self,
        w: &StateVec,
        rs1: &ReferenceState,
        rs2: &ReferenceState,
    ) -> Result<FluxSplit, StateError> {
        let cell = self.cell(w)?;
        Ok(self.flux_split_cell(w, &cell, rs1, rs2))
    }

    pub fn flux_split_cell(
        &self,
        w: &StateVec,
        cell: &CellPhases,
        rs1: &ReferenceState,
        rs2: &ReferenceState,
    ) -> FluxSplit {
        let s = &self.scaling;
        let (a, a2) = (cell.alpha, 1.0 - cell.alpha);
        let (i1, i2) = (s.inv_m1_sq(), s.inv_m2_sq());
        let v = &cell.phase;
        let p1_hat = rs1.linear_pressure(v.rho1);
        let p2_hat = rs2.linear_pressure(v.rho2);
        let w_rel = w.w_rel;
        let transfer = w.alpha_rho1 * (1.0 - cell.chi);
        FluxSplit {
            acoustic: [
                w.mom,
                0.0,
                0.0,
                s.varrho1 * a * p1_hat * i1 + s.varrho2 * a2 * p2_hat * i2,
                0.0,
            ],
            transport: [
                0.0,
                w.alpha_rho * cell.u,
                w.alpha_rho1 * cell.u,
                w.mom * cell.u,
                0.5 * (v.u1 * v.u1 - v.u2 * v.u2),
            ],
            mixture: [
                0.0,
                0.0,
                transfer * w_rel,
                s.varrho1 * transfer * w_rel * w_rel
                    + s.varrho1 * a * (cell.p1 - p1_hat) * i1
                    + s.varrho2 * a2 * (cell.p2 - p2_hat) * i2,
                cell.h1 * i1 - cell.h2 * i2,
            ],
        }
    }

    /// Full nondimensional flux evaluated from the phase variables.
    pub fn full_flux_cell(&self, w: &StateVec, cell: &CellPhases) -> [f64; 5] {
        let s = &self.scaling;
        let v = &cell.phase;
        let (a, a2) = (cell.alpha, 1.0 - cell.alpha);
        let (i1, i2) = (s.inv_m1_sq(), s.inv_m2_sq());
        [
            w.mom,
            w.alpha_rho * cell.u,
            w.alpha_rho1 * v.u1,
            s.varrho1 * a * (v.rho1 * v.u1 * v.u1 + cell.p1 * i1)
                + s.varrho2 * a2 * (v.rho2 * v.u2 * v.u2 + cell.p2 * i2),
            0.5 * (v.u1 * v.u1 - v.u2 * v.u2) + cell.h1 * i1 - cell.h2 * i2,
        ]
    }

    pub fn full_flux(&self, w: &StateVec) -> Result<[f64; 5], StateError> {
        let cell = self.cell(w)?;
        Ok(self.full_flux_cell(w, &cell))
    }

    /// Relaxation source `r(W)`; the evolution reads `dW/dt + df/dx = -r(W)`.
    pub fn source_relax(
        &self,
        w: &StateVec,
        tau: RelaxationTime,
        zeta: f64,
    ) -> Result<[f64; 5], StateError> {
        let s = &self.scaling;
        let cell = self.cell(w)?;
        let pressure = tau.rate()
            * (s.varrho2 * cell.p2 * s.inv_m2_sq() - s.varrho1 * cell.p1 * s.inv_m1_sq());
        let friction = zeta * cell.chi * (1.0 - cell.chi) * w.w_rel;
        Ok([0.0, pressure, 0.0, 0.0, friction])
    }
}

/// Wave speeds `0, u, u, 2u, u1 + u2 - u` of the transport subsystem.
#[inline]
pub fn transport_eigenvalues(u: f64, u1: f64, u2: f64) -> [f64; 5] {
    [0.0, u, u, 2.0 * u, u1 + u2 - u]
}
