//! Initial data for the shipped experiments.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eos::{EosError, PhaseEos, ReferenceState};
use crate::field::{CellError, StateField};
use crate::numerics::{Boundary, Grid1D};
use crate::state::{PhaseVec, RelaxationTime, ScalingParams, StateError, TwoPhaseModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CaseError {
    #[error("grid domain [{got_lo}, {got_hi}] does not match the case domain [{lo}, {hi}]")]
    DomainMismatch { lo: f64, hi: f64, got_lo: f64, got_hi: f64 },
    #[error("invalid case parameter: {0}")]
    Invalid(String),
    #[error(transparent)]
    Eos(#[from] EosError),
    #[error("initial data: {0}")]
    State(#[from] CellError),
    #[error("at x = {x}: {source}")]
    Sample {
        x: f64,
        #[source]
        source: StateError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseId {
    /// Single-phase shock/rarefaction data of Degond and Tang.
    DegondTang,
    /// Smooth double rarefaction used for convergence tables.
    DoubleRarefaction,
    /// Density jump with constant volume fraction.
    Riemann,
    /// Density jump plus a sharp volume-fraction jump.
    RiemannAlphaJump,
    /// Density jump plus a tanh volume-fraction transition.
    RiemannAlphaSmooth,
    /// Compressible gas with a weakly compressible stiffened liquid.
    GasLiquid,
}

/// Middle pieces of the double-rarefaction velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VelocityProfile {
    /// `30 - 160x + 200x^2` on `[0.4, 0.5)`: continuous with matching slopes.
    #[default]
    Smooth,
    /// `30 - 16x + 200x^2` on `[0.4, 0.5)`.
    AsPrinted,
}

impl VelocityProfile {
    pub fn velocity(&self, x: f64) -> f64 {
        let b = match self {
            Self::Smooth => -160.0,
            Self::AsPrinted => -16.0,
        };
        if x < 0.4 {
            -2.0
        } else if x < 0.5 {
            30.0 + b * x + 200.0 * x * x
        } else if x < 0.6 {
            -70.0 + 240.0 * x - 200.0 * x * x
        } else {
            2.0
        }
    }

    /// Jumps `u(x+) - u(x-)` at the three breakpoints.
    pub fn continuity_report(&self) -> Vec<(f64, f64)> {
        let below = |x: f64| {
            let b = match self {
                Self::Smooth => -160.0,
                Self::AsPrinted => -16.0,
            };
            if x <= 0.4 {
                -2.0
            } else if x <= 0.5 {
                30.0 + b * x + 200.0 * x * x
            } else {
                -70.0 + 240.0 * x - 200.0 * x * x
            }
        };
        [0.4, 0.5, 0.6]
            .iter()
            .map(|&x| (x, self.velocity(x) - below(x)))
            .collect()
    }
}

fn is_none<T>(v: &Option<T>) -> bool {
    v.is_none()
}

fn one() -> f64 {
    1.0
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

/// Case description. Unset options take case-specific defaults; see
/// [`CaseSpec::resolved`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub case: CaseId,
    pub m1: f64,
    pub m2: f64,
    #[serde(default = "one")]
    pub varrho1: f64,
    #[serde(default = "one")]
    pub varrho2: f64,
    #[serde(default, skip_serializing_if = "is_none")]
    pub x_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub x_hi: Option<f64>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub boundary: Option<Boundary>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub eos1: Option<PhaseEos>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub eos2: Option<PhaseEos>,
    /// Constant volume fraction.
    #[serde(default, skip_serializing_if = "is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub alpha_left: Option<f64>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub alpha_right: Option<f64>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub interface_width: Option<f64>,
    /// Second-order density perturbations on the left state.
    #[serde(default, skip_serializing_if = "is_none")]
    pub rho1_pert: Option<f64>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub rho2_pert: Option<f64>,
    /// Uniform phase velocity for the Riemann-type cases.
    #[serde(default, skip_serializing_if = "is_none")]
    pub velocity: Option<f64>,
    /// Relative velocity `u1 - u2` added on top of `velocity`.
    #[serde(default, skip_serializing_if = "is_none")]
    pub w_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub velocity_profile: VelocityProfile,
    #[serde(default, skip_serializing_if = "is_none")]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub tau: RelaxationTime,
    #[serde(default)]
    pub zeta: f64,
    /// Override of the linearisation densities of both phases.
    #[serde(default, skip_serializing_if = "is_none")]
    pub rho_rs: Option<[f64; 2]>,
}

impl CaseSpec {
    pub fn new(case: CaseId, m1: f64, m2: f64) -> Self {
        Self {
            case,
            m1,
            m2,
            varrho1: 1.0,
            varrho2: 1.0,
            x_lo: None,
            x_hi: None,
            boundary: None,
            eos1: None,
            eos2: None,
            alpha: None,
            alpha_left: None,
            alpha_right: None,
            interface_width: None,
            rho1_pert: None,
            rho2_pert: None,
            velocity: None,
            w_rel: None,
            velocity_profile: VelocityProfile::default(),
            t_final: None,
            tau: RelaxationTime::Infinite,
            zeta: 0.0,
            rho_rs: None,
        }
    }

    pub fn degond_tang(m: f64) -> Self {
        Self::new(CaseId::DegondTang, m, m)
    }

    pub fn double_rarefaction(m1: f64, m2: f64) -> Self {
        Self::new(CaseId::DoubleRarefaction, m1, m2)
    }

    pub fn riemann(m1: f64, m2: f64) -> Self {
        Self::new(CaseId::Riemann, m1, m2)
    }

    pub fn riemann_alpha_jump(m: f64) -> Self {
        Self::new(CaseId::RiemannAlphaJump, m, m)
    }

    pub fn riemann_alpha_smooth(m: f64) -> Self {
        Self::new(CaseId::RiemannAlphaSmooth, m, m)
    }

    pub fn gas_liquid(m2: f64) -> Self {
        Self::new(CaseId::GasLiquid, 1.0, m2)
    }

    pub fn with_relaxation(mut self, tau: RelaxationTime, zeta: f64) -> Self {
        self.tau = tau;
        self.zeta = zeta;
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x_lo.unwrap_or(0.0), self.x_hi.unwrap_or(1.0))
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary.unwrap_or(match self.case {
            CaseId::GasLiquid => Boundary::Periodic,
            _ => Boundary::NoFlux,
        })
    }

    pub fn grid(&self, n_cells: usize) -> Grid1D {
        let (lo, hi) = self.domain();
        Grid1D::new(n_cells, lo, hi, self.boundary())
    }

    pub fn eos_pair(&self) -> (PhaseEos, PhaseEos) {
        let gas = PhaseEos::ideal_gas(1.4, 1.0);
        let default2 = match self.case {
            CaseId::DegondTang => gas,
            _ => PhaseEos::stiffened_gas(2.8, 2.0, 1.0),
        };
        (self.eos1.unwrap_or(gas), self.eos2.unwrap_or(default2))
    }

    pub fn scaling(&self) -> ScalingParams {
        ScalingParams { m1: self.m1, m2: self.m2, varrho1: self.varrho1, varrho2: self.varrho2 }
    }

    pub fn model(&self) -> TwoPhaseModel {
        let (e1, e2) = self.eos_pair();
        TwoPhaseModel::new(e1, e2, self.scaling())
    }

    pub fn final_time(&self) -> f64 {
        self.t_final.unwrap_or(match self.case {
            CaseId::DegondTang => 0.075,
            CaseId::DoubleRarefaction | CaseId::GasLiquid => 0.2 * self.m2,
            _ => 0.2 * self.m1.max(self.m2),
        })
    }

    fn alpha_lr(&self) -> (f64, f64) {
        (self.alpha_left.unwrap_or(0.8), self.alpha_right.unwrap_or(0.2))
    }

    fn interface(&self) -> f64 {
        let (lo, hi) = self.domain();
        0.5 * (lo + hi)
    }

    pub fn alpha_at(&self, x: f64) -> f64 {
        match self.case {
            CaseId::DegondTang => self.alpha.unwrap_or(0.5),
            CaseId::DoubleRarefaction => self.alpha.unwrap_or(0.99),
            CaseId::Riemann | CaseId::GasLiquid => self.alpha.unwrap_or(0.5),
            CaseId::RiemannAlphaJump => {
                let (l, r) = self.alpha_lr();
                if x < self.interface() {
                    l
                } else {
                    r
                }
            }
            CaseId::RiemannAlphaSmooth => {
                let (l, r) = self.alpha_lr();
                let w = self.interface_width.unwrap_or(0.05);
                0.5 * (l + r) - 0.5 * (l - r) * ((x - self.interface()) / w).tanh()
            }
        }
    }

    /// Leading-order phase densities with equal leading pressures: phase one
    /// sits at density 1 and phase two at the density giving the same pressure.
    pub fn leading_densities(&self) -> Result<[f64; 2], CaseError> {
        let (e1, e2) = self.eos_pair();
        match self.case {
            CaseId::DegondTang => Ok([2.0, 2.0]),
            CaseId::DoubleRarefaction => Ok([1.0, 1.0]),
            CaseId::GasLiquid => Ok([1.0, e2.density_at_pressure(0.0)?]),
            _ => {
                let p = e1.pressure(1.0)?;
                Ok([1.0, e2.density_at_pressure(p)?])
            }
        }
    }

    /// Phase variables at position `x`.
    pub fn phase_at(&self, x: f64) -> Result<PhaseVec, CaseError> {
        let (m1, m2) = (self.m1, self.m2);
        let alpha = self.alpha_at(x);
        let u = self.velocity.unwrap_or(0.25);
        let w = self.w_rel.unwrap_or(0.0);
        let [r1, r2] = self.leading_densities()?;
        let v = match self.case {
            CaseId::DegondTang => {
                let m2sq = m1 * m1;
                let rho = if x > 0.2 && x <= 0.3 {
                    2.0 + m2sq
                } else if x > 0.7 && x <= 0.8 {
                    2.0 - m2sq
                } else {
                    2.0
                };
                let u = if x < 0.2 || x > 0.8 {
                    1.0 - 0.5 * m2sq
                } else if x > 0.3 && x <= 0.7 {
                    1.0 + 0.5 * m2sq
                } else {
                    1.0
                };
                PhaseVec { alpha, rho1: rho, u1: u, rho2: rho, u2: u }
            }
            CaseId::DoubleRarefaction => {
                let u = self.velocity_profile.velocity(x);
                PhaseVec { alpha, rho1: r1, u1: u + w, rho2: r2, u2: u }
            }
            CaseId::GasLiquid => {
                let (e1, e2) = self.eos_pair();
                let rho1 = r1 + 0.2 * (2.0 * std::f64::consts::PI * x).sin();
                let p1 = e1.pressure(rho1)?;
                let c2 = e2.sound_speed_sq(r2)?;
                PhaseVec { alpha, rho1, u1: u + w, rho2: r2 + m2 * m2 * p1 / c2, u2: u }
            }
            _ => {
                let left = x < self.interface();
                let (d1, d2) = if left {
                    (self.rho1_pert.unwrap_or(1.0), self.rho2_pert.unwrap_or(1.0))
                } else {
                    (0.0, 0.0)
                };
                PhaseVec {
                    alpha,
                    rho1: r1 + m1 * m1 * d1,
                    u1: u + w,
                    rho2: r2 + m2 * m2 * d2,
                    u2: u,
                }
            }
        };
        Ok(v)
    }

    pub fn validate(&self) -> Result<(), CaseError> {
        let s = self.scaling();
        if !s.is_valid() {
            return Err(CaseError::Invalid(format!("Mach numbers and scalings must be positive: {s:?}")));
        }
        let (lo, hi) = self.domain();
        if !(hi > lo) {
            return Err(CaseError::Invalid(format!("empty domain [{lo}, {hi}]")));
        }
        let (e1, e2) = self.eos_pair();
        e1.validate()?;
        e2.validate()?;
        if let Some(w) = self.interface_width {
            if !(w > 0.0) {
                return Err(CaseError::Invalid(format!("interface_width must be positive, got {w}")));
            }
        }
        if !(self.zeta >= 0.0) {
            return Err(CaseError::Invalid(format!("zeta must be non-negative, got {}", self.zeta)));
        }
        Ok(())
    }

    /// Cell-centred sampling of the initial data.
    pub fn build(&self, grid: &Grid1D) -> Result<StateField, CaseError> {
        self.validate()?;
        let (lo, hi) = self.domain();
        let tol = 1e-12 * (hi - lo);
        if (grid.x_lo - lo).abs() > tol || (grid.x_hi - hi).abs() > tol {
            return Err(CaseError::DomainMismatch {
                lo,
                hi,
                got_lo: grid.x_lo,
                got_hi: grid.x_hi,
            });
        }
        let s = self.scaling();
        let cells = grid
            .centers()
            .iter()
            .map(|&x| {
                let v = self.phase_at(x)?;
                v.to_state(&s).map_err(|source| CaseError::Sample { x, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let field = StateField::new(cells, *grid);
        field.validate(&self.model())?;
        Ok(field)
    }

    /// Linearisation densities: the override, else the leading-order
    /// constants of the case.
    pub fn reference_densities(&self) -> Result<[f64; 2], CaseError> {
        match self.rho_rs {
            Some(r) => Ok(r),
            None => self.leading_densities(),
        }
    }

    pub fn reference_states(&self) -> Result<(ReferenceState, ReferenceState), CaseError> {
        let (e1, e2) = self.eos_pair();
        let [r1, r2] = self.reference_densities()?;
        Ok((ReferenceState::new(&e1, r1)?, ReferenceState::new(&e2, r2)?))
    }

    /// Spec with every optional field filled in with its effective value.
    pub fn resolved(&self) -> Result<Self, CaseError> {
        let (lo, hi) = self.domain();
        let (e1, e2) = self.eos_pair();
        let mut out = self.clone();
        out.x_lo = Some(lo);
        out.x_hi = Some(hi);
        out.boundary = Some(self.boundary());
        out.eos1 = Some(e1);
        out.eos2 = Some(e2);
        out.t_final = Some(self.final_time());
        out.rho_rs = Some(self.reference_densities()?);
        Ok(out)
    }
}

/// Same-Mach well-prepared Riemann data at Mach number `m` together with the
/// reference states at the leading-order densities.
pub fn well_prepared_case2(
    base: &CaseSpec,
    m: f64,
    grid: &Grid1D,
) -> Result<(StateField, ReferenceState, ReferenceState), CaseError> {
    if !matches!(
        base.case,
        CaseId::Riemann | CaseId::RiemannAlphaJump | CaseId::RiemannAlphaSmooth
    ) {
        return Err(CaseError::Invalid(format!(
            "{:?} has no same-Mach well-prepared form",
            base.case
        )));
    }
    let spec = CaseSpec { m1: m, m2: m, rho_rs: None, ..base.clone() };
    let (rs1, rs2) = spec.reference_states()?;
    if (rs1.p_rs - rs2.p_rs).abs() > 1e-12 * rs1.p_rs.abs().max(1.0) {
        return Err(CaseError::Invalid(format!(
            "leading pressures differ: {} vs {}",
            rs1.p_rs, rs2.p_rs
        )));
    }
    Ok((spec.build(grid)?, rs1, rs2))
}
