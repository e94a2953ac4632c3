//! Fully explicit first-order Rusanov scheme for the complete system.

use serde::{Deserialize, Serialize};

use crate::field::StateField;
use crate::numerics::rusanov_update;
use crate::rsimex::{relax_field, RelaxParams, SchemeError, Stage, StepReport, TimeStepMode};
use crate::state::{RelaxationTime, StateVec, TwoPhaseModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplicitParams {
    pub time_step: TimeStepMode,
    pub dt_cap: f64,
    pub newton_tol: f64,
    pub newton_max: usize,
    pub tau: RelaxationTime,
    pub zeta: f64,
}

impl Default for ExplicitParams {
    fn default() -> Self {
        Self {
            time_step: TimeStepMode::Acoustic { nu_ac: 0.9 },
            dt_cap: 1e-2,
            newton_tol: 1e-12,
            newton_max: 30,
            tau: RelaxationTime::Infinite,
            zeta: 0.0,
        }
    }
}

impl ExplicitParams {
    pub fn with_time_step(mut self, mode: TimeStepMode) -> Self {
        self.time_step = mode;
        self
    }

    pub fn with_relaxation(mut self, tau: RelaxationTime, zeta: f64) -> Self {
        self.tau = tau;
        self.zeta = zeta;
        self
    }

    pub fn relax(&self) -> RelaxParams {
        RelaxParams {
            tau: self.tau,
            zeta: self.zeta,
            newton_tol: self.newton_tol,
            newton_max: self.newton_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitRusanov {
    pub model: TwoPhaseModel,
    pub params: ExplicitParams,
}

impl ExplicitRusanov {
    pub fn new(model: TwoPhaseModel, params: ExplicitParams) -> Self {
        Self { model, params }
    }

    pub fn time_step(&self, field: &StateField) -> Result<f64, SchemeError> {
        self.params.time_step.compute(field, &self.model, self.params.dt_cap)
    }

    /// Conservative Rusanov update of the full flux followed by the
    /// relaxation sources.
    pub fn advance(&self, field: &StateField, dt: f64) -> Result<(StateField, StepReport), SchemeError> {
        let n = field.len();
        let mut states = Vec::with_capacity(n);
        let mut fluxes = Vec::with_capacity(n);
        let mut speeds = Vec::with_capacity(n);
        for (cell, w) in field.cells.iter().enumerate() {
            let c = self.model.cell(w).map_err(|source| SchemeError::InvalidState {
                stage: Stage::Explicit,
                cell,
                source,
            })?;
            states.push(w.to_array());
            fluxes.push(self.model.full_flux_cell(w, &c));
            speeds.push(self.model.max_wave_speed(&c));
        }
        let lam = dt / field.grid.dx();
        let (updated, courant) = rusanov_update(&field.grid, &states, &fluxes, &speeds, lam);
        if courant > 1.0 + 1e-12 {
            return Err(SchemeError::Cfl { stage: Stage::Explicit, courant, dt });
        }
        let hyperbolic = StateField {
            cells: updated.into_iter().map(StateVec::from_array).collect(),
            grid: field.grid,
            t: field.t,
        };
        hyperbolic
            .validate(&self.model)
            .map_err(SchemeError::cell(Stage::Explicit))?;
        let (mut next, newton) = relax_field(&self.model, &hyperbolic, dt, &self.params.relax())?;
        next.t = field.t + dt;
        let report = StepReport {
            t: next.t,
            dt,
            courant,
            newton_iterations: newton,
            ..Default::default()
        };
        Ok((next, report))
    }

    pub fn step(&self, field: &StateField) -> Result<(StateField, StepReport), SchemeError> {
        let dt = self.time_step(field)?;
        self.advance(field, dt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::PhaseEos;
    use crate::numerics::{Boundary, Grid1D};
    use crate::state::{PhaseVec, ScalingParams};
    use approx::assert_relative_eq;

    fn model() -> TwoPhaseModel {
        TwoPhaseModel::new(
            PhaseEos::ideal_gas(1.4, 1.0),
            PhaseEos::stiffened_gas(2.8, 2.0, 1.0),
            ScalingParams::same_mach(0.5),
        )
    }

    fn uncapped() -> ExplicitParams {
        ExplicitParams { dt_cap: 1.0, ..Default::default() }
    }

    fn field(grid: Grid1D, f: impl Fn(f64) -> PhaseVec) -> StateField {
        let m = model();
        let cells = grid.centers().iter().map(|&x| f(x).to_state(&m.scaling).unwrap()).collect();
        StateField::new(cells, grid)
    }

    #[test]
    fn uniform_state_is_fixed() {
        let s = ExplicitRusanov::new(model(), uncapped());
        let f = field(Grid1D::unit(10, Boundary::NoFlux), |_| PhaseVec {
            alpha: 0.4,
            rho1: 1.1,
            u1: 0.3,
            rho2: 0.95,
            u2: 0.1,
        });
        let (g, rep) = s.step(&f).unwrap();
        for (a, b) in g.cells.iter().zip(&f.cells) {
            for (u, v) in a.to_array().iter().zip(b.to_array()) {
                assert!((u - v).abs() < 1e-12 * v.abs().max(1.0));
            }
        }
        assert_relative_eq!(rep.courant, 0.9, max_relative = 1e-12);
    }

    #[test]
    fn periodic_sums_are_conserved() {
        use std::f64::consts::PI;
        let s = ExplicitRusanov::new(model(), uncapped());
        let mut f = field(Grid1D::unit(64, Boundary::Periodic), |x| PhaseVec {
            alpha: 0.5 + 0.2 * (2.0 * PI * x).sin(),
            rho1: 1.0 + 0.1 * (2.0 * PI * x).cos(),
            u1: 0.2,
            rho2: 1.0 + 0.05 * (4.0 * PI * x).sin(),
            u2: -0.1,
        });
        let t0 = f.totals();
        for _ in 0..20 {
            f = s.step(&f).unwrap().0;
        }
        let t1 = f.totals();
        assert!(t1.max_relative_change(&t0, 1.0) < 1e-12);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let s = ExplicitRusanov::new(model(), uncapped());
        let f = field(Grid1D::unit(10, Boundary::Periodic), |_| PhaseVec {
            alpha: 0.4,
            rho1: 1.0,
            u1: 0.0,
            rho2: 1.0,
            u2: 0.0,
        });
        let dt = 2.0 * s.time_step(&f).unwrap();
        assert!(matches!(s.advance(&f, dt), Err(SchemeError::Cfl { stage: Stage::Explicit, .. })));
    }
}
