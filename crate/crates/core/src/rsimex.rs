//! Reference-solution IMEX step: implicit acoustics, explicit transport,
//! implicit stiff mixture terms and the relaxation sources.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eos::ReferenceState;
use crate::field::{CellError, StateField};
use crate::numerics::{
    centered_difference, dt_acoustic, dt_material, mixed_second_difference, rusanov_update,
    second_difference, LinearSolveError, SymTridiagonal,
};
use crate::state::{RelaxationTime, StateError, StateVec, TwoPhaseModel, FRACTION_EPS};

/// Which part of a step produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    TimeStep,
    Acoustic,
    Transport,
    Mixture,
    Relaxation,
    Explicit,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::TimeStep => "time step",
            Stage::Acoustic => "acoustic",
            Stage::Transport => "transport",
            Stage::Mixture => "mixture",
            Stage::Relaxation => "relaxation",
            Stage::Explicit => "explicit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("{stage} stage: cell {cell}: {source}")]
    InvalidState {
        stage: Stage,
        cell: usize,
        #[source]
        source: StateError,
    },
    #[error("{stage} stage: {source}")]
    LinearSolve {
        stage: Stage,
        #[source]
        source: LinearSolveError,
    },
    #[error("{stage} stage: Courant number {courant:.4} exceeds 1 (dt = {dt:e})")]
    Cfl { stage: Stage, courant: f64, dt: f64 },
    #[error("mixture stage: Picard iteration not converged after {iterations} iterations (relative increment {increment:e})")]
    PicardNotConverged { iterations: usize, increment: f64 },
    #[error("relaxation stage: cell {cell}: Newton iteration failed after {iterations} iterations (alpha = {alpha}, g = {residual:e})")]
    NewtonFailed {
        cell: usize,
        iterations: usize,
        alpha: f64,
        residual: f64,
    },
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("step limit {0} reached before the final time")]
    TooManySteps(usize),
}

impl SchemeError {
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Self::InvalidState { stage, .. }
            | Self::LinearSolve { stage, .. }
            | Self::Cfl { stage, .. } => Some(*stage),
            Self::PicardNotConverged { .. } => Some(Stage::Mixture),
            Self::NewtonFailed { .. } => Some(Stage::Relaxation),
            Self::InvalidParameter { .. } | Self::TooManySteps(_) => None,
        }
    }

    pub(crate) fn cell(stage: Stage) -> impl Fn(CellError) -> Self {
        move |e| Self::InvalidState { stage, cell: e.cell, source: e.source }
    }
}

/// How the step size is chosen from the current field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TimeStepMode {
    Material { nu_u: f64 },
    Acoustic { nu_ac: f64 },
    /// Acoustic step additionally bounded by the material condition.
    AcousticMaterial { nu_ac: f64, nu_u: f64 },
    Fixed { dt: f64 },
}

impl TimeStepMode {
    pub fn compute(
        &self,
        field: &StateField,
        model: &TwoPhaseModel,
        cap: f64,
    ) -> Result<f64, SchemeError> {
        let dt = match *self {
            Self::Material { nu_u } => dt_material(field, model, nu_u, cap),
            Self::Acoustic { nu_ac } => dt_acoustic(field, model, nu_ac, cap),
            Self::AcousticMaterial { nu_ac, nu_u } => dt_acoustic(field, model, nu_ac, cap)
                .and_then(|a| dt_material(field, model, nu_u, cap).map(|m| a.min(m))),
            Self::Fixed { dt } => Ok(dt),
        };
        dt.map_err(SchemeError::cell(Stage::TimeStep))
    }

    fn validate(&self) -> Result<(), SchemeError> {
        let (name, value) = match *self {
            Self::Material { nu_u } => ("nu_u", nu_u),
            Self::Acoustic { nu_ac } => ("nu_ac", nu_ac),
            Self::AcousticMaterial { nu_ac, nu_u } => {
                positive("nu_ac", nu_ac)?;
                ("nu_u", nu_u)
            }
            Self::Fixed { dt } => ("dt", dt),
        };
        positive(name, value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearSolverKind {
    #[default]
    Direct,
    ConjugateGradient,
}

impl LinearSolverKind {
    pub fn solve(&self, a: &SymTridiagonal, b: &[f64]) -> Result<Vec<f64>, LinearSolveError> {
        match self {
            Self::Direct => a.solve(b),
            Self::ConjugateGradient => a.solve_cg(b, 1e-14, 20 * b.len() + 100),
        }
    }
}

/// Pressure used for the acoustic-stage momentum update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcousticPressure {
    /// `E(alpha^n) + c^RS(chi^n)^2 rho*`, the pressure of the density solve.
    #[default]
    Frozen,
    /// Linear phase pressures at `alpha* = (alpha rho)^n / rho*`.
    StateVariables,
}

/// Source-term controls shared by both schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxParams {
    pub tau: RelaxationTime,
    pub zeta: f64,
    pub newton_tol: f64,
    pub newton_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RsimexParams {
    pub time_step: TimeStepMode,
    pub dt_cap: f64,
    /// Stopping tolerance on the relative L1 Picard increment.
    pub delta: f64,
    pub max_picard: usize,
    pub newton_tol: f64,
    pub newton_max: usize,
    pub tau: RelaxationTime,
    pub zeta: f64,
    /// Adds the higher-order pressure and enthalpy corrections in the mixture stage.
    pub all_speed: bool,
    pub linear_solver: LinearSolverKind,
    /// Use the transport-stage density in both Picard coefficients.
    pub picard_single_density: bool,
    pub acoustic_pressure: AcousticPressure,
}

impl Default for RsimexParams {
    fn default() -> Self {
        Self {
            time_step: TimeStepMode::Material { nu_u: 0.5 },
            dt_cap: 1e-2,
            delta: 1e-10,
            max_picard: 50,
            newton_tol: 1e-12,
            newton_max: 30,
            tau: RelaxationTime::Infinite,
            zeta: 0.0,
            all_speed: true,
            linear_solver: LinearSolverKind::Direct,
            picard_single_density: false,
            acoustic_pressure: AcousticPressure::Frozen,
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), SchemeError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SchemeError::InvalidParameter { name, value })
    }
}

impl RsimexParams {
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

    pub fn validate(&self) -> Result<(), SchemeError> {
        self.time_step.validate()?;
        positive("dt_cap", self.dt_cap)?;
        positive("delta", self.delta)?;
        positive("newton_tol", self.newton_tol)?;
        if self.max_picard == 0 {
            return Err(SchemeError::InvalidParameter { name: "max_picard", value: 0.0 });
        }
        if self.newton_max == 0 {
            return Err(SchemeError::InvalidParameter { name: "newton_max", value: 0.0 });
        }
        if !(self.zeta >= 0.0 && self.zeta.is_finite()) {
            return Err(SchemeError::InvalidParameter { name: "zeta", value: self.zeta });
        }
        if let RelaxationTime::Finite(tau) = self.tau {
            positive("tau", tau)?;
        }
        Ok(())
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct StepReport {
    /// Time at the end of the step.
    pub t: f64,
    pub dt: f64,
    /// Largest interface Courant number of the explicit part.
    pub courant: f64,
    pub picard_iterations: usize,
    pub picard_increments: Vec<f64>,
    pub newton_iterations: usize,
}

/// Result of the mixture stage.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureOutcome {
    pub field: StateField,
    pub iterations: usize,
    /// Relative L1 increment of every Picard iteration.
    pub increments: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rsimex {
    pub model: TwoPhaseModel,
    pub rs1: ReferenceState,
    pub rs2: ReferenceState,
    pub params: RsimexParams,
}

fn rebuild(cells: Vec<StateVec>, like: &StateField) -> StateField {
    StateField { cells, grid: like.grid, t: like.t }
}

fn check_cells(
    model: &TwoPhaseModel,
    field: &StateField,
    stage: Stage,
) -> Result<(), SchemeError> {
    field.validate(model).map_err(SchemeError::cell(stage))
}

impl Rsimex {
    pub fn new(
        model: TwoPhaseModel,
        rs1: ReferenceState,
        rs2: ReferenceState,
        params: RsimexParams,
    ) -> Result<Self, SchemeError> {
        params.validate()?;
        Ok(Self { model, rs1, rs2, params })
    }

    fn solve(&self, stage: Stage, a: &SymTridiagonal, b: &[f64]) -> Result<Vec<f64>, SchemeError> {
        self.params
            .linear_solver
            .solve(a, b)
            .map_err(|source| SchemeError::LinearSolve { stage, source })
    }

    /// Largest relative distance of a phase density from its reference
    /// density; large values mean the linearisation is far from valid.
    pub fn reference_deviation(&self, field: &StateField) -> Result<f64, SchemeError> {
        let phases = field.phases(&self.model).map_err(SchemeError::cell(Stage::TimeStep))?;
        Ok(phases.iter().fold(0.0, |acc: f64, c| {
            acc.max((c.phase.rho1 / self.rs1.rho_rs - 1.0).abs())
                .max((c.phase.rho2 / self.rs2.rho_rs - 1.0).abs())
        }))
    }

    /// Warns when the higher-order corrections are off but the data are far
    /// from the reference states.
    pub fn check_regime(&self, field: &StateField) -> Result<(), SchemeError> {
        if !self.params.all_speed {
            let dev = self.reference_deviation(field)?;
            if dev > 0.1 {
                log::warn!(
                    "all_speed is off but phase densities deviate from the reference states by {:.1}%",
                    100.0 * dev
                );
            }
        }
        Ok(())
    }

    /// Implicit acoustic stage: returns `W*`.
    pub fn stage_acoustic(&self, field: &StateField, dt: f64) -> Result<StateField, SchemeError> {
        let s = &self.model.scaling;
        let grid = &field.grid;
        let (i1, i2) = (s.inv_m1_sq(), s.inv_m2_sq());
        let (c1, c2) = (self.rs1.c2_rs * i1, self.rs2.c2_rs * i2);
        let (e1, e2) = (s.varrho1 * self.rs1.eta_rs * i1, s.varrho2 * self.rs2.eta_rs * i2);

        let n = field.len();
        let mut inv_c = Vec::with_capacity(n);
        let mut eta = Vec::with_capacity(n);
        for w in &field.cells {
            let alpha = w.alpha();
            let chi = w.mass_fraction(s);
            inv_c.push(1.0 / (chi * c1 + (1.0 - chi) * c2));
            eta.push(alpha * e1 + (1.0 - alpha) * e2);
        }
        let mom = field.component(3);
        let dmom = centered_difference(&mom, grid);
        let d2eta = second_difference(&eta, grid);
        let dt2 = dt * dt;
        let rhs: Vec<f64> = (0..n)
            .map(|i| field.cells[i].rho - dt * dmom[i] + dt2 * d2eta[i])
            .collect();

        // unknown y = c^2 rho keeps the operator symmetric
        let a = SymTridiagonal::shifted_weighted_laplacian(&inv_c, &vec![1.0; n], dt2, grid);
        let y = self.solve(Stage::Acoustic, &a, &rhs)?;
        let rho_star: Vec<f64> = y.iter().zip(&inv_c).map(|(y, ic)| y * ic).collect();

        let pressure: Vec<f64> = match self.params.acoustic_pressure {
            AcousticPressure::Frozen => (0..n).map(|i| eta[i] + rho_star[i] / inv_c[i]).collect(),
            // alpha* = W2 / rho* may leave (0, 1) here; the linear pressures
            // only need the partial densities, so no phase density is formed.
            AcousticPressure::StateVariables => field
                .cells
                .iter()
                .zip(&rho_star)
                .map(|(w, &rho)| {
                    let alpha = w.alpha_rho / rho;
                    let ar2 = (rho - s.varrho1 * w.alpha_rho1) / s.varrho2;
                    s.varrho1 * (alpha * self.rs1.eta_rs + self.rs1.c2_rs * w.alpha_rho1) * i1
                        + s.varrho2 * ((1.0 - alpha) * self.rs2.eta_rs + self.rs2.c2_rs * ar2) * i2
                })
                .collect(),
        };
        let dp = centered_difference(&pressure, grid);

        let cells = (0..n)
            .map(|i| StateVec {
                rho: rho_star[i],
                mom: mom[i] - dt * dp[i],
                ..field.cells[i]
            })
            .collect();
        let out = rebuild(cells, field);
        for (cell, w) in out.cells.iter().enumerate() {
            let source = if !(w.rho.is_finite() && w.mom.is_finite()) {
                StateError::NonFinite
            } else if w.rho <= 0.0 {
                StateError::NonPositiveMixtureDensity(w.rho)
            } else {
                continue;
            };
            return Err(SchemeError::InvalidState { stage: Stage::Acoustic, cell, source });
        }
        Ok(out)
    }

    /// Explicit Rusanov transport stage on `W*`: returns `W**` and the
    /// largest Courant number.
    pub fn stage_transport(
        &self,
        star: &StateField,
        dt: f64,
    ) -> Result<(StateField, f64), SchemeError> {
        let s = &self.model.scaling;
        let n = star.len();
        let mut states = Vec::with_capacity(n);
        let mut fluxes = Vec::with_capacity(n);
        let mut speeds = Vec::with_capacity(n);
        for w in &star.cells {
            let v = w.mom / w.rho;
            let chi = s.varrho1 * w.alpha_rho1 / w.rho;
            let wr = w.w_rel;
            let drift = (1.0 - 2.0 * chi) * wr;
            states.push([w.alpha_rho, w.alpha_rho1, w.mom, wr]);
            fluxes.push([w.alpha_rho * v, w.alpha_rho1 * v, w.mom * v, v * wr + 0.5 * drift * wr]);
            speeds.push((2.0 * v).abs().max((v + drift).abs()));
        }
        let lam = dt / star.grid.dx();
        let (updated, courant) = rusanov_update(&star.grid, &states, &fluxes, &speeds, lam);
        if courant > 1.0 + 1e-12 {
            return Err(SchemeError::Cfl { stage: Stage::Transport, courant, dt });
        }
        let cells = star
            .cells
            .iter()
            .zip(updated)
            .map(|(w, q)| StateVec {
                rho: w.rho,
                alpha_rho: q[0],
                alpha_rho1: q[1],
                mom: q[2],
                w_rel: q[3],
            })
            .collect();
        let out = rebuild(cells, star);
        check_cells(&self.model, &out, Stage::Transport)?;
        Ok((out, courant))
    }

    /// Implicit stiff-mixture stage on `W**` (with `rho*` from the acoustic
    /// stage): Picard iteration for `alpha rho1`, then relative velocity and
    /// momentum updates.
    pub fn stage_mixture(
        &self,
        two_star: &StateField,
        rho_star: &[f64],
        dt: f64,
    ) -> Result<MixtureOutcome, SchemeError> {
        let s = &self.model.scaling;
        let p = &self.params;
        let grid = &two_star.grid;
        let n = two_star.len();
        let (i1, i2) = (s.inv_m1_sq(), s.inv_m2_sq());
        let k1 = self.rs1.c2_rs / self.rs1.rho_rs * i1;
        let k2 = self.rs2.c2_rs / self.rs2.rho_rs * i2;

        let rho2s: Vec<f64> = two_star.cells.iter().map(|w| w.rho).collect();
        let rho_coef: &[f64] = if p.picard_single_density { &rho2s } else { rho_star };
        let alpha: Vec<f64> = two_star.cells.iter().map(|w| w.alpha()).collect();
        let w_rel = two_star.component(4);
        let x0 = two_star.component(2);

        let inv_stilde: Vec<f64> = alpha
            .iter()
            .map(|a| 1.0 / (k1 / a + k2 * s.varrho1 / (s.varrho2 * (1.0 - a))))
            .collect();
        let g: Vec<f64> = alpha
            .iter()
            .zip(&rho2s)
            .map(|(a, r)| k2 * r / (s.varrho2 * (1.0 - a)))
            .collect();
        let transfer = |x: f64, rho: f64| x * (1.0 - s.varrho1 * x / rho);

        let dt2 = dt * dt;
        let mut x = x0.clone();
        let mut increments = Vec::new();
        let mut converged = false;
        for _ in 0..p.max_picard {
            let adv: Vec<f64> = (0..n).map(|i| transfer(x[i], rho2s[i]) * w_rel[i]).collect();
            let coef: Vec<f64> = (0..n).map(|i| transfer(x[i], rho_coef[i])).collect();
            let d_adv = centered_difference(&adv, grid);
            let lg = mixed_second_difference(&coef, &g, grid);
            let rhs: Vec<f64> = (0..n).map(|i| x0[i] - dt * d_adv[i] - dt2 * lg[i]).collect();
            let a = SymTridiagonal::shifted_weighted_laplacian(&inv_stilde, &coef, dt2, grid);
            let y = self.solve(Stage::Mixture, &a, &rhs)?;
            let next: Vec<f64> = y.iter().zip(&inv_stilde).map(|(y, is)| y * is).collect();
            let diff: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
            let norm: f64 = x.iter().map(|v| v.abs()).sum();
            let inc = diff / norm;
            increments.push(inc);
            x = next;
            if !inc.is_finite() {
                break;
            }
            if inc < p.delta {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(SchemeError::PicardNotConverged {
                iterations: increments.len(),
                increment: increments.last().copied().unwrap_or(f64::NAN),
            });
        }

        // phase densities at the new partial density, alpha**
        let mut enthalpy = Vec::with_capacity(n);
        let mut pbar = Vec::with_capacity(n);
        for i in 0..n {
            let a = alpha[i];
            let rho1 = x[i] / a;
            let rho2 = (rho2s[i] - s.varrho1 * x[i]) / (s.varrho2 * (1.0 - a));
            if !(rho1 > 0.0) {
                return Err(SchemeError::InvalidState {
                    stage: Stage::Mixture,
                    cell: i,
                    source: StateError::NonPositivePhaseDensity { phase: 1, value: rho1 },
                });
            }
            if !(rho2 > 0.0) {
                return Err(SchemeError::InvalidState {
                    stage: Stage::Mixture,
                    cell: i,
                    source: StateError::NonPositivePhaseDensity { phase: 2, value: rho2 },
                });
            }
            let (h1, h2, pb) = if p.all_speed {
                let eos_err = |e| SchemeError::InvalidState {
                    stage: Stage::Mixture,
                    cell: i,
                    source: StateError::Eos(e),
                };
                let e1 = self.model.eos1.evaluate(rho1).map_err(eos_err)?;
                let e2 = self.model.eos2.evaluate(rho2).map_err(eos_err)?;
                let pb1 = e1.pressure - self.rs1.linear_pressure(rho1);
                let pb2 = e2.pressure - self.rs2.linear_pressure(rho2);
                (
                    e1.enthalpy,
                    e2.enthalpy,
                    a * s.varrho1 * pb1 * i1 + (1.0 - a) * s.varrho2 * pb2 * i2,
                )
            } else {
                (self.rs1.linear_enthalpy(rho1), self.rs2.linear_enthalpy(rho2), 0.0)
            };
            enthalpy.push(h1 * i1 - h2 * i2);
            pbar.push(pb);
        }
        let dh = centered_difference(&enthalpy, grid);
        let w_new: Vec<f64> = (0..n).map(|i| w_rel[i] - dt * dh[i]).collect();

        let mom_flux: Vec<f64> = (0..n)
            .map(|i| s.varrho1 * transfer(x[i], rho_coef[i]) * w_new[i] * w_new[i] + pbar[i])
            .collect();
        let dmf = centered_difference(&mom_flux, grid);

        let cells = (0..n)
            .map(|i| {
                let w = &two_star.cells[i];
                StateVec {
                    alpha_rho1: x[i],
                    mom: w.mom - dt * dmf[i],
                    w_rel: w_new[i],
                    ..*w
                }
            })
            .collect();
        let out = rebuild(cells, two_star);
        check_cells(&self.model, &out, Stage::Mixture)?;
        Ok(MixtureOutcome { field: out, iterations: increments.len(), increments })
    }

    pub fn stage_relax(&self, field: &StateField, dt: f64) -> Result<(StateField, usize), SchemeError> {
        relax_field(&self.model, field, dt, &self.params.relax())
    }

    /// One full step `a -> b -> c -> r` with a prescribed `dt`.
    pub fn advance(&self, field: &StateField, dt: f64) -> Result<(StateField, StepReport), SchemeError> {
        positive("dt", dt)?;
        let star = self.stage_acoustic(field, dt)?;
        let (two_star, courant) = self.stage_transport(&star, dt)?;
        let rho_star: Vec<f64> = star.cells.iter().map(|w| w.rho).collect();
        let mix = self.stage_mixture(&two_star, &rho_star, dt)?;
        let (mut next, newton) = self.stage_relax(&mix.field, dt)?;
        next.t = field.t + dt;
        let report = StepReport {
            t: next.t,
            dt,
            courant,
            picard_iterations: mix.iterations,
            picard_increments: mix.increments,
            newton_iterations: newton,
        };
        Ok((next, report))
    }

    pub fn time_step(&self, field: &StateField) -> Result<f64, SchemeError> {
        self.params.time_step.compute(field, &self.model, self.params.dt_cap)
    }

    pub fn step(&self, field: &StateField) -> Result<(StateField, StepReport), SchemeError> {
        let dt = self.time_step(field)?;
        self.advance(field, dt)
    }
}

/// Pressure relaxation (Newton on the volume fraction) followed by the
/// analytic friction update. Returns the largest Newton iteration count.
pub fn relax_field(
    model: &TwoPhaseModel,
    field: &StateField,
    dt: f64,
    relax: &RelaxParams,
) -> Result<(StateField, usize), SchemeError> {
    let s = &model.scaling;
    let mut cells = field.cells.clone();
    let mut newton_max = 0;
    for (cell, w) in cells.iter_mut().enumerate() {
        let chi = w.mass_fraction(s);
        if let RelaxationTime::Finite(tau) = relax.tau {
            let (alpha, its) = relax_volume_fraction(model, w, chi, dt / (tau * w.rho), relax)
                .map_err(|(iterations, alpha, residual)| SchemeError::NewtonFailed {
                    cell,
                    iterations,
                    alpha,
                    residual,
                })?;
            newton_max = newton_max.max(its);
            w.alpha_rho = alpha * w.rho;
        }
        if relax.zeta > 0.0 {
            w.w_rel /= 1.0 + dt * relax.zeta * chi * (1.0 - chi);
        }
    }
    let out = rebuild(cells, field);
    check_cells(model, &out, Stage::Relaxation)?;
    Ok((out, newton_max))
}

/// Safeguarded Newton for
/// `g(a) = a0 - a - k (varrho2 p2(rho2(a))/M2^2 - varrho1 p1(rho1(a))/M1^2)`,
/// `k = dt/(tau rho)`, bracketed in the open unit interval.
fn relax_volume_fraction(
    model: &TwoPhaseModel,
    w: &StateVec,
    chi: f64,
    k: f64,
    relax: &RelaxParams,
) -> Result<(f64, usize), (usize, f64, f64)> {
    let s = &model.scaling;
    let (i1, i2) = (s.inv_m1_sq(), s.inv_m2_sq());
    let a0 = w.alpha();
    let m1 = chi * w.rho / s.varrho1;
    let m2 = (1.0 - chi) * w.rho / s.varrho2;
    let eval = |a: f64| -> Option<(f64, f64)> {
        let rho1 = m1 / a;
        let rho2 = m2 / (1.0 - a);
        let e1 = model.eos1.evaluate(rho1).ok()?;
        let e2 = model.eos2.evaluate(rho2).ok()?;
        let g = a0 - a - k * (s.varrho2 * e2.pressure * i2 - s.varrho1 * e1.pressure * i1);
        let dg = -1.0
            - k * (s.varrho2 * e2.sound_speed_sq * rho2 * i2 / (1.0 - a)
                + s.varrho1 * e1.sound_speed_sq * rho1 * i1 / a);
        Some((g, dg))
    };
    let (mut lo, mut hi) = (FRACTION_EPS, 1.0 - FRACTION_EPS);
    let mut a = a0.clamp(lo, hi);
    let mut last = f64::NAN;
    for it in 0..=relax.newton_max {
        let Some((g, dg)) = eval(a) else {
            return Err((it, a, f64::NAN));
        };
        last = g;
        if g.abs() <= relax.newton_tol {
            return Ok((a, it));
        }
        // g is strictly decreasing in a
        if g > 0.0 {
            lo = a;
        } else {
            hi = a;
        }
        if it == relax.newton_max {
            break;
        }
        let mut next = a - g / dg;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - a).abs() <= relax.newton_tol * a.max(1e-3) {
            return Ok((next, it + 1));
        }
        a = next;
    }
    Err((relax.newton_max, a, last))
}
