use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use shtc_core::{
    AcousticPressure, CaseSpec, ExplicitParams, LinearSolverKind, RsimexParams, TimeStepMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Rsimex,
    Explicit,
}

/// Iteration controls and switches of the solvers. Relaxation parameters live
/// in the case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub dt_cap: f64,
    pub delta: f64,
    pub max_picard: usize,
    pub newton_tol: f64,
    pub newton_max: usize,
    pub all_speed: bool,
    pub linear_solver: LinearSolverKind,
    pub picard_single_density: bool,
    pub acoustic_pressure: AcousticPressure,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = RsimexParams::default();
        Self {
            dt_cap: p.dt_cap,
            delta: p.delta,
            max_picard: p.max_picard,
            newton_tol: p.newton_tol,
            newton_max: p.newton_max,
            all_speed: p.all_speed,
            linear_solver: p.linear_solver,
            picard_single_density: p.picard_single_density,
            acoustic_pressure: p.acoustic_pressure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    pub n_cells: usize,
    pub time_step: TimeStepMode,
    /// Extra output times before the final time.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverConfig,
    pub case: CaseSpec,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 3 {
            bail!("n_cells must be at least 3, got {}", self.n_cells);
        }
        self.case.validate()?;
        self.rsimex_params().validate()?;
        let t_final = self.case.final_time();
        if !(t_final > 0.0 && t_final.is_finite()) {
            bail!("final time must be positive, got {t_final}");
        }
        let mut prev = 0.0;
        for &t in &self.snapshots {
            if !(t >= prev && t <= t_final) {
                bail!("snapshot times must be increasing within [0, {t_final}], got {t}");
            }
            prev = t;
        }
        Ok(())
    }

    pub fn rsimex_params(&self) -> RsimexParams {
        let s = &self.solver;
        RsimexParams {
            time_step: self.time_step,
            dt_cap: s.dt_cap,
            delta: s.delta,
            max_picard: s.max_picard,
            newton_tol: s.newton_tol,
            newton_max: s.newton_max,
            tau: self.case.tau,
            zeta: self.case.zeta,
            all_speed: s.all_speed,
            linear_solver: s.linear_solver,
            picard_single_density: s.picard_single_density,
            acoustic_pressure: s.acoustic_pressure,
        }
    }

    pub fn explicit_params(&self) -> ExplicitParams {
        ExplicitParams {
            time_step: self.time_step,
            dt_cap: self.solver.dt_cap,
            newton_tol: self.solver.newton_tol,
            newton_max: self.solver.newton_max,
            tau: self.case.tau,
            zeta: self.case.zeta,
        }
    }

    /// Copy with every case default made explicit, as echoed in reports.
    pub fn resolved(&self) -> Result<Self> {
        Ok(Self { case: self.case.resolved()?, ..self.clone() })
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}
