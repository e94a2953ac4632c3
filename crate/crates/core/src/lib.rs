//! Finite-volume solver for the isentropic two-phase SHTC model.
//!
//! The main scheme ([`Rsimex`]) splits each step into an implicit acoustic
//! stage, an explicit Rusanov transport stage, an implicit stiff-mixture
//! stage and the relaxation sources. [`ExplicitRusanov`] is the fully
//! explicit comparison scheme.

pub mod cases;
pub mod diagnostics;
pub mod driver;
pub mod eos;
pub mod field;
pub mod numerics;
pub mod reference;
pub mod rsimex;
pub mod state;

pub use cases::{CaseError, CaseId, CaseSpec, VelocityProfile};
pub use diagnostics::{ErrorRow, VarErrors, WpCase, WpResiduals};
pub use driver::{integrate, integrate_to, Scheme};
pub use eos::{EosError, EosKind, PhaseEos, ReferenceState};
pub use field::{CellError, StateField, Totals};
pub use numerics::{Boundary, Grid1D, LinearSolveError, SymTridiagonal};
pub use reference::{ExplicitParams, ExplicitRusanov};
pub use rsimex::{
    AcousticPressure, LinearSolverKind, RelaxParams, Rsimex, RsimexParams, SchemeError, Stage, StepReport,
    TimeStepMode,
};
pub use state::{
    MixVec, PhaseVec, RelaxationTime, ScalingParams, StateError, StateVec, TwoPhaseModel,
};
