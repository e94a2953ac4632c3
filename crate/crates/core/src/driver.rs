//! Time loop shared by both schemes.

use crate::field::StateField;
use crate::reference::ExplicitRusanov;
use crate::rsimex::{Rsimex, SchemeError, StepReport};

pub trait Scheme {
    fn time_step(&self, field: &StateField) -> Result<f64, SchemeError>;
    fn advance(&self, field: &StateField, dt: f64) -> Result<(StateField, StepReport), SchemeError>;
}

impl Scheme for Rsimex {
    fn time_step(&self, field: &StateField) -> Result<f64, SchemeError> {
        Rsimex::time_step(self, field)
    }

    fn advance(&self, field: &StateField, dt: f64) -> Result<(StateField, StepReport), SchemeError> {
        Rsimex::advance(self, field, dt)
    }
}

impl Scheme for ExplicitRusanov {
    fn time_step(&self, field: &StateField) -> Result<f64, SchemeError> {
        ExplicitRusanov::time_step(self, field)
    }

    fn advance(&self, field: &StateField, dt: f64) -> Result<(StateField, StepReport), SchemeError> {
        ExplicitRusanov::advance(self, field, dt)
    }
}

/// Default guard against runaway loops.
pub const DEFAULT_MAX_STEPS: usize = 10_000_000;

/// Advances `field` to exactly `t_end`, shortening the last step if needed.
/// `on_step` sees every new field with its report.
pub fn integrate_to<S: Scheme + ?Sized>(
    scheme: &S,
    mut field: StateField,
    t_end: f64,
    max_steps: usize,
    mut on_step: impl FnMut(&StateField, &StepReport),
) -> Result<StateField, SchemeError> {
    let tol = 1e-13 * t_end.abs().max(f64::MIN_POSITIVE);
    let mut steps = 0;
    while t_end - field.t > tol {
        if steps == max_steps {
            return Err(SchemeError::TooManySteps(max_steps));
        }
        let dt = scheme.time_step(&field)?.min(t_end - field.t);
        let (mut next, mut report) = scheme.advance(&field, dt)?;
        if (t_end - next.t).abs() <= tol {
            next.t = t_end;
            report.t = t_end;
        }
        on_step(&next, &report);
        field = next;
        steps += 1;
    }
    Ok(field)
}

/// Convenience wrapper collecting every step report.
pub fn integrate<S: Scheme + ?Sized>(
    scheme: &S,
    field: StateField,
    t_end: f64,
) -> Result<(StateField, Vec<StepReport>), SchemeError> {
    let mut reports = Vec::new();
    let out = integrate_to(scheme, field, t_end, DEFAULT_MAX_STEPS, |_, r| reports.push(r.clone()))?;
    Ok((out, reports))
}
