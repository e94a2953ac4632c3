use serde::Serialize;

use crate::numerics::Grid1D;
use crate::state::{CellPhases, StateError, StateVec, TwoPhaseModel};

/// Cell averages of the state vector on a uniform grid at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    pub cells: Vec<StateVec>,
    pub grid: Grid1D,
    pub t: f64,
}

/// Integrals `sum_i W_i dx` of the conserved components.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Totals {
    pub rho: f64,
    pub alpha_rho: f64,
    pub alpha_rho1: f64,
    pub mom: f64,
}

impl Totals {
    /// Largest relative change over the four components; each is
    /// normalised by `max(|before|, floor)`.
    pub fn max_relative_change(&self, before: &Totals, floor: f64) -> f64 {
        [
            (self.rho, before.rho),
            (self.alpha_rho, before.alpha_rho),
            (self.alpha_rho1, before.alpha_rho1),
            (self.mom, before.mom),
        ]
        .iter()
        .map(|(a, b)| (a - b).abs() / b.abs().max(floor))
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("cell {cell}: {source}")]
pub struct CellError {
    pub cell: usize,
    #[source]
    pub source: StateError,
}

impl StateField {
    pub fn new(cells: Vec<StateVec>, grid: Grid1D) -> Self {
        assert_eq!(cells.len(), grid.n_cells, "cell count must match the grid");
        Self { cells, grid, t: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn component(&self, k: usize) -> Vec<f64> {
        self.cells.iter().map(|w| w.to_array()[k]).collect()
    }

    pub fn totals(&self) -> Totals {
        let dx = self.grid.dx();
        let mut t = Totals::default();
        for w in &self.cells {
            t.rho += w.rho * dx;
            t.alpha_rho += w.alpha_rho * dx;
            t.alpha_rho1 += w.alpha_rho1 * dx;
            t.mom += w.mom * dx;
        }
        t
    }

    /// Derived phase quantities of every cell; fails on the first invalid cell.
    pub fn phases(&self, model: &TwoPhaseModel) -> Result<Vec<CellPhases>, CellError> {
        self.cells
            .iter()
            .enumerate()
            .map(|(cell, w)| model.cell(w).map_err(|source| CellError { cell, source }))
            .collect()
    }

    pub fn validate(&self, model: &TwoPhaseModel) -> Result<(), CellError> {
        self.phases(model).map(|_| ())
    }
}
