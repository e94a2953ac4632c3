//! Error norms, convergence orders and well-preparedness monitors.

use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::eos::ReferenceState;
use crate::field::{CellError, StateField, Totals};
use crate::numerics::Grid1D;
use crate::state::TwoPhaseModel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    #[error("grids with {coarse} and {fine} cells are not nested")]
    NonNested { coarse: usize, fine: usize },
    #[error("grids cover different domains")]
    DomainMismatch,
    #[error("grid sequence must double: {prev} followed by {next}")]
    NotDoubling { prev: usize, next: usize },
    #[error(transparent)]
    State(#[from] CellError),
}

/// L1 errors of the four compared variables.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct VarErrors {
    pub rho: f64,
    pub alpha_rho1: f64,
    pub mom: f64,
    pub w_rel: f64,
}

impl VarErrors {
    pub fn as_array(&self) -> [f64; 4] {
        [self.rho, self.alpha_rho1, self.mom, self.w_rel]
    }
}

/// Component indices in `StateVec::to_array` order.
const COMPARED: [usize; 4] = [0, 2, 3, 4];

/// Block averages of `fine` over groups of `factor` cells.
pub fn coarsen(fine: &[f64], factor: usize) -> Vec<f64> {
    assert!(factor > 0 && fine.len() % factor == 0);
    let inv = 1.0 / factor as f64;
    fine.chunks_exact(factor).map(|c| c.iter().sum::<f64>() * inv).collect()
}

fn nesting_factor(coarse: &Grid1D, fine: &Grid1D) -> Result<usize, DiagnosticsError> {
    let span = (coarse.x_hi - coarse.x_lo).abs();
    if (coarse.x_lo - fine.x_lo).abs() > 1e-12 * span || (coarse.x_hi - fine.x_hi).abs() > 1e-12 * span {
        return Err(DiagnosticsError::DomainMismatch);
    }
    let (nc, nf) = (coarse.n_cells, fine.n_cells);
    if nf < nc || nf % nc != 0 {
        return Err(DiagnosticsError::NonNested { coarse: nc, fine: nf });
    }
    Ok(nf / nc)
}

/// `sum_i |w_i - ref_i| dx` for rho, alpha rho1, rho u and w, with the
/// reference block-averaged onto the grid of `field`.
pub fn l1_error(field: &StateField, reference: &StateField) -> Result<VarErrors, DiagnosticsError> {
    let factor = nesting_factor(&field.grid, &reference.grid)?;
    let dx = field.grid.dx();
    let e = COMPARED.map(|k| {
        let r = coarsen(&reference.component(k), factor);
        field
            .cells
            .iter()
            .zip(&r)
            .map(|(w, r)| (w.to_array()[k] - r).abs())
            .sum::<f64>()
            * dx
    });
    Ok(VarErrors { rho: e[0], alpha_rho1: e[1], mom: e[2], w_rel: e[3] })
}

/// `log2(prev / curr)`; `None` when either error vanishes or is not finite.
pub fn eoc(prev: f64, curr: f64) -> Option<f64> {
    if prev > 0.0 && curr > 0.0 && prev.is_finite() && curr.is_finite() {
        Some((prev / curr).log2())
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRow {
    pub n_cells: usize,
    pub errors: VarErrors,
    /// Orders against the previous row, absent on the first one.
    pub eoc: [Option<f64>; 4],
}

impl ErrorRow {
    pub const CSV_HEADER: &'static str =
        "n,e_rho,eoc_rho,e_arho1,eoc_arho1,e_mom,eoc_mom,e_wrel,eoc_wrel";

    pub fn csv_line(&self) -> String {
        let mut s = self.n_cells.to_string();
        for (e, o) in self.errors.as_array().iter().zip(&self.eoc) {
            s.push_str(&format!(",{e:.6e},"));
            match o {
                Some(v) => s.push_str(&format!("{v:.4}")),
                None => s.push_str("NA"),
            }
        }
        s
    }
}

/// Builds the table from `(n, errors)` pairs ordered by doubling `n`.
pub fn error_table(results: &[(usize, VarErrors)]) -> Result<Vec<ErrorRow>, DiagnosticsError> {
    let mut rows: Vec<ErrorRow> = Vec::with_capacity(results.len());
    for &(n, errors) in results {
        let eoc = match rows.last() {
            None => [None; 4],
            Some(prev) => {
                if n != 2 * prev.n_cells {
                    return Err(DiagnosticsError::NotDoubling { prev: prev.n_cells, next: n });
                }
                let (a, b) = (prev.errors.as_array(), errors.as_array());
                std::array::from_fn(|k| eoc(a[k], b[k]))
            }
        };
        rows.push(ErrorRow { n_cells: n, errors, eoc });
    }
    Ok(rows)
}

pub fn write_error_csv<W: Write>(mut out: W, rows: &[ErrorRow]) -> io::Result<()> {
    writeln!(out, "{}", ErrorRow::CSV_HEADER)?;
    for r in rows {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

/// Which well-prepared set the residuals refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WpCase {
    /// Compressible phase one, weakly compressible phase two.
    GasLiquid,
    /// Both phases at the same small Mach number.
    SameMach,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WpResiduals {
    /// `max |rho_k - rho_k^RS| / M_k^2`; the phase-one entry is unscaled
    /// in the gas-liquid case.
    pub density: [f64; 2],
    /// Mismatch of the leading-order pressures.
    pub pressure_mismatch: f64,
    /// `max |p1^(2) - p2^(2)|` of the linearised second-order pressures; in
    /// the gas-liquid case `max |p2^(2) - p1|`.
    pub second_order_pressure: f64,
    /// Largest centred difference quotient of the constrained fluxes
    /// `alpha_k u_k`.
    pub divergence: f64,
}

/// Well-preparedness residuals of `field` about the given linearisation.
pub fn wp_residuals(
    field: &StateField,
    model: &TwoPhaseModel,
    rs1: &ReferenceState,
    rs2: &ReferenceState,
    case: WpCase,
) -> Result<WpResiduals, DiagnosticsError> {
    let s = &model.scaling;
    let phases = field
        .cells
        .iter()
        .enumerate()
        .map(|(cell, w)| w.to_phase(s).map_err(|source| CellError { cell, source }))
        .collect::<Result<Vec<_>, _>>()?;
    let (m1sq, m2sq) = (s.m1 * s.m1, s.m2 * s.m2);
    let scale1 = match case {
        WpCase::GasLiquid => 1.0,
        WpCase::SameMach => m1sq,
    };
    let mut density = [0.0f64; 2];
    let mut second = 0.0f64;
    for (cell, v) in phases.iter().enumerate() {
        density[0] = density[0].max((v.rho1 - rs1.rho_rs).abs() / scale1);
        density[1] = density[1].max((v.rho2 - rs2.rho_rs).abs() / m2sq);
        let p2 = (rs2.linear_pressure(v.rho2) - rs2.p_rs) / m2sq;
        let gap = match case {
            WpCase::GasLiquid => {
                let p1 = model.eos1.pressure(v.rho1).map_err(|e| CellError { cell, source: e.into() })?;
                p2 - p1
            }
            WpCase::SameMach => (rs1.linear_pressure(v.rho1) - rs1.p_rs) / m1sq - p2,
        };
        second = second.max(gap.abs());
    }
    let pressure_mismatch = match case {
        WpCase::GasLiquid => rs2.p_rs.abs(),
        WpCase::SameMach => (rs1.p_rs - rs2.p_rs).abs(),
    };
    let grid = &field.grid;
    let inv = 0.5 / grid.dx();
    let f1: Vec<f64> = phases.iter().map(|v| v.alpha * v.u1).collect();
    let f2: Vec<f64> = phases.iter().map(|v| (1.0 - v.alpha) * v.u2).collect();
    let mut divergence = 0.0f64;
    for i in 0..field.len() {
        let (l, r) = (grid.left(i), grid.right(i));
        let d2 = ((f2[r] - f2[l]) * inv).abs();
        let d = match case {
            WpCase::GasLiquid => d2,
            WpCase::SameMach => d2.max(((f1[r] - f1[l]) * inv).abs()),
        };
        divergence = divergence.max(d);
    }
    Ok(WpResiduals { density, pressure_mismatch, second_order_pressure: second, divergence })
}

/// Running record of the conserved totals against their initial values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationLedger {
    pub initial: Totals,
    pub last: Totals,
    pub max_drift: f64,
    /// Normalisation floor for components with vanishing initial total.
    pub floor: f64,
}

impl ConservationLedger {
    pub fn new(initial: Totals, floor: f64) -> Self {
        Self { initial, last: initial, max_drift: 0.0, floor }
    }

    pub fn record(&mut self, totals: Totals) {
        self.last = totals;
        self.max_drift = self.max_drift.max(totals.max_relative_change(&self.initial, self.floor));
    }
}

/// Spatial means of the phase densities, used as their leading-order parts.
pub fn mean_phase_densities(field: &StateField, model: &TwoPhaseModel) -> Result<[f64; 2], DiagnosticsError> {
    let phases = field.phases(model)?;
    let n = phases.len() as f64;
    let (a, b) = phases
        .iter()
        .fold((0.0, 0.0), |(a, b), c| (a + c.phase.rho1, b + c.phase.rho2));
    Ok([a / n, b / n])
}

/// Positions (face indices between cell `i` and `i+1`) of the `count`
/// steepest jumps of `q`, each a local maximum of `|q[i+1] - q[i]|`, sorted
/// by position.
pub fn steepest_jumps(q: &[f64], count: usize) -> Vec<usize> {
    let d: Vec<f64> = q.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let mut peaks: Vec<usize> = (0..d.len())
        .filter(|&i| {
            let l = if i > 0 { d[i - 1] } else { 0.0 };
            let r = d.get(i + 1).copied().unwrap_or(0.0);
            d[i] > 0.0 && d[i] >= l && d[i] > r
        })
        .collect();
    peaks.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    peaks.truncate(count);
    peaks.sort_unstable();
    peaks
}

/// First position where `q` crosses `level`, linearly interpolated between
/// cell centres.
pub fn crossing_position(q: &[f64], grid: &Grid1D, level: f64) -> Option<f64> {
    q.windows(2).enumerate().find_map(|(i, w)| {
        let (a, b) = (w[0] - level, w[1] - level);
        if a == 0.0 {
            Some(grid.center(i))
        } else if a * b < 0.0 {
            Some(grid.center(i) + grid.dx() * a / (a - b))
        } else {
            None
        }
    })
}

/// `max_i |p2_i - p1_i|` with the pressures of the equations of state.
pub fn max_pressure_gap(field: &StateField, model: &TwoPhaseModel) -> Result<f64, DiagnosticsError> {
    Ok(field
        .phases(model)?
        .iter()
        .map(|c| (c.p2 - c.p1).abs())
        .fold(0.0, f64::max))
}
