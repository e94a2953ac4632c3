//! Grid, stencils, interface fluxes, linear solves and time step bounds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{CellError, StateField};
use crate::state::TwoPhaseModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    /// Zero-gradient ghost cells: every component is mirrored unchanged.
    NoFlux,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid1D {
    pub n_cells: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub bc: Boundary,
}

impl Grid1D {
    pub fn new(n_cells: usize, x_lo: f64, x_hi: f64, bc: Boundary) -> Self {
        assert!(n_cells >= 3, "need at least three cells");
        assert!(x_hi > x_lo, "empty domain");
        Self { n_cells, x_lo, x_hi, bc }
    }

    pub fn unit(n_cells: usize, bc: Boundary) -> Self {
        Self::new(n_cells, 0.0, 1.0, bc)
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.n_cells as f64
    }

    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        self.x_lo + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    /// Index of the left neighbour, resolving the ghost cell.
    #[inline]
    pub fn left(&self, i: usize) -> usize {
        match (i, self.bc) {
            (0, Boundary::Periodic) => self.n_cells - 1,
            (0, Boundary::NoFlux) => 0,
            _ => i - 1,
        }
    }

    /// Index of the right neighbour, resolving the ghost cell.
    #[inline]
    pub fn right(&self, i: usize) -> usize {
        let last = self.n_cells - 1;
        match self.bc {
            Boundary::Periodic if i == last => 0,
            Boundary::NoFlux if i == last => last,
            _ => i + 1,
        }
    }

    /// Cells on either side of face `j` (`0..=n_cells`), face `j` being the
    /// left face of cell `j`.
    #[inline]
    pub fn face_cells(&self, j: usize) -> (usize, usize) {
        let n = self.n_cells;
        match self.bc {
            Boundary::Periodic => ((j + n - 1) % n, j % n),
            Boundary::NoFlux => (j.max(1) - 1, j.min(n - 1)),
        }
    }
}

/// One explicit conservative Rusanov update `q - lam (F_{i+1/2} - F_{i-1/2})`
/// with `lam = dt/dx`, given cellwise physical fluxes and wave-speed bounds.
/// Also returns the largest interface Courant number `a lam`.
pub fn rusanov_update<const N: usize>(
    grid: &Grid1D,
    states: &[[f64; N]],
    fluxes: &[[f64; N]],
    speeds: &[f64],
    lam: f64,
) -> (Vec<[f64; N]>, f64) {
    let n = grid.n_cells;
    let mut courant: f64 = 0.0;
    let faces: Vec<[f64; N]> = (0..=n)
        .map(|j| {
            let (l, r) = grid.face_cells(j);
            let a = speeds[l].max(speeds[r]);
            courant = courant.max(a * lam);
            rusanov_combine(&fluxes[l], &fluxes[r], &states[l], &states[r], a)
        })
        .collect();
    let updated = (0..n)
        .map(|i| std::array::from_fn(|k| states[i][k] - lam * (faces[i + 1][k] - faces[i][k])))
        .collect();
    (updated, courant)
}

/// Centered first difference `(q_{i+1} - q_{i-1}) / (2 dx)`.
pub fn centered_difference(q: &[f64], grid: &Grid1D) -> Vec<f64> {
    let inv = 0.5 / grid.dx();
    (0..q.len())
        .map(|i| (q[grid.right(i)] - q[grid.left(i)]) * inv)
        .collect()
}

/// Compact second difference `(q_{i+1} - 2 q_i + q_{i-1}) / dx^2`.
pub fn second_difference(q: &[f64], grid: &Grid1D) -> Vec<f64> {
    let inv = 1.0 / (grid.dx() * grid.dx());
    (0..q.len())
        .map(|i| (q[grid.right(i)] - 2.0 * q[i] + q[grid.left(i)]) * inv)
        .collect()
}

/// Face averages `s_{i+1/2} = (s_i + s_{i+1}) / 2`, entry `i` being the right face of cell `i`.
fn face_average(s: &[f64], grid: &Grid1D) -> Vec<f64> {
    (0..s.len()).map(|i| 0.5 * (s[i] + s[grid.right(i)])).collect()
}

/// Discretisation of `d/dx (s d/dx y)` where `y = s~ W` is supplied cellwise:
/// `(s_{i+1/2} (y_{i+1} - y_i) - s_{i-1/2} (y_i - y_{i-1})) / dx^2`.
pub fn mixed_second_difference(s: &[f64], y: &[f64], grid: &Grid1D) -> Vec<f64> {
    assert_eq!(s.len(), y.len());
    let inv = 1.0 / (grid.dx() * grid.dx());
    let faces = face_average(s, grid);
    (0..y.len())
        .map(|i| {
            let (l, r) = (grid.left(i), grid.right(i));
            (faces[i] * (y[r] - y[i]) - faces[l] * (y[i] - y[l])) * inv
        })
        .collect()
}

/// Rusanov combination `(f_l + f_r)/2 - a (w_r - w_l)/2` of precomputed fluxes.
#[inline]
pub fn rusanov_combine<const N: usize>(
    fl: &[f64; N],
    fr: &[f64; N],
    wl: &[f64; N],
    wr: &[f64; N],
    a: f64,
) -> [f64; N] {
    std::array::from_fn(|k| 0.5 * (fl[k] + fr[k]) - 0.5 * a * (wr[k] - wl[k]))
}

/// Rusanov interface flux; `max_speed` returns the largest wave-speed magnitude
/// of one state and the larger of the two neighbours is used.
pub fn rusanov_flux<const N: usize, E>(
    wl: &[f64; N],
    wr: &[f64; N],
    flux: impl Fn(&[f64; N]) -> Result<[f64; N], E>,
    max_speed: impl Fn(&[f64; N]) -> Result<f64, E>,
) -> Result<[f64; N], E> {
    let a = max_speed(wl)?.max(max_speed(wr)?);
    Ok(rusanov_combine(&flux(wl)?, &flux(wr)?, wl, wr, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum LinearSolveError {
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("dimension mismatch: matrix {matrix}, right-hand side {rhs}")]
    DimensionMismatch { matrix: usize, rhs: usize },
    #[error("conjugate gradients stalled after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
}

/// Symmetric tridiagonal matrix, optionally with the periodic corner entries
/// `A[0][n-1] = A[n-1][0] = corner`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i] = A[i][i+1]`.
    pub off: Vec<f64>,
    pub corner: f64,
    pub periodic: bool,
}

impl SymTridiagonal {
    pub fn identity(n: usize) -> Self {
        Self {
            diag: vec![1.0; n],
            off: vec![0.0; n.saturating_sub(1)],
            corner: 0.0,
            periodic: false,
        }
    }

    /// `diag(base) - theta * L_s`, where `L_s` is the matrix of
    /// [`mixed_second_difference`] for the weights `s`.
    pub fn shifted_weighted_laplacian(base: &[f64], s: &[f64], theta: f64, grid: &Grid1D) -> Self {
        let n = base.len();
        assert_eq!(n, grid.n_cells);
        assert_eq!(s.len(), n);
        let k = theta / (grid.dx() * grid.dx());
        let faces = face_average(s, grid);
        let periodic = grid.bc == Boundary::Periodic;
        let mut diag = base.to_vec();
        let mut off = vec![0.0; n - 1];
        for i in 0..n - 1 {
            let c = k * faces[i];
            off[i] = -c;
            diag[i] += c;
            diag[i + 1] += c;
        }
        let mut corner = 0.0;
        if periodic {
            let c = k * faces[n - 1];
            corner = -c;
            diag[0] += c;
            diag[n - 1] += c;
        }
        Self { diag, off, corner, periodic }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n - 1 {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        if self.periodic {
            y[0] += self.corner * x[n - 1];
            y[n - 1] += self.corner * x[0];
        }
        y
    }

    /// Row-major dense copy, for inspection and small oracles.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
        }
        for i in 0..n - 1 {
            a[i][i + 1] = self.off[i];
            a[i + 1][i] = self.off[i];
        }
        if self.periodic {
            a[0][n - 1] += self.corner;
            a[n - 1][0] += self.corner;
        }
        a
    }

    /// Direct solve by an `L D L^T` factorisation. Periodic matrices are
    /// handled by bordering: the leading `(n-1)` block is factorised and the
    /// last unknown comes from the Schur complement.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, LinearSolveError> {
        let n = self.len();
        if rhs.len() != n {
            return Err(LinearSolveError::DimensionMismatch { matrix: n, rhs: rhs.len() });
        }
        if !self.periodic {
            let f = LdlFactor::new(&self.diag, &self.off)?;
            return Ok(f.solve(rhs));
        }
        if n < 3 {
            return dense_cholesky_solve(&self.to_dense(), rhs);
        }
        let m = n - 1;
        let f = LdlFactor::new(&self.diag[..m], &self.off[..m - 1])?;
        let mut border = vec![0.0; m];
        border[0] = self.corner;
        border[m - 1] += self.off[m - 1];
        let z_b = f.solve(&border);
        let z_r = f.solve(&rhs[..m]);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let schur = self.diag[m] - dot(&border, &z_b);
        if !(schur > 0.0) {
            return Err(LinearSolveError::NotPositiveDefinite { pivot: m, value: schur });
        }
        let last = (rhs[m] - dot(&border, &z_r)) / schur;
        let mut x: Vec<f64> = z_r.iter().zip(&z_b).map(|(r, b)| r - b * last).collect();
        x.push(last);
        Ok(x)
    }

    /// Conjugate gradients with Jacobi preconditioning.
    pub fn solve_cg(
        &self,
        rhs: &[f64],
        rel_tol: f64,
        max_iter: usize,
    ) -> Result<Vec<f64>, LinearSolveError> {
        let n = self.len();
        if rhs.len() != n {
            return Err(LinearSolveError::DimensionMismatch { matrix: n, rhs: rhs.len() });
        }
        if let Some((pivot, &value)) = self.diag.iter().enumerate().find(|(_, d)| !(**d > 0.0)) {
            return Err(LinearSolveError::NotPositiveDefinite { pivot, value });
        }
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let target = rel_tol * norm(rhs).max(f64::MIN_POSITIVE);
        let mut x = vec![0.0; n];
        let mut r = rhs.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&self.diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for it in 0..max_iter {
            if norm(&r) <= target {
                return Ok(x);
            }
            let ap = self.matvec(&p);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(LinearSolveError::NotPositiveDefinite { pivot: it, value: pap });
            }
            let step = rz / pap;
            for i in 0..n {
                x[i] += step * p[i];
                r[i] -= step * ap[i];
            }
            for i in 0..n {
                z[i] = r[i] / self.diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        if norm(&r) <= target {
            Ok(x)
        } else {
            Err(LinearSolveError::NotConverged { iterations: max_iter, residual: norm(&r) })
        }
    }
}

struct LdlFactor {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl LdlFactor {
    fn new(diag: &[f64], off: &[f64]) -> Result<Self, LinearSolveError> {
        let n = diag.len();
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n {
            let di = if i == 0 {
                diag[0]
            } else {
                diag[i] - l[i - 1] * l[i - 1] * d[i - 1]
            };
            if !(di > 0.0) {
                return Err(LinearSolveError::NotPositiveDefinite { pivot: i, value: di });
            }
            d.push(di);
            if i + 1 < n {
                l.push(off[i] / di);
            }
        }
        Ok(Self { d, l })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = rhs.to_vec();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
        x
    }
}

fn dense_cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>, LinearSolveError> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let v = a[i][i] - s;
                if !(v > 0.0) {
                    return Err(LinearSolveError::NotPositiveDefinite { pivot: i, value: v });
                }
                l[i][i] = v.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    Ok(x)
}

/// Material time step `nu_u dx / max(2|u|, |u1 + u2 - u|)`, or `cap` when
/// every velocity vanishes.
pub fn dt_material(
    field: &StateField,
    model: &TwoPhaseModel,
    nu_u: f64,
    cap: f64,
) -> Result<f64, CellError> {
    let mut speed: f64 = 0.0;
    for (cell, w) in field.cells.iter().enumerate() {
        let v = w
            .to_phase(&model.scaling)
            .map_err(|source| CellError { cell, source })?;
        let u = w.velocity();
        speed = speed.max((2.0 * u).abs()).max((v.u1 + v.u2 - u).abs());
    }
    Ok(bounded_step(nu_u * field.grid.dx(), speed, cap))
}

/// Acoustic time step `nu_ac dx / max(|u1 +- c1/M1|, |u2 +- c2/M2|)`.
pub fn dt_acoustic(
    field: &StateField,
    model: &TwoPhaseModel,
    nu_ac: f64,
    cap: f64,
) -> Result<f64, CellError> {
    let mut speed: f64 = 0.0;
    for (cell, w) in field.cells.iter().enumerate() {
        let c = model.cell(w).map_err(|source| CellError { cell, source })?;
        speed = speed.max(model.max_acoustic_speed(&c));
    }
    Ok(bounded_step(nu_ac * field.grid.dx(), speed, cap))
}

fn bounded_step(length: f64, speed: f64, cap: f64) -> f64 {
    if speed > 0.0 {
        (length / speed).min(cap)
    } else {
        cap
    }
}
