use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use shtc_core::{StateField, TwoPhaseModel};

pub const SNAPSHOT_HEADER: &str = "x,rho,alpha,rho1,rho2,u,u1,u2,w_rel,p1,p2";

/// Writes one row per cell at full double precision.
pub fn write_snapshot(path: &Path, field: &StateField, model: &TwoPhaseModel) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{SNAPSHOT_HEADER}")?;
    for (i, w) in field.cells.iter().enumerate() {
        let c = model
            .cell(w)
            .with_context(|| format!("cell {i} invalid at t = {}", field.t))?;
        let v = &c.phase;
        let row = [
            field.grid.center(i),
            w.rho,
            c.alpha,
            v.rho1,
            v.rho2,
            c.u,
            v.u1,
            v.u2,
            w.w_rel,
            c.p1,
            c.p2,
        ];
        let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// File name of the snapshot taken at time `t`.
pub fn snapshot_name(index: usize, t: f64) -> String {
    format!("snapshot_{index:03}_t{t:.6e}.csv")
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
