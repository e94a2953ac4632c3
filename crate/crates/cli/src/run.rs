use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use shtc_core::diagnostics::{error_table, l1_error, write_error_csv, ConservationLedger, ErrorRow};
use shtc_core::driver::{integrate_to, DEFAULT_MAX_STEPS};
use shtc_core::{
    CaseSpec, ExplicitParams, ExplicitRusanov, Rsimex, Scheme, StateField, StepReport, Totals,
    TwoPhaseModel,
};

use crate::config::{RunConfig, SchemeKind};
use crate::output::{snapshot_name, write_json, write_snapshot};

#[derive(Debug, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub file: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub steps: usize,
    pub t_final: f64,
    pub dt: Vec<f64>,
    pub courant: Vec<f64>,
    pub picard_iterations: Vec<usize>,
    pub newton_iterations: Vec<usize>,
    pub conservation: ConservationLedger,
    /// Largest relative mass imbalance once the mass that left through the
    /// boundaries is added back.
    pub mass_budget: f64,
    pub snapshots: Vec<Snapshot>,
}

/// Dry-run report: the effective configuration and the initial state.
#[derive(Debug, Serialize)]
pub struct SeedReport {
    pub config: RunConfig,
    pub dx: f64,
    pub t_final: f64,
    pub first_dt: f64,
    pub totals: Totals,
    pub reference_densities: [f64; 2],
}

fn build_scheme(cfg: &RunConfig, model: TwoPhaseModel) -> Result<Box<dyn Scheme>> {
    Ok(match cfg.scheme {
        SchemeKind::Rsimex => {
            let (rs1, rs2) = cfg.case.reference_states()?;
            let s = Rsimex::new(model, rs1, rs2, cfg.rsimex_params())?;
            s.check_regime(&cfg.case.build(&cfg.case.grid(cfg.n_cells))?)?;
            Box::new(s)
        }
        SchemeKind::Explicit => Box::new(ExplicitRusanov::new(model, cfg.explicit_params())),
    })
}

pub fn seed_report(cfg: &RunConfig) -> Result<SeedReport> {
    let model = cfg.case.model();
    let grid = cfg.case.grid(cfg.n_cells);
    let field = cfg.case.build(&grid)?;
    let scheme = build_scheme(cfg, model)?;
    Ok(SeedReport {
        config: cfg.resolved()?,
        dx: grid.dx(),
        t_final: cfg.case.final_time(),
        first_dt: scheme.time_step(&field)?,
        totals: field.totals(),
        reference_densities: cfg.case.reference_densities()?,
    })
}

/// Integrates the configured case, writing snapshots into `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunReport> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    std::fs::write(out.join("config.toml"), cfg.resolved()?.to_toml()?)?;
    let model = cfg.case.model();
    let mut field = cfg.case.build(&cfg.case.grid(cfg.n_cells))?;
    let scheme = build_scheme(cfg, model)?;
    let t_final = cfg.case.final_time();

    let mut targets = cfg.snapshots.clone();
    if targets.last() != Some(&t_final) {
        targets.push(t_final);
    }
    let mut ledger = ConservationLedger::new(field.totals(), 1.0);
    let mut reports: Vec<StepReport> = Vec::new();
    let mut snapshots = Vec::new();
    let mass0 = field.totals().rho;
    let edge_flux = |f: &StateField| f.cells[f.cells.len() - 1].mom - f.cells[0].mom;
    let mut flux = edge_flux(&field);
    let (mut outflow, mut mass_budget) = (0.0, 0.0_f64);
    for (index, &t) in targets.iter().enumerate() {
        if t > field.t {
            field = integrate_to(scheme.as_ref(), field, t, DEFAULT_MAX_STEPS, |f, r| {
                ledger.record(f.totals());
                outflow += r.dt * flux;
                flux = edge_flux(f);
                mass_budget = mass_budget.max((f.totals().rho - mass0 + outflow).abs() / mass0);
                reports.push(r.clone());
            })
            .with_context(|| format!("solver failed after {} steps", reports.len()))?;
        }
        let name = snapshot_name(index, t);
        write_snapshot(&out.join(&name), &field, &model)?;
        log::info!("t = {t:.6e}: wrote {name}");
        snapshots.push(Snapshot { t, file: name });
    }
    let report = RunReport {
        config: cfg.resolved()?,
        steps: reports.len(),
        t_final: field.t,
        dt: reports.iter().map(|r| r.dt).collect(),
        courant: reports.iter().map(|r| r.courant).collect(),
        picard_iterations: reports.iter().map(|r| r.picard_iterations).collect(),
        newton_iterations: reports.iter().map(|r| r.newton_iterations).collect(),
        conservation: ledger,
        mass_budget,
        snapshots,
    };
    write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub config: RunConfig,
    pub pairs: Vec<PairResult>,
}

#[derive(Debug, Serialize)]
pub struct PairResult {
    pub m1: f64,
    pub m2: f64,
    pub reference_cells: usize,
    pub directory: String,
    pub rows: Vec<RowSummary>,
    /// First grid on which the scheme failed, with the reason.
    pub failure: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct RowSummary {
    pub n: usize,
    pub e_rho: f64,
    pub e_arho1: f64,
    pub e_mom: f64,
    pub e_wrel: f64,
}

impl From<&ErrorRow> for RowSummary {
    fn from(r: &ErrorRow) -> Self {
        Self {
            n: r.n_cells,
            e_rho: r.errors.rho,
            e_arho1: r.errors.alpha_rho1,
            e_mom: r.errors.mom,
            e_wrel: r.errors.w_rel,
        }
    }
}

pub struct SweepOptions {
    pub grids: Vec<usize>,
    pub pairs: Vec<(f64, f64)>,
    pub reference_cells: usize,
}

fn check_grids(grids: &[usize], reference: usize) -> Result<()> {
    if grids.is_empty() {
        bail!("empty grid list");
    }
    for w in grids.windows(2) {
        if w[1] != 2 * w[0] {
            bail!("grids must double: {} then {}", w[0], w[1]);
        }
    }
    for &n in grids {
        if n < 3 || reference % n != 0 || reference <= n {
            bail!("grid {n} does not nest in the reference grid {reference}");
        }
    }
    Ok(())
}

/// Convergence table against an explicit fine-grid reference, one per Mach
/// pair. Each pair writes `errors.csv` into its own directory.
pub fn sweep(cfg: &RunConfig, opts: &SweepOptions, out: &Path) -> Result<(SweepReport, Vec<Vec<ErrorRow>>)> {
    check_grids(&opts.grids, opts.reference_cells)?;
    let pairs = if opts.pairs.is_empty() { vec![(cfg.case.m1, cfg.case.m2)] } else { opts.pairs.clone() };
    let mut results = Vec::new();
    let mut tables = Vec::new();
    for &(m1, m2) in &pairs {
        let case = CaseSpec { m1, m2, ..cfg.case.clone() };
        let pair_cfg = RunConfig { case: case.clone(), ..cfg.clone() };
        pair_cfg.validate()?;
        let dir_name = format!("m1_{m1:e}_m2_{m2:e}");
        let dir: PathBuf = out.join(&dir_name);
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

        let mut fields: Vec<(usize, StateField)> = Vec::new();
        let mut failure = None;
        for &n in &opts.grids {
            let run_cfg = RunConfig { n_cells: n, ..pair_cfg.clone() };
            let model = case.model();
            let scheme = build_scheme(&run_cfg, model)?;
            let f0 = case.build(&case.grid(n))?;
            match integrate_to(scheme.as_ref(), f0, case.final_time(), DEFAULT_MAX_STEPS, |_, _| {}) {
                Ok(f) => {
                    log::info!("M = ({m1:e}, {m2:e}), n = {n}: done");
                    fields.push((n, f));
                }
                Err(e) => {
                    log::warn!("M = ({m1:e}, {m2:e}), n = {n}: {e}");
                    failure = Some(format!("n = {n}: {e}"));
                    break;
                }
            }
        }
        let rows = if fields.is_empty() {
            Vec::new()
        } else {
            let reference = reference_solution(&case, &cfg.explicit_params(), opts.reference_cells)?;
            let errors = fields
                .iter()
                .map(|(n, f)| Ok((*n, l1_error(f, &reference)?)))
                .collect::<Result<Vec<_>>>()?;
            error_table(&errors)?
        };
        let file = std::fs::File::create(dir.join("errors.csv"))?;
        write_error_csv(std::io::BufWriter::new(file), &rows)?;
        results.push(PairResult {
            m1,
            m2,
            reference_cells: opts.reference_cells,
            directory: dir_name,
            rows: rows.iter().map(RowSummary::from).collect(),
            failure,
        });
        tables.push(rows);
    }
    let report = SweepReport { config: cfg.resolved()?, pairs: results };
    write_json(&out.join("sweep.json"), &report)?;
    Ok((report, tables))
}

fn reference_solution(case: &CaseSpec, base: &ExplicitParams, n: usize) -> Result<StateField> {
    // the reference always resolves the acoustic waves
    let params = ExplicitParams { time_step: ExplicitParams::default().time_step, ..*base };
    let scheme = ExplicitRusanov::new(case.model(), params);
    let f0 = case.build(&case.grid(n))?;
    log::info!("reference run with {n} cells");
    integrate_to(&scheme, f0, case.final_time(), DEFAULT_MAX_STEPS, |_, _| {}).context("reference run failed")
}
