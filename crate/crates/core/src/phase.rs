//! Monte Carlo phase-transition experiments over a (beta, mu) grid, and
//! empirical 50%-boundary extraction for comparison with the theoretical
//! threshold curves.
//!
//! Every trial is seeded by mixing the master seed with the cell's beta
//! and mu bit patterns and the trial index, so any cell is recomputable
//! in isolation and the full grid is byte-reproducible regardless of
//! worker count. Trials within a cell run in parallel; cells are emitted
//! in grid order so callers can flush partial results.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::measurements::{gaussian_matrix, MeasurementOperator, OperatorMode};
use crate::rng::{derive_seed, rng_from_seed};
use crate::solvers::{
    solve_nnm, solve_psd_feasible, solve_psd_trace, success_check, SolverConfig,
};
use crate::{Error, Result};

/// Which recovery program the experiment solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoveryProgram {
    /// Nuclear norm minimization over all square matrices.
    Nnm,
    /// Trace minimization over the PSD cone.
    PsdTrace,
    /// PSD feasibility (find any PSD point on the affine slice).
    PsdFeasible,
}

impl RecoveryProgram {
    pub const ALL: [RecoveryProgram; 3] = [
        RecoveryProgram::Nnm,
        RecoveryProgram::PsdTrace,
        RecoveryProgram::PsdFeasible,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RecoveryProgram::Nnm => "nnm",
            RecoveryProgram::PsdTrace => "psd-trace",
            RecoveryProgram::PsdFeasible => "psd-feasible",
        }
    }

    pub fn parse(s: &str) -> Option<RecoveryProgram> {
        Self::ALL.iter().copied().find(|p| p.name() == s)
    }

    pub fn mode(self, n: usize) -> OperatorMode {
        match self {
            RecoveryProgram::Nnm => OperatorMode::General(n),
            _ => OperatorMode::Symmetric(n),
        }
    }

    /// Measurement count for a sampling rate: round(mu * n^2) for the
    /// general program, round(mu * n(n+1)/2) for the PSD programs.
    pub fn measurement_count(self, n: usize, mu: f64) -> usize {
        (mu * self.mode(n).dim() as f64).round() as usize
    }
}

/// Full experiment description.
#[derive(Debug, Clone)]
pub struct PhaseConfig {
    pub program: RecoveryProgram,
    pub n: usize,
    pub beta_grid: Vec<f64>,
    pub mu_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl PhaseConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if self.n == 0 {
            return Err(Error::Domain("n must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Domain("need at least one trial per cell".into()));
        }
        if self.beta_grid.is_empty() || self.mu_grid.is_empty() {
            return Err(Error::Domain("grids must be nonempty".into()));
        }
        for &b in &self.beta_grid {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::Domain(format!("beta {b} outside [0, 1]")));
            }
        }
        for &m in &self.mu_grid {
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::Domain(format!("mu {m} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Tally for one (beta, mu) grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCell {
    pub beta: f64,
    pub mu: f64,
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    /// Trials the solver failed to converge on; counted as failures but
    /// reported separately so solver weakness is distinguishable from
    /// genuine phase failure.
    pub non_converged: usize,
}

impl PhaseCell {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

fn draw_truth(program: RecoveryProgram, n: usize, r: usize, seed: u64) -> DMatrix<f64> {
    if r == 0 {
        return DMatrix::zeros(n, n);
    }
    let mut rng = rng_from_seed(seed);
    match program {
        RecoveryProgram::Nnm => {
            let g1 = gaussian_matrix(n, r, &mut rng);
            let g2 = gaussian_matrix(n, r, &mut rng);
            &g1 * g2.transpose()
        }
        RecoveryProgram::PsdTrace | RecoveryProgram::PsdFeasible => {
            let g = gaussian_matrix(n, r, &mut rng);
            &g * g.transpose()
        }
    }
}

/// Run all trials of one grid cell: draw a fresh operator and ground
/// truth per trial, measure, solve, classify.
pub fn run_cell(cfg: &PhaseConfig, beta: f64, mu: f64) -> Result<PhaseCell> {
    cfg.validate()?;
    let n = cfg.n;
    let dim = cfg.program.mode(n).dim();
    let m = cfg.program.measurement_count(n, mu).clamp(1, dim);
    let r = (beta * n as f64).round() as usize;
    let results: Vec<(bool, bool)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let op_seed = derive_seed(cfg.seed, &[beta.to_bits(), mu.to_bits(), t, 0]);
            let x_seed = derive_seed(cfg.seed, &[beta.to_bits(), mu.to_bits(), t, 1]);
            let op = MeasurementOperator::build(cfg.program.mode(n), m, op_seed)?;
            let x0 = draw_truth(cfg.program, n, r, x_seed);
            let y = op.apply(&x0)?;
            let outcome = match cfg.program {
                RecoveryProgram::Nnm => solve_nnm(&op, &y, &cfg.solver, Some(&x0))?,
                RecoveryProgram::PsdTrace => solve_psd_trace(&op, &y, &cfg.solver, Some(&x0))?,
                RecoveryProgram::PsdFeasible => {
                    solve_psd_feasible(&op, &y, &cfg.solver, Some(&x0))?
                }
            };
            let ok = success_check(&outcome, &x0, cfg.solver.success_tol);
            Ok((ok, !outcome.converged))
        })
        .collect::<Result<_>>()?;
    Ok(PhaseCell {
        beta,
        mu,
        n,
        m,
        trials: cfg.trials,
        successes: results.iter().filter(|r| r.0).count(),
        non_converged: results.iter().filter(|r| r.1).count(),
    })
}

/// Run the whole grid (beta outer, mu inner), invoking `on_cell` as each
/// cell completes so partial results can be flushed.
pub fn run_grid_with<F: FnMut(&PhaseCell)>(
    cfg: &PhaseConfig,
    mut on_cell: F,
) -> Result<Vec<PhaseCell>> {
    cfg.validate()?;
    let mut cells = Vec::with_capacity(cfg.beta_grid.len() * cfg.mu_grid.len());
    for &beta in &cfg.beta_grid {
        for &mu in &cfg.mu_grid {
            let cell = run_cell(cfg, beta, mu)?;
            on_cell(&cell);
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// [`run_grid_with`] without a flush callback.
pub fn run_grid(cfg: &PhaseConfig) -> Result<Vec<PhaseCell>> {
    run_grid_with(cfg, |_| {})
}

/// How a beta column's 50% crossing was determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Censoring {
    /// Interpolated between two observed rates straddling 1/2.
    Observed,
    /// Every cell succeeded at least half the time; the crossing lies
    /// below the smallest mu in the column.
    CensoredLow,
    /// No cell reached a 50% success rate.
    CensoredHigh,
}

impl Censoring {
    pub fn name(self) -> &'static str {
        match self {
            Censoring::Observed => "observed",
            Censoring::CensoredLow => "censored-low",
            Censoring::CensoredHigh => "censored-high",
        }
    }

    pub fn parse(s: &str) -> Option<Censoring> {
        [Censoring::Observed, Censoring::CensoredLow, Censoring::CensoredHigh]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

/// Empirical phase boundary for one beta column.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub beta: f64,
    /// Interpolated mu at 50% success; NaN when censored.
    pub mu50: f64,
    pub censoring: Censoring,
}

/// Extract the 50% boundary per beta column by linear interpolation of
/// the success rate across mu. Rate decreases beyond sampling noise are
/// logged, not fatal.
pub fn empirical_boundary(cells: &[PhaseCell]) -> Vec<BoundaryPoint> {
    let mut betas: Vec<f64> = Vec::new();
    for c in cells {
        if !betas.contains(&c.beta) {
            betas.push(c.beta);
        }
    }
    let mut out = Vec::with_capacity(betas.len());
    for beta in betas {
        let mut column: Vec<&PhaseCell> = cells.iter().filter(|c| c.beta == beta).collect();
        column.sort_by(|a, b| a.mu.partial_cmp(&b.mu).unwrap());
        let rates: Vec<f64> = column.iter().map(|c| c.success_rate()).collect();
        for w in 0..rates.len().saturating_sub(1) {
            let noise = 1.0 / (column[w].trials as f64).sqrt();
            if rates[w + 1] + noise < rates[w] {
                log::warn!(
                    "success rate not monotone at beta = {beta}: mu {} -> {} gives {} -> {}",
                    column[w].mu,
                    column[w + 1].mu,
                    rates[w],
                    rates[w + 1]
                );
            }
        }
        let last_below = rates.iter().rposition(|&r| r < 0.5);
        let point = match last_below {
            None => BoundaryPoint {
                beta,
                mu50: f64::NAN,
                censoring: Censoring::CensoredLow,
            },
            Some(i) if i + 1 == rates.len() => BoundaryPoint {
                beta,
                mu50: f64::NAN,
                censoring: Censoring::CensoredHigh,
            },
            Some(i) => {
                let (r0, r1) = (rates[i], rates[i + 1]);
                let (m0, m1) = (column[i].mu, column[i + 1].mu);
                BoundaryPoint {
                    beta,
                    mu50: m0 + (0.5 - r0) * (m1 - m0) / (r1 - r0),
                    censoring: Censoring::Observed,
                }
            }
        };
        out.push(point);
    }
    out
}

/// CSV schema: `program,n,beta,mu,m,trials,successes,non_converged`.
pub fn cells_to_csv(program: RecoveryProgram, cells: &[PhaseCell]) -> String {
    let mut out = String::from("program,n,beta,mu,m,trials,successes,non_converged\n");
    for c in cells {
        out.push_str(&cell_csv_line(program, c));
    }
    out
}

/// A single data row of the cell schema (used for incremental flushing).
pub fn cell_csv_line(program: RecoveryProgram, c: &PhaseCell) -> String {
    format!(
        "{},{},{},{},{},{},{},{}\n",
        program.name(),
        c.n,
        c.beta,
        c.mu,
        c.m,
        c.trials,
        c.successes,
        c.non_converged
    )
}

/// Parse [`cells_to_csv`] output; returns the program tag and cells.
pub fn cells_from_csv(text: &str) -> Result<(Option<RecoveryProgram>, Vec<PhaseCell>)> {
    let mut program = None;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("program,") {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(Error::CsvParse(format!("expected 8 fields: {line}")));
        }
        let prog = RecoveryProgram::parse(f[0])
            .ok_or_else(|| Error::CsvParse(format!("unknown program {}", f[0])))?;
        program.get_or_insert(prog);
        let usize_of = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::CsvParse(format!("bad count {s}")))
        };
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::CsvParse(format!("bad float {s}")))
        };
        out.push(PhaseCell {
            n: usize_of(f[1])?,
            beta: num(f[2])?,
            mu: num(f[3])?,
            m: usize_of(f[4])?,
            trials: usize_of(f[5])?,
            successes: usize_of(f[6])?,
            non_converged: usize_of(f[7])?,
        });
    }
    Ok((program, out))
}

/// Boundary CSV schema: `program,n,beta,mu50,censoring`.
pub fn boundary_to_csv(program: RecoveryProgram, n: usize, points: &[BoundaryPoint]) -> String {
    let mut out = String::from("program,n,beta,mu50,censoring\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            program.name(),
            n,
            p.beta,
            p.mu50,
            p.censoring.name()
        ));
    }
    out
}
