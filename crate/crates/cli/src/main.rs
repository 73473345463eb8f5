//! Command-line front door: threshold curves, width estimates, phase
//! grids and null-space condition checks, all emitted as CSV with `#`
//! metadata headers.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rankmin_core::conditions::{check_condition, ConditionContext, ConditionKind};
use rankmin_core::measurements::{gaussian_matrix, MeasurementOperator, OperatorMode};
use rankmin_core::phase::{
    boundary_to_csv, cell_csv_line, empirical_boundary, run_grid_with, PhaseConfig,
    RecoveryProgram,
};
use rankmin_core::rng::{derive_seed, rng_from_seed};
use rankmin_core::solvers::SolverConfig;
use rankmin_core::thresholds::{curve_to_csv, threshold_curve, ThresholdKind};
use rankmin_core::width::{estimate_width, width_to_csv};

const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Strictness slack for condition margins reported by `check`.
const CHECK_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "rankmin", version, about = "Recovery thresholds and phase experiments for low-rank matrix recovery")]
struct Cli {
    /// Cap on parallel workers (default: RANKMIN_WORKERS or all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a threshold curve over a beta grid.
    Thresholds(ThresholdsArgs),
    /// Monte Carlo Gaussian width estimate for one (kind, n, beta).
    Width(WidthArgs),
    /// Phase-transition experiment over a (beta, mu) grid.
    Phase(PhaseArgs),
    /// Evaluate a null-space condition on sampled kernel directions.
    Check(CheckArgs),
}

#[derive(Args)]
struct ThresholdsArgs {
    /// strong | sectional | weak | psd-weak | psd-weak-alt | psd-strong |
    /// unique-weak | unique-strong
    #[arg(long)]
    kind: String,
    /// Grid as start:stop:count or a comma list, e.g. 0:1:101 or 0,0.5,1.
    #[arg(long = "beta-grid", default_value = "0:1:101")]
    beta_grid: String,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a generic gnuplot script next to --out.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Args)]
struct WidthArgs {
    /// strong | sectional | weak | psd-weak | psd-strong
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PhaseArgs {
    /// nnm | psd-trace | psd-feasible
    #[arg(long)]
    program: String,
    #[arg(long, default_value_t = 40)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Shorthand BxM: B uniform betas in [0.05, 0.95], M uniform mus in
    /// [0.1, 1].
    #[arg(long, default_value = "20x20")]
    grid: String,
    /// Explicit beta grid (overrides the --grid rows).
    #[arg(long = "beta-grid")]
    beta_grid: Option<String>,
    /// Explicit mu grid (overrides the --grid columns).
    #[arg(long = "mu-grid")]
    mu_grid: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative Frobenius error below which a trial counts as recovered.
    #[arg(long = "success-tol", default_value_t = 1e-3)]
    success_tol: f64,
    /// Solver iteration cap.
    #[arg(long = "max-iters", default_value_t = 20_000)]
    max_iters: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also extract the empirical 50% boundary into this CSV.
    #[arg(long)]
    boundary: Option<PathBuf>,
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// strong | sectional | weak | psd-weak | psd-strong |
    /// psd-unique-weak | psd-unique-strong
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    mu: f64,
    /// Number of kernel directions to sample.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A user-facing failure that should exit with the usage code.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, UsageError> {
    let parse_num = |s: &str| -> Result<f64, UsageError> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| UsageError(format!("bad number {s:?}: {e}")))
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(UsageError(format!(
                "grid {spec:?} must be start:stop:count"
            )));
        }
        let start = parse_num(parts[0])?;
        let stop = parse_num(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|e| UsageError(format!("bad count {:?}: {e}", parts[2])))?;
        if count < 2 || stop <= start {
            return Err(UsageError(format!(
                "grid {spec:?} needs stop > start and count >= 2"
            )));
        }
        Ok((0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect())
    } else {
        spec.split(',').map(parse_num).collect()
    }
}

fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), UsageError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| UsageError(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gnuplot_script(csv: &std::path::Path, xcol: usize, ycol: usize, title: &str) -> String {
    format!(
        "set datafile separator ','\nset datafile commentschars '#'\nset key top left\nset xlabel 'column {xcol}'\nset ylabel 'column {ycol}'\nplot '{}' skip 1 using {xcol}:{ycol} with linespoints title '{title}'\n",
        csv.display()
    )
}

fn write_gnuplot(out: &Option<PathBuf>, xcol: usize, ycol: usize, title: &str) -> Result<(), UsageError> {
    let Some(csv) = out else {
        return Err(UsageError("--gnuplot requires --out".into()));
    };
    let gp = csv.with_extension("gp");
    fs::write(&gp, gnuplot_script(csv, xcol, ycol, title))
        .map_err(|e| UsageError(format!("{}: {e}", gp.display())))?;
    Ok(())
}

fn cmd_thresholds(a: &ThresholdsArgs) -> Result<(), UsageError> {
    let kind = ThresholdKind::parse(&a.kind)
        .ok_or_else(|| UsageError(format!("unknown threshold kind {:?}", a.kind)))?;
    let betas = parse_grid(&a.beta_grid)?;
    let points = threshold_curve(kind, &betas)?;
    let mut text = format!(
        "# rankmin {VERSION} thresholds\n# kind = {}\n# beta-grid = {}\n# delta-residual-tol = 1e-9, quadrature-tol = 1e-13\n",
        kind.name(),
        a.beta_grid
    );
    text.push_str(&curve_to_csv(&points));
    write_output(&a.out, &text)?;
    if a.gnuplot {
        write_gnuplot(&a.out, 4, 6, &format!("{} threshold", kind.name()))?;
    }
    Ok(())
}

fn cmd_width(a: &WidthArgs) -> Result<(), UsageError> {
    let kind = ThresholdKind::parse(&a.kind)
        .ok_or_else(|| UsageError(format!("unknown width kind {:?}", a.kind)))?;
    let est = estimate_width(kind, a.n, a.beta, a.samples, a.seed)?;
    let mut text = format!(
        "# rankmin {VERSION} width\n# kind = {}, n = {}, beta = {}, samples = {}, seed = {}\n",
        kind.name(),
        a.n,
        a.beta,
        a.samples,
        a.seed
    );
    text.push_str(&width_to_csv(std::slice::from_ref(&est)));
    write_output(&a.out, &text)
}

fn cmd_phase(a: &PhaseArgs) -> Result<(), UsageError> {
    let program = RecoveryProgram::parse(&a.program)
        .ok_or_else(|| UsageError(format!("unknown program {:?}", a.program)))?;
    let (rows, cols) = a
        .grid
        .split_once('x')
        .ok_or_else(|| UsageError(format!("grid {:?} must be BxM", a.grid)))?;
    let rows: usize = rows.parse().map_err(|e| UsageError(format!("bad grid rows: {e}")))?;
    let cols: usize = cols.parse().map_err(|e| UsageError(format!("bad grid cols: {e}")))?;
    if rows < 1 || cols < 1 {
        return Err(UsageError("grid must be at least 1x1".into()));
    }
    let beta_grid = match &a.beta_grid {
        Some(g) => parse_grid(g)?,
        None => uniform_grid(0.05, 0.95, rows.max(2)),
    };
    let mu_grid = match &a.mu_grid {
        Some(g) => parse_grid(g)?,
        None => uniform_grid(0.1, 1.0, cols.max(2)),
    };
    let cfg = PhaseConfig {
        program,
        n: a.n,
        beta_grid,
        mu_grid,
        trials: a.trials,
        seed: a.seed,
        solver: SolverConfig {
            max_iters: a.max_iters,
            success_tol: a.success_tol,
            ..Default::default()
        },
    };
    let header = format!(
        "# rankmin {VERSION} phase\n# program = {}, n = {}, trials = {}, seed = {}\n# beta-grid = {:?}\n# mu-grid = {:?}\n# success-tol = {}, max-iters = {}, primal-tol = {}, dual-tol = {}\n# schema: program,n,beta,mu,m,trials,successes,non_converged\nprogram,n,beta,mu,m,trials,successes,non_converged\n",
        program.name(),
        a.n,
        a.trials,
        a.seed,
        cfg.beta_grid,
        cfg.mu_grid,
        cfg.solver.success_tol,
        cfg.solver.max_iters,
        cfg.solver.primal_tol,
        cfg.solver.dual_tol,
    );
    // stream cells so partial results survive interruption
    let cells = match &a.out {
        Some(path) => {
            let mut file = fs::File::create(path)
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            file.write_all(header.as_bytes())?;
            run_grid_with(&cfg, |c| {
                let _ = file.write_all(cell_csv_line(program, c).as_bytes());
                let _ = file.flush();
            })?
        }
        None => {
            print!("{header}");
            run_grid_with(&cfg, |c| {
                print!("{}", cell_csv_line(program, c));
            })?
        }
    };
    if let Some(bpath) = &a.boundary {
        let points = empirical_boundary(&cells);
        let mut text = format!(
            "# rankmin {VERSION} phase boundary\n# program = {}, n = {}, seed = {}\n",
            program.name(),
            a.n,
            a.seed
        );
        text.push_str(&boundary_to_csv(program, a.n, &points));
        fs::write(bpath, text).map_err(|e| UsageError(format!("{}: {e}", bpath.display())))?;
    }
    if a.gnuplot {
        write_gnuplot(&a.out, 4, 3, &format!("{} phase cells", program.name()))?;
    }
    Ok(())
}

fn cmd_check(a: &CheckArgs) -> Result<(), UsageError> {
    let kind = ConditionKind::parse(&a.kind)
        .ok_or_else(|| UsageError(format!("unknown condition kind {:?}", a.kind)))?;
    let n = a.n;
    let r = (a.beta * n as f64).round() as usize;
    let mode = if kind.is_psd() {
        OperatorMode::Symmetric(n)
    } else {
        OperatorMode::General(n)
    };
    let m = ((a.mu * mode.dim() as f64).round() as usize).clamp(1, mode.dim());
    let op_seed = derive_seed(a.seed, &[0]);
    let truth_seed = derive_seed(a.seed, &[1]);
    let op = MeasurementOperator::build(mode, m, op_seed)?;
    let ctx = match kind {
        ConditionKind::StrongSquare | ConditionKind::PsdStrong | ConditionKind::PsdUniqueStrong => {
            ConditionContext::with_rank(r)
        }
        ConditionKind::Sectional | ConditionKind::WeakFixedX => {
            let mut rng = rng_from_seed(truth_seed);
            let g1 = gaussian_matrix(n, r.max(1), &mut rng);
            let g2 = gaussian_matrix(n, r.max(1), &mut rng);
            let x0 = &g1 * g2.transpose();
            ConditionContext::for_matrix(&x0)
        }
        ConditionKind::PsdWeak | ConditionKind::PsdUniqueWeak => {
            let mut rng = rng_from_seed(truth_seed);
            let g = gaussian_matrix(n, r.max(1), &mut rng);
            let x0 = &g * g.transpose();
            ConditionContext::for_matrix(&x0)
        }
    };
    let mut text = format!(
        "# rankmin {VERSION} check\n# kind = {}, n = {n}, beta = {}, mu = {}, m = {m}, rank = {r}\n# samples = {}, seed = {}, margin-slack = {CHECK_TOL}\nkind,n,beta,mu,sample,margin,holds\n",
        kind.name(),
        a.beta,
        a.mu,
        a.samples,
        a.seed
    );
    for s in 0..a.samples as u64 {
        let w = op.sample_null_space(derive_seed(a.seed, &[2, s]))?.w;
        let rep = check_condition(kind, &w, &ctx, CHECK_TOL)?;
        text.push_str(&format!(
            "{},{n},{},{},{s},{},{}\n",
            kind.name(),
            a.beta,
            a.mu,
            rep.margin,
            rep.holds
        ));
    }
    write_output(&a.out, &text)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let workers = cli.workers.or_else(|| {
        std::env::var("RANKMIN_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(w) = workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("rankmin: could not configure {w} workers: {e}");
        }
    }
    let result = match &cli.command {
        Command::Thresholds(a) => cmd_thresholds(a),
        Command::Width(a) => cmd_width(a),
        Command::Phase(a) => cmd_phase(a),
        Command::Check(a) => cmd_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(UsageError(msg)) => {
            eprintln!("rankmin: {msg}");
            ExitCode::from(2)
        }
    }
}
