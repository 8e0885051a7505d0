//! Command-line driver: solve problem files, or assemble and optionally
//! solve risk measure problems from market files.

use clap::{Args, Parser, Subcommand, ValueEnum};
use molp::io::{export_off, parse_problem, write_problem, write_report};
use molp::lp::LpTolerances;
use molp::polyhedron::minimize_vrep;
use molp::problem::{MolpProblem, OrderingCone, GEOM_TOL};
use molp::risk::{build_avar, build_rwc, parse_market, MarketFile, RiskProblem};
use molp::two_phase::{solve, Algorithm, SolveOptions, SolveReport, SolveStatus};
use molp::polyhedron::VRep;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "molp", version, about = "Multiple-objective linear programming solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and write the result files.
    Solve {
        /// Problem file to solve.
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Prefix for result files (default: the input path without its
        /// extension).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write an OFF boundary mesh of the upper image, truncated at the
        /// vertex bounding box inflated by this margin (3 objectives only).
        #[arg(long, value_name = "MARGIN")]
        off: Option<f64>,
    },
    /// Build a risk measure problem from a market file.
    Risk {
        #[command(subcommand)]
        measure: RiskCommand,
    },
}

#[derive(Subcommand)]
enum RiskCommand {
    /// Average value at risk; needs `alpha` in the market file.
    Avar(RiskArgs),
    /// Relaxed worst case; needs `rwc_eps` and `rwc_lambda`.
    Rwc(RiskArgs),
}

#[derive(Args)]
struct RiskArgs {
    /// Market file describing assets, scenarios, and the payoff.
    file: PathBuf,
    /// Prefix for the emitted problem file and any result files.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Solve the assembled problem in-process as well.
    #[arg(long)]
    solve: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Primal,
    Dual,
}

#[derive(Args)]
struct SolverArgs {
    /// Approximation algorithm: refine an outer set (primal) or an inner
    /// one (dual).
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Primal)]
    algorithm: AlgorithmArg,
    /// Approximation accuracy in steps of c; 0 solves exactly.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Finish each vertex round instead of restarting after every cut.
    #[arg(long)]
    no_break: bool,
    /// Skip the boundedness certificate; the image must be bounded below
    /// in every dual cone direction.
    #[arg(long)]
    assume_bounded: bool,
    /// Scalar feasibility/optimality tolerance for the simplex method.
    #[arg(long, value_name = "TOL")]
    lp_tol: Option<f64>,
    /// Tolerance for vertex enumeration and tightness tests.
    #[arg(long, value_name = "TOL")]
    geom_tol: Option<f64>,
    /// Drop conically redundant cone generators before solving.
    #[arg(long)]
    minimal_cone: bool,
    /// Worker threads for the per-round scalar programs; needs --no-break.
    #[arg(long, value_name = "K")]
    parallel: Option<usize>,
}

impl SolverArgs {
    fn to_options(&self) -> Result<SolveOptions, String> {
        let threads = self.parallel.unwrap_or(1);
        if threads == 0 {
            return Err("--parallel needs at least one thread".into());
        }
        if threads > 1 && !self.no_break {
            return Err("--parallel requires --no-break".into());
        }
        if self.eps < 0.0 {
            return Err("--eps must be nonnegative".into());
        }
        Ok(SolveOptions {
            algorithm: match self.algorithm {
                AlgorithmArg::Primal => Algorithm::Primal,
                AlgorithmArg::Dual => Algorithm::Dual,
            },
            eps: self.eps,
            break_mode: !self.no_break,
            assume_bounded: self.assume_bounded,
            lp_tolerances: self
                .lp_tol
                .map(LpTolerances::with_feasibility)
                .unwrap_or_default(),
            geom_tol: self.geom_tol.unwrap_or(GEOM_TOL),
            threads,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve {
            file,
            solver,
            output,
            off,
        } => run_solve(&file, &solver, output, off),
        Command::Risk { measure } => run_risk(measure),
    };
    match code {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn default_prefix(input: &Path) -> PathBuf {
    input.with_extension("")
}

fn status_exit(status: &SolveStatus) -> ExitCode {
    ExitCode::from(match status {
        SolveStatus::Solved => 0u8,
        SolveStatus::PrimalInfeasible => 2,
        SolveStatus::DualInfeasible => 3,
        SolveStatus::UpperImageContainsLines => 4,
        SolveStatus::NumericalFailure(_) => 5,
    })
}

fn prune_cone(prob: &mut MolpProblem) -> Result<(), String> {
    let q = prob.num_objectives;
    let minimized = minimize_vrep(
        &VRep {
            dim: q,
            points: vec![vec![0.0; q]],
            rays: prob.cone.generators.clone(),
        },
        GEOM_TOL,
    );
    prob.cone = OrderingCone::from_generators(minimized.rays, Some(prob.cone.c.clone()), GEOM_TOL)
        .map_err(|e| e.to_string())?;
    Ok(())
}

fn print_stats(report: &SolveReport, elapsed: f64) {
    println!("status          {}", report.status);
    println!("time (s)        {elapsed:.6}");
    if let Some(sol) = &report.solution {
        println!("|sbar|          {}", sol.sbar.len());
        println!("|sbar_h|        {}", sol.sbar_h.len());
        println!("|tbar|          {}", sol.tbar.len());
    }
    let stats = &report.stats;
    println!("lps             {}", stats.lp_count);
    println!("t_max (s)       {:.6}", stats.lp_time_max);
    let avg = stats.lp_time_avg();
    if avg > 0.0 {
        println!("t_max / t_avg   {:.2}", stats.lp_time_max / avg);
    }
}

fn solve_and_report(
    prob: &MolpProblem,
    options: &SolveOptions,
    prefix: &Path,
    off: Option<f64>,
) -> Result<ExitCode, String> {
    let start = Instant::now();
    let report = solve(prob, options);
    let elapsed = start.elapsed().as_secs_f64();
    print_stats(&report, elapsed);
    if let SolveStatus::NumericalFailure(msg) = &report.status {
        eprintln!("error: {msg}");
    }
    if report.solution.is_some() {
        let files = write_report(&report, prefix).map_err(|e| e.to_string())?;
        for f in &files {
            eprintln!("wrote {}", f.display());
        }
        if let Some(margin) = off {
            let sol = report.solution.as_ref().unwrap();
            let vrep = &sol.p_vrep;
            if vrep.dim != 3 {
                return Err(format!(
                    "--off needs 3 objectives, this problem has {}",
                    vrep.dim
                ));
            }
            let mut lo = vec![f64::INFINITY; 3];
            let mut hi = vec![f64::NEG_INFINITY; 3];
            for p in &vrep.points {
                for k in 0..3 {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
            for k in 0..3 {
                lo[k] -= margin;
                hi[k] += margin;
            }
            let text = export_off(vrep, &lo, &hi).map_err(|e| e.to_string())?;
            let path = {
                let mut s = prefix.as_os_str().to_os_string();
                s.push(".off");
                PathBuf::from(s)
            };
            std::fs::write(&path, text).map_err(|e| e.to_string())?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(status_exit(&report.status))
}

fn run_solve(
    file: &Path,
    solver: &SolverArgs,
    output: Option<PathBuf>,
    off: Option<f64>,
) -> Result<ExitCode, String> {
    let options = solver.to_options()?;
    let text =
        std::fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let mut prob = parse_problem(&text).map_err(|e| format!("{}: {e}", file.display()))?;
    if solver.minimal_cone {
        prune_cone(&mut prob)?;
    }
    let prefix = output.unwrap_or_else(|| default_prefix(file));
    solve_and_report(&prob, &options, &prefix, off)
}

fn run_risk(measure: RiskCommand) -> Result<ExitCode, String> {
    let (args, build): (
        &RiskArgs,
        Box<dyn Fn(&MarketFile) -> Result<RiskProblem, String>>,
    ) = match &measure {
        RiskCommand::Avar(args) => {
            let minimal = args.solver.minimal_cone;
            (
                args,
                Box::new(move |file: &MarketFile| {
                    let alpha = file
                        .alpha
                        .as_ref()
                        .ok_or("market file lacks an `alpha` record")?;
                    build_avar(&file.market, &file.payoff, alpha, minimal)
                        .map_err(|e| e.to_string())
                }),
            )
        }
        RiskCommand::Rwc(args) => {
            let minimal = args.solver.minimal_cone;
            (
                args,
                Box::new(move |file: &MarketFile| {
                    let eps = file
                        .rwc_eps
                        .as_ref()
                        .ok_or("market file lacks an `rwc_eps` record")?;
                    let lambda = file
                        .rwc_lambda
                        .as_ref()
                        .ok_or("market file lacks an `rwc_lambda` record")?;
                    build_rwc(&file.market, &file.payoff, eps, lambda, minimal)
                        .map_err(|e| e.to_string())
                }),
            )
        }
    };

    let options = args.solver.to_options()?;
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| format!("{}: {e}", args.file.display()))?;
    let market = parse_market(&text).map_err(|e| format!("{}: {e}", args.file.display()))?;
    let built = build(&market)?;

    let prefix = args
        .output
        .clone()
        .unwrap_or_else(|| default_prefix(&args.file));
    let vlp_path = {
        let mut s = prefix.as_os_str().to_os_string();
        s.push(".vlp");
        PathBuf::from(s)
    };
    std::fs::write(&vlp_path, write_problem(&built.problem)).map_err(|e| e.to_string())?;
    eprintln!("wrote {}", vlp_path.display());
    if built
        .outcome_to_asset
        .iter()
        .enumerate()
        .any(|(k, &a)| k != a)
    {
        for (k, &asset) in built.outcome_to_asset.iter().enumerate() {
            eprintln!("outcome {} is asset {}", k + 1, asset + 1);
        }
    }

    if args.solve {
        solve_and_report(&built.problem, &options, &prefix, None)
    } else {
        Ok(ExitCode::from(0))
    }
}
