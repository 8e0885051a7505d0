//! Orchestration of the full solve: certify that the image is bounded
//! below in every needed direction (or let the caller assert it), solve the
//! homogeneous recession problem for seeds, then run the chosen
//! approximation algorithm on the original problem.

use crate::benson::{
    solve_dual, solve_primal, BensonConfig, BensonError, PrimalDualSolution, SolveStats,
};
use crate::duality::{weight_from_dual, DualityContext};
use crate::linalg::{dot, norm_inf};
use crate::lp::{solve_lp, LpResult, LpStatus, LpTolerances, Sense, StandardLp};
use crate::problem::{MolpProblem, GEOM_TOL};
use crate::scalarize::{build_bounding_problem, homogenize};
use std::fmt;
use std::time::Instant;

/// Which approximation algorithm phase 2 (and phase 1) runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Primal,
    Dual,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    /// Approximation accuracy in steps of `c`; 0 solves exactly.
    pub eps: f64,
    /// Re-enumerate vertices after every accepted cut instead of finishing
    /// the round.
    pub break_mode: bool,
    /// Skip the boundedness certificate and recession solve; the caller
    /// asserts that the image is bounded below in all dual cone directions.
    pub assume_bounded: bool,
    pub lp_tolerances: LpTolerances,
    pub geom_tol: f64,
    /// Worker threads for per-round LPs (effective without break mode).
    pub threads: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            algorithm: Algorithm::Primal,
            eps: 0.0,
            break_mode: true,
            assume_bounded: false,
            lp_tolerances: LpTolerances::default(),
            geom_tol: GEOM_TOL,
            threads: 1,
        }
    }
}

impl SolveOptions {
    fn benson_config(&self) -> BensonConfig {
        BensonConfig {
            lp_tolerances: self.lp_tolerances,
            geom_tol: self.geom_tol,
            threads: self.threads,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus {
    Solved,
    PrimalInfeasible,
    DualInfeasible,
    UpperImageContainsLines,
    NumericalFailure(String),
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveStatus::Solved => write!(f, "solved"),
            SolveStatus::PrimalInfeasible => write!(f, "infeasible"),
            SolveStatus::DualInfeasible => write!(f, "dual infeasible (objective unbounded)"),
            SolveStatus::UpperImageContainsLines => {
                write!(f, "upper image contains lines")
            }
            SolveStatus::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

/// What the returned lists certify. A relaxed dual run yields an
/// approximate infimizer and a dual solution, but its minimizer list is not
/// itself an approximate solution of the primal problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionGrade {
    Exact,
    EpsilonSolution,
    EpsilonInfimizerOnly,
}

#[derive(Debug)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub grade: Option<SolutionGrade>,
    /// Truncation weight found by the boundedness certificate (absent when
    /// the caller asserted boundedness).
    pub eta: Option<Vec<f64>>,
    pub solution: Option<PrimalDualSolution>,
    /// Combined counters over the certificate, phase 1, and phase 2.
    pub stats: SolveStats,
}

const ETA_ROUND_LIMIT: usize = 10_000;
/// Absolute threshold for reading seeds off the recession solution.
const EXTRACT_TOL: f64 = 1e-7;

fn timed(
    lp: &StandardLp,
    tolerances: LpTolerances,
    stats: &mut SolveStats,
) -> Result<LpResult, SolveStatus> {
    let start = Instant::now();
    let result = solve_lp(lp, None, tolerances);
    stats.record(start.elapsed().as_secs_f64());
    result.map_err(|e| SolveStatus::NumericalFailure(e.to_string()))
}

/// Bound interval for each dual row price, from which sides of the row are
/// finite.
fn price_bounds(lower: f64, upper: f64) -> (f64, f64) {
    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => (f64::NEG_INFINITY, f64::INFINITY),
        (true, false) => (0.0, f64::INFINITY),
        (false, true) => (f64::NEG_INFINITY, 0.0),
        (false, false) => (0.0, 0.0),
    }
}

/// Row interval for the stationarity residual `(B'u - P'w)_j`, from which
/// sides of the variable are finite; `None` drops the row (both bounds
/// finite leave the sign free).
fn stationarity_bounds(lower: f64, upper: f64) -> Option<(f64, f64)> {
    match (lower.is_finite(), upper.is_finite()) {
        (false, false) => Some((0.0, 0.0)),
        (true, false) => Some((f64::NEG_INFINITY, 0.0)),
        (false, true) => Some((0.0, f64::INFINITY)),
        (true, true) => None,
    }
}

/// Appends the rows `(B'u)_j - (P'w)_j` for each variable whose bound
/// structure constrains the dual, with `u` occupying the first `m` columns
/// and `w` the next `q`.
fn push_stationarity_rows(prob: &MolpProblem, lp: &mut StandardLp) {
    let cs = &prob.constraints;
    let m = cs.num_rows;
    let mut next_row = lp.row_lower.len();
    let mut var_row: Vec<Option<usize>> = vec![None; cs.num_vars];
    for j in 0..cs.num_vars {
        if let Some((lo, hi)) = stationarity_bounds(cs.var_lower[j], cs.var_upper[j]) {
            var_row[j] = Some(next_row);
            lp.row_lower.push(lo);
            lp.row_upper.push(hi);
            next_row += 1;
        }
    }
    for &(i, j, v) in &cs.entries {
        if let Some(r) = var_row[j] {
            lp.entries.push((r, i, v));
        }
    }
    for &(k, j, v) in &prob.objective_entries {
        if let Some(r) = var_row[j] {
            lp.entries.push((r, m + k, -v));
        }
    }
}

/// Feasibility probe for the dual problem: does any weight in the dual
/// cone with `c'w = 1` admit row prices balancing the objective rows?
fn dual_feasible(
    prob: &MolpProblem,
    tolerances: LpTolerances,
    stats: &mut SolveStats,
) -> Result<bool, SolveStatus> {
    let cs = &prob.constraints;
    let m = cs.num_rows;
    let q = prob.num_objectives;
    let mut lp = StandardLp {
        sense: Sense::Minimize,
        objective: vec![0.0; m + q],
        entries: Vec::new(),
        row_lower: Vec::new(),
        row_upper: Vec::new(),
        col_lower: Vec::with_capacity(m + q),
        col_upper: Vec::with_capacity(m + q),
    };
    for i in 0..m {
        let (lo, hi) = price_bounds(cs.row_lower[i], cs.row_upper[i]);
        lp.col_lower.push(lo);
        lp.col_upper.push(hi);
    }
    lp.col_lower.extend(std::iter::repeat_n(f64::NEG_INFINITY, q));
    lp.col_upper.extend(std::iter::repeat_n(f64::INFINITY, q));

    push_stationarity_rows(prob, &mut lp);

    let norm_row = lp.row_lower.len();
    for (k, ck) in prob.cone.c.iter().enumerate() {
        if *ck != 0.0 {
            lp.entries.push((norm_row, m + k, *ck));
        }
    }
    lp.row_lower.push(1.0);
    lp.row_upper.push(1.0);
    for y in &prob.cone.generators {
        let r = lp.row_lower.len();
        for (k, yk) in y.iter().enumerate() {
            if *yk != 0.0 {
                lp.entries.push((r, m + k, *yk));
            }
        }
        lp.row_lower.push(0.0);
        lp.row_upper.push(f64::INFINITY);
    }

    let r = timed(&lp, tolerances, stats)?;
    Ok(r.status == LpStatus::Optimal)
}

/// Master step of the certificate: the weight most interior to the dual
/// cone and the collected image-ray cuts, measured by the common margin.
fn eta_master(
    prob: &MolpProblem,
    cuts: &[Vec<f64>],
    tolerances: LpTolerances,
    stats: &mut SolveStats,
) -> Result<(Vec<f64>, f64), SolveStatus> {
    let cs = &prob.constraints;
    let m = cs.num_rows;
    let q = prob.num_objectives;
    let delta = m + q;
    let mut lp = StandardLp {
        sense: Sense::Maximize,
        objective: vec![0.0; delta + 1],
        entries: Vec::new(),
        row_lower: Vec::new(),
        row_upper: Vec::new(),
        col_lower: Vec::with_capacity(delta + 1),
        col_upper: Vec::with_capacity(delta + 1),
    };
    lp.objective[delta] = 1.0;
    for i in 0..m {
        let (lo, hi) = price_bounds(cs.row_lower[i], cs.row_upper[i]);
        lp.col_lower.push(lo);
        lp.col_upper.push(hi);
    }
    lp.col_lower.extend(std::iter::repeat_n(f64::NEG_INFINITY, q));
    lp.col_upper.extend(std::iter::repeat_n(f64::INFINITY, q));
    lp.col_lower.push(f64::NEG_INFINITY);
    lp.col_upper.push(1.0);

    push_stationarity_rows(prob, &mut lp);

    let norm_row = lp.row_lower.len();
    for (k, ck) in prob.cone.c.iter().enumerate() {
        if *ck != 0.0 {
            lp.entries.push((norm_row, m + k, *ck));
        }
    }
    lp.row_lower.push(1.0);
    lp.row_upper.push(1.0);
    for margin_vec in prob.cone.generators.iter().chain(cuts) {
        let r = lp.row_lower.len();
        for (k, vk) in margin_vec.iter().enumerate() {
            if *vk != 0.0 {
                lp.entries.push((r, m + k, *vk));
            }
        }
        lp.entries.push((r, delta, -1.0));
        lp.row_lower.push(0.0);
        lp.row_upper.push(f64::INFINITY);
    }

    let r = timed(&lp, tolerances, stats)?;
    if r.status != LpStatus::Optimal {
        return Err(SolveStatus::NumericalFailure(
            "interior-weight master program did not solve".into(),
        ));
    }
    Ok((r.primal[m..m + q].to_vec(), r.objective))
}

/// Searches the boxed recession cone for an image direction on which the
/// candidate weight fails to be strictly positive. Returns its image.
fn eta_oracle(
    prob_h: &MolpProblem,
    eta: &[f64],
    tol: f64,
    tolerances: LpTolerances,
    stats: &mut SolveStats,
) -> Result<Option<Vec<f64>>, SolveStatus> {
    let cs = &prob_h.constraints;
    let boxed_lower: Vec<f64> = cs.var_lower.iter().map(|l| l.max(-1.0)).collect();
    let boxed_upper: Vec<f64> = cs.var_upper.iter().map(|u| u.min(1.0)).collect();

    let mut lp = StandardLp {
        sense: Sense::Minimize,
        objective: prob_h.weighted_objective(eta),
        entries: cs.entries.clone(),
        row_lower: cs.row_lower.clone(),
        row_upper: cs.row_upper.clone(),
        col_lower: boxed_lower,
        col_upper: boxed_upper,
    };
    let r = timed(&lp, tolerances, stats)?;
    if r.status != LpStatus::Optimal {
        return Err(SolveStatus::NumericalFailure(
            "recession oracle did not solve".into(),
        ));
    }
    if r.objective < -tol {
        return Ok(Some(prob_h.image(&r.primal)));
    }

    // The weight is nonnegative on the whole boxed cone; look for nonzero
    // image directions in its kernel, one image coordinate and sign at a
    // time.
    let kernel_row = cs.num_rows;
    for (j, coef) in prob_h.weighted_objective(eta).into_iter().enumerate() {
        if coef != 0.0 {
            lp.entries.push((kernel_row, j, coef));
        }
    }
    lp.row_lower.push(f64::NEG_INFINITY);
    lp.row_upper.push(0.0);
    lp.sense = Sense::Maximize;
    for i in 0..prob_h.num_objectives {
        for sign in [1.0, -1.0] {
            let mut objective = vec![0.0; cs.num_vars];
            for &(k, j, v) in &prob_h.objective_entries {
                if k == i {
                    objective[j] += sign * v;
                }
            }
            lp.objective = objective;
            let r = timed(&lp, tolerances, stats)?;
            if r.status != LpStatus::Optimal {
                return Err(SolveStatus::NumericalFailure(
                    "recession sign probe did not solve".into(),
                ));
            }
            if r.objective > tol {
                return Ok(Some(prob_h.image(&r.primal)));
            }
        }
    }
    Ok(None)
}

/// Finds a weight `eta` with `c'eta = 1` that is strictly positive on every
/// nonzero direction of the image's recession cone, certifying that the
/// truncated recession problem bounds the image. Fails with
/// `DualInfeasible` when no weight admits dual row prices at all, and with
/// `UpperImageContainsLines` when no weight has positive margin.
pub fn find_eta(
    prob: &MolpProblem,
    options: &SolveOptions,
    stats: &mut SolveStats,
) -> Result<Vec<f64>, SolveStatus> {
    if !dual_feasible(prob, options.lp_tolerances, stats)? {
        return Err(SolveStatus::DualInfeasible);
    }
    let prob_h = homogenize(prob);
    let mut cuts: Vec<Vec<f64>> = Vec::new();
    for _ in 0..ETA_ROUND_LIMIT {
        let (eta, delta) = eta_master(prob, &cuts, options.lp_tolerances, stats)?;
        if delta <= options.geom_tol {
            return Err(SolveStatus::UpperImageContainsLines);
        }
        match eta_oracle(
            &prob_h,
            &eta,
            options.geom_tol,
            options.lp_tolerances,
            stats,
        )? {
            Some(witness) => cuts.push(witness),
            None => return Ok(eta),
        }
    }
    Err(SolveStatus::NumericalFailure(
        "interior-weight search did not converge".into(),
    ))
}

/// Seed weights used when no recession information is available: the dual
/// cone generators, rescaled to unit product with `c`.
pub fn default_seeds(prob: &MolpProblem) -> Vec<(Vec<f64>, Vec<f64>)> {
    let m = prob.constraints.num_rows;
    prob.cone
        .dual_generators
        .iter()
        .map(|z| {
            let s = dot(z, &prob.cone.c);
            (vec![0.0; m], z.iter().map(|v| v / s).collect())
        })
        .collect()
}

/// Solves the truncated recession problem and reads off phase-2 seeds: the
/// nonzero recession minimizers, and the dual solutions whose lower-image
/// point has last coordinate zero.
pub fn phase_one(
    prob: &MolpProblem,
    eta: &[f64],
    options: &SolveOptions,
    stats: &mut SolveStats,
) -> Result<(Vec<Vec<f64>>, Vec<(Vec<f64>, Vec<f64>)>), SolveStatus> {
    let prob_eta = build_bounding_problem(&homogenize(prob), eta);
    let seeds = default_seeds(&prob_eta);
    let config = options.benson_config();
    let solved = match options.algorithm {
        Algorithm::Primal => solve_primal(&prob_eta, &[], &seeds, 0.0, options.break_mode, &config),
        Algorithm::Dual => solve_dual(&prob_eta, &[], &seeds, 0.0, options.break_mode, &config),
    };
    let sol = match solved {
        Ok(sol) => sol,
        Err(BensonError::PrimalInfeasible) | Err(BensonError::NoVertex) => {
            return Err(SolveStatus::NumericalFailure(
                "truncated recession problem lost feasibility or pointedness".into(),
            ))
        }
        Err(BensonError::NumericalFailure(msg)) => {
            return Err(SolveStatus::NumericalFailure(msg))
        }
    };
    stats.merge(&sol.stats);

    let seed_sh: Vec<Vec<f64>> = sol
        .sbar
        .iter()
        .filter(|x| norm_inf(x) > EXTRACT_TOL)
        .cloned()
        .collect();
    let ctx = DualityContext::new(prob.cone.c.clone()).expect("normalized c");
    let q = prob.num_objectives;
    let m = prob.constraints.num_rows;
    let seed_th: Vec<(Vec<f64>, Vec<f64>)> = sol
        .dstar_vrep
        .points
        .iter()
        .filter(|y| y[q - 1].abs() <= EXTRACT_TOL)
        .map(|y| (vec![0.0; m], weight_from_dual(y, &ctx)))
        .collect();
    if seed_th.is_empty() {
        return Err(SolveStatus::NumericalFailure(
            "recession solution produced no usable seed weights".into(),
        ));
    }
    Ok((seed_sh, seed_th))
}

/// Full pipeline: boundedness certificate and recession solve (unless the
/// caller asserts boundedness), then the chosen algorithm on the original
/// problem.
pub fn solve(prob: &MolpProblem, options: &SolveOptions) -> SolveReport {
    let mut stats = SolveStats::default();
    let mut eta_out = None;

    let (seed_sh, seed_th) = if options.assume_bounded {
        (Vec::new(), default_seeds(prob))
    } else {
        let eta = match find_eta(prob, options, &mut stats) {
            Ok(eta) => eta,
            Err(status) => {
                return SolveReport {
                    status,
                    grade: None,
                    eta: None,
                    solution: None,
                    stats,
                }
            }
        };
        let seeds = match phase_one(prob, &eta, options, &mut stats) {
            Ok(seeds) => seeds,
            Err(status) => {
                return SolveReport {
                    status,
                    grade: None,
                    eta: Some(eta),
                    solution: None,
                    stats,
                }
            }
        };
        eta_out = Some(eta);
        seeds
    };

    let config = options.benson_config();
    let solved = match options.algorithm {
        Algorithm::Primal => solve_primal(
            prob,
            &seed_sh,
            &seed_th,
            options.eps,
            options.break_mode,
            &config,
        ),
        Algorithm::Dual => solve_dual(
            prob,
            &seed_sh,
            &seed_th,
            options.eps,
            options.break_mode,
            &config,
        ),
    };
    match solved {
        Ok(sol) => {
            stats.merge(&sol.stats);
            let grade = if options.eps == 0.0 {
                SolutionGrade::Exact
            } else if options.algorithm == Algorithm::Primal {
                SolutionGrade::EpsilonSolution
            } else {
                SolutionGrade::EpsilonInfimizerOnly
            };
            SolveReport {
                status: SolveStatus::Solved,
                grade: Some(grade),
                eta: eta_out,
                solution: Some(sol),
                stats,
            }
        }
        Err(BensonError::PrimalInfeasible) => SolveReport {
            status: SolveStatus::PrimalInfeasible,
            grade: None,
            eta: eta_out,
            solution: None,
            stats,
        },
        Err(BensonError::NoVertex) => SolveReport {
            status: SolveStatus::UpperImageContainsLines,
            grade: None,
            eta: eta_out,
            solution: None,
            stats,
        },
        Err(BensonError::NumericalFailure(msg)) => SolveReport {
            status: SolveStatus::NumericalFailure(msg),
            grade: None,
            eta: eta_out,
            solution: None,
            stats,
        },
    }
}
