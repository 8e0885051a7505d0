//! Outer-approximation solvers: the primal variant cuts the upper image
//! down from outside with one distance LP per candidate vertex, the dual
//! variant grows an inner description whose dual-space shadow shrinks onto
//! the lower image with one weighted-sum LP per candidate. Both support an
//! absolute accuracy `eps` (measured in steps of `c`), break and no-break
//! cut scheduling, and optional intra-round parallelism.

use crate::duality::weight_from_dual;
use crate::linalg::dot;
use crate::lp::{solve_lp, Basis, LpResult, LpStatus, LpTolerances, StandardLp};
use crate::polyhedron::{
    dual_from_inner, dual_from_outer, minimize_vrep, PolyError, VRep,
};
use crate::problem::MolpProblem;
use crate::scalarize::{build_p1, build_p2, recover_p2_cut};
use std::time::Instant;
use thiserror::Error;

/// A feasible point of the dual problem: constraint-row prices `u`, weight
/// `w` with `c'w = 1`, and the common optimal value of the weighted-sum
/// pair at `w`.
#[derive(Debug, Clone)]
pub struct DualPair {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub value: f64,
}

impl DualPair {
    /// The lower-image point this pair witnesses: the weight's first q-1
    /// coordinates followed by the attained value.
    pub fn dual_point(&self) -> Vec<f64> {
        let q = self.w.len();
        let mut y = Vec::with_capacity(q);
        y.extend_from_slice(&self.w[..q - 1]);
        y.push(self.value);
        y
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    /// Outer rounds completed.
    pub iterations: usize,
    /// Scalar LPs solved, including seeding.
    pub lp_count: usize,
    /// Longest single LP solve in seconds.
    pub lp_time_max: f64,
    /// Total seconds spent inside LP solves.
    pub lp_time_total: f64,
}

impl SolveStats {
    pub fn record(&mut self, seconds: f64) {
        self.lp_count += 1;
        self.lp_time_total += seconds;
        if seconds > self.lp_time_max {
            self.lp_time_max = seconds;
        }
    }

    pub fn lp_time_avg(&self) -> f64 {
        if self.lp_count == 0 {
            0.0
        } else {
            self.lp_time_total / self.lp_count as f64
        }
    }

    pub fn merge(&mut self, other: &SolveStats) {
        self.iterations += other.iterations;
        self.lp_count += other.lp_count;
        self.lp_time_total += other.lp_time_total;
        self.lp_time_max = self.lp_time_max.max(other.lp_time_max);
    }
}

/// Finite approximation of a solved problem: minimizers, homogeneous
/// minimizers, dual solutions, and generator descriptions of both images.
#[derive(Debug, Clone)]
pub struct PrimalDualSolution {
    pub sbar: Vec<Vec<f64>>,
    pub sbar_h: Vec<Vec<f64>>,
    pub tbar: Vec<DualPair>,
    pub p_vrep: VRep,
    pub dstar_vrep: VRep,
    pub epsilon: f64,
    pub stats: SolveStats,
}

#[derive(Debug, Error)]
pub enum BensonError {
    #[error("problem is infeasible")]
    PrimalInfeasible,
    #[error("upper image has no vertex")]
    NoVertex,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

/// Shared knobs for both algorithm variants.
#[derive(Debug, Clone)]
pub struct BensonConfig {
    pub lp_tolerances: LpTolerances,
    /// Geometric tolerance for vertex enumeration, duplicate suppression,
    /// and pruning.
    pub geom_tol: f64,
    /// Worker threads for the per-vertex LPs of one round; effective only
    /// without break mode.
    pub threads: usize,
}

impl Default for BensonConfig {
    fn default() -> Self {
        BensonConfig {
            lp_tolerances: LpTolerances::default(),
            geom_tol: crate::problem::GEOM_TOL,
            threads: 1,
        }
    }
}

const MAX_ROUNDS: usize = 1_000_000;

fn timed_solve(
    lp: &StandardLp,
    warm: Option<&Basis>,
    config: &BensonConfig,
    stats: &mut SolveStats,
) -> Result<LpResult, BensonError> {
    let start = Instant::now();
    let result = solve_lp(lp, warm, config.lp_tolerances);
    stats.record(start.elapsed().as_secs_f64());
    result.map_err(|e| BensonError::NumericalFailure(e.to_string()))
}

/// Solves the weighted-sum program at each seed weight to initialize the
/// dual solution list. Infeasibility of any instance proves the whole
/// problem infeasible.
fn seed_tbar(
    prob: &MolpProblem,
    seed_th: &[(Vec<f64>, Vec<f64>)],
    config: &BensonConfig,
    stats: &mut SolveStats,
) -> Result<Vec<DualPair>, BensonError> {
    let m = prob.constraints.num_rows;
    let mut tbar = Vec::with_capacity(seed_th.len());
    for (_, w) in seed_th {
        let lp = build_p1(prob, w);
        let r = timed_solve(&lp, None, config, stats)?;
        match r.status {
            LpStatus::Optimal => tbar.push(DualPair {
                u: r.dual[..m].to_vec(),
                w: w.clone(),
                value: r.objective,
            }),
            LpStatus::Infeasible => return Err(BensonError::PrimalInfeasible),
            LpStatus::Unbounded => {
                return Err(BensonError::NumericalFailure(
                    "weighted-sum program unbounded at a seed weight".into(),
                ))
            }
        }
    }
    Ok(tbar)
}

fn is_duplicate_cut(tbar: &[DualPair], w: &[f64], offset: f64, tol: f64) -> bool {
    tbar.iter().any(|pair| {
        (pair.value - offset).abs() <= tol
            && pair.w.iter().zip(w).all(|(a, b)| (a - b).abs() <= tol)
    })
}

fn is_duplicate_point(points: &[Vec<f64>], y: &[f64], tol: f64) -> bool {
    points
        .iter()
        .any(|p| p.iter().zip(y).all(|(a, b)| (a - b).abs() <= tol))
}

/// Per-vertex outcome of one distance-program solve.
struct VertexCut {
    z: f64,
    w: Vec<f64>,
    offset: f64,
    u: Vec<f64>,
    x: Vec<f64>,
}

fn solve_vertex_p2(
    prob: &MolpProblem,
    t: &[f64],
    warm: Option<&Basis>,
    config: &BensonConfig,
    stats: &mut SolveStats,
) -> Result<(VertexCut, Option<Basis>), BensonError> {
    let lp = build_p2(prob, t);
    let r = timed_solve(&lp, warm, config, stats)?;
    match r.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(BensonError::NumericalFailure(
                "distance program infeasible on a feasible problem".into(),
            ))
        }
        LpStatus::Unbounded => return Err(BensonError::NoVertex),
    }
    let cut = recover_p2_cut(prob, t, &r);
    Ok((
        VertexCut {
            z: cut.z,
            w: cut.w,
            offset: cut.offset,
            u: cut.u,
            x: cut.x,
        },
        r.basis,
    ))
}

/// Cuts the upper image out of an initial outer set: each round enumerates
/// the current approximation's vertices and either confirms a vertex (its
/// distance value is at most `eps`) or refines the approximation with the
/// supporting halfspace found at it.
pub fn solve_primal(
    prob: &MolpProblem,
    seed_sh: &[Vec<f64>],
    seed_th: &[(Vec<f64>, Vec<f64>)],
    eps: f64,
    break_mode: bool,
    config: &BensonConfig,
) -> Result<PrimalDualSolution, BensonError> {
    let c = &prob.cone.c;
    let tol = config.geom_tol;
    let mut stats = SolveStats::default();
    let mut tbar = seed_tbar(prob, seed_th, config, &mut stats)?;

    let mut warm: Option<Basis> = None;
    let mut p_vrep;
    let mut sbar: Vec<Vec<f64>>;
    loop {
        stats.iterations += 1;
        if stats.iterations > MAX_ROUNDS {
            return Err(BensonError::NumericalFailure(
                "outer round limit exceeded".into(),
            ));
        }
        sbar = Vec::new();
        let tstar: Vec<Vec<f64>> = tbar.iter().map(DualPair::dual_point).collect();
        p_vrep = match dual_from_outer(&tstar, c, tol) {
            Ok(v) => v,
            Err(PolyError::ContainsLine) => return Err(BensonError::NoVertex),
            Err(PolyError::Empty) => {
                return Err(BensonError::NumericalFailure(
                    "outer approximation became empty".into(),
                ))
            }
        };

        let mut cut_added = false;
        if config.threads > 1 && !break_mode && p_vrep.points.len() > 1 {
            let outcomes = solve_round_parallel(prob, &p_vrep.points, config, &mut stats)?;
            for cut in outcomes {
                if cut.z > eps && !is_duplicate_cut(&tbar, &cut.w, cut.offset, tol) {
                    tbar.push(DualPair {
                        u: cut.u,
                        w: cut.w,
                        value: cut.offset,
                    });
                    cut_added = true;
                } else {
                    sbar.push(cut.x);
                }
            }
        } else {
            for t in &p_vrep.points {
                let (cut, basis) = solve_vertex_p2(prob, t, warm.as_ref(), config, &mut stats)?;
                warm = basis;
                if cut.z > eps && !is_duplicate_cut(&tbar, &cut.w, cut.offset, tol) {
                    tbar.push(DualPair {
                        u: cut.u,
                        w: cut.w,
                        value: cut.offset,
                    });
                    cut_added = true;
                    if break_mode {
                        break;
                    }
                } else {
                    sbar.push(cut.x);
                }
            }
        }
        if !cut_added {
            break;
        }
    }

    dedup_decisions(&mut sbar, tol);
    let dstar_vrep = assemble_dstar(&tbar, c, tol);
    Ok(PrimalDualSolution {
        sbar,
        sbar_h: seed_sh.to_vec(),
        tbar,
        p_vrep,
        dstar_vrep,
        epsilon: eps,
        stats,
    })
}

fn solve_round_parallel(
    prob: &MolpProblem,
    vertices: &[Vec<f64>],
    config: &BensonConfig,
    stats: &mut SolveStats,
) -> Result<Vec<VertexCut>, BensonError> {
    let workers = config.threads.min(vertices.len());
    let mut slots: Vec<Option<Result<(VertexCut, SolveStats), BensonError>>> = Vec::new();
    slots.resize_with(vertices.len(), || None);

    std::thread::scope(|scope| {
        let mut rest: &mut [Option<_>] = &mut slots;
        let mut offset = 0;
        for worker in 0..workers {
            let lo = vertices.len() * worker / workers;
            let hi = vertices.len() * (worker + 1) / workers;
            let (mine, tail) = rest.split_at_mut(hi - offset);
            rest = tail;
            offset = hi;
            let chunk = &vertices[lo..hi];
            scope.spawn(move || {
                let mut warm: Option<Basis> = None;
                for (slot, t) in mine.iter_mut().zip(chunk) {
                    let mut local = SolveStats::default();
                    *slot = Some(
                        solve_vertex_p2(prob, t, warm.as_ref(), config, &mut local).map(
                            |(cut, basis)| {
                                warm = basis;
                                (cut, local)
                            },
                        ),
                    );
                }
            });
        }
    });

    let mut outcomes = Vec::with_capacity(vertices.len());
    for slot in slots {
        let (cut, local) = slot.expect("worker filled every slot")?;
        stats.merge(&SolveStats {
            iterations: 0,
            ..local
        });
        outcomes.push(cut);
    }
    Ok(outcomes)
}

/// Grows an inner description of the upper image: each round projects the
/// current points into the dual space, enumerates that outer set's
/// vertices, and for each one either certifies it as a dual solution or
/// harvests the weighted-sum minimizer that separates it.
pub fn solve_dual(
    prob: &MolpProblem,
    seed_sh: &[Vec<f64>],
    seed_th: &[(Vec<f64>, Vec<f64>)],
    eps: f64,
    break_mode: bool,
    config: &BensonConfig,
) -> Result<PrimalDualSolution, BensonError> {
    let c = &prob.cone.c;
    let q = prob.num_objectives;
    let m = prob.constraints.num_rows;
    let tol = config.geom_tol;
    let mut stats = SolveStats::default();

    let mut t_dirs: Vec<Vec<f64>> = seed_sh.iter().map(|x| prob.image(x)).collect();
    t_dirs.extend(prob.cone.generators.iter().cloned());

    let mut w_mean = vec![0.0; q];
    for (_, w) in seed_th {
        for (mi, wi) in w_mean.iter_mut().zip(w) {
            *mi += wi;
        }
    }
    let scale = dot(c, &w_mean);
    if scale.abs() <= tol {
        return Err(BensonError::NumericalFailure(
            "seed weights average to a degenerate weight".into(),
        ));
    }
    for wi in &mut w_mean {
        *wi /= scale;
    }

    let first = timed_solve(&build_p1(prob, &w_mean), None, config, &mut stats)?;
    let mut sbar: Vec<Vec<f64>> = match first.status {
        LpStatus::Optimal => vec![first.primal.clone()],
        LpStatus::Infeasible => return Err(BensonError::PrimalInfeasible),
        LpStatus::Unbounded => {
            return Err(BensonError::NumericalFailure(
                "weighted-sum program unbounded at the mean seed weight".into(),
            ))
        }
    };

    let mut tbar: Vec<DualPair>;
    let mut warm: Option<Basis> = None;
    loop {
        stats.iterations += 1;
        if stats.iterations > MAX_ROUNDS {
            return Err(BensonError::NumericalFailure(
                "outer round limit exceeded".into(),
            ));
        }
        tbar = Vec::new();
        let t_points: Vec<Vec<f64>> = sbar.iter().map(|x| prob.image(x)).collect();
        let tstar = match dual_from_inner(&t_points, &t_dirs, c, tol) {
            Ok(pts) => pts,
            Err(PolyError::ContainsLine) => return Err(BensonError::NoVertex),
            Err(PolyError::Empty) => {
                return Err(BensonError::NumericalFailure(
                    "dual outer approximation became empty".into(),
                ))
            }
        };

        let mut point_added = false;
        let mut round_points = t_points;
        if config.threads > 1 && !break_mode && tstar.len() > 1 {
            let outcomes = solve_round_dual_parallel(prob, &tstar, config, &mut stats)?;
            for (tq, value, x, u, w) in outcomes {
                let y = prob.image(&x);
                if tq - value > eps && !is_duplicate_point(&round_points, &y, tol) {
                    round_points.push(y);
                    sbar.push(x);
                    point_added = true;
                } else {
                    tbar.push(DualPair { u, w, value });
                }
            }
        } else {
            for t in &tstar {
                let w = weight_from_dual(t, &dual_ctx(c));
                debug_assert!(t_dirs.iter().all(|d| dot(&w, d) >= -1e-7));
                let lp = build_p1(prob, &w);
                let r = timed_solve(&lp, warm.as_ref(), config, &mut stats)?;
                match r.status {
                    LpStatus::Optimal => {}
                    LpStatus::Infeasible => {
                        return Err(BensonError::NumericalFailure(
                            "weighted-sum program infeasible on a feasible problem".into(),
                        ))
                    }
                    LpStatus::Unbounded => {
                        return Err(BensonError::NumericalFailure(
                            "weighted-sum program unbounded; image is not bounded below along c"
                                .into(),
                        ))
                    }
                }
                warm = r.basis.clone();
                let y = prob.image(&r.primal);
                if t[q - 1] - r.objective > eps && !is_duplicate_point(&round_points, &y, tol) {
                    round_points.push(y);
                    sbar.push(r.primal.clone());
                    point_added = true;
                    if break_mode {
                        break;
                    }
                } else {
                    tbar.push(DualPair {
                        u: r.dual[..m].to_vec(),
                        w,
                        value: r.objective,
                    });
                }
            }
        }
        if !point_added {
            break;
        }
    }

    let inner = VRep {
        dim: q,
        points: sbar.iter().map(|x| prob.image(x)).collect(),
        rays: t_dirs.clone(),
    };
    let p_vrep = minimize_vrep(&inner, tol);
    if eps == 0.0 {
        sbar = prune_nonvertices(sbar, &p_vrep, prob, tol);
    }
    dedup_decisions(&mut sbar, tol);
    let dstar_vrep = assemble_dstar(&tbar, c, tol);
    Ok(PrimalDualSolution {
        sbar,
        sbar_h: seed_sh.to_vec(),
        tbar,
        p_vrep,
        dstar_vrep,
        epsilon: eps,
        stats,
    })
}

type DualOutcome = (f64, f64, Vec<f64>, Vec<f64>, Vec<f64>);

fn solve_round_dual_parallel(
    prob: &MolpProblem,
    tstar: &[Vec<f64>],
    config: &BensonConfig,
    stats: &mut SolveStats,
) -> Result<Vec<DualOutcome>, BensonError> {
    let q = prob.num_objectives;
    let m = prob.constraints.num_rows;
    let c = &prob.cone.c;
    let workers = config.threads.min(tstar.len());
    let mut slots: Vec<Option<Result<(DualOutcome, SolveStats), BensonError>>> = Vec::new();
    slots.resize_with(tstar.len(), || None);

    std::thread::scope(|scope| {
        let mut rest: &mut [Option<_>] = &mut slots;
        let mut offset = 0;
        for worker in 0..workers {
            let lo = tstar.len() * worker / workers;
            let hi = tstar.len() * (worker + 1) / workers;
            let (mine, tail) = rest.split_at_mut(hi - offset);
            rest = tail;
            offset = hi;
            let chunk = &tstar[lo..hi];
            scope.spawn(move || {
                let mut warm: Option<Basis> = None;
                for (slot, t) in mine.iter_mut().zip(chunk) {
                    let mut local = SolveStats::default();
                    let w = weight_from_dual(t, &dual_ctx(c));
                    let lp = build_p1(prob, &w);
                    let solved = timed_solve(&lp, warm.as_ref(), config, &mut local);
                    *slot = Some(solved.and_then(|r| match r.status {
                        LpStatus::Optimal => {
                            warm = r.basis.clone();
                            Ok((
                                (t[q - 1], r.objective, r.primal, r.dual[..m].to_vec(), w),
                                local,
                            ))
                        }
                        LpStatus::Infeasible => Err(BensonError::NumericalFailure(
                            "weighted-sum program infeasible on a feasible problem".into(),
                        )),
                        LpStatus::Unbounded => Err(BensonError::NumericalFailure(
                            "weighted-sum program unbounded; image is not bounded below along c"
                                .into(),
                        )),
                    }));
                }
            });
        }
    });

    let mut outcomes = Vec::with_capacity(tstar.len());
    for slot in slots {
        let (out, local) = slot.expect("worker filled every slot")?;
        stats.merge(&SolveStats {
            iterations: 0,
            ..local
        });
        outcomes.push(out);
    }
    Ok(outcomes)
}

fn dual_ctx(c: &[f64]) -> crate::duality::DualityContext {
    crate::duality::DualityContext::new(c.to_vec()).expect("normalized c")
}

/// Keeps only decisions whose image matches a vertex of the minimal
/// generator description.
pub fn prune_nonvertices(
    sbar: Vec<Vec<f64>>,
    t_vrep_minimal: &VRep,
    prob: &MolpProblem,
    tol: f64,
) -> Vec<Vec<f64>> {
    sbar.into_iter()
        .filter(|x| {
            let img = prob.image(x);
            t_vrep_minimal.points.iter().any(|v| {
                v.iter()
                    .zip(&img)
                    .all(|(a, b)| (a - b).abs() <= tol.max(1e-7))
            })
        })
        .collect()
}

fn dedup_decisions(sbar: &mut Vec<Vec<f64>>, tol: f64) {
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(sbar.len());
    for x in sbar.drain(..) {
        let dup = kept
            .iter()
            .any(|k| k.iter().zip(&x).all(|(a, b)| (a - b).abs() <= tol));
        if !dup {
            kept.push(x);
        }
    }
    *sbar = kept;
}

fn assemble_dstar(tbar: &[DualPair], c: &[f64], tol: f64) -> VRep {
    let q = c.len();
    let mut down = vec![0.0; q];
    down[q - 1] = -1.0;
    let raw = VRep {
        dim: q,
        points: tbar.iter().map(DualPair::dual_point).collect(),
        rays: vec![down],
    };
    minimize_vrep(&raw, tol)
}
