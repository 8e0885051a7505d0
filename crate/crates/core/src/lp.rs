//! Bounded-variable revised simplex.
//!
//! Problems are given in the form
//!
//! ```text
//!     optimize c'x   subject to   rlo <= Ax <= rup,  clo <= x <= cup
//! ```
//!
//! with infinite bounds allowed on either side. Internally one logical
//! variable is attached per row (`Ax - s = 0`, with the row bounds moved onto
//! `s`), so a single bounded-variable pivoting loop covers every bound shape.
//! Feasibility is restored by a composite phase 1 that prices only the
//! out-of-range basic variables; no artificial columns are added.

use crate::linalg::{norm_inf, Lu};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// LP data in computational form. `entries` holds the constraint matrix as
/// (row, col, coefficient) triplets; duplicate positions are summed.
#[derive(Debug, Clone)]
pub struct StandardLp {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub entries: Vec<(usize, usize, f64)>,
    pub row_lower: Vec<f64>,
    pub row_upper: Vec<f64>,
    pub col_lower: Vec<f64>,
    pub col_upper: Vec<f64>,
}

impl StandardLp {
    pub fn num_rows(&self) -> usize {
        self.row_lower.len()
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<(), LpError> {
        let m = self.num_rows();
        let n = self.num_cols();
        if self.row_upper.len() != m || self.col_lower.len() != n || self.col_upper.len() != n {
            return Err(LpError::InvalidProblem("bound vector lengths disagree".into()));
        }
        for &(i, j, v) in &self.entries {
            if i >= m || j >= n {
                return Err(LpError::InvalidProblem(format!(
                    "entry ({i},{j}) outside {m}x{n} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(LpError::InvalidProblem("non-finite matrix entry".into()));
            }
        }
        for v in &self.objective {
            if !v.is_finite() {
                return Err(LpError::InvalidProblem("non-finite objective entry".into()));
            }
        }
        for v in self
            .row_lower
            .iter()
            .chain(&self.row_upper)
            .chain(&self.col_lower)
            .chain(&self.col_upper)
        {
            if v.is_nan() {
                return Err(LpError::InvalidProblem("NaN bound".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of a solve. `dual` holds one price per row, in minimization
/// convention: a row active at its lower bound carries a nonnegative price,
/// a row active at its upper bound a nonpositive one (reversed for
/// maximization problems after the internal sign flip is undone).
#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub objective: f64,
    /// Unbounded direction in the structural variables, infinity-norm one.
    pub ray: Option<Vec<f64>>,
    /// Basis snapshot for warm starts. Only valid for LPs with the same
    /// row/column counts as the one that produced it.
    pub basis: Option<Basis>,
}

/// Opaque basis token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    states: Vec<VarState>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    Free,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

#[derive(Debug, Clone, Copy)]
pub struct LpTolerances {
    pub feasibility: f64,
    pub optimality: f64,
    pub pivot: f64,
}

impl Default for LpTolerances {
    fn default() -> Self {
        LpTolerances {
            feasibility: 1e-9,
            optimality: 1e-9,
            pivot: 1e-10,
        }
    }
}

impl LpTolerances {
    pub fn with_feasibility(scale: f64) -> Self {
        LpTolerances {
            feasibility: scale,
            optimality: scale,
            pivot: scale * 0.1,
        }
    }
}

pub struct SimplexSolver {
    pub tolerances: LpTolerances,
    /// Overrides the default iteration cap of `50 * (rows + cols)`.
    pub max_iterations: Option<usize>,
}

impl SimplexSolver {
    pub fn new(tolerances: LpTolerances) -> Self {
        SimplexSolver {
            tolerances,
            max_iterations: None,
        }
    }

    pub fn solve(&mut self, lp: &StandardLp, warm: Option<&Basis>) -> Result<LpResult, LpError> {
        lp.validate()?;
        let m = lp.num_rows();
        let n = lp.num_cols();
        for j in 0..n {
            if lp.col_lower[j] > lp.col_upper[j] {
                return Ok(infeasible_result(n, m));
            }
        }
        for i in 0..m {
            if lp.row_lower[i] > lp.row_upper[i] {
                return Ok(infeasible_result(n, m));
            }
        }

        let mut work = Work::build(lp, &self.tolerances);
        let cap = self.max_iterations.unwrap_or(50 * (m + n + 1));

        if let Some(b) = warm {
            if !work.load_basis(b) {
                work.cold_start();
            }
        } else {
            work.cold_start();
        }
        if !work.refactorize() {
            work.cold_start();
            if !work.refactorize() {
                return Err(LpError::NumericalFailure("initial basis singular".into()));
            }
        }
        work.recompute_basics();

        let mut iterations = 0usize;
        // Phase 1: drive out-of-range basics back into their bounds.
        while work.infeasibility() > work.tol.feasibility {
            match work.pivot_step(true)? {
                Step::Moved => {
                    iterations += 1;
                    if iterations > cap {
                        return Err(LpError::NumericalFailure(format!(
                            "iteration cap {cap} exceeded in phase 1"
                        )));
                    }
                }
                Step::NoCandidate => {
                    return Ok(infeasible_result(n, m));
                }
                Step::Unbounded(_, _) => {
                    return Err(LpError::NumericalFailure(
                        "unblocked direction while restoring feasibility".into(),
                    ));
                }
            }
        }

        // Phase 2: optimize the true objective.
        loop {
            match work.pivot_step(false)? {
                Step::Moved => {
                    iterations += 1;
                    if iterations > cap {
                        return Err(LpError::NumericalFailure(format!(
                            "iteration cap {cap} exceeded in phase 2"
                        )));
                    }
                }
                Step::NoCandidate => return Ok(work.extract_optimal()),
                Step::Unbounded(j, dir) => return Ok(work.extract_unbounded(j, dir)),
            }
        }
    }
}

fn infeasible_result(n: usize, m: usize) -> LpResult {
    LpResult {
        status: LpStatus::Infeasible,
        primal: vec![0.0; n],
        dual: vec![0.0; m],
        objective: f64::NAN,
        ray: None,
        basis: None,
    }
}

/// Value of the dual objective implied by `result` for `lp`: active row
/// bounds weighted by the row prices plus active column bounds weighted by
/// their reduced costs. Equals the primal objective at an optimum.
pub fn dual_objective(lp: &StandardLp, result: &LpResult) -> f64 {
    let m = lp.num_rows();
    let n = lp.num_cols();
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    // Reduced costs of the structurals under the minimization convention.
    let mut reduced: Vec<f64> = lp.objective.iter().map(|c| sign * c).collect();
    for &(i, j, v) in &lp.entries {
        reduced[j] -= sign * result.dual[i] * v;
    }
    let mut total = 0.0;
    for i in 0..m {
        let y = sign * result.dual[i];
        if y > 0.0 && lp.row_lower[i].is_finite() {
            total += y * lp.row_lower[i];
        } else if y < 0.0 && lp.row_upper[i].is_finite() {
            total += y * lp.row_upper[i];
        }
    }
    for j in 0..n {
        let d = reduced[j];
        // A positive reduced cost pins the variable to its lower bound.
        let at = (result.primal[j] - lp.col_lower[j]).abs() < (result.primal[j] - lp.col_upper[j]).abs();
        if d > 0.0 && lp.col_lower[j].is_finite() && at {
            total += d * lp.col_lower[j];
        } else if d < 0.0 && lp.col_upper[j].is_finite() && !at {
            total += d * lp.col_upper[j];
        }
    }
    sign * total
}

enum Step {
    Moved,
    NoCandidate,
    Unbounded(usize, f64),
}

struct Work {
    m: usize,
    n: usize,
    ncols: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    obj_sign: f64,
    state: Vec<VarState>,
    basis: Vec<usize>,
    x_basic: Vec<f64>,
    lu: Option<Lu>,
    tol: LpTolerances,
    degenerate_run: usize,
    use_bland: bool,
}

impl Work {
    fn build(lp: &StandardLp, tol: &LpTolerances) -> Work {
        let m = lp.num_rows();
        let n = lp.num_cols();
        let ncols = n + m;
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ncols];
        for &(i, j, v) in &lp.entries {
            if v != 0.0 {
                cols[j].push((i, v));
            }
        }
        for j in 0..n {
            cols[j].sort_by_key(|e| e.0);
            // Merge duplicate positions.
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(cols[j].len());
            for &(i, v) in &cols[j] {
                if let Some(last) = merged.last_mut() {
                    if last.0 == i {
                        last.1 += v;
                        continue;
                    }
                }
                merged.push((i, v));
            }
            merged.retain(|e| e.1 != 0.0);
            cols[j] = merged;
        }
        for i in 0..m {
            cols[n + i].push((i, -1.0));
        }
        let obj_sign = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut cost = vec![0.0; ncols];
        for j in 0..n {
            cost[j] = obj_sign * lp.objective[j];
        }
        let mut lower = vec![f64::NEG_INFINITY; ncols];
        let mut upper = vec![f64::INFINITY; ncols];
        lower[..n].copy_from_slice(&lp.col_lower);
        upper[..n].copy_from_slice(&lp.col_upper);
        for i in 0..m {
            lower[n + i] = lp.row_lower[i];
            upper[n + i] = lp.row_upper[i];
        }
        Work {
            m,
            n,
            ncols,
            cols,
            lower,
            upper,
            cost,
            obj_sign,
            state: vec![VarState::Free; ncols],
            basis: Vec::new(),
            x_basic: vec![0.0; m],
            lu: None,
            tol: *tol,
            degenerate_run: 0,
            use_bland: false,
        }
    }

    fn cold_start(&mut self) {
        for j in 0..self.n {
            self.state[j] = if self.lower[j].is_finite() {
                VarState::AtLower
            } else if self.upper[j].is_finite() {
                VarState::AtUpper
            } else {
                VarState::Free
            };
        }
        self.basis = (self.n..self.ncols).collect();
        for i in 0..self.m {
            self.state[self.n + i] = VarState::Basic;
        }
    }

    fn load_basis(&mut self, token: &Basis) -> bool {
        if token.states.len() != self.ncols {
            return false;
        }
        let basics: Vec<usize> = (0..self.ncols)
            .filter(|&j| token.states[j] == VarState::Basic)
            .collect();
        if basics.len() != self.m {
            return false;
        }
        for j in 0..self.ncols {
            self.state[j] = match token.states[j] {
                VarState::Basic => VarState::Basic,
                VarState::AtLower if self.lower[j].is_finite() => VarState::AtLower,
                VarState::AtUpper if self.upper[j].is_finite() => VarState::AtUpper,
                VarState::AtLower | VarState::AtUpper | VarState::Free => {
                    if self.lower[j].is_finite() {
                        VarState::AtLower
                    } else if self.upper[j].is_finite() {
                        VarState::AtUpper
                    } else {
                        VarState::Free
                    }
                }
            };
        }
        self.basis = basics;
        true
    }

    fn refactorize(&mut self) -> bool {
        let m = self.m;
        let mut dense = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for &(i, v) in &self.cols[j] {
                dense[i * m + k] = v;
            }
        }
        match Lu::factorize(&dense, m, self.tol.pivot) {
            Some(lu) => {
                self.lu = Some(lu);
                true
            }
            None => false,
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
            VarState::Free => 0.0,
            VarState::Basic => unreachable!("basic variable has no fixed value"),
        }
    }

    fn recompute_basics(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for j in 0..self.ncols {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for &(i, a) in &self.cols[j] {
                    rhs[i] -= a * v;
                }
            }
        }
        self.x_basic = self.lu.as_ref().expect("factorized basis").solve(&rhs);
    }

    fn infeasibility(&self) -> f64 {
        let mut total = 0.0;
        for (i, &j) in self.basis.iter().enumerate() {
            let x = self.x_basic[i];
            if x < self.lower[j] {
                total += self.lower[j] - x;
            } else if x > self.upper[j] {
                total += x - self.upper[j];
            }
        }
        total
    }

    /// Basic-variable costs for the current phase.
    fn basic_costs(&self, phase1: bool) -> Vec<f64> {
        let mut cb = vec![0.0; self.m];
        for (i, &j) in self.basis.iter().enumerate() {
            cb[i] = if phase1 {
                let x = self.x_basic[i];
                if x < self.lower[j] - self.tol.feasibility {
                    -1.0
                } else if x > self.upper[j] + self.tol.feasibility {
                    1.0
                } else {
                    0.0
                }
            } else {
                self.cost[j]
            };
        }
        cb
    }

    fn pivot_step(&mut self, phase1: bool) -> Result<Step, LpError> {
        let cb = self.basic_costs(phase1);
        let y = self.lu.as_ref().unwrap().solve_transposed(&cb);

        let mut entering: Option<(usize, f64, f64)> = None; // (col, direction, violation)
        for j in 0..self.ncols {
            if self.state[j] == VarState::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let cj = if phase1 { 0.0 } else { self.cost[j] };
            let mut d = cj;
            for &(i, v) in &self.cols[j] {
                d -= y[i] * v;
            }
            let (dir, viol) = match self.state[j] {
                VarState::AtLower => (1.0, -d),
                VarState::AtUpper => (-1.0, d),
                VarState::Free => {
                    if d < 0.0 {
                        (1.0, -d)
                    } else {
                        (-1.0, d)
                    }
                }
                VarState::Basic => unreachable!(),
            };
            if viol <= self.tol.optimality {
                continue;
            }
            let better = match entering {
                None => true,
                Some((bj, _, bv)) => {
                    if self.use_bland {
                        j < bj
                    } else {
                        viol > bv + 1e-12 || (viol > bv - 1e-12 && j < bj)
                    }
                }
            };
            if better {
                entering = Some((j, dir, viol));
            }
        }

        let (j_in, dir, _) = match entering {
            Some(e) => e,
            None => return Ok(Step::NoCandidate),
        };

        // Column of the entering variable in the current basis.
        let mut rhs = vec![0.0; self.m];
        for &(i, v) in &self.cols[j_in] {
            rhs[i] = v;
        }
        let w = self.lu.as_ref().unwrap().solve(&rhs);

        // Ratio test. `None` target means the entering variable flips to its
        // opposite bound without a basis change.
        let mut t_best = if self.lower[j_in].is_finite() && self.upper[j_in].is_finite() {
            self.upper[j_in] - self.lower[j_in]
        } else {
            f64::INFINITY
        };
        let mut leaving: Option<(usize, VarState)> = None;
        for i in 0..self.m {
            let rate = -dir * w[i];
            if rate.abs() <= self.tol.pivot {
                continue;
            }
            let jb = self.basis[i];
            let x = self.x_basic[i];
            let lo = self.lower[jb];
            let hi = self.upper[jb];
            let (bound, side) = if phase1 && x < lo - self.tol.feasibility {
                if rate > 0.0 {
                    (lo, VarState::AtLower)
                } else {
                    continue;
                }
            } else if phase1 && x > hi + self.tol.feasibility {
                if rate < 0.0 {
                    (hi, VarState::AtUpper)
                } else {
                    continue;
                }
            } else if rate > 0.0 {
                if hi.is_finite() {
                    (hi, VarState::AtUpper)
                } else {
                    continue;
                }
            } else if lo.is_finite() {
                (lo, VarState::AtLower)
            } else {
                continue;
            };
            let t = ((bound - x) / rate).max(0.0);
            let replace = if t < t_best - 1e-12 {
                true
            } else if t <= t_best + 1e-12 {
                // Ties go to the smallest leaving index; a tie against the
                // entering variable's own bound flip keeps the flip.
                match leaving {
                    Some((li, _)) => jb < self.basis[li],
                    None => false,
                }
            } else {
                false
            };
            if replace {
                t_best = t.min(t_best);
                leaving = Some((i, side));
            }
        }

        if !t_best.is_finite() {
            return Ok(Step::Unbounded(j_in, dir));
        }

        if t_best <= self.tol.pivot {
            self.degenerate_run += 1;
            if self.degenerate_run > 2 * (self.m + self.ncols) {
                self.use_bland = true;
            }
        } else {
            self.degenerate_run = 0;
        }

        match leaving {
            None => {
                // Bound flip.
                self.state[j_in] = match self.state[j_in] {
                    VarState::AtLower => VarState::AtUpper,
                    VarState::AtUpper => VarState::AtLower,
                    other => other,
                };
                for i in 0..self.m {
                    self.x_basic[i] += t_best * (-dir * w[i]);
                }
            }
            Some((row, side)) => {
                let j_out = self.basis[row];
                self.state[j_in] = VarState::Basic;
                self.state[j_out] = side;
                self.basis[row] = j_in;
                if !self.refactorize() {
                    return Err(LpError::NumericalFailure(
                        "singular basis after pivot".into(),
                    ));
                }
                self.recompute_basics();
            }
        }
        Ok(Step::Moved)
    }

    fn primal_values(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.ncols];
        for j in 0..self.ncols {
            if self.state[j] != VarState::Basic {
                x[j] = self.nonbasic_value(j);
            }
        }
        for (i, &j) in self.basis.iter().enumerate() {
            x[j] = self.x_basic[i];
        }
        x
    }

    fn extract_optimal(&self) -> LpResult {
        let x = self.primal_values();
        let cb = self.basic_costs(false);
        let y = self.lu.as_ref().unwrap().solve_transposed(&cb);
        let objective: f64 = (0..self.n).map(|j| self.cost[j] * x[j]).sum();
        LpResult {
            status: LpStatus::Optimal,
            primal: x[..self.n].to_vec(),
            dual: y.iter().map(|v| self.obj_sign * v).collect(),
            objective: self.obj_sign * objective,
            ray: None,
            basis: Some(Basis {
                states: self.state.clone(),
            }),
        }
    }

    fn extract_unbounded(&self, j_in: usize, dir: f64) -> LpResult {
        let mut delta = vec![0.0; self.ncols];
        delta[j_in] = dir;
        let mut rhs = vec![0.0; self.m];
        for &(i, v) in &self.cols[j_in] {
            rhs[i] = v;
        }
        let w = self.lu.as_ref().unwrap().solve(&rhs);
        for (i, &jb) in self.basis.iter().enumerate() {
            delta[jb] = -dir * w[i];
        }
        let mut ray = delta[..self.n].to_vec();
        let scale = norm_inf(&ray);
        if scale > 0.0 {
            for v in &mut ray {
                *v /= scale;
            }
        }
        let x = self.primal_values();
        LpResult {
            status: LpStatus::Unbounded,
            primal: x[..self.n].to_vec(),
            dual: vec![0.0; self.m],
            objective: match self.obj_sign {
                s if s > 0.0 => f64::NEG_INFINITY,
                _ => f64::INFINITY,
            },
            ray: Some(ray),
            basis: None,
        }
    }
}

/// Convenience wrapper: builds a solver with the given tolerances and solves.
pub fn solve_lp(
    lp: &StandardLp,
    warm: Option<&Basis>,
    tolerances: LpTolerances,
) -> Result<LpResult, LpError> {
    SimplexSolver::new(tolerances).solve(lp, warm)
}

/// Helper to assemble an LP with every column free and every row unbounded,
/// to be tightened by the caller.
pub fn blank_lp(sense: Sense, num_rows: usize, num_cols: usize) -> StandardLp {
    StandardLp {
        sense,
        objective: vec![0.0; num_cols],
        entries: Vec::new(),
        row_lower: vec![f64::NEG_INFINITY; num_rows],
        row_upper: vec![f64::INFINITY; num_rows],
        col_lower: vec![f64::NEG_INFINITY; num_cols],
        col_upper: vec![f64::INFINITY; num_cols],
    }
}
