//! Scalar linear programs derived from a vector problem: the weighted-sum
//! program, the translative distance program along `c`, the recession-cone
//! homogenization, and the `eta`-truncated bounding problem.
//!
//! Each builder returns a plain LP; the companion recovery helpers turn an
//! optimal basis's dual prices back into dual-problem data.

use crate::linalg::dot;
use crate::lp::{LpResult, Sense, StandardLp};
use crate::problem::{ConstraintSystem, MolpProblem};

/// Weighted-sum scalarization: `min (w'P)x` over the feasible set. The row
/// prices of an optimal basis solve the dual program `max b'u` subject to
/// `B'u = P'w`.
pub fn build_p1(prob: &MolpProblem, w: &[f64]) -> StandardLp {
    let cs = &prob.constraints;
    let objective = prob.weighted_objective(w);
    StandardLp {
        sense: Sense::Minimize,
        objective,
        entries: cs.entries.clone(),
        row_lower: cs.row_lower.clone(),
        row_upper: cs.row_upper.clone(),
        col_lower: cs.var_lower.clone(),
        col_upper: cs.var_upper.clone(),
    }
}

/// Distance scalarization at an outcome-space point `t`: in variables
/// `(x, z)`, minimize `z` subject to the feasible set and
/// `Z'(Px) - z Z'c <= Z't`. The optimal `z` is negative, zero, or positive
/// as `t` lies in the interior, on the weakly minimal boundary, or outside
/// the upper image.
pub fn build_p2(prob: &MolpProblem, t: &[f64]) -> StandardLp {
    let cs = &prob.constraints;
    let n = cs.num_vars;
    let m = cs.num_rows;
    let zs = &prob.cone.dual_generators;

    let mut entries = cs.entries.clone();
    let mut row_lower = cs.row_lower.clone();
    let mut row_upper = cs.row_upper.clone();
    for (j, z) in zs.iter().enumerate() {
        let row = m + j;
        for (coef, col) in prob.weighted_objective(z).into_iter().zip(0..n) {
            if coef != 0.0 {
                entries.push((row, col, coef));
            }
        }
        entries.push((row, n, -dot(z, &prob.cone.c)));
        row_lower.push(f64::NEG_INFINITY);
        row_upper.push(dot(z, t));
    }

    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut col_lower = cs.var_lower.clone();
    let mut col_upper = cs.var_upper.clone();
    col_lower.push(f64::NEG_INFINITY);
    col_upper.push(f64::INFINITY);

    StandardLp {
        sense: Sense::Minimize,
        objective,
        entries,
        row_lower,
        row_upper,
        col_lower,
        col_upper,
    }
}

/// Data recovered from an optimal distance-scalarization basis: a halfspace
/// `{y : w'y >= offset}` supporting the upper image at `t + z c`, together
/// with the witnessing primal solution and constraint-row prices.
#[derive(Debug, Clone)]
pub struct SupportingCut {
    pub w: Vec<f64>,
    pub offset: f64,
    pub z: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

/// Rebuilds the dual-problem weight from the prices on the appended
/// `Z'(Px)`-rows of a solved distance scalarization: `w = Z v` with `v` the
/// negated prices, rescaled so `c'w` is exactly 1.
pub fn recover_p2_cut(prob: &MolpProblem, t: &[f64], result: &LpResult) -> SupportingCut {
    let m = prob.constraints.num_rows;
    let n = prob.constraints.num_vars;
    let q = prob.num_objectives;
    let zs = &prob.cone.dual_generators;

    let mut w = vec![0.0; q];
    for (j, z) in zs.iter().enumerate() {
        let v = -result.dual[m + j];
        for (wi, zi) in w.iter_mut().zip(z) {
            *wi += v * zi;
        }
    }
    let scale = dot(&prob.cone.c, &w);
    for wi in &mut w {
        *wi /= scale;
    }

    let z = result.objective;
    SupportingCut {
        offset: dot(&w, t) + z,
        w,
        z,
        x: result.primal[..n].to_vec(),
        u: result.dual[..m].to_vec(),
    }
}

/// Replaces the feasible set by its recession cone: every finite row or
/// variable bound becomes 0 on that side. Idempotent.
pub fn homogenize(prob: &MolpProblem) -> MolpProblem {
    let zero_if_finite = |v: &f64| if v.is_finite() { 0.0 } else { *v };
    let cs = &prob.constraints;
    MolpProblem {
        num_objectives: prob.num_objectives,
        constraints: ConstraintSystem {
            num_rows: cs.num_rows,
            num_vars: cs.num_vars,
            entries: cs.entries.clone(),
            row_lower: cs.row_lower.iter().map(zero_if_finite).collect(),
            row_upper: cs.row_upper.iter().map(zero_if_finite).collect(),
            var_lower: cs.var_lower.iter().map(zero_if_finite).collect(),
            var_upper: cs.var_upper.iter().map(zero_if_finite).collect(),
        },
        objective_entries: prob.objective_entries.clone(),
        cone: prob.cone.clone(),
    }
}

/// Appends the truncation row `(eta'P)x <= 1` to a homogeneous problem so
/// that its image becomes bounded in every direction the original image
/// lacked, and stays a cone otherwise.
pub fn build_bounding_problem(prob_h: &MolpProblem, eta: &[f64]) -> MolpProblem {
    let mut out = prob_h.clone();
    let cs = &mut out.constraints;
    let row = cs.num_rows;
    for (j, coef) in prob_h.weighted_objective(eta).into_iter().enumerate() {
        if coef != 0.0 {
            cs.entries.push((row, j, coef));
        }
    }
    cs.num_rows += 1;
    cs.row_lower.push(f64::NEG_INFINITY);
    cs.row_upper.push(1.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_lp, LpStatus, LpTolerances};
    use crate::problem::test_fixtures::{instance_a, instance_b};

    fn solve(lp: &StandardLp) -> LpResult {
        let r = solve_lp(lp, None, LpTolerances::default()).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        r
    }

    #[test]
    fn weighted_sum_values() {
        let prob = instance_a();
        let r = solve(&build_p1(&prob, &[0.5, 0.5]));
        assert!((r.objective - 0.5).abs() < 1e-9);
        let r = solve(&build_p1(&prob, &[1.0, 0.0]));
        assert!(r.objective.abs() < 1e-9);
    }

    #[test]
    fn weighted_sum_on_homogeneous_problem_is_zero() {
        let prob = homogenize(&instance_a());
        let r = solve(&build_p1(&prob, &[0.25, 0.75]));
        assert!(r.objective.abs() < 1e-9);
    }

    #[test]
    fn distance_program_signs_and_cut() {
        let prob = instance_a();

        let t = [0.0, 0.0];
        let r = solve(&build_p2(&prob, &t));
        let cut = recover_p2_cut(&prob, &t, &r);
        assert!((cut.z - 0.5).abs() < 1e-9);
        assert!((cut.w[0] - 0.5).abs() < 1e-9 && (cut.w[1] - 0.5).abs() < 1e-9);
        assert!((cut.offset - 0.5).abs() < 1e-9);
        let s: Vec<f64> = t
            .iter()
            .zip(&prob.cone.c)
            .map(|(ti, ci)| ti + cut.z * ci)
            .collect();
        assert!((dot(&cut.w, &s) - cut.offset).abs() < 1e-9);

        let r = solve(&build_p2(&prob, &[1.0, 0.0]));
        assert!(r.objective.abs() < 1e-9);

        let r = solve(&build_p2(&prob, &[2.0, 2.0]));
        assert!((r.objective + 1.5).abs() < 1e-9);
    }

    #[test]
    fn recovered_weight_lies_in_dual_cone() {
        let prob = instance_a();
        for t in [[0.3, -0.7], [4.0, 4.0], [-1.0, 2.0]] {
            let r = solve(&build_p2(&prob, &t));
            let cut = recover_p2_cut(&prob, &t, &r);
            assert!((dot(&cut.w, &prob.cone.c) - 1.0).abs() < 1e-12);
            for y in &prob.cone.generators {
                assert!(dot(&cut.w, y) >= -1e-9);
            }
            let img = prob.image(&cut.x);
            assert!((dot(&cut.w, &img) - cut.offset).abs() < 1e-7);
        }
    }

    #[test]
    fn homogenization_zeroes_finite_bounds() {
        let mut prob = instance_a();
        prob.constraints.row_upper[0] = 2.0;
        prob.constraints.var_lower[0] = 0.0;
        prob.constraints.var_upper[0] = 5.0;
        let h = homogenize(&prob);
        assert_eq!(h.constraints.row_lower, vec![0.0, 0.0, 0.0]);
        assert_eq!(h.constraints.row_upper[0], 0.0);
        assert!(h.constraints.row_upper[1].is_infinite());
        assert_eq!(h.constraints.var_lower[0], 0.0);
        assert_eq!(h.constraints.var_upper[0], 0.0);
        assert!(h.constraints.var_lower[1].is_infinite());
        let hh = homogenize(&h);
        assert_eq!(hh.constraints.row_lower, h.constraints.row_lower);
        assert_eq!(hh.constraints.var_upper, h.constraints.var_upper);
    }

    #[test]
    fn bounding_row_from_eta() {
        let h = homogenize(&instance_b());
        let bounded = build_bounding_problem(&h, &[0.75, 0.25]);
        let cs = &bounded.constraints;
        assert_eq!(cs.num_rows, h.constraints.num_rows + 1);
        let extra: Vec<&(usize, usize, f64)> = cs
            .entries
            .iter()
            .filter(|(i, _, _)| *i == cs.num_rows - 1)
            .collect();
        assert_eq!(extra.len(), 1);
        assert!((extra[0].2 - 0.5).abs() < 1e-12);
        assert_eq!(cs.row_upper[cs.num_rows - 1], 1.0);

        let a = homogenize(&instance_a());
        let bounded = build_bounding_problem(&a, &[0.5, 0.5]);
        let row = bounded.constraints.num_rows - 1;
        let coefs: Vec<f64> = bounded
            .constraints
            .entries
            .iter()
            .filter(|(i, _, _)| *i == row)
            .map(|(_, _, v)| *v)
            .collect();
        assert_eq!(coefs, vec![0.5, 0.5]);
    }
}
