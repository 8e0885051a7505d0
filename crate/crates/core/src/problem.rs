//! Problem model: a linear vector optimization problem asks for the
//! minimizers of `Px` over a two-sided constraint system, ordered by a
//! pointed solid polyhedral cone.

use crate::linalg::{dot, rank};
use crate::lp::{blank_lp, solve_lp, LpStatus, LpTolerances, Sense};
use crate::polyhedron::{h_to_v, HRep};
use thiserror::Error;

/// Geometric tolerance shared by rank tests, facet incidence, and zero
/// classification.
pub const GEOM_TOL: f64 = 1e-9;

/// The feasible region `{x : a <= Bx <= b, lb <= x <= ub}` in sparse form.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    pub num_rows: usize,
    pub num_vars: usize,
    /// (row, col, value) triplets of B; duplicates sum.
    pub entries: Vec<(usize, usize, f64)>,
    pub row_lower: Vec<f64>,
    pub row_upper: Vec<f64>,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
}

impl ConstraintSystem {
    /// All rows and variables unbounded; callers tighten what they need.
    pub fn free(num_rows: usize, num_vars: usize) -> Self {
        ConstraintSystem {
            num_rows,
            num_vars,
            entries: Vec::new(),
            row_lower: vec![f64::NEG_INFINITY; num_rows],
            row_upper: vec![f64::INFINITY; num_rows],
            var_lower: vec![f64::NEG_INFINITY; num_vars],
            var_upper: vec![f64::INFINITY; num_vars],
        }
    }

    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.num_rows];
        for &(i, j, v) in &self.entries {
            act[i] += v * x[j];
        }
        act
    }

    /// Largest violation of any row or variable bound at `x` (0 if feasible).
    pub fn infeasibility(&self, x: &[f64]) -> f64 {
        let act = self.row_activity(x);
        let mut worst: f64 = 0.0;
        for i in 0..self.num_rows {
            worst = worst.max(self.row_lower[i] - act[i]);
            worst = worst.max(act[i] - self.row_upper[i]);
        }
        for j in 0..self.num_vars {
            worst = worst.max(self.var_lower[j] - x[j]);
            worst = worst.max(x[j] - self.var_upper[j]);
        }
        worst.max(0.0)
    }
}

/// Pointed solid polyhedral ordering cone with its dual description and an
/// interior normalization vector.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingCone {
    pub dim: usize,
    /// Columns of Y: generators of the cone itself.
    pub generators: Vec<Vec<f64>>,
    /// Columns of Z: generators of the dual cone.
    pub dual_generators: Vec<Vec<f64>>,
    /// Interior vector c with last coordinate 1; weights are normalized
    /// against it.
    pub c: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("invalid c vector: {0}")]
    InvalidC(String),
    #[error("inconsistent dimensions: {0}")]
    Dimensions(String),
}

impl OrderingCone {
    /// The componentwise order: C = R^q_+, c = the all-ones vector.
    pub fn nonnegative(dim: usize) -> Self {
        let mut generators = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            generators.push(e);
        }
        OrderingCone {
            dim,
            generators: generators.clone(),
            dual_generators: generators,
            c: vec![1.0; dim],
        }
    }

    /// Builds a cone from primal generators, deriving the dual generators by
    /// enumeration and defaulting c to the generator sum scaled to last
    /// coordinate 1. When that coordinate is not positive the cone and the
    /// objective rows must be negated by the caller first; this constructor
    /// rejects such input.
    pub fn from_generators(
        generators: Vec<Vec<f64>>,
        c: Option<Vec<f64>>,
        tol: f64,
    ) -> Result<Self, ProblemError> {
        let dim = generators
            .first()
            .ok_or_else(|| ProblemError::InvalidCone("no generators".into()))?
            .len();
        if generators.iter().any(|g| g.len() != dim) {
            return Err(ProblemError::Dimensions(
                "cone generators of mixed dimension".into(),
            ));
        }
        let c = match c {
            Some(c) => c,
            None => {
                let mut sum = vec![0.0; dim];
                for g in &generators {
                    for (s, v) in sum.iter_mut().zip(g) {
                        *s += v;
                    }
                }
                let last = sum[dim - 1];
                if last <= tol {
                    return Err(ProblemError::InvalidC(
                        "generator sum has non-positive last coordinate; negate the cone and objective"
                            .into(),
                    ));
                }
                sum.iter().map(|v| v / last).collect()
            }
        };
        let dual_generators = dual_cone_generators(&generators, &c, tol)?;
        let cone = OrderingCone {
            dim,
            generators,
            dual_generators,
            c,
        };
        cone.validate(tol)?;
        Ok(cone)
    }

    /// Builds a cone from dual generators, deriving the primal ones.
    pub fn from_dual_generators(
        dual_generators: Vec<Vec<f64>>,
        c: Option<Vec<f64>>,
        tol: f64,
    ) -> Result<Self, ProblemError> {
        let dim = dual_generators
            .first()
            .ok_or_else(|| ProblemError::InvalidCone("no dual generators".into()))?
            .len();
        let generators = cone_from_halfspace_normals(&dual_generators, dim, tol)?;
        match c {
            Some(c) => {
                let dual_generators = normalize_duals(dual_generators, &c, tol)?;
                let cone = OrderingCone {
                    dim,
                    generators,
                    dual_generators,
                    c,
                };
                cone.validate(tol)?;
                Ok(cone)
            }
            None => {
                // Default c from the derived primal generators, then rescale.
                let with_default = Self::from_generators(generators, None, tol)?;
                let dual_generators =
                    normalize_duals(dual_generators, &with_default.c, tol)?;
                let cone = OrderingCone {
                    dual_generators,
                    ..with_default
                };
                cone.validate(tol)?;
                Ok(cone)
            }
        }
    }

    pub fn validate(&self, tol: f64) -> Result<(), ProblemError> {
        let q = self.dim;
        if self.c.len() != q {
            return Err(ProblemError::Dimensions("c has wrong length".into()));
        }
        if (self.c[q - 1] - 1.0).abs() > tol {
            return Err(ProblemError::InvalidC(format!(
                "last coordinate of c must be 1, got {}",
                self.c[q - 1]
            )));
        }
        for z in &self.dual_generators {
            if dot(z, &self.c) <= tol {
                return Err(ProblemError::InvalidC(
                    "c is not interior: some dual generator is orthogonal or opposed".into(),
                ));
            }
        }
        for (z, y) in self
            .dual_generators
            .iter()
            .flat_map(|z| self.generators.iter().map(move |y| (z, y)))
        {
            if dot(z, y) < -100.0 * tol {
                return Err(ProblemError::InvalidCone(
                    "primal and dual generators are inconsistent".into(),
                ));
            }
        }
        if !is_solid(&self.generators, q, tol) {
            return Err(ProblemError::InvalidCone("cone is not solid".into()));
        }
        if !is_pointed(&self.generators, q, tol) {
            return Err(ProblemError::InvalidCone("cone is not pointed".into()));
        }
        if !is_solid(&self.dual_generators, q, tol) {
            return Err(ProblemError::InvalidCone(
                "dual cone is not solid (cone contains a line)".into(),
            ));
        }
        if !is_pointed(&self.dual_generators, q, tol) {
            return Err(ProblemError::InvalidCone(
                "dual cone is not pointed (cone is not solid)".into(),
            ));
        }
        Ok(())
    }

    /// Halfspace description {y : z'y >= 0 for every dual generator z}.
    pub fn hrep(&self) -> HRep {
        let mut h = HRep::new(self.dim);
        for z in &self.dual_generators {
            h.push(z.clone(), 0.0);
        }
        h
    }
}

/// Checks that a generator list spans a solid, pointed cone before any
/// normalization point is derived from it.
pub(crate) fn check_generator_structure(
    generators: &[Vec<f64>],
    dim: usize,
    tol: f64,
) -> Result<(), ProblemError> {
    if !is_solid(generators, dim, tol) {
        return Err(ProblemError::InvalidCone("cone is not solid".into()));
    }
    if !is_pointed(generators, dim, tol) {
        return Err(ProblemError::InvalidCone("cone is not pointed".into()));
    }
    Ok(())
}

/// Extreme rays of {w : g'w >= 0 for all g}, scaled so c'z = 1.
fn dual_cone_generators(
    generators: &[Vec<f64>],
    c: &[f64],
    tol: f64,
) -> Result<Vec<Vec<f64>>, ProblemError> {
    let dim = c.len();
    let rays = cone_from_halfspace_normals(generators, dim, tol)?;
    normalize_duals(rays, c, tol)
}

/// Extreme rays of the cone {v : n'v >= 0 for every normal n}.
fn cone_from_halfspace_normals(
    normals: &[Vec<f64>],
    dim: usize,
    tol: f64,
) -> Result<Vec<Vec<f64>>, ProblemError> {
    let mut h = HRep::new(dim);
    for n in normals {
        h.push(n.clone(), 0.0);
    }
    match h_to_v(&h, tol) {
        Ok(v) => Ok(v.rays),
        Err(e) => Err(ProblemError::InvalidCone(format!(
            "halfspace cone enumeration failed: {e}"
        ))),
    }
}

fn normalize_duals(
    duals: Vec<Vec<f64>>,
    c: &[f64],
    tol: f64,
) -> Result<Vec<Vec<f64>>, ProblemError> {
    duals
        .into_iter()
        .map(|z| {
            let s = dot(&z, c);
            if s <= tol {
                return Err(ProblemError::InvalidC(
                    "c is not interior to the cone".into(),
                ));
            }
            Ok(z.iter().map(|v| v / s).collect())
        })
        .collect()
}

fn is_solid(generators: &[Vec<f64>], dim: usize, tol: f64) -> bool {
    let rows = generators.len();
    if rows < dim {
        return false;
    }
    let mut flat = Vec::with_capacity(rows * dim);
    for g in generators {
        flat.extend_from_slice(g);
    }
    rank(&flat, rows, dim, tol) == dim
}

/// A cone is pointed iff 0 is not a convex combination of its (nonzero)
/// generators.
fn is_pointed(generators: &[Vec<f64>], dim: usize, tol: f64) -> bool {
    let k = generators.len();
    let mut lp = blank_lp(Sense::Minimize, dim + 1, k);
    for (j, g) in generators.iter().enumerate() {
        for i in 0..dim {
            if g[i] != 0.0 {
                lp.entries.push((i, j, g[i]));
            }
        }
        lp.entries.push((dim, j, 1.0));
    }
    for i in 0..dim {
        lp.row_lower[i] = 0.0;
        lp.row_upper[i] = 0.0;
    }
    lp.row_lower[dim] = 1.0;
    lp.row_upper[dim] = 1.0;
    for j in 0..k {
        lp.col_lower[j] = 0.0;
    }
    match solve_lp(&lp, None, LpTolerances::with_feasibility(tol.max(1e-11))) {
        Ok(r) => r.status == LpStatus::Infeasible,
        Err(_) => false,
    }
}

/// The full problem: minimize `Px` over the constraint system with respect
/// to the cone order.
#[derive(Debug, Clone, PartialEq)]
pub struct MolpProblem {
    pub num_objectives: usize,
    pub constraints: ConstraintSystem,
    /// (objective row, variable, value) triplets of P; duplicates sum.
    pub objective_entries: Vec<(usize, usize, f64)>,
    pub cone: OrderingCone,
}

impl MolpProblem {
    pub fn validate(&self, tol: f64) -> Result<(), ProblemError> {
        let q = self.num_objectives;
        let cs = &self.constraints;
        if self.cone.dim != q {
            return Err(ProblemError::Dimensions(
                "cone dimension differs from objective count".into(),
            ));
        }
        if cs.row_lower.len() != cs.num_rows
            || cs.row_upper.len() != cs.num_rows
            || cs.var_lower.len() != cs.num_vars
            || cs.var_upper.len() != cs.num_vars
        {
            return Err(ProblemError::Dimensions("bound vector lengths".into()));
        }
        for &(i, j, _) in &cs.entries {
            if i >= cs.num_rows || j >= cs.num_vars {
                return Err(ProblemError::Dimensions(format!(
                    "constraint entry ({i},{j}) out of range"
                )));
            }
        }
        for &(i, j, _) in &self.objective_entries {
            if i >= q || j >= cs.num_vars {
                return Err(ProblemError::Dimensions(format!(
                    "objective entry ({i},{j}) out of range"
                )));
            }
        }
        self.cone.validate(tol)
    }

    /// The image Px of a decision vector.
    pub fn image(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.num_objectives];
        for &(i, j, v) in &self.objective_entries {
            y[i] += v * x[j];
        }
        y
    }

    /// The combined row w'P as a dense vector over the variables.
    pub fn weighted_objective(&self, w: &[f64]) -> Vec<f64> {
        let mut row = vec![0.0; self.constraints.num_vars];
        for &(i, j, v) in &self.objective_entries {
            row[j] += w[i] * v;
        }
        row
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonnegative_cone_is_self_dual() {
        let cone = OrderingCone::nonnegative(3);
        cone.validate(GEOM_TOL).unwrap();
        assert_eq!(cone.generators, cone.dual_generators);
        assert_eq!(cone.c, vec![1.0; 3]);
    }

    #[test]
    fn dual_generators_from_primal() {
        // cone{(1,0),(1,1)}: dual cone is generated by (0,1) and (1,-1),
        // and (2,1) sits strictly between the generators.
        let cone = OrderingCone::from_generators(
            vec![vec![1.0, 0.0], vec![1.0, 1.0]],
            Some(vec![2.0, 1.0]),
            GEOM_TOL,
        )
        .unwrap();
        for z in &cone.dual_generators {
            assert!((dot(z, &cone.c) - 1.0).abs() < 1e-9);
            for y in &cone.generators {
                assert!(dot(z, y) >= -1e-9);
            }
        }
        assert_eq!(cone.dual_generators.len(), 2);
    }

    #[test]
    fn unpointed_cone_rejected() {
        let r = OrderingCone::from_generators(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]],
            Some(vec![0.0, 1.0]),
            GEOM_TOL,
        );
        assert!(matches!(r, Err(ProblemError::InvalidCone(_))));
    }

    #[test]
    fn flat_cone_rejected() {
        let r = OrderingCone::from_generators(
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            Some(vec![1.0, 1.0, 1.0]),
            GEOM_TOL,
        );
        assert!(matches!(r, Err(ProblemError::InvalidCone(_))));
    }

    #[test]
    fn exterior_c_rejected() {
        let r = OrderingCone::from_generators(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            Some(vec![-1.0, 1.0]),
            GEOM_TOL,
        );
        assert!(matches!(r, Err(ProblemError::InvalidC(_))));
    }

    #[test]
    fn default_c_is_scaled_generator_sum() {
        let cone = OrderingCone::from_generators(
            vec![vec![1.0, 0.0], vec![0.0, 2.0]],
            None,
            GEOM_TOL,
        )
        .unwrap();
        assert_eq!(cone.c, vec![0.5, 1.0]);
    }

    #[test]
    fn round_trip_through_dual() {
        let cone = OrderingCone::from_generators(
            vec![vec![2.0, 1.0], vec![1.0, 3.0]],
            Some(vec![0.5, 1.0]),
            GEOM_TOL,
        )
        .unwrap();
        let back = OrderingCone::from_dual_generators(
            cone.dual_generators.clone(),
            Some(cone.c.clone()),
            GEOM_TOL,
        )
        .unwrap();
        // Same cone: cross-containment of generators.
        for g in &back.generators {
            let mut best = f64::INFINITY;
            for z in &cone.dual_generators {
                best = best.min(dot(z, g));
            }
            assert!(best >= -1e-9);
        }
        assert_eq!(back.generators.len(), cone.generators.len());
    }

    #[test]
    fn constraint_residuals() {
        let mut cs = ConstraintSystem::free(1, 2);
        cs.entries = vec![(0, 0, 1.0), (0, 1, 1.0)];
        cs.row_lower[0] = 1.0;
        cs.var_lower = vec![0.0, 0.0];
        assert_eq!(cs.infeasibility(&[0.5, 0.5]), 0.0);
        assert!((cs.infeasibility(&[0.25, 0.5]) - 0.25).abs() < 1e-12);
        assert!((cs.infeasibility(&[-0.5, 2.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn image_and_weighted_rows() {
        let prob = MolpProblem {
            num_objectives: 2,
            constraints: ConstraintSystem::free(0, 2),
            objective_entries: vec![(0, 0, 1.0), (1, 1, 1.0), (1, 0, -2.0)],
            cone: OrderingCone::nonnegative(2),
        };
        assert_eq!(prob.image(&[3.0, 4.0]), vec![3.0, -2.0]);
        assert_eq!(prob.weighted_objective(&[1.0, 1.0]), vec![-1.0, 1.0]);
    }
}
