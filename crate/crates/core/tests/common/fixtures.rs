//! Hand-checked problems shared by the integration suites.

use molp::problem::{ConstraintSystem, MolpProblem, OrderingCone};

/// Two variables, componentwise order, feasible set
/// `{x : x1 + x2 >= 1, x >= 0}` with the identity objective. The upper
/// image has vertices (0,1) and (1,0) and recedes along both axes; the
/// lower image has vertices (0,0), (1/2,1/2), and (1,0).
pub fn instance_a() -> MolpProblem {
    let mut cs = ConstraintSystem::free(3, 2);
    cs.entries = vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (2, 1, 1.0)];
    cs.row_lower = vec![1.0, 0.0, 0.0];
    MolpProblem {
        num_objectives: 2,
        constraints: cs,
        objective_entries: vec![(0, 0, 1.0), (1, 1, 1.0)],
        cone: OrderingCone::nonnegative(2),
    }
}

/// One variable with `x >= 0` as a constraint row and the objective
/// `x -> (x, -x)`. The image is a half-line of slope -1 starting at the
/// origin, so the upper image is unbounded in a non-cone direction and
/// a bounding stage is required before refinement.
pub fn instance_b() -> MolpProblem {
    let mut cs = ConstraintSystem::free(1, 1);
    cs.entries = vec![(0, 0, 1.0)];
    cs.row_lower = vec![0.0];
    MolpProblem {
        num_objectives: 2,
        constraints: cs,
        objective_entries: vec![(0, 0, 1.0), (1, 0, -1.0)],
        cone: OrderingCone::nonnegative(2),
    }
}

/// Instance A plus the unsatisfiable row `0 >= 1`: the feasible set is
/// empty while the dual program stays feasible.
pub fn infeasible_instance() -> MolpProblem {
    let mut prob = instance_a();
    prob.constraints.num_rows += 1;
    prob.constraints.row_lower.push(1.0);
    prob.constraints.row_upper.push(f64::INFINITY);
    prob
}

/// Both objectives equal to the same free variable: every weight vector
/// prices the image at minus infinity, so no supporting hyperplane exists.
pub fn totally_unbounded_instance() -> MolpProblem {
    let cs = ConstraintSystem::free(0, 1);
    MolpProblem {
        num_objectives: 2,
        constraints: cs,
        objective_entries: vec![(0, 0, 1.0), (1, 0, 1.0)],
        cone: OrderingCone::nonnegative(2),
    }
}

/// One free variable mapped to (x, -x): the image is a full line, so the
/// upper image contains a line and has no vertices.
pub fn free_line_instance() -> MolpProblem {
    let cs = ConstraintSystem::free(0, 1);
    MolpProblem {
        num_objectives: 2,
        constraints: cs,
        objective_entries: vec![(0, 0, 1.0), (1, 0, -1.0)],
        cone: OrderingCone::nonnegative(2),
    }
}

/// Text form of instance A in the problem file grammar.
pub const INSTANCE_A_VLP: &str = "\
vlp 2 3 2
a 1 1 1
a 1 2 1
a 2 1 1
a 3 2 1
o 1 1 1
o 2 2 1
r 1 1 inf
r 2 0 inf
r 3 0 inf
";
