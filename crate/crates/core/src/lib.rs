//! Solver for linear vector optimization problems: approximates the upper
//! image of `min Px subject to a <= Bx <= b, lb <= x <= ub` with respect to
//! a polyhedral ordering cone, together with the lower image of the
//! geometric dual problem, to any prescribed accuracy.

mod linalg;

pub mod benson;
pub mod duality;
pub mod io;
pub mod lp;
pub mod polyhedron;
pub mod problem;
pub mod risk;
pub mod scalarize;
pub mod two_phase;
