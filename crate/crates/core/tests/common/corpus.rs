//! Deterministic random problem corpus. Coefficients live on a coarse
//! grid so reference computations stay well conditioned, and every
//! instance is anchored at a known feasible point unless its rows were
//! drawn free on both sides.

use molp::problem::{ConstraintSystem, MolpProblem, OrderingCone, GEOM_TOL};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct CorpusInstance {
    pub name: String,
    pub prob: MolpProblem,
}

fn grid(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let steps = ((hi - lo) / 0.25).round() as u32;
    lo + 0.25 * f64::from(rng.gen_range(0..=steps))
}

fn random_cone(rng: &mut ChaCha8Rng, q: usize) -> OrderingCone {
    if rng.gen_bool(0.3) {
        return OrderingCone::nonnegative(q);
    }
    loop {
        let count = rng.gen_range(2..=5);
        let generators: Vec<Vec<f64>> = (0..count)
            .map(|_| {
                let mut g: Vec<f64> = (0..q - 1).map(|_| grid(rng, -2.0, 2.0)).collect();
                g.push(1.0);
                g
            })
            .collect();
        if let Ok(cone) = OrderingCone::from_generators(generators, None, GEOM_TOL) {
            return cone;
        }
    }
}

fn random_instance(rng: &mut ChaCha8Rng, index: usize) -> CorpusInstance {
    let q = if rng.gen_bool(0.5) { 2 } else { 3 };
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(0..=8);

    let mut cs = ConstraintSystem::free(m, n);
    for i in 0..m {
        for j in 0..n {
            if rng.gen_bool(0.65) {
                let v = grid(rng, -2.0, 2.0);
                if v != 0.0 {
                    cs.entries.push((i, j, v));
                }
            }
        }
    }

    let anchor: Vec<f64> = (0..n).map(|_| grid(rng, -2.0, 2.0)).collect();
    for j in 0..n {
        match rng.gen_range(0..4) {
            0 => {}
            1 => cs.var_lower[j] = anchor[j] - grid(rng, 0.0, 2.0),
            2 => cs.var_upper[j] = anchor[j] + grid(rng, 0.0, 2.0),
            _ => {
                cs.var_lower[j] = anchor[j] - grid(rng, 0.0, 2.0);
                cs.var_upper[j] = anchor[j] + grid(rng, 0.0, 2.0);
            }
        }
    }
    let activity = cs.row_activity(&anchor);
    for i in 0..m {
        let roll: f64 = rng.gen();
        if roll < 0.4 {
            cs.row_lower[i] = activity[i] - grid(rng, 0.0, 2.0);
        } else if roll < 0.7 {
            cs.row_upper[i] = activity[i] + grid(rng, 0.0, 2.0);
        } else if roll < 0.9 {
            cs.row_lower[i] = activity[i] - grid(rng, 0.0, 2.0);
            cs.row_upper[i] = activity[i] + grid(rng, 0.0, 2.0);
        }
    }

    let mut objective_entries = Vec::new();
    for k in 0..q {
        for j in 0..n {
            if rng.gen_bool(0.7) {
                let v = grid(rng, -2.0, 2.0);
                if v != 0.0 {
                    objective_entries.push((k, j, v));
                }
            }
        }
    }

    let prob = MolpProblem {
        num_objectives: q,
        constraints: cs,
        objective_entries,
        cone: random_cone(rng, q),
    };
    CorpusInstance {
        name: format!("corpus-{index:02}-q{q}-n{n}-m{m}"),
        prob,
    }
}

/// Seventy instances from a fixed seed, identical on every run.
pub fn corpus() -> Vec<CorpusInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4D4F_4C50);
    (0..70).map(|i| random_instance(&mut rng, i)).collect()
}
