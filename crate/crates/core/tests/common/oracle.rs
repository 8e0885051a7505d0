//! Brute-force reference for the upper image: describe
//! {(x, y) : x feasible, y - Px in the ordering cone} by halfspaces,
//! project out x by Fourier-Motzkin elimination, and enumerate the
//! projection's vertices and extreme directions combinatorially.
//!
//! Elimination is kept tractable by the classic safeguards: each derived
//! row carries the set of original rows it came from, and a row combining
//! more than (eliminated + 1) originals is dropped as derivable another
//! way; parallel rows keep only the strongest offset; the variable with
//! the fewest pairings goes first.

use molp::lp::{solve_lp, LpStatus, LpTolerances, Sense, StandardLp};
use molp::problem::MolpProblem;

/// One halfspace `a . v >= b`.
pub type Row = (Vec<f64>, f64);

const FM_TOL: f64 = 1e-9;

pub struct OracleImage {
    pub vertices: Vec<Vec<f64>>,
    /// Extreme directions, scaled to unit max-norm.
    pub rays: Vec<Vec<f64>>,
    pub hrep: Vec<Row>,
}

impl OracleImage {
    pub fn margin(&self, y: &[f64]) -> f64 {
        self.hrep
            .iter()
            .map(|(a, b)| dot(a, y) - b)
            .fold(f64::INFINITY, f64::min)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

#[derive(Clone)]
struct FmRow {
    a: Vec<f64>,
    b: f64,
    hist: u128,
}

fn normalized_fm(a: Vec<f64>, b: f64, hist: u128) -> Option<Result<FmRow, ()>> {
    let s = norm_inf(&a);
    if s <= 1e-11 {
        if b > FM_TOL {
            return Some(Err(()));
        }
        return None;
    }
    Some(Ok(FmRow {
        a: a.iter().map(|x| x / s).collect(),
        b: b / s,
        hist,
    }))
}

fn same_direction(x: &FmRow, y: &FmRow) -> bool {
    x.a.iter().zip(&y.a).all(|(p, r)| (p - r).abs() <= 1e-9)
}

/// Removes rows implied by a parallel row with a stronger (or equal)
/// offset; equal rows keep the copy with the smallest ancestry.
fn drop_dominated(rows: Vec<FmRow>) -> Vec<FmRow> {
    let mut kept: Vec<FmRow> = Vec::with_capacity(rows.len());
    for row in rows {
        let mut dominated = false;
        let mut replace: Option<usize> = None;
        for (i, k) in kept.iter().enumerate() {
            if !same_direction(&row, k) {
                continue;
            }
            if k.b >= row.b - 1e-9 {
                if (k.b - row.b).abs() <= 1e-9
                    && row.hist.count_ones() < k.hist.count_ones()
                {
                    replace = Some(i);
                } else {
                    dominated = true;
                }
            } else {
                replace = Some(i);
            }
            break;
        }
        if dominated {
            continue;
        }
        match replace {
            Some(i) => kept[i] = row,
            None => kept.push(row),
        }
    }
    kept
}

/// Fourier-Motzkin elimination of the first `count` coordinates. Returns
/// None when an infeasibility certificate (0 >= positive) appears.
fn eliminate_leading(initial: Vec<Row>, count: usize) -> Option<Vec<Row>> {
    assert!(initial.len() <= 128, "too many rows for ancestry tracking");
    let mut rows: Vec<FmRow> = initial
        .into_iter()
        .enumerate()
        .filter_map(|(i, (a, b))| match normalized_fm(a, b, 1u128 << i) {
            Some(Ok(row)) => Some(Some(row)),
            Some(Err(())) => Some(None),
            None => None,
        })
        .collect::<Option<Vec<_>>>()?;

    for step in 1..=count {
        let remaining = count - step + 1;
        let target = (0..remaining)
            .min_by_key(|&p| {
                let pos = rows.iter().filter(|r| r.a[p] > FM_TOL).count();
                let neg = rows.iter().filter(|r| r.a[p] < -FM_TOL).count();
                pos * neg
            })
            .unwrap();

        let mut keep: Vec<FmRow> = Vec::new();
        let mut pos: Vec<FmRow> = Vec::new();
        let mut neg: Vec<FmRow> = Vec::new();
        for mut row in rows {
            let c = row.a[target];
            if c.abs() <= FM_TOL {
                row.a.remove(target);
                keep.push(row);
            } else if c > 0.0 {
                pos.push(row);
            } else {
                neg.push(row);
            }
        }
        let max_ancestry = step as u32 + 1;
        for p in &pos {
            for n in &neg {
                let hist = p.hist | n.hist;
                if hist.count_ones() > max_ancestry {
                    continue;
                }
                let cp = p.a[target];
                let cn = -n.a[target];
                let a: Vec<f64> = (0..p.a.len())
                    .filter(|&i| i != target)
                    .map(|i| cn * p.a[i] + cp * n.a[i])
                    .collect();
                let b = cn * p.b + cp * n.b;
                match normalized_fm(a, b, hist) {
                    Some(Ok(row)) => keep.push(row),
                    Some(Err(())) => return None,
                    None => {}
                }
            }
        }
        rows = drop_dominated(keep);
        assert!(
            rows.len() <= 2000,
            "elimination blow-up: {} rows at step {step}",
            rows.len()
        );
    }
    Some(prune(
        drop_dominated(rows)
            .into_iter()
            .map(|r| (r.a, r.b))
            .collect(),
    ))
}

/// Drops rows implied by the rest (checked by one scalar program each).
/// Only called on the final low-dimensional system.
fn prune(rows: Vec<Row>) -> Vec<Row> {
    let mut kept = rows;
    let mut i = 0;
    while i < kept.len() {
        let (a, b) = kept[i].clone();
        let dim = a.len();
        let mut lp = StandardLp {
            sense: Sense::Minimize,
            objective: a.clone(),
            entries: Vec::new(),
            row_lower: Vec::new(),
            row_upper: Vec::new(),
            col_lower: vec![f64::NEG_INFINITY; dim],
            col_upper: vec![f64::INFINITY; dim],
        };
        for (normal, rhs) in kept
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != i)
            .map(|(_, row)| row)
        {
            let row = lp.row_lower.len();
            for (j, v) in normal.iter().enumerate() {
                if *v != 0.0 {
                    lp.entries.push((row, j, *v));
                }
            }
            lp.row_lower.push(*rhs);
            lp.row_upper.push(f64::INFINITY);
        }
        let redundant = match solve_lp(&lp, None, LpTolerances::default()) {
            Ok(res) => res.status == LpStatus::Optimal && res.objective >= b - 1e-7,
            Err(_) => false,
        };
        if redundant {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}

/// Halfspaces of the cone spanned by the given generators, derived by
/// eliminating the combination coefficients.
fn cone_halfspaces(generators: &[Vec<f64>], q: usize) -> Vec<Row> {
    let k = generators.len();
    // Variables (lambda_1..lambda_k, v_1..v_q).
    let mut rows: Vec<Row> = Vec::new();
    for i in 0..q {
        let mut eq = vec![0.0; k + q];
        for (j, g) in generators.iter().enumerate() {
            eq[j] = -g[i];
        }
        eq[k + i] = 1.0;
        let neg: Vec<f64> = eq.iter().map(|x| -x).collect();
        rows.push((eq, 0.0));
        rows.push((neg, 0.0));
    }
    for j in 0..k {
        let mut pos = vec![0.0; k + q];
        pos[j] = 1.0;
        rows.push((pos, 0.0));
    }
    let projected = eliminate_leading(rows, k).expect("a cone is never empty");
    // Offsets are exact zeros up to roundoff.
    projected.into_iter().map(|(a, _)| (a, 0.0)).collect()
}

/// Halfspace rows of the lifted set over variables (x, y).
fn lifted_rows(prob: &MolpProblem) -> Vec<Row> {
    let cs = &prob.constraints;
    let n = cs.num_vars;
    let q = prob.num_objectives;
    let dim = n + q;
    let mut rows: Vec<Row> = Vec::new();

    let mut dense_b = vec![vec![0.0; n]; cs.num_rows];
    for &(i, j, v) in &cs.entries {
        dense_b[i][j] += v;
    }
    for i in 0..cs.num_rows {
        if cs.row_lower[i].is_finite() {
            let mut a = vec![0.0; dim];
            a[..n].copy_from_slice(&dense_b[i]);
            rows.push((a, cs.row_lower[i]));
        }
        if cs.row_upper[i].is_finite() {
            let mut a = vec![0.0; dim];
            for j in 0..n {
                a[j] = -dense_b[i][j];
            }
            rows.push((a, -cs.row_upper[i]));
        }
    }
    for j in 0..n {
        if cs.var_lower[j].is_finite() {
            let mut a = vec![0.0; dim];
            a[j] = 1.0;
            rows.push((a, cs.var_lower[j]));
        }
        if cs.var_upper[j].is_finite() {
            let mut a = vec![0.0; dim];
            a[j] = -1.0;
            rows.push((a, -cs.var_upper[j]));
        }
    }

    let mut dense_p = vec![vec![0.0; n]; q];
    for &(i, j, v) in &prob.objective_entries {
        dense_p[i][j] += v;
    }
    for (normal, _) in cone_halfspaces(&prob.cone.generators, q) {
        // normal . (y - Px) >= 0.
        let mut a = vec![0.0; dim];
        for j in 0..n {
            for i in 0..q {
                a[j] -= normal[i] * dense_p[i][j];
            }
        }
        a[n..].copy_from_slice(&normal);
        rows.push((a, 0.0));
    }
    rows
}

fn solve_square(rows: &[&Row], q: usize) -> Option<Vec<f64>> {
    match q {
        2 => {
            let (a, b) = (&rows[0].0, &rows[1].0);
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() <= 1e-9 {
                return None;
            }
            let (r0, r1) = (rows[0].1, rows[1].1);
            Some(vec![
                (r0 * b[1] - a[1] * r1) / det,
                (a[0] * r1 - r0 * b[0]) / det,
            ])
        }
        3 => {
            let m: Vec<&Vec<f64>> = rows.iter().map(|r| &r.0).collect();
            let det = det3(m[0], m[1], m[2]);
            if det.abs() <= 1e-9 {
                return None;
            }
            let rhs: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let mut v = Vec::with_capacity(3);
            for col in 0..3 {
                let cols: Vec<Vec<f64>> = (0..3)
                    .map(|r| {
                        let mut row = m[r].clone();
                        row[col] = rhs[r];
                        row
                    })
                    .collect();
                v.push(det3(&cols[0], &cols[1], &cols[2]) / det);
            }
            Some(v)
        }
        _ => unreachable!("oracle supports 2 or 3 objectives"),
    }
}

fn det3(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn push_unique(list: &mut Vec<Vec<f64>>, v: Vec<f64>, tol: f64) {
    if !list
        .iter()
        .any(|u| u.iter().zip(&v).all(|(a, b)| (a - b).abs() <= tol))
    {
        list.push(v);
    }
}

fn enumerate(rows: &[Row], q: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let feasible = |v: &[f64]| rows.iter().all(|(a, b)| dot(a, v) >= b - 1e-6);
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let combos: Vec<Vec<usize>> = if q == 2 {
        (0..rows.len())
            .flat_map(|i| ((i + 1)..rows.len()).map(move |j| vec![i, j]))
            .collect()
    } else {
        let mut out = Vec::new();
        for i in 0..rows.len() {
            for j in (i + 1)..rows.len() {
                for k in (j + 1)..rows.len() {
                    out.push(vec![i, j, k]);
                }
            }
        }
        out
    };
    for combo in &combos {
        let chosen: Vec<&Row> = combo.iter().map(|&i| &rows[i]).collect();
        if let Some(v) = solve_square(&chosen, q) {
            if feasible(&v) {
                push_unique(&mut vertices, v, 1e-7);
            }
        }
    }

    let recession_ok = |d: &[f64]| rows.iter().all(|(a, _)| dot(a, d) >= -1e-9);
    let mut rays: Vec<Vec<f64>> = Vec::new();
    let try_ray = |d: Vec<f64>, rays: &mut Vec<Vec<f64>>| {
        let s = norm_inf(&d);
        if s <= 1e-9 {
            return;
        }
        let unit: Vec<f64> = d.iter().map(|x| x / s).collect();
        if recession_ok(&unit) {
            push_unique(rays, unit, 1e-7);
        }
    };
    if q == 2 {
        for (a, _) in rows {
            try_ray(vec![a[1], -a[0]], &mut rays);
            try_ray(vec![-a[1], a[0]], &mut rays);
        }
    } else {
        for i in 0..rows.len() {
            for j in (i + 1)..rows.len() {
                let (a, b) = (&rows[i].0, &rows[j].0);
                let c = vec![
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                try_ray(c.clone(), &mut rays);
                try_ray(c.iter().map(|x| -x).collect(), &mut rays);
            }
        }
    }
    (vertices, rays)
}

/// Computes the upper image by projection, or None when the feasible set
/// is empty.
pub fn upper_image_oracle(prob: &MolpProblem) -> Option<OracleImage> {
    let rows = lifted_rows(prob);
    let projected = eliminate_leading(rows, prob.constraints.num_vars)?;
    let (vertices, rays) = enumerate(&projected, prob.num_objectives);
    Some(OracleImage {
        vertices,
        rays,
        hrep: projected,
    })
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let one_way = |from: &[Vec<f64>], to: &[Vec<f64>]| {
        from.iter()
            .map(|p| {
                to.iter()
                    .map(|r| {
                        p.iter()
                            .zip(r)
                            .map(|(x, y)| (x - y) * (x - y))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0_f64, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Scales every vector to unit max-norm (for direction comparison).
pub fn normalized(dirs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    dirs.iter()
        .map(|d| {
            let s = norm_inf(d);
            d.iter().map(|x| x / s).collect()
        })
        .collect()
}
