//! Polyhedral calculus: conversion between halfspace and generator
//! descriptions, redundancy removal, cone sections, and membership tests.
//!
//! Conversions run the double description method on the homogenization: a
//! polyhedron `{y : a_i·y >= b_i}` in dimension `q` becomes the cone
//! `{(y,t) : a_i·y - b_i t >= 0, t >= 0}` in dimension `q+1`, whose generators
//! split into points (`t > 0`), directions (`t = 0`), and lines. Lineality is
//! carried explicitly as a basis and reduced one constraint at a time, so the
//! ray set always describes a pointed cone and the combinatorial adjacency
//! test applies.

use crate::duality::{
    inner_halfspace_for_direction, inner_halfspace_for_point, outer_halfspace, DualityContext,
};
use crate::linalg::{dot, lex_cmp, norm2, norm_inf};
use crate::lp::{blank_lp, solve_lp, LpStatus, LpTolerances, Sense};
use thiserror::Error;

/// Halfspace description: every row `(a, b)` states `a·y >= b`.
#[derive(Debug, Clone, PartialEq)]
pub struct HRep {
    pub dim: usize,
    pub rows: Vec<(Vec<f64>, f64)>,
}

/// Generator description: the set `conv(points) + cone(rays)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VRep {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polyhedron is empty")]
    Empty,
    #[error("polyhedron contains a line")]
    ContainsLine,
}

impl HRep {
    pub fn new(dim: usize) -> Self {
        HRep { dim, rows: Vec::new() }
    }

    pub fn push(&mut self, normal: Vec<f64>, rhs: f64) {
        debug_assert_eq!(normal.len(), self.dim);
        self.rows.push((normal, rhs));
    }

    /// Adds `a·y = b` as a pair of opposite inequalities.
    pub fn push_equality(&mut self, normal: Vec<f64>, rhs: f64) {
        let negated: Vec<f64> = normal.iter().map(|v| -v).collect();
        self.rows.push((normal, rhs));
        self.rows.push((negated, -rhs));
    }

    /// Signed distance to the most violated row, nonnegative inside.
    pub fn margin(&self, y: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|(a, b)| dot(a, y) - b)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.margin(y) >= -tol
    }
}

impl VRep {
    pub fn new(dim: usize) -> Self {
        VRep {
            dim,
            points: Vec::new(),
            rays: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Double description on a cone.

struct Ray {
    v: Vec<f64>,
    tight: Vec<u64>,
}

impl Ray {
    fn set_tight(&mut self, idx: usize) {
        self.tight[idx / 64] |= 1 << (idx % 64);
    }
}

struct ConeBuilder {
    words: usize,
    lines: Vec<Vec<f64>>,
    rays: Vec<Ray>,
    inserted: usize,
    tol: f64,
}

impl ConeBuilder {
    /// Starts from the full space: the lineality basis is the identity.
    fn new(dim: usize, num_rows: usize, tol: f64) -> Self {
        let mut lines = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            lines.push(e);
        }
        ConeBuilder {
            words: num_rows.div_ceil(64).max(1),
            lines,
            rays: Vec::new(),
            inserted: 0,
            tol,
        }
    }

    /// Intersects the current cone with `{z : a·z >= 0}`.
    fn insert(&mut self, a: &[f64]) {
        let idx = self.inserted;
        self.inserted += 1;

        // A lineality direction not contained in the hyperplane absorbs the
        // constraint: it leaves the basis and re-enters as a single ray.
        let mut pivot: Option<usize> = None;
        let mut best = self.tol;
        for (k, l) in self.lines.iter().enumerate() {
            let s = dot(a, l).abs();
            if s > best {
                best = s;
                pivot = Some(k);
            }
        }
        if let Some(k) = pivot {
            let l0 = self.lines.swap_remove(k);
            let s0 = dot(a, &l0);
            for l in &mut self.lines {
                let s = dot(a, l);
                if s != 0.0 {
                    for (li, p) in l.iter_mut().zip(&l0) {
                        *li -= s / s0 * p;
                    }
                    normalize(l);
                }
            }
            for ray in &mut self.rays {
                let s = dot(a, &ray.v);
                if s != 0.0 {
                    for (ri, p) in ray.v.iter_mut().zip(&l0) {
                        *ri -= s / s0 * p;
                    }
                    normalize(&mut ray.v);
                }
                ray.set_tight(idx);
            }
            let mut v = l0;
            if s0 < 0.0 {
                for x in &mut v {
                    *x = -*x;
                }
            }
            normalize(&mut v);
            let mut tight = vec![0u64; self.words];
            for i in 0..idx {
                tight[i / 64] |= 1 << (i % 64);
            }
            self.rays.push(Ray { v, tight });
            return;
        }

        let mut plus: Vec<Ray> = Vec::new();
        let mut zero: Vec<Ray> = Vec::new();
        let mut minus: Vec<Ray> = Vec::new();
        for mut ray in self.rays.drain(..) {
            let s = dot(a, &ray.v);
            if s > self.tol {
                plus.push(ray);
            } else if s < -self.tol {
                minus.push(ray);
            } else {
                ray.set_tight(idx);
                zero.push(ray);
            }
        }
        if minus.is_empty() {
            self.rays = plus;
            self.rays.append(&mut zero);
            return;
        }

        let mut fresh: Vec<Ray> = Vec::new();
        for p in &plus {
            for m in &minus {
                if !self.adjacent(p, m, &plus, &zero, &minus) {
                    continue;
                }
                let sp = dot(a, &p.v);
                let sm = dot(a, &m.v);
                let mut v: Vec<f64> = p
                    .v
                    .iter()
                    .zip(&m.v)
                    .map(|(pi, mi)| sp * mi - sm * pi)
                    .collect();
                normalize(&mut v);
                let mut tight: Vec<u64> = p
                    .tight
                    .iter()
                    .zip(&m.tight)
                    .map(|(x, y)| x & y)
                    .collect();
                tight[idx / 64] |= 1 << (idx % 64);
                fresh.push(Ray { v, tight });
            }
        }
        self.rays = plus;
        self.rays.append(&mut zero);
        self.rays.append(&mut fresh);
    }

    /// Two rays are adjacent when no third ray is tight on every constraint
    /// they are both tight on.
    fn adjacent(&self, p: &Ray, m: &Ray, plus: &[Ray], zero: &[Ray], minus: &[Ray]) -> bool {
        let common: Vec<u64> = p.tight.iter().zip(&m.tight).map(|(x, y)| x & y).collect();
        let covers = |r: &Ray| -> bool {
            r.tight
                .iter()
                .zip(&common)
                .all(|(t, c)| t & c == *c)
        };
        for r in plus.iter().chain(zero).chain(minus) {
            if std::ptr::eq(r, p) || std::ptr::eq(r, m) {
                continue;
            }
            if covers(r) {
                return false;
            }
        }
        true
    }
}

fn normalize(v: &mut [f64]) {
    let n = norm2(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

/// Scales each row to unit length, sorts lexicographically, and drops
/// duplicate neighbours. Processing order is then a function of the row set
/// alone.
fn canonical_rows(rows: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    let mut scaled: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for mut row in rows {
        let n = norm2(&row);
        if n <= tol {
            continue;
        }
        for x in &mut row {
            *x /= n;
        }
        scaled.push(row);
    }
    scaled.sort_by(|x, y| lex_cmp(x, y));
    scaled.dedup_by(|x, y| {
        x.iter()
            .zip(y.iter())
            .all(|(xi, yi)| (xi - yi).abs() <= tol)
    });
    scaled
}

/// Computes the generator description of `{y : a·y >= b for every row}`.
///
/// Fails with `Empty` when no point satisfies all rows and with
/// `ContainsLine` when the set is nonempty but has no vertex. A successful
/// result always carries at least one point and no line.
pub fn h_to_v(h: &HRep, tol: f64) -> Result<VRep, PolyError> {
    let q = h.dim;
    let raw: Vec<Vec<f64>> = h
        .rows
        .iter()
        .map(|(a, b)| {
            let mut row = a.clone();
            row.push(-b);
            row
        })
        .collect();
    let lifted = canonical_rows(raw, tol);
    let mut builder = ConeBuilder::new(q + 1, lifted.len() + 1, tol);
    let mut t_row = vec![0.0; q + 1];
    t_row[q] = 1.0;
    builder.insert(&t_row);
    for row in &lifted {
        builder.insert(row);
    }

    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut rays: Vec<Vec<f64>> = Vec::new();
    for ray in &builder.rays {
        let t = ray.v[q];
        if t > tol {
            points.push(ray.v[..q].iter().map(|x| x / t).collect());
        } else {
            let mut d = ray.v[..q].to_vec();
            normalize(&mut d);
            if norm_inf(&d) > tol {
                rays.push(d);
            }
        }
    }
    if points.is_empty() {
        return Err(PolyError::Empty);
    }
    if !builder.lines.is_empty() {
        return Err(PolyError::ContainsLine);
    }
    dedup_sorted(&mut points, tol);
    dedup_sorted(&mut rays, tol);
    Ok(VRep {
        dim: q,
        points,
        rays,
    })
}

fn dedup_sorted(vecs: &mut Vec<Vec<f64>>, tol: f64) {
    vecs.sort_by(|x, y| lex_cmp(x, y));
    vecs.dedup_by(|x, y| {
        x.iter()
            .zip(y.iter())
            .all(|(xi, yi)| (xi - yi).abs() <= 10.0 * tol)
    });
}

/// Computes an irredundant halfspace description of
/// `conv(points) + cone(rays)`.
///
/// The generators are lifted to a cone and its dual cone is enumerated; dual
/// rays become inequality rows, dual lineality becomes equality row pairs.
/// Rows are normalized to unit normals and sorted. Fails with `Empty` when
/// no point is given.
pub fn v_to_h(v: &VRep, tol: f64) -> Result<HRep, PolyError> {
    if v.points.is_empty() {
        return Err(PolyError::Empty);
    }
    let q = v.dim;
    let mut cons: Vec<Vec<f64>> = Vec::new();
    for p in &v.points {
        let mut g = p.clone();
        g.push(1.0);
        cons.push(g);
    }
    for r in &v.rays {
        let mut g = r.clone();
        g.push(0.0);
        cons.push(g);
    }
    let lifted = canonical_rows(cons, tol);
    let mut builder = ConeBuilder::new(q + 1, lifted.len(), tol);
    for row in &lifted {
        builder.insert(row);
    }

    let tight_tol = 100.0 * tol;
    let lifted_points: Vec<Vec<f64>> = v
        .points
        .iter()
        .map(|p| {
            let mut g = p.clone();
            g.push(1.0);
            let n = norm2(&g);
            g.iter().map(|x| x / n).collect()
        })
        .collect();

    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut keep = |n: &[f64], both_signs: bool| {
        let a = &n[..q];
        let scale = norm2(a);
        if scale <= tol {
            return;
        }
        let normal: Vec<f64> = a.iter().map(|x| x / scale).collect();
        let rhs = -n[q] / scale;
        if both_signs {
            let flipped: Vec<f64> = normal.iter().map(|x| -x).collect();
            rows.push((flipped, -rhs));
        }
        rows.push((normal, rhs));
    };
    for ray in &builder.rays {
        // Facet rows touch the generators; anything else is slack everywhere
        // and only shows up for lower-dimensional inputs.
        let touches = lifted_points
            .iter()
            .any(|g| dot(g, &ray.v).abs() <= tight_tol);
        if touches {
            keep(&ray.v, false);
        }
    }
    for line in &builder.lines {
        keep(line, true);
    }
    rows.sort_by(|(a1, b1), (a2, b2)| {
        lex_cmp(a1, a2).then(b1.partial_cmp(b2).unwrap_or(std::cmp::Ordering::Equal))
    });
    rows.dedup_by(|(a1, b1), (a2, b2)| {
        (*b1 - *b2).abs() <= 10.0 * tol
            && a1
                .iter()
                .zip(a2.iter())
                .all(|(x, y)| (x - y).abs() <= 10.0 * tol)
    });
    Ok(HRep { dim: q, rows })
}

/// Intersects a cone with the coordinate subspace `{y : y_i = 0, i not in
/// keep_coords}` and reports the result in the kept coordinates, in the
/// order given.
///
/// The origin always belongs, so the result is never empty; `ContainsLine`
/// signals a non-pointed section.
pub fn cone_section(cone_v: &VRep, keep_coords: &[usize], tol: f64) -> Result<VRep, PolyError> {
    let dim = cone_v.dim;
    let mut h = v_to_h(cone_v, tol)?;
    for i in (0..dim).filter(|i| !keep_coords.contains(i)) {
        let mut normal = vec![0.0; dim];
        normal[i] = 1.0;
        h.push_equality(normal, 0.0);
    }
    let full = h_to_v(&h, tol)?;
    let project =
        |v: &Vec<f64>| -> Vec<f64> { keep_coords.iter().map(|&i| v[i]).collect() };
    Ok(VRep {
        dim: keep_coords.len(),
        points: full.points.iter().map(project).collect(),
        rays: full.rays.iter().map(project).collect(),
    })
}

/// Expands dual-image points into the halfspaces they induce on the primal
/// image space and enumerates the resulting outer approximation.
///
/// Each `t*` contributes `{y : w(t*)'y >= t*_q}`; the dual image's downward
/// recession adds nothing. The output is minimal. `ContainsLine` signals
/// that the approximated upper image has no vertex.
pub fn dual_from_outer(
    tstar_points: &[Vec<f64>],
    c: &[f64],
    tol: f64,
) -> Result<VRep, PolyError> {
    let ctx = DualityContext::new(c.to_vec()).expect("normalized c");
    let mut h = HRep::new(c.len());
    for tstar in tstar_points {
        let (normal, rhs) = outer_halfspace(tstar, &ctx);
        h.push(normal, rhs);
    }
    h_to_v(&h, tol)
}

/// Expands primal-image generators into the halfspaces they induce on the
/// dual image space and returns the vertex set of the resulting outer
/// approximation. The recession direction of that set is always the
/// negative last unit vector and is not returned.
///
/// `t_dirs` must cover the ordering cone's generators or the enumerated set
/// may fail to be vertical-facet-closed.
pub fn dual_from_inner(
    t_points: &[Vec<f64>],
    t_dirs: &[Vec<f64>],
    c: &[f64],
    tol: f64,
) -> Result<Vec<Vec<f64>>, PolyError> {
    let ctx = DualityContext::new(c.to_vec()).expect("normalized c");
    let mut h = HRep::new(c.len());
    for p in t_points {
        let (normal, rhs) = inner_halfspace_for_point(p, &ctx);
        h.push(normal, rhs);
    }
    for d in t_dirs {
        let (normal, rhs) = inner_halfspace_for_direction(d, &ctx);
        h.push(normal, rhs);
    }
    Ok(h_to_v(&h, tol)?.points)
}

/// Drops every point lying in the hull of the remaining generators and every
/// ray lying in the cone of the remaining rays.
pub fn minimize_vrep(v: &VRep, tol: f64) -> VRep {
    let q = v.dim;
    let lp_tol = LpTolerances::with_feasibility(tol.max(1e-11));

    let mut points = v.points.clone();
    let mut k = 0;
    while k < points.len() {
        let others: Vec<&Vec<f64>> = points
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, p)| p)
            .collect();
        if !others.is_empty() && in_hull(&points[k], &others, &v.rays, q, lp_tol) {
            points.remove(k);
        } else {
            k += 1;
        }
    }

    let mut rays = v.rays.clone();
    let mut k = 0;
    while k < rays.len() {
        let others: Vec<&Vec<f64>> = rays
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, r)| r)
            .collect();
        if in_cone(&rays[k], &others, q, lp_tol) {
            rays.remove(k);
        } else {
            k += 1;
        }
    }

    points.sort_by(|a, b| lex_cmp(a, b));
    rays.sort_by(|a, b| lex_cmp(a, b));
    VRep { dim: q, points, rays }
}

/// Membership of `y` in `conv(points) + cone(rays)`, decided by LP.
pub fn vrep_contains(v: &VRep, y: &[f64], tol: f64) -> bool {
    let refs: Vec<&Vec<f64>> = v.points.iter().collect();
    if refs.is_empty() {
        return false;
    }
    in_hull(y, &refs, &v.rays, v.dim, LpTolerances::with_feasibility(tol.max(1e-11)))
}

fn in_hull(
    target: &[f64],
    points: &[&Vec<f64>],
    rays: &[Vec<f64>],
    q: usize,
    tol: LpTolerances,
) -> bool {
    let np = points.len();
    let nr = rays.len();
    let mut lp = blank_lp(Sense::Minimize, q + 1, np + nr);
    for (j, p) in points.iter().enumerate() {
        for i in 0..q {
            if p[i] != 0.0 {
                lp.entries.push((i, j, p[i]));
            }
        }
        lp.entries.push((q, j, 1.0));
    }
    for (j, r) in rays.iter().enumerate() {
        for i in 0..q {
            if r[i] != 0.0 {
                lp.entries.push((i, np + j, r[i]));
            }
        }
    }
    for i in 0..q {
        lp.row_lower[i] = target[i];
        lp.row_upper[i] = target[i];
    }
    lp.row_lower[q] = 1.0;
    lp.row_upper[q] = 1.0;
    for j in 0..np + nr {
        lp.col_lower[j] = 0.0;
    }
    matches!(
        solve_lp(&lp, None, tol).map(|r| r.status),
        Ok(LpStatus::Optimal)
    )
}

fn in_cone(target: &[f64], rays: &[&Vec<f64>], q: usize, tol: LpTolerances) -> bool {
    let nr = rays.len();
    let mut lp = blank_lp(Sense::Minimize, q, nr);
    for (j, r) in rays.iter().enumerate() {
        for i in 0..q {
            if r[i] != 0.0 {
                lp.entries.push((i, j, r[i]));
            }
        }
    }
    for i in 0..q {
        lp.row_lower[i] = target[i];
        lp.row_upper[i] = target[i];
    }
    for j in 0..nr {
        lp.col_lower[j] = 0.0;
    }
    matches!(
        solve_lp(&lp, None, tol).map(|r| r.status),
        Ok(LpStatus::Optimal)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        v.sort_by(|a, b| lex_cmp(a, b));
        v
    }

    fn assert_vecs_close(got: &[Vec<f64>], want: &[Vec<f64>]) {
        assert_eq!(got.len(), want.len(), "got {got:?}, want {want:?}");
        let w = sorted(want.to_vec());
        for (g, w) in sorted(got.to_vec()).iter().zip(&w) {
            for (a, b) in g.iter().zip(w) {
                assert!((a - b).abs() < 1e-7, "got {got:?}, want {want:?}");
            }
        }
    }

    #[test]
    fn unit_square_vertices() {
        let mut h = HRep::new(2);
        h.push(vec![1.0, 0.0], 0.0);
        h.push(vec![0.0, 1.0], 0.0);
        h.push(vec![-1.0, 0.0], -1.0);
        h.push(vec![0.0, -1.0], -1.0);
        let v = h_to_v(&h, TOL).unwrap();
        assert_vecs_close(
            &v.points,
            &[
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
            ],
        );
        assert!(v.rays.is_empty());
    }

    #[test]
    fn shifted_quadrant_has_vertex_and_rays() {
        let mut h = HRep::new(2);
        h.push(vec![1.0, 0.0], 1.0);
        h.push(vec![0.0, 1.0], 2.0);
        let v = h_to_v(&h, TOL).unwrap();
        assert_vecs_close(&v.points, &[vec![1.0, 2.0]]);
        assert_vecs_close(&v.rays, &[vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn infeasible_rows_detected() {
        let mut h = HRep::new(1);
        h.push(vec![1.0], 1.0);
        h.push(vec![-1.0], 0.0);
        assert_eq!(h_to_v(&h, TOL), Err(PolyError::Empty));
    }

    #[test]
    fn halfplane_contains_line() {
        let mut h = HRep::new(2);
        h.push(vec![0.0, 1.0], 0.0);
        assert_eq!(h_to_v(&h, TOL), Err(PolyError::ContainsLine));
    }

    #[test]
    fn simplex_cover_region() {
        // y1 >= 0, y2 >= 0, y1 + y2 >= 1: two vertices and the axis rays.
        let mut h = HRep::new(2);
        h.push(vec![1.0, 0.0], 0.0);
        h.push(vec![0.0, 1.0], 0.0);
        h.push(vec![1.0, 1.0], 1.0);
        let v = h_to_v(&h, TOL).unwrap();
        assert_vecs_close(&v.points, &[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_vecs_close(&v.rays, &[vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn square_round_trip() {
        let v = VRep {
            dim: 2,
            points: vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 1.0],
            ],
            rays: vec![],
        };
        let h = v_to_h(&v, TOL).unwrap();
        assert_eq!(h.rows.len(), 4);
        let back = h_to_v(&h, TOL).unwrap();
        assert_vecs_close(&back.points, &v.points);
        assert!(back.rays.is_empty());
    }

    #[test]
    fn single_point_is_pinned() {
        let v = VRep {
            dim: 2,
            points: vec![vec![2.0, 3.0]],
            rays: vec![],
        };
        let h = v_to_h(&v, TOL).unwrap();
        assert_eq!(h.rows.len(), 4);
        assert!(h.contains(&[2.0, 3.0], 1e-9));
        assert!(!h.contains(&[2.0, 3.1], 1e-9));
        let back = h_to_v(&h, TOL).unwrap();
        assert_vecs_close(&back.points, &v.points);
    }

    #[test]
    fn segment_round_trip() {
        let v = VRep {
            dim: 2,
            points: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            rays: vec![],
        };
        let h = v_to_h(&v, TOL).unwrap();
        assert_eq!(h.rows.len(), 4);
        let back = h_to_v(&h, TOL).unwrap();
        assert_vecs_close(&back.points, &v.points);
    }

    #[test]
    fn unbounded_hull_round_trip() {
        let v = VRep {
            dim: 2,
            points: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            rays: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let h = v_to_h(&v, TOL).unwrap();
        let back = h_to_v(&h, TOL).unwrap();
        assert_vecs_close(&back.points, &v.points);
        assert_vecs_close(&back.rays, &v.rays);
    }

    #[test]
    fn octant_section_is_quadrant() {
        let cone = VRep {
            dim: 3,
            points: vec![vec![0.0; 3]],
            rays: vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        };
        let sec = cone_section(&cone, &[0, 1], TOL).unwrap();
        assert_eq!(sec.dim, 2);
        assert_vecs_close(&sec.points, &[vec![0.0, 0.0]]);
        assert_vecs_close(&sec.rays, &[vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn skewed_cone_section_single_ray() {
        // Only the combination canceling the third coordinate survives.
        let cone = VRep {
            dim: 3,
            points: vec![vec![0.0; 3]],
            rays: vec![
                vec![1.0, 0.0, 1.0],
                vec![0.0, 1.0, -1.0],
                vec![1.0, 1.0, 0.0],
            ],
        };
        let sec = cone_section(&cone, &[0, 1], TOL).unwrap();
        assert_vecs_close(&sec.points, &[vec![0.0, 0.0]]);
        assert_eq!(sec.rays.len(), 1);
        let r = &sec.rays[0];
        assert!((r[0] - r[1]).abs() <= 1e-9 && r[0] > 0.5);
    }

    #[test]
    fn trivial_cone_section() {
        let cone = VRep {
            dim: 3,
            points: vec![vec![0.0; 3]],
            rays: vec![],
        };
        let sec = cone_section(&cone, &[1, 2], TOL).unwrap();
        assert_vecs_close(&sec.points, &[vec![0.0, 0.0]]);
        assert!(sec.rays.is_empty());
    }

    #[test]
    fn outer_expansion_matches_hand_halfspaces() {
        let c = vec![1.0, 1.0];
        let tstar = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.5]];
        let v = dual_from_outer(&tstar, &c, TOL).unwrap();
        assert_vecs_close(&v.points, &[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_vecs_close(&v.rays, &[vec![0.0, 1.0], vec![1.0, 0.0]]);

        let v = dual_from_outer(&tstar[..2], &c, TOL).unwrap();
        assert_vecs_close(&v.points, &[vec![0.0, 0.0]]);
        assert_vecs_close(&v.rays, &[vec![0.0, 1.0], vec![1.0, 0.0]]);

        let single = dual_from_outer(&[vec![0.5, 1.0]], &c, TOL);
        assert_eq!(single.unwrap_err(), PolyError::ContainsLine);
    }

    #[test]
    fn inner_expansion_matches_hand_halfspaces() {
        let c = vec![1.0, 1.0];
        let e = [vec![1.0, 0.0], vec![0.0, 1.0]];
        let pts = dual_from_inner(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &e,
            &c,
            TOL,
        )
        .unwrap();
        assert_vecs_close(
            &pts,
            &[vec![0.0, 0.0], vec![0.5, 0.5], vec![1.0, 0.0]],
        );

        let pts = dual_from_inner(&[vec![0.0, 0.0]], &e, &c, TOL).unwrap();
        assert_vecs_close(&pts, &[vec![0.0, 0.0], vec![1.0, 0.0]]);

        let pts = dual_from_inner(
            &[vec![0.0, 0.0]],
            &[vec![1.0, 0.0], vec![1.0, 1.0]],
            &[2.0, 1.0],
            TOL,
        )
        .unwrap();
        assert_vecs_close(&pts, &[vec![0.0, 0.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn minimize_drops_interior_and_duplicates() {
        let v = VRep {
            dim: 2,
            points: vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.5, 0.25],
                vec![0.0, 1.0],
                vec![0.0, 1.0],
            ],
            rays: vec![],
        };
        let m = minimize_vrep(&v, TOL);
        assert_vecs_close(
            &m.points,
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        );
    }

    #[test]
    fn minimize_drops_conic_combinations() {
        // With the axis rays present, every point above (0,0) is absorbed.
        let v = VRep {
            dim: 2,
            points: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            rays: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
        };
        let m = minimize_vrep(&v, TOL);
        assert_vecs_close(&m.points, &[vec![0.0, 0.0]]);
        assert_vecs_close(&m.rays, &[vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn membership_checks() {
        let v = VRep {
            dim: 2,
            points: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            rays: vec![vec![1.0, 1.0]],
        };
        assert!(vrep_contains(&v, &[0.5, 0.2], TOL));
        assert!(vrep_contains(&v, &[3.0, 2.5], TOL));
        assert!(!vrep_contains(&v, &[-0.1, 0.0], TOL));
        assert!(!vrep_contains(&v, &[3.0, 0.0], TOL));
    }

    #[test]
    fn three_dimensional_box_with_corner_cut() {
        let mut h = HRep::new(3);
        for i in 0..3 {
            let mut lo = vec![0.0; 3];
            lo[i] = 1.0;
            h.push(lo, 0.0);
            let mut hi = vec![0.0; 3];
            hi[i] = -1.0;
            h.push(hi, -1.0);
        }
        h.push(vec![1.0, 1.0, 1.0], 0.5);
        let v = h_to_v(&h, TOL).unwrap();
        // The cut corner replaces one vertex with three.
        assert_eq!(v.points.len(), 10);
        assert!(v.rays.is_empty());
        for p in &v.points {
            assert!(h.contains(p, 1e-7));
        }
    }

    #[test]
    fn equalities_reduce_dimension() {
        let mut h = HRep::new(3);
        h.push_equality(vec![0.0, 0.0, 1.0], 2.0);
        h.push(vec![1.0, 0.0, 0.0], 0.0);
        h.push(vec![0.0, 1.0, 0.0], 0.0);
        h.push(vec![-1.0, -1.0, 0.0], -1.0);
        let v = h_to_v(&h, TOL).unwrap();
        assert_vecs_close(
            &v.points,
            &[vec![0.0, 0.0, 2.0], vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 2.0]],
        );
    }
}
