//! Geometric duality between the upper image of the vector problem and the
//! lower image of its dual: the bi-affine coupling, the weight maps in both
//! directions, and a verifier for the face-incidence bijection.
//!
//! Throughout, outcome vectors `y` live in the primal image space and
//! `ystar` in the dual one; both have dimension `q`. The normalization
//! vector `c` is interior to the ordering cone with last coordinate 1.

use crate::linalg::{dot, rank};
use crate::polyhedron::{v_to_h, vrep_contains, VRep};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct DualityContext {
    pub c: Vec<f64>,
}

#[derive(Debug, Error)]
#[error("last coordinate of c must be 1, got {0}")]
pub struct BadNormalization(f64);

impl DualityContext {
    pub fn new(c: Vec<f64>) -> Result<Self, BadNormalization> {
        let last = *c.last().expect("nonempty c");
        if (last - 1.0).abs() > 1e-12 {
            return Err(BadNormalization(last));
        }
        Ok(DualityContext { c })
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }
}

/// The coupling value
/// `phi(y, y*) = sum_{i<q} y_i y*_i + y_q (1 - sum_{i<q} c_i y*_i) - y*_q`.
/// Nonnegative on image-vertex pairs of solved problems (weak duality);
/// zero encodes incidence.
pub fn phi(y: &[f64], ystar: &[f64], ctx: &DualityContext) -> f64 {
    weight_from_dual(ystar, ctx)
        .iter()
        .zip(y)
        .map(|(w, yi)| w * yi)
        .sum::<f64>()
        - ystar[ctx.dim() - 1]
}

/// The coupling without the `-y*_q` term; vanishes when the direction `y`
/// of the upper image is incident to the vertical face through `y*`.
pub fn phi_hat(y: &[f64], ystar: &[f64], ctx: &DualityContext) -> f64 {
    phi(y, ystar, ctx) + ystar[ctx.dim() - 1]
}

/// Weight vector `w(y*) = (y*_1, ..., y*_{q-1}, 1 - sum_{i<q} c_i y*_i)`;
/// satisfies c'w = 1 identically.
pub fn weight_from_dual(ystar: &[f64], ctx: &DualityContext) -> Vec<f64> {
    let q = ctx.dim();
    let mut w = Vec::with_capacity(q);
    let mut last = 1.0;
    for i in 0..q - 1 {
        w.push(ystar[i]);
        last -= ctx.c[i] * ystar[i];
    }
    w.push(last);
    w
}

/// Dual-side weight `w*(y) = (y_1 - y_q c_1, ..., y_{q-1} - y_q c_{q-1}, -1)`;
/// phi(y, y*) = w*(y)'y* + y_q.
pub fn dual_from_point(y: &[f64], ctx: &DualityContext) -> Vec<f64> {
    let q = ctx.dim();
    let mut w = Vec::with_capacity(q);
    let yq = y[q - 1];
    for i in 0..q - 1 {
        w.push(y[i] - yq * ctx.c[i]);
    }
    w.push(-1.0);
    w
}

/// Halfspace of the primal image space induced by a dual point:
/// `{y : w(t*)'y >= t*_q}`.
pub fn outer_halfspace(tstar: &[f64], ctx: &DualityContext) -> (Vec<f64>, f64) {
    (weight_from_dual(tstar, ctx), tstar[ctx.dim() - 1])
}

/// Halfspace of the dual image space induced by a primal point:
/// `{y* : w*(p)'y* >= -p_q}`, i.e. phi(p, .) >= 0.
pub fn inner_halfspace_for_point(p: &[f64], ctx: &DualityContext) -> (Vec<f64>, f64) {
    let q = ctx.dim();
    (dual_from_point(p, ctx), -p[q - 1])
}

/// Halfspace of the dual image space induced by a primal direction:
/// `{y* : w(y*)'d >= 0}` expanded as an affine row in y*.
pub fn inner_halfspace_for_direction(d: &[f64], ctx: &DualityContext) -> (Vec<f64>, f64) {
    let q = ctx.dim();
    let mut normal = dual_from_point(d, ctx);
    normal[q - 1] = 0.0;
    (normal, -d[q - 1])
}

/// One matched face pair of the incidence bijection.
#[derive(Debug, Clone)]
pub struct IncidencePair {
    /// The vertex (or direction) generating the pairing.
    pub source: Vec<f64>,
    /// Indices of the partner representation's vertices lying on the face.
    pub tight: Vec<usize>,
    /// Affine dimension of the matched face.
    pub face_dim: usize,
}

#[derive(Debug, Clone, Default)]
pub struct IncidenceReport {
    /// Dual vertices paired with facets of the upper image.
    pub from_dual_vertices: Vec<IncidencePair>,
    /// Primal vertices paired with K-maximal facets of the lower image.
    pub from_primal_vertices: Vec<IncidencePair>,
    /// Primal extreme directions paired with vertical facets of the lower
    /// image (empty when q = 1).
    pub from_primal_directions: Vec<IncidencePair>,
    /// Smallest coupling value seen over all vertex pairs (weak duality
    /// demands it be nonnegative up to tolerance).
    pub min_phi: f64,
    pub violations: Vec<String>,
}

impl IncidenceReport {
    pub fn is_bijection(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for IncidenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "incidence: {} dual-vertex pairings, {} primal-vertex pairings, {} direction pairings, min coupling {:.3e}",
            self.from_dual_vertices.len(),
            self.from_primal_vertices.len(),
            self.from_primal_directions.len(),
            self.min_phi
        )?;
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

fn affine_dim(vectors: &[&Vec<f64>], extra_dirs: &[&[f64]], q: usize, tol: f64) -> Option<usize> {
    let base = vectors.first()?;
    let mut rows: Vec<f64> = Vec::new();
    let mut count = 0;
    for v in &vectors[1..] {
        rows.extend(v.iter().zip(base.iter()).map(|(a, b)| a - b));
        count += 1;
    }
    for d in extra_dirs {
        rows.extend_from_slice(d);
        count += 1;
    }
    if count == 0 {
        return Some(0);
    }
    Some(rank(&rows, count, q, tol))
}

fn vertex_mean(verts: &[&Vec<f64>], q: usize) -> Vec<f64> {
    let mut center = vec![0.0; q];
    for v in verts {
        for (ci, vi) in center.iter_mut().zip(v.iter()) {
            *ci += vi / verts.len() as f64;
        }
    }
    center
}

/// Checks the inclusion-reversing bijection between the faces of a solved
/// problem's upper image and the K-maximal faces of its lower image:
/// every lower-image vertex must see a facet of the upper image through the
/// zero set of the coupling, every upper-image vertex a K-maximal facet of
/// the lower image, and (for q >= 2) every extreme direction of the upper
/// image a vertical lower-image facet through the shifted coupling.
///
/// `p_vrep` and `dstar_points` must be minimal; the lower image's recession
/// direction (the negative last unit vector) is implied and never listed.
pub fn verify_incidence(
    p_vrep: &VRep,
    dstar_points: &[Vec<f64>],
    ctx: &DualityContext,
    tol: f64,
) -> IncidenceReport {
    let q = ctx.dim();
    let mut report = IncidenceReport {
        min_phi: f64::INFINITY,
        ..Default::default()
    };
    if p_vrep.points.is_empty() || dstar_points.is_empty() {
        report.violations.push("empty representation".into());
        report.min_phi = f64::NAN;
        return report;
    }

    let mut down = vec![0.0; q];
    down[q - 1] = -1.0;
    let dstar_vrep = VRep {
        dim: q,
        points: dstar_points.to_vec(),
        rays: vec![down.clone()],
    };

    for (y, ystar) in p_vrep
        .points
        .iter()
        .flat_map(|y| dstar_points.iter().map(move |s| (y, s)))
    {
        report.min_phi = report.min_phi.min(phi(y, ystar, ctx));
    }

    // Dual vertex -> facet of the upper image.
    for ystar in dstar_points {
        let w = weight_from_dual(ystar, ctx);
        let tight: Vec<usize> = p_vrep
            .points
            .iter()
            .enumerate()
            .filter(|(_, y)| phi(y, ystar, ctx).abs() <= tol)
            .map(|(i, _)| i)
            .collect();
        let tight_dirs: Vec<&[f64]> = p_vrep
            .rays
            .iter()
            .filter(|d| dot(&w, d).abs() <= tol)
            .map(|d| d.as_slice())
            .collect();
        let verts: Vec<&Vec<f64>> = tight.iter().map(|&i| &p_vrep.points[i]).collect();
        let dim = affine_dim(&verts, &tight_dirs, q, tol);
        if dim != Some(q - 1) {
            report.violations.push(format!(
                "dual vertex {ystar:?} supports a face of dimension {dim:?}, expected {}",
                q - 1
            ));
        }
        report.from_dual_vertices.push(IncidencePair {
            source: ystar.clone(),
            tight,
            face_dim: dim.unwrap_or(0),
        });
    }

    // Primal vertex -> K-maximal facet of the lower image. The probe step
    // must dominate the membership test's feasibility slack.
    let probe = (tol * 1e3).max(1e-6);
    let inside_tol = probe / 1e3;
    for y in &p_vrep.points {
        let tight: Vec<usize> = dstar_points
            .iter()
            .enumerate()
            .filter(|(_, ystar)| phi(y, ystar, ctx).abs() <= tol)
            .map(|(i, _)| i)
            .collect();
        let verts: Vec<&Vec<f64>> = tight.iter().map(|&i| &dstar_points[i]).collect();
        let dim = affine_dim(&verts, &[], q, tol);
        if dim != Some(q - 1) {
            report.violations.push(format!(
                "primal vertex {y:?} supports a dual face of dimension {dim:?}, expected {}",
                q - 1
            ));
        } else {
            // The face must leave the lower image when pushed up.
            let mut center = vertex_mean(&verts, q);
            center[q - 1] += probe;
            if vrep_contains(&dstar_vrep, &center, inside_tol) {
                report.violations.push(format!(
                    "face for primal vertex {y:?} is not K-maximal"
                ));
            }
        }
        report.from_primal_vertices.push(IncidencePair {
            source: y.clone(),
            tight,
            face_dim: dim.unwrap_or(0),
        });
    }

    // Primal direction -> vertical facet (dimension q-1 including the
    // downward recession). Undefined for q = 1.
    if q >= 2 {
        for d in &p_vrep.rays {
            let tight: Vec<usize> = dstar_points
                .iter()
                .enumerate()
                .filter(|(_, ystar)| phi_hat(d, ystar, ctx).abs() <= tol)
                .map(|(i, _)| i)
                .collect();
            let verts: Vec<&Vec<f64>> = tight.iter().map(|&i| &dstar_points[i]).collect();
            let dim = affine_dim(&verts, &[&down], q, tol);
            if dim != Some(q - 1) {
                report.violations.push(format!(
                    "primal direction {d:?} supports a dual face of dimension {dim:?}, expected {}",
                    q - 1
                ));
            } else {
                // Step into the relative interior of the vertical face
                // (below every vertex ridge) before probing upward.
                let mut center = vertex_mean(&verts, q);
                center[q - 1] += probe - 1.0;
                if !vrep_contains(&dstar_vrep, &center, inside_tol) {
                    report.violations.push(format!(
                        "face for primal direction {d:?} is not vertical"
                    ));
                }
            }
            report.from_primal_directions.push(IncidencePair {
                source: d.clone(),
                tight,
                face_dim: dim.unwrap_or(0),
            });
        }
    }

    // Facet counts must match the partner's vertex/direction counts for the
    // correspondence to be a bijection.
    if let Ok(h) = v_to_h(p_vrep, tol) {
        if h.rows.len() != dstar_points.len() {
            report.violations.push(format!(
                "upper image has {} facets but the lower image {} vertices",
                h.rows.len(),
                dstar_points.len()
            ));
        }
    }
    if q >= 2 {
        if let Ok(h) = v_to_h(&dstar_vrep, tol) {
            let vertical = h.rows.iter().filter(|(a, _)| a[q - 1].abs() <= tol).count();
            let maximal = h.rows.len() - vertical;
            if maximal != p_vrep.points.len() {
                report.violations.push(format!(
                    "lower image has {maximal} K-maximal facets but the upper image {} vertices",
                    p_vrep.points.len()
                ));
            }
            if vertical != p_vrep.rays.len() {
                report.violations.push(format!(
                    "lower image has {vertical} vertical facets but the upper image {} directions",
                    p_vrep.rays.len()
                ));
            }
        }
    }

    report
}
