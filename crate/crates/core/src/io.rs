//! Line-oriented text formats for problems and results, and OFF export of
//! three-objective geometry.
//!
//! A problem file holds one record per line; `#` starts a comment and blank
//! lines are skipped. Indices are 1-based in files.
//!
//! ```text
//! vlp q m n          header: objectives, constraint rows, variables
//! opt min            optional; minimization is the only direction
//! a i j val          constraint coefficient B[i][j]
//! o k j val          objective coefficient P[k][j]
//! r i lo up          row bounds (default -inf inf); `inf`/`-inf` allowed
//! x j lo up          variable bounds (default -inf inf)
//! k y j v_1..v_q     ordering cone generator column j
//! k z j v_1..v_q     dual cone generator column j
//! c c_1..c_q         interior normalization point, last coordinate 1
//! ```
//!
//! Without cone records the ordering is componentwise with `c` all ones.
//! With only one side given the other is derived; if no `c` is given it
//! defaults to the generator sum scaled to last coordinate 1, negating the
//! cone and objective when that coordinate is negative.

use crate::benson::PrimalDualSolution;
use crate::linalg::{dot, lex_cmp, norm_inf};
use crate::polyhedron::{h_to_v, v_to_h, PolyError, VRep};
use crate::problem::{ConstraintSystem, MolpProblem, OrderingCone, ProblemError, GEOM_TOL};
use crate::two_phase::SolveReport;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Dimension(String),
    #[error("report has no solution to write")]
    MissingSolution,
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(token: &str, line: usize) -> Result<f64, IoError> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("expected a number, got `{token}`")))?;
    if v.is_nan() {
        return Err(parse_err(line, "NaN is not a valid value"));
    }
    Ok(v)
}

fn parse_index(token: &str, limit: usize, what: &str, line: usize) -> Result<usize, IoError> {
    let idx: usize = token
        .parse()
        .map_err(|_| parse_err(line, format!("expected a {what} index, got `{token}`")))?;
    if idx == 0 || idx > limit {
        return Err(parse_err(
            line,
            format!("{what} index {idx} out of range 1..={limit}"),
        ));
    }
    Ok(idx - 1)
}

fn parse_vector(tokens: &[&str], len: usize, line: usize) -> Result<Vec<f64>, IoError> {
    if tokens.len() != len {
        return Err(parse_err(
            line,
            format!("expected {len} components, got {}", tokens.len()),
        ));
    }
    tokens.iter().map(|t| parse_f64(t, line)).collect()
}

/// Collects `k y`/`k z` records, ordered by their column index.
fn sorted_columns(cols: Vec<(usize, Vec<f64>, usize)>) -> Result<Vec<Vec<f64>>, IoError> {
    let mut cols = cols;
    cols.sort_by_key(|(j, _, _)| *j);
    for pair in cols.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(parse_err(
                pair[1].2,
                format!("duplicate cone column {}", pair[1].0 + 1),
            ));
        }
    }
    Ok(cols.into_iter().map(|(_, v, _)| v).collect())
}

fn negated(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    vectors
        .iter()
        .map(|v| v.iter().map(|x| -x).collect())
        .collect()
}

/// Default normalization point: generator sum scaled to last coordinate 1.
fn default_c(generators: &[Vec<f64>], q: usize) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; q];
    for g in generators {
        for (s, v) in sum.iter_mut().zip(g) {
            *s += v;
        }
    }
    if sum[q - 1] <= GEOM_TOL {
        return None;
    }
    let last = sum[q - 1];
    Some(sum.iter().map(|v| v / last).collect())
}

/// Builds the ordering cone from whichever sides the file provided. The
/// second return value reports whether the problem was negated to obtain a
/// valid normalization point.
fn build_cone(
    y: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
    c: Option<Vec<f64>>,
    q: usize,
) -> Result<(OrderingCone, bool), ProblemError> {
    if !y.is_empty() {
        crate::problem::check_generator_structure(&y, q, GEOM_TOL)?;
    }
    if !z.is_empty() {
        crate::problem::check_generator_structure(&z, q, GEOM_TOL)?;
    }
    let attempt = |y: Vec<Vec<f64>>, z: Vec<Vec<f64>>, c: Option<Vec<f64>>| {
        match (y.is_empty(), z.is_empty()) {
            (true, true) => {
                let mut cone = OrderingCone::nonnegative(q);
                if let Some(c) = c {
                    cone.c = c;
                }
                cone.validate(GEOM_TOL)?;
                Ok(cone)
            }
            (false, true) => OrderingCone::from_generators(y, c, GEOM_TOL),
            (true, false) => OrderingCone::from_dual_generators(z, c, GEOM_TOL),
            (false, false) => {
                let c = match c {
                    Some(c) => c,
                    None => default_c(&y, q).ok_or_else(|| {
                        ProblemError::InvalidC(
                            "generator sum has non-positive last coordinate".into(),
                        )
                    })?,
                };
                let cone = OrderingCone {
                    dim: q,
                    generators: y,
                    dual_generators: z,
                    c,
                };
                cone.validate(GEOM_TOL)?;
                Ok(cone)
            }
        }
    };
    let explicit_c = c.is_some();
    match attempt(y.clone(), z.clone(), c) {
        Ok(cone) => Ok((cone, false)),
        Err(ProblemError::InvalidC(_)) if !explicit_c && !(y.is_empty() && z.is_empty()) => {
            let cone = attempt(negated(&y), negated(&z), None)?;
            Ok((cone, true))
        }
        Err(e) => Err(e),
    }
}

pub fn parse_problem(text: &str) -> Result<MolpProblem, IoError> {
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut objective_entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut row_bounds: Vec<(usize, f64, f64)> = Vec::new();
    let mut var_bounds: Vec<(usize, f64, f64)> = Vec::new();
    let mut y_cols: Vec<(usize, Vec<f64>, usize)> = Vec::new();
    let mut z_cols: Vec<(usize, Vec<f64>, usize)> = Vec::new();
    let mut c: Option<Vec<f64>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if header.is_none() {
            if tokens[0] != "vlp" || tokens.len() != 4 {
                return Err(parse_err(line, "expected header `vlp q m n`"));
            }
            let q: usize = tokens[1]
                .parse()
                .map_err(|_| parse_err(line, "bad objective count"))?;
            let m: usize = tokens[2]
                .parse()
                .map_err(|_| parse_err(line, "bad row count"))?;
            let n: usize = tokens[3]
                .parse()
                .map_err(|_| parse_err(line, "bad variable count"))?;
            if q == 0 || n == 0 {
                return Err(parse_err(line, "need at least one objective and variable"));
            }
            header = Some((q, m, n, line));
            continue;
        }
        let (q, m, n, _) = header.unwrap();
        match tokens[0] {
            "a" => {
                if tokens.len() != 4 {
                    return Err(parse_err(line, "expected `a i j val`"));
                }
                let i = parse_index(tokens[1], m, "row", line)?;
                let j = parse_index(tokens[2], n, "variable", line)?;
                entries.push((i, j, parse_f64(tokens[3], line)?));
            }
            "o" => {
                if tokens.len() != 4 {
                    return Err(parse_err(line, "expected `o k j val`"));
                }
                let k = parse_index(tokens[1], q, "objective", line)?;
                let j = parse_index(tokens[2], n, "variable", line)?;
                objective_entries.push((k, j, parse_f64(tokens[3], line)?));
            }
            "r" => {
                if tokens.len() != 4 {
                    return Err(parse_err(line, "expected `r i lo up`"));
                }
                let i = parse_index(tokens[1], m, "row", line)?;
                let lo = parse_f64(tokens[2], line)?;
                let up = parse_f64(tokens[3], line)?;
                row_bounds.push((i, lo, up));
            }
            "x" => {
                if tokens.len() != 4 {
                    return Err(parse_err(line, "expected `x j lo up`"));
                }
                let j = parse_index(tokens[1], n, "variable", line)?;
                let lo = parse_f64(tokens[2], line)?;
                let up = parse_f64(tokens[3], line)?;
                var_bounds.push((j, lo, up));
            }
            "k" => {
                if tokens.len() != q + 3 {
                    return Err(parse_err(line, format!("expected `k y|z j v_1..v_{q}`")));
                }
                let col: usize = tokens[2]
                    .parse()
                    .map_err(|_| parse_err(line, "bad cone column index"))?;
                if col == 0 {
                    return Err(parse_err(line, "cone column indices start at 1"));
                }
                let v = parse_vector(&tokens[3..], q, line)?;
                match tokens[1] {
                    "y" => y_cols.push((col - 1, v, line)),
                    "z" => z_cols.push((col - 1, v, line)),
                    other => {
                        return Err(parse_err(line, format!("unknown cone side `{other}`")))
                    }
                }
            }
            "c" => {
                if c.is_some() {
                    return Err(parse_err(line, "duplicate `c` record"));
                }
                c = Some(parse_vector(&tokens[1..], q, line)?);
            }
            "opt" => {
                if tokens.len() != 2 || tokens[1] != "min" {
                    return Err(parse_err(line, "only `opt min` is supported"));
                }
            }
            other => return Err(parse_err(line, format!("unknown record `{other}`"))),
        }
    }

    let (q, m, n, header_line) =
        header.ok_or_else(|| parse_err(text.lines().count().max(1), "missing `vlp` header"))?;
    if objective_entries.is_empty() {
        return Err(parse_err(header_line, "no objective coefficients given"));
    }

    let mut cs = ConstraintSystem::free(m, n);
    cs.entries = entries;
    for (i, lo, up) in row_bounds {
        cs.row_lower[i] = lo;
        cs.row_upper[i] = up;
    }
    for (j, lo, up) in var_bounds {
        cs.var_lower[j] = lo;
        cs.var_upper[j] = up;
    }

    let y = sorted_columns(y_cols)?;
    let z = sorted_columns(z_cols)?;
    let (cone, negate) = build_cone(y, z, c, q)?;
    if negate {
        for entry in &mut objective_entries {
            entry.2 = -entry.2;
        }
    }

    let prob = MolpProblem {
        num_objectives: q,
        constraints: cs,
        objective_entries,
        cone,
    };
    prob.validate(GEOM_TOL)?;
    Ok(prob)
}

/// Shortest decimal form that parses back to the identical bits.
fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == 0.0 {
        // Fold away the sign of negative zero.
        "0".into()
    } else {
        format!("{v}")
    }
}

fn fmt_row(tag: &str, values: &[f64]) -> String {
    let mut s = String::from(tag);
    for v in values {
        s.push(' ');
        s.push_str(&fmt_f64(*v));
    }
    s.push('\n');
    s
}

pub fn write_problem(prob: &MolpProblem) -> String {
    let cs = &prob.constraints;
    let q = prob.num_objectives;
    let mut out = String::new();
    let _ = writeln!(out, "vlp {} {} {}", q, cs.num_rows, cs.num_vars);
    out.push_str("opt min\n");
    for &(i, j, v) in &cs.entries {
        let _ = writeln!(out, "a {} {} {}", i + 1, j + 1, fmt_f64(v));
    }
    for &(k, j, v) in &prob.objective_entries {
        let _ = writeln!(out, "o {} {} {}", k + 1, j + 1, fmt_f64(v));
    }
    for i in 0..cs.num_rows {
        let _ = writeln!(
            out,
            "r {} {} {}",
            i + 1,
            fmt_f64(cs.row_lower[i]),
            fmt_f64(cs.row_upper[i])
        );
    }
    for j in 0..cs.num_vars {
        let _ = writeln!(
            out,
            "x {} {} {}",
            j + 1,
            fmt_f64(cs.var_lower[j]),
            fmt_f64(cs.var_upper[j])
        );
    }
    let default = OrderingCone::nonnegative(q);
    let axes_only = prob.cone.generators == default.generators
        && prob.cone.dual_generators == default.dual_generators;
    if !axes_only {
        for (j, g) in prob.cone.generators.iter().enumerate() {
            out.push_str(&fmt_row(&format!("k y {}", j + 1), g));
        }
        for (j, z) in prob.cone.dual_generators.iter().enumerate() {
            out.push_str(&fmt_row(&format!("k z {}", j + 1), z));
        }
    }
    if !axes_only || prob.cone.c != default.c {
        out.push_str(&fmt_row("c", &prob.cone.c));
    }
    out
}

/// Scales each direction to unit max-norm and sorts rows for stable output.
fn normalized_sorted_dirs(dirs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = dirs
        .iter()
        .map(|d| {
            let s = norm_inf(d);
            d.iter().map(|v| v / s).collect()
        })
        .collect();
    out.sort_by(|a, b| lex_cmp(a, b));
    out
}

fn sorted_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = rows.to_vec();
    out.sort_by(|a, b| lex_cmp(a, b));
    out
}

fn vrep_file(points: &[Vec<f64>], dirs: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for p in sorted_rows(points) {
        out.push_str(&fmt_row("v", &p));
    }
    for d in normalized_sorted_dirs(dirs) {
        out.push_str(&fmt_row("d", &d));
    }
    out
}

/// Writes the five result files `<prefix>.{primal_v,dual_v,sbar,tbar,stats}`
/// and returns their paths. Rows are sorted and directions normalized, so
/// repeated runs on the same report produce identical bytes.
pub fn write_report(report: &SolveReport, prefix: &Path) -> Result<Vec<PathBuf>, IoError> {
    let sol: &PrimalDualSolution = report.solution.as_ref().ok_or(IoError::MissingSolution)?;
    let with_ext = |ext: &str| -> PathBuf {
        let mut s = prefix.as_os_str().to_os_string();
        s.push(".");
        s.push(ext);
        PathBuf::from(s)
    };

    let primal_v = vrep_file(&sol.p_vrep.points, &sol.p_vrep.rays);
    // The lower image always recedes straight down, so only points are
    // reported for it.
    let dual_v = vrep_file(&sol.dstar_vrep.points, &[]);
    let sbar = vrep_file(&sol.sbar, &sol.sbar_h);
    let tbar_rows: Vec<Vec<f64>> = sol
        .tbar
        .iter()
        .map(|pair| {
            let mut row = pair.u.clone();
            row.extend_from_slice(&pair.w);
            row
        })
        .collect();
    let tbar = vrep_file(&tbar_rows, &[]);

    let mut stats = String::new();
    let _ = writeln!(stats, "iterations {}", sol.stats.iterations);
    let _ = writeln!(stats, "lps {}", report.stats.lp_count);
    let _ = writeln!(stats, "sbar {}", sol.sbar.len());
    let _ = writeln!(stats, "sbar_h {}", sol.sbar_h.len());
    let _ = writeln!(stats, "tbar {}", sol.tbar.len());
    let _ = writeln!(stats, "primal_points {}", sol.p_vrep.points.len());
    let _ = writeln!(stats, "primal_dirs {}", sol.p_vrep.rays.len());
    let _ = writeln!(stats, "dual_points {}", sol.dstar_vrep.points.len());

    let files = [
        ("primal_v", primal_v),
        ("dual_v", dual_v),
        ("sbar", sbar),
        ("tbar", tbar),
        ("stats", stats),
    ];
    let mut paths = Vec::with_capacity(files.len());
    for (ext, content) in files {
        let path = with_ext(ext);
        std::fs::write(&path, content)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Boundary mesh of a three-dimensional set truncated at a bounding box,
/// in the OFF format. Directions are cut off at the box; vertices already
/// inside the box are preserved.
pub fn export_off(vrep: &VRep, box_lower: &[f64], box_upper: &[f64]) -> Result<String, IoError> {
    if vrep.dim != 3 {
        return Err(IoError::Dimension(format!(
            "OFF export needs 3 objectives, got {}",
            vrep.dim
        )));
    }
    if box_lower.len() != 3 || box_upper.len() != 3 {
        return Err(IoError::Dimension("bounding box must have 3 intervals".into()));
    }
    let tol = GEOM_TOL;
    let mut h = v_to_h(vrep, tol).map_err(poly_to_io)?;
    for axis in 0..3 {
        let mut lo = vec![0.0; 3];
        lo[axis] = 1.0;
        h.push(lo, box_lower[axis]);
        let mut hi = vec![0.0; 3];
        hi[axis] = -1.0;
        h.push(hi, -box_upper[axis]);
    }
    let truncated = h_to_v(&h, tol).map_err(poly_to_io)?;
    let vertices = truncated.points;
    let tight_tol = 1e-7;

    let mut faces: Vec<Vec<usize>> = Vec::new();
    let mut seen: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
    for (a, b) in &h.rows {
        let tight: Vec<usize> = (0..vertices.len())
            .filter(|&i| (dot(a, &vertices[i]) - b).abs() <= tight_tol)
            .collect();
        if tight.len() < 3 {
            continue;
        }
        let mut key = tight.clone();
        key.sort_unstable();
        if !seen.insert(key) {
            continue;
        }
        if let Some(ordered) = order_face(&vertices, &tight, a) {
            faces.push(ordered);
        }
    }

    let mut out = String::from("OFF\n");
    let edges: usize = faces.iter().map(|f| f.len()).sum::<usize>() / 2;
    let _ = writeln!(out, "{} {} {}", vertices.len(), faces.len(), edges);
    for v in &vertices {
        let _ = writeln!(out, "{} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2]));
    }
    for f in &faces {
        out.push_str(&f.len().to_string());
        for i in f {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
    }
    Ok(out)
}

fn poly_to_io(e: PolyError) -> IoError {
    IoError::Dimension(format!("truncated geometry is degenerate: {e}"))
}

fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Orders a facet's vertices counterclockwise as seen from outside the
/// body; the inward normal is the halfspace row normal. Returns None for
/// degenerate (lower-dimensional) tight sets.
fn order_face(vertices: &[Vec<f64>], tight: &[usize], inward: &[f64]) -> Option<Vec<usize>> {
    let outward: Vec<f64> = inward.iter().map(|v| -v).collect();
    let center: Vec<f64> = (0..3)
        .map(|k| tight.iter().map(|&i| vertices[i][k]).sum::<f64>() / tight.len() as f64)
        .collect();
    let seed = (0..3)
        .map(|k| {
            let mut e = vec![0.0; 3];
            e[k] = 1.0;
            e
        })
        .max_by(|a, b| {
            let na = crate::linalg::norm2(&cross(a, &outward));
            let nb = crate::linalg::norm2(&cross(b, &outward));
            na.partial_cmp(&nb).unwrap()
        })?;
    let u = cross(&seed, &outward);
    let v = cross(&outward, &u);
    let mut angled: Vec<(f64, usize)> = tight
        .iter()
        .map(|&i| {
            let d: Vec<f64> = (0..3).map(|k| vertices[i][k] - center[k]).collect();
            (dot(&d, &v).atan2(dot(&d, &u)), i)
        })
        .collect();
    angled.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    // A genuine polygon spreads around its centroid; collinear tight sets
    // collapse to two angle clusters pi apart and carry no area.
    let area = polygon_area(vertices, &angled, &center);
    if area <= GEOM_TOL {
        return None;
    }
    Some(angled.into_iter().map(|(_, i)| i).collect())
}

fn polygon_area(vertices: &[Vec<f64>], angled: &[(f64, usize)], center: &[f64]) -> f64 {
    let mut normal = vec![0.0; 3];
    for w in 0..angled.len() {
        let p = &vertices[angled[w].1];
        let r = &vertices[angled[(w + 1) % angled.len()].1];
        let dp: Vec<f64> = (0..3).map(|k| p[k] - center[k]).collect();
        let dr: Vec<f64> = (0..3).map(|k| r[k] - center[k]).collect();
        let c = cross(&dp, &dr);
        for (nk, ck) in normal.iter_mut().zip(&c) {
            *nk += ck;
        }
    }
    crate::linalg::norm2(&normal) / 2.0
}
