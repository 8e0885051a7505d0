//! Small dense linear algebra helpers shared by the solver internals.

/// Dense LU factorization with partial pivoting of a square matrix.
///
/// The matrix is stored row-major. `solve` and `solve_transposed` reuse the
/// factorization for repeated right-hand sides.
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factorizes `a` (row-major, n x n). Returns `None` if a pivot falls
    /// below `pivot_tol`, i.e. the matrix is numerically singular.
    pub fn factorize(a: &[f64], n: usize, pivot_tol: f64) -> Option<Lu> {
        debug_assert_eq!(a.len(), n * n);
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut best = k;
            let mut best_abs = lu[perm[k] * n + k].abs();
            for r in (k + 1)..n {
                let v = lu[perm[r] * n + k].abs();
                if v > best_abs {
                    best = r;
                    best_abs = v;
                }
            }
            if best_abs <= pivot_tol {
                return None;
            }
            perm.swap(k, best);
            let pk = perm[k];
            let pivot = lu[pk * n + k];
            for r in (k + 1)..n {
                let pr = perm[r];
                let factor = lu[pr * n + k] / pivot;
                lu[pr * n + k] = factor;
                if factor != 0.0 {
                    for c in (k + 1)..n {
                        lu[pr * n + c] -= factor * lu[pk * n + c];
                    }
                }
            }
        }
        Some(Lu { n, lu, perm })
    }

    /// Solves `A x = b`, overwriting nothing; returns x.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lu[self.perm[i] * n + j] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= self.lu[self.perm[i] * n + j] * y[j];
            }
            y[i] = s / self.lu[self.perm[i] * n + i];
        }
        y
    }

    /// Solves `A^T x = b`.
    pub fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        // A^T = (P^T L U)^T = U^T L^T P, so solve U^T z = b, then L^T w = z,
        // then undo the row permutation.
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.lu[self.perm[j] * n + i] * z[j];
            }
            z[i] = s / self.lu[self.perm[i] * n + i];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for j in (i + 1)..n {
                s -= self.lu[self.perm[j] * n + i] * z[j];
            }
            z[i] = s;
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = z[i];
        }
        x
    }
}

/// Rank of a rows x cols matrix (row-major) by Gaussian elimination with
/// partial pivoting and the given tolerance.
pub fn rank(a: &[f64], rows: usize, cols: usize, tol: f64) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mut m = a.to_vec();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let mut best = row;
        let mut best_abs = m[row * cols + col].abs();
        for r in (row + 1)..rows {
            let v = m[r * cols + col].abs();
            if v > best_abs {
                best = r;
                best_abs = v;
            }
        }
        if best_abs <= tol {
            continue;
        }
        if best != row {
            for c in 0..cols {
                m.swap(row * cols + c, best * cols + c);
            }
        }
        let pivot = m[row * cols + col];
        for r in (row + 1)..rows {
            let factor = m[r * cols + col] / pivot;
            if factor != 0.0 {
                for c in col..cols {
                    m[r * cols + c] -= factor * m[row * cols + c];
                }
            }
        }
        rank += 1;
        row += 1;
    }
    rank
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Lexicographic comparison of equal-length float slices.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let a = vec![2.0, 1.0, 1.0, 3.0];
        let lu = Lu::factorize(&a, 2, 1e-12).unwrap();
        let x = lu.solve(&[5.0, 10.0]);
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
        let xt = lu.solve_transposed(&[5.0, 10.0]);
        // A^T = [[2,1],[1,3]]^T = [[2,1],[1,3]] is symmetric here.
        assert!((xt[0] - 1.0).abs() < 1e-12);
        assert!((xt[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lu_transpose_matches_explicit_transpose() {
        let a = vec![1.0, 2.0, 0.0, 3.0, 1.0, 4.0, 0.0, 5.0, 6.0];
        let at = vec![1.0, 3.0, 0.0, 2.0, 1.0, 5.0, 0.0, 4.0, 6.0];
        let b = [1.0, -2.0, 0.5];
        let lu = Lu::factorize(&a, 3, 1e-12).unwrap();
        let lut = Lu::factorize(&at, 3, 1e-12).unwrap();
        let x1 = lu.solve_transposed(&b);
        let x2 = lut.solve(&b);
        for i in 0..3 {
            assert!((x1[i] - x2[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = vec![1.0, 2.0, 2.0, 4.0];
        assert!(Lu::factorize(&a, 2, 1e-12).is_none());
    }

    #[test]
    fn rank_detects_deficiency() {
        let a = vec![1.0, 0.0, 2.0, 0.0, 1.0, 3.0];
        assert_eq!(rank(&a, 2, 3, 1e-9), 2);
        let b = vec![1.0, 2.0, 2.0, 4.0];
        assert_eq!(rank(&b, 2, 2, 1e-9), 1);
        assert_eq!(rank(&[], 0, 3, 1e-9), 0);
    }
}
