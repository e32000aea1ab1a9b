//! Sparse linear-system kernel: a direct LU path with partial pivoting for
//! exact solves and a Gauss-Seidel path for fast low-accuracy solves.
//!
//! Both policy evaluation by linear equations and the first-passage-time
//! systems produce sparse matrices whose rows mirror transition rows, so the
//! factorization works column-by-column on the sparse structure and never
//! materializes a dense matrix.

use thiserror::Error;

/// Pivots with magnitude below this are treated as singular.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Errors from matrix construction and the two solve paths.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinError {
    #[error("matrix is {n_rows}x{n_cols}, expected square")]
    NotSquare { n_rows: usize, n_cols: usize },
    #[error("dimension mismatch: matrix has {expected} rows, vector has {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("entry ({row}, {col}) out of bounds")]
    IndexOutOfBounds { row: usize, col: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("non-finite value at ({row}, {col})")]
    NonFiniteValue { row: usize, col: usize },
    #[error("matrix is singular (pivot below {PIVOT_TOLERANCE} at elimination step {step})")]
    SingularMatrix { step: usize },
    #[error("zero diagonal at row {row}")]
    ZeroDiagonal { row: usize },
    #[error("no convergence after {sweeps} sweeps (residual {residual})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("tolerance {0} must be positive")]
    NonPositiveTolerance(f64),
}

/// Row-compressed sparse matrix; entries are sorted by row then column,
/// deduplicated, and nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from (row, col, value) triplets in any order. Zero values are
    /// dropped; duplicates and out-of-bounds indices are rejected.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, LinError> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(LinError::IndexOutOfBounds { row: r, col: c });
            }
            if !v.is_finite() {
                return Err(LinError::NonFiniteValue { row: r, col: c });
            }
            if v != 0.0 {
                entries.push((r, c, v));
            }
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(LinError::DuplicateEntry {
                    row: pair[0].0,
                    col: pair[0].1,
                });
            }
        }
        let mut row_ptr = vec![0usize; n_rows + 1];
        for &(r, _, _) in &entries {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = entries.iter().map(|e| e.1).collect();
        let values = entries.iter().map(|e| e.2).collect();
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        let triplets: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, 1.0)).collect();
        SparseMatrix::from_triplets(n, n, &triplets).unwrap()
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of one row.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// Matrix-vector product, used mostly for residual checks.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols, "vector length mismatch");
        (0..self.n_rows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }

    /// Max-norm of `Ax - b`.
    pub fn residual_norm(&self, x: &[f64], b: &[f64]) -> f64 {
        self.mul_vec(x)
            .iter()
            .zip(b)
            .map(|(ax, bi)| (ax - bi).abs())
            .fold(0.0, f64::max)
    }

    // Column-compressed copy (col_ptr, row_idx, values) for the LU pass.
    fn to_csc(&self) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let mut col_ptr = vec![0usize; self.n_cols + 1];
        for &c in &self.col_idx {
            col_ptr[c + 1] += 1;
        }
        for i in 0..self.n_cols {
            col_ptr[i + 1] += col_ptr[i];
        }
        let mut next = col_ptr.clone();
        let mut row_idx = vec![0usize; self.values.len()];
        let mut values = vec![0.0; self.values.len()];
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let slot = next[c];
                row_idx[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        (col_ptr, row_idx, values)
    }
}

fn check_system(a: &SparseMatrix, b: &[f64]) -> Result<(), LinError> {
    if a.n_rows != a.n_cols {
        return Err(LinError::NotSquare {
            n_rows: a.n_rows,
            n_cols: a.n_cols,
        });
    }
    if a.n_rows != b.len() {
        return Err(LinError::DimensionMismatch {
            expected: a.n_rows,
            actual: b.len(),
        });
    }
    if let Some(i) = b.iter().position(|v| !v.is_finite()) {
        return Err(LinError::NonFiniteValue { row: i, col: 0 });
    }
    Ok(())
}

// Left-looking sparse LU with partial pivoting. Columns of L hold the
// multipliers in original row indices; columns of U are indexed by pivot
// step. prow[k] is the original row chosen as pivot k.
struct LuFactors {
    n: usize,
    lower: Vec<Vec<(usize, f64)>>,
    upper: Vec<Vec<(usize, f64)>>,
    upper_diag: Vec<f64>,
    prow: Vec<usize>,
}

impl LuFactors {
    fn factor(a: &SparseMatrix) -> Result<Self, LinError> {
        let n = a.n_rows;
        let (col_ptr, row_idx, csc_values) = a.to_csc();
        let mut lower: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut upper: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut upper_diag = vec![0.0; n];
        let mut pinv = vec![usize::MAX; n]; // original row -> pivot step
        let mut prow = vec![0usize; n];

        let mut work = vec![0.0; n];
        let mut touched = vec![false; n];
        let mut touch_list: Vec<usize> = Vec::with_capacity(64);

        for k in 0..n {
            // Scatter A(:, k) into the dense work vector.
            for idx in col_ptr[k]..col_ptr[k + 1] {
                let r = row_idx[idx];
                work[r] = csc_values[idx];
                if !touched[r] {
                    touched[r] = true;
                    touch_list.push(r);
                }
            }
            // Eliminate with the columns already pivoted. Scanning j in pivot
            // order is a valid topological order because column j only updates
            // rows pivoted after j.
            for j in 0..k {
                let xr = work[prow[j]];
                if xr == 0.0 {
                    continue;
                }
                for &(r, lv) in &lower[j] {
                    if !touched[r] {
                        touched[r] = true;
                        touch_list.push(r);
                        work[r] = -xr * lv;
                    } else {
                        work[r] -= xr * lv;
                    }
                }
            }
            // Partial pivoting over the not-yet-pivoted touched rows.
            let mut pivot_row = usize::MAX;
            let mut pivot_mag = 0.0;
            for &r in &touch_list {
                if pinv[r] == usize::MAX {
                    let mag = work[r].abs();
                    if mag > pivot_mag {
                        pivot_mag = mag;
                        pivot_row = r;
                    }
                }
            }
            if pivot_mag < PIVOT_TOLERANCE {
                return Err(LinError::SingularMatrix { step: k });
            }
            let pivot = work[pivot_row];
            pinv[pivot_row] = k;
            prow[k] = pivot_row;
            upper_diag[k] = pivot;

            let mut ucol: Vec<(usize, f64)> = Vec::new();
            let mut lcol: Vec<(usize, f64)> = Vec::new();
            for &r in &touch_list {
                let v = work[r];
                work[r] = 0.0;
                touched[r] = false;
                if v == 0.0 || r == pivot_row {
                    continue;
                }
                if pinv[r] != usize::MAX {
                    ucol.push((pinv[r], v));
                } else {
                    lcol.push((r, v / pivot));
                }
            }
            touch_list.clear();
            ucol.sort_unstable_by_key(|e| e.0);
            upper.push(ucol);
            lower.push(lcol);
        }

        Ok(LuFactors {
            n,
            lower,
            upper,
            upper_diag,
            prow,
        })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        // Forward substitution through L (unit diagonal, permuted rows).
        let mut work = b.to_vec();
        let mut y = vec![0.0; self.n];
        for k in 0..self.n {
            let yk = work[self.prow[k]];
            y[k] = yk;
            if yk != 0.0 {
                for &(r, lv) in &self.lower[k] {
                    work[r] -= yk * lv;
                }
            }
        }
        // Back substitution through U; column k of U corresponds to the
        // original column k, so y becomes the solution in natural order.
        for k in (0..self.n).rev() {
            y[k] /= self.upper_diag[k];
            let yk = y[k];
            if yk != 0.0 {
                for &(j, uv) in &self.upper[k] {
                    y[j] -= uv * yk;
                }
            }
        }
        y
    }
}

/// Direct solve of `Ax = b` by sparse LU with partial pivoting.
///
/// The returned solution satisfies `‖Ax − b‖∞ ≤ 1e-6·(1 + ‖b‖∞)` and is
/// deterministic for a fixed input.
pub fn solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>, LinError> {
    check_system(a, b)?;
    let lu = LuFactors::factor(a)?;
    Ok(lu.solve(b))
}

/// Default sweep cap for [`solve_iterative`] callers that do not manage one.
pub const DEFAULT_MAX_SWEEPS: usize = 10_000;

/// Gauss-Seidel sweeps until the residual max-norm drops below `tol`.
///
/// This is the fast low-accuracy path: reachability orderings tolerate crude
/// solutions, so callers pick `tol` freely.
pub fn solve_iterative(
    a: &SparseMatrix,
    b: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> Result<Vec<f64>, LinError> {
    check_system(a, b)?;
    if !tol.is_finite() || tol <= 0.0 {
        return Err(LinError::NonPositiveTolerance(tol));
    }
    let n = a.n_rows;
    let mut diag = vec![0.0; n];
    for (r, d) in diag.iter_mut().enumerate() {
        let (cols, vals) = a.row(r);
        match cols.iter().position(|&c| c == r) {
            Some(i) if vals[i].abs() >= PIVOT_TOLERANCE => *d = vals[i],
            _ => return Err(LinError::ZeroDiagonal { row: r }),
        }
    }
    let mut x = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_sweeps {
        for r in 0..n {
            let (cols, vals) = a.row(r);
            let mut acc = b[r];
            for (&c, &v) in cols.iter().zip(vals) {
                if c != r {
                    acc -= v * x[c];
                }
            }
            x[r] = acc / diag[r];
        }
        residual = a.residual_norm(&x, b);
        if residual <= tol {
            return Ok(x);
        }
    }
    Err(LinError::NoConvergence {
        sweeps: max_sweeps,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let a = SparseMatrix::identity(2);
        let x = solve(&a, &[3.0, -1.0]).unwrap();
        assert_eq!(x, vec![3.0, -1.0]);
    }

    #[test]
    fn diagonal_solve() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (1, 1, 4.0)]).unwrap();
        let x = solve(&a, &[2.0, 8.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn rank_deficient_is_singular() {
        let a =
            SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)])
                .unwrap();
        assert!(matches!(
            solve(&a, &[1.0, 2.0]),
            Err(LinError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn requires_square_and_matching_lengths() {
        let a = SparseMatrix::from_triplets(2, 3, &[(0, 0, 1.0)]).unwrap();
        assert!(matches!(
            solve(&a, &[1.0, 1.0]),
            Err(LinError::NotSquare { .. })
        ));
        let b = SparseMatrix::identity(2);
        assert!(matches!(
            solve(&b, &[1.0]),
            Err(LinError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pivoting_handles_zero_leading_diagonal() {
        // [[0, 1], [1, 0]] needs a row swap; Gauss-Seidel rejects it instead.
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let x = solve(&a, &[5.0, 7.0]).unwrap();
        assert_eq!(x, vec![7.0, 5.0]);
        assert!(matches!(
            solve_iterative(&a, &[5.0, 7.0], 1e-9, 100),
            Err(LinError::ZeroDiagonal { .. })
        ));
    }

    #[test]
    fn solve_meets_residual_bound() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            &[
                (0, 0, 4.0),
                (0, 2, -1.0),
                (1, 0, 1.0),
                (1, 1, -3.0),
                (2, 1, 2.0),
                (2, 2, 5.0),
            ],
        )
        .unwrap();
        let b = [1.0, -2.0, 3.5];
        let x = solve(&a, &b).unwrap();
        let bound = 1e-6 * (1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        assert!(a.residual_norm(&x, &b) <= bound);
    }

    #[test]
    fn gauss_seidel_matches_direct_on_dominant_system() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)],
        )
        .unwrap();
        let b = [1.0, 2.0];
        let tol = 1e-8;
        let x = solve_iterative(&a, &b, tol, 1000).unwrap();
        assert!(a.residual_norm(&x, &b) <= tol);
        let exact = solve(&a, &b).unwrap();
        for (xi, ei) in x.iter().zip(&exact) {
            assert!((xi - ei).abs() < 1e-7);
        }
    }

    #[test]
    fn gauss_seidel_identity_single_sweep() {
        let a = SparseMatrix::identity(3);
        let b = [1.0, -4.0, 0.25];
        let x = solve_iterative(&a, &b, 1e-12, 1).unwrap();
        assert_eq!(x, b.to_vec());
    }

    #[test]
    fn gauss_seidel_reports_no_convergence() {
        // Not diagonally dominant; a single sweep cannot reach 1e-12.
        let a = SparseMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)],
        )
        .unwrap();
        assert!(matches!(
            solve_iterative(&a, &[1.0, 1.0], 1e-12, 1),
            Err(LinError::NoConvergence { .. })
        ));
    }

    #[test]
    fn from_triplets_rejects_bad_input() {
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]),
            Err(LinError::IndexOutOfBounds { .. })
        ));
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0)]),
            Err(LinError::DuplicateEntry { .. })
        ));
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, &[(0, 0, f64::NAN)]),
            Err(LinError::NonFiniteValue { .. })
        ));
        // Explicit zeros are dropped rather than stored.
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 0.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
    }
}
