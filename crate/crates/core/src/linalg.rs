//! Small dense linear algebra for the regression kernels.
//!
//! Systems here stay tiny (at most a few dozen unknowns), so everything is
//! row-major `Vec<f64>` with a Cholesky factorization for symmetric
//! positive-definite solves. Rank deficiency is reported as
//! [`Error::SingularMatrix`] via a relative pivot check.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Regression design matrix: a leading intercept column of ones followed by
/// `k` predictor columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl DesignMatrix {
    /// Build from predictor rows (without intercept); a column of ones is
    /// prepended. Requires at least as many rows as columns.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, |r| r.len());
        if n < k + 1 {
            return Err(Error::TooFewSamples { needed: k + 1, got: n });
        }
        let cols = k + 1;
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: row.len() });
            }
            data.push(1.0);
            data.extend_from_slice(row);
        }
        Ok(DesignMatrix { data, rows: n, cols })
    }

    /// Intercept-only design: a single column of ones.
    pub fn intercept_only(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        Ok(DesignMatrix { data: vec![1.0; n], rows: n, cols: 1 })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    /// Number of predictors `k` (columns excluding the intercept).
    pub fn n_predictors(&self) -> usize {
        self.cols - 1
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    /// One full row, intercept included.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// XᵀX, as a dense `cols × cols` row-major matrix.
    pub(crate) fn xtx(&self) -> Vec<f64> {
        let p = self.cols;
        let mut out = vec![0.0; p * p];
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..p {
                for b in a..p {
                    out[a * p + b] += row[a] * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                out[a * p + b] = out[b * p + a];
            }
        }
        out
    }

    /// Xᵀy.
    pub(crate) fn xty(&self, y: &[f64]) -> Vec<f64> {
        let p = self.cols;
        let mut out = vec![0.0; p];
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..p {
                out[a] += row[a] * y[i];
            }
        }
        out
    }

    /// Fitted value for one stored row under coefficients `beta`.
    pub(crate) fn fitted(&self, i: usize, beta: &[f64]) -> f64 {
        self.row(i).iter().zip(beta).map(|(x, b)| x * b).sum()
    }
}

/// Solve a dense square system A x = b by Gaussian elimination with
/// partial pivoting. Returns `None` when A is singular at working
/// precision. `a` is row-major and both buffers are consumed.
pub(crate) fn solve_square(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let scale = a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let tol = scale.max(1e-300) * 1e-13;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col].abs() <= tol {
            return None;
        }
        if pivot != col {
            for c in 0..n {
                a.swap(col * n + c, pivot * n + c);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / a[col * n + col];
            if factor != 0.0 {
                for c in col..n {
                    a[row * n + c] -= factor * a[col * n + c];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for c in row + 1..n {
            s -= a[row * n + c] * x[c];
        }
        x[row] = s / a[row * n + row];
    }
    Some(x)
}

/// Cholesky factor L of a symmetric positive-definite matrix A = LLᵀ.
#[derive(Debug)]
pub(crate) struct Cholesky {
    l: Vec<f64>,
    n: usize,
}

impl Cholesky {
    /// Factor a dense symmetric matrix. Fails with [`Error::SingularMatrix`]
    /// when a pivot falls below `1e-12` of the largest diagonal entry.
    pub(crate) fn factor(a: &[f64], n: usize) -> Result<Self> {
        debug_assert_eq!(a.len(), n * n);
        let max_diag = (0..n).map(|i| a[i * n + i]).fold(0.0_f64, f64::max);
        let tol = if max_diag > 0.0 { max_diag * 1e-12 } else { 0.0 };
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= tol {
                        return Err(Error::SingularMatrix);
                    }
                    l[i * n + i] = math::sqrt(s);
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { l, n })
    }

    /// Solve L z = b (forward substitution).
    pub(crate) fn forward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * z[k];
            }
            z[i] = s / self.l[i * n + i];
        }
        z
    }

    /// Solve A x = b via the two triangular solves.
    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = self.forward(b);
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn design_matrix_prepends_intercept() {
        let x = DesignMatrix::from_rows(&[vec![2.0, 3.0], vec![4.0, 5.0], vec![6.0, 7.0]]).unwrap();
        assert_eq!(x.n_rows(), 3);
        assert_eq!(x.n_predictors(), 2);
        assert_eq!(x.row(1), &[1.0, 4.0, 5.0]);
    }

    #[test]
    fn design_matrix_rejects_too_few_rows() {
        let err = DesignMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap_err();
        assert_eq!(err, Error::TooFewSamples { needed: 3, got: 1 });
    }

    #[test]
    fn design_matrix_rejects_ragged_rows() {
        let err = DesignMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn cholesky_solves_spd_system() {
        // A = [[4,2],[2,3]], b = [10, 9] → x = [1.5, 2]
        let a = [4.0, 2.0, 2.0, 3.0];
        let ch = Cholesky::factor(&a, 2).unwrap();
        let x = ch.solve(&[10.0, 9.0]);
        assert!((x[0] - 1.5).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_singular() {
        // Second column is twice the first.
        let a = [1.0, 2.0, 2.0, 4.0];
        assert_eq!(Cholesky::factor(&a, 2).unwrap_err(), Error::SingularMatrix);
    }

    #[test]
    fn square_solver_handles_pivoting_and_singularity() {
        // requires a row swap: first pivot is zero
        let mut a = [0.0, 1.0, 2.0, 0.0];
        let mut b = [3.0, 4.0];
        let x = solve_square(&mut a, &mut b, 2).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);

        let mut singular = [1.0, 2.0, 2.0, 4.0];
        let mut rhs = [1.0, 2.0];
        assert!(solve_square(&mut singular, &mut rhs, 2).is_none());
    }
}
