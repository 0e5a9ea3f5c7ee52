//! Dense linear algebra: row-major matrices, in-place LU, a condition estimate and
//! restarted GMRES.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::lu::partial_pivoting::{factor, solve};
use faer::perm::PermRef;
use faer::{MatMut, MatRef, Par};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular to working precision: pivot {index} is {pivot:e} (max |a| = {scale:e})")]
    Singular { index: usize, pivot: f64, scale: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("GMRES stalled after {iterations} iterations at relative residual {residual:e} (target {tol:e})")]
    NotConverged { iterations: usize, residual: f64, tol: f64 },
    #[error("singular value decomposition failed to converge")]
    Svd,
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.rows];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        if self.cols == 0 {
            y.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        y.par_iter_mut()
            .zip(self.data.par_chunks(self.cols))
            .for_each(|(yi, row)| *yi = dot(row, x));
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for row in self.data.chunks(self.cols.max(1)) {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.cols.max(1))
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |self − other| / max(max |other|, tiny)`.
    pub fn max_relative_difference(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let scale = other.max_abs().max(f64::MIN_POSITIVE);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / scale
    }

    /// `max |self − other|`.
    pub fn max_abs_difference(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Row-major data viewed as the column-major transpose.
    fn transposed_view(&self) -> MatRef<'_, f64> {
        MatRef::from_column_major_slice(&self.data, self.cols, self.rows)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn parallelism() -> Par {
    if rayon::current_num_threads() > 1 {
        Par::rayon(rayon::current_num_threads())
    } else {
        Par::Seq
    }
}

/// LU factors with partial pivoting, computed in place on the matrix storage.
///
/// The row-major buffer of `A` is factored as the column-major matrix `Aᵀ`, so
/// `A x = b` is a transposed solve against those factors.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    fwd: Vec<usize>,
    bwd: Vec<usize>,
    norm_1: f64,
    min_pivot: f64,
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `‖A‖₁` of the matrix that was factored.
    pub fn norm_1(&self) -> f64 {
        self.norm_1
    }

    /// Smallest `|uᵢᵢ|`.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    fn view(&self) -> MatRef<'_, f64> {
        MatRef::from_column_major_slice(&self.lu, self.n, self.n)
    }

    fn perm(&self) -> PermRef<'_, usize> {
        PermRef::new_checked(&self.fwd, &self.bwd, self.n)
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<(), LinalgError> {
        self.check(b)?;
        let rhs = MatMut::from_column_major_slice_mut(b, self.n, 1);
        let par = Par::Seq;
        let mut mem = MemBuffer::new(solve::solve_transpose_in_place_scratch::<usize, f64>(self.n, 1, par));
        let lu = self.view();
        solve::solve_transpose_in_place(lu, lu, self.perm(), rhs, par, MemStack::new(&mut mem));
        Ok(())
    }

    /// Solves `Aᵀ x = b` in place.
    pub fn solve_transpose_in_place(&self, b: &mut [f64]) -> Result<(), LinalgError> {
        self.check(b)?;
        let rhs = MatMut::from_column_major_slice_mut(b, self.n, 1);
        let par = Par::Seq;
        let mut mem = MemBuffer::new(solve::solve_in_place_scratch::<usize, f64>(self.n, 1, par));
        let lu = self.view();
        solve::solve_in_place(lu, lu, self.perm(), rhs, par, MemStack::new(&mut mem));
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    fn check(&self, b: &[f64]) -> Result<(), LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                got: b.len(),
            });
        }
        Ok(())
    }

    /// Hager–Higham estimate of `‖A⁻¹‖₁`.
    pub fn inverse_norm_1_estimate(&self) -> Result<f64, LinalgError> {
        let n = self.n;
        if n == 0 {
            return Ok(0.0);
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut estimate = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x)?;
            estimate = y.iter().map(|v| v.abs()).sum::<f64>();
            let mut z: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            self.solve_transpose_in_place(&mut z)?;
            let (j, zmax) = z
                .iter()
                .enumerate()
                .fold((0, 0.0), |(bj, bm), (j, v)| if v.abs() > bm { (j, v.abs()) } else { (bj, bm) });
            if zmax <= dot(&z, &x) || j == last_j {
                break;
            }
            x.iter_mut().for_each(|v| *v = 0.0);
            x[j] = 1.0;
            last_j = j;
        }
        Ok(estimate)
    }

    /// Estimate of the 1-norm condition number `‖A‖₁‖A⁻¹‖₁`.
    pub fn condition_estimate(&self) -> Result<f64, LinalgError> {
        Ok(self.norm_1 * self.inverse_norm_1_estimate()?)
    }
}

/// Relative pivot size below which the matrix is reported singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-14;

/// Factors `a` in place, taking ownership of its storage.
pub fn lu_factor(a: DenseMatrix) -> Result<LuFactors, LinalgError> {
    if a.rows != a.cols {
        return Err(LinalgError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.rows;
    let norm_1 = a.norm_1();
    let scale = a.max_abs();
    let mut lu = a.into_vec();
    let mut fwd = vec![0usize; n];
    let mut bwd = vec![0usize; n];
    let par = parallelism();
    {
        let view = MatMut::from_column_major_slice_mut(&mut lu, n, n);
        let mut mem = MemBuffer::new(factor::lu_in_place_scratch::<usize, f64>(n, n, par, Default::default()));
        factor::lu_in_place(view, &mut fwd, &mut bwd, par, MemStack::new(&mut mem), Default::default());
    }
    let mut min_pivot = f64::INFINITY;
    for i in 0..n {
        let u = lu[i * n + i].abs();
        if !u.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        if u <= SINGULAR_PIVOT_RTOL * scale * n as f64 {
            return Err(LinalgError::Singular { index: i, pivot: u, scale });
        }
        min_pivot = min_pivot.min(u);
    }
    Ok(LuFactors {
        n,
        lu,
        fwd,
        bwd,
        norm_1,
        min_pivot,
    })
}

/// Singular values of `a` in nonincreasing order.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>, LinalgError> {
    a.transposed_view().singular_values().map_err(|_| LinalgError::Svd)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    pub tol: f64,
    pub restart: usize,
    pub max_iterations: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            restart: 200,
            max_iterations: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖b − A x‖ / ‖b‖`, recomputed from the returned `x`.
    pub relative_residual: f64,
}

/// Restarted GMRES with Givens rotations, no preconditioner.
pub fn gmres(
    a: &DenseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    opts: &GmresOptions,
) -> Result<GmresOutcome, LinalgError> {
    let n = a.rows;
    if a.cols != n {
        return Err(LinalgError::NotSquare { rows: a.rows, cols: a.cols });
    }
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut x = match x0 {
        Some(x0) if x0.len() == n => x0.to_vec(),
        Some(x0) => return Err(LinalgError::DimensionMismatch { expected: n, got: x0.len() }),
        None => vec![0.0; n],
    };
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(GmresOutcome {
            x: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let m = opts.restart.max(1).min(n.max(1));
    let residual = |x: &[f64]| -> Vec<f64> {
        let mut ax = vec![0.0; n];
        a.matvec_into(x, &mut ax);
        b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
    };
    let mut iterations = 0;
    loop {
        let r = residual(&x);
        let beta = norm2(&r);
        if beta / bnorm <= opts.tol {
            return Ok(GmresOutcome {
                x,
                iterations,
                relative_residual: beta / bnorm,
            });
        }
        if iterations >= opts.max_iterations {
            return Err(LinalgError::NotConverged {
                iterations,
                residual: beta / bnorm,
                tol: opts.tol,
            });
        }
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            let mut w = vec![0.0; n];
            a.matvec_into(&basis[k], &mut w);
            // modified Gram–Schmidt, applied twice for stability
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let hij = dot(&w, q);
                    h[i][k] += hij;
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= hij * qi);
                }
            }
            let wn = norm2(&w);
            h[k + 1][k] = wn;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / denom;
                sn[k] = h[k + 1][k] / denom;
            }
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            iterations += 1;
            k_used = k + 1;
            let breakdown = wn <= 1e-300;
            if !breakdown {
                basis.push(w.iter().map(|v| v / wn).collect());
            }
            if g[k + 1].abs() / bnorm <= 0.5 * opts.tol || breakdown || iterations >= opts.max_iterations {
                break;
            }
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s: f64 = (i + 1..k_used).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            x.iter_mut().zip(&basis[j]).for_each(|(xi, qi)| *xi += yj * qi);
        }
    }
}
