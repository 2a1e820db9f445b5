//! Sparse and dense linear-operator layer.
//!
//! The solvers in this crate touch the data matrix through exactly one access
//! pattern: products with the scaled augmented operator
//! `L̂ = [ (√gamma/2)·X | z/2 ]` and its adjoint, from which the implicit
//! Hessian application `H·r = L̂ᵀ(L̂·r)` follows. `X` is stored row-compressed
//! so an `L̂`-apply streams the matrix once; the adjoint apply scatters over
//! the same storage, so no transposed copy is kept. Each product costs
//! `O(N + m)` where `N` is the number of stored entries.
//!
//! All reductions are plain sequential sums; results are deterministic across
//! runs on the same platform. Operators are immutable after construction and
//! can be shared freely across threads.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Dense vector storage used throughout the crate.
pub type DenseVector = Vec<f64>;

/// Dot product. Lengths must agree.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Euclidean norm.
#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

/// `y += alpha * x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `x *= s`.
#[inline]
pub fn scale(x: &mut [f64], s: f64) {
    for xi in x.iter_mut() {
        *xi *= s;
    }
}

/// True when every entry is finite.
#[inline]
pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Row-compressed sparse matrix.
///
/// Invariants enforced at construction:
/// * every index is in range,
/// * no duplicate `(row, col)` pair (duplicates are rejected, not summed),
/// * within a row, stored column indices are strictly increasing,
/// * all stored values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_pointers: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets in any order.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(Error::InvalidArgument("matrix must have nrows, ncols >= 1"));
        }
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(r, c, v) in &entries {
            if r >= nrows || c >= ncols {
                return Err(Error::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows: nrows,
                    cols: ncols,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("sparse matrix value"));
            }
        }
        entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DuplicateEntry {
                    row: w[0].0,
                    col: w[0].1,
                });
            }
        }

        let mut row_pointers = vec![0usize; nrows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for &(r, c, v) in &entries {
            row_pointers[r + 1] += 1;
            col_indices.push(c);
            values.push(v);
        }
        for i in 0..nrows {
            row_pointers[i + 1] += row_pointers[i];
        }
        Ok(Self {
            nrows,
            ncols,
            row_pointers,
            col_indices,
            values,
        })
    }

    /// Builds a matrix from a row-major dense slice, keeping nonzero entries.
    pub fn from_dense(nrows: usize, ncols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::DimensionMismatch {
                what: "dense data",
                expected: nrows * ncols,
                got: data.len(),
            });
        }
        let triplets = data.iter().enumerate().filter_map(|(k, &v)| {
            if v != 0.0 {
                Some((k / ncols, k % ncols, v))
            } else {
                None
            }
        });
        Self::from_triplets(nrows, ncols, triplets)
    }

    /// An all-zero matrix of the given shape.
    pub fn zeros(nrows: usize, ncols: usize) -> Result<Self> {
        Self::from_triplets(nrows, ncols, core::iter::empty())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`, in strictly increasing column order.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_pointers[i];
        let hi = self.row_pointers[i + 1];
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// Visits every stored entry exactly once, row by row. The apply kernels
    /// are built on this, which keeps the one-touch-per-entry cost property
    /// testable from the outside.
    #[inline]
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, f64)) {
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                f(i, j, v);
            }
        }
    }

    /// `y = A·x`.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                what: "matvec input",
                expected: self.ncols,
                got: x.len(),
            });
        }
        if y.len() != self.nrows {
            return Err(Error::DimensionMismatch {
                what: "matvec output",
                expected: self.nrows,
                got: y.len(),
            });
        }
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            y[i] = acc;
        }
        Ok(())
    }

    /// `y = Aᵀ·x`, as a scatter pass over the row-compressed storage.
    pub fn apply_transpose_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.nrows {
            return Err(Error::DimensionMismatch {
                what: "transposed matvec input",
                expected: self.nrows,
                got: x.len(),
            });
        }
        if y.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                what: "transposed matvec output",
                expected: self.ncols,
                got: y.len(),
            });
        }
        y.fill(0.0);
        for i in 0..self.nrows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * xi;
            }
        }
        Ok(())
    }

    /// Row-major dense copy, for the oracle and for tests.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows * self.ncols];
        self.for_each_entry(|i, j, v| out[i * self.ncols + j] = v);
        out
    }
}

/// The operator `L̂ = [ scale·X | column_scale·z ]` of shape `m x (n+1)`,
/// never materialized. For the game reformulation `scale = √gamma/2` and
/// `column_scale = 1/2`.
#[derive(Debug, Clone)]
pub struct ScaledAugmentedOperator {
    base: Arc<SparseMatrix>,
    column: Arc<DenseVector>,
    scale: f64,
    column_scale: f64,
}

impl ScaledAugmentedOperator {
    /// Wraps `X` (m×n) and the label column `z` (length m) with the game
    /// scaling derived from `gamma > 0`.
    pub fn new(base: Arc<SparseMatrix>, column: Arc<DenseVector>, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidArgument("gamma must be finite and > 0"));
        }
        if column.len() != base.nrows() {
            return Err(Error::DimensionMismatch {
                what: "augmented column",
                expected: base.nrows(),
                got: column.len(),
            });
        }
        if !all_finite(&column) {
            return Err(Error::NonFinite("augmented column"));
        }
        Ok(Self {
            base,
            column,
            scale: math::sqrt(gamma) / 2.0,
            column_scale: 0.5,
        })
    }

    /// Output dimension `m`.
    pub fn nrows(&self) -> usize {
        self.base.nrows()
    }

    /// Input dimension `n + 1`.
    pub fn ncols(&self) -> usize {
        self.base.ncols() + 1
    }

    pub fn base(&self) -> &SparseMatrix {
        &self.base
    }

    pub fn column(&self) -> &[f64] {
        &self.column
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn column_scale(&self) -> f64 {
        self.column_scale
    }

    /// `out = L̂·r = scale·X·r[0..n] + column_scale·r[n]·z`.
    pub fn apply_into(&self, r: &[f64], out: &mut [f64]) -> Result<()> {
        if r.len() != self.ncols() {
            return Err(Error::DimensionMismatch {
                what: "augmented apply input",
                expected: self.ncols(),
                got: r.len(),
            });
        }
        let n = self.base.ncols();
        self.base.apply_into(&r[..n], out)?;
        scale(out, self.scale);
        axpy(self.column_scale * r[n], &self.column, out);
        Ok(())
    }

    /// Allocating variant of [`Self::apply_into`].
    pub fn apply(&self, r: &[f64]) -> Result<DenseVector> {
        let mut out = vec![0.0; self.nrows()];
        self.apply_into(r, &mut out)?;
        Ok(out)
    }

    /// `out = L̂ᵀ·u`, so `⟨L̂ r, u⟩ = ⟨r, L̂ᵀ u⟩`.
    pub fn apply_transpose_into(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        if u.len() != self.nrows() {
            return Err(Error::DimensionMismatch {
                what: "augmented adjoint input",
                expected: self.nrows(),
                got: u.len(),
            });
        }
        if out.len() != self.ncols() {
            return Err(Error::DimensionMismatch {
                what: "augmented adjoint output",
                expected: self.ncols(),
                got: out.len(),
            });
        }
        let n = self.base.ncols();
        self.base.apply_transpose_into(u, &mut out[..n])?;
        scale(&mut out[..n], self.scale);
        out[n] = self.column_scale * dot(&self.column, u);
        Ok(())
    }

    /// Allocating variant of [`Self::apply_transpose_into`].
    pub fn apply_transpose(&self, u: &[f64]) -> Result<DenseVector> {
        let mut out = vec![0.0; self.ncols()];
        self.apply_transpose_into(u, &mut out)?;
        Ok(out)
    }

    /// `out = H·r = L̂ᵀ(L̂·r)`, using `work` of length `m` as scratch.
    pub fn hessian_apply_with(&self, r: &[f64], work: &mut [f64], out: &mut [f64]) -> Result<()> {
        self.apply_into(r, work)?;
        self.apply_transpose_into(work, out)
    }

    /// Allocating variant of [`Self::hessian_apply_with`].
    pub fn hessian_apply(&self, r: &[f64]) -> Result<DenseVector> {
        let mut work = vec![0.0; self.nrows()];
        let mut out = vec![0.0; self.ncols()];
        self.hessian_apply_with(r, &mut work, &mut out)?;
        Ok(out)
    }
}

/// Implicit access to a quadratic `q(r) = rᵀH r + 2 gᵀr + p` with `H`
/// symmetric positive semidefinite. This is the only interface the sphere
/// solvers require, which lets the same engines run on the game operator and
/// on small dense matrices used for validation.
pub trait ImplicitQuadratic {
    /// Dimension of `r`.
    fn dim(&self) -> usize;

    /// `out = H·x`. Panics on dimension mismatch: callers are internal and
    /// validated at solve entry.
    fn hessian_apply_into(&self, x: &[f64], out: &mut [f64]);

    /// The linear term `g`.
    fn linear_term(&self) -> &[f64];

    /// The constant term `p`.
    fn constant_term(&self) -> f64;

    /// Evaluates `q(r)`. The default route costs one Hessian application.
    fn objective(&self, r: &[f64]) -> f64 {
        let mut hr = vec![0.0; self.dim()];
        self.hessian_apply_into(r, &mut hr);
        dot(r, &hr) + 2.0 * dot(self.linear_term(), r) + self.constant_term()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_matvec(m: usize, n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; m];
        for i in 0..m {
            for j in 0..n {
                y[i] += a[i * n + j] * x[j];
            }
        }
        y
    }

    fn dense_transpose_matvec(m: usize, n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; n];
        for i in 0..m {
            for j in 0..n {
                y[j] += a[i * n + j] * x[i];
            }
        }
        y
    }

    /// Dense L̂ = [scale·X | 0.5·z], the oracle for the implicit operator.
    fn dense_lhat(op: &ScaledAugmentedOperator) -> (usize, usize, Vec<f64>) {
        let m = op.nrows();
        let d = op.ncols();
        let n = d - 1;
        let x = op.base().to_dense();
        let mut lhat = vec![0.0; m * d];
        for i in 0..m {
            for j in 0..n {
                lhat[i * d + j] = op.scale() * x[i * n + j];
            }
            lhat[i * d + n] = 0.5 * op.column()[i];
        }
        (m, d, lhat)
    }

    fn splitmix(state: &mut u64) -> f64 {
        *state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn random_operator(seed: u64, m: usize, n: usize, gamma: f64) -> ScaledAugmentedOperator {
        let mut s = seed;
        let mut triplets = Vec::new();
        for i in 0..m {
            for j in 0..n {
                let v = splitmix(&mut s);
                if v.abs() > 0.3 {
                    triplets.push((i, j, v));
                }
            }
        }
        let x = SparseMatrix::from_triplets(m, n, triplets).unwrap();
        let z: Vec<f64> = (0..m).map(|_| splitmix(&mut s)).collect();
        ScaledAugmentedOperator::new(Arc::new(x), Arc::new(z), gamma).unwrap()
    }

    #[test]
    fn construction_rejects_duplicates_and_bad_indices() {
        let dup = SparseMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (0, 1, 2.0)]);
        assert_eq!(dup.unwrap_err(), Error::DuplicateEntry { row: 0, col: 1 });
        let oob = SparseMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]);
        assert!(matches!(oob.unwrap_err(), Error::IndexOutOfRange { .. }));
        let nan = SparseMatrix::from_triplets(2, 2, vec![(0, 0, f64::NAN)]);
        assert_eq!(nan.unwrap_err(), Error::NonFinite("sparse matrix value"));
    }

    #[test]
    fn rows_are_strictly_increasing_in_column() {
        let a = SparseMatrix::from_triplets(2, 4, vec![(0, 3, 1.0), (0, 1, 2.0), (1, 0, 3.0)])
            .unwrap();
        let (cols, vals) = a.row(0);
        assert_eq!(cols, &[1, 3]);
        assert_eq!(vals, &[2.0, 1.0]);
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn zero_matrix_applies_only_column() {
        // X = 0 (2x2), z = (2, 4), r = (0, 0, 1) -> z/2 = (1, 2).
        let x = SparseMatrix::zeros(2, 2).unwrap();
        let op =
            ScaledAugmentedOperator::new(Arc::new(x), Arc::new(vec![2.0, 4.0]), 7.0).unwrap();
        let out = op.apply(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(out, vec![1.0, 2.0]);
    }

    #[test]
    fn identity_base_with_unit_scale() {
        // X = I2, z = 0, gamma = 4 so scale = 1: L̂ (1,0,0) = (1, 0).
        let x = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let op =
            ScaledAugmentedOperator::new(Arc::new(x), Arc::new(vec![0.0, 0.0]), 4.0).unwrap();
        assert_eq!(op.apply(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        // Adjoint of the same operator: L̂ᵀ (1,1) = (1, 1, 0).
        assert_eq!(op.apply_transpose(&[1.0, 1.0]).unwrap(), vec![1.0, 1.0, 0.0]);
        // Implicit H = diag(1, 1, 0).
        assert_eq!(
            op.hessian_apply(&[1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 2.0, 0.0]
        );
    }

    #[test]
    fn worked_apply_example() {
        // X = [[1,2],[0,3]], z = (1,1), gamma = 1, r = (1,1,2) -> (2.5, 2.5).
        let x = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 1, 3.0)])
            .unwrap();
        let op =
            ScaledAugmentedOperator::new(Arc::new(x), Arc::new(vec![1.0, 1.0]), 1.0).unwrap();
        let got = op.apply(&[1.0, 1.0, 2.0]).unwrap();
        // Dense oracle on the same data.
        let (m, d, lhat) = dense_lhat(&op);
        let want = dense_matvec(m, d, &lhat, &[1.0, 1.0, 2.0]);
        assert_eq!(got, want);
        assert!((got[0] - 2.5).abs() < 1e-15 && (got[1] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn adjoint_of_zero_is_zero() {
        let op = random_operator(3, 5, 3, 0.5);
        assert_eq!(op.apply_transpose(&vec![0.0; 5]).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn adjoint_matches_dense_transpose_oracle() {
        let op = random_operator(11, 5, 3, 2.25);
        let (m, d, lhat) = dense_lhat(&op);
        let mut s = 99u64;
        let u: Vec<f64> = (0..m).map(|_| splitmix(&mut s)).collect();
        let got = op.apply_transpose(&u).unwrap();
        let want = dense_transpose_matvec(m, d, &lhat, &u);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn hessian_of_zero_is_zero() {
        let op = random_operator(5, 4, 6, 1.0);
        assert_eq!(op.hessian_apply(&vec![0.0; 7]).unwrap(), vec![0.0; 7]);
    }

    #[test]
    fn hessian_matches_dense_oracle() {
        let op = random_operator(17, 8, 5, 0.7);
        let (m, d, lhat) = dense_lhat(&op);
        let mut s = 4u64;
        let r: Vec<f64> = (0..d).map(|_| splitmix(&mut s)).collect();
        let got = op.hessian_apply(&r).unwrap();
        let lr = dense_matvec(m, d, &lhat, &r);
        let want = dense_transpose_matvec(m, d, &lhat, &lr);
        let scale = norm2(&want).max(1.0);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn dimension_mismatches_error() {
        let op = random_operator(1, 4, 3, 1.0);
        assert!(matches!(
            op.apply(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            op.apply_transpose(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn matvec_touches_each_entry_exactly_once() {
        let op = random_operator(23, 9, 7, 1.3);
        let mut touched = 0usize;
        op.base().for_each_entry(|_, _, _| touched += 1);
        assert_eq!(touched, op.base().nnz());
        // With all-ones input and |values| = 1, the product sums row entry
        // counts, which pins each entry's contribution at exactly one use.
        let ones_x = SparseMatrix::from_triplets(
            op.base().nrows(),
            op.base().ncols(),
            {
                let mut t = Vec::new();
                op.base().for_each_entry(|i, j, _| t.push((i, j, 1.0)));
                t
            },
        )
        .unwrap();
        let y = {
            let mut y = vec![0.0; ones_x.nrows()];
            ones_x
                .apply_into(&vec![1.0; ones_x.ncols()], &mut y)
                .unwrap();
            y
        };
        let total: f64 = y.iter().sum();
        assert_eq!(total as usize, ones_x.nnz());
    }

    #[test]
    fn adjoint_identity_randomized() {
        for seed in 0..20u64 {
            let op = random_operator(seed, 6, 4, 0.9);
            let mut s = seed.wrapping_mul(7919).wrapping_add(1);
            let r: Vec<f64> = (0..op.ncols()).map(|_| splitmix(&mut s)).collect();
            let u: Vec<f64> = (0..op.nrows()).map(|_| splitmix(&mut s)).collect();
            let lr = op.apply(&r).unwrap();
            let ltu = op.apply_transpose(&u).unwrap();
            let lhs = dot(&lr, &u);
            let rhs = dot(&r, &ltu);
            let scale = lhs.abs().max(rhs.abs()).max(1e-30);
            assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn implicit_hessian_is_psd() {
        for seed in 40..60u64 {
            let op = random_operator(seed, 6, 5, 1.7);
            let mut s = seed + 1;
            let r: Vec<f64> = (0..op.ncols()).map(|_| splitmix(&mut s)).collect();
            let hr = op.hessian_apply(&r).unwrap();
            let quad = dot(&r, &hr);
            assert!(quad >= -1e-12 * dot(&r, &r).max(1.0));
        }
    }
}
