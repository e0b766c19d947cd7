//! Exact matrices over Gaussian rationals, with fraction-free elimination for
//! rank, reduced-echelon kernel bases, and exact inversion.
//!
//! This is the arithmetic backbone of the exact decomposition path: when a
//! shift matrix has rational entries and a candidate eigenvalue is rational,
//! kernels of `(A - lambda I)^p` and the Jordan chains built from them can be
//! computed without any floating-point rounding.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};
use std::fmt;
use std::ops::Range;

/// Dense matrix of [`ExactScalar`] entries, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ExactScalar>,
}

impl ExactMatrix {
    // ───────────────────────── constructors ─────────────────────────

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ExactScalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ExactScalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ExactScalar>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Self { rows: r, cols: c, data }
    }

    /// Convenience for integer test data.
    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| ExactScalar::from_int(x)).collect())
                .collect(),
        )
    }

    /// Exact dyadic lift of a float matrix. Fails only on NaN/infinite entries.
    pub fn from_dense_exact(a: &DenseMatrix) -> Option<Self> {
        let mut data = Vec::with_capacity(a.rows() * a.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let z = a[(i, j)];
                data.push(ExactScalar::from_f64_exact(z.re, z.im)?);
            }
        }
        Some(Self {
            rows: a.rows(),
            cols: a.cols(),
            data,
        })
    }

    // ───────────────────────── shape and access ─────────────────────────

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.rows == self.cols {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn col(&self, j: usize) -> Vec<ExactScalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn col_block(&self, range: Range<usize>) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.rows, range.len());
        for (jj, j) in range.clone().enumerate() {
            for i in 0..self.rows {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn set_col_block(&mut self, start: usize, b: &ExactMatrix) {
        assert!(start + b.cols <= self.cols && b.rows == self.rows);
        for j in 0..b.cols {
            for i in 0..self.rows {
                self[(i, start + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn hstack(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix> {
        if a.rows != b.rows {
            return Err(Error::ShapeMismatch {
                op: "hstack",
                lhs_rows: a.rows,
                lhs_cols: a.cols,
                rhs_rows: b.rows,
                rhs_cols: b.cols,
            });
        }
        let mut out = ExactMatrix::zeros(a.rows, a.cols + b.cols);
        out.set_col_block(0, a);
        out.set_col_block(a.cols, b);
        Ok(out)
    }

    // ───────────────────────── arithmetic ─────────────────────────

    pub fn matmul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let mut out = ExactMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = &self[(i, k)];
                if aik.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = aik * &rhs[(k, j)];
                    out[(i, j)] = &out[(i, j)] + &t;
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &ExactMatrix) -> Result<ExactMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::ShapeMismatch {
                op: "sub",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: &ExactScalar) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self - lambda * I`.
    pub fn shifted(&self, lambda: &ExactScalar) -> Result<ExactMatrix> {
        let n = self.require_square()?;
        let mut out = self.clone();
        for i in 0..n {
            out[(i, i)] = &out[(i, i)] - lambda;
        }
        Ok(out)
    }

    pub fn pow(&self, p: usize) -> Result<ExactMatrix> {
        let n = self.require_square()?;
        let mut acc = ExactMatrix::identity(n);
        for _ in 0..p {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    pub fn mul_vec(&self, v: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
        if self.cols != v.len() {
            return Err(Error::ShapeMismatch {
                op: "mul_vec",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: v.len(),
                rhs_cols: 1,
            });
        }
        let mut out = vec![ExactScalar::zero(); self.rows];
        for i in 0..self.rows {
            let mut acc = ExactScalar::zero();
            for k in 0..self.cols {
                if !self[(i, k)].is_zero() {
                    let t = &self[(i, k)] * &v[k];
                    acc = &acc + &t;
                }
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.is_zero())
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_complex())
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.is_real())
    }

    pub fn conj_transpose(&self) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    // ───────────────────────── elimination ─────────────────────────

    /// Exact rank via fraction-free (Bareiss) elimination.
    ///
    /// Rows are pre-scaled by their denominator LCM so the working matrix is
    /// Gaussian-integer valued; the Bareiss two-step recurrence then keeps it
    /// that way, avoiding the coefficient blowup of naive rational elimination.
    /// Row scaling leaves rank and kernel unchanged.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.clear_row_denominators();
        let rows = m.rows;
        let cols = m.cols;
        let mut prev_pivot = ExactScalar::one();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            // find a pivot in this column at or below `row`
            let Some(piv_row) = (row..rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            if piv_row != row {
                m.swap_rows(piv_row, row);
            }
            let pivot = m[(row, col)].clone();
            for r in row + 1..rows {
                for c in col + 1..cols {
                    // Bareiss step: (m[r][c]*pivot - m[r][col]*m[row][c]) / prev_pivot
                    let num = &(&m[(r, c)] * &pivot) - &(&m[(r, col)] * &m[(row, c)]);
                    m[(r, c)] = &num / &prev_pivot;
                }
                m[(r, col)] = ExactScalar::zero();
            }
            prev_pivot = pivot;
            rank += 1;
            row += 1;
            if row == rows {
                break;
            }
        }
        rank
    }

    fn clear_row_denominators(&mut self) {
        for i in 0..self.rows {
            let mut lcm = BigInt::one();
            for j in 0..self.cols {
                let z = &self[(i, j)];
                lcm = num::integer::lcm(lcm.clone(), z.re.denom().clone());
                lcm = num::integer::lcm(lcm, z.im.denom().clone());
            }
            if lcm.is_one() {
                continue;
            }
            let s = ExactScalar::from_re(BigRational::from_integer(lcm));
            for j in 0..self.cols {
                self[(i, j)] = &self[(i, j)] * &s;
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let tmp = self[(a, j)].clone();
            self[(a, j)] = self[(b, j)].clone();
            self[(b, j)] = tmp;
        }
    }

    /// Reduced row echelon form; returns `(rref, pivot_columns)`.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            // deterministic pivot: first row with a nonzero entry
            let Some(piv_row) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(piv_row, row);
            let inv = m[(row, col)].inv();
            for c in col..m.cols {
                m[(row, c)] = &m[(row, c)] * &inv;
            }
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    for c in col..m.cols {
                        let t = &factor * &m[(row, c)];
                        m[(r, c)] = &m[(r, c)] - &t;
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    /// Exact kernel basis in reduced-echelon form: one column per free
    /// variable, with a 1 in the free position, satisfying `A k = 0` exactly.
    pub fn kernel_basis(&self) -> ExactMatrix {
        let (rref, pivots) = self.rref();
        let rank = pivots.len();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut kernel = ExactMatrix::zeros(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            kernel[(fc, k)] = ExactScalar::one();
            for (r, &pc) in pivots.iter().enumerate().take(rank) {
                kernel[(pc, k)] = -&rref[(r, fc)];
            }
        }
        kernel
    }

    /// Exact inverse via Gauss-Jordan; errors on singular input.
    pub fn inverse(&self) -> Result<ExactMatrix> {
        let n = self.require_square()?;
        let aug = ExactMatrix::hstack(self, &ExactMatrix::identity(n))?;
        let (rref, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) {
            return Err(Error::Singular {
                detail: format!("exact rank {} < {n}", pivots.iter().filter(|&&p| p < n).count()),
            });
        }
        Ok(rref.col_block(n..2 * n))
    }

    /// Induced L1 norm as an exact rational, available when all entries are
    /// real (entry modulus is then `|re|`, a rational). Returns `None` if any
    /// entry has a nonzero imaginary part.
    pub fn induced_l1_norm_rational(&self) -> Option<BigRational> {
        if !self.is_real() {
            return None;
        }
        let mut best = BigRational::zero();
        for j in 0..self.cols {
            let mut sum = BigRational::zero();
            for i in 0..self.rows {
                sum += self[(i, j)].re.abs();
            }
            if sum > best {
                best = sum;
            }
        }
        Some(best)
    }
}

/// Try to reinterpret a float matrix as small rationals: an entry qualifies
/// when it equals `p/q` exactly (as a double) for some `q ≤ max_den`.
/// Returns `None` if any entry fails, which routes the caller to the numeric
/// path. This recovers integer and small-fraction inputs that arrived as
/// floats while rejecting generic rounding noise.
pub fn rationalize_dense(a: &DenseMatrix, max_den: u64) -> Option<ExactMatrix> {
    let mut data = Vec::with_capacity(a.rows() * a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let z = a[(i, j)];
            let re = rationalize_f64(z.re, max_den)?;
            let im = rationalize_f64(z.im, max_den)?;
            data.push(ExactScalar::new(re, im));
        }
    }
    Some(ExactMatrix {
        rows: a.rows(),
        cols: a.cols(),
        data,
    })
}

/// Continued-fraction search for a rational `p/q` (q ≤ max_den) whose double
/// rounding is exactly `x`.
pub fn rationalize_f64(x: f64, max_den: u64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x == x.trunc() && x.abs() < 1e15 {
        return Some(BigRational::from_integer(BigInt::from(x as i64)));
    }
    // continued-fraction convergents of x
    let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, x.floor() as i128, 1i128);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        let cand_num = p1;
        let cand_den = q1;
        if cand_den > 0 && cand_den as u64 <= max_den {
            let approx = cand_num as f64 / cand_den as f64;
            if approx == x {
                return Some(BigRational::new(BigInt::from(cand_num), BigInt::from(cand_den)));
            }
        }
        if frac == 0.0 || cand_den as u64 > max_den {
            break;
        }
        let recip = 1.0 / frac;
        let a = recip.floor();
        frac = recip - a;
        let a = a as i128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if q1 < 0 || q1 as u64 > max_den.saturating_mul(2) {
            break;
        }
    }
    None
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = ExactScalar;
    fn index(&self, (i, j): (usize, usize)) -> &ExactScalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ExactScalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{}  ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
