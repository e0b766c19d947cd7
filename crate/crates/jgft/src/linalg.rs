//! Numeric linear algebra on [`DenseMatrix`]: complex eigenvalues (Schur),
//! SVD-based rank and kernel with a relative threshold, inversion with a
//! residual self-check, and minimum-norm least squares.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;
use nalgebra::DMatrix;
use num_complex::Complex64;

type NaMatrix = DMatrix<Complex64>;

fn to_na(a: &DenseMatrix) -> NaMatrix {
    NaMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

fn from_na(a: &NaMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

// ───────────────────────── eigenvalues ─────────────────────────

/// All eigenvalues of a square complex matrix, with multiplicity, in no
/// particular order. Computed via the complex Schur decomposition.
///
/// Triangular inputs short-circuit to their diagonal. If the Schur iteration
/// stagnates (which happens on some exactly-patterned defective matrices), a
/// seeded random unitary conjugation — which preserves the spectrum — is
/// applied and the iteration retried.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = a.require_square()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if is_triangular(a) {
        return Ok((0..n).map(|i| a[(i, i)]).collect());
    }
    if let Some(vals) = schur_eigenvalues(&to_na(a)) {
        return Ok(vals);
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    for _ in 0..3 {
        let g = NaMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let q = g.qr().q();
        let rotated = &q * to_na(a) * q.adjoint();
        if let Some(vals) = schur_eigenvalues(&rotated) {
            return Ok(vals);
        }
    }
    Err(Error::Eigensolver(
        "Schur iteration did not converge".into(),
    ))
}

fn is_triangular(a: &DenseMatrix) -> bool {
    let n = a.rows();
    let lower_zero = (0..n).all(|i| (0..i).all(|j| a[(i, j)] == Complex64::new(0.0, 0.0)));
    let upper_zero = (0..n).all(|i| (i + 1..n).all(|j| a[(i, j)] == Complex64::new(0.0, 0.0)));
    lower_zero || upper_zero
}

fn schur_eigenvalues(m: &NaMatrix) -> Option<Vec<Complex64>> {
    for eps in [f64::EPSILON, 1e-14, 1e-12] {
        if let Some(schur) = m.clone().try_schur(eps, 50_000) {
            if let Some(vals) = schur.eigenvalues() {
                return Some(vals.iter().cloned().collect());
            }
        }
    }
    None
}

/// Spectral radius `max |lambda|`.
pub fn spectral_radius(a: &DenseMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

// ───────────────────────── SVD, rank, kernel ─────────────────────────

/// Full singular value decomposition `A = U diag(sigma) V^H`, with singular
/// values sorted in descending order.
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    /// `V^H` (rows are conjugated right singular vectors).
    pub v_h: DenseMatrix,
}

pub fn svd(a: &DenseMatrix) -> Result<Svd> {
    let m = to_na(a);
    let svd = m.svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^H");
    // Sort singular triplets descending; nalgebra does not guarantee order
    // for every code path, and downstream rank logic assumes it.
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = DenseMatrix::from_fn(u.nrows(), k, |i, jj| u[(i, order[jj])]);
    let v_h_sorted = DenseMatrix::from_fn(k, v_t.ncols(), |ii, j| v_t[(order[ii], j)]);
    Ok(Svd {
        u: u_sorted,
        sigma,
        v_h: v_h_sorted,
    })
}

/// Numeric rank and an orthonormal kernel basis.
///
/// Rank counts singular values above `rank_tol * sigma_max`; the kernel basis
/// consists of the right singular vectors for the remaining directions, so
/// its columns are orthonormal and `rank + kernel columns = cols`.
pub fn rank_and_kernel(a: &DenseMatrix, tol: &ToleranceConfig) -> Result<(usize, DenseMatrix)> {
    tol.validate()?;
    // The SVD only exposes min(rows, cols) right singular vectors; padding a
    // wide matrix with zero rows makes every kernel direction visible without
    // changing the kernel itself.
    let padded;
    let a = if a.rows() < a.cols() {
        let mut top = DenseMatrix::zeros(a.cols(), a.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                top[(i, j)] = a[(i, j)];
            }
        }
        padded = top;
        &padded
    } else {
        a
    };
    let Svd { sigma, v_h, .. } = svd(a)?;
    let smax = sigma.first().copied().unwrap_or(0.0);
    let thresh = tol.rank_tol * smax;
    let rank = sigma.iter().filter(|&&s| s > thresh && s > 0.0).count();
    let null_dim = a.cols() - rank;
    let mut kernel = DenseMatrix::zeros(a.cols(), null_dim);
    for (jj, row) in (rank..a.cols()).enumerate() {
        for i in 0..a.cols() {
            kernel[(i, jj)] = v_h[(row, i)].conj();
        }
    }
    Ok((rank, kernel))
}

/// Condition number in the 2-norm (`sigma_max / sigma_min`); infinite for
/// rank-deficient input.
pub fn condition_number(a: &DenseMatrix) -> Result<f64> {
    let Svd { sigma, .. } = svd(a)?;
    let smax = sigma.first().copied().unwrap_or(0.0);
    let smin = sigma.last().copied().unwrap_or(0.0);
    if smin == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(smax / smin)
    }
}

// ───────────────────────── inversion and solving ─────────────────────────

/// Matrix inverse with a rank pre-check and residual post-check
/// `‖A A⁻¹ − I‖₁ ≤ verify_tol`.
pub fn inverse(a: &DenseMatrix, tol: &ToleranceConfig) -> Result<DenseMatrix> {
    let n = a.require_square()?;
    tol.validate()?;
    let (rank, _) = rank_and_kernel(a, tol)?;
    if rank < n {
        return Err(Error::Singular {
            detail: format!("numeric rank {rank} < {n}"),
        });
    }
    let inv = to_na(a).try_inverse().ok_or_else(|| Error::Singular {
        detail: "LU inversion failed".into(),
    })?;
    let inv = from_na(&inv);
    let residual = a
        .matmul(&inv)?
        .sub(&DenseMatrix::identity(n))?
        .induced_l1_norm();
    if residual > tol.verify_tol {
        return Err(Error::Singular {
            detail: format!("inverse residual {residual:.3e} exceeds verify_tol"),
        });
    }
    Ok(inv)
}

/// Minimum-norm least-squares solution of `A x = b` via the pseudoinverse
/// (`x = V Sigma^+ U^H b`), using `rank_tol` to truncate small singular values.
pub fn solve_min_norm(a: &DenseMatrix, b: &[Complex64], tol: &ToleranceConfig) -> Result<Vec<Complex64>> {
    if a.rows() != b.len() {
        return Err(Error::ShapeMismatch {
            op: "solve_min_norm",
            lhs_rows: a.rows(),
            lhs_cols: a.cols(),
            rhs_rows: b.len(),
            rhs_cols: 1,
        });
    }
    let Svd { u, sigma, v_h } = svd(a)?;
    let smax = sigma.first().copied().unwrap_or(0.0);
    let thresh = tol.rank_tol * smax;
    // coefficients c_i = u_i^H b / sigma_i over the numerically nonzero part
    let mut x = vec![Complex64::new(0.0, 0.0); a.cols()];
    for (i, &s) in sigma.iter().enumerate() {
        if s <= thresh || s == 0.0 {
            continue;
        }
        let mut ci = Complex64::new(0.0, 0.0);
        for r in 0..a.rows().min(u.rows()) {
            ci += u[(r, i)].conj() * b[r];
        }
        ci /= s;
        for c in 0..a.cols() {
            x[c] += v_h[(i, c)].conj() * ci;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::vec_max_abs_diff;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn eigenvalues_of_triangular_matrix_are_its_diagonal() {
        let a = DenseMatrix::from_real_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![0.0, -3.0, 5.0],
            vec![0.0, 0.0, 0.5],
        ]);
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.re.total_cmp(&y.re));
        let expect = [-3.0, 0.5, 2.0];
        for (z, e) in ev.iter().zip(expect) {
            assert!((z - c(e)).norm() < 1e-12, "{z} vs {e}");
        }
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let tol = ToleranceConfig::default();
        let (rank, kernel) = rank_and_kernel(&DenseMatrix::zeros(3, 3), &tol).unwrap();
        assert_eq!(rank, 0);
        assert_eq!(kernel.cols(), 3);
    }

    #[test]
    fn planted_rank_is_recovered() {
        // rank-2 product of 4x2 and 2x4 factors
        let f = DenseMatrix::from_real_rows(&[
            vec![1.0, 0.0],
            vec![2.0, 1.0],
            vec![0.0, 3.0],
            vec![1.0, 1.0],
        ]);
        let g = DenseMatrix::from_real_rows(&[vec![1.0, 2.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 1.0]]);
        let a = f.matmul(&g).unwrap();
        let tol = ToleranceConfig::default();
        let (rank, kernel) = rank_and_kernel(&a, &tol).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(kernel.cols(), 2);
        // kernel columns are honest null vectors and orthonormal
        for j in 0..2 {
            let col = kernel.col(j);
            let r = a.mul_vec(&col).unwrap();
            assert!(crate::dense::vec_l1(&r) < 1e-10);
            for j2 in 0..2 {
                let dot: Complex64 = (0..4).map(|i| kernel[(i, j)].conj() * kernel[(i, j2)]).sum();
                let expect = if j == j2 { 1.0 } else { 0.0 };
                assert!((dot - c(expect)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_of_diagonal() {
        let a = DenseMatrix::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]);
        let tol = ToleranceConfig::default();
        let inv = inverse(&a, &tol).unwrap();
        assert!((inv[(0, 0)] - c(0.5)).norm() < 1e-14);
        assert!((inv[(1, 1)] - c(0.25)).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_inversion_is_rejected() {
        let a = DenseMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(
            inverse(&a, &ToleranceConfig::default()),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn min_norm_solve_matches_direct_solution() {
        let a = DenseMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        let b = [c(3.0), c(1.0)];
        let x = solve_min_norm(&a, &b, &ToleranceConfig::default()).unwrap();
        assert!(vec_max_abs_diff(&x, &[c(2.0), c(1.0)]) < 1e-12);
    }
}
