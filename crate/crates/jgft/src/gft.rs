//! Graph Fourier transform over Jordan subspaces.
//!
//! A decomposition `A = V J V^{-1}` splits the signal space into the direct
//! sum of the chain spans ("spectral components"). The transform of a signal
//! `s` is the list of its oblique projections onto those components:
//! `s_hat_ij = V_ij W_ij^H s`, where `W = V^{-H}`. The projections sum back
//! to `s` — the inverse transform is plain addition.

use crate::dense::{vec_l1, vec_max_abs_diff, DenseMatrix};
use crate::error::{Error, Result};
use crate::jordan::JordanDecomposition;
use crate::linalg;
use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// One spectral component of a transformed signal.
#[derive(Clone, Debug)]
pub struct SpectralComponent {
    /// Eigenvalue index in the decomposition.
    pub eig_index: usize,
    /// Block index within the eigenvalue.
    pub block_index: usize,
    /// Global chain index.
    pub chain_index: usize,
    pub eigenvalue: Complex64,
    /// Block dimension `r`.
    pub dim: usize,
    /// Expansion coefficients of the component in the chain basis
    /// (`W_ij^H s`, length `r`).
    pub coefficients: Vec<Complex64>,
    /// The projected signal in the node domain (length `N`).
    pub shat: Vec<Complex64>,
}

/// A fully expanded transform: one component per Jordan block, in canonical
/// order.
#[derive(Clone, Debug)]
pub struct GftResult {
    pub components: Vec<SpectralComponent>,
    pub signal_len: usize,
}

impl GftResult {
    /// Look up a component by (eigenvalue, block) indices.
    pub fn component(&self, i: usize, j: usize) -> Option<&SpectralComponent> {
        self.components
            .iter()
            .find(|c| c.eig_index == i && c.block_index == j)
    }
}

/// The oblique projector onto component `(i, j)`: `P = V_ij W_ij^H`.
///
/// Idempotent, annihilates every other component, and the full set sums to
/// the identity. Computed on demand — most uses only ever need a few blocks.
pub fn projector(d: &JordanDecomposition, i: usize, j: usize) -> Result<DenseMatrix> {
    let idx = d.chain_index(i, j)?;
    let v_ij = d.block_matrix(idx);
    let w_ij = d.dual_block_matrix(idx);
    v_ij.matmul(&w_ij.conj_transpose())
}

/// Project a signal onto component `(i, j)` with two matrix-vector products
/// (never materializing the `N x N` projector).
pub fn project_component(
    d: &JordanDecomposition,
    i: usize,
    j: usize,
    s: &[Complex64],
) -> Result<Vec<Complex64>> {
    let idx = d.chain_index(i, j)?;
    Ok(project_chain(d, idx, s)?.1)
}

/// Coefficients and node-domain projection for global chain `idx`.
fn project_chain(
    d: &JordanDecomposition,
    idx: usize,
    s: &[Complex64],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = d.dimension();
    if s.len() != n {
        return Err(Error::ShapeMismatch {
            op: "project_component",
            lhs_rows: n,
            lhs_cols: 1,
            rhs_rows: s.len(),
            rhs_cols: 1,
        });
    }
    let range = d.col_range(idx);
    // coefficients: conj(W column) . s for each chain column
    let coeffs: Vec<Complex64> = range
        .clone()
        .map(|col| (0..n).map(|row| d.w[(row, col)].conj() * s[row]).sum())
        .collect();
    let mut shat = vec![Complex64::new(0.0, 0.0); n];
    for (k, col) in range.enumerate() {
        let c = coeffs[k];
        for (row, out) in shat.iter_mut().enumerate() {
            *out += d.v[(row, col)] * c;
        }
    }
    Ok((coeffs, shat))
}

/// Forward transform: all components of `s`, canonically ordered.
///
/// Self-checks that the components sum back to `s` within the verification
/// tolerance before returning.
pub fn gft(d: &JordanDecomposition, s: &[Complex64]) -> Result<GftResult> {
    let n = d.dimension();
    let mut components = Vec::with_capacity(d.chain_count());
    let mut total = vec![Complex64::new(0.0, 0.0); n];
    for idx in 0..d.chain_count() {
        let (coefficients, shat) = project_chain(d, idx, s)?;
        for (t, x) in total.iter_mut().zip(&shat) {
            *t += x;
        }
        let c = &d.chains[idx];
        components.push(SpectralComponent {
            eig_index: c.eig_index,
            block_index: c.block_index,
            chain_index: idx,
            eigenvalue: d.eigenvalues[c.eig_index].value,
            dim: c.len(),
            coefficients,
            shat,
        });
    }
    let err = vec_max_abs_diff(&total, s);
    let allowed = d.tolerances.verify_tol * vec_l1(s).max(1.0);
    if err > allowed {
        return Err(Error::SelfCheck(format!(
            "spectral components sum to the input with error {err:.3e} (allowed {allowed:.3e})"
        )));
    }
    Ok(GftResult {
        components,
        signal_len: n,
    })
}

/// Inverse transform: componentwise sum.
pub fn inverse_gft(r: &GftResult) -> Vec<Complex64> {
    let mut s = vec![Complex64::new(0.0, 0.0); r.signal_len];
    for c in &r.components {
        for (out, x) in s.iter_mut().zip(&c.shat) {
            *out += x;
        }
    }
    s
}

/// Transform a batch of signals against one shared decomposition.
///
/// With the `parallel` feature (default) the signals are processed by a
/// work-stealing thread pool; without it, sequentially. Results are in input
/// order either way.
pub fn batch_gft(d: &JordanDecomposition, signals: &[Vec<Complex64>]) -> Result<Vec<GftResult>> {
    #[cfg(feature = "parallel")]
    {
        signals.par_iter().map(|s| gft(d, s)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        signals.iter().map(|s| gft(d, s)).collect()
    }
}

/// Least-squares membership test: is `x` in the span of component `(i, j)`?
///
/// Compares the residual of the best fit in the chain basis against the
/// verification tolerance; numerically robust where an exact span test
/// would be brittle.
pub fn in_component_span(
    d: &JordanDecomposition,
    i: usize,
    j: usize,
    x: &[Complex64],
) -> Result<bool> {
    let idx = d.chain_index(i, j)?;
    let v_ij = d.block_matrix(idx);
    let coeffs = linalg::solve_min_norm(&v_ij, x, &d.tolerances)?;
    let fit = v_ij.mul_vec(&coeffs)?;
    let resid = vec_max_abs_diff(&fit, x);
    Ok(resid <= d.tolerances.verify_tol * vec_l1(x).max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::jordan_decompose;
    use crate::tolerance::ToleranceConfig;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn real(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_real_rows(rows)
    }

    fn csig(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn projectors_are_idempotent_and_complete() {
        let a = real(&[
            vec![2.0, 1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 0.0],
            vec![0.0, 0.0, 3.0, 1.0],
            vec![0.0, 0.0, 0.0, 4.0],
        ]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        let n = d.dimension();
        let mut sum = DenseMatrix::zeros(n, n);
        for c in &d.chains {
            let p = projector(&d, c.eig_index, c.block_index).unwrap();
            let p2 = p.matmul(&p).unwrap();
            assert!(p2.max_abs_diff(&p) < 1e-9, "projector not idempotent");
            sum = sum.add(&p).unwrap();
        }
        assert!(sum.max_abs_diff(&DenseMatrix::identity(n)) < 1e-9);
    }

    #[test]
    fn projectors_annihilate_each_other() {
        let a = real(&[
            vec![1.0, 2.0, 0.0],
            vec![0.0, 5.0, 0.0],
            vec![0.0, 0.0, -2.0],
        ]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        for x in &d.chains {
            for y in &d.chains {
                if (x.eig_index, x.block_index) == (y.eig_index, y.block_index) {
                    continue;
                }
                let px = projector(&d, x.eig_index, x.block_index).unwrap();
                let py = projector(&d, y.eig_index, y.block_index).unwrap();
                assert!(px.matmul(&py).unwrap().max_abs() < 1e-9);
            }
        }
    }

    #[test]
    fn unicellular_shift_has_identity_projector() {
        let mut rows = vec![vec![0.0; 3]; 3];
        rows[1][0] = 1.0;
        rows[2][1] = 1.0;
        let d = jordan_decompose(&real(&rows), &tol()).unwrap();
        assert_eq!(d.chain_count(), 1);
        let p = projector(&d, 0, 0).unwrap();
        assert!(p.max_abs_diff(&DenseMatrix::identity(3)) < 1e-9);
        // ... so the transform of any signal is the signal itself.
        let s = csig(&[1.0, -2.0, 0.5]);
        let r = gft(&d, &s).unwrap();
        assert!(vec_max_abs_diff(&r.components[0].shat, &s) < 1e-9);
    }

    #[test]
    fn transform_round_trips() {
        let a = real(&[
            vec![0.0, 1.0, 0.0, 2.0],
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.0, 2.0, 0.0, 1.0],
            vec![1.0, 0.0, 1.0, 0.0],
        ]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        let s = csig(&[0.3, -1.2, 2.0, 0.7]);
        let r = gft(&d, &s).unwrap();
        let back = inverse_gft(&r);
        assert!(vec_max_abs_diff(&back, &s) < 1e-8);
        // zero signal: all components zero
        let z = gft(&d, &csig(&[0.0; 4])).unwrap();
        for c in &z.components {
            assert!(vec_l1(&c.shat) < 1e-12);
        }
    }

    #[test]
    fn projection_fixes_own_chain_and_kills_others() {
        let a = real(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        // v_1 of some chain projects to itself under its own projector
        for (idx, c) in d.chains.iter().enumerate() {
            let v1 = &c.vectors[0];
            let own = project_component(&d, c.eig_index, c.block_index, v1).unwrap();
            assert!(vec_max_abs_diff(&own, v1) < 1e-9);
            for other in &d.chains {
                if other.eig_index == c.eig_index && other.block_index == c.block_index {
                    continue;
                }
                let cross = project_component(&d, other.eig_index, other.block_index, v1).unwrap();
                assert!(vec_l1(&cross) < 1e-8, "chain {idx} leaked");
            }
        }
    }

    #[test]
    fn project_component_matches_materialized_projector() {
        let a = real(&[
            vec![1.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![2.0, 0.0, 4.0],
        ]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        let s = csig(&[0.2, 1.4, -0.6]);
        for c in &d.chains {
            let p = projector(&d, c.eig_index, c.block_index).unwrap();
            let direct = p.mul_vec(&s).unwrap();
            let lazy = project_component(&d, c.eig_index, c.block_index, &s).unwrap();
            assert!(vec_max_abs_diff(&direct, &lazy) < 1e-10);
        }
    }

    #[test]
    fn batch_matches_single() {
        let a = real(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        let signals: Vec<Vec<Complex64>> =
            (0..8).map(|k| csig(&[k as f64, 1.0 - k as f64])).collect();
        let batch = batch_gft(&d, &signals).unwrap();
        for (s, r) in signals.iter().zip(&batch) {
            let single = gft(&d, s).unwrap();
            for (c1, c2) in single.components.iter().zip(&r.components) {
                assert!(vec_max_abs_diff(&c1.shat, &c2.shat) < 1e-14);
            }
        }
    }

    #[test]
    fn span_membership_uses_residual() {
        let a = real(&[
            vec![2.0, 1.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 7.0],
        ]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        // the J_2(2) block spans the first two coordinates
        let i2 = d
            .eigenvalues
            .iter()
            .position(|e| (e.value.re - 2.0).abs() < 1e-9)
            .unwrap();
        let inside = csig(&[0.3, -0.4, 0.0]);
        let outside = csig(&[0.3, -0.4, 0.1]);
        assert!(in_component_span(&d, i2, 0, &inside).unwrap());
        assert!(!in_component_span(&d, i2, 0, &outside).unwrap());
    }
}
