//! Total variation of graph signals and spectral components, and the
//! frequency ordering it induces.
//!
//! The total variation of a signal is `‖s - A s‖₁`; for a chain block it is
//! `‖V_ij - A V_ij‖₁` with the induced 1-norm (maximum absolute column
//! sum), which has the closed form `‖V_ij (I - J_ij)‖₁` and the bound
//! `|1 - lambda| + 1`. Components are ordered low-to-high by that bound.

use crate::dense::{vec_l1, DenseMatrix};
use crate::error::{Error, Result};
use crate::jordan::JordanDecomposition;
use crate::linalg;
use crate::tolerance::ToleranceConfig;
use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Total variation of a signal; `normalize` first rescales the shift to
/// unit spectral radius.
pub fn signal_tv(
    a: &DenseMatrix,
    s: &[Complex64],
    normalize: bool,
    _tol: &ToleranceConfig,
) -> Result<f64> {
    let n = a.require_square()?;
    if s.len() != n {
        return Err(Error::ShapeMismatch {
            op: "signal_tv",
            lhs_rows: n,
            lhs_cols: n,
            rhs_rows: s.len(),
            rhs_cols: 1,
        });
    }
    let shifted = if normalize {
        let rho = linalg::spectral_radius(a)?;
        if rho <= f64::MIN_POSITIVE {
            return Err(Error::ZeroSpectralRadius);
        }
        a.scale(Complex64::new(1.0 / rho, 0.0))
    } else {
        a.clone()
    };
    let as_ = shifted.mul_vec(s)?;
    let diff: Vec<Complex64> = s.iter().zip(&as_).map(|(x, y)| x - y).collect();
    Ok(vec_l1(&diff))
}

/// Total variation of a normalized Jordan chain block: `‖V - A V‖₁`.
///
/// The columns must form a chain of `a` (checked, not fixed up) with unit
/// induced 1-norm. The value is evaluated both directly and through the
/// closed form `‖V (I - J)‖₁`; disagreement beyond 1e-10 is reported as a
/// failed self-check.
pub fn chain_tv(a: &DenseMatrix, v_ij: &DenseMatrix, tol: &ToleranceConfig) -> Result<f64> {
    let n = a.require_square()?;
    tol.validate()?;
    if v_ij.rows() != n || v_ij.cols() == 0 || v_ij.cols() > n {
        return Err(Error::ShapeMismatch {
            op: "chain_tv",
            lhs_rows: n,
            lhs_cols: n,
            rhs_rows: v_ij.rows(),
            rhs_cols: v_ij.cols(),
        });
    }
    let norm = v_ij.induced_l1_norm();
    if (norm - 1.0).abs() > tol.verify_tol {
        return Err(Error::UnnormalizedChain { norm });
    }
    let r = v_ij.cols();
    // Eigenvalue from the Rayleigh quotient of the chain bottom.
    let v1 = v_ij.col(0);
    let av1 = a.mul_vec(&v1)?;
    let denom: Complex64 = v1.iter().map(|z| z.conj() * *z).sum();
    if denom.norm() <= f64::MIN_POSITIVE {
        return Err(Error::NotAChain("zero leading chain vector".into()));
    }
    let lambda = v1
        .iter()
        .zip(&av1)
        .map(|(x, y)| x.conj() * *y)
        .sum::<Complex64>()
        / denom;
    // Chain recursion residuals.
    let scale = a.induced_l1_norm().max(1.0);
    let mut worst: f64 = v1
        .iter()
        .zip(&av1)
        .map(|(x, y)| (y - lambda * x).norm())
        .fold(0.0, f64::max);
    for k in 1..r {
        let vk = v_ij.col(k);
        let avk = a.mul_vec(&vk)?;
        let prev = v_ij.col(k - 1);
        let res = avk
            .iter()
            .zip(&vk)
            .zip(&prev)
            .map(|((y, x), p)| (y - lambda * x - p).norm())
            .fold(0.0, f64::max);
        worst = worst.max(res);
    }
    if worst > 100.0 * tol.verify_tol * scale {
        return Err(Error::NotAChain(format!(
            "chain recursion residual {worst:.3e} at eigenvalue estimate {lambda}"
        )));
    }
    // Direct evaluation.
    let direct = v_ij.sub(&a.matmul(v_ij)?)?.induced_l1_norm();
    // Closed form via I - J_ij (diagonal 1 - lambda, superdiagonal -1).
    let mut i_minus_j = DenseMatrix::zeros(r, r);
    for k in 0..r {
        i_minus_j[(k, k)] = Complex64::new(1.0, 0.0) - lambda;
        if k + 1 < r {
            i_minus_j[(k, k + 1)] = Complex64::new(-1.0, 0.0);
        }
    }
    let closed = v_ij.matmul(&i_minus_j)?.induced_l1_norm();
    if (direct - closed).abs() > 1e-10 * scale.max(1.0) {
        return Err(Error::SelfCheck(format!(
            "chain total variation: direct {direct} vs closed form {closed}"
        )));
    }
    Ok(direct)
}

/// Convenience wrapper: rescale the chain block to unit induced 1-norm,
/// then evaluate `chain_tv`.
pub fn chain_tv_normalized(
    a: &DenseMatrix,
    v_ij: &DenseMatrix,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let norm = v_ij.induced_l1_norm();
    if norm <= f64::MIN_POSITIVE {
        return Err(Error::NotAChain("zero chain block".into()));
    }
    chain_tv(a, &v_ij.scale(Complex64::new(1.0 / norm, 0.0)), tol)
}

/// Upper bound `|1 - lambda| + 1` on the total variation of any normalized
/// chain at eigenvalue `lambda`.
pub fn tv_bound(lambda: Complex64) -> f64 {
    (Complex64::new(1.0, 0.0) - lambda).norm() + 1.0
}

/// Class-level total variation of one spectral component: the supremum of
/// the chain TV over every shift sharing the component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassTv {
    pub value: f64,
    /// True when the value is the generic upper bound rather than a case
    /// with a proven closed form.
    pub bound_only: bool,
}

/// Class total variation of component `(i, j)`.
///
/// Exact for one-dimensional components (`|1 - lambda|`), for unicellular
/// shifts, and for shifts whose eigenvector matrix is block diagonal
/// (`|1 - lambda| + 1` in both cases); otherwise the bound is returned
/// tagged `bound_only`.
pub fn class_tv(d: &JordanDecomposition, i: usize, j: usize) -> Result<ClassTv> {
    let idx = d.chain_index(i, j)?;
    let lambda = d.eigenvalues[i].value;
    let r = d.chains[idx].len();
    if r == 1 {
        return Ok(ClassTv {
            value: (Complex64::new(1.0, 0.0) - lambda).norm(),
            bound_only: false,
        });
    }
    let exact_case = d.chain_count() == 1 || d.v_is_block_diagonal();
    Ok(ClassTv {
        value: tv_bound(lambda),
        bound_only: !exact_case,
    })
}

// ───────────────────────── profiles ─────────────────────────

/// Chain TV as a function of one free generalized-eigenvector component.
#[derive(Clone, Debug)]
pub struct TvProfile {
    /// `(parameter, tv)` for each grid value that produced a valid chain.
    pub points: Vec<(f64, f64)>,
    /// Grid values that had to be skipped, with the reason.
    pub skipped: Vec<(f64, String)>,
}

/// Vary the last generalized eigenvector of block `(i, j)` over its valid
/// affine family, parametrized by the value of entry `free_index`, and
/// evaluate the (re-normalized) chain TV at each grid point.
///
/// The dependent entries are reconstructed automatically: the varied vector
/// is the minimum-norm solution of the chain equation subject to the free
/// entry taking the requested value, so no caller-supplied constraint
/// relations are needed.
pub fn tv_profile(
    d: &JordanDecomposition,
    i: usize,
    j: usize,
    free_index: usize,
    grid: &[f64],
) -> Result<TvProfile> {
    let family = ChainFamily::new(d, i, j, free_index)?;
    let evaluate = |&t: &f64| -> (f64, Result<f64>) { (t, family.tv_at(t)) };
    #[cfg(feature = "parallel")]
    let results: Vec<(f64, Result<f64>)> = grid.par_iter().map(evaluate).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(f64, Result<f64>)> = grid.iter().map(evaluate).collect();
    let mut profile = TvProfile {
        points: Vec::new(),
        skipped: Vec::new(),
    };
    for (t, r) in results {
        match r {
            Ok(tv) => profile.points.push((t, tv)),
            Err(e) => profile.skipped.push((t, e.to_string())),
        }
    }
    Ok(profile)
}

/// Locate the maximum of the profile on `[lo, hi]`: coarse scan followed by
/// golden-section refinement around the best cell. Returns
/// `(parameter, tv)`.
pub fn tv_profile_max(
    d: &JordanDecomposition,
    i: usize,
    j: usize,
    free_index: usize,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64)> {
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "empty profile interval [{lo}, {hi}]"
        )));
    }
    let family = ChainFamily::new(d, i, j, free_index)?;
    let steps = 240;
    let mut best: Option<(f64, f64)> = None;
    for k in 0..=steps {
        let t = lo + (hi - lo) * k as f64 / steps as f64;
        if let Ok(tv) = family.tv_at(t) {
            if best.map(|(_, b)| tv > b).unwrap_or(true) {
                best = Some((t, tv));
            }
        }
    }
    let (t0, _) = best.ok_or_else(|| {
        Error::InvalidParameter("no grid point produced a valid chain".into())
    })?;
    let h = (hi - lo) / steps as f64;
    let mut a = (t0 - h).max(lo);
    let mut b = (t0 + h).min(hi);
    // Golden-section search (the profile is piecewise smooth and unimodal
    // around its maximum; 60 contractions reach ~1e-13 interval width).
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let value = |t: f64| family.tv_at(t).unwrap_or(f64::NEG_INFINITY);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = value(x1);
    let mut f2 = value(x2);
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = value(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = value(x1);
        }
    }
    let t_star = 0.5 * (a + b);
    let tv_star = family.tv_at(t_star)?;
    Ok((t_star, tv_star))
}

/// Precomputed data for rebuilding one chain with its last vector varied.
struct ChainFamily {
    shift: DenseMatrix,
    fixed: Vec<Vec<Complex64>>,
    /// Minimum-norm particular solution of `(A - lambda) x = v_{r-1}`.
    particular: Vec<Complex64>,
    /// Kernel correction direction scaled so adding `t - particular[free]`
    /// times it sets entry `free` to exactly `t`.
    correction: Vec<Complex64>,
    free_index: usize,
    tol: ToleranceConfig,
}

impl ChainFamily {
    fn new(d: &JordanDecomposition, i: usize, j: usize, free_index: usize) -> Result<Self> {
        let idx = d.chain_index(i, j)?;
        let chain = &d.chains[idx];
        let r = chain.len();
        if r < 2 {
            return Err(Error::InvalidParameter(
                "profiles need a block of dimension at least 2".into(),
            ));
        }
        let n = d.dimension();
        if free_index >= n {
            return Err(Error::InvalidComponent {
                index: free_index,
                count: n,
            });
        }
        let lambda = d.eigenvalues[i].value;
        let m = d.shift.shifted(lambda)?;
        let target = &chain.vectors[r - 2];
        let struct_tol = d
            .tolerances
            .with_rank_tol(d.tolerances.rank_tol.max(d.tolerances.eig_cluster_tol));
        let particular = linalg::solve_min_norm(&m, target, &struct_tol)?;
        let (_, kernel) = linalg::rank_and_kernel(&m, &struct_tol)?;
        let g = kernel.cols();
        // Row of the kernel basis at the free entry; its squared norm
        // measures how much the family can move that entry.
        let row: Vec<Complex64> = (0..g).map(|k| kernel[(free_index, k)]).collect();
        let row_norm_sq: f64 = row.iter().map(|z| z.norm_sqr()).sum();
        if row_norm_sq <= 1e-20 {
            return Err(Error::InvalidParameter(format!(
                "entry {free_index} is not a free component of this chain family"
            )));
        }
        // correction = Q q^H / ‖q‖²  (minimum-norm kernel direction with
        // unit value at the free entry)
        let mut correction = vec![Complex64::new(0.0, 0.0); n];
        for (k, rk) in row.iter().enumerate() {
            let cc = rk.conj() / row_norm_sq;
            for (out, idx_row) in correction.iter_mut().zip(0..n) {
                *out += kernel[(idx_row, k)] * cc;
            }
        }
        Ok(ChainFamily {
            shift: d.shift.clone(),
            fixed: chain.vectors[..r - 1].to_vec(),
            particular,
            correction,
            free_index,
            tol: d.tolerances,
        })
    }

    fn last_vector(&self, t: f64) -> Vec<Complex64> {
        let delta = Complex64::new(t, 0.0) - self.particular[self.free_index];
        self.particular
            .iter()
            .zip(&self.correction)
            .map(|(p, c)| p + c * delta)
            .collect()
    }

    fn tv_at(&self, t: f64) -> Result<f64> {
        let last = self.last_vector(t);
        let n = last.len();
        let r = self.fixed.len() + 1;
        let mut block = DenseMatrix::zeros(n, r);
        for (k, v) in self.fixed.iter().enumerate() {
            block.set_col(k, v);
        }
        block.set_col(r - 1, &last);
        chain_tv_normalized(&self.shift, &block, &self.tol)
    }
}

// ───────────────────────── frequency ordering ─────────────────────────

/// One spectral component with its ordering key.
#[derive(Clone, Debug)]
pub struct OrderedComponent {
    /// Position in the ordering (starting at 1).
    pub rank: usize,
    pub eig_index: usize,
    pub block_index: usize,
    pub chain_index: usize,
    pub lambda: Complex64,
    pub dim: usize,
    /// Uniform sort key `|1 - lambda| + 1`.
    pub key: f64,
    pub class_tv: ClassTv,
}

/// Spectral components sorted from low to high total variation.
#[derive(Clone, Debug)]
pub struct FrequencyOrdering {
    pub components: Vec<OrderedComponent>,
}

/// Order all components by increasing `|1 - lambda| + 1`.
///
/// Ties break deterministically: ascending real part, ascending imaginary
/// part, descending block dimension, then block index. The key depends only
/// on the eigenvalue, so the ordering is identical across every shift of
/// the same Jordan equivalence class, and invariant under node relabeling.
pub fn order_components(d: &JordanDecomposition) -> Result<FrequencyOrdering> {
    let mut comps = Vec::with_capacity(d.chain_count());
    for (chain_index, c) in d.chains.iter().enumerate() {
        let lambda = d.eigenvalues[c.eig_index].value;
        comps.push(OrderedComponent {
            rank: 0,
            eig_index: c.eig_index,
            block_index: c.block_index,
            chain_index,
            lambda,
            dim: c.len(),
            key: tv_bound(lambda),
            class_tv: class_tv(d, c.eig_index, c.block_index)?,
        });
    }
    comps.sort_by(|x, y| {
        x.key
            .total_cmp(&y.key)
            .then(x.lambda.re.total_cmp(&y.lambda.re))
            .then(x.lambda.im.total_cmp(&y.lambda.im))
            .then(y.dim.cmp(&x.dim))
            .then(x.block_index.cmp(&y.block_index))
    });
    for (pos, c) in comps.iter_mut().enumerate() {
        c.rank = pos + 1;
    }
    Ok(FrequencyOrdering { components: comps })
}
