//! Jordan decomposition of (possibly defective) square matrices.
//!
//! `jordan_decompose` factors a shift operator as `A = V J V^{-1}` where `J`
//! is the Jordan normal form and the columns of `V` are generalized
//! eigenvector chains. Eigenvalues are located with a numeric eigensolver,
//! clustered, and — whenever the matrix has exact rational entries and a
//! cluster sits near a small rational — re-verified in exact arithmetic, in
//! which case the kernel structure and chains for that eigenvalue are
//! computed exactly. Eigenvalues that resist exact verification (irrational
//! ones, or inputs that are not rational) fall back to a numeric staircase
//! construction.
//!
//! Chains are scaled so each chain block has unit induced 1-norm, which is
//! the normalization the total-variation formulas assume.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::exact::{rationalize_dense, ExactMatrix};
use crate::linalg;
use crate::scalar::{rational_to_f64, ExactScalar};
use crate::tolerance::ToleranceConfig;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::Zero;
use num_complex::Complex64;
use std::ops::Range;

/// Auto-rationalization is only attempted up to this size; exact elimination
/// above it costs more than it is worth for a convenience path. Explicit
/// exact input (`jordan_decompose_exact`) has no such cap.
const EXACT_AUTO_LIMIT: usize = 24;

/// Largest denominator considered when snapping a numeric eigenvalue
/// estimate to a nearby rational candidate. Candidates are always verified
/// in exact arithmetic, so a miss here only means the numeric path is used.
const SNAP_MAX_DEN: u64 = 64;

/// Largest eigenvector-basis condition number accepted without trying a
/// wider clustering radius. A spurious "all simple" reading of a defective
/// eigenvalue produces nearly parallel eigenvectors with condition numbers
/// several orders of magnitude above this; a correct chain basis stays far
/// below it.
const BASIS_CONDITION_ACCEPT: f64 = 1e6;

// ───────────────────────── public types ─────────────────────────

/// One distinct eigenvalue with its multiplicity structure.
#[derive(Clone, Debug)]
pub struct Eigenvalue {
    pub value: Complex64,
    /// Exact value when the eigenvalue was verified in rational arithmetic.
    pub exact: Option<ExactScalar>,
    pub algebraic: usize,
    pub geometric: usize,
    /// Dimensions of the nested kernels `Ker (A - lambda I)^p`, `p = 1..=s`,
    /// where `s` is the largest Jordan block size. Strictly increasing, with
    /// final entry equal to the algebraic multiplicity.
    pub kernel_dims: Vec<usize>,
    /// Jordan block sizes for this eigenvalue, in decreasing order; the
    /// conjugate partition of the kernel-dimension increments.
    pub block_sizes: Vec<usize>,
}

/// A single Jordan block `(lambda, size)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: Complex64,
    pub size: usize,
}

/// The Jordan normal form as an ordered list of blocks.
///
/// Blocks follow the canonical ordering used throughout: eigenvalues sorted
/// by `(|1 - lambda|, Re, Im)` ascending, block sizes decreasing within an
/// eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanForm {
    pub blocks: Vec<JordanBlock>,
}

impl JordanForm {
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// Assemble the block-diagonal matrix (ones on each block superdiagonal).
    pub fn matrix(&self) -> DenseMatrix {
        let n = self.dimension();
        let mut j = DenseMatrix::zeros(n, n);
        let mut c = 0;
        for b in &self.blocks {
            for k in 0..b.size {
                j[(c + k, c + k)] = b.eigenvalue;
                if k + 1 < b.size {
                    j[(c + k, c + k + 1)] = Complex64::new(1.0, 0.0);
                }
            }
            c += b.size;
        }
        j
    }
}

/// A Jordan chain `v_1, ..., v_r` with `A v_1 = lambda v_1` and
/// `A v_k = lambda v_k + v_{k-1}`.
#[derive(Clone, Debug)]
pub struct JordanChain {
    /// Index into `JordanDecomposition::eigenvalues`.
    pub eig_index: usize,
    /// Position among this eigenvalue's chains (by decreasing length).
    pub block_index: usize,
    /// Chain vectors `v_1..v_r` (eigenvector first).
    pub vectors: Vec<Vec<Complex64>>,
    /// Exact chain columns when available. Spans the same subspace as
    /// `vectors`; equals it entrywise when the exact chain is real (unit
    /// normalization is then rational), otherwise the exact copy keeps its
    /// raw scale.
    pub exact: Option<ExactMatrix>,
}

impl JordanChain {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Chain vectors as the columns of an `n x r` matrix.
    pub fn matrix(&self) -> DenseMatrix {
        let n = self.vectors[0].len();
        DenseMatrix::from_fn(n, self.vectors.len(), |i, j| self.vectors[j][i])
    }
}

/// Full decomposition `A = V J V^{-1}` plus the dual basis `W = V^{-H}`.
#[derive(Clone, Debug)]
pub struct JordanDecomposition {
    /// The decomposed shift operator.
    pub shift: DenseMatrix,
    pub shift_exact: Option<ExactMatrix>,
    pub eigenvalues: Vec<Eigenvalue>,
    pub chains: Vec<JordanChain>,
    /// Generalized eigenvector basis (chain blocks side by side).
    pub v: DenseMatrix,
    /// Dual basis `V^{-H}`; satisfies `W^H V = I`.
    pub w: DenseMatrix,
    /// Jordan form matrix in the same column order as `v`.
    pub j: DenseMatrix,
    /// Exact counterparts, present only when every chain is exact.
    /// `v_exact` may differ from `v` by a positive scale per chain when a
    /// chain's unit normalization is irrational.
    pub v_exact: Option<ExactMatrix>,
    pub w_exact: Option<ExactMatrix>,
    col_start: Vec<usize>,
    pub tolerances: ToleranceConfig,
}

impl JordanDecomposition {
    pub fn dimension(&self) -> usize {
        self.v.rows()
    }

    pub fn chain_count(&self) -> usize {
        self.chains.len()
    }

    /// Column range of chain `idx` inside `v`/`w`/`j`.
    pub fn col_range(&self, idx: usize) -> Range<usize> {
        let start = self.col_start[idx];
        start..start + self.chains[idx].len()
    }

    /// The `n x r` eigenvector block for chain `idx`.
    pub fn block_matrix(&self, idx: usize) -> DenseMatrix {
        self.v.col_block(self.col_range(idx))
    }

    /// The matching dual block (`W` columns).
    pub fn dual_block_matrix(&self, idx: usize) -> DenseMatrix {
        self.w.col_block(self.col_range(idx))
    }

    pub fn form(&self) -> JordanForm {
        let mut blocks = Vec::with_capacity(self.chains.len());
        for c in &self.chains {
            blocks.push(JordanBlock {
                eigenvalue: self.eigenvalues[c.eig_index].value,
                size: c.len(),
            });
        }
        JordanForm { blocks }
    }

    /// `V J V^{-1}` recomputed from the stored factors.
    pub fn reconstruct(&self) -> Result<DenseMatrix> {
        let v_inv = linalg::inverse(&self.v, &self.tolerances)?;
        self.v.matmul(&self.j)?.matmul(&v_inv)
    }

    /// `‖A - V J V^{-1}‖₁`.
    pub fn reconstruction_error(&self) -> Result<f64> {
        Ok(self.shift.sub(&self.reconstruct()?)?.induced_l1_norm())
    }

    /// Exact Jordan form matrix, when every eigenvalue is exact.
    pub fn j_exact(&self) -> Option<ExactMatrix> {
        let n = self.dimension();
        let mut j = ExactMatrix::zeros(n, n);
        for (idx, c) in self.chains.iter().enumerate() {
            let lam = self.eigenvalues[c.eig_index].exact.clone()?;
            let start = self.col_start[idx];
            for k in 0..c.len() {
                j[(start + k, start + k)] = lam.clone();
                if k + 1 < c.len() {
                    j[(start + k, start + k + 1)] = ExactScalar::one();
                }
            }
        }
        Some(j)
    }

    /// Global chain index for the block addressed as (eigenvalue `i`,
    /// block `j` within that eigenvalue).
    pub fn chain_index(&self, i: usize, j: usize) -> Result<usize> {
        self.chains
            .iter()
            .position(|c| c.eig_index == i && c.block_index == j)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "no spectral component ({i},{j}); the decomposition has {} eigenvalues and {} blocks",
                    self.eigenvalues.len(),
                    self.chains.len()
                ))
            })
    }

    /// True when the eigenvector matrix is block diagonal with respect to
    /// the canonical block partition (rows and columns split identically by
    /// chain lengths). Such shifts carry the canonical-basis structure their
    /// Jordan form has.
    pub fn v_is_block_diagonal(&self) -> bool {
        let thresh = self.tolerances.verify_tol * self.v.max_abs().max(1.0);
        for (idx, _) in self.chains.iter().enumerate() {
            let range = self.col_range(idx);
            for col in range.clone() {
                for row in 0..self.v.rows() {
                    if !range.contains(&row) && self.v[(row, col)].norm() > thresh {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Rebuild the decomposition with chain `idx`'s columns replaced.
    ///
    /// The new basis keeps the same Jordan form, so the rebuilt operator is
    /// `A' = V' J V'^{-1}` — equal to the original exactly when the new
    /// columns span the same invariant subspace, and a different operator
    /// otherwise. Replacement columns are taken as given (not renormalized).
    pub fn with_block_columns(
        &self,
        idx: usize,
        cols: &DenseMatrix,
    ) -> Result<JordanDecomposition> {
        if idx >= self.chains.len() {
            return Err(Error::InvalidComponent {
                index: idx,
                count: self.chains.len(),
            });
        }
        let r = self.chains[idx].len();
        let n = self.dimension();
        if cols.rows() != n || cols.cols() != r {
            return Err(Error::ShapeMismatch {
                op: "with_block_columns",
                lhs_rows: n,
                lhs_cols: r,
                rhs_rows: cols.rows(),
                rhs_cols: cols.cols(),
            });
        }
        let mut v2 = self.v.clone();
        v2.set_col_block(self.col_start[idx], cols);
        let v2_inv = linalg::inverse(&v2, &self.tolerances).map_err(|_| {
            Error::InvalidParameter(
                "replacement columns make the eigenvector basis singular".into(),
            )
        })?;
        let shift2 = v2.matmul(&self.j)?.matmul(&v2_inv)?;
        let w2 = v2_inv.conj_transpose();

        let cols_exact = rationalize_dense(cols, 4096);
        let mut chains = self.chains.clone();
        chains[idx].vectors = (0..r).map(|k| cols.col(k)).collect();
        chains[idx].exact = cols_exact.clone();

        // Best-effort exact rebuild when the original decomposition and the
        // replacement columns are both exact.
        let mut v2e = None;
        let mut w2e = None;
        let mut shift2e = None;
        if let (Some(ve), Some(ce), Some(je)) = (&self.v_exact, &cols_exact, self.j_exact()) {
            let mut m = ve.clone();
            m.set_col_block(self.col_start[idx], ce);
            if let Ok(m_inv) = m.inverse() {
                shift2e = Some(m.matmul(&je)?.matmul(&m_inv)?);
                w2e = Some(m_inv.conj_transpose());
                v2e = Some(m);
            }
        }

        Ok(JordanDecomposition {
            shift: shift2,
            shift_exact: shift2e,
            eigenvalues: self.eigenvalues.clone(),
            chains,
            v: v2,
            w: w2,
            j: self.j.clone(),
            v_exact: v2e,
            w_exact: w2e,
            col_start: self.col_start.clone(),
            tolerances: self.tolerances,
        })
    }

    /// Rebuild with chain `idx`'s block basis right-multiplied by `y`
    /// (`r x r`, invertible). A change of basis inside the same subspace
    /// leaves every spectral projector — and hence the operator — unchanged.
    pub fn with_block_basis(&self, idx: usize, y: &DenseMatrix) -> Result<JordanDecomposition> {
        if idx >= self.chains.len() {
            return Err(Error::InvalidComponent {
                index: idx,
                count: self.chains.len(),
            });
        }
        let r = self.chains[idx].len();
        if y.rows() != r || y.cols() != r {
            return Err(Error::ShapeMismatch {
                op: "with_block_basis",
                lhs_rows: r,
                lhs_cols: r,
                rhs_rows: y.rows(),
                rhs_cols: y.cols(),
            });
        }
        let cols = self.block_matrix(idx).matmul(y)?;
        self.with_block_columns(idx, &cols)
    }
}

/// Dual basis `V^{-H}` of an invertible matrix.
pub fn dual_basis(v: &DenseMatrix, tol: &ToleranceConfig) -> Result<DenseMatrix> {
    Ok(linalg::inverse(v, tol)?.conj_transpose())
}

// ───────────────────────── entry points ─────────────────────────

/// Decompose a float matrix. Rational structure is detected automatically
/// for matrices up to size 24 whose entries are exactly representable
/// rationals; otherwise the numeric path is used throughout.
pub fn jordan_decompose(a: &DenseMatrix, tol: &ToleranceConfig) -> Result<JordanDecomposition> {
    let n = a.require_square()?;
    tol.validate()?;
    let exact = if n <= EXACT_AUTO_LIMIT {
        rationalize_dense(a, 4096)
    } else {
        None
    };
    decompose_impl(a.clone(), exact, tol)
}

/// Decompose an exact rational matrix; every rational eigenvalue gets exact
/// structural analysis regardless of size.
pub fn jordan_decompose_exact(
    a: &ExactMatrix,
    tol: &ToleranceConfig,
) -> Result<JordanDecomposition> {
    a.require_square()?;
    tol.validate()?;
    decompose_impl(a.to_dense(), Some(a.clone()), tol)
}

/// Decompose with the numeric path only (no exact verification). Mainly
/// useful for cross-checking the two pipelines against each other.
pub fn jordan_decompose_numeric(
    a: &DenseMatrix,
    tol: &ToleranceConfig,
) -> Result<JordanDecomposition> {
    a.require_square()?;
    tol.validate()?;
    decompose_impl(a.clone(), None, tol)
}

/// Distinct eigenvalues with multiplicity structure, canonically ordered.
pub fn distinct_eigenvalues(a: &DenseMatrix, tol: &ToleranceConfig) -> Result<Vec<Eigenvalue>> {
    Ok(jordan_decompose(a, tol)?.eigenvalues)
}

/// Nested kernel dimensions `dim Ker (A - lambda I)^p` for an eigenvalue of
/// `A` within clustering tolerance of `lambda`.
pub fn weyr_characteristic(
    a: &DenseMatrix,
    lambda: Complex64,
    tol: &ToleranceConfig,
) -> Result<Vec<usize>> {
    let d = jordan_decompose(a, tol)?;
    Ok(find_eigenvalue(&d, lambda)?.kernel_dims.clone())
}

/// Jordan chains for the eigenvalue of `A` nearest `lambda` (within
/// clustering tolerance).
pub fn jordan_chains(
    a: &DenseMatrix,
    lambda: Complex64,
    tol: &ToleranceConfig,
) -> Result<Vec<JordanChain>> {
    let d = jordan_decompose(a, tol)?;
    let idx = find_eigenvalue_index(&d, lambda)?;
    Ok(d.chains
        .iter()
        .filter(|c| c.eig_index == idx)
        .cloned()
        .collect())
}

fn find_eigenvalue_index(d: &JordanDecomposition, lambda: Complex64) -> Result<usize> {
    let rho = d
        .eigenvalues
        .iter()
        .map(|e| e.value.norm())
        .fold(0.0, f64::max);
    let radius = d.tolerances.eig_cluster_tol * rho.max(1.0);
    let best = d
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| (x.value - lambda).norm().total_cmp(&(y.value - lambda).norm()));
    match best {
        Some((i, e)) if (e.value - lambda).norm() <= radius.max(1e-6 * rho.max(1.0)) => Ok(i),
        _ => Err(Error::InvalidParameter(format!(
            "{lambda} is not an eigenvalue of the matrix (within clustering tolerance)"
        ))),
    }
}

fn find_eigenvalue(d: &JordanDecomposition, lambda: Complex64) -> Result<&Eigenvalue> {
    Ok(&d.eigenvalues[find_eigenvalue_index(d, lambda)?])
}

// ───────────────────────── pipeline ─────────────────────────

struct RawChain {
    vectors: Vec<Vec<Complex64>>,
    exact: Option<ExactMatrix>,
}

struct EigenClass {
    value: Complex64,
    exact: Option<ExactScalar>,
    kernel_dims: Vec<usize>,
    chains: Vec<RawChain>,
    /// Scatter of the numeric eigenvalue estimates this class absorbed;
    /// zero on the exact path. Bounds the achievable reconstruction
    /// accuracy.
    spread: f64,
}

impl EigenClass {
    fn algebraic(&self) -> usize {
        *self.kernel_dims.last().unwrap()
    }
}

fn decompose_impl(
    a: DenseMatrix,
    a_exact: Option<ExactMatrix>,
    tol: &ToleranceConfig,
) -> Result<JordanDecomposition> {
    let n = a.rows();
    if n == 0 {
        return Err(Error::NotSquare { rows: 0, cols: 0 });
    }
    let estimates = linalg::eigenvalues(&a)?;
    let rho = estimates.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = rho.max(1.0);
    // A defective eigenvalue of chain length r scatters its computed
    // copies by roughly (backward error)^(1/r) — far beyond the base
    // clustering radius. Escalate the radius until a fully verified
    // decomposition emerges; every candidate still has to pass the
    // multiplicity, monotonicity, and reconstruction checks, so an
    // over-eager merge cannot slip through quietly.
    //
    // A narrow radius can also succeed with the *wrong* reading: the
    // scattered copies of a defective eigenvalue act as simple eigenvalues
    // of the rounded matrix, and the resulting eigenvector basis is nearly
    // rank deficient. Such a basis passes the residual check yet has an
    // enormous condition number, so a candidate is accepted outright only
    // when its basis is reasonably conditioned (or exact); otherwise wider
    // radii are tried and the best-conditioned candidate wins.
    let mut last: Option<Error> = None;
    let mut fallback: Option<(f64, JordanDecomposition)> = None;
    for mult in [1.0, 1e2, 1e4, 1e6] {
        let radius = (tol.eig_cluster_tol * mult).min(0.02) * scale;
        match decompose_attempt(&a, &a_exact, &estimates, radius, scale, tol) {
            Ok(d) => {
                if d.v_exact.is_some() {
                    return Ok(d);
                }
                let kappa = linalg::condition_number(&d.v).unwrap_or(f64::INFINITY);
                if kappa <= BASIS_CONDITION_ACCEPT {
                    return Ok(d);
                }
                if fallback.as_ref().map_or(true, |(k, _)| kappa < *k) {
                    fallback = Some((kappa, d));
                }
            }
            Err(e) => last = Some(e),
        }
    }
    if let Some((_, d)) = fallback {
        return Ok(d);
    }
    Err(last.expect("at least one clustering attempt ran"))
}

fn decompose_attempt(
    a: &DenseMatrix,
    a_exact: &Option<ExactMatrix>,
    estimates: &[Complex64],
    radius: f64,
    scale: f64,
    tol: &ToleranceConfig,
) -> Result<JordanDecomposition> {
    let n = a.rows();
    let clusters = single_linkage_clusters(estimates, radius);

    // Snap each cluster centroid to a small rational and verify it exactly;
    // clusters that verify to the same rational are merged.
    struct Group {
        centroid: Complex64,
        count: usize,
        spread: f64,
        exact: Option<ExactScalar>,
    }
    let mut groups: Vec<Group> = Vec::new();
    for cl in &clusters {
        let centroid = cl.iter().copied().sum::<Complex64>() / cl.len() as f64;
        let spread = cl
            .iter()
            .map(|z| (z - centroid).norm())
            .fold(0.0, f64::max);
        let exact = a_exact
            .as_ref()
            .and_then(|ae| snap_and_verify(ae, centroid, 0.02 * scale));
        if let Some(lam) = &exact {
            if let Some(g) = groups.iter_mut().find(|g| g.exact.as_ref() == Some(lam)) {
                g.count += cl.len();
                g.spread = g.spread.max(spread);
                continue;
            }
        }
        groups.push(Group {
            centroid,
            count: cl.len(),
            spread,
            exact,
        });
    }

    let mut classes = Vec::with_capacity(groups.len());
    for g in groups {
        let class = match (&a_exact, g.exact) {
            (Some(ae), Some(lam)) => match analyze_exact(ae, &lam)? {
                Some(c) => c,
                // Verification said this is an eigenvalue, so an empty exact
                // kernel cannot happen; keep a numeric fallback regardless.
                None => analyze_numeric(a, g.centroid, g.count, g.spread, tol)?,
            },
            _ => analyze_numeric(a, g.centroid, g.count, g.spread, tol)?,
        };
        classes.push(class);
    }

    let total: usize = classes.iter().map(|c| c.algebraic()).sum();
    if total != n {
        return Err(Error::DecompositionFailed(format!(
            "algebraic multiplicities sum to {total}, expected {n}; \
             adjust the eigenvalue clustering tolerance"
        )));
    }

    // Canonical order: low-frequency eigenvalues first.
    classes.sort_by(|x, y| {
        let kx = canonical_eig_key(x.value);
        let ky = canonical_eig_key(y.value);
        kx.0.total_cmp(&ky.0)
            .then(kx.1.total_cmp(&ky.1))
            .then(kx.2.total_cmp(&ky.2))
    });
    for c in &mut classes {
        c.chains.sort_by(|p, q| q.vectors.len().cmp(&p.vectors.len()));
    }

    assemble(a.clone(), a_exact.clone(), classes, tol)
}

fn canonical_eig_key(z: Complex64) -> (f64, f64, f64) {
    ((Complex64::new(1.0, 0.0) - z).norm(), z.re, z.im)
}

/// Single-linkage clustering of eigenvalue estimates.
fn single_linkage_clusters(evs: &[Complex64], radius: f64) -> Vec<Vec<Complex64>> {
    let k = evs.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..k {
        for j in i + 1..k {
            if (evs[i] - evs[j]).norm() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut out: Vec<Vec<Complex64>> = vec![Vec::new(); k];
    for i in 0..k {
        let r = find(&mut parent, i);
        out[r].push(evs[i]);
    }
    out.retain(|c| !c.is_empty());
    out
}

// ───────────────────────── rational snapping ─────────────────────────

/// Rationals `p/q` with `q <= max_den` within `dist` of `x`, smallest
/// denominator first (at most three distinct values).
fn rational_candidates(x: f64, dist: f64, max_den: u64) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = Vec::new();
    for q in 1..=max_den {
        let p = (x * q as f64).round();
        if !p.is_finite() || p.abs() > 1e15 {
            continue;
        }
        if (p / q as f64 - x).abs() <= dist {
            let r = BigRational::new(BigInt::from(p as i64), BigInt::from(q));
            if !out.contains(&r) {
                out.push(r);
                if out.len() == 3 {
                    break;
                }
            }
        }
    }
    out
}

/// Snap a centroid to a nearby Gaussian rational and keep it only if the
/// shifted matrix is exactly singular. Verification is exact, so a wrong
/// snap is rejected rather than silently accepted.
fn snap_and_verify(ae: &ExactMatrix, centroid: Complex64, dist: f64) -> Option<ExactScalar> {
    let n = ae.rows();
    let res = rational_candidates(centroid.re, dist, SNAP_MAX_DEN);
    let ims = rational_candidates(centroid.im, dist, SNAP_MAX_DEN);
    let mut pairs: Vec<(BigRational, BigRational)> = Vec::new();
    for re in &res {
        for im in &ims {
            pairs.push((re.clone(), im.clone()));
        }
    }
    // Prefer simple candidates: smallest denominators, then closest.
    pairs.sort_by_key(|(re, im)| {
        (
            re.denom().clone() + im.denom().clone(),
            // distance as a coarse integer key to keep ordering total
            ((rational_to_f64(re) - centroid.re).hypot(rational_to_f64(im) - centroid.im)
                / dist.max(f64::MIN_POSITIVE)
                * 1e6) as u64,
        )
    });
    for (re, im) in pairs.into_iter().take(4) {
        let cand = ExactScalar::new(re, im);
        if let Ok(shifted) = ae.shifted(&cand) {
            if shifted.rank() < n {
                return Some(cand);
            }
        }
    }
    None
}

// ───────────────────────── kernel canonicalization ─────────────────────────
//
// Chain representatives are only determined up to a choice of basis inside
// each kernel, so the exact and numeric analysis paths would otherwise pick
// different (equally valid) chains. Reducing every kernel basis to the
// reduced column echelon form of its span — the unique basis with identity
// structure on the earliest independent coordinates — makes both paths
// select the same representatives, which keeps their chain spans comparable.

/// Reduced column echelon basis of the span of `basis` (exact arithmetic).
fn canonical_columns_exact(basis: &ExactMatrix) -> ExactMatrix {
    if basis.cols() == 0 {
        return basis.clone();
    }
    let (r, pivots) = basis.transpose().rref();
    if pivots.len() == basis.cols() {
        return r.transpose();
    }
    // A dependent "basis" should not reach this point; fall back unchanged
    // rather than silently dropping a column.
    basis.clone()
}

/// Reduced column echelon basis of the span of `basis`, with pivots taken
/// only where an entry clears `piv_rel` relative to the largest entry of
/// the input (so noise never becomes a pivot).
fn canonical_columns_numeric(basis: &DenseMatrix, piv_rel: f64) -> DenseMatrix {
    let n = basis.rows();
    let d = basis.cols();
    if d == 0 {
        return basis.clone();
    }
    // Row-reduce the d x n transposed copy.
    let mut m: Vec<Vec<Complex64>> = (0..d).map(|j| basis.col(j)).collect();
    let floor = piv_rel * basis.max_abs().max(f64::MIN_POSITIVE);
    let mut row = 0;
    for col in 0..n {
        if row == d {
            break;
        }
        let (mut best, mut best_mag) = (row, 0.0f64);
        for r in row..d {
            let mag = m[r][col].norm();
            if mag > best_mag {
                best = r;
                best_mag = mag;
            }
        }
        if best_mag <= floor {
            continue;
        }
        m.swap(row, best);
        let p = m[row][col];
        for x in m[row].iter_mut() {
            *x /= p;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = other[col];
            if f.norm() == 0.0 {
                continue;
            }
            for (x, pv) in other.iter_mut().zip(&pivot_row) {
                *x -= f * pv;
            }
        }
        row += 1;
    }
    DenseMatrix::from_fn(n, d, |i, j| m[j][i])
}

// ───────────────────────── exact structural analysis ─────────────────────────

fn matrix_from_exact_cols(n: usize, cols: &[Vec<ExactScalar>]) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = c[i].clone();
        }
    }
    m
}

/// Exact kernel filtration and staircase chain construction at a verified
/// rational eigenvalue. Returns `None` if the kernel is empty (not an
/// eigenvalue after all).
fn analyze_exact(ae: &ExactMatrix, lambda: &ExactScalar) -> Result<Option<EigenClass>> {
    let n = ae.rows();
    let m = ae.shifted(lambda)?;
    let mut kernels: Vec<ExactMatrix> = Vec::new();
    let mut dims: Vec<usize> = Vec::new();
    let mut mp = ExactMatrix::identity(n);
    loop {
        mp = mp.matmul(&m)?;
        let k = mp.kernel_basis();
        let d = k.cols();
        if d == 0 {
            return Ok(None);
        }
        if dims.last() == Some(&d) {
            break;
        }
        dims.push(d);
        kernels.push(canonical_columns_exact(&k));
        if dims.len() > n {
            return Err(Error::DecompositionFailed(
                "exact kernel filtration failed to stabilize".into(),
            ));
        }
    }
    let s = dims.len();
    let alg = dims[s - 1];
    let d_at = |p: usize| -> usize {
        if p == 0 {
            0
        } else if p > s {
            alg
        } else {
            dims[p - 1]
        }
    };

    let mut chains: Vec<Vec<Vec<ExactScalar>>> = Vec::new();
    for p in (1..=s).rev() {
        let new_tops = (d_at(p) - d_at(p - 1)) - (d_at(p + 1) - d_at(p));
        if new_tops == 0 {
            continue;
        }
        // Forbidden span: the lower kernel plus the level-p vectors of the
        // chains already built (all longer than p).
        let mut forb: Vec<Vec<ExactScalar>> = Vec::new();
        if p >= 2 {
            for j in 0..kernels[p - 2].cols() {
                forb.push(kernels[p - 2].col(j));
            }
        }
        for ch in &chains {
            debug_assert!(ch.len() > p);
            forb.push(ch[p - 1].clone());
        }
        let mut base_rank = matrix_from_exact_cols(n, &forb).rank();
        let mut accepted = 0;
        for j in 0..kernels[p - 1].cols() {
            if accepted == new_tops {
                break;
            }
            let cand = kernels[p - 1].col(j);
            let mut test_cols = forb.clone();
            test_cols.push(cand.clone());
            if matrix_from_exact_cols(n, &test_cols).rank() > base_rank {
                // Build the chain by repeated application of (A - lambda I).
                let mut vecs = vec![cand.clone()];
                let mut cur = cand.clone();
                for _ in 1..p {
                    cur = m.mul_vec(&cur)?;
                    vecs.push(cur.clone());
                }
                vecs.reverse();
                debug_assert!(m
                    .mul_vec(&vecs[0])
                    .map(|r| r.iter().all(|z| z.is_zero()))
                    .unwrap_or(false));
                chains.push(vecs);
                forb.push(cand);
                base_rank += 1;
                accepted += 1;
            }
        }
        if accepted != new_tops {
            return Err(Error::DecompositionFailed(format!(
                "exact staircase found {accepted} of {new_tops} chain tops at level {p}"
            )));
        }
    }

    let raw = chains
        .into_iter()
        .map(|vecs| {
            let exact = matrix_from_exact_cols(n, &vecs);
            RawChain {
                vectors: (0..exact.cols()).map(|j| {
                    exact.col(j).iter().map(|z| z.to_complex()).collect()
                }).collect(),
                exact: Some(exact),
            }
        })
        .collect();

    Ok(Some(EigenClass {
        value: lambda.to_complex(),
        exact: Some(lambda.clone()),
        kernel_dims: dims,
        chains: raw,
        spread: 0.0,
    }))
}

// ───────────────────────── numeric structural analysis ─────────────────────────

fn cdot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * *b).sum()
}

fn cnorm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Remove the components of `v` along each of the orthonormal `basis`
/// vectors (two Gram-Schmidt passes for stability).
fn project_out(basis: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for u in basis {
            let c = cdot(u, &r);
            for (ri, ui) in r.iter_mut().zip(u) {
                *ri -= c * ui;
            }
        }
    }
    r
}

/// Numeric staircase at an eigenvalue estimate. Kernel ranks are decided at
/// the clustering tolerance rather than the (much tighter) rank tolerance:
/// kernel directions of a defective eigenvalue are only resolved to the
/// accuracy with which the eigenvalue itself is known.
fn analyze_numeric(
    a: &DenseMatrix,
    value: Complex64,
    algebraic_hint: usize,
    spread: f64,
    tol: &ToleranceConfig,
) -> Result<EigenClass> {
    let n = a.rows();
    let m = a.shifted(value)?;
    // Kernel resolution is limited by how accurately the eigenvalue is
    // known: the shifted matrix keeps singular values of the order of the
    // estimate scatter in exactly the directions the chains live in.
    let norm1 = m.induced_l1_norm().max(1.0);
    let spread_rel = 3.0 * (n as f64).sqrt() * spread / norm1;
    let rank_rel = tol
        .rank_tol
        .max(tol.eig_cluster_tol)
        .max(spread_rel)
        .min(0.1);
    let struct_tol = tol.with_rank_tol(rank_rel);
    let mut kernels: Vec<DenseMatrix> = Vec::new();
    let mut dims: Vec<usize> = Vec::new();
    let mut mp = DenseMatrix::identity(n);
    loop {
        mp = mp.matmul(&m)?;
        // When the whole spectrum sits in one cluster the powers of the
        // shifted matrix eventually fall below the noise attributable to
        // the eigenvalue estimate itself. The rank test is relative to the
        // power's own largest singular value, so pure noise would still
        // read as rank one; compare against the accumulated floor instead
        // and treat anything below it as the zero matrix (full kernel).
        let power = dims.len() as i32 + 1;
        let noise_floor = n as f64 * rank_rel * norm1.powi(power);
        let (_, k) = if mp.induced_l1_norm() <= noise_floor {
            (0, DenseMatrix::identity(n))
        } else {
            linalg::rank_and_kernel(&mp, &struct_tol)?
        };
        let d = k.cols();
        if dims.last() == Some(&d) {
            break;
        }
        if d == 0 {
            return Err(Error::IllConditionedStructure(format!(
                "no kernel directions found at eigenvalue estimate {value}"
            )));
        }
        if d < *dims.last().unwrap_or(&0) {
            return Err(Error::IllConditionedStructure(
                "kernel dimensions decreased along the power filtration".into(),
            ));
        }
        dims.push(d);
        kernels.push(canonical_columns_numeric(&k, (100.0 * rank_rel).min(0.2)));
        if d >= algebraic_hint || dims.len() >= n {
            // Dimensions cannot legitimately grow further; confirm stability
            // only when the hint has not been reached.
            break;
        }
    }
    let s = dims.len();
    let alg = dims[s - 1];
    // Weyr increments must be non-increasing for a genuine Jordan structure.
    let mut prev_inc = usize::MAX;
    for p in 0..s {
        let inc = dims[p] - if p == 0 { 0 } else { dims[p - 1] };
        if inc > prev_inc {
            return Err(Error::IllConditionedStructure(format!(
                "kernel dimension increments {:?} are not monotone; the rank \
                 decisions near eigenvalue {value} are unreliable",
                dims
            )));
        }
        prev_inc = inc;
    }
    if alg != algebraic_hint {
        return Err(Error::IllConditionedStructure(format!(
            "eigenvalue {value}: clustered multiplicity {algebraic_hint} but kernel \
             filtration stabilized at {alg}; adjust tolerances"
        )));
    }
    let d_at = |p: usize| -> usize {
        if p == 0 {
            0
        } else if p > s {
            alg
        } else {
            dims[p - 1]
        }
    };

    let mut chains: Vec<Vec<Vec<Complex64>>> = Vec::new();
    for p in (1..=s).rev() {
        let new_tops = (d_at(p) - d_at(p - 1)) - (d_at(p + 1) - d_at(p));
        if new_tops == 0 {
            continue;
        }
        // Orthonormal basis of the forbidden span.
        let mut forb: Vec<Vec<Complex64>> = Vec::new();
        let push_orthonormal = |forb: &mut Vec<Vec<Complex64>>, v: &[Complex64]| {
            let r = project_out(forb, v);
            let nr = cnorm(&r);
            if nr > 1e-12 {
                forb.push(r.iter().map(|z| *z / nr).collect());
            }
        };
        if p >= 2 {
            for j in 0..kernels[p - 2].cols() {
                push_orthonormal(&mut forb, &kernels[p - 2].col(j));
            }
        }
        for ch in &chains {
            push_orthonormal(&mut forb, &ch[p - 1]);
        }
        // Scan the canonical kernel columns in order and take the first
        // ones sufficiently independent of the forbidden span, mirroring
        // the selection rule of the exact path. Chains grow from the raw
        // canonical candidates (not their projections) so both paths
        // produce the same representatives.
        let indep_floor = (10.0 * rank_rel).max(1e-8);
        let mut accepted = 0;
        for j in 0..kernels[p - 1].cols() {
            if accepted == new_tops {
                break;
            }
            let cand = kernels[p - 1].col(j);
            let scale_c = cnorm(&cand).max(1.0);
            let r = project_out(&forb, &cand);
            if cnorm(&r) <= indep_floor * scale_c {
                continue;
            }
            let mut vecs = vec![cand.clone()];
            let mut cur = cand.clone();
            for _ in 1..p {
                cur = m.mul_vec(&cur)?;
                vecs.push(cur.clone());
            }
            vecs.reverse();
            // Sanity: the bottom vector must be annihilated to within the
            // accuracy of the kernel computation itself.
            let residual = cnorm(&m.mul_vec(&vecs[0])?);
            let allowed = 100.0 * rank_rel * norm1 * scale_c;
            if residual > allowed {
                return Err(Error::IllConditionedStructure(format!(
                    "chain at eigenvalue {value} fails the eigenvector equation \
                     (residual {residual:.2e}, allowed {allowed:.2e})"
                )));
            }
            push_orthonormal(&mut forb, &cand);
            chains.push(vecs);
            accepted += 1;
        }
        if accepted != new_tops {
            return Err(Error::IllConditionedStructure(format!(
                "numeric staircase found {accepted} of {new_tops} chain tops at level {p}"
            )));
        }
    }

    Ok(EigenClass {
        value,
        exact: None,
        kernel_dims: dims,
        chains: chains
            .into_iter()
            .map(|vectors| RawChain {
                vectors,
                exact: None,
            })
            .collect(),
        spread,
    })
}

// ───────────────────────── assembly ─────────────────────────

fn chain_l1_norm(vectors: &[Vec<Complex64>]) -> f64 {
    vectors
        .iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn assemble(
    a: DenseMatrix,
    a_exact: Option<ExactMatrix>,
    classes: Vec<EigenClass>,
    tol: &ToleranceConfig,
) -> Result<JordanDecomposition> {
    let n = a.rows();
    let max_spread = classes.iter().map(|c| c.spread).fold(0.0, f64::max);
    let mut eigenvalues = Vec::with_capacity(classes.len());
    let mut chains: Vec<JordanChain> = Vec::new();
    let mut col_start = Vec::new();
    let mut v = DenseMatrix::zeros(n, n);
    let mut col = 0;

    for (eig_index, class) in classes.into_iter().enumerate() {
        let block_sizes: Vec<usize> = class.chains.iter().map(|c| c.vectors.len()).collect();
        eigenvalues.push(Eigenvalue {
            value: class.value,
            exact: class.exact.clone(),
            algebraic: class.algebraic(),
            geometric: class.kernel_dims[0],
            kernel_dims: class.kernel_dims.clone(),
            block_sizes: block_sizes.clone(),
        });
        for (block_index, raw) in class.chains.into_iter().enumerate() {
            // Unit induced-1-norm normalization; kept exact when the chain
            // is real-rational (the norm is then rational too).
            let (vectors, exact) = match &raw.exact {
                Some(e) if e.is_real() => {
                    let norm = e
                        .induced_l1_norm_rational()
                        .expect("real matrix has rational 1-norm");
                    if norm.is_zero() {
                        return Err(Error::DecompositionFailed(
                            "zero chain vector encountered".into(),
                        ));
                    }
                    let scaled = e.scale(&ExactScalar::from_re(norm.recip()));
                    let dense = scaled.to_dense();
                    let vecs = (0..dense.cols()).map(|j| dense.col(j)).collect();
                    (vecs, Some(scaled))
                }
                _ => {
                    let norm = chain_l1_norm(&raw.vectors);
                    if norm <= f64::MIN_POSITIVE {
                        return Err(Error::DecompositionFailed(
                            "zero chain vector encountered".into(),
                        ));
                    }
                    let vecs: Vec<Vec<Complex64>> = raw
                        .vectors
                        .iter()
                        .map(|c| c.iter().map(|z| *z / norm).collect())
                        .collect();
                    (vecs, raw.exact.clone())
                }
            };
            let r = vectors.len();
            for (k, vk) in vectors.iter().enumerate() {
                v.set_col(col + k, vk);
            }
            col_start.push(col);
            col += r;
            chains.push(JordanChain {
                eig_index,
                block_index,
                vectors,
                exact,
            });
        }
    }
    debug_assert_eq!(col, n);

    // Jordan form matrix in the same column order.
    let mut j = DenseMatrix::zeros(n, n);
    for (idx, c) in chains.iter().enumerate() {
        let lam = eigenvalues[c.eig_index].value;
        let start = col_start[idx];
        for k in 0..c.len() {
            j[(start + k, start + k)] = lam;
            if k + 1 < c.len() {
                j[(start + k, start + k + 1)] = Complex64::new(1.0, 0.0);
            }
        }
    }

    let v_inv = linalg::inverse(&v, tol).map_err(|e| match e {
        Error::Singular { detail } => Error::DecompositionFailed(format!(
            "generalized eigenvector basis is numerically singular: {detail}"
        )),
        other => other,
    })?;
    let w = v_inv.conj_transpose();

    // Exact basis and dual basis when every chain is exact.
    let mut v_exact = None;
    let mut w_exact = None;
    if chains.iter().all(|c| c.exact.is_some()) {
        let mut ve = ExactMatrix::zeros(n, n);
        for (idx, c) in chains.iter().enumerate() {
            ve.set_col_block(col_start[idx], c.exact.as_ref().unwrap());
        }
        let ve_inv = ve.inverse().map_err(|_| {
            Error::DecompositionFailed(
                "exact eigenvector basis is singular (internal error)".into(),
            )
        })?;
        // With exact factors the reconstruction must be literally exact;
        // anything else is an internal inconsistency.
        if let Some(ae) = &a_exact {
            if eigenvalues.iter().all(|e| e.exact.is_some()) {
                let mut jm = ExactMatrix::zeros(n, n);
                for (idx, c) in chains.iter().enumerate() {
                    let lam = eigenvalues[c.eig_index].exact.clone().unwrap();
                    let start = col_start[idx];
                    for k in 0..c.len() {
                        jm[(start + k, start + k)] = lam.clone();
                        if k + 1 < c.len() {
                            jm[(start + k, start + k + 1)] = ExactScalar::one();
                        }
                    }
                }
                let recon = ve.matmul(&jm)?.matmul(&ve_inv)?;
                if !recon.sub(ae)?.is_zero() {
                    return Err(Error::DecompositionFailed(
                        "exact reconstruction mismatch (internal error)".into(),
                    ));
                }
            }
        }
        w_exact = Some(ve_inv.conj_transpose());
        v_exact = Some(ve);
    }

    let decomposition = JordanDecomposition {
        shift: a,
        shift_exact: a_exact,
        eigenvalues,
        chains,
        v,
        w,
        j,
        v_exact,
        w_exact,
        col_start,
        tolerances: *tol,
    };

    let residual = decomposition
        .shift
        .sub(&decomposition.v.matmul(&decomposition.j)?.matmul(&v_inv)?)?
        .induced_l1_norm();
    // Eigenvalue scatter propagates into the reconstruction through the
    // basis conditioning; first-order, that is what the residual can
    // legitimately reach on the numeric path.
    let kappa = decomposition.v.induced_l1_norm() * v_inv.induced_l1_norm();
    let allowed = tol.verify_tol * decomposition.shift.induced_l1_norm().max(1.0)
        + 10.0 * kappa * max_spread;
    if residual > allowed {
        return Err(Error::IllConditionedStructure(format!(
            "reconstruction residual {residual:.3e} exceeds {allowed:.3e}; \
             the detected Jordan structure is not numerically supported"
        )));
    }
    Ok(decomposition)
}

// ───────────────────────── tests ─────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactMatrix;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn real(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_real_rows(rows)
    }

    #[test]
    fn diagonal_matrix_decomposes_trivially() {
        let a = real(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        assert_eq!(d.eigenvalues.len(), 2);
        // canonical order: |1-(-1)| = 2 < |1-3| = 2 — tie; re ascending puts -1 first
        assert_eq!(d.eigenvalues[0].value.re, -1.0);
        assert_eq!(d.eigenvalues[0].algebraic, 1);
        assert_eq!(d.eigenvalues[1].algebraic, 2);
        assert_eq!(d.eigenvalues[1].geometric, 2);
        assert!(d.reconstruction_error().unwrap() < 1e-10);
        assert!(d.v_exact.is_some());
    }

    #[test]
    fn single_jordan_block_is_recovered() {
        // Nilpotent 4x4 single chain: ones on the subdiagonal.
        let mut rows = vec![vec![0.0; 4]; 4];
        for i in 1..4 {
            rows[i][i - 1] = 1.0;
        }
        let a = real(&rows);
        let d = jordan_decompose(&a, &tol()).unwrap();
        assert_eq!(d.eigenvalues.len(), 1);
        let e = &d.eigenvalues[0];
        assert_eq!(e.value, Complex64::new(0.0, 0.0));
        assert_eq!(e.kernel_dims, vec![1, 2, 3, 4]);
        assert_eq!(e.block_sizes, vec![4]);
        assert!(e.exact.is_some());
        assert!(d.reconstruction_error().unwrap() < 1e-10);
    }

    #[test]
    fn mixed_block_structure_is_recovered_exactly() {
        // J = diag(J_2(5), J_1(5), J_2(-1)) conjugated by an integer matrix.
        let jm = ExactMatrix::from_int_rows(&[
            vec![5, 1, 0, 0, 0],
            vec![0, 5, 0, 0, 0],
            vec![0, 0, 5, 0, 0],
            vec![0, 0, 0, -1, 1],
            vec![0, 0, 0, 0, -1],
        ]);
        let x = ExactMatrix::from_int_rows(&[
            vec![1, 0, 1, 0, 1],
            vec![1, 1, 0, 0, 0],
            vec![0, 1, 1, 0, 1],
            vec![0, 0, 1, 1, 0],
            vec![1, 0, 0, 1, 1],
        ]);
        let a = x.matmul(&jm).unwrap().matmul(&x.inverse().unwrap()).unwrap();
        let d = jordan_decompose_exact(&a, &tol()).unwrap();
        assert_eq!(d.eigenvalues.len(), 2);
        let e5 = d
            .eigenvalues
            .iter()
            .find(|e| (e.value - Complex64::new(5.0, 0.0)).norm() < 1e-9)
            .unwrap();
        assert_eq!(e5.block_sizes, vec![2, 1]);
        assert_eq!(e5.geometric, 2);
        let em1 = d
            .eigenvalues
            .iter()
            .find(|e| (e.value - Complex64::new(-1.0, 0.0)).norm() < 1e-9)
            .unwrap();
        assert_eq!(em1.block_sizes, vec![2]);
        // fully exact: reconstruction is literal
        assert!(d.v_exact.is_some());
        assert!(d.shift_exact.is_some());
    }

    #[test]
    fn numeric_path_handles_defective_structure() {
        // Same mixed structure, but force the numeric pipeline.
        let jm = real(&[
            vec![2.0, 1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0, 0.0],
            vec![0.0, 0.0, 0.0, 7.0],
        ]);
        let x = real(&[
            vec![1.0, 0.0, 2.0, 0.0],
            vec![0.0, 1.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0, 1.0],
        ]);
        let x_inv = linalg::inverse(&x, &tol()).unwrap();
        let a = x.matmul(&jm).unwrap().matmul(&x_inv).unwrap();
        let d = jordan_decompose_numeric(&a, &tol()).unwrap();
        let e2 = d
            .eigenvalues
            .iter()
            .find(|e| (e.value - Complex64::new(2.0, 0.0)).norm() < 1e-6)
            .unwrap();
        assert_eq!(e2.block_sizes, vec![2, 1]);
        assert!(d.reconstruction_error().unwrap() < 1e-8);
        assert!(d.v_exact.is_none());
    }

    #[test]
    fn chains_satisfy_the_recursion() {
        let a = real(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![8.0, -12.0, 6.0],
        ]); // companion matrix of (x-2)^3: single J_3(2)
        let d = jordan_decompose(&a, &tol()).unwrap();
        assert_eq!(d.eigenvalues.len(), 1);
        assert_eq!(d.eigenvalues[0].block_sizes, vec![3]);
        let lam = d.eigenvalues[0].value;
        let c = &d.chains[0];
        let m = a.shifted(lam).unwrap();
        // (A - lambda) v_1 = 0 and (A - lambda) v_k = v_{k-1}
        assert!(crate::dense::vec_l1(&m.mul_vec(&c.vectors[0]).unwrap()) < 1e-8);
        for k in 1..c.len() {
            let lhs = m.mul_vec(&c.vectors[k]).unwrap();
            assert!(crate::dense::vec_max_abs_diff(&lhs, &c.vectors[k - 1]) < 1e-8);
        }
        // unit induced-1-norm chain block
        assert!((c.matrix().induced_l1_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_eigenvalues_come_out_in_conjugate_pairs() {
        let a = real(&[vec![0.0, -1.0], vec![1.0, 0.0]]); // rotation: eigenvalues ±i
        let d = jordan_decompose(&a, &tol()).unwrap();
        assert_eq!(d.eigenvalues.len(), 2);
        let mut vals: Vec<Complex64> = d.eigenvalues.iter().map(|e| e.value).collect();
        vals.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert!((vals[0] - Complex64::new(0.0, -1.0)).norm() < 1e-9);
        assert!((vals[1] - Complex64::new(0.0, 1.0)).norm() < 1e-9);
        // exact verification works for Gaussian-rational eigenvalues too
        assert!(d.eigenvalues.iter().all(|e| e.exact.is_some()));
    }

    #[test]
    fn canonical_order_sorts_by_distance_from_one() {
        let a = real(&[
            vec![4.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, -2.0],
        ]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        let vals: Vec<f64> = d.eigenvalues.iter().map(|e| e.value.re).collect();
        // |1-0| = 1 < |1-(-2)| = 3 = |1-4| (tie broken by Re ascending)
        assert_eq!(vals, vec![0.0, -2.0, 4.0]);
    }

    #[test]
    fn dual_basis_is_biorthogonal() {
        let a = real(&[
            vec![1.0, 2.0, 0.0],
            vec![0.0, 3.0, 1.0],
            vec![0.0, 0.0, 3.0],
        ]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        let gram = d.w.conj_transpose().matmul(&d.v).unwrap();
        assert!(gram.max_abs_diff(&DenseMatrix::identity(3)) < 1e-9);
    }

    #[test]
    fn weyr_characteristic_reports_kernel_dims() {
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[1][0] = 1.0; // chain 1 of length 2
        // second block: size 2 at rows 2,3
        rows[3][2] = 1.0;
        let a = real(&rows);
        let w = weyr_characteristic(&a, Complex64::new(0.0, 0.0), &tol()).unwrap();
        assert_eq!(w, vec![2, 4]);
        assert!(weyr_characteristic(&a, Complex64::new(5.0, 0.0), &tol()).is_err());
    }

    #[test]
    fn block_basis_substitution_inside_the_span_preserves_the_operator() {
        let mut rows = vec![vec![0.0; 3]; 3];
        rows[1][0] = 1.0;
        rows[2][1] = 1.0;
        let a = real(&rows); // J_3(0) already
        let d = jordan_decompose(&a, &tol()).unwrap();
        // An upper-triangular Toeplitz y commutes with the nilpotent block,
        // so the rebuilt operator is unchanged.
        let y = real(&[
            vec![1.0, 2.0, -1.0],
            vec![0.0, 1.0, 2.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let d2 = d.with_block_basis(0, &y).unwrap();
        assert!(d2.shift.max_abs_diff(&a) < 1e-9);
        // A non-Toeplitz basis change inside the same span produces a
        // different operator even though the span is identical.
        let y2 = real(&[
            vec![1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let d3 = d.with_block_basis(0, &y2).unwrap();
        assert!(d3.shift.max_abs_diff(&a) > 0.1);
    }

    #[test]
    fn block_substitution_outside_the_span_changes_the_operator() {
        let a = real(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 5.0],
        ]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        // replace the (length-1) chain for eigenvalue 5 with a vector having
        // weight outside its eigenspace
        let idx = d
            .chains
            .iter()
            .position(|c| (d.eigenvalues[c.eig_index].value.re - 5.0).abs() < 1e-9)
            .unwrap();
        let cols = DenseMatrix::from_real_rows(&[vec![1.0], vec![0.0], vec![1.0]]);
        let d2 = d.with_block_columns(idx, &cols).unwrap();
        assert!(d2.shift.max_abs_diff(&a) > 0.1);
        // ... but it is still a valid decomposition of the new operator
        assert!(d2.reconstruction_error().unwrap() < 1e-9);
    }

    #[test]
    fn numeric_path_resolves_a_whole_spectrum_cluster() {
        // A single defective eigenvalue covering the whole spectrum: past
        // the nilpotency index the powers of `A - estimate*I` are pure
        // rounding noise, and a rank decision relative to the power's own
        // largest singular value would report phantom rank one forever.
        // The non-integer entries keep those powers inexact, so this pins
        // the absolute noise floor in the kernel filtration.
        let third = 1.0 / 3.0;
        let ninth = 1.0 / 9.0;
        let a = DenseMatrix::from_rows(&[
            vec![Complex64::new(5.0 - third, 2.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(-ninth, 0.0), Complex64::new(5.0 + third, 2.0)],
        ]);
        let d = jordan_decompose_numeric(&a, &tol()).unwrap();
        assert_eq!(d.eigenvalues.len(), 1);
        let e = &d.eigenvalues[0];
        assert!((e.value - Complex64::new(5.0, 2.0)).norm() <= 1e-6);
        assert_eq!(e.block_sizes, vec![2]);
        assert!(d.reconstruction_error().unwrap() < 1e-5);
    }
}
