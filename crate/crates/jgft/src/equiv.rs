//! Graph equivalence testing and construction.
//!
//! Two notions are implemented side by side: *isomorphism* (a node
//! relabeling `B = T A T⁻¹` for a permutation matrix `T`) and *spectral
//! equivalence* (identical canonical forms **and** identical sets of chain
//! subspaces, so the spectral projections of every signal coincide).
//! Neither implies the other; the tests here produce witnesses either way.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::jordan::{jordan_decompose, JordanBlock, JordanChain, JordanDecomposition, JordanForm};
use crate::linalg;
use crate::tolerance::ToleranceConfig;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exhaustive isomorphism search is restricted to this many nodes so that
/// a negative answer is a proof, not a timeout.
pub const ISO_SEARCH_LIMIT: usize = 12;

/// Largest dimension accepted by `invariant_subspace_subset_check`
/// (the subset enumeration is exponential in the chain count).
pub const INVARIANT_CHECK_LIMIT: usize = 6;

// ───────────────────────── permutations ─────────────────────────

/// A node relabeling: node `i` of the first graph becomes node `image[i]`
/// of the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationMap {
    image: Vec<usize>,
}

impl PermutationMap {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &k in &image {
            if k >= n || seen[k] {
                return Err(Error::InvalidParameter(format!(
                    "not a permutation of 0..{n}: {image:?}"
                )));
            }
            seen[k] = true;
        }
        Ok(PermutationMap { image })
    }

    pub fn identity(n: usize) -> Self {
        PermutationMap {
            image: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> PermutationMap {
        let mut inv = vec![0; self.image.len()];
        for (i, &k) in self.image.iter().enumerate() {
            inv[k] = i;
        }
        PermutationMap { image: inv }
    }

    /// The permutation matrix `T` with `T x` carrying entry `i` of `x` to
    /// entry `image[i]`; conjugation by `T` realizes the relabeling.
    pub fn matrix(&self) -> DenseMatrix {
        let n = self.image.len();
        let mut t = DenseMatrix::zeros(n, n);
        for (i, &k) in self.image.iter().enumerate() {
            t[(k, i)] = Complex64::new(1.0, 0.0);
        }
        t
    }

    /// Apply to a vector: `(perm ∘ s)[image[i]] = s[i]`.
    pub fn apply_vec(&self, s: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); s.len()];
        for (i, &k) in self.image.iter().enumerate() {
            out[k] = s[i];
        }
        out
    }
}

/// Relabel the nodes of `a`: the result `B` satisfies
/// `B[π(i)][π(j)] = A[i][j]`, i.e. `B = T A T⁻¹`.
pub fn apply_isomorphism(a: &DenseMatrix, p: &PermutationMap) -> Result<DenseMatrix> {
    let n = a.require_square()?;
    if p.len() != n {
        return Err(Error::ShapeMismatch {
            op: "apply_isomorphism",
            lhs_rows: n,
            lhs_cols: n,
            rhs_rows: p.len(),
            rhs_cols: p.len(),
        });
    }
    let img = p.image();
    let mut b = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            b[(img[i], img[j])] = a[(i, j)];
        }
    }
    Ok(b)
}

/// Search for a relabeling taking `a` to `b`. Exhaustive (with pruning)
/// for up to `ISO_SEARCH_LIMIT` nodes, so `None` is a proof of
/// non-isomorphism at these sizes.
pub fn find_isomorphism(
    a: &DenseMatrix,
    b: &DenseMatrix,
    tol: &ToleranceConfig,
) -> Result<Option<PermutationMap>> {
    let n = a.require_square()?;
    if b.require_square()? != n {
        return Err(Error::ShapeMismatch {
            op: "find_isomorphism",
            lhs_rows: n,
            lhs_cols: n,
            rhs_rows: b.rows(),
            rhs_cols: b.cols(),
        });
    }
    if n > ISO_SEARCH_LIMIT {
        return Err(Error::SizeLimit {
            op: "find_isomorphism",
            size: n,
            limit: ISO_SEARCH_LIMIT,
        });
    }
    if n == 0 {
        return Ok(Some(PermutationMap::identity(0)));
    }
    // A valid relabeling keeps ‖B − TAT⁻¹‖₁ ≤ τ, and the induced 1-norm
    // dominates every single entry, so entrywise pruning at τ never
    // discards a permutation that would pass the final check.
    let tau = tol.verify_tol * a.induced_l1_norm().max(1.0);
    let sig_a: Vec<NodeSignature> = (0..n).map(|i| NodeSignature::of(a, i)).collect();
    let sig_b: Vec<NodeSignature> = (0..n).map(|i| NodeSignature::of(b, i)).collect();
    let mut candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&k| sig_a[i].compatible(&sig_b[k], tau))
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    // Most-constrained node first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| candidates[i].len());
    for c in candidates.iter_mut() {
        c.sort_unstable();
    }
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let found = search(a, b, &order, &candidates, &mut image, &mut used, 0, tau, tol);
    Ok(found)
}

struct NodeSignature {
    diag: Complex64,
    row_re: Vec<f64>,
    row_im: Vec<f64>,
    col_re: Vec<f64>,
    col_im: Vec<f64>,
}

impl NodeSignature {
    fn of(m: &DenseMatrix, i: usize) -> Self {
        let n = m.rows();
        let mut row_re: Vec<f64> = (0..n).map(|j| m[(i, j)].re).collect();
        let mut row_im: Vec<f64> = (0..n).map(|j| m[(i, j)].im).collect();
        let mut col_re: Vec<f64> = (0..n).map(|j| m[(j, i)].re).collect();
        let mut col_im: Vec<f64> = (0..n).map(|j| m[(j, i)].im).collect();
        row_re.sort_by(f64::total_cmp);
        row_im.sort_by(f64::total_cmp);
        col_re.sort_by(f64::total_cmp);
        col_im.sort_by(f64::total_cmp);
        NodeSignature {
            diag: m[(i, i)],
            row_re,
            row_im,
            col_re,
            col_im,
        }
    }

    /// Sorted one-dimensional sequences pair entries optimally for the
    /// max metric, so positional comparison within `tau` is a sound
    /// relaxation of multiset matching.
    fn compatible(&self, other: &NodeSignature, tau: f64) -> bool {
        if (self.diag - other.diag).norm() > tau {
            return false;
        }
        let close = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tau);
        close(&self.row_re, &other.row_re)
            && close(&self.row_im, &other.row_im)
            && close(&self.col_re, &other.col_re)
            && close(&self.col_im, &other.col_im)
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    a: &DenseMatrix,
    b: &DenseMatrix,
    order: &[usize],
    candidates: &[Vec<usize>],
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
    depth: usize,
    tau: f64,
    tol: &ToleranceConfig,
) -> Option<PermutationMap> {
    if depth == order.len() {
        // Entrywise pruning bounds each entry, but the final criterion is
        // a column-sum norm; verify it before accepting.
        let p = PermutationMap::new(image.clone()).expect("search builds bijections");
        let relabeled = apply_isomorphism(a, &p).expect("dimensions match");
        let err = b.sub(&relabeled).expect("dimensions match").induced_l1_norm();
        if err <= tol.verify_tol * a.induced_l1_norm().max(1.0) {
            return Some(p);
        }
        return None;
    }
    let i = order[depth];
    for &k in &candidates[i] {
        if used[k] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&j| {
            (a[(i, j)] - b[(k, image[j])]).norm() <= tau
                && (a[(j, i)] - b[(image[j], k)]).norm() <= tau
        }) && (a[(i, i)] - b[(k, k)]).norm() <= tau;
        if !consistent {
            continue;
        }
        image[i] = k;
        used[k] = true;
        if let Some(p) = search(a, b, order, candidates, image, used, depth + 1, tau, tol) {
            return Some(p);
        }
        image[i] = usize::MAX;
        used[k] = false;
    }
    None
}

// ───────────────────────── spectral equivalence ─────────────────────────

/// Verdict of the combined equivalence tests.
#[derive(Clone, Debug)]
pub struct EquivalenceVerdict {
    /// `Some(flag)` when the exhaustive relabeling search ran
    /// (dimension ≤ `ISO_SEARCH_LIMIT`); `None` when it was skipped.
    pub isomorphic: Option<bool>,
    /// Witness relabeling when one exists.
    pub permutation: Option<PermutationMap>,
    pub jordan_equivalent: bool,
    /// First failing condition when not equivalent: 1 = the chain
    /// subspace sets differ, 2 = the canonical forms differ.
    pub failed_condition: Option<u8>,
    /// Pairing `(chain of a, chain of b)` certifying equal subspace sets.
    pub subspace_matching: Option<Vec<(usize, usize)>>,
}

/// Outcome of comparing two existing decompositions (no relabeling search).
#[derive(Clone, Debug)]
pub struct SubspaceComparison {
    pub jordan_equivalent: bool,
    pub failed_condition: Option<u8>,
    pub subspace_matching: Option<Vec<(usize, usize)>>,
}

/// Test whether two shifts define identical spectral analysis: equal
/// canonical forms and equal sets of chain subspaces. Also runs the
/// relabeling search when the dimension permits, so one call yields the
/// complete relation between the two graphs.
pub fn is_jordan_equivalent(
    a: &DenseMatrix,
    b: &DenseMatrix,
    tol: &ToleranceConfig,
) -> Result<EquivalenceVerdict> {
    let n = a.require_square()?;
    if b.require_square()? != n {
        return Err(Error::ShapeMismatch {
            op: "is_jordan_equivalent",
            lhs_rows: n,
            lhs_cols: n,
            rhs_rows: b.rows(),
            rhs_cols: b.cols(),
        });
    }
    let da = jordan_decompose(a, tol)?;
    let db = jordan_decompose(b, tol)?;
    let cmp = compare_decompositions(&da, &db)?;
    let (isomorphic, permutation) = if n <= ISO_SEARCH_LIMIT {
        let p = find_isomorphism(a, b, tol)?;
        (Some(p.is_some()), p)
    } else {
        (None, None)
    };
    Ok(EquivalenceVerdict {
        isomorphic,
        permutation,
        jordan_equivalent: cmp.jordan_equivalent,
        failed_condition: cmp.failed_condition,
        subspace_matching: cmp.subspace_matching,
    })
}

/// Compare two decompositions: canonical forms first, then a bipartite
/// matching of chains on span equality within each (eigenvalue, size)
/// group. Exact column spaces are compared exactly when both sides carry
/// rational chain data.
pub fn compare_decompositions(
    da: &JordanDecomposition,
    db: &JordanDecomposition,
) -> Result<SubspaceComparison> {
    if da.dimension() != db.dimension() {
        return Err(Error::ShapeMismatch {
            op: "compare_decompositions",
            lhs_rows: da.dimension(),
            lhs_cols: da.dimension(),
            rhs_rows: db.dimension(),
            rhs_cols: db.dimension(),
        });
    }
    let tol = &da.tolerances;
    // Condition on canonical forms: match distinct eigenvalues between the
    // two spectra, then require identical block-size lists per match.
    let scale = da
        .eigenvalues
        .iter()
        .chain(db.eigenvalues.iter())
        .map(|e| e.value.norm())
        .fold(1.0_f64, f64::max);
    let radius = tol.eig_cluster_tol * scale;
    let ka = da.eigenvalues.len();
    let kb = db.eigenvalues.len();
    let forms_differ = SubspaceComparison {
        jordan_equivalent: false,
        failed_condition: Some(2),
        subspace_matching: None,
    };
    if ka != kb {
        return Ok(forms_differ);
    }
    // Chains from a merged eigenvalue cluster carry their centroid error
    // and kernel fuzz with them; their own recursion residuals measure that
    // accuracy, so comparisons involving such chains are slackened
    // accordingly (exact chains contribute nothing).
    let eps_a = chain_residuals(da);
    let eps_b = chain_residuals(db);
    let eig_eps = |d: &JordanDecomposition, eps: &[f64], i: usize| -> f64 {
        d.chains
            .iter()
            .zip(eps)
            .filter(|(c, _)| c.eig_index == i)
            .map(|(_, e)| *e)
            .fold(0.0, f64::max)
    };
    let adjacency: Vec<Vec<bool>> = (0..ka)
        .map(|i| {
            (0..kb)
                .map(|j| {
                    let slack = 50.0 * (eig_eps(da, &eps_a, i) + eig_eps(db, &eps_b, j));
                    let r = radius.max(slack.min(0.02 * scale));
                    (da.eigenvalues[i].value - db.eigenvalues[j].value).norm() <= r
                })
                .collect()
        })
        .collect();
    let eig_match = match bipartite_perfect_matching(&adjacency) {
        Some(m) => m,
        None => return Ok(forms_differ),
    };
    for (i, &j) in eig_match.iter().enumerate() {
        if da.eigenvalues[i].block_sizes != db.eigenvalues[j].block_sizes {
            return Ok(forms_differ);
        }
    }
    // Condition on subspace sets: within each (eigenvalue pair, size)
    // group, chains must match one-to-one on span equality.
    let mut matching: Vec<(usize, usize)> = Vec::with_capacity(da.chain_count());
    for (i, &j) in eig_match.iter().enumerate() {
        let chains_a: Vec<usize> = (0..da.chain_count())
            .filter(|&c| da.chains[c].eig_index == i)
            .collect();
        let chains_b: Vec<usize> = (0..db.chain_count())
            .filter(|&c| db.chains[c].eig_index == j)
            .collect();
        let mut sizes: Vec<usize> = chains_a.iter().map(|&c| da.chains[c].len()).collect();
        sizes.dedup();
        for &r in &sizes {
            let group_a: Vec<usize> = chains_a
                .iter()
                .copied()
                .filter(|&c| da.chains[c].len() == r)
                .collect();
            let group_b: Vec<usize> = chains_b
                .iter()
                .copied()
                .filter(|&c| db.chains[c].len() == r)
                .collect();
            debug_assert_eq!(group_a.len(), group_b.len());
            let adj: Vec<Vec<bool>> = group_a
                .iter()
                .map(|&ca| {
                    group_b
                        .iter()
                        .map(|&cb| {
                            spans_equal(
                                &da.chains[ca],
                                &db.chains[cb],
                                eps_a[ca] + eps_b[cb],
                                tol,
                            )
                        })
                        .collect()
                })
                .collect();
            match bipartite_perfect_matching(&adj) {
                Some(m) => {
                    for (ga, &gb) in m.iter().enumerate() {
                        matching.push((group_a[ga], group_b[gb]));
                    }
                }
                None => {
                    return Ok(SubspaceComparison {
                        jordan_equivalent: false,
                        failed_condition: Some(1),
                        subspace_matching: None,
                    })
                }
            }
        }
    }
    matching.sort_unstable();
    Ok(SubspaceComparison {
        jordan_equivalent: true,
        failed_condition: None,
        subspace_matching: Some(matching),
    })
}

/// Per-chain recursion residuals `max_p ‖(A−λI)v_p − v_{p−1}‖₁` against the
/// decomposition's own shift and eigenvalue values. Near zero for cleanly
/// resolved chains; of the order of the eigenvalue-cluster spread for chains
/// recovered from a merged cluster.
fn chain_residuals(d: &JordanDecomposition) -> Vec<f64> {
    d.chains
        .iter()
        .map(|c| {
            let lam = d.eigenvalues[c.eig_index].value;
            let shifted = match d.shift.shifted(lam) {
                Ok(s) => s,
                Err(_) => return f64::INFINITY,
            };
            let mut worst = 0.0f64;
            for p in 0..c.len() {
                let mut lhs = match shifted.mul_vec(&c.vectors[p]) {
                    Ok(v) => v,
                    Err(_) => return f64::INFINITY,
                };
                if p > 0 {
                    for (l, q) in lhs.iter_mut().zip(c.vectors[p - 1].iter()) {
                        *l -= *q;
                    }
                }
                worst = worst.max(lhs.iter().map(|z| z.norm()).sum::<f64>());
            }
            worst
        })
        .collect()
}

/// Equal column spaces ⇔ the horizontally stacked chain matrices have
/// rank equal to the chain length. `slack` widens the numeric rank cut to
/// the accuracy the chains themselves achieve.
fn spans_equal(ca: &JordanChain, cb: &JordanChain, slack: f64, tol: &ToleranceConfig) -> bool {
    let r = ca.len();
    if cb.len() != r {
        return false;
    }
    if let (Some(ea), Some(eb)) = (&ca.exact, &cb.exact) {
        if let Ok(stack) = ExactMatrix::hstack(ea, eb) {
            return stack.rank() == r;
        }
    }
    let stack = match DenseMatrix::hstack(&ca.matrix(), &cb.matrix()) {
        Ok(s) => s,
        Err(_) => return false,
    };
    // Kernel resolution is limited by eigenvalue accuracy, as in the
    // structural stage of the decomposition itself.
    let rank_rel = tol
        .rank_tol
        .max(tol.eig_cluster_tol)
        .max((100.0 * slack).min(0.1));
    let struct_tol = tol.with_rank_tol(rank_rel);
    match linalg::rank_and_kernel(&stack, &struct_tol) {
        Ok((rank, _)) => rank == r,
        Err(_) => false,
    }
}

/// Perfect matching in a small bipartite graph (augmenting paths).
/// Returns, for each left node, its matched right node.
fn bipartite_perfect_matching(adj: &[Vec<bool>]) -> Option<Vec<usize>> {
    let nl = adj.len();
    let nr = adj.first().map(|r| r.len()).unwrap_or(0);
    if nl != nr {
        return None;
    }
    if nl == 0 {
        return Some(Vec::new());
    }
    let mut right_owner: Vec<Option<usize>> = vec![None; nr];
    fn augment(
        l: usize,
        adj: &[Vec<bool>],
        right_owner: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for r in 0..adj[l].len() {
            if adj[l][r] && !visited[r] {
                visited[r] = true;
                if right_owner[r].is_none()
                    || augment(right_owner[r].unwrap(), adj, right_owner, visited)
                {
                    right_owner[r] = Some(l);
                    return true;
                }
            }
        }
        false
    }
    for l in 0..nl {
        let mut visited = vec![false; nr];
        if !augment(l, adj, &mut right_owner, &mut visited) {
            return None;
        }
    }
    let mut left_match = vec![0; nl];
    for (r, owner) in right_owner.iter().enumerate() {
        left_match[owner.expect("perfect matching covers all right nodes")] = r;
    }
    Some(left_match)
}

// ───────────────────────── constructive generators ─────────────────────────

/// Per-chain invertible mixing matrices; applying them inside each chain's
/// span produces a new shift with identical spectral components.
#[derive(Clone, Debug)]
pub struct BlockDiagonalTransform {
    pub blocks: Vec<DenseMatrix>,
}

impl BlockDiagonalTransform {
    /// The identity transform for a given decomposition.
    pub fn identity(d: &JordanDecomposition) -> Self {
        BlockDiagonalTransform {
            blocks: d.chains.iter().map(|c| DenseMatrix::identity(c.len())).collect(),
        }
    }

    /// Assemble the full block-diagonal matrix in chain storage order.
    pub fn assemble(&self) -> DenseMatrix {
        let n: usize = self.blocks.iter().map(|b| b.rows()).sum();
        let mut y = DenseMatrix::zeros(n, n);
        let mut at = 0;
        for b in &self.blocks {
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    y[(at + i, at + j)] = b[(i, j)];
                }
            }
            at += b.rows();
        }
        y
    }
}

/// Replace every chain basis `V_ij` by `V_ij Y_ij` and rebuild the shift.
/// The resulting graph has the same canonical form and the same chain
/// subspaces, hence identical spectral projections for every signal.
pub fn apply_block_transform(
    d: &JordanDecomposition,
    y: &BlockDiagonalTransform,
) -> Result<JordanDecomposition> {
    if y.blocks.len() != d.chain_count() {
        return Err(Error::InvalidParameter(format!(
            "transform has {} blocks for {} chains",
            y.blocks.len(),
            d.chain_count()
        )));
    }
    for (c, b) in d.chains.iter().zip(&y.blocks) {
        if b.rows() != c.len() || b.cols() != c.len() {
            return Err(Error::InvalidParameter(format!(
                "block for a {}-dimensional chain has shape {}x{}",
                c.len(),
                b.rows(),
                b.cols()
            )));
        }
    }
    let mut out = d.clone();
    for (idx, b) in y.blocks.iter().enumerate() {
        let i = out.chains[idx].eig_index;
        let j = out.chains[idx].block_index;
        let chain_idx = out.chain_index(i, j)?;
        debug_assert_eq!(chain_idx, idx);
        out = out.with_block_basis(idx, b)?;
    }
    Ok(out)
}

/// Draw per-chain mixing matrices with entries on the sixteenths grid of
/// the complex unit square, resampled until the condition number is below
/// 10³. Grid entries are exactly representable, which keeps the rational
/// fast path of the rebuild alive.
pub fn random_block_transform(d: &JordanDecomposition, seed: u64) -> Result<BlockDiagonalTransform> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = Vec::with_capacity(d.chain_count());
    for c in &d.chains {
        let r = c.len();
        let mut accepted = None;
        for _ in 0..100 {
            let y = DenseMatrix::from_fn(r, r, |_, _| {
                let re = rng.gen_range(-16i32..=16) as f64 / 16.0;
                let im = rng.gen_range(-16i32..=16) as f64 / 16.0;
                Complex64::new(re, im)
            });
            match linalg::condition_number(&y) {
                Ok(k) if k.is_finite() && k < 1e3 => {
                    accepted = Some(y);
                    break;
                }
                _ => continue,
            }
        }
        match accepted {
            Some(y) => blocks.push(y),
            None => {
                return Err(Error::DecompositionFailed(
                    "failed to draw a well-conditioned mixing block".into(),
                ))
            }
        }
    }
    Ok(BlockDiagonalTransform { blocks })
}

/// Construct a random member of the equivalence class of `d`: same
/// canonical form, same chain subspaces, generally different edges.
/// For diagonalizable shifts every mixing block is a scalar, so the
/// result is the original shift again.
pub fn random_jordan_equivalent(d: &JordanDecomposition, seed: u64) -> Result<JordanDecomposition> {
    let y = random_block_transform(d, seed)?;
    apply_block_transform(d, &y)
}

/// The canonical-form shift `J` of the decomposition together with a flag
/// telling whether the original graph is actually in `J`'s own equivalence
/// class (true exactly when the chain subspaces of the original are the
/// coordinate subspaces).
pub fn canonical_representative(d: &JordanDecomposition) -> Result<(DenseMatrix, bool)> {
    let j = d.j.clone();
    let dj = jordan_decompose(&j, &d.tolerances)?;
    let cmp = compare_decompositions(d, &dj)?;
    Ok((j, cmp.jordan_equivalent))
}

// ───────────────────────── structural membership ─────────────────────────

/// Read the canonical form straight off the matrix structure, without any
/// eigendecomposition, when the matrix matches one of three patterns:
///
/// 1. upper triangular, constant diagonal, nonzero first superdiagonal
///    (single chain);
/// 2. a direct sum of two such blocks with distinct diagonal values;
/// 3. a direct sum of two blocks with equal diagonal value sharing a
///    banded upper-Toeplitz structure: the smaller block is Toeplitz with
///    coefficients `b₁..b_p`, the larger carries the same band plus
///    arbitrary entries strictly above it.
///
/// Returns `None` when no pattern applies; never guesses.
pub fn structural_membership_check(a: &DenseMatrix) -> Option<JordanForm> {
    let n = a.require_square().ok()?;
    if n == 0 {
        return None;
    }
    let tau = 1e-9 * a.max_abs().max(1.0);
    if let Some(lambda) = unicellular_pattern(a, 0, n, tau) {
        return Some(JordanForm {
            blocks: vec![JordanBlock {
                eigenvalue: lambda,
                size: n,
            }],
        });
    }
    for split in 1..n {
        if !off_diagonal_blocks_zero(a, split, tau) {
            continue;
        }
        if let Some(form) = two_block_pattern(a, split, tau) {
            return Some(form);
        }
    }
    None
}

fn off_diagonal_blocks_zero(a: &DenseMatrix, split: usize, tau: f64) -> bool {
    let n = a.rows();
    for i in 0..split {
        for j in split..n {
            if a[(i, j)].norm() > tau || a[(j, i)].norm() > tau {
                return false;
            }
        }
    }
    true
}

/// Constant-diagonal upper-triangular with nonzero first superdiagonal on
/// rows `lo..hi`; returns the diagonal value.
fn unicellular_pattern(a: &DenseMatrix, lo: usize, hi: usize, tau: f64) -> Option<Complex64> {
    let lambda = a[(lo, lo)];
    for i in lo..hi {
        if (a[(i, i)] - lambda).norm() > tau {
            return None;
        }
        for j in lo..i {
            if a[(i, j)].norm() > tau {
                return None;
            }
        }
        if i + 1 < hi && a[(i, i + 1)].norm() <= tau {
            return None;
        }
    }
    Some(lambda)
}

/// Upper-triangular with constant diagonal on rows `lo..hi` (no
/// superdiagonal requirement); returns the diagonal value.
fn constant_diag_upper(a: &DenseMatrix, lo: usize, hi: usize, tau: f64) -> Option<Complex64> {
    let lambda = a[(lo, lo)];
    for i in lo..hi {
        if (a[(i, i)] - lambda).norm() > tau {
            return None;
        }
        for j in lo..i {
            if a[(i, j)].norm() > tau {
                return None;
            }
        }
    }
    Some(lambda)
}

fn two_block_pattern(a: &DenseMatrix, split: usize, tau: f64) -> Option<JordanForm> {
    let n = a.rows();
    let l1 = constant_diag_upper(a, 0, split, tau)?;
    let l2 = constant_diag_upper(a, split, n, tau)?;
    if (l1 - l2).norm() > tau {
        // Distinct diagonal values: each block must be unicellular on its own.
        unicellular_pattern(a, 0, split, tau)?;
        unicellular_pattern(a, split, n, tau)?;
        let mut blocks = vec![
            JordanBlock {
                eigenvalue: l1,
                size: split,
            },
            JordanBlock {
                eigenvalue: l2,
                size: n - split,
            },
        ];
        blocks.sort_by(|x, y| {
            let kx = (Complex64::new(1.0, 0.0) - x.eigenvalue).norm();
            let ky = (Complex64::new(1.0, 0.0) - y.eigenvalue).norm();
            kx.total_cmp(&ky)
                .then(x.eigenvalue.re.total_cmp(&y.eigenvalue.re))
                .then(x.eigenvalue.im.total_cmp(&y.eigenvalue.im))
        });
        return Some(JordanForm { blocks });
    }
    // Equal diagonal value: banded-Toeplitz agreement. Either layout
    // (larger block first or second) is accepted.
    let (big_lo, big_hi, small_lo, small_hi) = if split >= n - split {
        (0, split, split, n)
    } else {
        (split, n, 0, split)
    };
    let r1 = big_hi - big_lo;
    let r2 = small_hi - small_lo;
    let p = r2;
    // Toeplitz coefficients from the smaller block.
    let b: Vec<Complex64> = (0..p).map(|o| a[(small_lo, small_lo + o)]).collect();
    for i in 0..r2 {
        for o in 0..(r2 - i) {
            if (a[(small_lo + i, small_lo + i + o)] - b[o]).norm() > tau {
                return None;
            }
        }
    }
    // The same band must run through the larger block.
    for i in 0..r1 {
        for o in 0..p.min(r1 - i) {
            if (a[(big_lo + i, big_lo + i + o)] - b[o]).norm() > tau {
                return None;
            }
        }
    }
    // The structure only forces a full-length chain in each block when the
    // first superdiagonal never vanishes: through `b₂` when the band is
    // wide enough, explicitly otherwise (width-one band puts the larger
    // block's superdiagonal in the free region).
    if p >= 2 {
        if b[1].norm() <= tau {
            return None;
        }
    } else {
        for i in 0..r1.saturating_sub(1) {
            if a[(big_lo + i, big_lo + i + 1)].norm() <= tau {
                return None;
            }
        }
    }
    Some(JordanForm {
        blocks: vec![
            JordanBlock {
                eigenvalue: b[0],
                size: r1,
            },
            JordanBlock {
                eigenvalue: b[0],
                size: r2,
            },
        ],
    })
}

// ───────────────────────── dual-basis construction ─────────────────────────

/// The shift built on the dual basis: `A_W = W J W⁻¹` with `W = V^{-H}`.
/// The second value reports whether the construction is guaranteed to stay
/// in the equivalence class of the original (single chain, or eigenvector
/// matrix block diagonal); the matrix is returned either way.
pub fn dual_basis_graph(d: &JordanDecomposition) -> Result<(DenseMatrix, bool)> {
    let guaranteed = d.chain_count() == 1 || d.v_is_block_diagonal();
    // W⁻¹ = Vᴴ, so no inversion is needed.
    if let (Some(we), Some(ve), Some(je)) = (&d.w_exact, &d.v_exact, d.j_exact()) {
        let aw = we.matmul(&je)?.matmul(&ve.conj_transpose())?;
        return Ok((aw.to_dense(), guaranteed));
    }
    let aw = d.w.matmul(&d.j)?.matmul(&d.v.conj_transpose())?;
    Ok((aw, guaranteed))
}

// ───────────────────────── invariant subspaces ─────────────────────────

/// Check whether every sum of chain-prefix subspaces of `a` is invariant
/// under `b` and vice versa. For each chain `v₁..v_r` the spans of the
/// leading vectors `span(v₁..v_k)` are invariant under the original shift,
/// so all direct sums of such prefixes (one depth per chain) are tested.
/// Restricted to dimension ≤ `INVARIANT_CHECK_LIMIT`; only chain-generated
/// invariant subspaces are enumerated, not the full lattice.
pub fn invariant_subspace_subset_check(
    a: &DenseMatrix,
    b: &DenseMatrix,
    tol: &ToleranceConfig,
) -> Result<bool> {
    let n = a.require_square()?;
    if b.require_square()? != n {
        return Err(Error::ShapeMismatch {
            op: "invariant_subspace_subset_check",
            lhs_rows: n,
            lhs_cols: n,
            rhs_rows: b.rows(),
            rhs_cols: b.cols(),
        });
    }
    if n > INVARIANT_CHECK_LIMIT {
        return Err(Error::SizeLimit {
            op: "invariant_subspace_subset_check",
            size: n,
            limit: INVARIANT_CHECK_LIMIT,
        });
    }
    let da = jordan_decompose(a, tol)?;
    let db = jordan_decompose(b, tol)?;
    Ok(chain_sums_invariant_under(&da, &db)? && chain_sums_invariant_under(&db, &da)?)
}

fn chain_sums_invariant_under(d: &JordanDecomposition, other: &JordanDecomposition) -> Result<bool> {
    let k = d.chain_count();
    let tol = &d.tolerances;
    let struct_tol = tol.with_rank_tol(tol.rank_tol.max(tol.eig_cluster_tol));
    let exact_op = other.shift_exact.as_ref();
    let lens: Vec<usize> = d.chains.iter().map(|c| c.len()).collect();
    // Odometer over prefix depths: depths[c] ∈ 0..=lens[c] for each chain.
    let mut depths = vec![0usize; k];
    loop {
        // Advance the counter; stop after the all-max state has been visited.
        let mut carry = true;
        for c in 0..k {
            if depths[c] < lens[c] {
                depths[c] += 1;
                carry = false;
                break;
            }
            depths[c] = 0;
        }
        if carry {
            break;
        }
        let m: usize = depths.iter().sum();
        let touched: Vec<usize> = (0..k).filter(|&c| depths[c] > 0).collect();
        // Exact path when every touched chain and the acting shift are
        // rational.
        let all_exact = exact_op.is_some() && touched.iter().all(|&c| d.chains[c].exact.is_some());
        if all_exact {
            let op = exact_op.expect("checked above");
            let mut u: Option<ExactMatrix> = None;
            for &c in &touched {
                let e = d.chains[c]
                    .exact
                    .as_ref()
                    .expect("checked above")
                    .col_block(0..depths[c]);
                u = Some(match u {
                    None => e,
                    Some(prev) => ExactMatrix::hstack(&prev, &e)?,
                });
            }
            let u = u.expect("nonempty subset");
            let bu = op.matmul(&u)?;
            let stacked = ExactMatrix::hstack(&u, &bu)?;
            if stacked.rank() != m {
                return Ok(false);
            }
            continue;
        }
        let mut u: Option<DenseMatrix> = None;
        for &c in &touched {
            let block = d.chains[c].matrix().col_block(0..depths[c]);
            u = Some(match u {
                None => block,
                Some(prev) => DenseMatrix::hstack(&prev, &block)?,
            });
        }
        let u = u.expect("nonempty subset");
        let bu = other.shift.matmul(&u)?;
        let stacked = DenseMatrix::hstack(&u, &bu)?;
        let (rank, _) = linalg::rank_and_kernel(&stacked, &struct_tol)?;
        if rank != m {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn real(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_real_rows(rows)
    }

    /// Pair of graphs that are relabelings of each other yet have one
    /// differing eigenvector direction.
    fn relabeled_pair() -> (DenseMatrix, DenseMatrix) {
        let a = real(&[
            vec![2.0, 0.0, -1.0],
            vec![0.0, 2.0, -1.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let b = real(&[
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 2.0, 0.0],
            vec![-1.0, 0.0, 2.0],
        ]);
        (a, b)
    }

    /// Two single-chain 0/1 graphs with different edge counts.
    fn chain_graph_pair() -> (DenseMatrix, DenseMatrix) {
        let left = real(&[
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ]);
        let right = real(&[
            vec![0.0, 1.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ]);
        (left, right)
    }

    #[test]
    fn permutation_round_trip() {
        let p = PermutationMap::new(vec![2, 0, 1]).unwrap();
        let (a, _) = relabeled_pair();
        let moved = apply_isomorphism(&a, &p).unwrap();
        let back = apply_isomorphism(&moved, &p.inverse()).unwrap();
        assert!(a.max_abs_diff(&back) < 1e-15);
        // matrix form conjugation agrees with index form
        let t = p.matrix();
        let ti = p.inverse().matrix();
        let conj = t.matmul(&a).unwrap().matmul(&ti).unwrap();
        assert!(conj.max_abs_diff(&moved) < 1e-15);
        assert!(PermutationMap::new(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn isomorphism_search_finds_witness() {
        let (a, b) = relabeled_pair();
        let p = find_isomorphism(&a, &b, &tol()).unwrap().expect("isomorphic");
        let moved = apply_isomorphism(&a, &p).unwrap();
        assert!(moved.max_abs_diff(&b) < 1e-12);
        // self-isomorphism always exists
        assert!(find_isomorphism(&a, &a, &tol()).unwrap().is_some());
    }

    #[test]
    fn isomorphism_absence_is_decisive() {
        let (a, _) = relabeled_pair();
        let mut c = a.clone();
        c[(0, 2)] = Complex64::new(-1.5, 0.0);
        assert!(find_isomorphism(&a, &c, &tol()).unwrap().is_none());
        let big = DenseMatrix::identity(13);
        match find_isomorphism(&big, &big, &tol()) {
            Err(Error::SizeLimit { .. }) => {}
            other => panic!("expected SizeLimit, got {other:?}"),
        }
    }

    #[test]
    fn relabeling_changes_the_subspace_set() {
        let (a, b) = relabeled_pair();
        let v = is_jordan_equivalent(&a, &b, &tol()).unwrap();
        assert_eq!(v.isomorphic, Some(true));
        assert!(!v.jordan_equivalent);
        assert_eq!(v.failed_condition, Some(1));
    }

    #[test]
    fn single_chain_graphs_with_different_topologies_are_equivalent() {
        let (left, right) = chain_graph_pair();
        let v = is_jordan_equivalent(&left, &right, &tol()).unwrap();
        assert_eq!(v.isomorphic, Some(false), "edge counts differ");
        assert!(v.jordan_equivalent);
        assert_eq!(v.failed_condition, None);
        assert_eq!(v.subspace_matching, Some(vec![(0, 0)]));
    }

    #[test]
    fn block_transform_stays_in_the_class() {
        // J_2(2) ⊕ J_1(5) planted through a dense basis.
        let jm = real(&[
            vec![2.0, 1.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 5.0],
        ]);
        let x = real(&[
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
            vec![0.0, 1.0, 1.0],
        ]);
        let xi = linalg::inverse(&x, &tol()).unwrap();
        let a = x.matmul(&jm).unwrap().matmul(&xi).unwrap();
        let d = jordan_decompose(&a, &tol()).unwrap();
        let b = random_jordan_equivalent(&d, 7).unwrap();
        let v = is_jordan_equivalent(&a, &b.shift, &tol()).unwrap();
        assert!(v.jordan_equivalent, "failed: {:?}", v.failed_condition);
        // forms agree exactly
        assert_eq!(d.form(), b.form());
    }

    #[test]
    fn diagonalizable_class_has_one_element() {
        let jm = real(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 0.5],
        ]);
        let x = real(&[
            vec![1.0, 2.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
        ]);
        let xi = linalg::inverse(&x, &tol()).unwrap();
        let a = x.matmul(&jm).unwrap().matmul(&xi).unwrap();
        let d = jordan_decompose(&a, &tol()).unwrap();
        for seed in [1, 2, 3] {
            let b = random_jordan_equivalent(&d, seed).unwrap();
            assert!(
                a.max_abs_diff(&b.shift) < 1e-10,
                "scalar mixing must reproduce the shift (seed {seed})"
            );
        }
    }

    #[test]
    fn canonical_representative_flag() {
        // Upper triangular, constant diagonal, nonzero superdiagonal:
        // the coordinate chain spans the whole space, so the canonical
        // shift shares it.
        let a = real(&[
            vec![0.0, 1.0, 3.0, 0.0],
            vec![0.0, 0.0, 2.0, -1.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ]);
        let d = jordan_decompose(&a, &tol()).unwrap();
        let (j, in_class) = canonical_representative(&d).unwrap();
        assert!(in_class);
        assert!(j.max_abs_diff(&d.j) < 1e-15);
        // Diagonalizable with skew eigenvectors: kernel directions are not
        // coordinate directions, so the flag drops.
        let ones = real(&[
            vec![1.0, 1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0],
        ]);
        let d2 = jordan_decompose(&ones, &tol()).unwrap();
        let (_, in_class2) = canonical_representative(&d2).unwrap();
        assert!(!in_class2);
    }

    #[test]
    fn structural_patterns_are_recognized() {
        // single chain
        let mut j5 = DenseMatrix::zeros(5, 5);
        for i in 0..5 {
            j5[(i, i)] = Complex64::new(2.0, 0.0);
            if i + 1 < 5 {
                j5[(i, i + 1)] = Complex64::new(1.0, 0.0);
            }
        }
        let f = structural_membership_check(&j5).unwrap();
        assert_eq!(f.blocks.len(), 1);
        assert_eq!(f.blocks[0].size, 5);
        // two blocks, distinct diagonal values
        let a = real(&[
            vec![1.0, 4.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 3.0, 1.0, 5.0],
            vec![0.0, 0.0, 0.0, 3.0, 2.0],
            vec![0.0, 0.0, 0.0, 0.0, 3.0],
        ]);
        let f = structural_membership_check(&a).unwrap();
        let sizes: Vec<(f64, usize)> = f.blocks.iter().map(|b| (b.eigenvalue.re, b.size)).collect();
        assert!(sizes.contains(&(1.0, 2)) && sizes.contains(&(3.0, 3)));
        // two blocks, same value, shared band plus free corner
        let a = real(&[
            vec![1.0, 2.0, 7.0, 0.0, 0.0],
            vec![0.0, 1.0, 2.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0, 2.0],
            vec![0.0, 0.0, 0.0, 0.0, 1.0],
        ]);
        let f = structural_membership_check(&a).unwrap();
        let mut sizes: Vec<usize> = f.blocks.iter().map(|b| b.size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 3]);
        assert!(f.blocks.iter().all(|b| (b.eigenvalue.re - 1.0).abs() < 1e-12));
        // cross-validate against the full decomposition
        let d = jordan_decompose(&a, &tol()).unwrap();
        let mut expect: Vec<usize> = d.form().blocks.iter().map(|b| b.size).collect();
        expect.sort_unstable();
        assert_eq!(sizes, expect);
        // band mismatch between the blocks: no claim
        let mut bad = a.clone();
        bad[(3, 4)] = Complex64::new(5.0, 0.0);
        assert!(structural_membership_check(&bad).is_none());
        // dense (not block upper-triangular): no claim
        let dense = real(&[
            vec![0.5, -0.5, 0.5, 0.5],
            vec![0.5, -0.5, -0.5, -0.5],
            vec![0.0, 0.0, 0.5, -0.5],
            vec![0.0, 0.0, 0.5, -0.5],
        ]);
        assert!(structural_membership_check(&dense).is_none());
    }

    #[test]
    fn dual_basis_graph_of_canonical_shift_is_itself() {
        let mut j = DenseMatrix::zeros(3, 3);
        for i in 0..3 {
            if i + 1 < 3 {
                j[(i, i + 1)] = Complex64::new(1.0, 0.0);
            }
        }
        let d = jordan_decompose(&j, &tol()).unwrap();
        let (aw, guaranteed) = dual_basis_graph(&d).unwrap();
        assert!(guaranteed);
        assert!(aw.max_abs_diff(&j) < 1e-12);
    }

    #[test]
    fn dual_basis_graph_of_single_chain_matrix_stays_equivalent() {
        let dense = real(&[
            vec![0.5, -0.5, 0.5, 0.5],
            vec![0.5, -0.5, -0.5, -0.5],
            vec![0.0, 0.0, 0.5, -0.5],
            vec![0.0, 0.0, 0.5, -0.5],
        ]);
        let d = jordan_decompose(&dense, &tol()).unwrap();
        assert_eq!(d.chain_count(), 1, "matrix should be a single chain");
        let (aw, guaranteed) = dual_basis_graph(&d).unwrap();
        assert!(guaranteed);
        let v = is_jordan_equivalent(&dense, &aw, &tol()).unwrap();
        assert!(v.jordan_equivalent);
    }

    #[test]
    fn chain_generated_invariant_subspaces() {
        let (left, _) = chain_graph_pair();
        assert!(invariant_subspace_subset_check(&left, &left, &tol()).unwrap());
        // Single-chain matrix with skew chain vectors vs. the canonical
        // shift: equivalent, but the chain-generated invariant subspaces
        // differ (strict containment of structure).
        let dense = real(&[
            vec![0.5, -0.5, 0.5, 0.5],
            vec![0.5, -0.5, -0.5, -0.5],
            vec![0.0, 0.0, 0.5, -0.5],
            vec![0.0, 0.0, 0.5, -0.5],
        ]);
        assert!(!invariant_subspace_subset_check(&dense, &left, &tol()).unwrap());
        let big = DenseMatrix::identity(7);
        match invariant_subspace_subset_check(&big, &big, &tol()) {
            Err(Error::SizeLimit { .. }) => {}
            other => panic!("expected SizeLimit, got {other:?}"),
        }
    }
}
