//! Built-in example graphs used by the tests and the `demo` subcommand.
//!
//! Everything here is stored as exact rationals so the structural results
//! (Jordan form, chain spans, total variations) are bit-stable across runs.

use crate::dense::DenseMatrix;
use crate::exact::ExactMatrix;
use crate::scalar::ExactScalar;

/// Index (0-based) of the freely varied entry in the second chain vector of
/// the demo graph's two-cycle spectral component; the solver recovers the
/// dependent entries automatically.
pub const DEMO_FREE_COMPONENT: usize = 5;

/// Parameter value at which the demo profile attains its maximum.
pub const DEMO_PEAK_PARAMETER: (i64, i64) = (59, 15);

/// Ten-node weighted digraph whose shift has one simple eigenvalue 4, the
/// three cube roots of −6, and a defective eigenvalue 0 carrying one chain
/// of length four and one of length two.
pub fn demo_shift() -> ExactMatrix {
    ExactMatrix::from_int_rows(&[
        vec![0, 0, 0, -2, 0, -3, 0, 0, 0, 0],
        vec![0, 0, 0, 0, 0, 0, 0, 1, 0, 0],
        vec![5, 0, 0, 0, 0, 0, 2, 0, 0, 0],
        vec![0, 0, 0, 0, 6, 0, 0, 0, 0, 0],
        vec![0, 0, 0, 0, 0, 0, 0, 1, 0, 0],
        vec![0, 0, 0, 0, 0, 0, 0, 0, -2, 0],
        vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 3],
        vec![0, 0, 0, 0, 0, 0, 0, 4, 0, 0],
        vec![0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        vec![0, 0, -1, 0, 0, 0, 0, 0, 0, 0],
    ])
}

fn chain_pair(second: &[(i64, i64)]) -> ExactMatrix {
    let first: [(i64, i64); 10] = [
        (-2, 1),
        (0, 1),
        (0, 1),
        (3, 1),
        (0, 1),
        (-2, 1),
        (5, 1),
        (0, 1),
        (0, 1),
        (0, 1),
    ];
    let mut m = ExactMatrix::zeros(10, 2);
    for (i, &(p, q)) in first.iter().enumerate() {
        m[(i, 0)] = ExactScalar::from_ratio(p, q);
    }
    for (i, &(p, q)) in second.iter().enumerate() {
        m[(i, 1)] = ExactScalar::from_ratio(p, q);
    }
    m
}

/// Three valid chains for the length-two block at eigenvalue 0 of the demo
/// shift (as unnormalized 10×2 column pairs). They share the eigenvector but
/// differ in the generalized eigenvector, so each spans a different
/// invariant subspace; their normalized total variations are roughly
/// 1.181, 1.389, and exactly 2.
pub fn demo_block_chain(variant: usize) -> ExactMatrix {
    match variant {
        0 => chain_pair(&[
            (0, 1),
            (0, 1),
            (0, 1),
            (1, 1),
            (1, 2),
            (0, 1),
            (0, 1),
            (0, 1),
            (1, 1),
            (5, 3),
        ]),
        1 => chain_pair(&[
            (0, 1),
            (0, 1),
            (0, 1),
            (-1, 2),
            (1, 2),
            (1, 1),
            (0, 1),
            (0, 1),
            (1, 1),
            (5, 3),
        ]),
        2 => chain_pair(&[
            (0, 1),
            (0, 1),
            (0, 1),
            (-49, 10),
            (1, 2),
            (59, 15),
            (0, 1),
            (0, 1),
            (1, 1),
            (5, 3),
        ]),
        _ => panic!("demo block chain variants are 0, 1, and 2"),
    }
}

/// An alternative 10×2 column pair for the same block. Substituting it for
/// the chain rebuilds a different operator with the same canonical form;
/// note that its columns do **not** lie in the kernel of the squared demo
/// shift, so it spans a different subspace than any of the
/// [`demo_block_chain`] choices and its spectral projectors differ from
/// theirs.
pub fn demo_alternate_columns() -> ExactMatrix {
    let mut m = ExactMatrix::zeros(10, 2);
    let first: [(i64, i64); 10] = [
        (1, 1),
        (0, 1),
        (0, 1),
        (3, 1),
        (0, 1),
        (1, 1),
        (2, 1),
        (0, 1),
        (0, 1),
        (0, 1),
    ];
    let second: [(i64, i64); 10] = [
        (0, 1),
        (0, 1),
        (0, 1),
        (-1, 1),
        (1, 2),
        (1, 1),
        (0, 1),
        (0, 1),
        (1, 1),
        (5, 3),
    ];
    for i in 0..10 {
        m[(i, 0)] = ExactScalar::from_ratio(first[i].0, first[i].1);
        m[(i, 1)] = ExactScalar::from_ratio(second[i].0, second[i].1);
    }
    m
}

/// Two 3×3 weighted digraphs that are relabelings of each other (one is a
/// node permutation of the other) yet have one eigenvector direction that
/// differs, so they are isomorphic but not spectrally equivalent.
pub fn isomorphic_inequivalent_pair() -> (DenseMatrix, DenseMatrix) {
    let a = DenseMatrix::from_real_rows(&[
        vec![2.0, 0.0, -1.0],
        vec![0.0, 2.0, -1.0],
        vec![0.0, 0.0, 1.0],
    ]);
    let b = DenseMatrix::from_real_rows(&[
        vec![1.0, 0.0, 0.0],
        vec![-1.0, 2.0, 0.0],
        vec![-1.0, 0.0, 2.0],
    ]);
    (a, b)
}

/// Two 0/1 chain graphs on four nodes whose shifts are both nilpotent with
/// a single length-four chain: one is the plain directed path, the other
/// has one extra edge. Same canonical structure and single spectral
/// component (all of ℂ⁴), but different edge counts — equivalent without
/// being isomorphic.
pub fn equivalent_nonisomorphic_pair() -> (DenseMatrix, DenseMatrix) {
    let left = DenseMatrix::from_real_rows(&[
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0, 0.0],
    ]);
    let right = DenseMatrix::from_real_rows(&[
        vec![0.0, 1.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0, 0.0],
    ]);
    (left, right)
}

/// A 4×4 single-chain (nilpotent) shift whose eigenvector is not aligned
/// with any canonical coordinate vector; replacing its nonzero entries by
/// ones would destroy the single-chain structure.
pub fn dense_unicellular() -> ExactMatrix {
    let h = |p: i64| ExactScalar::from_ratio(p, 2);
    let rows = [
        [h(1), h(-1), h(1), h(1)],
        [h(1), h(-1), h(-1), h(-1)],
        [h(0), h(0), h(1), h(-1)],
        [h(0), h(0), h(1), h(-1)],
    ];
    let mut m = ExactMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = rows[i][j].clone();
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::{jordan_decompose, jordan_decompose_numeric};
    use crate::tolerance::ToleranceConfig;

    #[test]
    fn demo_chains_satisfy_the_recurrence() {
        let a = demo_shift();
        for variant in 0..3 {
            let c = demo_block_chain(variant);
            let av = a.matmul(&c).unwrap();
            // A v1 = 0 and A v2 = v1.
            for i in 0..10 {
                assert!(av[(i, 0)].is_zero(), "variant {variant}: first column");
                assert_eq!(av[(i, 1)], c[(i, 0)], "variant {variant}: second column");
            }
        }
    }

    #[test]
    fn alternate_columns_leave_the_kernel_tower() {
        let a = demo_shift();
        let sq = a.matmul(&a).unwrap();
        let image = sq.matmul(&demo_alternate_columns()).unwrap();
        assert!(!image.is_zero(), "columns must escape the squared kernel");
    }

    #[test]
    fn demo_structure_agrees_between_exact_and_numeric_paths() {
        let tol = ToleranceConfig::default();
        let a = demo_shift();
        let dense = a.to_dense();
        let exact = jordan_decompose(&dense, &tol).unwrap();
        let numeric = jordan_decompose_numeric(&dense, &tol).unwrap();
        // Same canonical form, and matched chain spans throughout.
        let cmp = crate::equiv::compare_decompositions(&exact, &numeric).unwrap();
        assert!(
            cmp.jordan_equivalent,
            "paths disagree: failed condition {:?}",
            cmp.failed_condition
        );
        // The defective eigenvalue carries kernel dimensions 2, 4, 5, 6.
        let zero = exact
            .eigenvalues
            .iter()
            .find(|e| e.value.norm() < 1e-6)
            .unwrap();
        assert_eq!(zero.kernel_dims, vec![2, 4, 5, 6]);
        assert_eq!(zero.block_sizes, vec![4, 2]);
        let zero_n = numeric
            .eigenvalues
            .iter()
            .find(|e| e.value.norm() < 1e-3)
            .unwrap();
        assert_eq!(zero_n.kernel_dims, vec![2, 4, 5, 6]);
        assert_eq!(zero_n.block_sizes, vec![4, 2]);
    }
}
