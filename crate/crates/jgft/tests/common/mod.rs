//! Shared integration-test helpers: exactly planted spectral structures and
//! small independent oracles kept deliberately free of the library's own
//! linear algebra (schoolbook loops, direct partition arithmetic) so the
//! tests cross-check rather than echo the implementation.

#![allow(dead_code)]

use jgft::dense::DenseMatrix;
use jgft::exact::ExactMatrix;
use jgft::scalar::ExactScalar;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ───────────────────────── planted structures ─────────────────────────

/// One planted component: eigenvalue and block size.
#[derive(Clone, Debug)]
pub struct PlantedBlock {
    pub lambda: Complex64,
    pub size: usize,
}

/// A graph built as `X J X⁻¹` over the Gaussian rationals, so its spectral
/// structure is known by construction and every entry is exact.
pub struct Planted {
    pub a: ExactMatrix,
    pub blocks: Vec<PlantedBlock>,
    pub n: usize,
}

#[derive(Clone, Copy)]
pub struct PlantSpec {
    pub max_n: usize,
    pub max_block: usize,
    /// Give every block its own eigenvalue (no derogatory structures).
    pub distinct_eigenvalues: bool,
    /// Restrict to size-1 blocks.
    pub diagonalizable: bool,
}

impl PlantSpec {
    pub fn general(max_n: usize, max_block: usize) -> Self {
        PlantSpec {
            max_n,
            max_block,
            distinct_eigenvalues: false,
            diagonalizable: false,
        }
    }

    pub fn one_block_per_eigenvalue(max_n: usize, max_block: usize) -> Self {
        PlantSpec {
            max_n,
            max_block,
            distinct_eigenvalues: true,
            diagonalizable: false,
        }
    }

    pub fn diagonalizable_distinct(max_n: usize) -> Self {
        PlantSpec {
            max_n,
            max_block: 1,
            distinct_eigenvalues: true,
            diagonalizable: true,
        }
    }
}

fn gauss_int(re: i64, im: i64) -> ExactScalar {
    ExactScalar::from_f64_exact(re as f64, im as f64).expect("small integers are exact")
}

/// Deterministic planted structure for `seed`.
pub fn plant(seed: u64, spec: PlantSpec) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let n = rng.gen_range(2..=spec.max_n);

    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let cap = spec.max_block.min(left);
        let s = if spec.diagonalizable {
            1
        } else {
            rng.gen_range(1..=cap)
        };
        sizes.push(s);
        left -= s;
    }

    // Gaussian-integer pool: pairwise separation at least 1, so numeric
    // clustering can never merge two planted eigenvalues.
    let mut pool: Vec<(i64, i64)> = Vec::new();
    for re in -3..=3i64 {
        for im in -2..=2i64 {
            pool.push((re, im));
        }
    }
    pool.shuffle(&mut rng);
    assert!(pool.len() >= sizes.len());

    let assignment: Vec<(i64, i64)> = if spec.distinct_eigenvalues {
        sizes.iter().enumerate().map(|(k, _)| pool[k]).collect()
    } else {
        let distinct = rng.gen_range(1..=sizes.len());
        (0..sizes.len())
            .map(|_| pool[rng.gen_range(0..distinct)])
            .collect()
    };

    let mut j = ExactMatrix::zeros(n, n);
    let mut col = 0;
    let mut blocks = Vec::new();
    for (s, (re, im)) in sizes.iter().zip(&assignment) {
        for k in 0..*s {
            j[(col + k, col + k)] = gauss_int(*re, *im);
            if k + 1 < *s {
                j[(col + k, col + k + 1)] = ExactScalar::one();
            }
        }
        blocks.push(PlantedBlock {
            lambda: Complex64::new(*re as f64, *im as f64),
            size: *s,
        });
        col += s;
    }

    let (x, x_inv) = random_similarity(&mut rng, n);
    let a = x
        .matmul(&j)
        .and_then(|m| m.matmul(&x_inv))
        .expect("square product");

    Planted { a, blocks, n }
}

/// `X = L·U` with unit diagonals and sparse `±1` fill: determinant one,
/// exact integer inverse. Both factors are integer matrices, so the
/// `κ₁ = ‖X‖₁‖X⁻¹‖₁` estimate below is exact; resampling keeps every
/// planted basis well conditioned, which is what lets the suites demand
/// projector algebra at the 1e-8 level from float images of exact data.
fn random_similarity(rng: &mut ChaCha8Rng, n: usize) -> (ExactMatrix, ExactMatrix) {
    loop {
        let mut l = ExactMatrix::identity(n);
        let mut u = ExactMatrix::identity(n);
        for i in 0..n {
            for k in 0..i {
                l[(i, k)] = sparse_sign(rng);
            }
            for k in (i + 1)..n {
                u[(i, k)] = sparse_sign(rng);
            }
        }
        let x = l.matmul(&u).expect("square product");
        let x_inv = x.inverse().expect("unit determinant");
        let cond = x.to_dense().induced_l1_norm() * x_inv.to_dense().induced_l1_norm();
        if cond <= 256.0 {
            return (x, x_inv);
        }
    }
}

/// `-1`, `0`, or `1`, nonzero a quarter of the time.
fn sparse_sign(rng: &mut ChaCha8Rng) -> ExactScalar {
    match rng.gen_range(0..8u32) {
        0 => ExactScalar::from_int(-1),
        1 => ExactScalar::from_int(1),
        _ => ExactScalar::from_int(0),
    }
}

/// A single length-`n` chain at `lambda`, hidden by a random similarity.
pub fn plant_unicellular(seed: u64, n: usize, lambda: (i64, i64)) -> ExactMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0xd134_2543_de82_ef95));
    let mut j = ExactMatrix::zeros(n, n);
    for k in 0..n {
        j[(k, k)] = gauss_int(lambda.0, lambda.1);
        if k + 1 < n {
            j[(k, k + 1)] = ExactScalar::one();
        }
    }
    let (x, x_inv) = random_similarity(&mut rng, n);
    x.matmul(&j)
        .and_then(|m| m.matmul(&x_inv))
        .expect("square product")
}

/// The planted block-size multiset for each distinct eigenvalue, sizes
/// sorted descending — the ground truth to compare a decomposition against.
pub fn planted_form(blocks: &[PlantedBlock]) -> Vec<(Complex64, Vec<usize>)> {
    let mut out: Vec<(Complex64, Vec<usize>)> = Vec::new();
    for b in blocks {
        match out.iter_mut().find(|(l, _)| (*l - b.lambda).norm() < 0.5) {
            Some((_, sizes)) => sizes.push(b.size),
            None => out.push((b.lambda, vec![b.size])),
        }
    }
    for (_, sizes) in out.iter_mut() {
        sizes.sort_unstable_by(|a, b| b.cmp(a));
    }
    out
}

// ───────────────────────── oracles ─────────────────────────

/// Schoolbook matrix product, independent of the library's kernels.
pub fn matmul_oracle(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.cols(), b.rows());
    DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum()
    })
}

/// Conjugate of an integer partition given in weakly decreasing order.
pub fn conjugate_partition(parts: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut level = 1;
    loop {
        let count = parts.iter().filter(|&&p| p >= level).count();
        if count == 0 {
            return out;
        }
        out.push(count);
        level += 1;
    }
}

/// Largest entry difference between two complex matrices.
pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.max_abs_diff(b)
}

// ───────────────────────── random inputs ─────────────────────────

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut image: Vec<usize> = (0..n).collect();
    image.shuffle(rng);
    image
}

/// Permutation matrix `T` with `T e_i = e_{image[i]}`.
pub fn permutation_matrix(image: &[usize]) -> DenseMatrix {
    let n = image.len();
    DenseMatrix::from_fn(n, n, |r, c| {
        if image[c] == r {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn apply_permutation(image: &[usize], s: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); s.len()];
    for (i, &x) in s.iter().enumerate() {
        out[image[i]] = x;
    }
    out
}
