//! Seeded test-matrix generators.
//!
//! All generators draw from a ChaCha8 stream seeded with the caller's
//! seed, filling column by column, so a given `(shape, seed)` pair is
//! reproducible down to the bit on every platform.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::DenseMatrix;
use crate::flags::Uplo;

/// A well-conditioned random triangular matrix: diagonal uniform in
/// `[1, 2]`, strict off-diagonal entries on the `uplo` side uniform in
/// `[-1, 1]` scaled by `1/n`, the other triangle zero.
///
/// The scaling keeps condition numbers modest, so residual tolerances
/// stay meaningful across sizes.
pub fn gen_triangular(n: usize, uplo: Uplo, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag = Uniform::new_inclusive(1.0, 2.0);
    let off = Uniform::new_inclusive(-1.0, 1.0);
    let scale = if n > 0 { 1.0 / n as f64 } else { 1.0 };
    let mut a = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let in_triangle = match uplo {
                Uplo::Lower => i > j,
                Uplo::Upper => i < j,
            };
            if i == j {
                a.set(i, j, diag.sample(&mut rng));
            } else if in_triangle {
                a.set(i, j, off.sample(&mut rng) * scale);
            }
        }
    }
    a
}

/// A random symmetric positive definite matrix `G * G^T + n * I` with
/// `G` uniform in `[-1, 1]`.
pub fn gen_spd(n: usize, seed: u64) -> DenseMatrix {
    let g = gen_uniform(n, n, seed);
    let mut a = DenseMatrix::zeros(n, n);
    // fill the lower triangle and mirror it, so the output is
    // bitwise symmetric
    for j in 0..n {
        for i in j..n {
            let mut dot = 0.0;
            for k in 0..n {
                dot += g.get(i, k) * g.get(j, k);
            }
            if i == j {
                dot += n as f64;
            }
            a.set(i, j, dot);
            a.set(j, i, dot);
        }
    }
    a
}

/// A random `m x n` matrix with entries uniform in `[-1, 1]`.
pub fn gen_uniform(m: usize, n: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-1.0, 1.0);
    let mut a = DenseMatrix::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            a.set(i, j, dist.sample(&mut rng));
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_pure_in_seed() {
        assert_eq!(gen_triangular(17, Uplo::Lower, 3), gen_triangular(17, Uplo::Lower, 3));
        assert_eq!(gen_spd(9, 42), gen_spd(9, 42));
        assert_eq!(gen_uniform(4, 6, 1), gen_uniform(4, 6, 1));
        assert_ne!(gen_uniform(4, 6, 1), gen_uniform(4, 6, 2));
    }

    #[test]
    fn triangular_structure() {
        let a = gen_triangular(12, Uplo::Lower, 5);
        for j in 0..12 {
            assert!(a.get(j, j) >= 1.0 && a.get(j, j) <= 2.0);
            for i in 0..j {
                assert_eq!(a.get(i, j), 0.0, "upper part must stay zero");
            }
            for i in j + 1..12 {
                assert!(a.get(i, j).abs() <= 1.0 / 12.0);
            }
        }
        let u = gen_triangular(12, Uplo::Upper, 5);
        for j in 0..12 {
            for i in j + 1..12 {
                assert_eq!(u.get(i, j), 0.0, "lower part must stay zero");
            }
        }
    }

    #[test]
    fn triangular_scalar_case() {
        let a = gen_triangular(1, Uplo::Lower, 99);
        assert!(a.get(0, 0) >= 1.0 && a.get(0, 0) <= 2.0);
    }

    #[test]
    fn spd_is_exactly_symmetric() {
        let a = gen_spd(11, 7);
        for j in 0..11 {
            for i in 0..11 {
                assert_eq!(a.get(i, j).to_bits(), a.get(j, i).to_bits());
            }
        }
    }

    #[test]
    fn spd_scalar_case() {
        let a = gen_spd(1, 13);
        assert!(a.get(0, 0) >= 1.0 && a.get(0, 0) <= 2.0);
    }

    #[test]
    fn empty_sizes_are_legal() {
        assert_eq!(gen_triangular(0, Uplo::Lower, 1).rows(), 0);
        assert_eq!(gen_spd(0, 1).rows(), 0);
    }
}
