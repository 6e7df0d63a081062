//! Dense linear algebra built from a small set of compute kernels.
//!
//! The crate provides recursive and blocked formulations of one-sided
//! factorizations and triangular solvers (inversion, Cholesky, LU,
//! triangular product, reduction of symmetric-definite generalized
//! eigenproblems, triangular Sylvester equations). The recursive
//! drivers split at cache-friendly aligned midpoints and bottom out in
//! unblocked kernels once a crossover size is reached, which shifts
//! almost all arithmetic into large matrix-matrix kernels without any
//! problem-size tuning.
//!
//! All algorithms run against a pluggable [`kernels::KernelProvider`]
//! through an instrumentation layer that records the exact cost and
//! recursion level of every kernel call, so the distribution of work
//! can be measured rather than estimated.

pub mod blocked;
pub mod flags;
pub mod kernels;
pub mod matrix;
pub mod oracle;
pub mod recursive;

pub use flags::{Diag, Side, Trans, Uplo};
pub use kernels::{provider_from_env, FlopLedger, Instrumented, KernelError, KernelProvider, ReferenceProvider};
pub use matrix::{DenseMatrix, MatrixView};
