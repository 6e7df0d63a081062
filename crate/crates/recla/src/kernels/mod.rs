//! The compute primitives every algorithm is built from.
//!
//! A [`KernelProvider`] supplies the dense matrix-matrix kernels
//! (`gemm`, `trmm`, `trsm`, `syrk`), row swapping, the unblocked base
//! kernels (`trti2`, `potf2`, `getf2`, `lauu2`) and a small-case
//! Sylvester solver. Algorithms never call a provider directly; they go
//! through [`Instrumented`], which times each call and records its cost
//! in the [`FlopLedger`].
//!
//! Dimension mismatches are programming errors and panic. Numerical
//! failures (zero diagonal, loss of definiteness, near-singular
//! Sylvester systems) are reported as [`KernelError`] with the index of
//! the first failure, mirroring the `info` convention of the kernel
//! ecosystem; partial results stay in place.

mod ledger;
#[cfg(feature = "platform-kernels")]
mod platform;
mod reference;

pub use ledger::{FlopLedger, Instrumented, KernelKind, LedgerEntry};
#[cfg(feature = "platform-kernels")]
pub use platform::{set_num_threads, PlatformProvider};
pub use reference::ReferenceProvider;

use std::fmt;

use crate::flags::{Diag, Side, Trans, Uplo};
use crate::matrix::MatrixView;

/// Numerical failure inside a kernel, carrying the 0-based index of the
/// first offending diagonal entry / pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelError {
    /// A triangular operand has an exactly zero diagonal entry.
    SingularDiagonal(usize),
    /// A Cholesky pivot was not positive.
    NotPositiveDefinite(usize),
    /// The Kronecker system of a Sylvester solve is singular to working
    /// precision; some eigenvalue pair satisfies
    /// `lambda_i(A) + isgn * lambda_j(B) ~ 0`.
    NearSingularSystem(usize),
}

impl KernelError {
    pub fn index(&self) -> usize {
        match *self {
            KernelError::SingularDiagonal(i)
            | KernelError::NotPositiveDefinite(i)
            | KernelError::NearSingularSystem(i) => i,
        }
    }

    /// The same error with its index shifted by `offset`; used by
    /// blocked and recursive drivers to turn a sub-block index into a
    /// global one.
    pub fn with_offset(self, offset: usize) -> Self {
        match self {
            KernelError::SingularDiagonal(i) => KernelError::SingularDiagonal(i + offset),
            KernelError::NotPositiveDefinite(i) => KernelError::NotPositiveDefinite(i + offset),
            KernelError::NearSingularSystem(i) => KernelError::NearSingularSystem(i + offset),
        }
    }
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::SingularDiagonal(i) => write!(f, "singular: zero diagonal entry at index {i}"),
            KernelError::NotPositiveDefinite(i) => write!(f, "matrix is not positive definite (pivot {i})"),
            KernelError::NearSingularSystem(i) => write!(f, "sylvester system is near singular (pivot {i})"),
        }
    }
}

impl std::error::Error for KernelError {}

/// The dense compute primitives, all operating in place on views.
///
/// Implementations must be deterministic for fixed inputs and must not
/// touch elements outside each operation's contracted write region.
pub trait KernelProvider: Sync {
    fn name(&self) -> &'static str;

    /// `c := alpha * op(a) * op(b) + beta * c`. `c` must not alias `a` or `b`.
    fn gemm(
        &self,
        transa: Trans,
        transb: Trans,
        alpha: f64,
        a: MatrixView,
        b: MatrixView,
        beta: f64,
        c: MatrixView,
    );

    /// `b := alpha * op(a) * b` (Left) or `alpha * b * op(a)` (Right)
    /// with triangular `a`; only the `uplo` triangle of `a` is read.
    fn trmm(&self, side: Side, uplo: Uplo, trans: Trans, diag: Diag, alpha: f64, a: MatrixView, b: MatrixView);

    /// Overwrites `b` with the solution of `op(a) * x = alpha * b`
    /// (Left) or `x * op(a) = alpha * b` (Right).
    fn trsm(
        &self,
        side: Side,
        uplo: Uplo,
        trans: Trans,
        diag: Diag,
        alpha: f64,
        a: MatrixView,
        b: MatrixView,
    ) -> Result<(), KernelError>;

    /// Symmetric rank-k update on the `uplo` triangle of `c`:
    /// `c := alpha * a * a^T + beta * c` (NoTrans) or with `a^T * a` (Trans).
    fn syrk(&self, uplo: Uplo, trans: Trans, alpha: f64, a: MatrixView, beta: f64, c: MatrixView);

    /// Applies row interchanges `i <-> pivots[i]`, in order when
    /// `forward`, in reverse order otherwise.
    fn laswp(&self, a: MatrixView, pivots: &[usize], forward: bool);

    /// Unblocked in-place triangular inversion.
    fn trti2(&self, uplo: Uplo, diag: Diag, a: MatrixView) -> Result<(), KernelError>;

    /// Unblocked Cholesky factorization of the `uplo` triangle.
    fn potf2(&self, uplo: Uplo, a: MatrixView) -> Result<(), KernelError>;

    /// Unblocked LU with partial pivoting. `pivots` is cleared and
    /// filled with `min(m, n)` swap targets (`pivots[i] >= i`). On a
    /// zero pivot column the factorization still completes and the
    /// first zero diagonal is reported.
    fn getf2(&self, a: MatrixView, pivots: &mut Vec<usize>) -> Result<(), KernelError>;

    /// Unblocked triangular product: lower `a := tril(L^T * L)`,
    /// upper `a := triu(U * U^T)`.
    fn lauu2(&self, uplo: Uplo, a: MatrixView);

    /// Small-case triangular Sylvester solve
    /// `a * x + isgn * x * b = c` (both `a` and `b` upper triangular,
    /// `isgn` is +1 or -1), overwriting `c` with `x`. Solves the dense
    /// `(m*n) x (m*n)` Kronecker system, so keep `m * n` small.
    fn sylv_base(&self, a: MatrixView, b: MatrixView, c: MatrixView, isgn: i32) -> Result<(), KernelError>;
}

/// Selects a provider from the `RECLA_KERNELS` environment variable
/// (`reference` or `platform`). Unknown values and, when the
/// `platform-kernels` feature is not compiled in, `platform` fall back
/// to the reference provider with a note on stderr.
pub fn provider_from_env() -> Box<dyn KernelProvider> {
    match std::env::var("RECLA_KERNELS").as_deref() {
        Ok("platform") => {
            #[cfg(feature = "platform-kernels")]
            {
                Box::new(PlatformProvider)
            }
            #[cfg(not(feature = "platform-kernels"))]
            {
                eprintln!("RECLA_KERNELS=platform but platform-kernels is not compiled in; using reference");
                Box::new(ReferenceProvider)
            }
        }
        Ok("reference") | Err(_) => Box::new(ReferenceProvider),
        Ok(other) => {
            eprintln!("unknown RECLA_KERNELS value {other:?}; using reference");
            Box::new(ReferenceProvider)
        }
    }
}
