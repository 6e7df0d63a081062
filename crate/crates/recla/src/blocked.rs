//! Blocked formulations with a fixed panel width.
//!
//! These sweep the matrix in panels of `block` columns, calling the
//! unblocked kernel on each diagonal block and level-3 kernels for the
//! coupling updates. They are the conventional tuned-library shape of
//! the algorithms and serve as the performance and accounting baseline
//! for the recursive drivers: for the inversion and LU the ledger
//! totals of both formulations agree exactly, for any block size and
//! any crossover.
//!
//! All kernel calls are recorded at level 1; there is no recursion.

use crate::flags::{Diag, Side, Trans, Uplo};
use crate::kernels::{Instrumented, KernelError};
use crate::matrix::MatrixView;

/// Default panel width. Wide enough that the level-3 updates dominate,
/// small enough that a panel stays cache resident.
pub const DEFAULT_BLOCK: usize = 128;

const LEVEL: usize = 1;

fn block_at(n: usize, k: usize, block: usize) -> usize {
    block.min(n - k).max(1)
}

/// In-place blocked triangular inversion; the blocked counterpart of
/// [`crate::recursive::rec_trtri`]. A zero diagonal (`Diag::NonUnit`)
/// is reported upfront, before any modification.
pub fn blocked_trtri(
    inst: &mut Instrumented,
    uplo: Uplo,
    diag: Diag,
    a: MatrixView,
    block: usize,
) -> Result<(), KernelError> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "trtri: matrix must be square");
    assert!(block >= 1, "trtri: block size must be positive");
    if diag == Diag::NonUnit {
        for i in 0..n {
            if a.get(i, i) == 0.0 {
                return Err(KernelError::SingularDiagonal(i));
            }
        }
    }

    let mut k = 0;
    while k < n {
        let kb = block_at(n, k, block);
        let akk = a.submatrix(k, k, kb, kb);
        match uplo {
            Uplo::Lower => {
                // Panel rows k..k+kb of the inverse, left of the diagonal:
                // A10 := -inv(A11) (A10 inv(A00)) with A00 already inverted.
                if k > 0 {
                    let a10 = a.submatrix(k, 0, kb, k);
                    let a00 = a.submatrix(0, 0, k, k);
                    inst.trmm(Side::Right, uplo, Trans::NoTrans, diag, 1.0, a00, a10, LEVEL);
                    inst.trsm(Side::Left, uplo, Trans::NoTrans, diag, -1.0, akk, a10, LEVEL)
                        .expect("diagonal scanned upfront");
                }
            }
            Uplo::Upper => {
                if k > 0 {
                    let a01 = a.submatrix(0, k, k, kb);
                    let a00 = a.submatrix(0, 0, k, k);
                    inst.trmm(Side::Left, uplo, Trans::NoTrans, diag, 1.0, a00, a01, LEVEL);
                    inst.trsm(Side::Right, uplo, Trans::NoTrans, diag, -1.0, akk, a01, LEVEL)
                        .expect("diagonal scanned upfront");
                }
            }
        }
        inst.trti2(uplo, diag, akk, LEVEL).map_err(|e| e.with_offset(k))?;
        k += kb;
    }
    Ok(())
}

/// In-place blocked Cholesky factorization (right-looking); the blocked
/// counterpart of [`crate::recursive::rec_potrf`].
pub fn blocked_potrf(inst: &mut Instrumented, uplo: Uplo, a: MatrixView, block: usize) -> Result<(), KernelError> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "potrf: matrix must be square");
    assert!(block >= 1, "potrf: block size must be positive");

    let mut k = 0;
    while k < n {
        let kb = block_at(n, k, block);
        let akk = a.submatrix(k, k, kb, kb);
        inst.potf2(uplo, akk, LEVEL).map_err(|e| e.with_offset(k))?;
        if k + kb < n {
            let rest = n - k - kb;
            match uplo {
                Uplo::Lower => {
                    let panel = a.submatrix(k + kb, k, rest, kb);
                    let trail = a.submatrix(k + kb, k + kb, rest, rest);
                    inst.trsm(Side::Right, uplo, Trans::Trans, Diag::NonUnit, 1.0, akk, panel, LEVEL)
                        .expect("factored block has a positive diagonal");
                    inst.syrk(uplo, Trans::NoTrans, -1.0, panel, 1.0, trail, LEVEL);
                }
                Uplo::Upper => {
                    let panel = a.submatrix(k, k + kb, kb, rest);
                    let trail = a.submatrix(k + kb, k + kb, rest, rest);
                    inst.trsm(Side::Left, uplo, Trans::Trans, Diag::NonUnit, 1.0, akk, panel, LEVEL)
                        .expect("factored block has a positive diagonal");
                    inst.syrk(uplo, Trans::Trans, -1.0, panel, 1.0, trail, LEVEL);
                }
            }
        }
        k += kb;
    }
    Ok(())
}

/// In-place blocked LU factorization with partial pivoting; the blocked
/// counterpart of [`crate::recursive::rec_getrf`]. `pivots` receives
/// `min(m, n)` global swap targets. Zero pivot columns are reported
/// after the sweep completes.
pub fn blocked_getrf(
    inst: &mut Instrumented,
    a: MatrixView,
    pivots: &mut Vec<usize>,
    block: usize,
) -> Result<(), KernelError> {
    let (m, n) = (a.rows(), a.cols());
    let r = m.min(n);
    assert!(block >= 1, "getrf: block size must be positive");
    pivots.clear();
    let mut first: Option<KernelError> = None;
    let mut panel_pivots = Vec::new();

    let mut k = 0;
    while k < r {
        let kb = block_at(r, k, block);
        let panel = a.submatrix(k, k, m - k, kb);
        if let Err(e) = inst.getf2(panel, &mut panel_pivots, LEVEL) {
            first.get_or_insert(e.with_offset(k));
        }
        // The panel's interchanges apply to the full row, left and right
        // of the panel.
        if k > 0 {
            inst.laswp(a.submatrix(k, 0, m - k, k), &panel_pivots, true, LEVEL);
        }
        if k + kb < n {
            let right = a.submatrix(k, k + kb, m - k, n - k - kb);
            inst.laswp(right, &panel_pivots, true, LEVEL);
            let lkk = a.submatrix(k, k, kb, kb);
            let u12 = a.submatrix(k, k + kb, kb, n - k - kb);
            inst.trsm(Side::Left, Uplo::Lower, Trans::NoTrans, Diag::Unit, 1.0, lkk, u12, LEVEL)
                .expect("unit diagonal cannot be singular");
            if k + kb < m {
                let l21 = a.submatrix(k + kb, k, m - k - kb, kb);
                let a22 = a.submatrix(k + kb, k + kb, m - k - kb, n - k - kb);
                inst.gemm(Trans::NoTrans, Trans::NoTrans, -1.0, l21, u12, 1.0, a22, LEVEL);
            }
        }
        pivots.extend(panel_pivots.iter().map(|p| p + k));
        k += kb;
    }
    match first {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
