//! Recursive formulations of the dense one-sided operations.
//!
//! Each driver splits its matrix at an aligned midpoint
//! ([`split_point`]), recurses on the two diagonal blocks and couples
//! them with a constant number of large matrix-matrix kernels. The
//! recursion bottoms out in the corresponding unblocked kernel once the
//! dimension is at or below the `crossover`. No block-size tuning is
//! involved: the split rule alone sends almost all arithmetic into the
//! largest possible kernel calls, at every scale at once.
//!
//! All drivers operate in place, record every kernel call in the
//! [`Instrumented`] ledger (a call issued by a depth-`d` invocation is
//! recorded at level `d + 1`; the external call has depth 0), and
//! report numerical failures with global indices.

use std::time::Instant;

use crate::flags::{Diag, Side, Trans, Uplo};
use crate::kernels::{Instrumented, KernelError};
use crate::matrix::{partition_cols, partition_quadrants, split_point, DenseMatrix, MatrixView, SPLIT_ALIGN};

/// Default dimension below which the drivers switch to unblocked
/// kernels. Recursing further would shrink kernel calls past the point
/// where their overhead is repaid.
pub const DEFAULT_CROSSOVER: usize = 24;

/// The effective crossover: dimensions up to and including this stay in
/// the unblocked kernel. The floor of 1 keeps splits legal (a split
/// needs at least two rows) whatever the configured crossover says.
fn base_cutoff(crossover: usize) -> usize {
    crossover.max(1)
}

fn scan_diagonal(a: MatrixView) -> Result<(), KernelError> {
    for i in 0..a.rows() {
        if a.get(i, i) == 0.0 {
            return Err(KernelError::SingularDiagonal(i));
        }
    }
    Ok(())
}

/// In-place recursive triangular inversion.
///
/// With `Diag::NonUnit` the whole diagonal is validated upfront and a
/// zero entry is reported before anything is modified.
pub fn rec_trtri(
    inst: &mut Instrumented,
    uplo: Uplo,
    diag: Diag,
    a: MatrixView,
    crossover: usize,
) -> Result<(), KernelError> {
    assert_eq!(a.rows(), a.cols(), "trtri: matrix must be square");
    if diag == Diag::NonUnit {
        scan_diagonal(a)?;
    }
    trtri_inner(inst, uplo, diag, a, crossover, false, 0)
}

/// [`rec_trtri`] with the triangular solve replaced by a multiplication
/// with the already inverted trailing block. One of the two coupling
/// kernels becomes a `trmm`, which is usually faster, but the inverse of
/// an ill-conditioned block is applied explicitly, so rounding errors
/// can be amplified. Results differ from [`rec_trtri`] in the last few
/// digits even for benign inputs.
pub fn rec_trtri_unstable(
    inst: &mut Instrumented,
    uplo: Uplo,
    diag: Diag,
    a: MatrixView,
    crossover: usize,
) -> Result<(), KernelError> {
    assert_eq!(a.rows(), a.cols(), "trtri: matrix must be square");
    if diag == Diag::NonUnit {
        scan_diagonal(a)?;
    }
    trtri_inner(inst, uplo, diag, a, crossover, true, 0)
}

fn trtri_inner(
    inst: &mut Instrumented,
    uplo: Uplo,
    diag: Diag,
    a: MatrixView,
    crossover: usize,
    multiply_only: bool,
    depth: usize,
) -> Result<(), KernelError> {
    let n = a.rows();
    let level = depth + 1;
    if n <= base_cutoff(crossover) {
        return inst.trti2(uplo, diag, a, level);
    }
    let plan = split_point(n, SPLIT_ALIGN);
    let (tl, tr, bl, br) = partition_quadrants(a, plan);
    let n1 = plan.n1;

    trtri_inner(inst, uplo, diag, tl, crossover, multiply_only, depth + 1)?;
    match uplo {
        Uplo::Lower => {
            // inv(A) off-diagonal block is -inv(A11) A10 inv(A00).
            inst.trmm(Side::Right, uplo, Trans::NoTrans, diag, 1.0, tl, bl, level);
            if multiply_only {
                trtri_inner(inst, uplo, diag, br, crossover, multiply_only, depth + 1)
                    .map_err(|e| e.with_offset(n1))?;
                inst.trmm(Side::Left, uplo, Trans::NoTrans, diag, -1.0, br, bl, level);
            } else {
                inst.trsm(Side::Left, uplo, Trans::NoTrans, diag, -1.0, br, bl, level)
                    .map_err(|e| e.with_offset(n1))?;
                trtri_inner(inst, uplo, diag, br, crossover, multiply_only, depth + 1)
                    .map_err(|e| e.with_offset(n1))?;
            }
        }
        Uplo::Upper => {
            // inv(A) off-diagonal block is -inv(A00) A01 inv(A11).
            inst.trmm(Side::Left, uplo, Trans::NoTrans, diag, 1.0, tl, tr, level);
            if multiply_only {
                trtri_inner(inst, uplo, diag, br, crossover, multiply_only, depth + 1)
                    .map_err(|e| e.with_offset(n1))?;
                inst.trmm(Side::Right, uplo, Trans::NoTrans, diag, -1.0, br, tr, level);
            } else {
                inst.trsm(Side::Right, uplo, Trans::NoTrans, diag, -1.0, br, tr, level)
                    .map_err(|e| e.with_offset(n1))?;
                trtri_inner(inst, uplo, diag, br, crossover, multiply_only, depth + 1)
                    .map_err(|e| e.with_offset(n1))?;
            }
        }
    }
    Ok(())
}

/// In-place recursive Cholesky factorization of the `uplo` triangle:
/// `A = L L^T` (lower) or `A = U^T U` (upper). Stops at the first
/// non-positive pivot, leaving the leading part factored.
pub fn rec_potrf(inst: &mut Instrumented, uplo: Uplo, a: MatrixView, crossover: usize) -> Result<(), KernelError> {
    assert_eq!(a.rows(), a.cols(), "potrf: matrix must be square");
    potrf_inner(inst, uplo, a, crossover, 0)
}

fn potrf_inner(
    inst: &mut Instrumented,
    uplo: Uplo,
    a: MatrixView,
    crossover: usize,
    depth: usize,
) -> Result<(), KernelError> {
    let n = a.rows();
    let level = depth + 1;
    if n <= base_cutoff(crossover) {
        return inst.potf2(uplo, a, level);
    }
    let plan = split_point(n, SPLIT_ALIGN);
    let (tl, tr, bl, br) = partition_quadrants(a, plan);
    let n1 = plan.n1;

    potrf_inner(inst, uplo, tl, crossover, depth + 1)?;
    match uplo {
        Uplo::Lower => {
            // A10 := A10 L00^-T, then A11 -= L10 L10^T.
            inst.trsm(Side::Right, uplo, Trans::Trans, Diag::NonUnit, 1.0, tl, bl, level)
                .expect("factored block has a positive diagonal");
            inst.syrk(uplo, Trans::NoTrans, -1.0, bl, 1.0, br, level);
        }
        Uplo::Upper => {
            // A01 := U00^-T A01, then A11 -= U01^T U01.
            inst.trsm(Side::Left, uplo, Trans::Trans, Diag::NonUnit, 1.0, tl, tr, level)
                .expect("factored block has a positive diagonal");
            inst.syrk(uplo, Trans::Trans, -1.0, tr, 1.0, br, level);
        }
    }
    potrf_inner(inst, uplo, br, crossover, depth + 1).map_err(|e| e.with_offset(n1))
}

/// In-place recursive LU factorization with partial pivoting of an
/// `m x n` matrix. `pivots` receives `min(m, n)` global swap targets
/// (row `i` was exchanged with `pivots[i]`). A singular pivot column is
/// reported after the factorization completes, like the unblocked
/// kernel.
pub fn rec_getrf(
    inst: &mut Instrumented,
    a: MatrixView,
    pivots: &mut Vec<usize>,
    crossover: usize,
) -> Result<(), KernelError> {
    pivots.clear();
    getrf_inner(inst, a, pivots, crossover, 0)
}

fn getrf_inner(
    inst: &mut Instrumented,
    a: MatrixView,
    pivots: &mut Vec<usize>,
    crossover: usize,
    depth: usize,
) -> Result<(), KernelError> {
    // Each invocation starts with an empty vector and leaves min(m, n)
    // entries in it; the base kernel clears it before filling.
    debug_assert!(pivots.is_empty());
    let (m, n) = (a.rows(), a.cols());
    let r = m.min(n);
    let level = depth + 1;
    if r <= base_cutoff(crossover) {
        return inst.getf2(a, pivots, level);
    }
    let n1 = split_point(r, SPLIT_ALIGN).n1;
    let (left, right) = partition_cols(a, n1);

    let mut first = getrf_inner(inst, left, pivots, crossover, depth + 1).err();

    // Carry the left panel's interchanges across, solve for U12 and
    // form the Schur complement.
    inst.laswp(right, pivots, true, level);
    let l11 = left.submatrix(0, 0, n1, n1);
    let u12 = right.submatrix(0, 0, n1, n - n1);
    inst.trsm(Side::Left, Uplo::Lower, Trans::NoTrans, Diag::Unit, 1.0, l11, u12, level)
        .expect("unit diagonal cannot be singular");
    let l21 = left.submatrix(n1, 0, m - n1, n1);
    let a22 = right.submatrix(n1, 0, m - n1, n - n1);
    inst.gemm(Trans::NoTrans, Trans::NoTrans, -1.0, l21, u12, 1.0, a22, level);

    let mut lower_pivots = Vec::new();
    if let Err(e) = getrf_inner(inst, a22, &mut lower_pivots, crossover, depth + 1) {
        first.get_or_insert(e.with_offset(n1));
    }
    // The trailing interchanges also apply to the rows of L21.
    inst.laswp(l21, &lower_pivots, true, level);
    pivots.extend(lower_pivots.iter().map(|p| p + n1));

    match first {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// In-place recursive triangular product: lower `A := tril(L^T L)`,
/// upper `A := triu(U U^T)`; the usual second half of forming the
/// inverse of a symmetric positive definite matrix from its Cholesky
/// factor.
pub fn rec_lauum(inst: &mut Instrumented, uplo: Uplo, a: MatrixView, crossover: usize) {
    assert_eq!(a.rows(), a.cols(), "lauum: matrix must be square");
    lauum_inner(inst, uplo, a, crossover, 0);
}

fn lauum_inner(inst: &mut Instrumented, uplo: Uplo, a: MatrixView, crossover: usize, depth: usize) {
    let n = a.rows();
    let level = depth + 1;
    if n <= base_cutoff(crossover) {
        inst.lauu2(uplo, a, level);
        return;
    }
    let plan = split_point(n, SPLIT_ALIGN);
    let (tl, tr, bl, br) = partition_quadrants(a, plan);

    lauum_inner(inst, uplo, tl, crossover, depth + 1);
    match uplo {
        Uplo::Lower => {
            // A00 += L10^T L10 while L10 is intact, then A10 := L11^T L10.
            inst.syrk(uplo, Trans::Trans, 1.0, bl, 1.0, tl, level);
            inst.trmm(Side::Left, uplo, Trans::Trans, Diag::NonUnit, 1.0, br, bl, level);
        }
        Uplo::Upper => {
            // A00 += U01 U01^T while U01 is intact, then A01 := U01 U11^T.
            inst.syrk(uplo, Trans::NoTrans, 1.0, tr, 1.0, tl, level);
            inst.trmm(Side::Right, uplo, Trans::Trans, Diag::NonUnit, 1.0, br, tr, level);
        }
    }
    lauum_inner(inst, uplo, br, crossover, depth + 1);
}

/// Recursive reduction of the symmetric-definite generalized
/// eigenproblem `A x = lambda B x` to standard form, given the Cholesky
/// factor of `B` in `b`: lower `A := inv(L) A inv(L^T)`, upper
/// `A := inv(U^T) A inv(U)`. Only the `uplo` triangles of `a` and `b`
/// are referenced. A zero diagonal in `b` is rejected upfront.
pub fn rec_sygst(
    inst: &mut Instrumented,
    uplo: Uplo,
    a: MatrixView,
    b: MatrixView,
    crossover: usize,
) -> Result<(), KernelError> {
    assert_eq!(a.rows(), a.cols(), "sygst: matrix must be square");
    assert_eq!((b.rows(), b.cols()), (a.rows(), a.cols()), "sygst: factor shape mismatch");
    scan_diagonal(b)?;
    sygst_inner(inst, uplo, a, b, crossover, 0);
    Ok(())
}

fn sygst_inner(inst: &mut Instrumented, uplo: Uplo, a: MatrixView, b: MatrixView, crossover: usize, depth: usize) {
    let n = a.rows();
    let level = depth + 1;
    if n <= base_cutoff(crossover) {
        sygs2(inst, uplo, a, b, level);
        return;
    }
    let plan = split_point(n, SPLIT_ALIGN);
    let (atl, atr, abl, abr) = partition_quadrants(a, plan);
    let (btl, btr, bbl, bbr) = partition_quadrants(b, plan);
    let n2 = plan.n2;

    sygst_inner(inst, uplo, atl, btl, crossover, depth + 1);

    // The reduced leading block enters the coupling updates as a full
    // symmetric matrix.
    let mut sym_tl = symmetrize(atl, uplo);

    match uplo {
        Uplo::Lower => {
            inst.trsm(Side::Right, uplo, Trans::Trans, Diag::NonUnit, 1.0, btl, abl, level)
                .expect("diagonal scanned upfront");
            inst.gemm(Trans::NoTrans, Trans::NoTrans, -0.5, bbl, sym_tl.view_mut(), 1.0, abl, level);
            // A11 -= L10 A10^T + A10 L10^T, lower triangle only.
            let mut t = DenseMatrix::zeros(n2, n2);
            inst.gemm(Trans::NoTrans, Trans::Trans, 1.0, bbl, abl, 0.0, t.view_mut(), level);
            for j in 0..n2 {
                for i in j..n2 {
                    abr.set(i, j, abr.get(i, j) - t.get(i, j) - t.get(j, i));
                }
            }
            inst.gemm(Trans::NoTrans, Trans::NoTrans, -0.5, bbl, sym_tl.view_mut(), 1.0, abl, level);
            inst.trsm(Side::Left, uplo, Trans::NoTrans, Diag::NonUnit, 1.0, bbr, abl, level)
                .expect("diagonal scanned upfront");
        }
        Uplo::Upper => {
            inst.trsm(Side::Left, uplo, Trans::Trans, Diag::NonUnit, 1.0, btl, atr, level)
                .expect("diagonal scanned upfront");
            inst.gemm(Trans::NoTrans, Trans::NoTrans, -0.5, sym_tl.view_mut(), btr, 1.0, atr, level);
            // A11 -= A01^T U01 + U01^T A01, upper triangle only.
            let mut t = DenseMatrix::zeros(n2, n2);
            inst.gemm(Trans::Trans, Trans::NoTrans, 1.0, atr, btr, 0.0, t.view_mut(), level);
            for j in 0..n2 {
                for i in 0..=j {
                    abr.set(i, j, abr.get(i, j) - t.get(i, j) - t.get(j, i));
                }
            }
            inst.gemm(Trans::NoTrans, Trans::NoTrans, -0.5, sym_tl.view_mut(), btr, 1.0, atr, level);
            inst.trsm(Side::Right, uplo, Trans::NoTrans, Diag::NonUnit, 1.0, bbr, atr, level)
                .expect("diagonal scanned upfront");
        }
    }

    sygst_inner(inst, uplo, abr, bbr, crossover, depth + 1);
}

fn symmetrize(a: MatrixView, uplo: Uplo) -> DenseMatrix {
    let n = a.rows();
    let mut s = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let v = match uplo {
                Uplo::Lower => {
                    if i >= j {
                        a.get(i, j)
                    } else {
                        a.get(j, i)
                    }
                }
                Uplo::Upper => {
                    if i <= j {
                        a.get(i, j)
                    } else {
                        a.get(j, i)
                    }
                }
            };
            s.set(i, j, v);
        }
    }
    s
}

/// The unblocked reduction used at the bottom of [`rec_sygst`], exposed
/// for direct comparison. The whole call is recorded in the ledger as
/// one `sygs2` entry.
pub fn sygst_unblocked(inst: &mut Instrumented, uplo: Uplo, a: MatrixView, b: MatrixView) -> Result<(), KernelError> {
    assert_eq!(a.rows(), a.cols(), "sygst: matrix must be square");
    assert_eq!((b.rows(), b.cols()), (a.rows(), a.cols()), "sygst: factor shape mismatch");
    scan_diagonal(b)?;
    sygs2(inst, uplo, a, b, 1);
    Ok(())
}

/// Row-by-row two-sided reduction, vector operation by vector
/// operation. Updates column (lower) or row (upper) `k` against the
/// trailing principal block, then eliminates it with a triangular
/// solve.
fn sygs2(inst: &mut Instrumented, uplo: Uplo, a: MatrixView, b: MatrixView, level: usize) {
    let n = a.rows();
    let start = Instant::now();
    match uplo {
        Uplo::Lower => {
            for k in 0..n {
                let bkk = b.get(k, k);
                let akk = a.get(k, k) / (bkk * bkk);
                a.set(k, k, akk);
                if k + 1 < n {
                    let ct = -0.5 * akk;
                    for i in k + 1..n {
                        a.set(i, k, a.get(i, k) / bkk);
                    }
                    for i in k + 1..n {
                        a.set(i, k, a.get(i, k) + ct * b.get(i, k));
                    }
                    // Rank-two update of the trailing lower triangle.
                    for j in k + 1..n {
                        let xj = a.get(j, k);
                        let yj = b.get(j, k);
                        for i in j..n {
                            let v = a.get(i, j) - a.get(i, k) * yj - b.get(i, k) * xj;
                            a.set(i, j, v);
                        }
                    }
                    for i in k + 1..n {
                        a.set(i, k, a.get(i, k) + ct * b.get(i, k));
                    }
                    // Forward substitution with the trailing factor block.
                    for i in k + 1..n {
                        let mut v = a.get(i, k);
                        for p in k + 1..i {
                            v -= b.get(i, p) * a.get(p, k);
                        }
                        a.set(i, k, v / b.get(i, i));
                    }
                }
            }
        }
        Uplo::Upper => {
            for k in 0..n {
                let bkk = b.get(k, k);
                let akk = a.get(k, k) / (bkk * bkk);
                a.set(k, k, akk);
                if k + 1 < n {
                    let ct = -0.5 * akk;
                    for j in k + 1..n {
                        a.set(k, j, a.get(k, j) / bkk);
                    }
                    for j in k + 1..n {
                        a.set(k, j, a.get(k, j) + ct * b.get(k, j));
                    }
                    // Rank-two update of the trailing upper triangle.
                    for j in k + 1..n {
                        let xj = a.get(k, j);
                        let yj = b.get(k, j);
                        for i in k + 1..=j {
                            let v = a.get(i, j) - a.get(k, i) * yj - b.get(k, i) * xj;
                            a.set(i, j, v);
                        }
                    }
                    for j in k + 1..n {
                        a.set(k, j, a.get(k, j) + ct * b.get(k, j));
                    }
                    // Back substitution through the transposed factor block.
                    for j in k + 1..n {
                        let mut v = a.get(k, j);
                        for p in k + 1..j {
                            v -= b.get(p, j) * a.get(k, p);
                        }
                        a.set(k, j, v / b.get(j, j));
                    }
                }
            }
        }
    }
    inst.note_sygs2(n, level, start);
}

/// Recursive solver for the triangular Sylvester equation
/// `A X + isgn X B = C` with upper triangular `A` (`m x m`) and `B`
/// (`n x n`), overwriting the `m x n` matrix `c` with `X`. The larger
/// dimension is halved until the whole problem fits a dense small-case
/// solve (`m * n <= crossover^2`).
pub fn rec_trsyl(
    inst: &mut Instrumented,
    isgn: i32,
    a: MatrixView,
    b: MatrixView,
    c: MatrixView,
    crossover: usize,
) -> Result<(), KernelError> {
    let (m, n) = (c.rows(), c.cols());
    assert_eq!((a.rows(), a.cols()), (m, m), "trsyl: A must match the rows of C");
    assert_eq!((b.rows(), b.cols()), (n, n), "trsyl: B must match the columns of C");
    assert!(isgn == 1 || isgn == -1, "trsyl: isgn must be +1 or -1");
    let cutoff = base_cutoff(crossover);
    trsyl_inner(inst, isgn, a, b, c, cutoff * cutoff, 0)
}

fn trsyl_inner(
    inst: &mut Instrumented,
    isgn: i32,
    a: MatrixView,
    b: MatrixView,
    c: MatrixView,
    base_area: usize,
    depth: usize,
) -> Result<(), KernelError> {
    let (m, n) = (c.rows(), c.cols());
    let level = depth + 1;
    if m * n <= base_area || m.max(n) < 2 {
        return inst.sylv_base(a, b, c, isgn, level);
    }
    if m >= n {
        // Split the row dimension: the lower block row of X depends
        // only on A11, so solve it first and substitute upward.
        let plan = split_point(m, SPLIT_ALIGN);
        let (a00, a01, _, a11) = partition_quadrants(a, plan);
        let c0 = c.submatrix(0, 0, plan.n1, n);
        let c1 = c.submatrix(plan.n1, 0, plan.n2, n);
        trsyl_inner(inst, isgn, a11, b, c1, base_area, depth + 1)?;
        inst.gemm(Trans::NoTrans, Trans::NoTrans, -1.0, a01, c1, 1.0, c0, level);
        trsyl_inner(inst, isgn, a00, b, c0, base_area, depth + 1)
    } else {
        // Split the column dimension: the left block column of X
        // depends only on B00.
        let plan = split_point(n, SPLIT_ALIGN);
        let (b00, b01, _, b11) = partition_quadrants(b, plan);
        let c0 = c.submatrix(0, 0, m, plan.n1);
        let c1 = c.submatrix(0, plan.n1, m, plan.n2);
        trsyl_inner(inst, isgn, a, b00, c0, base_area, depth + 1)?;
        inst.gemm(Trans::NoTrans, Trans::NoTrans, -(isgn as f64), c0, b01, 1.0, c1, level);
        trsyl_inner(inst, isgn, a, b11, c1, base_area, depth + 1)
    }
}
