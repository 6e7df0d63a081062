//! Portable reference implementation of the kernel set.
//!
//! Loop structures and update orders follow the reference BLAS and the
//! unblocked LAPACK routines, so results are bitwise reproducible and
//! the error-reporting indices match the established conventions. The
//! level-3 kernels run column-oriented inner loops over raw column
//! pointers; the base kernels favor clarity over speed.

use crate::flags::{Diag, Side, Trans, Uplo};
use crate::matrix::{DenseMatrix, MatrixView};

use super::{KernelError, KernelProvider};

/// Kernel provider backed by the portable loops in this module.
#[derive(Debug, Default, Clone, Copy)]
pub struct ReferenceProvider;

impl KernelProvider for ReferenceProvider {
    fn name(&self) -> &'static str {
        "reference"
    }

    fn gemm(&self, transa: Trans, transb: Trans, alpha: f64, a: MatrixView, b: MatrixView, beta: f64, c: MatrixView) {
        ref_gemm(transa, transb, alpha, a, b, beta, c);
    }

    fn trmm(&self, side: Side, uplo: Uplo, trans: Trans, diag: Diag, alpha: f64, a: MatrixView, b: MatrixView) {
        ref_trmm(side, uplo, trans, diag, alpha, a, b);
    }

    fn trsm(
        &self,
        side: Side,
        uplo: Uplo,
        trans: Trans,
        diag: Diag,
        alpha: f64,
        a: MatrixView,
        b: MatrixView,
    ) -> Result<(), KernelError> {
        ref_trsm(side, uplo, trans, diag, alpha, a, b)
    }

    fn syrk(&self, uplo: Uplo, trans: Trans, alpha: f64, a: MatrixView, beta: f64, c: MatrixView) {
        ref_syrk(uplo, trans, alpha, a, beta, c);
    }

    fn laswp(&self, a: MatrixView, pivots: &[usize], forward: bool) {
        ref_laswp(a, pivots, forward);
    }

    fn trti2(&self, uplo: Uplo, diag: Diag, a: MatrixView) -> Result<(), KernelError> {
        ref_trti2(uplo, diag, a)
    }

    fn potf2(&self, uplo: Uplo, a: MatrixView) -> Result<(), KernelError> {
        ref_potf2(uplo, a)
    }

    fn getf2(&self, a: MatrixView, pivots: &mut Vec<usize>) -> Result<(), KernelError> {
        ref_getf2(a, pivots)
    }

    fn lauu2(&self, uplo: Uplo, a: MatrixView) {
        ref_lauu2(uplo, a);
    }

    fn sylv_base(&self, a: MatrixView, b: MatrixView, c: MatrixView, isgn: i32) -> Result<(), KernelError> {
        ref_sylv_base(a, b, c, isgn)
    }
}

/// Scales column pointer `x[0..len]` by `s`, with the conventional
/// special case that `s == 0` stores exact zeros.
unsafe fn scal(len: usize, s: f64, x: *mut f64) {
    if s == 0.0 {
        for i in 0..len {
            *x.add(i) = 0.0;
        }
    } else if s != 1.0 {
        for i in 0..len {
            *x.add(i) *= s;
        }
    }
}

/// `y[0..len] += t * x[0..len]` over raw column pointers.
unsafe fn axpy(len: usize, t: f64, x: *const f64, y: *mut f64) {
    for i in 0..len {
        *y.add(i) += t * *x.add(i);
    }
}

fn op_dims(trans: Trans, a: MatrixView) -> (usize, usize) {
    match trans {
        Trans::NoTrans => (a.rows(), a.cols()),
        Trans::Trans => (a.cols(), a.rows()),
    }
}

pub(crate) fn ref_gemm(
    transa: Trans,
    transb: Trans,
    alpha: f64,
    a: MatrixView,
    b: MatrixView,
    beta: f64,
    c: MatrixView,
) {
    let (m, n) = (c.rows(), c.cols());
    let (am, ak) = op_dims(transa, a);
    let (bk, bn) = op_dims(transb, b);
    assert_eq!((am, bn), (m, n), "gemm: output shape mismatch");
    assert_eq!(ak, bk, "gemm: inner dimension mismatch");
    let k = ak;

    if m == 0 || n == 0 {
        return;
    }
    if alpha == 0.0 || k == 0 {
        for j in 0..n {
            unsafe { scal(m, beta, c.col_ptr(j)) };
        }
        return;
    }

    match (transa, transb) {
        (Trans::NoTrans, Trans::NoTrans) => {
            // c_j := beta c_j + sum_l (alpha b[l,j]) a_l
            for j in 0..n {
                let cj = c.col_ptr(j);
                unsafe { scal(m, beta, cj) };
                for l in 0..k {
                    let temp = alpha * b.get(l, j);
                    if temp != 0.0 {
                        unsafe { axpy(m, temp, a.col_ptr(l), cj) };
                    }
                }
            }
        }
        (Trans::Trans, Trans::NoTrans) => {
            // c[i,j] := alpha (a_i . b_j) + beta c[i,j]
            for j in 0..n {
                let bj = b.col_ptr(j);
                for i in 0..m {
                    let ai = a.col_ptr(i);
                    let mut temp = 0.0;
                    unsafe {
                        for l in 0..k {
                            temp += *ai.add(l) * *bj.add(l);
                        }
                    }
                    let val = if beta == 0.0 {
                        alpha * temp
                    } else {
                        alpha * temp + beta * c.get(i, j)
                    };
                    c.set(i, j, val);
                }
            }
        }
        (Trans::NoTrans, Trans::Trans) => {
            for j in 0..n {
                let cj = c.col_ptr(j);
                unsafe { scal(m, beta, cj) };
                for l in 0..k {
                    let temp = alpha * b.get(j, l);
                    if temp != 0.0 {
                        unsafe { axpy(m, temp, a.col_ptr(l), cj) };
                    }
                }
            }
        }
        (Trans::Trans, Trans::Trans) => {
            for j in 0..n {
                for i in 0..m {
                    let ai = a.col_ptr(i);
                    let mut temp = 0.0;
                    unsafe {
                        for l in 0..k {
                            temp += *ai.add(l) * b.get(j, l);
                        }
                    }
                    let val = if beta == 0.0 {
                        alpha * temp
                    } else {
                        alpha * temp + beta * c.get(i, j)
                    };
                    c.set(i, j, val);
                }
            }
        }
    }
}

fn check_triangular_operands(side: Side, a: MatrixView, b: MatrixView) -> usize {
    let k = match side {
        Side::Left => b.rows(),
        Side::Right => b.cols(),
    };
    assert_eq!(a.rows(), a.cols(), "triangular operand must be square");
    assert_eq!(a.rows(), k, "triangular operand order mismatch");
    k
}

pub(crate) fn ref_trmm(side: Side, uplo: Uplo, trans: Trans, diag: Diag, alpha: f64, a: MatrixView, b: MatrixView) {
    check_triangular_operands(side, a, b);
    let (m, n) = (b.rows(), b.cols());
    if m == 0 || n == 0 {
        return;
    }
    let nounit = diag == Diag::NonUnit;
    if alpha == 0.0 {
        for j in 0..n {
            unsafe { scal(m, 0.0, b.col_ptr(j)) };
        }
        return;
    }

    match (side, trans, uplo) {
        (Side::Left, Trans::NoTrans, Uplo::Upper) => {
            for j in 0..n {
                let bj = b.col_ptr(j);
                for k in 0..m {
                    let bkj = unsafe { *bj.add(k) };
                    if bkj != 0.0 {
                        let temp = alpha * bkj;
                        unsafe {
                            axpy(k, temp, a.col_ptr(k), bj);
                            *bj.add(k) = if nounit { temp * a.get(k, k) } else { temp };
                        }
                    }
                }
            }
        }
        (Side::Left, Trans::NoTrans, Uplo::Lower) => {
            for j in 0..n {
                let bj = b.col_ptr(j);
                for k in (0..m).rev() {
                    let bkj = unsafe { *bj.add(k) };
                    if bkj != 0.0 {
                        let temp = alpha * bkj;
                        unsafe {
                            *bj.add(k) = if nounit { temp * a.get(k, k) } else { temp };
                            for i in k + 1..m {
                                *bj.add(i) += temp * a.get(i, k);
                            }
                        }
                    }
                }
            }
        }
        (Side::Left, Trans::Trans, Uplo::Upper) => {
            for j in 0..n {
                let bj = b.col_ptr(j);
                for i in (0..m).rev() {
                    let ai = a.col_ptr(i);
                    unsafe {
                        let mut temp = *bj.add(i);
                        if nounit {
                            temp *= *ai.add(i);
                        }
                        for k in 0..i {
                            temp += *ai.add(k) * *bj.add(k);
                        }
                        *bj.add(i) = alpha * temp;
                    }
                }
            }
        }
        (Side::Left, Trans::Trans, Uplo::Lower) => {
            for j in 0..n {
                let bj = b.col_ptr(j);
                for i in 0..m {
                    let ai = a.col_ptr(i);
                    unsafe {
                        let mut temp = *bj.add(i);
                        if nounit {
                            temp *= *ai.add(i);
                        }
                        for k in i + 1..m {
                            temp += *ai.add(k) * *bj.add(k);
                        }
                        *bj.add(i) = alpha * temp;
                    }
                }
            }
        }
        (Side::Right, Trans::NoTrans, Uplo::Upper) => {
            for j in (0..n).rev() {
                let bj = b.col_ptr(j);
                let mut temp = alpha;
                if nounit {
                    temp *= a.get(j, j);
                }
                unsafe { scal(m, temp, bj) };
                for k in 0..j {
                    let akj = a.get(k, j);
                    if akj != 0.0 {
                        unsafe { axpy(m, alpha * akj, b.col_ptr(k), bj) };
                    }
                }
            }
        }
        (Side::Right, Trans::NoTrans, Uplo::Lower) => {
            for j in 0..n {
                let bj = b.col_ptr(j);
                let mut temp = alpha;
                if nounit {
                    temp *= a.get(j, j);
                }
                unsafe { scal(m, temp, bj) };
                for k in j + 1..n {
                    let akj = a.get(k, j);
                    if akj != 0.0 {
                        unsafe { axpy(m, alpha * akj, b.col_ptr(k), bj) };
                    }
                }
            }
        }
        (Side::Right, Trans::Trans, Uplo::Upper) => {
            for k in 0..n {
                let bk = b.col_ptr(k);
                for j in 0..k {
                    let ajk = a.get(j, k);
                    if ajk != 0.0 {
                        unsafe { axpy(m, alpha * ajk, bk, b.col_ptr(j)) };
                    }
                }
                let mut temp = alpha;
                if nounit {
                    temp *= a.get(k, k);
                }
                if temp != 1.0 {
                    unsafe { scal(m, temp, bk) };
                }
            }
        }
        (Side::Right, Trans::Trans, Uplo::Lower) => {
            for k in (0..n).rev() {
                let bk = b.col_ptr(k);
                for j in k + 1..n {
                    let ajk = a.get(j, k);
                    if ajk != 0.0 {
                        unsafe { axpy(m, alpha * ajk, bk, b.col_ptr(j)) };
                    }
                }
                let mut temp = alpha;
                if nounit {
                    temp *= a.get(k, k);
                }
                if temp != 1.0 {
                    unsafe { scal(m, temp, bk) };
                }
            }
        }
    }
}

pub(crate) fn ref_trsm(
    side: Side,
    uplo: Uplo,
    trans: Trans,
    diag: Diag,
    alpha: f64,
    a: MatrixView,
    b: MatrixView,
) -> Result<(), KernelError> {
    let ka = check_triangular_operands(side, a, b);
    let (m, n) = (b.rows(), b.cols());
    if diag == Diag::NonUnit {
        for i in 0..ka {
            if a.get(i, i) == 0.0 {
                return Err(KernelError::SingularDiagonal(i));
            }
        }
    }
    if m == 0 || n == 0 {
        return Ok(());
    }
    let nounit = diag == Diag::NonUnit;
    if alpha == 0.0 {
        for j in 0..n {
            unsafe { scal(m, 0.0, b.col_ptr(j)) };
        }
        return Ok(());
    }

    match (side, trans, uplo) {
        (Side::Left, Trans::NoTrans, Uplo::Upper) => {
            for j in 0..n {
                let bj = b.col_ptr(j);
                unsafe {
                    scal(m, alpha, bj);
                    for k in (0..m).rev() {
                        if *bj.add(k) != 0.0 {
                            if nounit {
                                *bj.add(k) /= a.get(k, k);
                            }
                            let temp = *bj.add(k);
                            for i in 0..k {
                                *bj.add(i) -= temp * a.get(i, k);
                            }
                        }
                    }
                }
            }
        }
        (Side::Left, Trans::NoTrans, Uplo::Lower) => {
            for j in 0..n {
                let bj = b.col_ptr(j);
                unsafe {
                    scal(m, alpha, bj);
                    for k in 0..m {
                        if *bj.add(k) != 0.0 {
                            if nounit {
                                *bj.add(k) /= a.get(k, k);
                            }
                            let temp = *bj.add(k);
                            for i in k + 1..m {
                                *bj.add(i) -= temp * a.get(i, k);
                            }
                        }
                    }
                }
            }
        }
        (Side::Left, Trans::Trans, Uplo::Upper) => {
            for j in 0..n {
                let bj = b.col_ptr(j);
                for i in 0..m {
                    let ai = a.col_ptr(i);
                    unsafe {
                        let mut temp = alpha * *bj.add(i);
                        for k in 0..i {
                            temp -= *ai.add(k) * *bj.add(k);
                        }
                        if nounit {
                            temp /= *ai.add(i);
                        }
                        *bj.add(i) = temp;
                    }
                }
            }
        }
        (Side::Left, Trans::Trans, Uplo::Lower) => {
            for j in 0..n {
                let bj = b.col_ptr(j);
                for i in (0..m).rev() {
                    let ai = a.col_ptr(i);
                    unsafe {
                        let mut temp = alpha * *bj.add(i);
                        for k in i + 1..m {
                            temp -= *ai.add(k) * *bj.add(k);
                        }
                        if nounit {
                            temp /= *ai.add(i);
                        }
                        *bj.add(i) = temp;
                    }
                }
            }
        }
        (Side::Right, Trans::NoTrans, Uplo::Upper) => {
            for j in 0..n {
                let bj = b.col_ptr(j);
                unsafe {
                    scal(m, alpha, bj);
                    for k in 0..j {
                        let akj = a.get(k, j);
                        if akj != 0.0 {
                            axpy(m, -akj, b.col_ptr(k), bj);
                        }
                    }
                    if nounit {
                        scal(m, 1.0 / a.get(j, j), bj);
                    }
                }
            }
        }
        (Side::Right, Trans::NoTrans, Uplo::Lower) => {
            for j in (0..n).rev() {
                let bj = b.col_ptr(j);
                unsafe {
                    scal(m, alpha, bj);
                    for k in j + 1..n {
                        let akj = a.get(k, j);
                        if akj != 0.0 {
                            axpy(m, -akj, b.col_ptr(k), bj);
                        }
                    }
                    if nounit {
                        scal(m, 1.0 / a.get(j, j), bj);
                    }
                }
            }
        }
        (Side::Right, Trans::Trans, Uplo::Upper) => {
            for k in (0..n).rev() {
                let bk = b.col_ptr(k);
                unsafe {
                    if nounit {
                        scal(m, 1.0 / a.get(k, k), bk);
                    }
                    for j in 0..k {
                        let ajk = a.get(j, k);
                        if ajk != 0.0 {
                            axpy(m, -ajk, bk, b.col_ptr(j));
                        }
                    }
                    if alpha != 1.0 {
                        scal(m, alpha, bk);
                    }
                }
            }
        }
        (Side::Right, Trans::Trans, Uplo::Lower) => {
            for k in 0..n {
                let bk = b.col_ptr(k);
                unsafe {
                    if nounit {
                        scal(m, 1.0 / a.get(k, k), bk);
                    }
                    for j in k + 1..n {
                        let ajk = a.get(j, k);
                        if ajk != 0.0 {
                            axpy(m, -ajk, bk, b.col_ptr(j));
                        }
                    }
                    if alpha != 1.0 {
                        scal(m, alpha, bk);
                    }
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn ref_syrk(uplo: Uplo, trans: Trans, alpha: f64, a: MatrixView, beta: f64, c: MatrixView) {
    let n = c.rows();
    assert_eq!(c.cols(), n, "syrk: output must be square");
    let (an, k) = op_dims(trans, a);
    assert_eq!(an, n, "syrk: operand order mismatch");
    if n == 0 {
        return;
    }

    // Column segment of the stored triangle: rows 0..=j (upper) or j..n (lower).
    let seg = |j: usize| -> (usize, usize) {
        match uplo {
            Uplo::Upper => (0, j + 1),
            Uplo::Lower => (j, n),
        }
    };

    if alpha == 0.0 || k == 0 {
        for j in 0..n {
            let (lo, hi) = seg(j);
            unsafe { scal(hi - lo, beta, c.col_ptr(j).add(lo)) };
        }
        return;
    }

    match trans {
        Trans::NoTrans => {
            for j in 0..n {
                let (lo, hi) = seg(j);
                let cj = unsafe { c.col_ptr(j).add(lo) };
                unsafe { scal(hi - lo, beta, cj) };
                for l in 0..k {
                    let ajl = a.get(j, l);
                    if ajl != 0.0 {
                        let temp = alpha * ajl;
                        unsafe { axpy(hi - lo, temp, a.col_ptr(l).add(lo), cj) };
                    }
                }
            }
        }
        Trans::Trans => {
            for j in 0..n {
                let aj = a.col_ptr(j);
                let (lo, hi) = seg(j);
                for i in lo..hi {
                    let ai = a.col_ptr(i);
                    let mut temp = 0.0;
                    unsafe {
                        for l in 0..k {
                            temp += *ai.add(l) * *aj.add(l);
                        }
                    }
                    let val = if beta == 0.0 {
                        alpha * temp
                    } else {
                        alpha * temp + beta * c.get(i, j)
                    };
                    c.set(i, j, val);
                }
            }
        }
    }
}

pub(crate) fn ref_laswp(a: MatrixView, pivots: &[usize], forward: bool) {
    let (m, n) = (a.rows(), a.cols());
    assert!(pivots.len() <= m, "laswp: more pivots than rows");
    let swap_row = |i: usize, p: usize| {
        debug_assert!(p < m);
        if p != i {
            for j in 0..n {
                let x = a.get(i, j);
                a.set(i, j, a.get(p, j));
                a.set(p, j, x);
            }
        }
    };
    if forward {
        for (i, &p) in pivots.iter().enumerate() {
            assert!(p < m, "laswp: pivot out of range");
            swap_row(i, p);
        }
    } else {
        for (i, &p) in pivots.iter().enumerate().rev() {
            assert!(p < m, "laswp: pivot out of range");
            swap_row(i, p);
        }
    }
}

pub(crate) fn ref_trti2(uplo: Uplo, diag: Diag, a: MatrixView) -> Result<(), KernelError> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "trti2: matrix must be square");
    let nounit = diag == Diag::NonUnit;
    if nounit {
        for i in 0..n {
            if a.get(i, i) == 0.0 {
                return Err(KernelError::SingularDiagonal(i));
            }
        }
    }

    match uplo {
        Uplo::Upper => {
            for j in 0..n {
                let ajj = if nounit {
                    a.set(j, j, 1.0 / a.get(j, j));
                    -a.get(j, j)
                } else {
                    -1.0
                };
                // x := T x with T the already inverted leading block,
                // then scale by -1/a_jj: column j of the inverse.
                for i in 0..j {
                    let xi = a.get(i, j);
                    if xi != 0.0 {
                        for ii in 0..i {
                            let v = a.get(ii, j) + xi * a.get(ii, i);
                            a.set(ii, j, v);
                        }
                        if nounit {
                            a.set(i, j, xi * a.get(i, i));
                        }
                    }
                }
                for i in 0..j {
                    a.set(i, j, ajj * a.get(i, j));
                }
            }
        }
        Uplo::Lower => {
            for j in (0..n).rev() {
                let ajj = if nounit {
                    a.set(j, j, 1.0 / a.get(j, j));
                    -a.get(j, j)
                } else {
                    -1.0
                };
                if j + 1 < n {
                    // In-place triangular multiply of x = a[j+1.., j] by
                    // the trailing (already inverted) block.
                    for i in (j + 1..n).rev() {
                        let xi = a.get(i, j);
                        if xi != 0.0 {
                            for ii in i + 1..n {
                                let v = a.get(ii, j) + xi * a.get(ii, i);
                                a.set(ii, j, v);
                            }
                            if nounit {
                                a.set(i, j, xi * a.get(i, i));
                            }
                        }
                    }
                    for i in j + 1..n {
                        a.set(i, j, ajj * a.get(i, j));
                    }
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn ref_potf2(uplo: Uplo, a: MatrixView) -> Result<(), KernelError> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "potf2: matrix must be square");
    match uplo {
        Uplo::Lower => {
            for j in 0..n {
                let mut ajj = a.get(j, j);
                for k in 0..j {
                    ajj -= a.get(j, k) * a.get(j, k);
                }
                if ajj <= 0.0 || ajj.is_nan() {
                    a.set(j, j, ajj);
                    return Err(KernelError::NotPositiveDefinite(j));
                }
                let ajj = ajj.sqrt();
                a.set(j, j, ajj);
                for i in j + 1..n {
                    let mut s = a.get(i, j);
                    for k in 0..j {
                        s -= a.get(i, k) * a.get(j, k);
                    }
                    a.set(i, j, s / ajj);
                }
            }
        }
        Uplo::Upper => {
            for j in 0..n {
                let mut ajj = a.get(j, j);
                for k in 0..j {
                    ajj -= a.get(k, j) * a.get(k, j);
                }
                if ajj <= 0.0 || ajj.is_nan() {
                    a.set(j, j, ajj);
                    return Err(KernelError::NotPositiveDefinite(j));
                }
                let ajj = ajj.sqrt();
                a.set(j, j, ajj);
                for i in j + 1..n {
                    let mut s = a.get(j, i);
                    for k in 0..j {
                        s -= a.get(k, j) * a.get(k, i);
                    }
                    a.set(j, i, s / ajj);
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn ref_getf2(a: MatrixView, pivots: &mut Vec<usize>) -> Result<(), KernelError> {
    let (m, n) = (a.rows(), a.cols());
    let r = m.min(n);
    pivots.clear();
    pivots.reserve(r);
    let mut first_zero: Option<usize> = None;

    for j in 0..r {
        // Partial pivot: first row of maximum magnitude at or below j.
        let mut jp = j;
        let mut best = a.get(j, j).abs();
        for i in j + 1..m {
            let v = a.get(i, j).abs();
            if v > best {
                best = v;
                jp = i;
            }
        }
        pivots.push(jp);
        if a.get(jp, j) != 0.0 {
            if jp != j {
                for jj in 0..n {
                    let x = a.get(j, jj);
                    a.set(j, jj, a.get(jp, jj));
                    a.set(jp, jj, x);
                }
            }
            let inv = 1.0 / a.get(j, j);
            for i in j + 1..m {
                a.set(i, j, a.get(i, j) * inv);
            }
        } else if first_zero.is_none() {
            first_zero = Some(j);
        }
        // Rank-1 trailing update; a zero pivot column makes it a no-op.
        for jj in j + 1..n {
            let temp = a.get(j, jj);
            if temp != 0.0 {
                for i in j + 1..m {
                    let v = a.get(i, jj) - a.get(i, j) * temp;
                    a.set(i, jj, v);
                }
            }
        }
    }
    match first_zero {
        Some(i) => Err(KernelError::SingularDiagonal(i)),
        None => Ok(()),
    }
}

pub(crate) fn ref_lauu2(uplo: Uplo, a: MatrixView) {
    let n = a.rows();
    assert_eq!(a.cols(), n, "lauu2: matrix must be square");
    match uplo {
        Uplo::Lower => {
            // a := tril(L^T L), row by row; rows below i still hold L.
            for i in 0..n {
                let aii = a.get(i, i);
                if i + 1 < n {
                    let mut d = 0.0;
                    for k in i..n {
                        d += a.get(k, i) * a.get(k, i);
                    }
                    a.set(i, i, d);
                    for j in 0..i {
                        let mut s = aii * a.get(i, j);
                        for k in i + 1..n {
                            s += a.get(k, j) * a.get(k, i);
                        }
                        a.set(i, j, s);
                    }
                } else {
                    for j in 0..=i {
                        a.set(i, j, aii * a.get(i, j));
                    }
                }
            }
        }
        Uplo::Upper => {
            // a := triu(U U^T), column by column.
            for i in 0..n {
                let aii = a.get(i, i);
                if i + 1 < n {
                    let mut d = 0.0;
                    for k in i..n {
                        d += a.get(i, k) * a.get(i, k);
                    }
                    a.set(i, i, d);
                    for j in 0..i {
                        let mut s = aii * a.get(j, i);
                        for k in i + 1..n {
                            s += a.get(j, k) * a.get(i, k);
                        }
                        a.set(j, i, s);
                    }
                } else {
                    for j in 0..=i {
                        a.set(j, i, aii * a.get(j, i));
                    }
                }
            }
        }
    }
}

/// Solves `a x + isgn x b = c` by dense LU with partial pivoting on the
/// Kronecker matrix `I (x) A + isgn B^T (x) I`.
pub(crate) fn ref_sylv_base(a: MatrixView, b: MatrixView, c: MatrixView, isgn: i32) -> Result<(), KernelError> {
    let (m, n) = (c.rows(), c.cols());
    assert_eq!((a.rows(), a.cols()), (m, m), "sylv: A must be m x m");
    assert_eq!((b.rows(), b.cols()), (n, n), "sylv: B must be n x n");
    assert!(isgn == 1 || isgn == -1, "sylv: isgn must be +1 or -1");
    let s = m * n;
    assert!(s <= 10_000, "sylv: dense Kronecker system would be {s} x {s}; use the recursive solver");
    if s == 0 {
        return Ok(());
    }
    let sgn = isgn as f64;

    // Row (i, j), column (i', j') of the Kronecker system: coefficient
    // of x[i', j'] in the (i, j) equation of a x + isgn x b = c.
    let mut kmat = DenseMatrix::zeros(s, s);
    for j in 0..n {
        for i in 0..m {
            let row = i + j * m;
            for ip in 0..m {
                kmat.set(row, ip + j * m, kmat.get(row, ip + j * m) + a.get(i, ip));
            }
            for jp in 0..n {
                let col = i + jp * m;
                kmat.set(row, col, kmat.get(row, col) + sgn * b.get(jp, j));
            }
        }
    }
    let fro = kmat.frobenius_norm();

    let mut rhs = vec![0.0; s];
    for j in 0..n {
        for i in 0..m {
            rhs[i + j * m] = c.get(i, j);
        }
    }

    let mut pivots = Vec::new();
    // A zero pivot is caught by the threshold scan below.
    let _ = ref_getf2(kmat.view_mut(), &mut pivots);
    for p in 0..s {
        if kmat.get(p, p).abs() <= f64::EPSILON * fro {
            return Err(KernelError::NearSingularSystem(p));
        }
    }

    for (i, &p) in pivots.iter().enumerate() {
        rhs.swap(i, p);
    }
    for i in 1..s {
        let mut t = rhs[i];
        for k in 0..i {
            t -= kmat.get(i, k) * rhs[k];
        }
        rhs[i] = t;
    }
    for i in (0..s).rev() {
        let mut t = rhs[i];
        for k in i + 1..s {
            t -= kmat.get(i, k) * rhs[k];
        }
        rhs[i] = t / kmat.get(i, i);
    }

    for j in 0..n {
        for i in 0..m {
            c.set(i, j, rhs[i + j * m]);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{gen_triangular, gen_uniform, DenseMatrix};

    fn approx(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} != {y} (tol {tol})");
    }

    #[test]
    fn gemm_small_example() {
        let mut a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let mut b = DenseMatrix::from_rows(&[&[5.0, 6.0], &[7.0, 8.0]]);
        let mut c = DenseMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        ref_gemm(
            Trans::NoTrans,
            Trans::NoTrans,
            1.0,
            a.view_mut(),
            b.view_mut(),
            1.0,
            c.view_mut(),
        );
        assert_eq!(c.get(0, 0), 20.0);
        assert_eq!(c.get(0, 1), 23.0);
        assert_eq!(c.get(1, 0), 44.0);
        assert_eq!(c.get(1, 1), 51.0);
    }

    #[test]
    fn gemm_transposes_agree_with_explicit_transposition() {
        let mut a = gen_uniform(4, 3, 11);
        let mut b = gen_uniform(4, 5, 12);
        let mut c1 = gen_uniform(3, 5, 13);
        let mut c2 = c1.clone();
        // c1 := a^T b via transa
        ref_gemm(Trans::Trans, Trans::NoTrans, 1.0, a.view_mut(), b.view_mut(), 0.5, c1.view_mut());
        // c2 := (a^T) b with the transpose materialized
        let mut at = a.transposed();
        ref_gemm(Trans::NoTrans, Trans::NoTrans, 1.0, at.view_mut(), b.view_mut(), 0.5, c2.view_mut());
        for j in 0..5 {
            for i in 0..3 {
                approx(c1.get(i, j), c2.get(i, j), 1e-14);
            }
        }
    }

    #[test]
    fn gemm_beta_zero_overwrites_nan() {
        let mut a = DenseMatrix::identity(2);
        let mut b = DenseMatrix::identity(2);
        let mut c = DenseMatrix::zeros(2, 2);
        c.set(0, 0, f64::NAN);
        ref_gemm(Trans::NoTrans, Trans::NoTrans, 1.0, a.view_mut(), b.view_mut(), 0.0, c.view_mut());
        assert_eq!(c.get(0, 0), 1.0);
    }

    #[test]
    fn gemm_k_zero_scales_only() {
        let mut a = DenseMatrix::zeros(2, 0);
        let mut b = DenseMatrix::zeros(0, 2);
        let mut c = DenseMatrix::from_rows(&[&[2.0, 4.0], &[6.0, 8.0]]);
        ref_gemm(Trans::NoTrans, Trans::NoTrans, 1.0, a.view_mut(), b.view_mut(), 0.5, c.view_mut());
        assert_eq!(c.get(0, 0), 1.0);
        assert_eq!(c.get(1, 1), 4.0);
    }

    #[test]
    fn trmm_left_lower_example() {
        // A = [[2, 0], [1, 3]], B = [[1, 2], [3, 4]]; A B = [[2, 4], [10, 14]]
        let mut a = DenseMatrix::from_rows(&[&[2.0, 0.0], &[1.0, 3.0]]);
        let mut b = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        ref_trmm(Side::Left, Uplo::Lower, Trans::NoTrans, Diag::NonUnit, 1.0, a.view_mut(), b.view_mut());
        assert_eq!(b.get(0, 0), 2.0);
        assert_eq!(b.get(0, 1), 4.0);
        assert_eq!(b.get(1, 0), 10.0);
        assert_eq!(b.get(1, 1), 14.0);
    }

    #[test]
    fn trmm_reads_only_stored_triangle() {
        // Garbage in the opposite triangle must not affect the result.
        let mut a = DenseMatrix::from_rows(&[&[2.0, 777.0], &[1.0, 3.0]]);
        let mut b = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        ref_trmm(Side::Left, Uplo::Lower, Trans::NoTrans, Diag::NonUnit, 1.0, a.view_mut(), b.view_mut());
        assert_eq!(b.get(0, 0), 2.0);
        assert_eq!(b.get(1, 1), 14.0);
    }

    #[test]
    fn trmm_unit_diag_ignores_stored_diagonal() {
        let mut a = DenseMatrix::from_rows(&[&[99.0, 0.0], &[1.0, 99.0]]);
        let mut b = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        ref_trmm(Side::Left, Uplo::Lower, Trans::NoTrans, Diag::Unit, 1.0, a.view_mut(), b.view_mut());
        // Effective A is [[1, 0], [1, 1]].
        assert_eq!(b.get(0, 0), 1.0);
        assert_eq!(b.get(1, 0), 1.0);
        assert_eq!(b.get(1, 1), 1.0);
    }

    #[test]
    fn trsm_inverts_trmm_all_flag_combinations() {
        for side in [Side::Left, Side::Right] {
            for uplo in [Uplo::Lower, Uplo::Upper] {
                for trans in [Trans::NoTrans, Trans::Trans] {
                    for diag in [Diag::NonUnit, Diag::Unit] {
                        let k = match side {
                            Side::Left => 6,
                            Side::Right => 4,
                        };
                        let mut a = gen_triangular(k, uplo, 7);
                        let b0 = gen_uniform(6, 4, 8);
                        let mut b = b0.clone();
                        ref_trmm(side, uplo, trans, diag, 2.0, a.view_mut(), b.view_mut());
                        ref_trsm(side, uplo, trans, diag, 0.5, a.view_mut(), b.view_mut()).unwrap();
                        for j in 0..4 {
                            for i in 0..6 {
                                approx(b.get(i, j), b0.get(i, j), 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trsm_reports_first_zero_diagonal_without_touching_b() {
        let mut a = DenseMatrix::from_rows(&[&[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0], &[3.0, 4.0, 0.0]]);
        let mut b = DenseMatrix::from_rows(&[&[1.0], &[2.0], &[3.0]]);
        let err = ref_trsm(
            Side::Left,
            Uplo::Lower,
            Trans::NoTrans,
            Diag::NonUnit,
            1.0,
            a.view_mut(),
            b.view_mut(),
        )
        .unwrap_err();
        assert_eq!(err, KernelError::SingularDiagonal(1));
        assert_eq!(b.get(0, 0), 1.0);
        assert_eq!(b.get(2, 0), 3.0);
        // Unit diagonal never inspects the stored diagonal.
        ref_trsm(Side::Left, Uplo::Lower, Trans::NoTrans, Diag::Unit, 1.0, a.view_mut(), b.view_mut()).unwrap();
    }

    #[test]
    fn syrk_matches_explicit_product() {
        let mut a = gen_uniform(5, 3, 21);
        for (uplo, trans) in [
            (Uplo::Lower, Trans::NoTrans),
            (Uplo::Upper, Trans::NoTrans),
            (Uplo::Lower, Trans::Trans),
            (Uplo::Upper, Trans::Trans),
        ] {
            let n = match trans {
                Trans::NoTrans => 5,
                Trans::Trans => 3,
            };
            let mut c = gen_uniform(n, n, 22);
            let c0 = c.clone();
            ref_syrk(uplo, trans, 1.5, a.view_mut(), 0.25, c.view_mut());
            // Oracle: full product via gemm into a separate buffer.
            let mut full = c0.clone();
            let (ta, tb) = match trans {
                Trans::NoTrans => (Trans::NoTrans, Trans::Trans),
                Trans::Trans => (Trans::Trans, Trans::NoTrans),
            };
            let mut a2 = a.clone();
            ref_gemm(ta, tb, 1.5, a.view_mut(), a2.view_mut(), 0.25, full.view_mut());
            for j in 0..n {
                for i in 0..n {
                    let in_triangle = match uplo {
                        Uplo::Lower => i >= j,
                        Uplo::Upper => i <= j,
                    };
                    if in_triangle {
                        approx(c.get(i, j), full.get(i, j), 1e-13);
                    } else {
                        // Opposite triangle is untouched.
                        assert_eq!(c.get(i, j).to_bits(), c0.get(i, j).to_bits());
                    }
                }
            }
        }
    }

    #[test]
    fn laswp_forward_then_backward_restores() {
        let m0 = gen_uniform(6, 3, 31);
        let mut m = m0.clone();
        let pivots = vec![3usize, 1, 4, 3];
        ref_laswp(m.view_mut(), &pivots, true);
        assert_ne!(m.get(0, 0).to_bits(), m0.get(0, 0).to_bits());
        ref_laswp(m.view_mut(), &pivots, false);
        for j in 0..3 {
            for i in 0..6 {
                assert_eq!(m.get(i, j).to_bits(), m0.get(i, j).to_bits());
            }
        }
    }

    #[test]
    fn trti2_lower_2x2_example() {
        // inv([[2, 0], [1, 4]]) = [[0.5, 0], [-0.125, 0.25]]
        let mut a = DenseMatrix::from_rows(&[&[2.0, 0.0], &[1.0, 4.0]]);
        ref_trti2(Uplo::Lower, Diag::NonUnit, a.view_mut()).unwrap();
        assert_eq!(a.get(0, 0), 0.5);
        assert_eq!(a.get(1, 0), -0.125);
        assert_eq!(a.get(1, 1), 0.25);
        assert_eq!(a.get(0, 1), 0.0);
    }

    #[test]
    fn trti2_inverse_multiplies_to_identity() {
        for uplo in [Uplo::Lower, Uplo::Upper] {
            for diag in [Diag::NonUnit, Diag::Unit] {
                let n = 9;
                let mut l = gen_triangular(n, uplo, 41);
                let mut inv = l.clone();
                ref_trti2(uplo, diag, inv.view_mut()).unwrap();
                // Product with the diagonal flag applied on both sides.
                let mut prod = DenseMatrix::identity(n);
                ref_trmm(Side::Left, uplo, Trans::NoTrans, diag, 1.0, l.view_mut(), prod.view_mut());
                ref_trmm(Side::Left, uplo, Trans::NoTrans, diag, 1.0, inv.view_mut(), prod.view_mut());
                for j in 0..n {
                    for i in 0..n {
                        let want = if i == j { 1.0 } else { 0.0 };
                        approx(prod.get(i, j), want, 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn trti2_zero_diagonal_reports_first_index() {
        let mut a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[5.0, 0.0]]);
        let err = ref_trti2(Uplo::Lower, Diag::NonUnit, a.view_mut()).unwrap_err();
        assert_eq!(err, KernelError::SingularDiagonal(1));
        // Matrix untouched on the upfront scan.
        assert_eq!(a.get(0, 0), 1.0);
        assert_eq!(a.get(1, 0), 5.0);
    }

    #[test]
    fn potf2_3x3_example() {
        // A = L L^T with L = [[2,0,0],[1,3,0],[0,1,1]]
        let mut a = DenseMatrix::from_rows(&[&[4.0, 2.0, 0.0], &[2.0, 10.0, 3.0], &[0.0, 3.0, 2.0]]);
        ref_potf2(Uplo::Lower, a.view_mut()).unwrap();
        approx(a.get(0, 0), 2.0, 1e-15);
        approx(a.get(1, 0), 1.0, 1e-15);
        approx(a.get(1, 1), 3.0, 1e-15);
        approx(a.get(2, 1), 1.0, 1e-15);
        approx(a.get(2, 2), 1.0, 1e-15);
        // Strict upper triangle is untouched.
        assert_eq!(a.get(0, 1), 2.0);
    }

    #[test]
    fn potf2_upper_matches_lower_transposed() {
        let spd = crate::matrix::gen_spd(7, 51);
        let mut lo = spd.clone();
        let mut up = spd.transposed();
        ref_potf2(Uplo::Lower, lo.view_mut()).unwrap();
        ref_potf2(Uplo::Upper, up.view_mut()).unwrap();
        for j in 0..7 {
            for i in j..7 {
                approx(lo.get(i, j), up.get(j, i), 1e-13);
            }
        }
    }

    #[test]
    fn potf2_indefinite_reports_pivot() {
        let mut a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let err = ref_potf2(Uplo::Lower, a.view_mut()).unwrap_err();
        assert_eq!(err, KernelError::NotPositiveDefinite(1));
    }

    #[test]
    fn getf2_permutation_example() {
        // [[0, 1], [1, 0]] pivots to the identity.
        let mut a = DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let mut piv = Vec::new();
        ref_getf2(a.view_mut(), &mut piv).unwrap();
        assert_eq!(piv, vec![1, 1]);
        assert_eq!(a.get(0, 0), 1.0);
        assert_eq!(a.get(1, 1), 1.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.get(0, 1), 0.0);
    }

    #[test]
    fn getf2_reconstructs_pa() {
        let a0 = gen_uniform(6, 6, 61);
        let mut a = a0.clone();
        let mut piv = Vec::new();
        ref_getf2(a.view_mut(), &mut piv).unwrap();
        // PA from the recorded swaps.
        let mut pa = a0.clone();
        ref_laswp(pa.view_mut(), &piv, true);
        // LU product.
        let mut lu = DenseMatrix::zeros(6, 6);
        for j in 0..6 {
            for i in 0..6 {
                let mut s = 0.0;
                for k in 0..6 {
                    let lik = if i == k {
                        1.0
                    } else if i > k {
                        a.get(i, k)
                    } else {
                        0.0
                    };
                    let ukj = if k <= j { a.get(k, j) } else { 0.0 };
                    s += lik * ukj;
                }
                lu.set(i, j, s);
            }
        }
        for j in 0..6 {
            for i in 0..6 {
                approx(lu.get(i, j), pa.get(i, j), 1e-13);
            }
        }
    }

    #[test]
    fn getf2_singular_reports_first_zero_column() {
        // Second column is a multiple of the first: U(1,1) becomes 0.
        let mut a = DenseMatrix::from_rows(&[&[1.0, 2.0, 0.0], &[2.0, 4.0, 1.0], &[3.0, 6.0, 5.0]]);
        let mut piv = Vec::new();
        let err = ref_getf2(a.view_mut(), &mut piv).unwrap_err();
        assert_eq!(err, KernelError::SingularDiagonal(1));
        assert_eq!(piv.len(), 3);
    }

    #[test]
    fn getf2_wide_and_tall_panels() {
        for (m, n) in [(8usize, 3usize), (3, 8)] {
            let a0 = gen_uniform(m, n, 71);
            let mut a = a0.clone();
            let mut piv = Vec::new();
            ref_getf2(a.view_mut(), &mut piv).unwrap();
            assert_eq!(piv.len(), m.min(n));
            let mut pa = a0.clone();
            ref_laswp(pa.view_mut(), &piv, true);
            let r = m.min(n);
            for j in 0..n {
                for i in 0..m {
                    let mut s = 0.0;
                    for k in 0..r {
                        let lik = if i == k {
                            1.0
                        } else if i > k {
                            a.get(i, k)
                        } else {
                            0.0
                        };
                        let ukj = if k <= j { a.get(k, j) } else { 0.0 };
                        s += lik * ukj;
                    }
                    approx(s, pa.get(i, j), 1e-12);
                }
            }
        }
    }

    #[test]
    fn lauu2_lower_matches_explicit_product() {
        let n = 8;
        let l = gen_triangular(n, Uplo::Lower, 81);
        let mut a = l.clone();
        ref_lauu2(Uplo::Lower, a.view_mut());
        for j in 0..n {
            for i in 0..n {
                if i >= j {
                    let mut s = 0.0;
                    for k in i..n {
                        s += l.get(k, i) * l.get(k, j);
                    }
                    approx(a.get(i, j), s, 1e-13);
                } else {
                    assert_eq!(a.get(i, j).to_bits(), l.get(i, j).to_bits());
                }
            }
        }
    }

    #[test]
    fn lauu2_upper_matches_explicit_product() {
        let n = 8;
        let u = gen_triangular(n, Uplo::Upper, 82);
        let mut a = u.clone();
        ref_lauu2(Uplo::Upper, a.view_mut());
        for j in 0..n {
            for i in 0..n {
                if i <= j {
                    let mut s = 0.0;
                    for k in j..n {
                        s += u.get(i, k) * u.get(j, k);
                    }
                    approx(a.get(i, j), s, 1e-13);
                } else {
                    assert_eq!(a.get(i, j).to_bits(), u.get(i, j).to_bits());
                }
            }
        }
    }

    #[test]
    fn sylv_base_scalar_case() {
        // 3 x + x * 1 = 8  =>  x = 2
        let mut a = DenseMatrix::from_rows(&[&[3.0]]);
        let mut b = DenseMatrix::from_rows(&[&[1.0]]);
        let mut c = DenseMatrix::from_rows(&[&[8.0]]);
        ref_sylv_base(a.view_mut(), b.view_mut(), c.view_mut(), 1).unwrap();
        assert_eq!(c.get(0, 0), 2.0);
    }

    #[test]
    fn sylv_base_residual_is_small() {
        for isgn in [1i32, -1] {
            let (m, n) = (5usize, 4usize);
            let mut a = gen_triangular(m, Uplo::Upper, 91);
            let mut b = gen_triangular(n, Uplo::Upper, 92);
            // Shift B's diagonal so a + isgn b never cancels.
            for i in 0..n {
                b.set(i, i, b.get(i, i) + 3.0);
            }
            let c0 = gen_uniform(m, n, 93);
            let mut x = c0.clone();
            ref_sylv_base(a.view_mut(), b.view_mut(), x.view_mut(), isgn).unwrap();
            // residual = a x + isgn x b - c
            for j in 0..n {
                for i in 0..m {
                    let mut s = 0.0;
                    for k in i..m {
                        s += a.get(i, k) * x.get(k, j);
                    }
                    for k in 0..=j {
                        s += isgn as f64 * x.get(i, k) * b.get(k, j);
                    }
                    approx(s, c0.get(i, j), 1e-11);
                }
            }
        }
    }

    #[test]
    fn sylv_base_detects_cancelling_eigenvalues() {
        // a = [[1]], b = [[-1]], isgn = +1: lambda_A + lambda_B = 0.
        let mut a = DenseMatrix::from_rows(&[&[1.0]]);
        let mut b = DenseMatrix::from_rows(&[&[-1.0]]);
        let mut c = DenseMatrix::from_rows(&[&[1.0]]);
        let err = ref_sylv_base(a.view_mut(), b.view_mut(), c.view_mut(), 1).unwrap_err();
        assert!(matches!(err, KernelError::NearSingularSystem(_)));
        // Same pair is fine with isgn = -1.
        let mut c = DenseMatrix::from_rows(&[&[4.0]]);
        ref_sylv_base(a.view_mut(), b.view_mut(), c.view_mut(), -1).unwrap();
        assert_eq!(c.get(0, 0), 2.0);
    }

    #[test]
    fn empty_dimensions_are_no_ops() {
        let mut a = DenseMatrix::zeros(0, 0);
        let mut b = DenseMatrix::zeros(0, 3);
        ref_trmm(Side::Left, Uplo::Lower, Trans::NoTrans, Diag::NonUnit, 1.0, a.view_mut(), b.view_mut());
        ref_trsm(Side::Left, Uplo::Lower, Trans::NoTrans, Diag::NonUnit, 1.0, a.view_mut(), b.view_mut()).unwrap();
        ref_trti2(Uplo::Lower, Diag::NonUnit, a.view_mut()).unwrap();
        ref_potf2(Uplo::Lower, a.view_mut()).unwrap();
        ref_lauu2(Uplo::Lower, a.view_mut());
        let mut piv = vec![7usize];
        ref_getf2(b.view_mut(), &mut piv).unwrap();
        assert!(piv.is_empty());
    }
}
