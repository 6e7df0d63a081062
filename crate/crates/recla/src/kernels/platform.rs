//! Level-3 kernels backed by the system CBLAS (OpenBLAS). Only built
//! with the `platform-kernels` feature; links against `libopenblas`.
//!
//! The base kernels and the Sylvester solver stay on the portable
//! implementations: they are O(n^2) panels or small dense solves, and
//! their error reporting must not depend on the vendor library.

use crate::flags::{Diag, Side, Trans, Uplo};
use crate::matrix::MatrixView;

use super::{reference, KernelError, KernelProvider};

type CInt = i32;

const COL_MAJOR: CInt = 102;

fn trans_flag(t: Trans) -> CInt {
    match t {
        Trans::NoTrans => 111,
        Trans::Trans => 112,
    }
}

fn uplo_flag(u: Uplo) -> CInt {
    match u {
        Uplo::Upper => 121,
        Uplo::Lower => 122,
    }
}

fn diag_flag(d: Diag) -> CInt {
    match d {
        Diag::NonUnit => 131,
        Diag::Unit => 132,
    }
}

fn side_flag(s: Side) -> CInt {
    match s {
        Side::Left => 141,
        Side::Right => 142,
    }
}

#[link(name = "openblas")]
extern "C" {
    fn cblas_dgemm(
        layout: CInt,
        transa: CInt,
        transb: CInt,
        m: CInt,
        n: CInt,
        k: CInt,
        alpha: f64,
        a: *const f64,
        lda: CInt,
        b: *const f64,
        ldb: CInt,
        beta: f64,
        c: *mut f64,
        ldc: CInt,
    );
    fn cblas_dtrmm(
        layout: CInt,
        side: CInt,
        uplo: CInt,
        transa: CInt,
        diag: CInt,
        m: CInt,
        n: CInt,
        alpha: f64,
        a: *const f64,
        lda: CInt,
        b: *mut f64,
        ldb: CInt,
    );
    fn cblas_dtrsm(
        layout: CInt,
        side: CInt,
        uplo: CInt,
        transa: CInt,
        diag: CInt,
        m: CInt,
        n: CInt,
        alpha: f64,
        a: *const f64,
        lda: CInt,
        b: *mut f64,
        ldb: CInt,
    );
    fn cblas_dsyrk(
        layout: CInt,
        uplo: CInt,
        trans: CInt,
        n: CInt,
        k: CInt,
        alpha: f64,
        a: *const f64,
        lda: CInt,
        beta: f64,
        c: *mut f64,
        ldc: CInt,
    );
    fn openblas_set_num_threads(n: CInt);
}

/// Caps the library's thread pool; handy for reproducible timings.
pub fn set_num_threads(n: usize) {
    unsafe { openblas_set_num_threads(n as CInt) };
}

fn base_ptr(a: MatrixView) -> *mut f64 {
    // Valid even for empty views: col_ptr(0) is the storage origin.
    a.col_ptr(0)
}

/// Kernel provider that forwards the level-3 kernels to the system BLAS.
#[derive(Debug, Default, Clone, Copy)]
pub struct PlatformProvider;

impl KernelProvider for PlatformProvider {
    fn name(&self) -> &'static str {
        "platform"
    }

    fn gemm(&self, transa: Trans, transb: Trans, alpha: f64, a: MatrixView, b: MatrixView, beta: f64, c: MatrixView) {
        let (m, n) = (c.rows(), c.cols());
        let k = match transa {
            Trans::NoTrans => a.cols(),
            Trans::Trans => a.rows(),
        };
        unsafe {
            cblas_dgemm(
                COL_MAJOR,
                trans_flag(transa),
                trans_flag(transb),
                m as CInt,
                n as CInt,
                k as CInt,
                alpha,
                base_ptr(a),
                a.ld().max(1) as CInt,
                base_ptr(b),
                b.ld().max(1) as CInt,
                beta,
                base_ptr(c),
                c.ld().max(1) as CInt,
            );
        }
    }

    fn trmm(&self, side: Side, uplo: Uplo, trans: Trans, diag: Diag, alpha: f64, a: MatrixView, b: MatrixView) {
        unsafe {
            cblas_dtrmm(
                COL_MAJOR,
                side_flag(side),
                uplo_flag(uplo),
                trans_flag(trans),
                diag_flag(diag),
                b.rows() as CInt,
                b.cols() as CInt,
                alpha,
                base_ptr(a),
                a.ld().max(1) as CInt,
                base_ptr(b),
                b.ld().max(1) as CInt,
            );
        }
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
        // CBLAS has no singularity report; keep the contract here.
        if diag == Diag::NonUnit {
            for i in 0..a.rows() {
                if a.get(i, i) == 0.0 {
                    return Err(KernelError::SingularDiagonal(i));
                }
            }
        }
        unsafe {
            cblas_dtrsm(
                COL_MAJOR,
                side_flag(side),
                uplo_flag(uplo),
                trans_flag(trans),
                diag_flag(diag),
                b.rows() as CInt,
                b.cols() as CInt,
                alpha,
                base_ptr(a),
                a.ld().max(1) as CInt,
                base_ptr(b),
                b.ld().max(1) as CInt,
            );
        }
        Ok(())
    }

    fn syrk(&self, uplo: Uplo, trans: Trans, alpha: f64, a: MatrixView, beta: f64, c: MatrixView) {
        let n = c.rows();
        let k = match trans {
            Trans::NoTrans => a.cols(),
            Trans::Trans => a.rows(),
        };
        unsafe {
            cblas_dsyrk(
                COL_MAJOR,
                uplo_flag(uplo),
                trans_flag(trans),
                n as CInt,
                k as CInt,
                alpha,
                base_ptr(a),
                a.ld().max(1) as CInt,
                beta,
                base_ptr(c),
                c.ld().max(1) as CInt,
            );
        }
    }

    fn laswp(&self, a: MatrixView, pivots: &[usize], forward: bool) {
        reference::ref_laswp(a, pivots, forward);
    }

    fn trti2(&self, uplo: Uplo, diag: Diag, a: MatrixView) -> Result<(), KernelError> {
        reference::ref_trti2(uplo, diag, a)
    }

    fn potf2(&self, uplo: Uplo, a: MatrixView) -> Result<(), KernelError> {
        reference::ref_potf2(uplo, a)
    }

    fn getf2(&self, a: MatrixView, pivots: &mut Vec<usize>) -> Result<(), KernelError> {
        reference::ref_getf2(a, pivots)
    }

    fn lauu2(&self, uplo: Uplo, a: MatrixView) {
        reference::ref_lauu2(uplo, a);
    }

    fn sylv_base(&self, a: MatrixView, b: MatrixView, c: MatrixView, isgn: i32) -> Result<(), KernelError> {
        reference::ref_sylv_base(a, b, c, isgn)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{gen_triangular, gen_uniform};

    #[test]
    fn platform_matches_reference_kernels() {
        set_num_threads(1);
        let reference = super::super::ReferenceProvider;
        let platform = PlatformProvider;
        let tol = |n: usize| 100.0 * n as f64 * f64::EPSILON;

        let mut a = gen_uniform(13, 9, 1);
        let mut b = gen_uniform(9, 7, 2);
        let mut c1 = gen_uniform(13, 7, 3);
        let mut c2 = c1.clone();
        reference.gemm(Trans::NoTrans, Trans::NoTrans, 1.5, a.view_mut(), b.view_mut(), 0.5, c1.view_mut());
        platform.gemm(Trans::NoTrans, Trans::NoTrans, 1.5, a.view_mut(), b.view_mut(), 0.5, c2.view_mut());
        for j in 0..7 {
            for i in 0..13 {
                assert!((c1.get(i, j) - c2.get(i, j)).abs() <= tol(13) * c1.frobenius_norm());
            }
        }

        let mut t = gen_triangular(9, Uplo::Lower, 4);
        let mut b1 = gen_uniform(9, 5, 5);
        let mut b2 = b1.clone();
        reference.trmm(Side::Left, Uplo::Lower, Trans::NoTrans, Diag::NonUnit, 1.0, t.view_mut(), b1.view_mut());
        platform.trmm(Side::Left, Uplo::Lower, Trans::NoTrans, Diag::NonUnit, 1.0, t.view_mut(), b2.view_mut());
        for j in 0..5 {
            for i in 0..9 {
                assert!((b1.get(i, j) - b2.get(i, j)).abs() <= tol(9) * b1.frobenius_norm());
            }
        }

        let mut t5 = gen_triangular(5, Uplo::Lower, 14);
        reference
            .trsm(Side::Right, Uplo::Lower, Trans::Trans, Diag::NonUnit, 1.0, t5.view_mut(), b1.view_mut())
            .unwrap();
        platform
            .trsm(Side::Right, Uplo::Lower, Trans::Trans, Diag::NonUnit, 1.0, t5.view_mut(), b2.view_mut())
            .unwrap();
        for j in 0..5 {
            for i in 0..9 {
                assert!((b1.get(i, j) - b2.get(i, j)).abs() <= tol(9) * b1.frobenius_norm());
            }
        }

        let mut s1 = gen_uniform(9, 9, 6);
        let mut s2 = s1.clone();
        reference.syrk(Uplo::Lower, Trans::NoTrans, 1.0, b1.view_mut(), 0.25, s1.view_mut());
        platform.syrk(Uplo::Lower, Trans::NoTrans, 1.0, b1.view_mut(), 0.25, s2.view_mut());
        for j in 0..9 {
            for i in j..9 {
                assert!((s1.get(i, j) - s2.get(i, j)).abs() <= tol(9) * s1.frobenius_norm());
            }
        }
    }
}
