//! FLOP accounting for kernel calls.
//!
//! Costs are stored in integer *thirds* of a FLOP so that every model in
//! the table below is exact: the cubic terms of the factorization
//! kernels all carry a 1/3 that would otherwise force floating-point
//! accumulation. Ledger totals are therefore exactly reproducible, and
//! ratios between them can be compared without tolerance.

use std::time::Instant;

use crate::flags::{Diag, Side, Trans, Uplo};
use crate::matrix::MatrixView;

use super::{KernelError, KernelProvider};

/// Identifies which kernel a ledger entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Gemm,
    Trmm,
    Trsm,
    Syrk,
    Laswp,
    Trti2,
    Potf2,
    Getf2,
    Lauu2,
    SylvBase,
    Sygs2,
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Gemm => "gemm",
            KernelKind::Trmm => "trmm",
            KernelKind::Trsm => "trsm",
            KernelKind::Syrk => "syrk",
            KernelKind::Laswp => "laswp",
            KernelKind::Trti2 => "trti2",
            KernelKind::Potf2 => "potf2",
            KernelKind::Getf2 => "getf2",
            KernelKind::Lauu2 => "lauu2",
            KernelKind::SylvBase => "sylv",
            KernelKind::Sygs2 => "sygs2",
        }
    }

    /// Level-3 multiply-rich kernels, as opposed to unblocked base kernels.
    pub fn is_blas3(&self) -> bool {
        matches!(
            self,
            KernelKind::Gemm | KernelKind::Trmm | KernelKind::Trsm | KernelKind::Syrk
        )
    }

    pub fn is_base(&self) -> bool {
        matches!(
            self,
            KernelKind::Trti2
                | KernelKind::Potf2
                | KernelKind::Getf2
                | KernelKind::Lauu2
                | KernelKind::SylvBase
                | KernelKind::Sygs2
        )
    }
}

/// One recorded kernel call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerEntry {
    pub kernel: KernelKind,
    /// Operand dimensions. For `gemm` these are the product dimensions;
    /// for `trmm`/`trsm`, `m x n` is the updated matrix and `k` the
    /// triangular order; for `syrk`, `m = n` is the update order and `k`
    /// the inner dimension; base kernels set `k = 0`.
    pub m: usize,
    pub n: usize,
    pub k: usize,
    /// Cost in thirds of a FLOP (see module docs).
    pub flops3: u64,
    /// Recursion depth of the caller that issued the kernel, with 0 the
    /// external entry point; a kernel issued by the top-level call of an
    /// algorithm is at level 1.
    pub level: usize,
    pub seconds: f64,
}

impl LedgerEntry {
    pub fn flops(&self) -> f64 {
        self.flops3 as f64 / 3.0
    }

    /// Smallest nonzero operand dimension, 0 for an all-empty call.
    pub fn min_dim(&self) -> usize {
        [self.m, self.n, self.k]
            .into_iter()
            .filter(|&d| d > 0)
            .min()
            .unwrap_or(0)
    }

    pub fn max_dim(&self) -> usize {
        self.m.max(self.n).max(self.k)
    }
}

/// Appending log of kernel calls with exact integer cost totals.
#[derive(Debug, Default, Clone)]
pub struct FlopLedger {
    entries: Vec<LedgerEntry>,
}

impl FlopLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, entry: LedgerEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact total cost in thirds of a FLOP.
    pub fn total_flops3(&self) -> u128 {
        self.entries.iter().map(|e| e.flops3 as u128).sum()
    }

    pub fn total_flops(&self) -> f64 {
        self.total_flops3() as f64 / 3.0
    }

    pub fn total_seconds(&self) -> f64 {
        self.entries.iter().map(|e| e.seconds).sum()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}

/// Cost models, in thirds of a FLOP.
///
/// `gemm` counts the classical `2mnk`; the triangular and symmetric
/// kernels count the multiply-add volume of the touched triangle. The
/// factorization-style base kernels use the standard leading-order
/// counts of their algorithms.
pub mod cost {
    /// `2mnk` FLOPs.
    pub fn gemm(m: usize, n: usize, k: usize) -> u64 {
        6 * (m as u64) * (n as u64) * (k as u64)
    }

    /// `m n k` FLOPs where `k` is the triangular order.
    pub fn trmm(m: usize, n: usize, k: usize) -> u64 {
        3 * (m as u64) * (n as u64) * (k as u64)
    }

    /// Same volume as [`trmm`].
    pub fn trsm(m: usize, n: usize, k: usize) -> u64 {
        3 * (m as u64) * (n as u64) * (k as u64)
    }

    /// `n(n+1)k` FLOPs: one fused multiply-add per element of the
    /// updated triangle per inner index.
    pub fn syrk(n: usize, k: usize) -> u64 {
        3 * (n as u64) * (n as u64 + 1) * (k as u64)
    }

    /// `n^3 / 3` FLOPs (unblocked triangular inversion).
    pub fn trti2(n: usize) -> u64 {
        let n = n as u64;
        n * n * n
    }

    /// `n^3 / 3` FLOPs (unblocked Cholesky).
    pub fn potf2(n: usize) -> u64 {
        let n = n as u64;
        n * n * n
    }

    /// LU with partial pivoting on an `m x n` panel,
    /// `mnr - (m + n) r^2 / 2 + r^3 / 3` FLOPs with `r = min(m, n)`;
    /// reduces to `mn^2 - n^3/3` for tall panels and `2n^3/3` square.
    pub fn getf2(m: usize, n: usize) -> u64 {
        let r = m.min(n) as u64;
        let (m, n) = (m as u64, n as u64);
        6 * m * n * r + 2 * r * r * r - 3 * (m + n) * r * r
    }

    /// `n^3 / 3` FLOPs (unblocked triangular product).
    pub fn lauu2(n: usize) -> u64 {
        let n = n as u64;
        n * n * n
    }

    /// Dense LU solve of the `(mn) x (mn)` Kronecker system,
    /// `2(mn)^3 / 3` FLOPs.
    pub fn sylv_base(m: usize, n: usize) -> u64 {
        let s = (m * n) as u64;
        2 * s * s * s
    }

    /// `n^3` FLOPs (unblocked two-sided reduction to standard form).
    pub fn sygs2(n: usize) -> u64 {
        let n = n as u64;
        3 * n * n * n
    }
}

/// A provider wrapper that times every kernel call and appends its cost
/// to a [`FlopLedger`]. Each method takes the recursion `level` of the
/// caller; the entry is recorded at that level.
pub struct Instrumented<'p> {
    provider: &'p dyn KernelProvider,
    ledger: FlopLedger,
}

impl<'p> Instrumented<'p> {
    pub fn new(provider: &'p dyn KernelProvider) -> Self {
        Self {
            provider,
            ledger: FlopLedger::new(),
        }
    }

    pub fn provider(&self) -> &'p dyn KernelProvider {
        self.provider
    }

    pub fn ledger(&self) -> &FlopLedger {
        &self.ledger
    }

    pub fn take_ledger(&mut self) -> FlopLedger {
        std::mem::take(&mut self.ledger)
    }

    pub fn clear(&mut self) {
        self.ledger.clear();
    }

    fn push(&mut self, kernel: KernelKind, m: usize, n: usize, k: usize, flops3: u64, level: usize, start: Instant) {
        self.ledger.record(LedgerEntry {
            kernel,
            m,
            n,
            k,
            flops3,
            level,
            seconds: start.elapsed().as_secs_f64(),
        });
    }

    pub fn gemm(
        &mut self,
        transa: Trans,
        transb: Trans,
        alpha: f64,
        a: MatrixView,
        b: MatrixView,
        beta: f64,
        c: MatrixView,
        level: usize,
    ) {
        let (m, n) = (c.rows(), c.cols());
        let k = match transa {
            Trans::NoTrans => a.cols(),
            Trans::Trans => a.rows(),
        };
        let start = Instant::now();
        self.provider.gemm(transa, transb, alpha, a, b, beta, c);
        self.push(KernelKind::Gemm, m, n, k, cost::gemm(m, n, k), level, start);
    }

    pub fn trmm(
        &mut self,
        side: Side,
        uplo: Uplo,
        trans: Trans,
        diag: Diag,
        alpha: f64,
        a: MatrixView,
        b: MatrixView,
        level: usize,
    ) {
        let (m, n) = (b.rows(), b.cols());
        let k = match side {
            Side::Left => m,
            Side::Right => n,
        };
        let start = Instant::now();
        self.provider.trmm(side, uplo, trans, diag, alpha, a, b);
        self.push(KernelKind::Trmm, m, n, k, cost::trmm(m, n, k), level, start);
    }

    pub fn trsm(
        &mut self,
        side: Side,
        uplo: Uplo,
        trans: Trans,
        diag: Diag,
        alpha: f64,
        a: MatrixView,
        b: MatrixView,
        level: usize,
    ) -> Result<(), KernelError> {
        let (m, n) = (b.rows(), b.cols());
        let k = match side {
            Side::Left => m,
            Side::Right => n,
        };
        let start = Instant::now();
        let res = self.provider.trsm(side, uplo, trans, diag, alpha, a, b);
        self.push(KernelKind::Trsm, m, n, k, cost::trsm(m, n, k), level, start);
        res
    }

    pub fn syrk(
        &mut self,
        uplo: Uplo,
        trans: Trans,
        alpha: f64,
        a: MatrixView,
        beta: f64,
        c: MatrixView,
        level: usize,
    ) {
        let n = c.rows();
        let k = match trans {
            Trans::NoTrans => a.cols(),
            Trans::Trans => a.rows(),
        };
        let start = Instant::now();
        self.provider.syrk(uplo, trans, alpha, a, beta, c);
        self.push(KernelKind::Syrk, n, n, k, cost::syrk(n, k), level, start);
    }

    pub fn laswp(&mut self, a: MatrixView, pivots: &[usize], forward: bool, level: usize) {
        let (m, n) = (a.rows(), a.cols());
        let start = Instant::now();
        self.provider.laswp(a, pivots, forward);
        self.push(KernelKind::Laswp, m, n, 0, 0, level, start);
    }

    pub fn trti2(&mut self, uplo: Uplo, diag: Diag, a: MatrixView, level: usize) -> Result<(), KernelError> {
        let n = a.rows();
        let start = Instant::now();
        let res = self.provider.trti2(uplo, diag, a);
        self.push(KernelKind::Trti2, n, n, 0, cost::trti2(n), level, start);
        res
    }

    pub fn potf2(&mut self, uplo: Uplo, a: MatrixView, level: usize) -> Result<(), KernelError> {
        let n = a.rows();
        let start = Instant::now();
        let res = self.provider.potf2(uplo, a);
        self.push(KernelKind::Potf2, n, n, 0, cost::potf2(n), level, start);
        res
    }

    pub fn getf2(&mut self, a: MatrixView, pivots: &mut Vec<usize>, level: usize) -> Result<(), KernelError> {
        let (m, n) = (a.rows(), a.cols());
        let start = Instant::now();
        let res = self.provider.getf2(a, pivots);
        self.push(KernelKind::Getf2, m, n, 0, cost::getf2(m, n), level, start);
        res
    }

    pub fn lauu2(&mut self, uplo: Uplo, a: MatrixView, level: usize) {
        let n = a.rows();
        let start = Instant::now();
        self.provider.lauu2(uplo, a);
        self.push(KernelKind::Lauu2, n, n, 0, cost::lauu2(n), level, start);
    }

    pub fn sylv_base(
        &mut self,
        a: MatrixView,
        b: MatrixView,
        c: MatrixView,
        isgn: i32,
        level: usize,
    ) -> Result<(), KernelError> {
        let (m, n) = (c.rows(), c.cols());
        let start = Instant::now();
        let res = self.provider.sylv_base(a, b, c, isgn);
        self.push(KernelKind::SylvBase, m, n, 0, cost::sylv_base(m, n), level, start);
        res
    }

    /// Records the cost of an unblocked two-sided reduction performed
    /// outside the provider (it is composed of vector operations, not a
    /// single kernel call).
    pub fn note_sygs2(&mut self, n: usize, level: usize, start: Instant) {
        self.push(KernelKind::Sygs2, n, n, 0, cost::sygs2(n), level, start);
    }
}
