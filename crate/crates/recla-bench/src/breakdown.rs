//! Per-level attribution of the recursive algorithms' arithmetic, and
//! the analytic model the measured ledger must reproduce.

use std::fmt;

use recla::matrix::{gen_spd, gen_triangular, gen_uniform, split_point, SPLIT_ALIGN};
use recla::recursive::{rec_getrf, rec_lauum, rec_potrf, rec_trtri};
use recla::{Diag, Instrumented, KernelProvider, Uplo};

use crate::sweep::OpName;
use crate::BenchError;

/// Every breakdown uses the same input; level structure and FLOP counts
/// are value-independent, so the seed only pins the timing runs.
const BREAKDOWN_SEED: u64 = 0x00C0_FFEE;

/// A ledger level as reported: coupling kernels keep their numbered
/// recursion level, the unblocked base kernels share one bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LevelKey {
    Level(usize),
    Base,
}

impl fmt::Display for LevelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelKey::Level(l) => write!(f, "{l}"),
            LevelKey::Base => write!(f, "base"),
        }
    }
}

/// One aggregated `(level, kernel)` cell of a breakdown.
#[derive(Debug, Clone)]
pub struct BreakdownRow {
    pub op: String,
    pub n: usize,
    pub c: usize,
    pub level: LevelKey,
    pub kernel: &'static str,
    /// Exact cost in thirds of a FLOP, summed over all calls in the cell.
    pub flops3: u128,
    pub share: f64,
    pub seconds: f64,
}

impl BreakdownRow {
    pub fn flops(&self) -> f64 {
        self.flops3 as f64 / 3.0
    }
}

/// Runs the recursive algorithm once with a level-tagged ledger and
/// aggregates it by `(level, kernel)`. Returns the rows (levels
/// ascending, base last) and the cumulative share of matrix-matrix
/// kernels.
pub fn breakdown(
    op: OpName,
    n: usize,
    c: usize,
    provider: &dyn KernelProvider,
) -> Result<(Vec<BreakdownRow>, f64), BenchError> {
    let mut inst = Instrumented::new(provider);
    let fail = |e: recla::KernelError| BenchError::Verification(format!("{} n={n} c={c}: {e}", op.name()));
    match op {
        OpName::Trtri => {
            let mut a = gen_triangular(n, Uplo::Lower, BREAKDOWN_SEED);
            rec_trtri(&mut inst, Uplo::Lower, Diag::NonUnit, a.view_mut(), c).map_err(fail)?;
        }
        OpName::Potrf => {
            let mut a = gen_spd(n, BREAKDOWN_SEED);
            rec_potrf(&mut inst, Uplo::Lower, a.view_mut(), c).map_err(fail)?;
        }
        OpName::Getrf => {
            let mut a = gen_uniform(n, n, BREAKDOWN_SEED);
            let mut pivots = Vec::new();
            rec_getrf(&mut inst, a.view_mut(), &mut pivots, c).map_err(fail)?;
        }
        OpName::Lauum => {
            let mut a = gen_triangular(n, Uplo::Lower, BREAKDOWN_SEED);
            rec_lauum(&mut inst, Uplo::Lower, a.view_mut(), c);
        }
        other => {
            return Err(BenchError::Usage(format!(
                "breakdown covers trtri|potrf|getrf|lauum, not {}",
                other.name()
            )))
        }
    }

    let ledger = inst.take_ledger();
    let total = ledger.total_flops3();
    let mut cells: Vec<((LevelKey, &'static str), (u128, f64))> = Vec::new();
    let mut blas3: u128 = 0;
    for e in ledger.entries() {
        let level = if e.kernel.is_base() { LevelKey::Base } else { LevelKey::Level(e.level) };
        let key = (level, e.kernel.name());
        match cells.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => {
                v.0 += e.flops3 as u128;
                v.1 += e.seconds;
            }
            None => cells.push((key, (e.flops3 as u128, e.seconds))),
        }
        if e.kernel.is_blas3() {
            blas3 += e.flops3 as u128;
        }
    }
    cells.sort_by(|a, b| a.0.cmp(&b.0));

    let rows = cells
        .into_iter()
        .map(|((level, kernel), (flops3, seconds))| BreakdownRow {
            op: op.name().into(),
            n,
            c,
            level,
            kernel,
            flops3,
            share: if total > 0 { flops3 as f64 / total as f64 } else { 0.0 },
            seconds,
        })
        .collect();
    let blas3_share = if total > 0 { blas3 as f64 / total as f64 } else { 0.0 };
    Ok((rows, blas3_share))
}

/// Collapses breakdown rows to one combined share per level. Integer
/// FLOP counts are summed before the single division, so the shares
/// are exactly the ones [`predict_shares`] computes.
pub fn combined_level_shares(rows: &[BreakdownRow]) -> Vec<(LevelKey, f64)> {
    let mut acc: Vec<(LevelKey, u128)> = Vec::new();
    for r in rows {
        match acc.iter_mut().find(|(k, _)| *k == r.level) {
            Some((_, v)) => *v += r.flops3,
            None => acc.push((r.level, r.flops3)),
        }
    }
    acc.sort_by(|a, b| a.0.cmp(&b.0));
    let total: u128 = acc.iter().map(|&(_, f)| f).sum();
    acc.into_iter()
        .map(|(k, f)| (k, if total > 0 { f as f64 / total as f64 } else { 0.0 }))
        .collect()
}

/// Analytic level shares for the recursive triangular inversion,
/// computed without running anything: walk the exact split tree and
/// charge each node's two coupling kernels to its level, in integer
/// thirds. For a perfectly halving split this reproduces the geometric
/// ladder 3/4, 3/16, 3/64, ...
pub fn predict_shares(n: usize, c: usize) -> Vec<(LevelKey, f64)> {
    assert!(n >= 1, "prediction needs n >= 1");
    let cutoff = c.max(1);
    let mut levels: Vec<u128> = Vec::new();
    let mut base = 0u128;
    walk(n, cutoff, 0, &mut levels, &mut base);
    let total: u128 = levels.iter().copied().sum::<u128>() + base;
    let mut shares: Vec<(LevelKey, f64)> = levels
        .iter()
        .enumerate()
        .map(|(i, &f)| (LevelKey::Level(i + 1), f as f64 / total as f64))
        .collect();
    shares.push((LevelKey::Base, base as f64 / total as f64));
    shares
}

fn walk(n: usize, cutoff: usize, depth: usize, levels: &mut Vec<u128>, base: &mut u128) {
    if n <= cutoff {
        *base += (n as u128).pow(3);
        return;
    }
    let plan = split_point(n, SPLIT_ALIGN);
    let (n1, n2) = (plan.n1 as u128, plan.n2 as u128);
    if levels.len() <= depth {
        levels.resize(depth + 1, 0);
    }
    // trmm on the n2 x n1 panel with order n1, then trsm with order n2.
    levels[depth] += 3 * n2 * n1 * n1 + 3 * n2 * n1 * n2;
    walk(plan.n1, cutoff, depth + 1, levels, base);
    walk(plan.n2, cutoff, depth + 1, levels, base);
}
