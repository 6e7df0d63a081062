//! The recursion split rule and zero-copy partitioning helpers.

use super::MatrixView;

/// Default alignment for the top half of a split: sub-matrices come out
/// as multiples of 8 whenever the size allows it.
pub const SPLIT_ALIGN: usize = 8;

/// How a dimension of size `n1 + n2` is cut for recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitPlan {
    /// Rows/columns in the top-left part.
    pub n1: usize,
    /// Rows/columns in the bottom-right part.
    pub n2: usize,
    /// Alignment the plan was computed with.
    pub align: usize,
}

/// Splits `n` roughly in half, rounding `n1` down to a multiple of
/// `align` when both halves stay at least `align` wide; otherwise plain
/// `floor(n / 2)`.
///
/// Rounding down keeps `n1 <= n / 2`, so the second recursive call is
/// never smaller than the first.
///
/// Panics for `n < 2` or `align == 0`; callers must take their base
/// case before splitting.
pub fn split_point(n: usize, align: usize) -> SplitPlan {
    assert!(n >= 2, "split_point requires n >= 2, got {n}");
    assert!(align >= 1, "split_point requires align >= 1");
    let aligned = align * (n / (2 * align));
    let n1 = if aligned >= align { aligned } else { n / 2 };
    SplitPlan {
        n1,
        n2: n - n1,
        align,
    }
}

/// Cuts a square view into its four quadrants at `plan.n1`.
///
/// Returns `(tl, tr, bl, br)`; all four share storage with `a` and are
/// pairwise disjoint.
pub fn partition_quadrants<'a>(
    a: MatrixView<'a>,
    plan: SplitPlan,
) -> (MatrixView<'a>, MatrixView<'a>, MatrixView<'a>, MatrixView<'a>) {
    let n = plan.n1 + plan.n2;
    assert!(
        a.rows() == n && a.cols() == n,
        "quadrant partition of {}x{} view with plan {}+{}",
        a.rows(),
        a.cols(),
        plan.n1,
        plan.n2
    );
    let (n1, n2) = (plan.n1, plan.n2);
    (
        a.submatrix(0, 0, n1, n1),
        a.submatrix(0, n1, n1, n2),
        a.submatrix(n1, 0, n2, n1),
        a.submatrix(n1, n1, n2, n2),
    )
}

/// Cuts a view into a left block of `n1` columns and the rest.
pub fn partition_cols<'a>(a: MatrixView<'a>, n1: usize) -> (MatrixView<'a>, MatrixView<'a>) {
    assert!(n1 > 0 && n1 < a.cols(), "column split at {n1} of {} columns", a.cols());
    (
        a.submatrix(0, 0, a.rows(), n1),
        a.submatrix(0, n1, a.rows(), a.cols() - n1),
    )
}
