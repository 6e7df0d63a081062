//! Independent verification: residual checks, reference inverses by a
//! different algorithm, and an exhaustive sweep over small problems.
//!
//! Nothing here calls back into the kernel implementations. Products
//! are formed with a plain triple loop, the inverse oracle uses
//! Gauss-Jordan elimination, and the Sylvester oracle eliminates its
//! Kronecker system in row-major order, so agreement with the library
//! is evidence rather than tautology.

use crate::flags::{Diag, Uplo};
use crate::kernels::{Instrumented, KernelError, KernelProvider};
use crate::matrix::{gen_spd, gen_triangular, gen_uniform, DenseMatrix};
use crate::{blocked, recursive};

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

/// Relative tolerance for a residual of an order-`dim` problem: a
/// generous multiple of what a backward-stable algorithm can accrue.
pub fn residual_tolerance(dim: usize) -> f64 {
    100.0 * dim as f64 * f64::EPSILON
}

/// A scale-invariant residual: `absolute` is a Frobenius norm of a
/// defect matrix, `normalization` the natural scale of the identity it
/// came from.
#[derive(Debug, Clone, Copy)]
pub struct Residual {
    pub absolute: f64,
    pub normalization: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.normalization > 0.0 {
            self.absolute / self.normalization
        } else if self.absolute == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.relative() <= tolerance
    }
}

/// Plain triple-loop product; the oracle's only way of multiplying.
pub fn mat_mul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.cols(), b.rows());
    let (m, n, k) = (a.rows(), b.cols(), a.cols());
    let mut c = DenseMatrix::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            let mut s = 0.0;
            for l in 0..k {
                s += a.get(i, l) * b.get(l, j);
            }
            c.set(i, j, s);
        }
    }
    c
}

/// Expands the stored triangle of `t` into a full dense matrix, zeroing
/// the opposite triangle and forcing ones on the diagonal for
/// `Diag::Unit`.
pub fn expand_triangular(t: &DenseMatrix, uplo: Uplo, diag: Diag) -> DenseMatrix {
    let n = t.rows();
    assert_eq!(t.cols(), n);
    let mut f = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let keep = match uplo {
                Uplo::Lower => i >= j,
                Uplo::Upper => i <= j,
            };
            if i == j {
                f.set(i, j, if diag == Diag::Unit { 1.0 } else { t.get(i, j) });
            } else if keep {
                f.set(i, j, t.get(i, j));
            }
        }
    }
    f
}

/// Expands the stored triangle of a symmetric matrix into full storage.
pub fn expand_symmetric(t: &DenseMatrix, uplo: Uplo) -> DenseMatrix {
    let n = t.rows();
    assert_eq!(t.cols(), n);
    let mut f = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let stored = match uplo {
                Uplo::Lower => i >= j,
                Uplo::Upper => i <= j,
            };
            let v = if stored { t.get(i, j) } else { t.get(j, i) };
            f.set(i, j, v);
        }
    }
    f
}

/// Applies the swap sequence `i <-> pivots[i]` to the rows of `a`.
pub fn apply_row_swaps(a: &mut DenseMatrix, pivots: &[usize]) {
    for (i, &p) in pivots.iter().enumerate() {
        if p != i {
            for j in 0..a.cols() {
                let x = a.get(i, j);
                a.set(i, j, a.get(p, j));
                a.set(p, j, x);
            }
        }
    }
}

fn frob_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    let mut s = 0.0;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            let d = a.get(i, j) - b.get(i, j);
            s += d * d;
        }
    }
    s.sqrt()
}

/// `|A X - I| / (|A| |X|)` for a triangular matrix and its claimed
/// inverse, both in packed triangular storage.
pub fn inverse_residual(original: &DenseMatrix, inverse: &DenseMatrix, uplo: Uplo, diag: Diag) -> Residual {
    let a = expand_triangular(original, uplo, diag);
    let x = expand_triangular(inverse, uplo, diag);
    let prod = mat_mul(&a, &x);
    let eye = DenseMatrix::identity(a.rows());
    Residual {
        absolute: frob_diff(&prod, &eye),
        normalization: a.frobenius_norm() * x.frobenius_norm(),
    }
}

/// `|A - L L^T| / |A|` (lower) or `|A - U^T U| / |A|` (upper).
pub fn cholesky_residual(original: &DenseMatrix, factor: &DenseMatrix, uplo: Uplo) -> Residual {
    let a = expand_symmetric(original, uplo);
    let recon = match uplo {
        Uplo::Lower => {
            let l = expand_triangular(factor, uplo, Diag::NonUnit);
            mat_mul(&l, &l.transposed())
        }
        Uplo::Upper => {
            let u = expand_triangular(factor, uplo, Diag::NonUnit);
            mat_mul(&u.transposed(), &u)
        }
    };
    Residual {
        absolute: frob_diff(&recon, &a),
        normalization: a.frobenius_norm(),
    }
}

/// `|P A - L U| / |A|` from packed LU output and the swap sequence.
pub fn lu_residual(original: &DenseMatrix, factored: &DenseMatrix, pivots: &[usize]) -> Residual {
    let (m, n) = (original.rows(), original.cols());
    let r = m.min(n);
    let mut l = DenseMatrix::zeros(m, r);
    let mut u = DenseMatrix::zeros(r, n);
    for j in 0..r {
        l.set(j, j, 1.0);
        for i in j + 1..m {
            l.set(i, j, factored.get(i, j));
        }
    }
    for j in 0..n {
        for i in 0..r.min(j + 1) {
            u.set(i, j, factored.get(i, j));
        }
    }
    let mut pa = original.clone();
    apply_row_swaps(&mut pa, pivots);
    Residual {
        absolute: frob_diff(&mat_mul(&l, &u), &pa),
        normalization: original.frobenius_norm(),
    }
}

/// `|tri(L^T L) - computed| / |L|^2` (lower) or with `U U^T` (upper);
/// only the stored triangle is compared.
pub fn triangular_product_residual(factor: &DenseMatrix, product: &DenseMatrix, uplo: Uplo) -> Residual {
    let n = factor.rows();
    let t = expand_triangular(factor, uplo, Diag::NonUnit);
    let full = match uplo {
        Uplo::Lower => mat_mul(&t.transposed(), &t),
        Uplo::Upper => mat_mul(&t, &t.transposed()),
    };
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            let stored = match uplo {
                Uplo::Lower => i >= j,
                Uplo::Upper => i <= j,
            };
            if stored {
                let d = full.get(i, j) - product.get(i, j);
                s += d * d;
            }
        }
    }
    let norm = t.frobenius_norm();
    Residual {
        absolute: s.sqrt(),
        normalization: norm * norm,
    }
}

/// Residual of the two-sided reduction: reconstructs the original from
/// the reduced matrix, `|L Ã L^T - A| / |A|` (lower) or
/// `|U^T Ã U - A| / |A|` (upper).
pub fn sygst_residual(original: &DenseMatrix, reduced: &DenseMatrix, factor: &DenseMatrix, uplo: Uplo) -> Residual {
    let a = expand_symmetric(original, uplo);
    let red = expand_symmetric(reduced, uplo);
    let f = expand_triangular(factor, uplo, Diag::NonUnit);
    let recon = match uplo {
        Uplo::Lower => mat_mul(&mat_mul(&f, &red), &f.transposed()),
        Uplo::Upper => mat_mul(&mat_mul(&f.transposed(), &red), &f),
    };
    Residual {
        absolute: frob_diff(&recon, &a),
        normalization: a.frobenius_norm(),
    }
}

/// `|A X + isgn X B - C| / ((|A| + |B|) |X|)` with upper triangular
/// `A`, `B` in packed storage.
pub fn sylvester_residual(
    a: &DenseMatrix,
    b: &DenseMatrix,
    rhs: &DenseMatrix,
    x: &DenseMatrix,
    isgn: i32,
) -> Residual {
    let af = expand_triangular(a, Uplo::Upper, Diag::NonUnit);
    let bf = expand_triangular(b, Uplo::Upper, Diag::NonUnit);
    let mut lhs = mat_mul(&af, x);
    let xb = mat_mul(x, &bf);
    for j in 0..lhs.cols() {
        for i in 0..lhs.rows() {
            lhs.set(i, j, lhs.get(i, j) + isgn as f64 * xb.get(i, j));
        }
    }
    Residual {
        absolute: frob_diff(&lhs, rhs),
        normalization: (af.frobenius_norm() + bf.frobenius_norm()) * x.frobenius_norm(),
    }
}

/// Inverts a full dense matrix by Gauss-Jordan elimination with partial
/// pivoting. Deliberately a different algorithm from anything in the
/// library; `O(n^3)` with a full augmented system, for test use.
pub fn dense_invert_oracle(a: &DenseMatrix) -> Result<DenseMatrix, KernelError> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "inverse oracle needs a square matrix");
    let mut work = a.clone();
    let mut inv = DenseMatrix::identity(n);
    for j in 0..n {
        let mut p = j;
        let mut best = work.get(j, j).abs();
        for i in j + 1..n {
            if work.get(i, j).abs() > best {
                best = work.get(i, j).abs();
                p = i;
            }
        }
        if best == 0.0 {
            return Err(KernelError::NearSingularSystem(j));
        }
        if p != j {
            for c in 0..n {
                let x = work.get(j, c);
                work.set(j, c, work.get(p, c));
                work.set(p, c, x);
                let y = inv.get(j, c);
                inv.set(j, c, inv.get(p, c));
                inv.set(p, c, y);
            }
        }
        let piv = work.get(j, j);
        for c in 0..n {
            work.set(j, c, work.get(j, c) / piv);
            inv.set(j, c, inv.get(j, c) / piv);
        }
        for i in 0..n {
            if i != j {
                let f = work.get(i, j);
                if f != 0.0 {
                    for c in 0..n {
                        work.set(i, c, work.get(i, c) - f * work.get(j, c));
                        inv.set(i, c, inv.get(i, c) - f * inv.get(j, c));
                    }
                }
            }
        }
    }
    Ok(inv)
}

/// Solves `A X + isgn X B = C` (upper triangular `A`, `B`) through its
/// dense `(mn) x (mn)` Kronecker system, eliminated row-major with
/// partial pivoting. Quadratic memory: restricted to `m n <= 4096`.
pub fn kron_sylvester_oracle(
    a: &DenseMatrix,
    b: &DenseMatrix,
    c: &DenseMatrix,
    isgn: i32,
) -> Result<DenseMatrix, KernelError> {
    let (m, n) = (c.rows(), c.cols());
    assert_eq!((a.rows(), a.cols()), (m, m));
    assert_eq!((b.rows(), b.cols()), (n, n));
    let s = m * n;
    assert!(s <= 4096, "sylvester oracle limited to m * n <= 4096");
    if s == 0 {
        return Ok(DenseMatrix::zeros(m, n));
    }
    let sgn = isgn as f64;

    // Row-major flat system: unknown (i, j) lives at index i * n + j.
    let idx = |i: usize, j: usize| i * n + j;
    let mut k = vec![0.0f64; s * s];
    let mut rhs = vec![0.0f64; s];
    for i in 0..m {
        for j in 0..n {
            let row = idx(i, j);
            for ip in 0..m {
                k[row * s + idx(ip, j)] += a.get(i, ip);
            }
            for jp in 0..n {
                k[row * s + idx(i, jp)] += sgn * b.get(jp, j);
            }
            rhs[row] = c.get(i, j);
        }
    }
    let scale = k.iter().map(|v| v * v).sum::<f64>().sqrt();

    for col in 0..s {
        let mut p = col;
        let mut best = k[col * s + col].abs();
        for r in col + 1..s {
            if k[r * s + col].abs() > best {
                best = k[r * s + col].abs();
                p = r;
            }
        }
        if best <= f64::EPSILON * scale {
            return Err(KernelError::NearSingularSystem(col));
        }
        if p != col {
            for c2 in 0..s {
                k.swap(col * s + c2, p * s + c2);
            }
            rhs.swap(col, p);
        }
        for r in col + 1..s {
            let f = k[r * s + col] / k[col * s + col];
            if f != 0.0 {
                for c2 in col..s {
                    k[r * s + c2] -= f * k[col * s + c2];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    for r in (0..s).rev() {
        let mut t = rhs[r];
        for c2 in r + 1..s {
            t -= k[r * s + c2] * rhs[c2];
        }
        rhs[r] = t / k[r * s + r];
    }

    let mut x = DenseMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            x.set(i, j, rhs[idx(i, j)]);
        }
    }
    Ok(x)
}

/// One check that exceeded its tolerance in [`exhaustive_small_sweep`].
#[derive(Debug, Clone)]
pub struct SweepFailure {
    pub op: String,
    pub n: usize,
    pub param: usize,
    pub seed: u64,
    pub what: String,
    pub value: f64,
    pub tolerance: f64,
}

impl fmt::Display for SweepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} param={} seed={}: {} = {:.3e} > {:.3e}",
            self.op, self.n, self.param, self.seed, self.what, self.value, self.tolerance
        )
    }
}

/// Aggregated outcome for one `(op, n, param)` cell of the sweep: how
/// many checks it ran across all seeds, the worst value/tolerance ratio
/// seen, and the time spent.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub op: String,
    pub n: usize,
    pub param: usize,
    pub checks: usize,
    pub worst_ratio: f64,
    pub seconds: f64,
    pub passed: bool,
}

/// Outcome of [`exhaustive_small_sweep`]: how many checks ran, the
/// worst margin observed, a per-cell summary and every check that
/// failed. Cells appear in execution order.
#[derive(Debug, Default)]
pub struct SweepReport {
    pub checks: usize,
    pub worst_ratio: f64,
    pub entries: Vec<SweepEntry>,
    pub failures: Vec<SweepFailure>,
    index: HashMap<(String, usize, usize), usize>,
}

impl SweepReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn entry_mut(&mut self, op: &str, n: usize, param: usize) -> &mut SweepEntry {
        let key = (op.to_string(), n, param);
        let slot = *self.index.entry(key).or_insert_with(|| {
            self.entries.push(SweepEntry {
                op: op.to_string(),
                n,
                param,
                checks: 0,
                worst_ratio: 0.0,
                seconds: 0.0,
                passed: true,
            });
            self.entries.len() - 1
        });
        &mut self.entries[slot]
    }

    fn add_seconds(&mut self, op: &str, n: usize, param: usize, seconds: f64) {
        self.entry_mut(op, n, param).seconds += seconds;
    }

    fn push(&mut self, op: &str, n: usize, param: usize, seed: u64, what: &str, value: f64, tolerance: f64) {
        self.checks += 1;
        let ratio = if tolerance > 0.0 {
            value / tolerance
        } else if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if ratio > self.worst_ratio {
            self.worst_ratio = ratio;
        }
        let entry = self.entry_mut(op, n, param);
        entry.checks += 1;
        if ratio > entry.worst_ratio {
            entry.worst_ratio = ratio;
        }
        if value > tolerance {
            entry.passed = false;
            self.failures.push(SweepFailure {
                op: op.to_string(),
                n,
                param,
                seed,
                what: what.to_string(),
                value,
                tolerance,
            });
        }
    }
}

fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let norm = b.frobenius_norm();
    let d = frob_diff(a, b);
    if norm > 0.0 {
        d / norm
    } else if d == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Runs every operation for every size `0..=n_max`, every block size /
/// crossover in `params` and every seed, comparing the blocked and
/// recursive drivers against the unblocked kernels and against
/// independent residual checks. Any value beyond `residual_tolerance`
/// of the problem size is reported as a failure.
pub fn exhaustive_small_sweep(
    provider: &dyn KernelProvider,
    n_max: usize,
    params: &[usize],
    seeds: &[u64],
) -> SweepReport {
    let mut report = SweepReport::default();

    for n in 0..=n_max {
        let tol = residual_tolerance(n);
        for &param in params {
            if param == 0 {
                continue;
            }
            for &seed in seeds {
                for uplo in [Uplo::Lower, Uplo::Upper] {
                    let opname = |base: &str| {
                        format!("{base}-{}", if uplo == Uplo::Lower { "lower" } else { "upper" })
                    };

                    // Triangular inversion.
                    {
                        let t0 = Instant::now();
                        let t = gen_triangular(n, uplo, seed);
                        let mut unb = t.clone();
                        provider.trti2(uplo, Diag::NonUnit, unb.view_mut()).unwrap();
                        let mut rec = t.clone();
                        let mut inst = Instrumented::new(provider);
                        recursive::rec_trtri(&mut inst, uplo, Diag::NonUnit, rec.view_mut(), param).unwrap();
                        let mut blk = t.clone();
                        blocked::blocked_trtri(&mut inst, uplo, Diag::NonUnit, blk.view_mut(), param).unwrap();
                        let op = opname("trtri");
                        report.push(&op, n, param, seed, "residual(recursive)",
                            inverse_residual(&t, &rec, uplo, Diag::NonUnit).relative(), tol);
                        report.push(&op, n, param, seed, "residual(blocked)",
                            inverse_residual(&t, &blk, uplo, Diag::NonUnit).relative(), tol);
                        report.push(&op, n, param, seed, "diff(recursive, unblocked)", rel_diff(&rec, &unb), tol);
                        report.push(&op, n, param, seed, "diff(blocked, unblocked)", rel_diff(&blk, &unb), tol);
                        report.add_seconds(&op, n, param, t0.elapsed().as_secs_f64());
                    }

                    // Cholesky.
                    {
                        let t0 = Instant::now();
                        let spd = gen_spd(n, seed);
                        let mut unb = spd.clone();
                        provider.potf2(uplo, unb.view_mut()).unwrap();
                        let mut rec = spd.clone();
                        let mut inst = Instrumented::new(provider);
                        recursive::rec_potrf(&mut inst, uplo, rec.view_mut(), param).unwrap();
                        let mut blk = spd.clone();
                        blocked::blocked_potrf(&mut inst, uplo, blk.view_mut(), param).unwrap();
                        let op = opname("potrf");
                        report.push(&op, n, param, seed, "residual(recursive)",
                            cholesky_residual(&spd, &rec, uplo).relative(), tol);
                        report.push(&op, n, param, seed, "residual(blocked)",
                            cholesky_residual(&spd, &blk, uplo).relative(), tol);
                        report.push(&op, n, param, seed, "diff(recursive, unblocked)", rel_diff(&rec, &unb), tol);
                        report.push(&op, n, param, seed, "diff(blocked, unblocked)", rel_diff(&blk, &unb), tol);
                        report.add_seconds(&op, n, param, t0.elapsed().as_secs_f64());
                    }

                    // Triangular product.
                    {
                        let t0 = Instant::now();
                        let t = gen_triangular(n, uplo, seed.wrapping_add(1));
                        let mut unb = t.clone();
                        provider.lauu2(uplo, unb.view_mut());
                        let mut rec = t.clone();
                        let mut inst = Instrumented::new(provider);
                        recursive::rec_lauum(&mut inst, uplo, rec.view_mut(), param);
                        let op = opname("lauum");
                        report.push(&op, n, param, seed, "residual(recursive)",
                            triangular_product_residual(&t, &rec, uplo).relative(), tol);
                        report.push(&op, n, param, seed, "diff(recursive, unblocked)", rel_diff(&rec, &unb), tol);
                        report.add_seconds(&op, n, param, t0.elapsed().as_secs_f64());
                    }
                }

                // LU: no uplo, pivots must agree exactly.
                {
                    let t0 = Instant::now();
                    let a0 = gen_uniform(n, n, seed.wrapping_add(2));
                    let mut unb = a0.clone();
                    let mut piv_unb = Vec::new();
                    provider.getf2(unb.view_mut(), &mut piv_unb).unwrap();
                    let mut rec = a0.clone();
                    let mut piv_rec = Vec::new();
                    let mut inst = Instrumented::new(provider);
                    recursive::rec_getrf(&mut inst, rec.view_mut(), &mut piv_rec, param).unwrap();
                    let mut blk = a0.clone();
                    let mut piv_blk = Vec::new();
                    blocked::blocked_getrf(&mut inst, blk.view_mut(), &mut piv_blk, param).unwrap();
                    report.push("getrf", n, param, seed, "residual(recursive)",
                        lu_residual(&a0, &rec, &piv_rec).relative(), tol);
                    report.push("getrf", n, param, seed, "residual(blocked)",
                        lu_residual(&a0, &blk, &piv_blk).relative(), tol);
                    report.push("getrf", n, param, seed, "diff(recursive, unblocked)", rel_diff(&rec, &unb), tol);
                    report.push("getrf", n, param, seed, "diff(blocked, unblocked)", rel_diff(&blk, &unb), tol);
                    let pivot_mismatches =
                        (piv_rec != piv_unb) as usize as f64 + (piv_blk != piv_unb) as usize as f64;
                    report.push("getrf", n, param, seed, "pivot mismatches", pivot_mismatches, 0.0);
                    report.add_seconds("getrf", n, param, t0.elapsed().as_secs_f64());
                }
            }
        }
    }
    report
}
