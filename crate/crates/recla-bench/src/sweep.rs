//! Timed sweeps over (size, parameter, repetition) grids. Every
//! measured run re-derives its input deterministically, times only the
//! algorithm itself, reads the FLOP count off the ledger and, unless
//! disabled, checks the result against the residual oracles.

use std::str::FromStr;
use std::time::Instant;

use recla::blocked::{blocked_getrf, blocked_potrf, blocked_trtri, DEFAULT_BLOCK};
use recla::matrix::{gen_spd, gen_triangular, gen_uniform};
use recla::oracle::{
    cholesky_residual, inverse_residual, lu_residual, residual_tolerance, sygst_residual,
    sylvester_residual, triangular_product_residual, SweepReport,
};
use recla::recursive::{
    rec_getrf, rec_lauum, rec_potrf, rec_sygst, rec_trsyl, rec_trtri, DEFAULT_CROSSOVER,
};
use recla::{DenseMatrix, Diag, Instrumented, KernelError, KernelProvider, Uplo};

use crate::BenchError;

/// The Kronecker system of the unblocked Sylvester solver is dense and
/// quadratic in `m * n`; sizes past this are refused rather than left
/// to exhaust memory.
pub const SYLVESTER_BASE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpName {
    Trtri,
    Potrf,
    Getrf,
    Lauum,
    Sygst,
    Trsyl,
}

impl OpName {
    pub const ALL: [OpName; 6] = [
        OpName::Trtri,
        OpName::Potrf,
        OpName::Getrf,
        OpName::Lauum,
        OpName::Sygst,
        OpName::Trsyl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpName::Trtri => "trtri",
            OpName::Potrf => "potrf",
            OpName::Getrf => "getrf",
            OpName::Lauum => "lauum",
            OpName::Sygst => "sygst",
            OpName::Trsyl => "trsyl",
        }
    }

    /// Operations whose row count can differ from `n`.
    pub fn takes_rows(self) -> bool {
        matches!(self, OpName::Getrf | OpName::Trsyl)
    }

    pub fn has_blocked_variant(self) -> bool {
        matches!(self, OpName::Trtri | OpName::Potrf | OpName::Getrf)
    }
}

impl FromStr for OpName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        OpName::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| format!("unknown op {s:?} (expected trtri|potrf|getrf|lauum|sygst|trsyl)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Blocked,
    Recursive,
    Unblocked,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Blocked => "blocked",
            Algorithm::Recursive => "recursive",
            Algorithm::Unblocked => "unblocked",
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "blocked" => Ok(Algorithm::Blocked),
            "recursive" => Ok(Algorithm::Recursive),
            "unblocked" => Ok(Algorithm::Unblocked),
            _ => Err(format!("unknown algorithm {s:?} (expected blocked|recursive|unblocked)")),
        }
    }
}

/// The full description of one sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub op: OpName,
    pub algorithm: Algorithm,
    /// `(n, m)` pairs. `n` is the matrix order; `m` is the row count
    /// and differs from `n` only for `getrf` (an `m x n` factorization)
    /// and `trsyl` (an `m x n` right-hand side).
    pub sizes: Vec<(usize, usize)>,
    /// Block sizes (blocked) or crossovers (recursive). Empty means the
    /// library default; must stay empty for unblocked runs.
    pub params: Vec<usize>,
    pub reps: usize,
    /// Unrecorded runs before the first repetition of each cell.
    pub warmup: usize,
    pub seed: u64,
    /// Recorded in every row; forwarded to the kernel provider by the
    /// caller when the provider supports it.
    pub threads: usize,
    pub verify: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            op: OpName::Trtri,
            algorithm: Algorithm::Recursive,
            sizes: Vec::new(),
            params: Vec::new(),
            reps: 3,
            warmup: 1,
            seed: 0,
            threads: 1,
            verify: true,
        }
    }
}

/// One emitted measurement.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub op: String,
    pub algorithm: String,
    pub n: usize,
    pub m: usize,
    pub param_name: &'static str,
    pub param_value: usize,
    pub rep: usize,
    pub seconds: f64,
    pub flops: f64,
    pub gflops: f64,
    pub threads: usize,
    pub verified: bool,
}

/// Inputs for one run, kept together so the original can be retained
/// for the residual check while the working copy is factored in place.
#[derive(Clone)]
enum Problem {
    Single(DenseMatrix),
    Congruence { a: DenseMatrix, l: DenseMatrix },
    Sylvester { a: DenseMatrix, b: DenseMatrix, c: DenseMatrix },
}

/// Splitmix-style hash: the same `(seed, n, m, rep)` always produces
/// the same input, independent of algorithm and parameter, so rows are
/// comparable across schedules.
fn mix(seed: u64, words: [u64; 3]) -> u64 {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for w in words {
        h = (h ^ w).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 27;
        h = h.wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}

fn generate(op: OpName, n: usize, m: usize, seed: u64) -> Problem {
    match op {
        OpName::Trtri | OpName::Lauum => Problem::Single(gen_triangular(n, Uplo::Lower, seed)),
        OpName::Potrf => Problem::Single(gen_spd(n, seed)),
        OpName::Getrf => Problem::Single(gen_uniform(m, n, seed)),
        OpName::Sygst => Problem::Congruence {
            a: gen_spd(n, seed),
            l: gen_triangular(n, Uplo::Lower, seed ^ 0xA5A5_A5A5),
        },
        OpName::Trsyl => Problem::Sylvester {
            a: gen_triangular(m, Uplo::Upper, seed),
            b: gen_triangular(n, Uplo::Upper, seed ^ 0xA5A5_A5A5),
            c: gen_uniform(m, n, seed ^ 0x5A5A_5A5A),
        },
    }
}

/// Runs the configured algorithm once, in place. Returns the pivot
/// vector for LU so the caller can verify.
fn execute(
    op: OpName,
    algorithm: Algorithm,
    param: usize,
    inst: &mut Instrumented,
    prob: &mut Problem,
) -> Result<Option<Vec<usize>>, KernelError> {
    match (op, prob) {
        (OpName::Trtri, Problem::Single(a)) => {
            let view = a.view_mut();
            match algorithm {
                Algorithm::Blocked => blocked_trtri(inst, Uplo::Lower, Diag::NonUnit, view, param)?,
                Algorithm::Recursive => rec_trtri(inst, Uplo::Lower, Diag::NonUnit, view, param)?,
                Algorithm::Unblocked => {
                    rec_trtri(inst, Uplo::Lower, Diag::NonUnit, view, view.rows().max(1))?
                }
            }
            Ok(None)
        }
        (OpName::Potrf, Problem::Single(a)) => {
            let view = a.view_mut();
            match algorithm {
                Algorithm::Blocked => blocked_potrf(inst, Uplo::Lower, view, param)?,
                Algorithm::Recursive => rec_potrf(inst, Uplo::Lower, view, param)?,
                Algorithm::Unblocked => rec_potrf(inst, Uplo::Lower, view, view.rows().max(1))?,
            }
            Ok(None)
        }
        (OpName::Getrf, Problem::Single(a)) => {
            let view = a.view_mut();
            let mut pivots = Vec::new();
            match algorithm {
                Algorithm::Blocked => blocked_getrf(inst, view, &mut pivots, param)?,
                Algorithm::Recursive => rec_getrf(inst, view, &mut pivots, param)?,
                Algorithm::Unblocked => {
                    rec_getrf(inst, view, &mut pivots, view.rows().max(view.cols()).max(1))?
                }
            }
            Ok(Some(pivots))
        }
        (OpName::Lauum, Problem::Single(a)) => {
            let view = a.view_mut();
            match algorithm {
                Algorithm::Recursive => rec_lauum(inst, Uplo::Lower, view, param),
                Algorithm::Unblocked => rec_lauum(inst, Uplo::Lower, view, view.rows().max(1)),
                Algorithm::Blocked => unreachable!("validated out"),
            }
            Ok(None)
        }
        (OpName::Sygst, Problem::Congruence { a, l }) => {
            let (av, lv) = (a.view_mut(), l.view_mut());
            match algorithm {
                Algorithm::Recursive => rec_sygst(inst, Uplo::Lower, av, lv, param)?,
                Algorithm::Unblocked => rec_sygst(inst, Uplo::Lower, av, lv, av.rows().max(1))?,
                Algorithm::Blocked => unreachable!("validated out"),
            }
            Ok(None)
        }
        (OpName::Trsyl, Problem::Sylvester { a, b, c }) => {
            let (av, bv, cv) = (a.view_mut(), b.view_mut(), c.view_mut());
            match algorithm {
                Algorithm::Recursive => rec_trsyl(inst, 1, av, bv, cv, param)?,
                Algorithm::Unblocked => {
                    rec_trsyl(inst, 1, av, bv, cv, cv.rows().max(cv.cols()).max(1))?
                }
                Algorithm::Blocked => unreachable!("validated out"),
            }
            Ok(None)
        }
        _ => unreachable!("problem shape matches its op"),
    }
}

/// Residual of a finished run against the preserved input, paired with
/// the tolerance the run must beat.
fn residual(op: OpName, original: &Problem, result: &Problem, pivots: Option<&[usize]>) -> (f64, f64) {
    match (op, original, result) {
        (OpName::Trtri, Problem::Single(a0), Problem::Single(x)) => (
            inverse_residual(a0, x, Uplo::Lower, Diag::NonUnit).relative(),
            residual_tolerance(a0.rows()),
        ),
        (OpName::Potrf, Problem::Single(a0), Problem::Single(l)) => (
            cholesky_residual(a0, l, Uplo::Lower).relative(),
            residual_tolerance(a0.rows()),
        ),
        (OpName::Getrf, Problem::Single(a0), Problem::Single(lu)) => (
            lu_residual(a0, lu, pivots.expect("lu produces pivots")).relative(),
            residual_tolerance(a0.rows().max(a0.cols())),
        ),
        (OpName::Lauum, Problem::Single(t0), Problem::Single(p)) => (
            triangular_product_residual(t0, p, Uplo::Lower).relative(),
            residual_tolerance(t0.rows()),
        ),
        (OpName::Sygst, Problem::Congruence { a: a0, l: l0 }, Problem::Congruence { a, .. }) => (
            sygst_residual(a0, a, l0, Uplo::Lower).relative(),
            2.0 * residual_tolerance(a0.rows()),
        ),
        (OpName::Trsyl, Problem::Sylvester { a, b, c }, Problem::Sylvester { c: x, .. }) => (
            sylvester_residual(a, b, c, x, 1).relative(),
            200.0 * (a.rows() + b.rows()) as f64 * f64::EPSILON,
        ),
        _ => unreachable!("problem shape matches its op"),
    }
}

fn validate(cfg: &SweepConfig) -> Result<(), BenchError> {
    let usage = |m: String| Err(BenchError::Usage(m));
    if cfg.reps < 1 {
        return usage("--reps must be at least 1".into());
    }
    if cfg.threads < 1 {
        return usage("--threads must be at least 1".into());
    }
    if cfg.sizes.is_empty() {
        return usage("at least one size (--n) is required".into());
    }
    if cfg.algorithm == Algorithm::Blocked && !cfg.op.has_blocked_variant() {
        return usage(format!("{} has no blocked variant", cfg.op.name()));
    }
    if cfg.algorithm == Algorithm::Unblocked && !cfg.params.is_empty() {
        return usage("unblocked runs take no block size or crossover".into());
    }
    if let Some(&p) = cfg.params.iter().find(|&&p| p == 0) {
        return usage(format!("block size / crossover must be at least 1, got {p}"));
    }
    for &(n, m) in &cfg.sizes {
        if !cfg.op.takes_rows() && n != m {
            return usage(format!("--m applies only to getrf and trsyl, not {}", cfg.op.name()));
        }
        if cfg.op == OpName::Trsyl && cfg.algorithm == Algorithm::Unblocked && n * m > SYLVESTER_BASE_LIMIT {
            return usage(format!(
                "unblocked trsyl solves a dense (m*n)^2 system; m*n = {} exceeds {SYLVESTER_BASE_LIMIT}",
                n * m
            ));
        }
    }
    if cfg.op == OpName::Trsyl && cfg.algorithm == Algorithm::Recursive {
        if let Some(&c) = cfg.params.iter().find(|&&c| c * c > SYLVESTER_BASE_LIMIT) {
            return usage(format!(
                "trsyl crossover {c} gives a {0}x{0} base system past the {SYLVESTER_BASE_LIMIT} limit",
                c * c
            ));
        }
    }
    Ok(())
}

/// Runs the whole grid. Rows come back in execution order; any residual
/// beyond tolerance aborts with the offending tuple.
pub fn run_sweep(cfg: &SweepConfig, provider: &dyn KernelProvider) -> Result<Vec<SweepRow>, BenchError> {
    validate(cfg)?;
    let params: Vec<(&'static str, usize)> = match cfg.algorithm {
        Algorithm::Unblocked => vec![("none", 0)],
        Algorithm::Blocked if cfg.params.is_empty() => vec![("b", DEFAULT_BLOCK)],
        Algorithm::Recursive if cfg.params.is_empty() => vec![("c", DEFAULT_CROSSOVER)],
        Algorithm::Blocked => cfg.params.iter().map(|&p| ("b", p)).collect(),
        Algorithm::Recursive => cfg.params.iter().map(|&p| ("c", p)).collect(),
    };

    let mut rows = Vec::new();
    let mut inst = Instrumented::new(provider);
    for &(n, m) in &cfg.sizes {
        for &(param_name, param_value) in &params {
            let context = |rep: usize| {
                format!(
                    "op={} algorithm={} n={n} m={m} {param_name}={param_value} rep={rep}",
                    cfg.op.name(),
                    cfg.algorithm.name()
                )
            };
            for _ in 0..cfg.warmup {
                let mut prob = generate(cfg.op, n, m, mix(cfg.seed, [n as u64, m as u64, 0]));
                inst.clear();
                execute(cfg.op, cfg.algorithm, param_value, &mut inst, &mut prob)
                    .map_err(|e| BenchError::Verification(format!("{} (warmup): {e}", context(0))))?;
            }
            for rep in 0..cfg.reps {
                let original = generate(cfg.op, n, m, mix(cfg.seed, [n as u64, m as u64, rep as u64]));
                let mut prob = original.clone();
                inst.clear();
                let t0 = Instant::now();
                let pivots = execute(cfg.op, cfg.algorithm, param_value, &mut inst, &mut prob)
                    .map_err(|e| BenchError::Verification(format!("{}: {e}", context(rep))))?;
                let seconds = t0.elapsed().as_secs_f64().max(1e-9);
                let flops = inst.ledger().total_flops();
                let verified = if cfg.verify {
                    let (r, tol) = residual(cfg.op, &original, &prob, pivots.as_deref());
                    if !(r <= tol) {
                        return Err(BenchError::Verification(format!(
                            "{}: residual {r:.3e} > {tol:.3e}",
                            context(rep)
                        )));
                    }
                    true
                } else {
                    false
                };
                rows.push(SweepRow {
                    op: cfg.op.name().into(),
                    algorithm: cfg.algorithm.name().into(),
                    n,
                    m,
                    param_name,
                    param_value,
                    rep,
                    seconds,
                    flops,
                    gflops: flops / seconds / 1e9,
                    threads: cfg.threads,
                    verified,
                });
            }
        }
    }
    Ok(rows)
}

/// Flattens an oracle sweep report into the sweep CSV schema, one row
/// per `(op, n, param)` cell, tagged `algorithm = oracle-sweep`. The
/// oracle runs carry no ledger, so `flops` and `gflops` are zero.
pub fn oracle_sweep_rows(report: &SweepReport, threads: usize) -> Vec<SweepRow> {
    report
        .entries
        .iter()
        .map(|e| SweepRow {
            op: e.op.clone(),
            algorithm: "oracle-sweep".into(),
            n: e.n,
            m: e.n,
            param_name: "param",
            param_value: e.param,
            rep: 0,
            seconds: e.seconds.max(1e-9),
            flops: 0.0,
            gflops: 0.0,
            threads,
            verified: e.passed,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use recla::ReferenceProvider;

    fn base_config() -> SweepConfig {
        SweepConfig {
            sizes: vec![(48, 48)],
            params: vec![8],
            reps: 2,
            warmup: 0,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn rows_cover_the_grid_with_constant_flops() {
        let cfg = SweepConfig {
            sizes: vec![(32, 32), (48, 48)],
            params: vec![8, 16],
            ..base_config()
        };
        let rows = run_sweep(&cfg, &ReferenceProvider).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        for r in &rows {
            assert_eq!(r.op, "trtri");
            assert_eq!(r.param_name, "c");
            assert!(r.verified);
            assert!(r.seconds >= 1e-9);
            // n^3/3 under the cost model, exact in f64 at this size.
            assert_eq!(r.flops, (r.n as f64).powi(3) / 3.0);
            assert!((r.gflops - r.flops / r.seconds / 1e9).abs() < 1e-12 * r.gflops.abs());
        }
    }

    #[test]
    fn inputs_depend_on_rep_but_not_param() {
        let cfg = SweepConfig {
            params: vec![8, 16],
            reps: 2,
            ..base_config()
        };
        let rows = run_sweep(&cfg, &ReferenceProvider).unwrap();
        // Identical flops for every row: the ledger is value-independent
        // for trtri and the totals are partition-invariant.
        assert!(rows.windows(2).all(|w| w[0].flops == w[1].flops));
    }

    #[test]
    fn unblocked_rows_have_no_parameter() {
        let cfg = SweepConfig {
            algorithm: Algorithm::Unblocked,
            params: vec![],
            ..base_config()
        };
        let rows = run_sweep(&cfg, &ReferenceProvider).unwrap();
        assert!(rows.iter().all(|r| r.param_name == "none" && r.param_value == 0));
    }

    #[test]
    fn every_op_passes_verification_at_small_size() {
        for op in OpName::ALL {
            let cfg = SweepConfig {
                op,
                sizes: vec![(24, if op.takes_rows() { 30 } else { 24 })],
                reps: 1,
                ..base_config()
            };
            let rows = run_sweep(&cfg, &ReferenceProvider)
                .unwrap_or_else(|e| panic!("{}: {e}", op.name()));
            assert!(rows.iter().all(|r| r.verified), "{}", op.name());
        }
    }

    #[test]
    fn blocked_variant_is_rejected_where_missing() {
        for op in [OpName::Lauum, OpName::Sygst, OpName::Trsyl] {
            let cfg = SweepConfig {
                op,
                algorithm: Algorithm::Blocked,
                ..base_config()
            };
            match run_sweep(&cfg, &ReferenceProvider) {
                Err(BenchError::Usage(_)) => {}
                other => panic!("{}: expected usage error, got {other:?}", op.name()),
            }
        }
    }

    #[test]
    fn oversized_unblocked_sylvester_is_rejected() {
        let cfg = SweepConfig {
            op: OpName::Trsyl,
            algorithm: Algorithm::Unblocked,
            sizes: vec![(101, 101)],
            params: vec![],
            ..base_config()
        };
        assert!(matches!(run_sweep(&cfg, &ReferenceProvider), Err(BenchError::Usage(_))));
    }

    #[test]
    fn zero_parameter_is_rejected() {
        let cfg = SweepConfig { params: vec![0], ..base_config() };
        assert!(matches!(run_sweep(&cfg, &ReferenceProvider), Err(BenchError::Usage(_))));
    }

    #[test]
    fn mismatched_rows_are_rejected_for_square_ops() {
        let cfg = SweepConfig { sizes: vec![(48, 32)], ..base_config() };
        assert!(matches!(run_sweep(&cfg, &ReferenceProvider), Err(BenchError::Usage(_))));
    }
}
