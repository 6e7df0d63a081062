//! Benchmark harness for the recla algorithms: timed parameter sweeps
//! with verified results, per-level FLOP breakdowns, analytic share
//! prediction and CSV emission.

pub mod breakdown;
pub mod csv;
pub mod sweep;

pub use breakdown::{breakdown, combined_level_shares, predict_shares, BreakdownRow, LevelKey};
pub use csv::{breakdown_csv, sweep_csv, write_output, BREAKDOWN_HEADER, SWEEP_HEADER};
pub use sweep::{oracle_sweep_rows, run_sweep, Algorithm, OpName, SweepConfig, SweepRow};

use std::fmt;

/// Harness failures, graded by exit code: bad invocations exit 2,
/// verification failures 3, output problems 4.
#[derive(Debug)]
pub enum BenchError {
    Usage(String),
    Verification(String),
    Io(String),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 2,
            BenchError::Verification(_) => 3,
            BenchError::Io(_) => 4,
        }
    }
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::Usage(m) => write!(f, "{m}"),
            BenchError::Verification(m) => write!(f, "verification failed: {m}"),
            BenchError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for BenchError {}
