//! CSV emission with fixed column sets. Floats use Rust's shortest
//! round-trip formatting, so parsing a file back recovers the exact
//! values. Metadata travels in leading `#` comment lines, never in the
//! table itself.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::breakdown::BreakdownRow;
use crate::sweep::SweepRow;
use crate::BenchError;

pub const SWEEP_HEADER: &str =
    "op,algorithm,n,m,param_name,param_value,rep,seconds,flops,gflops,threads,verified";
pub const BREAKDOWN_HEADER: &str = "op,n,c,level,kernel,flops,share,seconds";

/// Header plus one line per row, in the order given.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.op,
            r.algorithm,
            r.n,
            r.m,
            r.param_name,
            r.param_value,
            r.rep,
            r.seconds,
            r.flops,
            r.gflops,
            r.threads,
            r.verified
        ));
    }
    out
}

/// Header plus one line per aggregated `(level, kernel)` cell.
pub fn breakdown_csv(rows: &[BreakdownRow]) -> String {
    let mut out = String::with_capacity(48 * (rows.len() + 1));
    out.push_str(BREAKDOWN_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.op,
            r.n,
            r.c,
            r.level,
            r.kernel,
            r.flops(),
            r.share,
            r.seconds
        ));
    }
    out
}

/// Writes comment lines (prefixed `# `) followed by the CSV body to
/// `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, comments: &[String], body: &str) -> Result<(), BenchError> {
    let mut full = String::new();
    for c in comments {
        full.push_str("# ");
        full.push_str(c);
        full.push('\n');
    }
    full.push_str(body);
    match path {
        Some(p) => fs::write(p, full).map_err(|e| BenchError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(full.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| BenchError::Io(format!("stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::breakdown::LevelKey;

    fn sample_sweep_row() -> SweepRow {
        SweepRow {
            op: "trtri".into(),
            algorithm: "recursive".into(),
            n: 100,
            m: 100,
            param_name: "c",
            param_value: 24,
            rep: 0,
            seconds: 0.123456789123,
            flops: 333333.3333333333,
            gflops: 0.0027,
            threads: 1,
            verified: true,
        }
    }

    #[test]
    fn sweep_csv_has_header_even_when_empty() {
        let csv = sweep_csv(&[]);
        assert_eq!(csv, format!("{SWEEP_HEADER}\n"));
    }

    #[test]
    fn numeric_fields_round_trip_exactly() {
        let row = sample_sweep_row();
        let csv = sweep_csv(&[row.clone()]);
        let line = csv.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 12);
        assert_eq!(fields[7].parse::<f64>().unwrap().to_bits(), row.seconds.to_bits());
        assert_eq!(fields[8].parse::<f64>().unwrap().to_bits(), row.flops.to_bits());
        assert_eq!(fields[9].parse::<f64>().unwrap().to_bits(), row.gflops.to_bits());
        assert_eq!(fields[11], "true");
    }

    #[test]
    fn breakdown_levels_print_numbers_and_base() {
        let rows = vec![
            BreakdownRow {
                op: "trtri".into(),
                n: 64,
                c: 8,
                level: LevelKey::Level(1),
                kernel: "trmm",
                flops3: 98304,
                share: 0.375,
                seconds: 0.001,
            },
            BreakdownRow {
                op: "trtri".into(),
                n: 64,
                c: 8,
                level: LevelKey::Base,
                kernel: "trti2",
                flops3: 4096,
                share: 0.015625,
                seconds: 0.0001,
            },
        ];
        let csv = breakdown_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), BREAKDOWN_HEADER);
        assert_eq!(lines.next().unwrap(), "trtri,64,8,1,trmm,32768,0.375,0.001");
        assert_eq!(lines.next().unwrap(), "trtri,64,8,base,trti2,1365.3333333333333,0.015625,0.0001");
    }

    #[test]
    fn comments_precede_the_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_output(Some(&path), &["note one".into(), "note two".into()], &sweep_csv(&[]))
            .unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# note one\n# note two\n"));
        assert!(text.ends_with(&format!("{SWEEP_HEADER}\n")));
    }

    #[test]
    fn unwritable_destination_reports_io() {
        let err =
            write_output(Some(Path::new("/nonexistent-dir/x.csv")), &[], "x\n").unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
