//! CSV traces: `method,seed,grad_evals_per_n,suboptimality,dist_sq`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{BenchError, Result};
use crate::experiment::ResultRow;

pub const HEADER: [&str; 5] = ["method", "seed", "grad_evals_per_n", "suboptimality", "dist_sq"];

/// 17 significant digits, enough to round-trip any `f64`.
fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(BenchError::Config("no rows to write".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            r.seed.to_string(),
            real(r.grad_evals_per_n),
            real(r.suboptimality),
            real(r.dist_sq),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn emit_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| BenchError::io(path, e))?;
    write_csv(rows, file)
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_reader(input);
    if reader.headers()?.iter().ne(HEADER) {
        return Err(BenchError::Parse { line: 1, message: format!("expected header {}", HEADER.join(",")) });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let field = |k: usize| record.get(k).unwrap_or_default();
        let num = |k: usize| {
            field(k).parse::<f64>().map_err(|_| BenchError::Parse {
                line,
                message: format!("bad {} `{}`", HEADER[k], field(k)),
            })
        };
        rows.push(ResultRow {
            method: field(0).to_string(),
            seed: field(1)
                .parse()
                .map_err(|_| BenchError::Parse { line, message: format!("bad seed `{}`", field(1)) })?,
            grad_evals_per_n: num(2)?,
            suboptimality: num(3)?,
            dist_sq: num(4)?,
        });
    }
    Ok(rows)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let path = path.as_ref();
    read_csv(File::open(path).map_err(|e| BenchError::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ResultRow {
        ResultRow {
            method: "saga".into(),
            seed: 3,
            grad_evals_per_n: 1.0 / 3.0,
            suboptimality: 1e-16,
            dist_sq: 0.1 + 0.2,
        }
    }

    #[test]
    fn single_row_is_two_lines() {
        let mut buf = Vec::new();
        write_csv(&[row()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "method,seed,grad_evals_per_n,suboptimality,dist_sq");
        assert!(lines[1].starts_with("saga,3,3.3333333333333331e-1,"));
    }

    #[test]
    fn round_trip_is_exact() {
        let mut buf = Vec::new();
        write_csv(&[row(), ResultRow { seed: 4, ..row() }], &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), vec![row(), ResultRow { seed: 4, ..row() }]);
    }

    #[test]
    fn empty_rows_rejected() {
        assert!(write_csv(&[], Vec::new()).is_err());
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_csv("a,b,c,d,e\n".as_bytes()).is_err());
    }
}
