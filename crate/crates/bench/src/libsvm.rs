//! LIBSVM text format: one point per line, `label idx:val idx:val ...`
//! with 1-based strictly increasing indices.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use saga_core::{CscMatrix, Dataset};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LibsvmOptions {
    /// Scale every point to unit Euclidean norm.
    pub normalize: bool,
    /// Dimension to use instead of the largest index seen.
    pub dim: Option<usize>,
}

pub fn load_libsvm(path: impl AsRef<Path>, opts: LibsvmOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
    parse_libsvm(BufReader::new(file), opts)
}

pub fn parse_libsvm<R: BufRead>(reader: R, opts: LibsvmOptions) -> Result<Dataset> {
    let mut labels = Vec::new();
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.map_err(|e| BenchError::Parse { line: line_no, message: e.to_string() })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| BenchError::Parse { line: line_no, message };
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(format!("bad label `{label_tok}`")))?;
        let mut col = Vec::new();
        let mut prev: Option<usize> = None;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected idx:val, got `{tok}`")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("bad index `{idx}`")))?;
            if idx == 0 {
                return Err(err("indices are 1-based; found 0".into()));
            }
            if prev.is_some_and(|p| idx <= p) {
                return Err(err(format!("index {idx} not increasing")));
            }
            let val: f64 = val.parse().map_err(|_| err(format!("bad value `{val}`")))?;
            if !val.is_finite() {
                return Err(err(format!("non-finite value `{val}`")));
            }
            prev = Some(idx);
            max_index = max_index.max(idx);
            col.push((idx - 1, val));
        }
        labels.push(label);
        columns.push(col);
    }
    if labels.is_empty() {
        return Err(BenchError::Config("no data points".into()));
    }
    let dim = match opts.dim {
        Some(d) if d < max_index => {
            return Err(BenchError::Config(format!("index {max_index} exceeds declared dimension {d}")))
        }
        Some(d) => d,
        None => max_index.max(1),
    };
    let ds = Dataset::new(CscMatrix::from_columns(dim, &columns)?, labels)?;
    Ok(if opts.normalize { ds.normalized() } else { ds })
}

/// Writes values with round-trip precision, skipping explicit zeros.
pub fn write_libsvm<W: Write>(ds: &Dataset, mut out: W) -> std::io::Result<()> {
    for i in 0..ds.n() {
        write!(out, "{}", ds.label(i))?;
        let p = ds.point(i);
        for (idx, val) in p.indices.iter().zip(p.values) {
            if *val != 0.0 {
                write!(out, " {}:{}", idx + 1, val)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Dataset> {
        parse_libsvm(s.as_bytes(), LibsvmOptions::default())
    }

    #[test]
    fn single_line() {
        let ds = parse("+1 1:0.5 3:2.0\n").unwrap();
        assert_eq!(ds.labels(), &[1.0]);
        assert_eq!(ds.dim(), 3);
        assert_eq!(ds.point(0).indices, &[0, 2]);
        assert_eq!(ds.point(0).values, &[0.5, 2.0]);
    }

    #[test]
    fn empty_input() {
        let err = parse("").unwrap_err();
        assert!(err.to_string().contains("no data points"));
        assert!(parse("\n# only a comment\n").is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("1 1:1\n-1 2:1 2:3\n").unwrap_err();
        assert!(matches!(err, BenchError::Parse { line: 2, .. }), "{err}");
        assert!(matches!(parse("1 1:1\n1 0:2\n").unwrap_err(), BenchError::Parse { line: 2, .. }));
        assert!(matches!(parse("x 1:1\n").unwrap_err(), BenchError::Parse { line: 1, .. }));
        assert!(matches!(parse("1 1=1\n").unwrap_err(), BenchError::Parse { line: 1, .. }));
        assert!(matches!(parse("1 3:1 2:1\n").unwrap_err(), BenchError::Parse { line: 1, .. }));
    }

    #[test]
    fn label_only_line_is_an_empty_point() {
        let ds = parse("1 2:1\n-1\n").unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.point(1).nnz(), 0);
    }

    #[test]
    fn normalization_gives_unit_points() {
        let ds = parse_libsvm("1 1:3 2:4\n".as_bytes(), LibsvmOptions { normalize: true, dim: None }).unwrap();
        assert!((ds.point(0).norm_sq() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn declared_dimension() {
        let ds = parse_libsvm("1 1:3\n".as_bytes(), LibsvmOptions { normalize: false, dim: Some(5) }).unwrap();
        assert_eq!(ds.dim(), 5);
        assert!(parse_libsvm("1 7:3\n".as_bytes(), LibsvmOptions { normalize: false, dim: Some(5) }).is_err());
    }
}
