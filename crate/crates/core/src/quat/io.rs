//! `.qm` text format: a header line `qm <rows> <cols>` followed by one
//! `w x y z` line per entry in row-major order.

use std::fmt::Write as _;
use std::path::Path;

use super::{QuatMatrix, Quaternion};
use crate::error::{Error, Result};

/// 17 significant digits round-trip every f64 exactly.
pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn write_body(out: &mut String, m: &QuatMatrix) {
    for q in m.as_slice() {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            fmt_real(q.w),
            fmt_real(q.x),
            fmt_real(q.y),
            fmt_real(q.z)
        );
    }
}

/// Parse `count` entry lines starting at `lines[start]`; `start` is zero-based.
pub(crate) fn read_body(lines: &[&str], start: usize, rows: usize, cols: usize) -> Result<QuatMatrix> {
    let count = rows * cols;
    if lines.len() < start + count {
        return Err(Error::parse(
            lines.len() + 1,
            format!(
                "expected {count} entry lines, found {}",
                lines.len().saturating_sub(start)
            ),
        ));
    }
    let mut data = Vec::with_capacity(count);
    for (k, line) in lines[start..start + count].iter().enumerate() {
        let lineno = start + k + 1;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| Error::parse(lineno, format!("{t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if vals.len() != 4 {
            return Err(Error::parse(
                lineno,
                format!("expected 4 components, found {}", vals.len()),
            ));
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::parse(lineno, "non-finite component"));
        }
        data.push(Quaternion::new(vals[0], vals[1], vals[2], vals[3]));
    }
    QuatMatrix::from_vec(rows, cols, data)
}

pub(crate) fn parse_header(line: Option<&&str>, magic: &str) -> Result<(usize, usize)> {
    let line = line.ok_or_else(|| Error::parse(1, "empty input"))?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    match toks.as_slice() {
        [m, r, c] if *m == magic => {
            let r = r.parse().map_err(|_| Error::parse(1, format!("bad row count {r:?}")))?;
            let c = c
                .parse()
                .map_err(|_| Error::parse(1, format!("bad column count {c:?}")))?;
            Ok((r, c))
        }
        _ => Err(Error::parse(1, format!("expected header \"{magic} <rows> <cols>\""))),
    }
}

pub(crate) fn content_lines(s: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = s.lines().collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    lines
}

pub fn to_qm_string(m: &QuatMatrix) -> String {
    let mut out = format!("qm {} {}\n", m.rows(), m.cols());
    write_body(&mut out, m);
    out
}

pub fn parse_qm(s: &str) -> Result<QuatMatrix> {
    let lines = content_lines(s);
    let (rows, cols) = parse_header(lines.first(), "qm")?;
    let m = read_body(&lines, 1, rows, cols)?;
    if lines.len() != 1 + rows * cols {
        return Err(Error::parse(2 + rows * cols, "trailing content after matrix body"));
    }
    Ok(m)
}

pub fn read_qm(path: impl AsRef<Path>) -> Result<QuatMatrix> {
    parse_qm(&std::fs::read_to_string(path)?)
}

pub fn write_qm(path: impl AsRef<Path>, m: &QuatMatrix) -> Result<()> {
    std::fs::write(path, to_qm_string(m))?;
    Ok(())
}
