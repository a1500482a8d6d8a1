//! Dual quaternion matrices `D = D0 + D1 ε` with `ε² = 0`.

use std::ops::{Add, Mul, Neg, Sub};
use std::path::Path;

use crate::error::{Error, Result};
use crate::quat::{content_lines, parse_header, read_body, write_body, QuatMatrix};

/// Standard part `std` and infinitesimal part `inf`, always the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DualQuatMatrix {
    std: QuatMatrix,
    inf: QuatMatrix,
}

impl DualQuatMatrix {
    pub fn new(std: QuatMatrix, inf: QuatMatrix) -> Result<Self> {
        if std.shape() != inf.shape() {
            return Err(Error::dims("dual matrix parts", std.shape(), inf.shape()));
        }
        Ok(DualQuatMatrix { std, inf })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DualQuatMatrix {
            std: QuatMatrix::zeros(rows, cols),
            inf: QuatMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        DualQuatMatrix {
            std: QuatMatrix::identity(n),
            inf: QuatMatrix::zeros(n, n),
        }
    }

    /// `εM`: zero standard part.
    pub fn pure_infinitesimal(inf: QuatMatrix) -> Self {
        let (r, c) = inf.shape();
        DualQuatMatrix {
            std: QuatMatrix::zeros(r, c),
            inf,
        }
    }

    pub fn from_std(std: QuatMatrix) -> Self {
        let (r, c) = std.shape();
        DualQuatMatrix {
            std,
            inf: QuatMatrix::zeros(r, c),
        }
    }

    pub fn std(&self) -> &QuatMatrix {
        &self.std
    }

    pub fn inf(&self) -> &QuatMatrix {
        &self.inf
    }

    pub fn into_parts(self) -> (QuatMatrix, QuatMatrix) {
        (self.std, self.inf)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.std.shape()
    }

    pub fn rows(&self) -> usize {
        self.std.rows()
    }

    pub fn cols(&self) -> usize {
        self.std.cols()
    }

    pub fn conj_transpose(&self) -> Self {
        DualQuatMatrix {
            std: self.std.conj_transpose(),
            inf: self.inf.conj_transpose(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        DualQuatMatrix {
            std: self.std.scale(s),
            inf: self.inf.scale(s),
        }
    }
}

pub fn dq_add(p: &DualQuatMatrix, q: &DualQuatMatrix) -> Result<DualQuatMatrix> {
    Ok(DualQuatMatrix {
        std: p.std.try_add(&q.std)?,
        inf: p.inf.try_add(&q.inf)?,
    })
}

pub fn dq_sub(p: &DualQuatMatrix, q: &DualQuatMatrix) -> Result<DualQuatMatrix> {
    Ok(DualQuatMatrix {
        std: p.std.try_sub(&q.std)?,
        inf: p.inf.try_sub(&q.inf)?,
    })
}

/// `(P0 + P1 ε)(Q0 + Q1 ε) = P0 Q0 + (P0 Q1 + P1 Q0) ε`; the `ε²` term is never formed.
pub fn dq_mul(p: &DualQuatMatrix, q: &DualQuatMatrix) -> Result<DualQuatMatrix> {
    if p.cols() != q.rows() {
        return Err(Error::dims("dual mul", p.shape(), q.shape()));
    }
    Ok(DualQuatMatrix {
        std: &p.std * &q.std,
        inf: &p.std * &q.inf + &p.inf * &q.std,
    })
}

/// `sqrt(|P0|_F² + |P1|_F²)`.
pub fn dq_norm(p: &DualQuatMatrix) -> f64 {
    p.std.frobenius_norm().hypot(p.inf.frobenius_norm())
}

/// Componentwise equality of both parts.
pub fn dq_equal(p: &DualQuatMatrix, q: &DualQuatMatrix) -> bool {
    p == q
}

impl Add for &DualQuatMatrix {
    type Output = DualQuatMatrix;
    fn add(self, rhs: &DualQuatMatrix) -> DualQuatMatrix {
        DualQuatMatrix {
            std: &self.std + &rhs.std,
            inf: &self.inf + &rhs.inf,
        }
    }
}

impl Sub for &DualQuatMatrix {
    type Output = DualQuatMatrix;
    fn sub(self, rhs: &DualQuatMatrix) -> DualQuatMatrix {
        DualQuatMatrix {
            std: &self.std - &rhs.std,
            inf: &self.inf - &rhs.inf,
        }
    }
}

impl Mul for &DualQuatMatrix {
    type Output = DualQuatMatrix;
    fn mul(self, rhs: &DualQuatMatrix) -> DualQuatMatrix {
        DualQuatMatrix {
            std: &self.std * &rhs.std,
            inf: &self.std * &rhs.inf + &self.inf * &rhs.std,
        }
    }
}

impl Neg for &DualQuatMatrix {
    type Output = DualQuatMatrix;
    fn neg(self) -> DualQuatMatrix {
        DualQuatMatrix {
            std: -&self.std,
            inf: -&self.inf,
        }
    }
}

/// `.dqm`: header `dqm <rows> <cols>`, the standard part body, a `---`
/// separator, then the infinitesimal part body.
pub fn to_dqm_string(m: &DualQuatMatrix) -> String {
    let mut out = format!("dqm {} {}\n", m.rows(), m.cols());
    write_body(&mut out, &m.std);
    out.push_str("---\n");
    write_body(&mut out, &m.inf);
    out
}

pub fn parse_dqm(s: &str) -> Result<DualQuatMatrix> {
    let lines = content_lines(s);
    let (rows, cols) = parse_header(lines.first(), "dqm")?;
    let n = rows * cols;
    let std = read_body(&lines, 1, rows, cols)?;
    match lines.get(1 + n) {
        Some(l) if l.trim() == "---" => {}
        _ => return Err(Error::parse(2 + n, "expected \"---\" separator")),
    }
    let inf = read_body(&lines, 2 + n, rows, cols)?;
    if lines.len() != 2 + 2 * n {
        return Err(Error::parse(3 + 2 * n, "trailing content after matrix body"));
    }
    DualQuatMatrix::new(std, inf)
}

pub fn read_dqm(path: impl AsRef<Path>) -> Result<DualQuatMatrix> {
    parse_dqm(&std::fs::read_to_string(path)?)
}

pub fn write_dqm(path: impl AsRef<Path>, m: &DualQuatMatrix) -> Result<()> {
    std::fs::write(path, to_dqm_string(m))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;

    fn ints(rows: usize, cols: usize, seed: usize) -> QuatMatrix {
        QuatMatrix::from_fn(rows, cols, |i, j| {
            let s = i * 31 + j * 17 + seed * 7;
            Quaternion::new(
                (s % 5) as f64 - 2.0,
                (s % 3) as f64 - 1.0,
                ((s / 3) % 4) as f64 - 1.5,
                ((s / 5) % 3) as f64,
            )
        })
    }

    fn dual(rows: usize, cols: usize, seed: usize) -> DualQuatMatrix {
        DualQuatMatrix::new(ints(rows, cols, seed), ints(rows, cols, seed + 100)).unwrap()
    }

    #[test]
    fn addition_identities() {
        let p = dual(2, 3, 1);
        let q = dual(2, 3, 2);
        assert_eq!(dq_add(&p, &DualQuatMatrix::zeros(2, 3)).unwrap(), p);
        assert_eq!(dq_add(&p, &-&p).unwrap(), DualQuatMatrix::zeros(2, 3));
        let s = dq_add(&p, &q).unwrap();
        assert_eq!(s.std(), &(p.std() + q.std()));
        assert_eq!(s.inf(), &(p.inf() + q.inf()));
        assert!(dq_add(&p, &dual(3, 2, 0)).is_err());
    }

    #[test]
    fn epsilon_squared_vanishes() {
        let e = DualQuatMatrix::pure_infinitesimal(QuatMatrix::identity(3));
        let sq = dq_mul(&e, &e).unwrap();
        assert!(sq.std().is_zero() && sq.inf().is_zero());
        let a = DualQuatMatrix::pure_infinitesimal(ints(2, 3, 4));
        let b = DualQuatMatrix::pure_infinitesimal(ints(3, 4, 5));
        assert_eq!(dq_mul(&a, &b).unwrap(), DualQuatMatrix::zeros(2, 4));
    }

    #[test]
    fn identity_product_and_mismatch() {
        let q = dual(3, 2, 9);
        assert_eq!(dq_mul(&DualQuatMatrix::identity(3), &q).unwrap(), q);
        assert!(matches!(dq_mul(&q, &q), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn norm_values() {
        assert_eq!(dq_norm(&DualQuatMatrix::zeros(2, 2)), 0.0);
        assert!((dq_norm(&DualQuatMatrix::identity(2)) - 2f64.sqrt()).abs() < 1e-15);
        let p = dual(2, 2, 3);
        assert_eq!(dq_norm(&p), dq_norm(&-&p));
    }

    #[test]
    fn dqm_round_trip_and_errors() {
        let p = dual(2, 2, 11);
        let s = to_dqm_string(&p);
        assert_eq!(s.lines().nth(5), Some("---"));
        assert_eq!(parse_dqm(&s).unwrap(), p);
        assert!(parse_dqm(&s.replace("---", "===")).is_err());
        assert!(parse_dqm("dqm 1 1\n0 0 0 0\n---\n").is_err());
        assert!(parse_dqm(&to_dqm_string(&p).replacen("dqm", "qm", 1)).is_err());
    }
}
