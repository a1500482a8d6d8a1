use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::Quaternion;
use crate::error::{Error, Result};

/// Dense row-major quaternion matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QuatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QuatMatrix {
            rows,
            cols,
            data: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QuatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Quaternion::ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Quaternion>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(QuatMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QuatMatrix { rows, cols, data }
    }

    /// Every entry equal to `q`.
    pub fn filled(rows: usize, cols: usize, q: Quaternion) -> Self {
        QuatMatrix {
            rows,
            cols,
            data: vec![q; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Quaternion] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.data[i * self.cols + j]
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        QuatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&q| f(q)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|q| q.scale(s))
    }

    /// Conjugate transpose `A*`.
    pub fn conj_transpose(&self) -> Self {
        QuatMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|q| *q == Quaternion::ZERO)
    }

    pub fn try_add(&self, other: &QuatMatrix) -> Result<QuatMatrix> {
        self.check_same(other, "add")?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &QuatMatrix) -> Result<QuatMatrix> {
        self.check_same(other, "sub")?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &QuatMatrix) -> Result<QuatMatrix> {
        if self.cols != other.rows {
            return Err(Error::dims("mul", self.shape(), other.shape()));
        }
        Ok(self.mul_unchecked(other))
    }

    fn check_same(&self, other: &QuatMatrix, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::dims(op, self.shape(), other.shape()));
        }
        Ok(())
    }

    fn zip_with(&self, other: &QuatMatrix, f: impl Fn(Quaternion, Quaternion) -> Quaternion) -> Self {
        QuatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    fn mul_unchecked(&self, other: &QuatMatrix) -> QuatMatrix {
        let (m, p, n) = (self.rows, self.cols, other.cols);
        let mut out = QuatMatrix::zeros(m, n);
        for i in 0..m {
            let row = &self.data[i * p..(i + 1) * p];
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (j, &a) in row.iter().enumerate() {
                if a == Quaternion::ZERO {
                    continue;
                }
                let brow = &other.data[j * n..(j + 1) * n];
                for (d, &b) in dst.iter_mut().zip(brow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Copy of the sub-block starting at `(r0, c0)` with the given shape.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> QuatMatrix {
        QuatMatrix::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Assemble a block matrix. Every block in a block row must share its row
    /// count, and every block column its column count.
    pub fn block(blocks: &[Vec<&QuatMatrix>]) -> Result<QuatMatrix> {
        let Some(first) = blocks.first() else {
            return Ok(QuatMatrix::zeros(0, 0));
        };
        let ncols_blocks = first.len();
        let col_widths: Vec<usize> = first.iter().map(|b| b.cols).collect();
        let mut total_rows = 0;
        for row in blocks {
            if row.len() != ncols_blocks {
                return Err(Error::InvalidArgument("ragged block layout".into()));
            }
            let h = row.first().map_or(0, |b| b.rows);
            for (b, &w) in row.iter().zip(&col_widths) {
                if b.rows != h || b.cols != w {
                    return Err(Error::dims("block", (h, w), b.shape()));
                }
            }
            total_rows += h;
        }
        let total_cols: usize = col_widths.iter().sum();
        let mut out = QuatMatrix::zeros(total_rows, total_cols);
        let mut r0 = 0;
        for row in blocks {
            let mut c0 = 0;
            for b in row {
                for i in 0..b.rows {
                    for j in 0..b.cols {
                        out[(r0 + i, c0 + j)] = b.get(i, j);
                    }
                }
                c0 += b.cols;
            }
            r0 += row.first().map_or(0, |b| b.rows);
        }
        Ok(out)
    }

    pub fn hstack(parts: &[&QuatMatrix]) -> Result<QuatMatrix> {
        QuatMatrix::block(&[parts.to_vec()])
    }

    pub fn vstack(parts: &[&QuatMatrix]) -> Result<QuatMatrix> {
        let rows: Vec<Vec<&QuatMatrix>> = parts.iter().map(|p| vec![*p]).collect();
        QuatMatrix::block(&rows)
    }
}

/// Matrix product with dimension checking.
pub fn qm_mul(a: &QuatMatrix, b: &QuatMatrix) -> Result<QuatMatrix> {
    a.try_mul(b)
}

/// Conjugate transpose.
pub fn conj_transpose(a: &QuatMatrix) -> QuatMatrix {
    a.conj_transpose()
}

impl Index<(usize, usize)> for QuatMatrix {
    type Output = Quaternion;
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QuatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; use the `try_*` methods on
// unvalidated input.

impl Mul for &QuatMatrix {
    type Output = QuatMatrix;
    fn mul(self, rhs: &QuatMatrix) -> QuatMatrix {
        assert_eq!(self.cols, rhs.rows, "mul: {:?} * {:?}", self.shape(), rhs.shape());
        self.mul_unchecked(rhs)
    }
}

impl Add for &QuatMatrix {
    type Output = QuatMatrix;
    fn add(self, rhs: &QuatMatrix) -> QuatMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &QuatMatrix {
    type Output = QuatMatrix;
    fn sub(self, rhs: &QuatMatrix) -> QuatMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &QuatMatrix {
    type Output = QuatMatrix;
    fn neg(self) -> QuatMatrix {
        self.map(|q| -q)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QuatMatrix> for QuatMatrix {
            type Output = QuatMatrix;
            fn $m(self, rhs: QuatMatrix) -> QuatMatrix {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QuatMatrix> for QuatMatrix {
            type Output = QuatMatrix;
            fn $m(self, rhs: &QuatMatrix) -> QuatMatrix {
                (&self).$m(rhs)
            }
        }
        impl $tr<QuatMatrix> for &QuatMatrix {
            type Output = QuatMatrix;
            fn $m(self, rhs: QuatMatrix) -> QuatMatrix {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Mul, mul);
forward_owned!(Add, add);
forward_owned!(Sub, sub);

impl Neg for QuatMatrix {
    type Output = QuatMatrix;
    fn neg(self) -> QuatMatrix {
        -&self
    }
}

impl fmt::Display for QuatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("({})", self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: usize, cols: usize, seed: u32) -> QuatMatrix {
        // small deterministic integer entries
        QuatMatrix::from_fn(rows, cols, |i, j| {
            let s = (i * 7 + j * 13 + seed as usize * 5) as f64;
            Quaternion::new(
                s % 5.0 - 2.0,
                (s * 3.0) % 7.0 - 3.0,
                (s * 5.0) % 3.0 - 1.0,
                (s * 2.0) % 4.0 - 2.0,
            )
        })
    }

    #[test]
    fn identity_and_zero_products() {
        let a = sample(3, 4, 1);
        assert_eq!(&QuatMatrix::identity(3) * &a, a);
        assert_eq!(&a * &QuatMatrix::identity(4), a);
        assert!((&QuatMatrix::zeros(2, 3) * &a).is_zero());
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let a = sample(3, 4, 1);
        let b = sample(3, 4, 2);
        assert!(matches!(qm_mul(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(a.try_add(&sample(4, 3, 0)).is_err());
    }

    #[test]
    fn conj_transpose_rules() {
        let a = sample(4, 3, 3);
        let b = sample(3, 2, 4);
        assert_eq!(conj_transpose(&conj_transpose(&a)), a);
        assert_eq!(conj_transpose(&QuatMatrix::identity(3)), QuatMatrix::identity(3));
        let one = QuatMatrix::filled(1, 1, Quaternion::I);
        assert_eq!(one.conj_transpose().get(0, 0), -Quaternion::I);
        // integer entries: both sides exact
        assert_eq!((&a * &b).conj_transpose(), &b.conj_transpose() * &a.conj_transpose());
    }

    #[test]
    fn block_assembly() {
        let a = sample(2, 2, 0);
        let z = QuatMatrix::zeros(2, 3);
        let b = sample(1, 2, 1);
        let c = sample(1, 3, 2);
        let m = QuatMatrix::block(&[vec![&a, &z], vec![&b, &c]]).unwrap();
        assert_eq!(m.shape(), (3, 5));
        assert_eq!(m.submatrix(0, 0, 2, 2), a);
        assert_eq!(m.submatrix(2, 2, 1, 3), c);
        assert!(QuatMatrix::block(&[vec![&a, &c]]).is_err());
    }
}
