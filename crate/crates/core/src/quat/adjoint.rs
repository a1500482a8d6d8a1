//! Complex adjoint representation `A1 + A2 j -> [[A1, A2], [-conj(A2), conj(A1)]]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{QuatMatrix, Quaternion};
use crate::error::{Error, Result};

/// Default block-symmetry tolerance for [`from_adjoint`], relative to the
/// largest entry.
pub const ADJOINT_SYMMETRY_TOL: f64 = 1e-10;

/// The `2m x 2n` complex image of an `m x n` quaternion matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexAdjoint(pub DMatrix<Complex64>);

impl ComplexAdjoint {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }
}

pub fn complex_adjoint(a: &QuatMatrix) -> ComplexAdjoint {
    let (m, n) = a.shape();
    let mut out = DMatrix::<Complex64>::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let (c1, c2) = a.get(i, j).to_complex_pair();
            out[(i, j)] = c1;
            out[(i, n + j)] = c2;
            out[(m + i, j)] = -c2.conj();
            out[(m + i, n + j)] = c1.conj();
        }
    }
    ComplexAdjoint(out)
}

/// Inverse of [`complex_adjoint`] with the default symmetry tolerance.
pub fn from_adjoint(c: &DMatrix<Complex64>) -> Result<QuatMatrix> {
    from_adjoint_with_tol(c, ADJOINT_SYMMETRY_TOL)
}

/// Inverse of [`complex_adjoint`]. The two copies of each block are averaged,
/// which is exact on true adjoint images; the relative block defect must not
/// exceed `tol`.
pub fn from_adjoint_with_tol(c: &DMatrix<Complex64>, tol: f64) -> Result<QuatMatrix> {
    if !c.nrows().is_multiple_of(2) || !c.ncols().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "adjoint image must have even shape, got {}x{}",
            c.nrows(),
            c.ncols()
        )));
    }
    let (m, n) = (c.nrows() / 2, c.ncols() / 2);
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut defect: f64 = 0.0;
    let q = QuatMatrix::from_fn(m, n, |i, j| {
        let a1 = c[(i, j)];
        let a2 = c[(i, n + j)];
        let b2 = -c[(m + i, j)].conj();
        let b1 = c[(m + i, n + j)].conj();
        defect = defect.max((a1 - b1).norm()).max((a2 - b2).norm());
        Quaternion::from_complex_pair((a1 + b1) * 0.5, (a2 + b2) * 0.5)
    });
    if defect > tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotAdjointImage { defect: defect / scale });
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjoint_of_j() {
        let a = QuatMatrix::filled(1, 1, Quaternion::J);
        let c = complex_adjoint(&a).into_inner();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(c, DMatrix::from_row_slice(2, 2, &[zero, one, -one, zero]));
    }

    #[test]
    fn adjoint_of_i_is_diag() {
        let a = QuatMatrix::filled(1, 1, Quaternion::I);
        let c = complex_adjoint(&a).into_inner();
        assert_eq!(c[(0, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(c[(1, 1)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn rejects_non_image() {
        let mut c = complex_adjoint(&QuatMatrix::identity(2)).into_inner();
        c[(0, 0)] = Complex64::new(2.0, 0.0);
        assert!(matches!(from_adjoint(&c), Err(Error::NotAdjointImage { .. })));
        let odd = DMatrix::<Complex64>::zeros(3, 2);
        assert!(from_adjoint(&odd).is_err());
    }
}
