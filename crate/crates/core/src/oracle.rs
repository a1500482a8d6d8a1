//! Brute-force cross-check: the dual quaternion equation `A X - Y B = C` as
//! one real linear system, solved by dense least squares.
//!
//! Quaternion entries become 4-vectors `(w, x, y, z)` and matrices are
//! vectorized column by column. Left multiplication by `a` and right
//! multiplication by `b` are the 4x4 real matrices `L(a)`, `R(b)` below, written
//! out from the Hamilton product rather than derived from [`crate::quat`], so
//! nothing here shares code with the solvers it checks.

use nalgebra::{DMatrix, DVector, Matrix4};

use crate::dualquat::DualQuatMatrix;
use crate::error::{Error, Result};
use crate::quat::{QuatMatrix, Quaternion};
use crate::solvers::SylvesterSolution;

/// Consistency threshold factor; looser than the solver tolerance.
pub const ORACLE_TOL: f64 = 1e-7;

/// `vec(a q) = L(a) vec(q)`.
pub fn left_block(a: Quaternion) -> Matrix4<f64> {
    let Quaternion { w, x, y, z } = a;
    Matrix4::new(
        w, -x, -y, -z, //
        x, w, -z, y, //
        y, z, w, -x, //
        z, -y, x, w,
    )
}

/// `vec(q b) = R(b) vec(q)`.
pub fn right_block(b: Quaternion) -> Matrix4<f64> {
    let Quaternion { w, x, y, z } = b;
    Matrix4::new(
        w, -x, -y, -z, //
        x, w, z, -y, //
        y, -z, w, x, //
        z, y, -x, w,
    )
}

/// The `4m x 4n` real matrix of left multiplication by an `m x n` matrix.
pub fn realify(a: &QuatMatrix) -> DMatrix<f64> {
    let (m, n) = a.shape();
    let mut out = DMatrix::zeros(4 * m, 4 * n);
    for i in 0..m {
        for j in 0..n {
            out.fixed_view_mut::<4, 4>(4 * i, 4 * j)
                .copy_from(&left_block(a.get(i, j)));
        }
    }
    out
}

/// Column-major real vectorization.
pub fn realvec(x: &QuatMatrix) -> DVector<f64> {
    let (r, c) = x.shape();
    let mut v = DVector::zeros(4 * r * c);
    for j in 0..c {
        for i in 0..r {
            let q = x.get(i, j).to_array();
            v.fixed_rows_mut::<4>(4 * (i + j * r)).copy_from_slice(&q);
        }
    }
    v
}

/// Inverse of [`realvec`] for a slice of length `4 rows cols`.
pub fn unrealvec(v: &[f64], rows: usize, cols: usize) -> Result<QuatMatrix> {
    if v.len() != 4 * rows * cols {
        return Err(Error::dims("unrealvec", (v.len(), 1), (4 * rows * cols, 1)));
    }
    Ok(QuatMatrix::from_fn(rows, cols, |i, j| {
        let o = 4 * (i + j * rows);
        Quaternion::new(v[o], v[o + 1], v[o + 2], v[o + 3])
    }))
}

/// Where each unknown lives in the real solution vector: `X0, X1, Y0, Y1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownLayout {
    pub x_shape: (usize, usize),
    pub y_shape: (usize, usize),
}

impl UnknownLayout {
    fn x_len(&self) -> usize {
        4 * self.x_shape.0 * self.x_shape.1
    }

    fn y_len(&self) -> usize {
        4 * self.y_shape.0 * self.y_shape.1
    }

    pub fn offsets(&self) -> [usize; 4] {
        let (x, y) = (self.x_len(), self.y_len());
        [0, x, 2 * x, 2 * x + y]
    }

    pub fn len(&self) -> usize {
        2 * self.x_len() + 2 * self.y_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pack(&self, x: &DualQuatMatrix, y: &DualQuatMatrix) -> DVector<f64> {
        let parts = [realvec(x.std()), realvec(x.inf()), realvec(y.std()), realvec(y.inf())];
        let mut v = DVector::zeros(self.len());
        for (off, p) in self.offsets().into_iter().zip(parts.iter()) {
            v.rows_mut(off, p.len()).copy_from(p);
        }
        v
    }

    pub fn unpack(&self, v: &[f64]) -> Result<(DualQuatMatrix, DualQuatMatrix)> {
        if v.len() != self.len() {
            return Err(Error::dims("unpack", (v.len(), 1), (self.len(), 1)));
        }
        let [o0, o1, o2, o3] = self.offsets();
        let ((xr, xc), (yr, yc)) = (self.x_shape, self.y_shape);
        let x0 = unrealvec(&v[o0..o1], xr, xc)?;
        let x1 = unrealvec(&v[o1..o2], xr, xc)?;
        let y0 = unrealvec(&v[o2..o3], yr, yc)?;
        let y1 = unrealvec(&v[o3..], yr, yc)?;
        Ok((DualQuatMatrix::new(x0, x1)?, DualQuatMatrix::new(y0, y1)?))
    }
}

/// `coeff * [X0; X1; Y0; Y1] = [C0; C1]` over the reals.
#[derive(Debug, Clone)]
pub struct RealSystem {
    pub coeff: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub layout: UnknownLayout,
}

/// `sign * A Z` into the block at `(row, col)`; `Z` has `zcols` columns.
fn add_left(out: &mut DMatrix<f64>, row: usize, col: usize, a: &QuatMatrix, zcols: usize, sign: f64) {
    let (n, k) = a.shape();
    for j in 0..zcols {
        for i in 0..n {
            for p in 0..k {
                let r0 = row + 4 * (i + j * n);
                let c0 = col + 4 * (p + j * k);
                let mut blk = out.fixed_view_mut::<4, 4>(r0, c0);
                blk += left_block(a.get(i, p)) * sign;
            }
        }
    }
}

/// `sign * Z B` into the block at `(row, col)`; `Z` has `zrows` rows.
fn add_right(out: &mut DMatrix<f64>, row: usize, col: usize, b: &QuatMatrix, zrows: usize, sign: f64) {
    let (l, m) = b.shape();
    for j in 0..m {
        for i in 0..zrows {
            for p in 0..l {
                let r0 = row + 4 * (i + j * zrows);
                let c0 = col + 4 * (i + p * zrows);
                let mut blk = out.fixed_view_mut::<4, 4>(r0, c0);
                blk += right_block(b.get(p, j)) * sign;
            }
        }
    }
}

/// Real form of `A0 X0 - Y0 B0 = C0`, `A0 X1 + A1 X0 - Y0 B1 - Y1 B0 = C1`.
pub fn build_system(a: &DualQuatMatrix, b: &DualQuatMatrix, c: &DualQuatMatrix) -> Result<RealSystem> {
    if a.rows() != c.rows() {
        return Err(Error::dims("oracle: rows of A and C", a.shape(), c.shape()));
    }
    if b.cols() != c.cols() {
        return Err(Error::dims("oracle: cols of B and C", b.shape(), c.shape()));
    }
    let (n, k) = a.shape();
    let (l, m) = b.shape();
    let layout = UnknownLayout {
        x_shape: (k, m),
        y_shape: (n, l),
    };
    let [ox0, ox1, oy0, oy1] = layout.offsets();
    let half = 4 * n * m;
    let mut coeff = DMatrix::zeros(2 * half, layout.len());

    add_left(&mut coeff, 0, ox0, a.std(), m, 1.0);
    add_right(&mut coeff, 0, oy0, b.std(), n, -1.0);

    add_left(&mut coeff, half, ox1, a.std(), m, 1.0);
    add_left(&mut coeff, half, ox0, a.inf(), m, 1.0);
    add_right(&mut coeff, half, oy0, b.inf(), n, -1.0);
    add_right(&mut coeff, half, oy1, b.std(), n, -1.0);

    let mut rhs = DVector::zeros(2 * half);
    rhs.rows_mut(0, half).copy_from(&realvec(c.std()));
    rhs.rows_mut(half, half).copy_from(&realvec(c.inf()));
    Ok(RealSystem { coeff, rhs, layout })
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub residual: f64,
    pub threshold: f64,
    pub consistent: bool,
    /// Minimum-norm least-squares `(X, Y)`; present only when consistent.
    pub solution: Option<(DualQuatMatrix, DualQuatMatrix)>,
}

impl OracleResult {
    /// Decades between the residual and the threshold.
    pub fn log_margin(&self) -> f64 {
        if self.residual == 0.0 {
            return f64::INFINITY;
        }
        (self.threshold / self.residual).log10().abs()
    }
}

/// Minimum-norm least-squares solution of `coeff v = rhs` by a complete
/// orthogonal decomposition: `coeff P = Q [R1; 0]` with column pivoting, then
/// `R1^T = Z T` so that `R1 = T^T Z^T`.
pub fn least_squares(coeff: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let (rows, cols) = coeff.shape();
    if rows == 0 || cols == 0 {
        return Ok(DVector::zeros(cols));
    }
    let qr = coeff.clone().col_piv_qr();
    let (q, r, p) = (qr.q(), qr.r(), qr.p());
    let cut = rows.max(cols) as f64 * f64::EPSILON * r[(0, 0)].abs();
    let rank = (0..r.nrows()).take_while(|&i| r[(i, i)].abs() > cut).count();
    let mut w = DVector::zeros(cols);
    if rank > 0 {
        let qtb = q.columns(0, rank).tr_mul(rhs);
        let (z, t) = r.rows(0, rank).transpose().qr().unpack();
        // T^T u = Q1^T b, then w = Z u
        let u = t
            .transpose()
            .solve_lower_triangular(&qtb)
            .ok_or_else(|| Error::Numerical("oracle: singular triangular factor".into()))?;
        w = z * u;
    }
    p.inv_permute_rows(&mut w);
    Ok(w)
}

pub fn oracle_solve(sys: &RealSystem) -> Result<OracleResult> {
    let v = least_squares(&sys.coeff, &sys.rhs)?;
    let residual = (&sys.coeff * &v - &sys.rhs).norm();
    let threshold = ORACLE_TOL * (1.0 + sys.rhs.norm());
    let consistent = residual <= threshold;
    let solution = if consistent {
        Some(sys.layout.unpack(v.as_slice())?)
    } else {
        None
    };
    Ok(OracleResult {
        residual,
        threshold,
        consistent,
        solution,
    })
}

/// Build and solve in one step.
pub fn oracle_check(a: &DualQuatMatrix, b: &DualQuatMatrix, c: &DualQuatMatrix) -> Result<OracleResult> {
    oracle_solve(&build_system(a, b, c)?)
}

/// How well a given `(X, Y)` is reproduced by the solver's affine family
/// `W -> (X(W), Y(W))`.
#[derive(Debug, Clone)]
pub struct CoverageFit {
    /// `|v(W*) - target|` for the least-squares best `W*`.
    pub residual: f64,
    /// Real dimension of the parameter space that was probed.
    pub params: usize,
}

/// Probe the affine map once per real parameter coordinate and fit `target`.
pub fn fit_in_family(sol: &SylvesterSolution, x: &DualQuatMatrix, y: &DualQuatMatrix) -> Result<CoverageFit> {
    let shapes = sol.free_shapes();
    let layout = UnknownLayout {
        x_shape: x.shape(),
        y_shape: y.shape(),
    };
    let zero: Vec<QuatMatrix> = shapes.iter().map(|&(r, c)| QuatMatrix::zeros(r, c)).collect();
    let (x0, y0) = sol.construct(&zero);
    let base = layout.pack(&x0, &y0);
    let target = layout.pack(x, y) - &base;

    let params: usize = shapes.iter().map(|&(r, c)| 4 * r * c).sum();
    let mut map = DMatrix::zeros(layout.len(), params);
    let mut col = 0;
    for (s, &(r, c)) in shapes.iter().enumerate() {
        for e in 0..4 * r * c {
            let mut w = zero.clone();
            let mut unit = vec![0.0; 4 * r * c];
            unit[e] = 1.0;
            w[s] = unrealvec(&unit, r, c)?;
            let (xe, ye) = sol.construct(&w);
            map.set_column(col, &(layout.pack(&xe, &ye) - &base));
            col += 1;
        }
    }
    let coef = least_squares(&map, &target)?;
    let residual = (&map * coef - target).norm();
    Ok(CoverageFit { residual, params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualquat::dq_norm;
    use crate::random::{grid_dq, grid_qmatrix, SeedTree};

    #[test]
    fn unit_blocks() {
        assert_eq!(realify(&QuatMatrix::identity(1)), DMatrix::identity(4, 4));
        let li = left_block(Quaternion::I);
        assert_eq!(li.transpose(), -li);
        assert_eq!(li * li, -Matrix4::identity());
    }

    #[test]
    fn blocks_match_products() {
        let p = Quaternion::new(1.0, -2.0, 0.5, 3.0);
        let q = Quaternion::new(0.25, 1.0, -1.0, 2.0);
        // p q by hand
        let pq = [-3.25, 4.5, 6.125, 4.25];
        let v = nalgebra::Vector4::from(q.to_array());
        assert_eq!((left_block(p) * v).as_slice(), &pq);
        let u = nalgebra::Vector4::from(p.to_array());
        assert_eq!((right_block(q) * u).as_slice(), &pq);
    }

    #[test]
    fn realify_is_multiplicative() {
        let mut rng = SeedTree::new(1).rng("r");
        let a = grid_qmatrix(&mut rng, 2, 3);
        let b = grid_qmatrix(&mut rng, 3, 2);
        let d = realify(&(&a * &b)) - realify(&a) * realify(&b);
        assert!(d.norm() < 1e-12);
        let x = grid_qmatrix(&mut rng, 3, 1);
        assert!((realvec(&(&a * &x)) - realify(&a) * realvec(&x)).norm() < 1e-12);
    }

    #[test]
    fn realvec_round_trip_exact() {
        let x = grid_qmatrix(&mut SeedTree::new(2).rng("x"), 3, 2);
        let v = realvec(&x);
        assert_eq!(unrealvec(v.as_slice(), 3, 2).unwrap(), x);
    }

    #[test]
    fn zero_coefficients() {
        let c = grid_dq(&mut SeedTree::new(3).rng("c"), 2, 2);
        let z = DualQuatMatrix::zeros(2, 2);
        let sys = build_system(&z, &z, &c).unwrap();
        assert!(sys.coeff.iter().all(|&v| v == 0.0));
        assert_eq!(sys.rhs.rows(0, 16).into_owned(), realvec(c.std()));
        let r = oracle_solve(&sys).unwrap();
        assert!((r.residual - sys.rhs.norm()).abs() < 1e-12);
        assert!(!r.consistent && r.solution.is_none());
    }

    #[test]
    fn zero_system() {
        let z = DualQuatMatrix::zeros(2, 2);
        let r = oracle_check(&z, &z, &z).unwrap();
        assert_eq!(r.residual, 0.0);
        let (x, y) = r.solution.unwrap();
        assert_eq!(dq_norm(&x) + dq_norm(&y), 0.0);
    }

    #[test]
    fn identity_coefficients_consistent() {
        let c = grid_dq(&mut SeedTree::new(4).rng("c"), 3, 3);
        let i = DualQuatMatrix::identity(3);
        let r = oracle_check(&i, &i, &c).unwrap();
        let (x, y) = r.solution.unwrap();
        let res = dq_norm(&(&(&(&i * &x) - &(&y * &i)) - &c));
        assert!(res <= 1e-9, "{res}");
    }

    #[test]
    fn dimensions() {
        let a = DualQuatMatrix::zeros(2, 3);
        let b = DualQuatMatrix::zeros(4, 5);
        let sys = build_system(&a, &b, &DualQuatMatrix::zeros(2, 5)).unwrap();
        assert_eq!(sys.coeff.nrows(), 2 * 4 * 2 * 5);
        assert_eq!(sys.coeff.ncols(), 4 * (2 * 3 * 5 + 2 * 2 * 4));
        assert!(build_system(&a, &b, &DualQuatMatrix::zeros(3, 5)).is_err());
    }
}
