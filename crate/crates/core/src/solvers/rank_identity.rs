use crate::error::{Error, Result};
use crate::quat::{proj_l, proj_r, rank, rank_info_derived, QuatMatrix, RankTolerance};

/// Both sides of the block rank identity
///
/// ```text
/// r[A  M L_F; R_K N  0] = r[A M 0; N 0 K; 0 F 0] - r(K) - r(F)
/// ```
///
/// for `A` p x q, `M` p x s, `N` u x q, `F` t x s, `K` u x v.
/// Returns `(lhs, rhs)`; `rhs` saturates at zero.
pub fn check_rank_identity(
    a: &QuatMatrix,
    m: &QuatMatrix,
    n: &QuatMatrix,
    f: &QuatMatrix,
    k: &QuatMatrix,
) -> Result<(usize, usize)> {
    let (p, q) = a.shape();
    let s = m.cols();
    if m.rows() != p || n.cols() != q || f.cols() != s || k.rows() != n.rows() {
        return Err(Error::InvalidArgument(format!(
            "non-conformable blocks: A {:?}, M {:?}, N {:?}, F {:?}, K {:?}",
            a.shape(),
            m.shape(),
            n.shape(),
            f.shape(),
            k.shape()
        )));
    }
    let (u, t, v) = (n.rows(), f.rows(), k.cols());

    let mlf = m * &proj_l(f)?;
    let rkn = &proj_r(k)? * n;
    let z_us = QuatMatrix::zeros(u, s);
    let left = QuatMatrix::block(&[vec![a, &mlf], vec![&rkn, &z_us]])?;

    let z_pv = QuatMatrix::zeros(p, v);
    let z_tq = QuatMatrix::zeros(t, q);
    let z_tv = QuatMatrix::zeros(t, v);
    let big = QuatMatrix::block(&[vec![a, m, &z_pv], vec![n, &z_us, k], vec![&z_tq, f, &z_tv]])?;

    // M L_F and R_K N are exactly zero in many instances; keep their rounding out of the rank
    let scale = [a, m, n].iter().map(|x| x.frobenius_norm()).fold(0.0, f64::max);
    let lhs = rank_info_derived(&left, RankTolerance::Auto, scale)?.rank;
    let rhs = rank(&big)?.saturating_sub(rank(k)? + rank(f)?);
    Ok((lhs, rhs))
}
