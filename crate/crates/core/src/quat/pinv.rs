use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::adjoint::{complex_adjoint, from_adjoint_with_tol};
use super::svd::JacobiSvd;
use super::QuatMatrix;
use crate::error::{Error, Result};

// The pseudoinverse of an adjoint image is again an adjoint image; rounding
// breaks the block symmetry only at the level of eps times the condition number.
const PINV_SYMMETRY_TOL: f64 = 1e-7;

/// Threshold below which singular values of the complex adjoint count as zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum RankTolerance {
    /// `max(2m, 2n) * eps * sigma_max`.
    #[default]
    Auto,
    /// `factor * sigma_max`.
    Relative(f64),
    Absolute(f64),
}

impl RankTolerance {
    pub fn threshold(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self {
            RankTolerance::Auto => (2 * rows.max(cols)) as f64 * f64::EPSILON * sigma_max,
            RankTolerance::Relative(r) => r * sigma_max,
            RankTolerance::Absolute(t) => t,
        }
    }

    /// Lower bound on the threshold for a matrix computed from ingredients of
    /// magnitude `scale`: projector products of a rank-deficient input are
    /// rounding noise at that scale, not structure at their own.
    pub fn floor(self, scale: f64) -> f64 {
        match self {
            RankTolerance::Auto => f64::EPSILON.sqrt() * scale,
            RankTolerance::Relative(r) => r * scale,
            RankTolerance::Absolute(_) => 0.0,
        }
    }
}

/// Rank together with how clearly the spectrum separates at the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankInfo {
    pub rank: usize,
    pub threshold: f64,
    /// Smallest singular value counted toward the rank.
    pub smallest_kept: Option<f64>,
    /// Largest singular value treated as zero.
    pub largest_dropped: Option<f64>,
}

impl RankInfo {
    /// Factor by which the spectrum clears the threshold on both sides; large
    /// means the rank decision is robust. Infinite when nothing lies on one side.
    pub fn margin(&self) -> f64 {
        let above = match self.smallest_kept {
            Some(s) if self.threshold > 0.0 => s / self.threshold,
            _ => f64::INFINITY,
        };
        let below = match self.largest_dropped {
            Some(s) if s > 0.0 => self.threshold / s,
            _ => f64::INFINITY,
        };
        above.min(below)
    }
}

/// SVD of the adjoint with the orientation that keeps rows >= cols.
struct AdjointSvd {
    svd: JacobiSvd,
    transposed: bool,
    rows: usize,
    cols: usize,
}

impl AdjointSvd {
    fn new(a: &QuatMatrix) -> Result<Self> {
        let c = complex_adjoint(a).into_inner();
        let transposed = c.nrows() < c.ncols();
        let svd = if transposed {
            JacobiSvd::new(&c.adjoint())?
        } else {
            JacobiSvd::new(&c)?
        };
        Ok(AdjointSvd {
            svd,
            transposed,
            rows: a.rows(),
            cols: a.cols(),
        })
    }

    fn rank_info(&self, tol: RankTolerance, floor: f64) -> Result<RankInfo> {
        let threshold = tol.threshold(self.rows, self.cols, self.svd.max_singular()).max(floor);
        let mut kept = 0usize;
        let mut smallest_kept: Option<f64> = None;
        let mut largest_dropped: Option<f64> = None;
        for &s in &self.svd.sigma {
            if s > threshold {
                kept += 1;
                smallest_kept = Some(smallest_kept.map_or(s, |m| m.min(s)));
            } else {
                largest_dropped = Some(largest_dropped.map_or(s, |m| m.max(s)));
            }
        }
        if !kept.is_multiple_of(2) {
            return Err(Error::Numerical(format!(
                "odd adjoint rank {kept} for a {}x{} quaternion matrix: threshold {threshold:e} splits a singular pair",
                self.rows, self.cols
            )));
        }
        Ok(RankInfo {
            rank: kept / 2,
            threshold,
            smallest_kept,
            largest_dropped,
        })
    }
}

/// Moore-Penrose inverse with the default rank tolerance.
pub fn pinv(a: &QuatMatrix) -> Result<QuatMatrix> {
    pinv_with(a, RankTolerance::Auto)
}

/// Moore-Penrose inverse computed on the complex adjoint.
pub fn pinv_with(a: &QuatMatrix, tol: RankTolerance) -> Result<QuatMatrix> {
    pinv_floored(a, tol, 0.0)
}

/// Moore-Penrose inverse of a matrix derived from ingredients of magnitude
/// `scale`; see [`RankTolerance::floor`].
pub fn pinv_derived(a: &QuatMatrix, tol: RankTolerance, scale: f64) -> Result<QuatMatrix> {
    pinv_floored(a, tol, tol.floor(scale))
}

fn pinv_floored(a: &QuatMatrix, tol: RankTolerance, floor: f64) -> Result<QuatMatrix> {
    let (m, n) = a.shape();
    if a.is_empty() {
        return Ok(QuatMatrix::zeros(n, m));
    }
    let asvd = AdjointSvd::new(a)?;
    let info = asvd.rank_info(tol, floor)?;
    let svd = &asvd.svd;

    // processed = W V^H; its pseudoinverse is sum_j V_j W_j^H / sigma_j^2
    let (pr, pc) = (svd.w.nrows(), svd.v.nrows());
    let mut inv = DMatrix::<Complex64>::zeros(pc, pr);
    for (j, &s) in svd.sigma.iter().enumerate() {
        if s <= info.threshold {
            continue;
        }
        let scale = 1.0 / (s * s);
        let vj = svd.v.column(j);
        let wj = svd.w.column(j);
        for c in 0..pr {
            let wc = wj[c].conj() * scale;
            for r in 0..pc {
                inv[(r, c)] += vj[r] * wc;
            }
        }
    }
    let inv = if asvd.transposed { inv.adjoint() } else { inv };
    from_adjoint_with_tol(&inv, PINV_SYMMETRY_TOL).map_err(|e| match e {
        Error::NotAdjointImage { defect } => {
            Error::Numerical(format!("pseudoinverse left the adjoint image (defect {defect:e})"))
        }
        other => other,
    })
}

pub fn rank(a: &QuatMatrix) -> Result<usize> {
    Ok(rank_info(a, RankTolerance::Auto)?.rank)
}

pub fn rank_info(a: &QuatMatrix, tol: RankTolerance) -> Result<RankInfo> {
    rank_info_floored(a, tol, 0.0)
}

/// [`rank_info`] for a matrix computed from projector products, with the same
/// floor as [`pinv_derived`].
pub fn rank_info_derived(a: &QuatMatrix, tol: RankTolerance, scale: f64) -> Result<RankInfo> {
    rank_info_floored(a, tol, tol.floor(scale))
}

fn rank_info_floored(a: &QuatMatrix, tol: RankTolerance, floor: f64) -> Result<RankInfo> {
    if a.is_empty() {
        return Ok(RankInfo {
            rank: 0,
            threshold: 0.0,
            smallest_kept: None,
            largest_dropped: None,
        });
    }
    AdjointSvd::new(a)?.rank_info(tol, floor)
}

/// Singular values of `A` (each adjoint pair reported once), descending.
pub fn quat_singular_values(a: &QuatMatrix) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let mut s = AdjointSvd::new(a)?.svd.sigma;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s.into_iter().step_by(2).collect())
}

/// `L_A = I - A^+ A`, given a precomputed pseudoinverse.
pub fn left_projector(a: &QuatMatrix, a_pinv: &QuatMatrix) -> QuatMatrix {
    QuatMatrix::identity(a.cols()) - a_pinv * a
}

/// `R_A = I - A A^+`, given a precomputed pseudoinverse.
pub fn right_projector(a: &QuatMatrix, a_pinv: &QuatMatrix) -> QuatMatrix {
    QuatMatrix::identity(a.rows()) - a * a_pinv
}

pub fn proj_l(a: &QuatMatrix) -> Result<QuatMatrix> {
    Ok(left_projector(a, &pinv(a)?))
}

pub fn proj_r(a: &QuatMatrix) -> Result<QuatMatrix> {
    Ok(right_projector(a, &pinv(a)?))
}

/// A matrix with its pseudoinverse and both projectors.
#[derive(Debug, Clone)]
pub struct Projected {
    pub m: QuatMatrix,
    pub pinv: QuatMatrix,
    pub l: QuatMatrix,
    pub r: QuatMatrix,
}

impl Projected {
    pub fn new(m: QuatMatrix, tol: RankTolerance) -> Result<Self> {
        let p = pinv_with(&m, tol)?;
        Ok(Self::assemble(m, p))
    }

    /// For a matrix computed from ingredients of magnitude `scale`.
    pub fn derived(m: QuatMatrix, tol: RankTolerance, scale: f64) -> Result<Self> {
        let p = pinv_derived(&m, tol, scale)?;
        Ok(Self::assemble(m, p))
    }

    fn assemble(m: QuatMatrix, p: QuatMatrix) -> Self {
        let l = left_projector(&m, &p);
        let r = right_projector(&m, &p);
        Projected { m, pinv: p, l, r }
    }
}
