//! The quaternion equation `A X B = C`.

use super::conditions::{ConditionCheck, RankTally, SolvabilityReport};
use super::params::{FreeParams, SolverConfig};
use crate::error::{Error, Result};
use crate::quat::{Projected, QuatMatrix};

/// Pseudoinverses and projectors of the fixed coefficients `A` (m x n) and
/// `B` (p x q).
#[derive(Debug, Clone)]
pub struct AxbKernel {
    pub a: Projected,
    pub b: Projected,
    cfg: SolverConfig,
}

impl AxbKernel {
    pub fn new(a: &QuatMatrix, b: &QuatMatrix, cfg: SolverConfig) -> Result<Self> {
        Ok(AxbKernel {
            a: Projected::new(a.clone(), cfg.rank_tol)?,
            b: Projected::new(b.clone(), cfg.rank_tol)?,
            cfg,
        })
    }

    pub(crate) fn from_projected(a: Projected, b: Projected, cfg: SolverConfig) -> Self {
        AxbKernel { a, b, cfg }
    }

    /// Shape of `X` and of both free parameters.
    pub fn unknown_shape(&self) -> (usize, usize) {
        (self.a.m.cols(), self.b.m.rows())
    }

    fn check_rhs(&self, c: &QuatMatrix) -> Result<()> {
        let want = (self.a.m.rows(), self.b.m.cols());
        if c.shape() != want {
            return Err(Error::dims("AXB=C right-hand side", want, c.shape()));
        }
        Ok(())
    }

    /// `R_A C = 0` and `C L_B = 0`, with the rank forms `r[A C] = r(A)` and
    /// `r[B; C] = r(B)`.
    pub fn check(&self, c: &QuatMatrix) -> Result<SolvabilityReport> {
        self.check_rhs(c)?;
        let scale = c.frobenius_norm();
        let projector = vec![
            ConditionCheck::evaluate("R_A C = 0", &(&self.a.r * c), scale, self.cfg.tol),
            ConditionCheck::evaluate("C L_B = 0", &(c * &self.b.l), scale, self.cfg.tol),
        ];
        let mut t = RankTally::new(self.cfg.rank_tol);
        let lhs = t.rank(&QuatMatrix::hstack(&[&self.a.m, c])?)?;
        let rhs = t.rank(&self.a.m)?;
        let r1 = t.finish("r[A C] = r(A)", lhs, rhs);
        let lhs = t.rank(&QuatMatrix::vstack(&[&self.b.m, c])?)?;
        let rhs = t.rank(&self.b.m)?;
        let r2 = t.finish("r[B; C] = r(B)", lhs, rhs);
        Ok(SolvabilityReport::new("AXB = C", projector, vec![r1, r2]))
    }

    /// `A^+ C B^+ + L_A U1 + U2 R_B`, evaluated whether or not `C` is consistent.
    pub fn construct(&self, c: &QuatMatrix, u1: &QuatMatrix, u2: &QuatMatrix) -> QuatMatrix {
        &self.a.pinv * c * &self.b.pinv + &self.a.l * u1 + u2 * &self.b.r
    }
}

/// General solution of `A X B = C`. Free parameters: `[U1, U2]`, both
/// shaped like `X`.
pub fn solve_axb_eq_c(
    a: &QuatMatrix,
    b: &QuatMatrix,
    c: &QuatMatrix,
    free: &FreeParams,
    cfg: SolverConfig,
) -> Result<(QuatMatrix, SolvabilityReport)> {
    if a.rows() != c.rows() || b.cols() != c.cols() {
        return Err(Error::dims("AXB=C", (a.rows(), b.cols()), c.shape()));
    }
    let kernel = AxbKernel::new(a, b, cfg)?;
    let report = kernel.check(c)?;
    if !report.solvable() {
        return Err(Error::Unsolvable(report.to_unsolvable()));
    }
    let s = kernel.unknown_shape();
    let u = free.resolve(&[s, s])?;
    Ok((kernel.construct(c, &u[0], &u[1]), report))
}
