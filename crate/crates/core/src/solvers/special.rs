//! Special cases of `A X - Y B = C`: `Y B = C` and `A X = Y B`.

use super::conditions::{ConditionCheck, RankTally, SolvabilityReport};
use super::params::{FreeParams, SolverConfig};
use super::sylvester::{solve_sylvester, SylvesterSolution};
use crate::dualquat::DualQuatMatrix;
use crate::error::{Error, Result};
use crate::quat::{Projected, QuatMatrix};

/// `Y B = C` for `B` k x l and `C` n x l.
///
/// ```text
/// B2  = R_{B0} B1          C2  = C1 - C0 B0^+ B1
/// B00 = B2 L_{B0}          C00 = C2 L_{B0}
/// ```
///
/// Consistent iff `C0 L_{B0} = 0` and `C00 L_{B00} = 0`; then
/// `Y0 = C0 B0^+ + W R_{B0}`, `Y1 = (C2 - W B2) B0^+ + W1 R_{B0}` with
/// `W = C00 B00^+ + W2 R_{B00}`. Free parameters: `[W1, W2]`, each n x k.
#[derive(Debug, Clone)]
pub struct DualRightSolver {
    b0: Projected,
    b1: QuatMatrix,
    b2: QuatMatrix,
    b00: Projected,
    cfg: SolverConfig,
}

impl DualRightSolver {
    pub fn new(b: &DualQuatMatrix, cfg: SolverConfig) -> Result<Self> {
        let b0 = Projected::new(b.std().clone(), cfg.rank_tol)?;
        let b1 = b.inf().clone();
        let b2 = &b0.r * &b1;
        let b00 = Projected::derived(&b2 * &b0.l, cfg.rank_tol, b1.frobenius_norm())?;
        Ok(DualRightSolver { b0, b1, b2, b00, cfg })
    }

    fn reduced(&self, c: &DualQuatMatrix) -> (QuatMatrix, f64) {
        let carried = c.std() * &self.b0.pinv * &self.b1;
        let scale = carried.frobenius_norm() + c.inf().frobenius_norm();
        (c.inf() - &carried, scale)
    }

    pub fn check(&self, c: &DualQuatMatrix) -> Result<SolvabilityReport> {
        if c.cols() != self.b0.m.cols() {
            return Err(Error::dims("YB=C", self.b0.m.shape(), c.shape()));
        }
        let tol = self.cfg.tol;
        let (c2, scale) = self.reduced(c);
        let c00 = &c2 * &self.b0.l;
        let projector = vec![
            ConditionCheck::evaluate("C0 L_B0 = 0", &(c.std() * &self.b0.l), c.std().frobenius_norm(), tol),
            ConditionCheck::evaluate("C00 L_B00 = 0", &(&c00 * &self.b00.l), scale, tol),
        ];
        let (b0, b1) = (&self.b0.m, &self.b1);
        let (c0, c1) = (c.std(), c.inf());
        let z_b = QuatMatrix::zeros(b0.rows(), b0.cols());
        let mut t = RankTally::new(self.cfg.rank_tol);
        let lhs = t.rank(&QuatMatrix::vstack(&[b0, c0])?)?;
        let rhs = t.rank(b0)?;
        let r1 = t.finish("r[B0; C0] = r(B0)", lhs, rhs);
        let lhs = t.rank(&QuatMatrix::block(&[vec![c1, c0], vec![b0, &z_b], vec![b1, b0]])?)?;
        let rhs = t.rank(&QuatMatrix::block(&[vec![b0, &z_b], vec![b1, b0]])?)?;
        let r2 = t.finish("r[C1 C0; B0 0; B1 B0] = r[B0 0; B1 B0]", lhs, rhs);
        Ok(SolvabilityReport::new("YB = C", projector, vec![r1, r2]))
    }

    pub fn construct(&self, c: &DualQuatMatrix, w1: &QuatMatrix, w2: &QuatMatrix) -> DualQuatMatrix {
        let (c2, _) = self.reduced(c);
        let c00 = &c2 * &self.b0.l;
        let w = &c00 * &self.b00.pinv + w2 * &self.b00.r;
        let y0 = c.std() * &self.b0.pinv + &w * &self.b0.r;
        let y1 = (&c2 - &w * &self.b2) * &self.b0.pinv + w1 * &self.b0.r;
        DualQuatMatrix::new(y0, y1).expect("parts share a shape")
    }
}

pub fn solve_yb_eq_c(
    b: &DualQuatMatrix,
    c: &DualQuatMatrix,
    free: &FreeParams,
    cfg: SolverConfig,
) -> Result<(DualQuatMatrix, SolvabilityReport)> {
    if b.cols() != c.cols() {
        return Err(Error::dims("YB=C", b.shape(), c.shape()));
    }
    let solver = DualRightSolver::new(b, cfg)?;
    let report = solver.check(c)?;
    if !report.solvable() {
        return Err(Error::Unsolvable(report.to_unsolvable()));
    }
    let shape = (c.rows(), b.rows());
    let w = free.resolve(&[shape, shape])?;
    Ok((solver.construct(c, &w[0], &w[1]), report))
}

/// The solution family of the homogeneous equation `A X = Y B`.
///
/// With `C = 0` every particular term of the general `A X - Y B = C`
/// construction vanishes and the solvability conditions hold exactly, so
/// this is that construction at `C = 0`.
pub fn ax_eq_yb_family(a: &DualQuatMatrix, b: &DualQuatMatrix, cfg: SolverConfig) -> Result<SylvesterSolution> {
    let c = DualQuatMatrix::zeros(a.rows(), b.cols());
    solve_sylvester(a, b, &c, cfg)
}

/// One solution `(X, Y)` of `A X = Y B`; zero free parameters give `(0, 0)`.
pub fn solve_ax_eq_yb(
    a: &DualQuatMatrix,
    b: &DualQuatMatrix,
    free: &FreeParams,
    cfg: SolverConfig,
) -> Result<(DualQuatMatrix, DualQuatMatrix)> {
    ax_eq_yb_family(a, b, cfg)?.instantiate(free)
}
