//! The dual quaternion equation `A X = B`.
//!
//! With `A = A0 + A1 ε` and `B = B0 + B1 ε`, write
//!
//! ```text
//! A2  = A1 L_{A0}            B2 = B1 - A1 A0^+ B0
//! A3  = R_{A0} A2            C11 = R_{A0} B2
//! ```
//!
//! The equation is consistent iff `R_{A0} B0 = 0` and `R_{A3} C11 = 0`, and then
//!
//! ```text
//! X0 = A0^+ B0 + L_{A0} U
//! X1 = A0^+ (B2 - A2 U) + L_{A0} U1
//! U  = A3^+ C11 + L_{A3} U2
//! ```

use super::conditions::{ConditionCheck, RankTally, SolvabilityReport};
use super::params::{FreeParams, SolverConfig};
use crate::dualquat::DualQuatMatrix;
use crate::error::{Error, Result};
use crate::quat::{Projected, QuatMatrix};

/// Everything in the construction that depends only on the coefficient `A`.
#[derive(Debug, Clone)]
pub struct DualLeftSolver {
    a0: Projected,
    a1: QuatMatrix,
    a2: QuatMatrix,
    a3: Projected,
    cfg: SolverConfig,
}

impl DualLeftSolver {
    pub fn new(a: &DualQuatMatrix, cfg: SolverConfig) -> Result<Self> {
        let a0 = Projected::new(a.std().clone(), cfg.rank_tol)?;
        let a1 = a.inf().clone();
        let a2 = &a1 * &a0.l;
        let a3 = Projected::derived(&a0.r * &a2, cfg.rank_tol, a1.frobenius_norm())?;
        Ok(DualLeftSolver { a0, a1, a2, a3, cfg })
    }

    /// Rows of `A` and columns of `X`'s left factor.
    pub fn shape(&self) -> (usize, usize) {
        self.a0.m.shape()
    }

    fn check_rhs(&self, b: &DualQuatMatrix) -> Result<()> {
        if b.rows() != self.a0.m.rows() {
            return Err(Error::dims("AX=B", self.a0.m.shape(), b.shape()));
        }
        Ok(())
    }

    /// `B2 = B1 - A1 A0^+ B0` and the magnitude of its ingredients.
    fn reduced_rhs(&self, b: &DualQuatMatrix) -> (QuatMatrix, f64) {
        let carried = &self.a1 * &self.a0.pinv * b.std();
        let scale = b.inf().frobenius_norm() + carried.frobenius_norm();
        (b.inf() - &carried, scale)
    }

    pub fn check(&self, b: &DualQuatMatrix) -> Result<SolvabilityReport> {
        self.check_rhs(b)?;
        let tol = self.cfg.tol;
        let (b2, scale) = self.reduced_rhs(b);
        let c11 = &self.a0.r * &b2;
        let projector = vec![
            ConditionCheck::evaluate("R_A0 B0 = 0", &(&self.a0.r * b.std()), b.std().frobenius_norm(), tol),
            ConditionCheck::evaluate("R_A3 C11 = 0", &(&self.a3.r * &c11), scale, tol),
        ];

        let (a0, a1) = (&self.a0.m, &self.a1);
        let (b0, b1) = (b.std(), b.inf());
        let (m, n) = a0.shape();
        let z_b = QuatMatrix::zeros(m, n);
        let mut t = RankTally::new(self.cfg.rank_tol);
        let lhs = t.rank(&QuatMatrix::hstack(&[a0, b0])?)?;
        let rhs = t.rank(a0)?;
        let r1 = t.finish("r[A0 B0] = r(A0)", lhs, rhs);
        let lhs = t.rank(&QuatMatrix::block(&[vec![a0, b1, a1], vec![&z_b, b0, a0]])?)?;
        let rhs = t.rank(&QuatMatrix::block(&[vec![a0, a1], vec![&z_b, a0]])?)?;
        let r2 = t.finish("r[A0 B1 A1; 0 B0 A0] = r[A0 A1; 0 A0]", lhs, rhs);
        Ok(SolvabilityReport::new("AX = B", projector, vec![r1, r2]))
    }

    /// The closed-form `X` for given `U1`, `U2` (each `n x p`).
    pub fn construct(&self, b: &DualQuatMatrix, u1: &QuatMatrix, u2: &QuatMatrix) -> DualQuatMatrix {
        let (b2, _) = self.reduced_rhs(b);
        let c11 = &self.a0.r * &b2;
        let u = &self.a3.pinv * &c11 + &self.a3.l * u2;
        let x0 = &self.a0.pinv * b.std() + &self.a0.l * &u;
        let x1 = &self.a0.pinv * (&b2 - &self.a2 * &u) + &self.a0.l * u1;
        DualQuatMatrix::new(x0, x1).expect("parts share a shape")
    }

    pub(crate) fn a0(&self) -> &Projected {
        &self.a0
    }

    pub(crate) fn a3(&self) -> &Projected {
        &self.a3
    }
}

/// General solution of `A X = B`. Free parameters: `[U1, U2]`, both `n x p`
/// for `A` of size `m x n` and `B` of size `m x p`.
pub fn solve_dq_ax_eq_b(
    a: &DualQuatMatrix,
    b: &DualQuatMatrix,
    free: &FreeParams,
    cfg: SolverConfig,
) -> Result<(DualQuatMatrix, SolvabilityReport)> {
    if a.rows() != b.rows() {
        return Err(Error::dims("AX=B", a.shape(), b.shape()));
    }
    let solver = DualLeftSolver::new(a, cfg)?;
    let report = solver.check(b)?;
    if !report.solvable() {
        return Err(Error::Unsolvable(report.to_unsolvable()));
    }
    let shape = (a.cols(), b.cols());
    let u = free.resolve(&[shape, shape])?;
    Ok((solver.construct(b, &u[0], &u[1]), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualquat::dq_norm;
    use crate::random::{grid_dq, grid_qmatrix, SeedTree};

    #[test]
    fn identity_returns_b() {
        let b = grid_dq(&mut SeedTree::new(2).rng("b"), 3, 2);
        let (x, rep) = solve_dq_ax_eq_b(
            &DualQuatMatrix::identity(3),
            &b,
            &FreeParams::Random(1),
            SolverConfig::default(),
        )
        .unwrap();
        assert!(rep.agree);
        assert!(dq_norm(&(&x - &b)) < 1e-14);
    }

    #[test]
    fn zero_a_unsolvable() {
        let b = DualQuatMatrix::identity(2);
        match solve_dq_ax_eq_b(
            &DualQuatMatrix::zeros(2, 2),
            &b,
            &FreeParams::Zero,
            SolverConfig::default(),
        ) {
            Err(Error::Unsolvable(u)) => {
                assert_eq!(u.failed[0].label, "R_A0 B0 = 0");
                assert!(u.failed[0].residual > 1.0);
            }
            other => panic!("expected unsolvable, got {other:?}"),
        }
    }

    #[test]
    fn only_infinitesimal_condition_fails() {
        // A0 = B0 = 0, so only the infinitesimal condition can fail:
        // A1 = diag(1, 0) cannot reach B1 = I.
        let mut a1 = QuatMatrix::zeros(2, 2);
        a1[(0, 0)] = crate::quat::Quaternion::ONE;
        let a = DualQuatMatrix::pure_infinitesimal(a1);
        let b = DualQuatMatrix::pure_infinitesimal(QuatMatrix::identity(2));
        let err = solve_dq_ax_eq_b(&a, &b, &FreeParams::Zero, SolverConfig::default()).unwrap_err();
        let Error::Unsolvable(u) = err else { panic!() };
        assert_eq!(u.failed.len(), 1);
        assert_eq!(u.failed[0].label, "R_A3 C11 = 0");
        assert_eq!(u.rank_failed.len(), 1);
    }

    #[test]
    fn consistent_round_trip() {
        let mut rng = SeedTree::new(17).rng("axb");
        let a = grid_dq(&mut rng, 4, 3);
        let xs = DualQuatMatrix::new(grid_qmatrix(&mut rng, 3, 2), grid_qmatrix(&mut rng, 3, 2)).unwrap();
        let b = &a * &xs;
        let (x, rep) = solve_dq_ax_eq_b(&a, &b, &FreeParams::Random(4), SolverConfig::default()).unwrap();
        assert!(rep.agree && rep.rank_holds);
        assert!(dq_norm(&(&(&a * &x) - &b)) <= 1e-9);
    }
}
