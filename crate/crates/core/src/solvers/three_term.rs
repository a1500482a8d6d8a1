//! The quaternion equation `A0 X0 B0 + A0 X1 B1 + A1 X2 B1 = C`.
//!
//! With `A = R_{A0} A1`, `A2 = R_{A0} C`, `B2 = B0 L_{B1}`, `B3 = C L_{B1}` it
//! is consistent iff `R_A A2 = 0`, `R_{A0} B3 = 0` and `B3 L_{B2} = 0`. The
//! general solution is built in the order `X2`, `X0`, `X1` because `X1`
//! depends on the other two.

use super::conditions::{ConditionCheck, RankTally, SolvabilityReport};
use super::params::{FreeParams, SolverConfig};
use crate::error::{Error, Result};
use crate::quat::{Projected, QuatMatrix};

#[derive(Debug, Clone)]
pub struct ThreeTermKernel {
    pub(crate) a0: Projected,
    pub(crate) a1: QuatMatrix,
    pub(crate) b0: QuatMatrix,
    pub(crate) b1: Projected,
    /// `R_{A0} A1`
    pub(crate) a: Projected,
    /// `B0 L_{B1}`
    pub(crate) b2: Projected,
    cfg: SolverConfig,
}

impl ThreeTermKernel {
    pub fn new(a0: &QuatMatrix, a1: &QuatMatrix, b0: &QuatMatrix, b1: &QuatMatrix, cfg: SolverConfig) -> Result<Self> {
        if a0.rows() != a1.rows() {
            return Err(Error::dims("three-term A0/A1 rows", a0.shape(), a1.shape()));
        }
        if b0.cols() != b1.cols() {
            return Err(Error::dims("three-term B0/B1 cols", b0.shape(), b1.shape()));
        }
        let a0 = Projected::new(a0.clone(), cfg.rank_tol)?;
        let b1 = Projected::new(b1.clone(), cfg.rank_tol)?;
        let scales = (a1.frobenius_norm(), b0.frobenius_norm());
        Self::from_projected(a0, a1.clone(), b0.clone(), b1, scales, cfg)
    }

    pub(crate) fn from_projected(
        a0: Projected,
        a1: QuatMatrix,
        b0: QuatMatrix,
        b1: Projected,
        (a1_scale, b0_scale): (f64, f64),
        cfg: SolverConfig,
    ) -> Result<Self> {
        let a = Projected::derived(&a0.r * &a1, cfg.rank_tol, a1_scale)?;
        let b2 = Projected::derived(&b0 * &b1.l, cfg.rank_tol, b0_scale)?;
        Ok(ThreeTermKernel {
            a0,
            a1,
            b0,
            b1,
            a,
            b2,
            cfg,
        })
    }

    /// Shapes of `U1..U6`.
    pub fn free_shapes(&self) -> [(usize, usize); 6] {
        let a = self.a0.m.cols();
        let d = self.a1.cols();
        let b = self.b0.rows();
        let c = self.b1.m.rows();
        [(a, c), (a, c), (d, c), (d, c), (a, b), (a, b)]
    }

    fn check_rhs(&self, c: &QuatMatrix) -> Result<()> {
        let want = (self.a0.m.rows(), self.b0.cols());
        if c.shape() != want {
            return Err(Error::dims("three-term right-hand side", want, c.shape()));
        }
        Ok(())
    }

    pub fn check(&self, c: &QuatMatrix) -> Result<SolvabilityReport> {
        self.check_with_scale(c, c.frobenius_norm())
    }

    pub(crate) fn check_with_scale(&self, c: &QuatMatrix, scale: f64) -> Result<SolvabilityReport> {
        self.check_rhs(c)?;
        let tol = self.cfg.tol;
        let a2 = &self.a0.r * c;
        let b3 = c * &self.b1.l;
        let projector = vec![
            ConditionCheck::evaluate("R_A A2 = 0", &(&self.a.r * &a2), scale, tol),
            ConditionCheck::evaluate("R_A0 B3 = 0", &(&self.a0.r * &b3), scale, tol),
            ConditionCheck::evaluate("B3 L_B2 = 0", &(&b3 * &self.b2.l), scale, tol),
        ];

        let (a0, a1, b0, b1) = (&self.a0.m, &self.a1, &self.b0, &self.b1.m);
        let zero = QuatMatrix::zeros(b1.rows(), a0.cols());
        let mut t = RankTally::new(self.cfg.rank_tol);
        let lhs = t.rank(&QuatMatrix::hstack(&[a0, a1, c])?)?;
        let rhs = t.rank(&QuatMatrix::hstack(&[a0, a1])?)?;
        let r1 = t.finish("r[A0 A1 C] = r[A0 A1]", lhs, rhs);
        let lhs = t.rank(&QuatMatrix::block(&[vec![b1, &zero], vec![c, a0]])?)?;
        let rhs = t.rank(b1)? + t.rank(a0)?;
        let r2 = t.finish("r[B1 0; C A0] = r(B1) + r(A0)", lhs, rhs);
        let lhs = t.rank(&QuatMatrix::vstack(&[c, b0, b1])?)?;
        let rhs = t.rank(&QuatMatrix::vstack(&[b0, b1])?)?;
        let r3 = t.finish("r[C; B0; B1] = r[B0; B1]", lhs, rhs);
        Ok(SolvabilityReport::new(
            "A0 X0 B0 + A0 X1 B1 + A1 X2 B1 = C",
            projector,
            vec![r1, r2, r3],
        ))
    }

    /// The particular data for right-hand side `c`, ready to instantiate.
    pub fn prepare(&self, c: &QuatMatrix) -> Result<ThreeTermSolution> {
        self.check_rhs(c)?;
        Ok(ThreeTermSolution {
            a2: &self.a0.r * c,
            b3: c * &self.b1.l,
            c: c.clone(),
            kernel: self.clone(),
        })
    }
}

/// `(X0, X1, X2)` as a function of `U1..U6`.
#[derive(Debug, Clone)]
pub struct ThreeTermSolution {
    pub kernel: ThreeTermKernel,
    pub c: QuatMatrix,
    /// `R_{A0} C`
    pub a2: QuatMatrix,
    /// `C L_{B1}`
    pub b3: QuatMatrix,
}

impl ThreeTermSolution {
    pub fn free_shapes(&self) -> [(usize, usize); 6] {
        self.kernel.free_shapes()
    }

    /// `u = [U1, .., U6]`; returns `(X0, X1, X2)`.
    pub fn construct(&self, u: &[QuatMatrix]) -> (QuatMatrix, QuatMatrix, QuatMatrix) {
        let k = &self.kernel;
        let x2 = &k.a.pinv * &self.a2 * &k.b1.pinv + &k.a.l * &u[2] + &u[3] * &k.b1.r;
        let x0 = &k.a0.pinv * &self.b3 * &k.b2.pinv + &k.a0.l * &u[4] + &u[5] * &k.b2.r;
        let rest = &self.c - &k.a0.m * &x0 * &k.b0 - &k.a1 * &x2 * &k.b1.m;
        let x1 = &k.a0.pinv * rest * &k.b1.pinv + &k.a0.l * &u[0] + &u[1] * &k.b1.r;
        (x0, x1, x2)
    }

    pub fn instantiate(&self, free: &FreeParams) -> Result<(QuatMatrix, QuatMatrix, QuatMatrix)> {
        let u = free.resolve(&self.free_shapes())?;
        Ok(self.construct(&u))
    }

    /// `|A0 X0 B0 + A0 X1 B1 + A1 X2 B1 - C|_F`.
    pub fn residual(&self, x0: &QuatMatrix, x1: &QuatMatrix, x2: &QuatMatrix) -> f64 {
        let k = &self.kernel;
        let lhs = &k.a0.m * x0 * &k.b0 + &k.a0.m * x1 * &k.b1.m + &k.a1 * x2 * &k.b1.m;
        (lhs - &self.c).frobenius_norm()
    }
}

/// Check, then build the general solution, of the three-term equation.
pub fn solve_three_term(
    a0: &QuatMatrix,
    a1: &QuatMatrix,
    b0: &QuatMatrix,
    b1: &QuatMatrix,
    c: &QuatMatrix,
    cfg: SolverConfig,
) -> Result<(ThreeTermSolution, SolvabilityReport)> {
    let kernel = ThreeTermKernel::new(a0, a1, b0, b1, cfg)?;
    let report = kernel.check(c)?;
    if !report.solvable() {
        return Err(Error::Unsolvable(report.to_unsolvable()));
    }
    Ok((kernel.prepare(c)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{grid_qmatrix, low_rank_grid, SeedTree};

    #[test]
    fn degenerate_to_single_term() {
        let c = grid_qmatrix(&mut SeedTree::new(3).rng("c"), 3, 3);
        let i = QuatMatrix::identity(3);
        let z = QuatMatrix::zeros(3, 3);
        let (sol, rep) = solve_three_term(&i, &z, &z, &i, &c, SolverConfig::default()).unwrap();
        assert!(rep.agree);
        for seed in 0..3 {
            let (x0, x1, x2) = sol.instantiate(&FreeParams::Random(seed)).unwrap();
            assert!((&x1 - &c).frobenius_norm() < 1e-13);
            assert!(sol.residual(&x0, &x1, &x2) < 1e-13);
        }
    }

    #[test]
    fn zero_coefficients_unsolvable() {
        let z = QuatMatrix::zeros(2, 2);
        let i = QuatMatrix::identity(2);
        let err = solve_three_term(&z, &z, &i, &i, &i, SolverConfig::default()).unwrap_err();
        let Error::Unsolvable(u) = err else { panic!("{err:?}") };
        assert!(!u.failed.is_empty());
        assert!(!u.rank_failed.is_empty());
    }

    #[test]
    fn constructed_round_trip() {
        let mut rng = SeedTree::new(23).rng("tt");
        let a0 = low_rank_grid(&mut rng, 4, 3, 2);
        let a1 = grid_qmatrix(&mut rng, 4, 2);
        let b0 = grid_qmatrix(&mut rng, 2, 5);
        let b1 = low_rank_grid(&mut rng, 3, 5, 2);
        let (x0, x1, x2) = (
            grid_qmatrix(&mut rng, 3, 2),
            grid_qmatrix(&mut rng, 3, 3),
            grid_qmatrix(&mut rng, 2, 3),
        );
        let c = &a0 * &x0 * &b0 + &a0 * &x1 * &b1 + &a1 * &x2 * &b1;
        let (sol, rep) = solve_three_term(&a0, &a1, &b0, &b1, &c, SolverConfig::default()).unwrap();
        assert!(rep.agree && rep.rank_holds);
        for seed in 0..10 {
            let (y0, y1, y2) = sol.instantiate(&FreeParams::Random(seed)).unwrap();
            assert!(sol.residual(&y0, &y1, &y2) <= 1e-9 * (1.0 + c.frobenius_norm()));
        }
    }
}
