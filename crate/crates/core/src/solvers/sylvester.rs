//! The dual quaternion equation `A X - Y B = C`.
//!
//! Splitting into standard and infinitesimal parts gives the quaternion system
//!
//! ```text
//! A0 X0 - Y0 B0 = C0
//! A0 X1 + A1 X0 - Y0 B1 - Y1 B0 = C1
//! ```
//!
//! Read as `A X = C + Y B` in `X`, the system is consistent iff
//! `R_{A0}(C0 + Y0 B0) = 0` and a second projected equation hold. The first
//! is the two-sided equation `A3 Y0 B0 = C3`; substituting its general
//! solution into the second gives the three-term equation
//! `A4 U2 B2 + A4 Y1 B0 + A5 U1 B0 = C4` in `(U2, Y1, U1)`. The intermediates:
//!
//! ```text
//! A11 = A1 L_{A0}        A2 = R_{A0} A11          A3 = R_{A0}
//! C3  = -R_{A0} C0       B2 = R_{B0} B1           A4 = R_{A2} R_{A0}
//! A5  = -A4 A1 A0^+      C4 = A4 (A1 A0^+ C0 + C0 B0^+ B1 - C1)
//! A6  = R_{A4} A5        C5 = R_{A4} C4
//! B3  = B2 L_{B0}        B4 = C4 L_{B0}
//! ```
//!
//! Consistency reduces to `C3 L_{B0} = 0` and `B4 L_{B3} = 0`; the other two
//! three-term conditions, `R_{A6} C5 = 0` and `R_{A4} B4 = 0`, hold identically.

use std::fmt;

use serde::Serialize;

use super::ax_eq_b::DualLeftSolver;
use super::axb::AxbKernel;
use super::conditions::{ConditionCheck, RankCondition, RankTally, Unsolvable};
use super::params::{FreeParams, SolverConfig};
use super::three_term::{ThreeTermKernel, ThreeTermSolution};
use crate::dualquat::{dq_norm, DualQuatMatrix};
use crate::error::{Error, Result};
use crate::quat::{Projected, QuatMatrix};

/// Factor over the solver tolerance beyond which a violated structural
/// identity is reported as a numerical failure.
pub const IDENTITY_FAILURE_FACTOR: f64 = 1e3;

/// The named intermediates for one `(A, B, C)`, with the pseudoinverses and
/// projectors the construction needs.
#[derive(Debug, Clone)]
pub struct SylvesterWorkspace {
    pub a: DualQuatMatrix,
    pub b: DualQuatMatrix,
    pub c: DualQuatMatrix,
    pub a11: QuatMatrix,
    pub a2: QuatMatrix,
    pub a3: QuatMatrix,
    pub a4: QuatMatrix,
    pub a5: QuatMatrix,
    pub a6: QuatMatrix,
    pub b2: QuatMatrix,
    pub b3: QuatMatrix,
    pub b4: QuatMatrix,
    pub c3: QuatMatrix,
    pub c4: QuatMatrix,
    pub c5: QuatMatrix,
    /// Magnitude of the terms that make up `C4`; scales the conditions on it.
    pub c4_scale: f64,
    left: DualLeftSolver,
    y0_kernel: AxbKernel,
    inner: ThreeTermSolution,
    cfg: SolverConfig,
}

fn check_dims(a: &DualQuatMatrix, b: &DualQuatMatrix, c: &DualQuatMatrix) -> Result<()> {
    if c.rows() != a.rows() {
        return Err(Error::dims("AX-YB=C: rows of A and C", a.shape(), c.shape()));
    }
    if c.cols() != b.cols() {
        return Err(Error::dims("AX-YB=C: cols of B and C", b.shape(), c.shape()));
    }
    Ok(())
}

impl SylvesterWorkspace {
    pub fn new(a: &DualQuatMatrix, b: &DualQuatMatrix, c: &DualQuatMatrix, cfg: SolverConfig) -> Result<Self> {
        check_dims(a, b, c)?;
        let (a1, b1) = (a.inf(), b.inf());
        let (c0, c1) = (c.std(), c.inf());

        // X comes from the dual left solver, whose inner matrices are A11 and A2
        let left = DualLeftSolver::new(a, cfg)?;
        let a0 = left.a0().clone();
        let a2p = left.a3().clone();
        let a11 = a1 * &a0.l;
        let b0 = Projected::new(b.std().clone(), cfg.rank_tol)?;

        let a3p = Projected::derived(a0.r.clone(), cfg.rank_tol, 1.0)?;
        let c3 = -(&a0.r * c0);
        let b2 = &b0.r * b1;
        let a4 = &a2p.r * &a0.r;
        let a5 = -(&a4 * a1 * &a0.pinv);

        let carried_left = a1 * &a0.pinv * c0;
        let carried_right = c0 * &b0.pinv * b1;
        let c4 = &a4 * (&carried_left + &carried_right - c1);
        let c4_scale = carried_left.frobenius_norm() + carried_right.frobenius_norm() + c1.frobenius_norm();

        let a4p = Projected::derived(a4.clone(), cfg.rank_tol, 1.0)?;
        let scales = (a1.frobenius_norm() * a0.pinv.frobenius_norm(), b1.frobenius_norm());
        let kernel = ThreeTermKernel::from_projected(a4p, a5.clone(), b2.clone(), b0.clone(), scales, cfg)?;
        let a6 = kernel.a.m.clone();
        let b3 = kernel.b2.m.clone();
        let c5 = &kernel.a0.r * &c4;
        let b4 = &c4 * &b0.l;
        let inner = kernel.prepare(&c4)?;

        let y0_kernel = AxbKernel::from_projected(a3p, b0, cfg);

        Ok(SylvesterWorkspace {
            a: a.clone(),
            b: b.clone(),
            c: c.clone(),
            a11,
            a2: a2p.m.clone(),
            a3: a0.r.clone(),
            a4,
            a5,
            a6,
            b2,
            b3,
            b4,
            c3,
            c4,
            c5,
            c4_scale,
            left,
            y0_kernel,
            inner,
            cfg,
        })
    }

    pub fn config(&self) -> SolverConfig {
        self.cfg
    }

    fn b0(&self) -> &Projected {
        &self.y0_kernel.b
    }

    /// `C3 L_{B0} = 0` and `B4 L_{B3} = 0`.
    pub fn projector_conditions(&self) -> Vec<ConditionCheck> {
        let tol = self.cfg.tol;
        let k = &self.inner.kernel;
        vec![
            ConditionCheck::evaluate(
                "C3 L_B0 = 0",
                &(&self.c3 * &self.b0().l),
                self.c.std().frobenius_norm(),
                tol,
            ),
            ConditionCheck::evaluate("B4 L_B3 = 0", &(&self.b4 * &k.b2.l), self.c4_scale, tol),
        ]
    }

    /// `R_{A6} C5 = 0` and `R_{A4} B4 = 0`, which hold for every input.
    pub fn identity_checks(&self) -> Vec<ConditionCheck> {
        let tol = self.cfg.tol;
        let k = &self.inner.kernel;
        vec![
            ConditionCheck::evaluate("R_A6 C5 = 0", &(&k.a.r * &self.c5), self.c4_scale, tol),
            ConditionCheck::evaluate("R_A4 B4 = 0", &(&k.a0.r * &self.b4), self.c4_scale, tol),
        ]
    }

    /// The block rank equalities equivalent to the projector conditions.
    pub fn rank_conditions(&self) -> Result<Vec<RankCondition>> {
        let (a0, a1) = (self.a.std(), self.a.inf());
        let (b0, b1) = (self.b.std(), self.b.inf());
        let nc0 = -self.c.std();
        let nc1 = -self.c.inf();
        let (n, k) = a0.shape();
        let (l, m) = b0.shape();
        let z = QuatMatrix::zeros;

        let mut t = RankTally::new(self.cfg.rank_tol);

        let (z_lk, z_nm) = (z(l, k), z(n, m));
        let lhs = t.rank(&QuatMatrix::block(&[vec![b0, &z_lk], vec![&nc0, a0]])?)?;
        let rhs = t.rank(b0)? + t.rank(a0)?;
        let first = t.finish("r[B0 0; -C0 A0] = r(B0) + r(A0)", lhs, rhs);

        // Block form of A X - Y B = C under D0 + D1 eps -> [D1 D0; D0 0] for
        // X, Y, C and the triangular embeddings of A and B. The C0 in the last
        // block row is what makes the condition necessary.
        let (z_lm, z_nk) = (z(l, m), z(n, k));
        let big = QuatMatrix::block(&[
            vec![b0, &z_lm, &z_lk, &z_lk],
            vec![b1, b0, &z_lk, &z_lk],
            vec![&nc1, &nc0, a0, a1],
            vec![&nc0, &z_nm, &z_nk, a0],
        ])?;
        let lhs = t.rank(&big)?;
        let bb = QuatMatrix::block(&[vec![b0, &z_lm], vec![b1, b0]])?;
        let aa = QuatMatrix::block(&[vec![a0, a1], vec![&z_nk, a0]])?;
        let rhs = t.rank(&bb)? + t.rank(&aa)?;
        let second = t.finish(
            "r[B0 0 0 0; B1 B0 0 0; -C1 -C0 A0 A1; -C0 0 0 A0] = r[B0 0; B1 B0] + r[A0 A1; 0 A0]",
            lhs,
            rhs,
        );
        Ok(vec![first, second])
    }

    pub fn report(&self) -> Result<SylvesterReport> {
        Ok(SylvesterReport::new(
            self.projector_conditions(),
            self.rank_conditions()?,
            self.identity_checks(),
        ))
    }

    /// Shapes of `W1..W8`: `W1, W2` are `k x m`, `W3..W8` are `n x l`.
    pub fn free_shapes(&self) -> [(usize, usize); 8] {
        let (n, k) = self.a.shape();
        let (l, m) = self.b.shape();
        let mut s = [(n, l); 8];
        s[0] = (k, m);
        s[1] = (k, m);
        s
    }

    /// The general-solution formulas at `w = [W1, .., W8]`.
    pub fn construct(&self, w: &[QuatMatrix]) -> (DualQuatMatrix, DualQuatMatrix) {
        let (b0, b1) = (self.b.std(), self.b.inf());
        let (c0, c1) = (self.c.std(), self.c.inf());

        // (U2, Y1, U1) from the three-term equation; its free parameters
        // (U1..U6 there) are W3..W8 here.
        let (u2, y1, u1) = self.inner.construct(&w[2..8]);
        let y0 = self.y0_kernel.construct(&self.c3, &u1, &u2);

        let rhs = DualQuatMatrix::new(c0 + &y0 * b0, c1 + &y0 * b1 + &y1 * b0).expect("parts share a shape");
        let x = self.left.construct(&rhs, &w[0], &w[1]);
        let y = DualQuatMatrix::new(y0, y1).expect("parts share a shape");
        (x, y)
    }

    /// `|A X - Y B - C|` in the dual norm.
    pub fn residual(&self, x: &DualQuatMatrix, y: &DualQuatMatrix) -> f64 {
        let lhs = &(&self.a * x) - &(y * &self.b);
        dq_norm(&(&lhs - &self.c))
    }
}

/// Verdicts of both condition families for `A X - Y B = C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SylvesterReport {
    pub cond2: Vec<ConditionCheck>,
    pub cond3: Vec<RankCondition>,
    pub identities: Vec<ConditionCheck>,
    pub cond2_holds: bool,
    pub cond3_holds: bool,
    pub identities_hold: bool,
    pub agree: bool,
}

impl SylvesterReport {
    fn new(cond2: Vec<ConditionCheck>, cond3: Vec<RankCondition>, identities: Vec<ConditionCheck>) -> Self {
        let cond2_holds = cond2.iter().all(|c| c.holds);
        let cond3_holds = cond3.iter().all(|c| c.holds);
        let identities_hold = identities.iter().all(|c| c.holds);
        SylvesterReport {
            agree: cond2_holds == cond3_holds,
            cond2,
            cond3,
            identities,
            cond2_holds,
            cond3_holds,
            identities_hold,
        }
    }

    /// The projector form decides when the two families disagree.
    pub fn solvable(&self) -> bool {
        self.cond2_holds
    }

    pub fn to_unsolvable(&self) -> Unsolvable {
        Unsolvable {
            equation: "AX - YB = C".into(),
            failed: self.cond2.iter().filter(|c| !c.holds).cloned().collect(),
            rank_failed: self.cond3.iter().filter(|c| !c.holds).cloned().collect(),
        }
    }

    /// Smallest rank margin over the rank conditions.
    pub fn rank_margin(&self) -> f64 {
        self.cond3.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min)
    }

    /// Smallest distance, in decades, between a projector residual and its threshold.
    pub fn projector_log_margin(&self) -> f64 {
        self.cond2
            .iter()
            .map(ConditionCheck::log_margin)
            .fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for SylvesterReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "projector form:")?;
        for c in &self.cond2 {
            writeln!(
                f,
                "  [{}] {:<14} residual {:.3e} (threshold {:.3e})",
                mark(c.holds),
                c.label,
                c.residual,
                c.threshold
            )?;
        }
        writeln!(f, "rank form:")?;
        for (c, tag) in self.cond3.iter().zip(["standard part", "dual part"]) {
            writeln!(f, "  [{}] {tag}: {}  ({} vs {})", mark(c.holds), c.label, c.lhs, c.rhs)?;
        }
        writeln!(f, "structural identities:")?;
        for c in &self.identities {
            writeln!(f, "  [{}] {:<14} residual {:.3e}", mark(c.holds), c.label, c.residual)?;
        }
        write!(
            f,
            "verdict: projector form {}, rank form {}{}",
            if self.cond2_holds { "holds" } else { "fails" },
            if self.cond3_holds { "holds" } else { "fails" },
            if self.agree {
                ""
            } else {
                " -- DISAGREE (projector form trusted)"
            }
        )
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

/// Evaluate both condition families without solving.
pub fn check_sylvester(
    a: &DualQuatMatrix,
    b: &DualQuatMatrix,
    c: &DualQuatMatrix,
    cfg: SolverConfig,
) -> Result<SylvesterReport> {
    SylvesterWorkspace::new(a, b, c, cfg)?.report()
}

/// A verified-consistent instance and the map from `W1..W8` to `(X, Y)`.
#[derive(Debug, Clone)]
pub struct SylvesterSolution {
    pub workspace: SylvesterWorkspace,
    pub report: SylvesterReport,
}

impl SylvesterSolution {
    pub fn free_shapes(&self) -> [(usize, usize); 8] {
        self.workspace.free_shapes()
    }

    pub fn instantiate(&self, free: &FreeParams) -> Result<(DualQuatMatrix, DualQuatMatrix)> {
        let w = free.resolve(&self.free_shapes())?;
        Ok(self.workspace.construct(&w))
    }

    pub fn construct(&self, w: &[QuatMatrix]) -> (DualQuatMatrix, DualQuatMatrix) {
        self.workspace.construct(w)
    }

    pub fn residual(&self, x: &DualQuatMatrix, y: &DualQuatMatrix) -> f64 {
        self.workspace.residual(x, y)
    }
}

/// Check `A X - Y B = C` and return its general solution.
pub fn solve_sylvester(
    a: &DualQuatMatrix,
    b: &DualQuatMatrix,
    c: &DualQuatMatrix,
    cfg: SolverConfig,
) -> Result<SylvesterSolution> {
    let workspace = SylvesterWorkspace::new(a, b, c, cfg)?;
    let report = workspace.report()?;
    let limit = IDENTITY_FAILURE_FACTOR * cfg.tol;
    for id in &report.identities {
        if id.residual > limit * (1.0 + workspace.c4_scale) {
            return Err(Error::Numerical(format!(
                "structural identity {} violated: residual {:.3e}",
                id.label, id.residual
            )));
        }
    }
    if !report.solvable() {
        return Err(Error::Unsolvable(report.to_unsolvable()));
    }
    Ok(SylvesterSolution { workspace, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{grid_dq, grid_qmatrix, low_rank_grid, SeedTree};

    #[test]
    fn identity_coefficients() {
        let c = grid_dq(&mut SeedTree::new(5).rng("c"), 3, 3);
        let i = DualQuatMatrix::identity(3);
        let sol = solve_sylvester(&i, &i, &c, SolverConfig::default()).unwrap();
        assert!(sol.report.agree);
        let (x, y) = sol.instantiate(&FreeParams::Zero).unwrap();
        assert!(dq_norm(&(&x - &c)) < 1e-14);
        assert!(dq_norm(&y) < 1e-14);
        assert!(sol.residual(&x, &y) < 1e-14);
    }

    #[test]
    fn all_zero_instance() {
        let a = DualQuatMatrix::zeros(2, 3);
        let b = DualQuatMatrix::zeros(4, 2);
        let c = DualQuatMatrix::zeros(2, 2);
        let sol = solve_sylvester(&a, &b, &c, SolverConfig::default()).unwrap();
        let (x, y) = sol.instantiate(&FreeParams::Zero).unwrap();
        assert_eq!((x.shape(), y.shape()), ((3, 2), (2, 4)));
        assert_eq!(dq_norm(&x) + dq_norm(&y), 0.0);
        let (x, y) = sol.instantiate(&FreeParams::Random(1)).unwrap();
        assert!(dq_norm(&x) > 0.0 && dq_norm(&y) > 0.0);
        assert_eq!(sol.residual(&x, &y), 0.0);
    }

    #[test]
    fn zero_coefficients_nonzero_rhs() {
        let a = DualQuatMatrix::zeros(2, 2);
        let b = DualQuatMatrix::zeros(2, 2);
        let c = DualQuatMatrix::identity(2);
        let rep = check_sylvester(&a, &b, &c, SolverConfig::default()).unwrap();
        assert!(!rep.cond2_holds && !rep.cond3_holds && rep.agree);
        assert_eq!((rep.cond3[0].lhs, rep.cond3[0].rhs), (2, 0));
        assert!(matches!(
            solve_sylvester(&a, &b, &c, SolverConfig::default()),
            Err(Error::Unsolvable(_))
        ));
    }

    #[test]
    fn constructed_rank_deficient_round_trip() {
        let mut rng = SeedTree::new(31).rng("syl");
        let a = DualQuatMatrix::new(low_rank_grid(&mut rng, 5, 4, 3), grid_qmatrix(&mut rng, 5, 4)).unwrap();
        let b = DualQuatMatrix::new(low_rank_grid(&mut rng, 3, 4, 2), grid_qmatrix(&mut rng, 3, 4)).unwrap();
        let xs = grid_dq(&mut rng, 4, 4);
        let ys = grid_dq(&mut rng, 5, 3);
        let c = &(&a * &xs) - &(&ys * &b);
        let sol = solve_sylvester(&a, &b, &c, SolverConfig::default()).unwrap();
        assert!(sol.report.agree && sol.report.identities_hold);
        let bound = 1e-8 * (1.0 + dq_norm(&c));
        for seed in 0..10 {
            let (x, y) = sol.instantiate(&FreeParams::Random(seed)).unwrap();
            assert!(sol.residual(&x, &y) <= bound, "seed {seed}: {}", sol.residual(&x, &y));
        }
    }

    #[test]
    fn workspace_intermediates_recomputable() {
        let mut rng = SeedTree::new(8).rng("ws");
        let a = DualQuatMatrix::new(low_rank_grid(&mut rng, 4, 3, 2), grid_qmatrix(&mut rng, 4, 3)).unwrap();
        let b = grid_dq(&mut rng, 2, 3);
        let c = grid_dq(&mut rng, 4, 3);
        let ws = SylvesterWorkspace::new(&a, &b, &c, SolverConfig::default()).unwrap();
        let p = crate::quat::pinv;
        let (a0, a1, b0, b1, c0, c1) = (a.std(), a.inf(), b.std(), b.inf(), c.std(), c.inf());
        let l = |m: &QuatMatrix| crate::quat::proj_l(m).unwrap();
        let r = |m: &QuatMatrix| crate::quat::proj_r(m).unwrap();
        let close = |x: &QuatMatrix, y: &QuatMatrix| (x - y).frobenius_norm() <= 1e-12 * (1.0 + y.frobenius_norm());
        let a11 = a1 * &l(a0);
        let a2 = &r(a0) * &a11;
        let a4 = &r(&a2) * &r(a0);
        let a5 = -(&a4 * a1 * &p(a0).unwrap());
        let c4 = &a4 * (a1 * &p(a0).unwrap() * c0 + c0 * &p(b0).unwrap() * b1 - c1);
        let b2 = &r(b0) * b1;
        assert!(close(&ws.a11, &a11));
        assert!(close(&ws.a2, &a2));
        assert!(close(&ws.a3, &r(a0)));
        assert!(close(&ws.c3, &-(&r(a0) * c0)));
        assert!(close(&ws.b2, &b2));
        assert!(close(&ws.a4, &a4));
        assert!(close(&ws.a5, &a5));
        assert!(close(&ws.c4, &c4));
        assert!(close(&ws.a6, &(&r(&a4) * &a5)));
        assert!(close(&ws.c5, &(&r(&a4) * &c4)));
        assert!(close(&ws.b3, &(&b2 * &l(b0))));
        assert!(close(&ws.b4, &(&c4 * &l(b0))));
    }
}
