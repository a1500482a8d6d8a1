//! Randomized instance generators and the self-test suites built on them:
//! Penrose equations, the block rank identity, solver against oracle, and
//! hand-eye round trips.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::dualquat::{dq_norm, DualQuatMatrix};
use crate::error::{Error, Result};
use crate::handeye::{gen_handeye_instance, random_udq, solve_handeye_pair};
use crate::oracle::{oracle_check, OracleResult};
use crate::quat::{pinv, QuatMatrix};
use crate::random::{gaussian_qmatrix, grid_dq, grid_qmatrix, low_rank_grid, SeedTree};
use crate::solvers::{check_rank_identity, check_sylvester, SolverConfig, SylvesterReport};

/// Rank decisions whose singular values clear the threshold by less than
/// this factor are treated as unreliable.
pub const DEAD_ZONE_RANK_MARGIN: f64 = 10.0;
/// Residual tests closer than this many decades to their threshold are
/// treated as unreliable.
pub const DEAD_ZONE_DECADES: f64 = 2.0;

/// `rows x cols` grid matrix of rank `min(rows, cols) - deficit` (at least 0).
pub fn deficient_grid<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, deficit: usize) -> QuatMatrix {
    let r = rows.min(cols).saturating_sub(deficit);
    if r == 0 {
        QuatMatrix::zeros(rows, cols)
    } else {
        low_rank_grid(rng, rows, cols, r)
    }
}

/// A consistent `A X - Y B = C` built from a known `(X, Y)`.
#[derive(Debug, Clone)]
pub struct Constructed {
    pub a: DualQuatMatrix,
    pub b: DualQuatMatrix,
    pub c: DualQuatMatrix,
    pub x: DualQuatMatrix,
    pub y: DualQuatMatrix,
}

/// Dimensions in `2..=max_dim`; `A0` and `B0` lose 1 or 2 in rank.
pub fn constructed_instance(tree: &SeedTree, max_dim: usize) -> Constructed {
    let mut rng = tree.rng("constructed");
    let mut dim = || rng.random_range(2..=max_dim.max(2));
    let (n, k, l, m) = (dim(), dim(), dim(), dim());
    let (da, db) = (rng.random_range(1..=2), rng.random_range(1..=2));
    let a0 = deficient_grid(&mut rng, n, k, da);
    let b0 = deficient_grid(&mut rng, l, m, db);
    let a = DualQuatMatrix::new(a0, grid_qmatrix(&mut rng, n, k)).expect("shape");
    let b = DualQuatMatrix::new(b0, grid_qmatrix(&mut rng, l, m)).expect("shape");
    let x = grid_dq(&mut rng, k, m);
    let y = grid_dq(&mut rng, n, l);
    let c = &(&a * &x) - &(&y * &b);
    Constructed { a, b, c, x, y }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepKind {
    /// `C = A X - Y B`.
    Consistent,
    /// Random `C`.
    RandomRhs,
    /// Consistent standard part, random infinitesimal part.
    RandomInfinitesimal,
}

#[derive(Debug, Clone)]
pub struct SweepInstance {
    pub a: DualQuatMatrix,
    pub b: DualQuatMatrix,
    pub c: DualQuatMatrix,
    pub kind: SweepKind,
}

/// Mixed instances for the equivalence sweep: dimensions `1..=4`, standard
/// and infinitesimal parts independently full rank or deficient.
pub fn sweep_instance(tree: &SeedTree) -> SweepInstance {
    let mut rng = tree.rng("sweep");
    let mut dim = || rng.random_range(1..=4usize);
    let (n, k, l, m) = (dim(), dim(), dim(), dim());
    let part = |rng: &mut crate::random::DetRng, r: usize, c: usize| {
        let deficit = [0, 0, 1, 2][rng.random_range(0..4)];
        deficient_grid(rng, r, c, deficit)
    };
    let a = DualQuatMatrix::new(part(&mut rng, n, k), part(&mut rng, n, k)).expect("shape");
    let b = DualQuatMatrix::new(part(&mut rng, l, m), part(&mut rng, l, m)).expect("shape");
    let kind = [
        SweepKind::Consistent,
        SweepKind::RandomRhs,
        SweepKind::RandomInfinitesimal,
    ][rng.random_range(0..3)];
    let consistent = &(&a * &grid_dq(&mut rng, k, m)) - &(&grid_dq(&mut rng, n, l) * &b);
    let c = match kind {
        SweepKind::Consistent => consistent,
        SweepKind::RandomRhs => grid_dq(&mut rng, n, m),
        SweepKind::RandomInfinitesimal => {
            DualQuatMatrix::new(consistent.std().clone(), grid_qmatrix(&mut rng, n, m)).expect("shape")
        }
    };
    SweepInstance { a, b, c, kind }
}

/// Verdicts of the projector form, the rank form and the oracle.
#[derive(Debug, Clone)]
pub struct ThreeWay {
    pub report: SylvesterReport,
    pub oracle: OracleResult,
    pub dead_zone: bool,
}

impl ThreeWay {
    pub fn agree(&self) -> bool {
        self.report.cond2_holds == self.report.cond3_holds && self.report.cond2_holds == self.oracle.consistent
    }
}

pub fn three_way(a: &DualQuatMatrix, b: &DualQuatMatrix, c: &DualQuatMatrix, cfg: SolverConfig) -> Result<ThreeWay> {
    let report = check_sylvester(a, b, c, cfg)?;
    let oracle = oracle_check(a, b, c)?;
    let dead_zone = report.rank_margin() < DEAD_ZONE_RANK_MARGIN
        || report.projector_log_margin() < DEAD_ZONE_DECADES
        || oracle.log_margin() < DEAD_ZONE_DECADES;
    Ok(ThreeWay {
        report,
        oracle,
        dead_zone,
    })
}

/// Random matrix up to 20 x 15, full rank or deficient.
pub fn penrose_matrix(tree: &SeedTree) -> QuatMatrix {
    let mut rng = tree.rng("penrose");
    let rows = rng.random_range(1..=20);
    let cols = rng.random_range(1..=15);
    if rng.random_bool(0.5) {
        gaussian_qmatrix(&mut rng, rows, cols)
    } else {
        let r = rng.random_range(0..=rows.min(cols));
        if r == 0 {
            return QuatMatrix::zeros(rows, cols);
        }
        &gaussian_qmatrix(&mut rng, rows, r) * &gaussian_qmatrix(&mut rng, r, cols)
    }
}

/// `|A G A - A|`, `|G A G - G|`, `|(A G)* - A G|`, `|(G A)* - G A|`.
pub fn penrose_residuals(a: &QuatMatrix, g: &QuatMatrix) -> [f64; 4] {
    let ag = a * g;
    let ga = g * a;
    [
        (&ag * a - a).frobenius_norm(),
        (&ga * g - g).frobenius_norm(),
        (ag.conj_transpose() - &ag).frobenius_norm(),
        (ga.conj_transpose() - &ga).frobenius_norm(),
    ]
}

/// Blocks `(A, M, N, F, K)` of compatible random sizes up to 4.
pub fn rank_identity_blocks(tree: &SeedTree) -> [QuatMatrix; 5] {
    let mut rng = tree.rng("blocks");
    let mut dim = || rng.random_range(1..=4usize);
    let (p, q, s, u, t, v) = (dim(), dim(), dim(), dim(), dim(), dim());
    let block = |rng: &mut crate::random::DetRng, r: usize, c: usize| {
        let deficit = [0, 0, 1][rng.random_range(0..3)];
        deficient_grid(rng, r, c, deficit)
    };
    [
        block(&mut rng, p, q),
        block(&mut rng, p, s),
        block(&mut rng, u, q),
        block(&mut rng, t, s),
        block(&mut rng, u, v),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    /// Instances excluded as numerically ambiguous.
    pub skipped: usize,
    /// A numerical error aborted the suite.
    pub numerical_error: Option<String>,
    pub detail: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.numerical_error.is_none()
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{status}] {:<22} {} trials, {} failures",
            self.name, self.trials, self.failures
        )?;
        if self.skipped > 0 {
            write!(f, ", {} in dead zone", self.skipped)?;
        }
        if !self.detail.is_empty() {
            write!(f, "  ({})", self.detail)?;
        }
        if let Some(e) = &self.numerical_error {
            write!(f, "\n       numerical error: {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct SelftestOptions {
    /// Overrides every suite's default trial count.
    pub trials: Option<usize>,
    pub seed: u64,
    /// Make the first suite fail; exercises the failure path.
    pub force_failure: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn numerical_failure(&self) -> bool {
        self.suites.iter().any(|s| s.numerical_error.is_some())
    }
}

struct Tally {
    failures: usize,
    skipped: usize,
    worst: f64,
}

fn run_suite(
    name: &'static str,
    trials: usize,
    detail_label: &str,
    mut body: impl FnMut(usize, &mut Tally) -> Result<()>,
) -> SuiteResult {
    let mut t = Tally {
        failures: 0,
        skipped: 0,
        worst: 0.0,
    };
    let mut numerical_error = None;
    let mut first_error = None;
    for i in 0..trials {
        match body(i, &mut t) {
            Ok(()) => {}
            Err(Error::Numerical(e)) => {
                numerical_error = Some(format!("trial {i}: {e}"));
                break;
            }
            Err(e) => {
                t.failures += 1;
                first_error.get_or_insert_with(|| format!("; trial {i}: {e}"));
            }
        }
    }
    let mut detail = format!("{detail_label} {:.2e}", t.worst);
    detail.push_str(first_error.as_deref().unwrap_or(""));
    SuiteResult {
        name,
        trials,
        failures: t.failures,
        skipped: t.skipped,
        numerical_error,
        detail,
    }
}

pub fn penrose_suite(tree: &SeedTree, trials: usize) -> SuiteResult {
    run_suite("penrose", trials, "worst scaled residual", |i, t| {
        let a = penrose_matrix(&tree.indexed("penrose", i as u64));
        let g = pinv(&a)?;
        let scale = 1.0 + a.frobenius_norm();
        let worst = penrose_residuals(&a, &g).into_iter().fold(0.0, f64::max) / scale;
        let back = (pinv(&g)? - &a).frobenius_norm() / scale;
        t.worst = t.worst.max(worst);
        if worst > 1e-10 || back > 1e-9 {
            t.failures += 1;
        }
        Ok(())
    })
}

pub fn rank_identity_suite(tree: &SeedTree, trials: usize) -> SuiteResult {
    run_suite("block rank identity", trials, "largest rank gap", |i, t| {
        let [a, m, n, f, k] = rank_identity_blocks(&tree.indexed("rank", i as u64));
        let (lhs, rhs) = check_rank_identity(&a, &m, &n, &f, &k)?;
        t.worst = t.worst.max(lhs.abs_diff(rhs) as f64);
        if lhs != rhs {
            t.failures += 1;
        }
        Ok(())
    })
}

pub fn oracle_suite(tree: &SeedTree, trials: usize) -> SuiteResult {
    run_suite("solver vs oracle", trials, "dead-zone fraction", |i, t| {
        let inst = sweep_instance(&tree.indexed("sweep", i as u64));
        let tw = three_way(&inst.a, &inst.b, &inst.c, SolverConfig::default())?;
        if tw.dead_zone {
            t.skipped += 1;
        } else if !tw.agree() {
            t.failures += 1;
        }
        t.worst = t.skipped as f64 / (i + 1) as f64;
        Ok(())
    })
}

pub fn handeye_suite(tree: &SeedTree, trials: usize) -> SuiteResult {
    let mut rng = tree.rng("handeye-truth");
    let (x, y) = (random_udq(&mut rng), random_udq(&mut rng));
    let pairs = gen_handeye_instance(&x, &y, trials, 0.0, tree.child("handeye").seed());
    run_suite("hand-eye", trials, "worst residual", |i, t| {
        let (a, b) = &pairs[i];
        let s = solve_handeye_pair(a.as_matrix(), b.as_matrix(), i as u64)?;
        t.worst = t.worst.max(s.residual);
        if s.residual > 1e-8 {
            t.failures += 1;
        }
        Ok(())
    })
}

/// Run every suite. Trial counts default to 100, 50, 200 and 20.
pub fn run_selftest(opts: &SelftestOptions) -> SelftestReport {
    let tree = SeedTree::new(opts.seed);
    let n = |default: usize| opts.trials.unwrap_or(default);
    let mut suites = vec![
        penrose_suite(&tree.child("penrose"), n(100)),
        rank_identity_suite(&tree.child("rank"), n(50)),
        oracle_suite(&tree.child("oracle"), n(200)),
        handeye_suite(&tree.child("handeye"), n(20)),
    ];
    if opts.force_failure {
        suites[0].failures += 1;
        suites[0].detail.push_str("; failure forced");
    }
    SelftestReport { suites }
}

/// Residual of `A X - Y B - C` scaled by `1 + |C|`.
pub fn scaled_residual(
    a: &DualQuatMatrix,
    b: &DualQuatMatrix,
    c: &DualQuatMatrix,
    x: &DualQuatMatrix,
    y: &DualQuatMatrix,
) -> f64 {
    let lhs = &(a * x) - &(y * b);
    dq_norm(&(&lhs - c)) / (1.0 + dq_norm(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructed_is_consistent() {
        let inst = constructed_instance(&SeedTree::new(1), 5);
        assert_eq!(scaled_residual(&inst.a, &inst.b, &inst.c, &inst.x, &inst.y), 0.0);
    }

    #[test]
    fn deficient_rank() {
        let mut rng = SeedTree::new(2).rng("d");
        let m = deficient_grid(&mut rng, 4, 3, 1);
        assert_eq!(crate::quat::rank(&m).unwrap(), 2);
        assert!(deficient_grid(&mut rng, 1, 3, 2).is_zero());
    }

    #[test]
    fn small_selftest_passes_and_is_deterministic() {
        let opts = SelftestOptions {
            trials: Some(5),
            seed: 3,
            force_failure: false,
        };
        let r = run_selftest(&opts);
        assert!(r.passed(), "{:#?}", r.suites);
        let again = run_selftest(&opts);
        let show = |r: &SelftestReport| r.suites.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(show(&r), show(&again));
    }

    #[test]
    fn forced_failure() {
        let r = run_selftest(&SelftestOptions {
            trials: Some(1),
            seed: 0,
            force_failure: true,
        });
        assert!(!r.passed());
    }
}
