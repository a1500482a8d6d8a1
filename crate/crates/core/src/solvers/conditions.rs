use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::quat::{rank_info, QuatMatrix, RankTolerance};

/// A projector-form condition `M = 0`, tested as `|M|_F <= tol (1 + scale)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub label: String,
    pub residual: f64,
    pub threshold: f64,
    pub holds: bool,
}

impl ConditionCheck {
    pub fn evaluate(label: impl Into<String>, product: &QuatMatrix, scale: f64, tol: f64) -> Self {
        let residual = product.frobenius_norm();
        let threshold = tol * (1.0 + scale);
        ConditionCheck {
            label: label.into(),
            residual,
            threshold,
            holds: residual <= threshold,
        }
    }

    /// Orders of magnitude between residual and threshold (positive when the
    /// verdict is clear by that many decades).
    pub fn log_margin(&self) -> f64 {
        let r = self.residual.max(f64::MIN_POSITIVE);
        (self.threshold / r).log10().abs()
    }
}

/// A rank-form condition `lhs == rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCondition {
    pub label: String,
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
    /// Worst [`crate::quat::RankInfo::margin`] over the ranks involved.
    pub margin: f64,
}

/// Accumulates ranks for one rank condition and tracks the worst margin.
pub(crate) struct RankTally {
    tol: RankTolerance,
    margin: f64,
}

impl RankTally {
    pub(crate) fn new(tol: RankTolerance) -> Self {
        RankTally {
            tol,
            margin: f64::INFINITY,
        }
    }

    pub(crate) fn rank(&mut self, m: &QuatMatrix) -> Result<usize> {
        let info = rank_info(m, self.tol)?;
        self.margin = self.margin.min(info.margin());
        Ok(info.rank)
    }

    pub(crate) fn finish(&mut self, label: impl Into<String>, lhs: usize, rhs: usize) -> RankCondition {
        let c = RankCondition {
            label: label.into(),
            lhs,
            rhs,
            holds: lhs == rhs,
            margin: self.margin,
        };
        self.margin = f64::INFINITY;
        c
    }
}

/// Both condition families for one equation, and whether they agree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvabilityReport {
    pub equation: String,
    pub projector: Vec<ConditionCheck>,
    pub rank: Vec<RankCondition>,
    pub projector_holds: bool,
    pub rank_holds: bool,
    pub agree: bool,
}

impl SolvabilityReport {
    pub fn new(equation: impl Into<String>, projector: Vec<ConditionCheck>, rank: Vec<RankCondition>) -> Self {
        let projector_holds = projector.iter().all(|c| c.holds);
        let rank_holds = rank.iter().all(|c| c.holds);
        SolvabilityReport {
            equation: equation.into(),
            projector,
            rank,
            projector_holds,
            rank_holds,
            agree: projector_holds == rank_holds,
        }
    }

    /// Projector residuals decide; rank jumps are only diagnostics.
    pub fn solvable(&self) -> bool {
        self.projector_holds
    }

    pub fn to_unsolvable(&self) -> Unsolvable {
        Unsolvable {
            equation: self.equation.clone(),
            failed: self.projector.iter().filter(|c| !c.holds).cloned().collect(),
            rank_failed: self.rank.iter().filter(|c| !c.holds).cloned().collect(),
        }
    }
}

impl fmt::Display for SolvabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "equation: {}", self.equation)?;
        for c in &self.projector {
            writeln!(
                f,
                "  [{}] {:<28} residual {:.3e} (threshold {:.3e})",
                if c.holds { "ok" } else { "FAIL" },
                c.label,
                c.residual,
                c.threshold
            )?;
        }
        for c in &self.rank {
            writeln!(
                f,
                "  [{}] {:<28} rank {} vs {}",
                if c.holds { "ok" } else { "FAIL" },
                c.label,
                c.lhs,
                c.rhs
            )?;
        }
        write!(
            f,
            "  projector form: {}, rank form: {}{}",
            verdict(self.projector_holds),
            verdict(self.rank_holds),
            if self.agree { "" } else { " (DISAGREE)" }
        )
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "solvable"
    } else {
        "unsolvable"
    }
}

/// Which conditions failed for an unsolvable instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Unsolvable {
    pub equation: String,
    pub failed: Vec<ConditionCheck>,
    pub rank_failed: Vec<RankCondition>,
}

impl fmt::Display for Unsolvable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.equation)?;
        for c in &self.failed {
            write!(f, "; {} residual {:.3e} > {:.3e}", c.label, c.residual, c.threshold)?;
        }
        for c in &self.rank_failed {
            write!(f, "; {} rank {} != {}", c.label, c.lhs, c.rhs)?;
        }
        Ok(())
    }
}
