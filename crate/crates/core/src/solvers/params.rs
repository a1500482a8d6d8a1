use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{QuatMatrix, RankTolerance};
use crate::random::{gaussian_qmatrix, SeedTree};

/// Default relative tolerance for projector-form conditions and residuals.
pub const DEFAULT_SOLVER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub rank_tol: RankTolerance,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: DEFAULT_SOLVER_TOL,
            rank_tol: RankTolerance::Auto,
        }
    }
}

/// Values for the arbitrary matrices of a general solution.
#[derive(Debug, Clone, PartialEq)]
pub enum FreeParams {
    /// All zero: the canonical particular solution.
    Zero,
    /// Caller-supplied, in the solver's documented order.
    Given(Vec<QuatMatrix>),
    /// Standard normal entries from the `"free"` stream of this seed.
    Random(u64),
}

impl FreeParams {
    /// Draw every parameter from `rng`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, shapes: &[(usize, usize)]) -> FreeParams {
        FreeParams::Given(shapes.iter().map(|&(r, c)| gaussian_qmatrix(rng, r, c)).collect())
    }

    pub fn resolve(&self, shapes: &[(usize, usize)]) -> Result<Vec<QuatMatrix>> {
        match self {
            FreeParams::Zero => Ok(shapes.iter().map(|&(r, c)| QuatMatrix::zeros(r, c)).collect()),
            FreeParams::Random(seed) => {
                let mut rng = SeedTree::new(*seed).rng("free");
                Ok(shapes.iter().map(|&(r, c)| gaussian_qmatrix(&mut rng, r, c)).collect())
            }
            FreeParams::Given(ms) => {
                if ms.len() != shapes.len() {
                    return Err(Error::InvalidArgument(format!(
                        "expected {} free parameter matrices, got {}",
                        shapes.len(),
                        ms.len()
                    )));
                }
                for (m, &s) in ms.iter().zip(shapes) {
                    if m.shape() != s {
                        return Err(Error::dims("free parameter", s, m.shape()));
                    }
                }
                Ok(ms.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_modes() {
        let shapes = [(2, 3), (1, 1)];
        let z = FreeParams::Zero.resolve(&shapes).unwrap();
        assert!(z.iter().all(QuatMatrix::is_zero));
        let r1 = FreeParams::Random(5).resolve(&shapes).unwrap();
        let r2 = FreeParams::Random(5).resolve(&shapes).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1[0].shape(), (2, 3));
        assert!(FreeParams::Given(vec![QuatMatrix::zeros(2, 3)])
            .resolve(&shapes)
            .is_err());
        assert!(
            FreeParams::Given(vec![QuatMatrix::zeros(2, 3), QuatMatrix::zeros(2, 1)])
                .resolve(&shapes)
                .is_err()
        );
    }
}
