//! Linear matrix equations over dual quaternions.
//!
//! The centerpiece is the generalized Sylvester equation `A X - Y B = C` with
//! dual quaternion matrices `A = A0 + A1 ε` etc. ([`solvers::solve_sylvester`]):
//! a projector-form and a rank-form solvability test, plus a closed-form
//! general solution parameterized by eight arbitrary quaternion matrices.
//! Around it sit the special cases `A X = B`, `Y B = C`, `A X = Y B`, the
//! quaternion kernels they reduce to, an independent real least-squares
//! oracle, a single-pair hand-eye demo and a two-image color cipher.

pub mod dualquat;
pub mod error;
pub mod handeye;
pub mod imagecipher;
pub mod oracle;
pub mod quat;
pub mod random;
pub mod selftest;
pub mod solvers;

pub use dualquat::{dq_add, dq_mul, dq_norm, DualQuatMatrix};
pub use error::{Error, Result};
pub use quat::{QuatMatrix, Quaternion};
