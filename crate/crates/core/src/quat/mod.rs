//! Quaternions, dense quaternion matrices and their Moore-Penrose machinery.

mod adjoint;
mod io;
mod matrix;
mod pinv;
mod quaternion;
pub mod svd;

pub use adjoint::{complex_adjoint, from_adjoint, from_adjoint_with_tol, ComplexAdjoint, ADJOINT_SYMMETRY_TOL};
pub use io::{parse_qm, read_qm, to_qm_string, write_qm};
pub use matrix::{conj_transpose, qm_mul, QuatMatrix};
pub use pinv::{
    left_projector, pinv, pinv_derived, pinv_with, proj_l, proj_r, quat_singular_values, rank, rank_info,
    rank_info_derived, right_projector, Projected, RankInfo, RankTolerance,
};
pub use quaternion::{quat_mul, Quaternion};

pub(crate) use io::{content_lines, parse_header, read_body, write_body};
