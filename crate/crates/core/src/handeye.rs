//! Single-pair hand-eye calibration `a x = y b` with unit dual quaternions,
//! solved as the 1x1 case of `A X = Y B`.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dualquat::{dq_norm, DualQuatMatrix};
use crate::error::{Error, Result};
use crate::quat::{QuatMatrix, Quaternion};
use crate::random::SeedTree;
use crate::solvers::{ax_eq_yb_family, FreeParams, SolverConfig};

/// Tolerance on the two unit constraints.
pub const UNIT_TOL: f64 = 1e-10;
/// Draws of the free parameters before giving up on an invertible `x`.
pub const RETRY_BUDGET: u64 = 32;
/// Smallest accepted `|x0|` for a draw to be normalized.
const MIN_STD_NORM: f64 = 1e-8;

/// `r + d eps` with `|r| = 1` and `<r, d> = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDualQuaternion {
    m: DualQuatMatrix,
}

fn scalar(q: Quaternion) -> QuatMatrix {
    QuatMatrix::filled(1, 1, q)
}

impl UnitDualQuaternion {
    pub fn new(r: Quaternion, d: Quaternion) -> Result<Self> {
        let norm_defect = (r.norm() - 1.0).abs();
        let ortho = r.dot(d).abs();
        if norm_defect > UNIT_TOL || ortho > UNIT_TOL {
            return Err(Error::Degenerate(format!(
                "not a unit dual quaternion: |r| - 1 = {norm_defect:.3e}, <r, d> = {ortho:.3e}"
            )));
        }
        Ok(UnitDualQuaternion {
            m: DualQuatMatrix::new(scalar(r), scalar(d))?,
        })
    }

    pub fn identity() -> Self {
        UnitDualQuaternion {
            m: DualQuatMatrix::identity(1),
        }
    }

    /// Accepts a 1x1 dual quaternion matrix satisfying the unit constraints.
    pub fn from_matrix(m: &DualQuatMatrix) -> Result<Self> {
        if m.shape() != (1, 1) {
            return Err(Error::dims("unit dual quaternion", (1, 1), m.shape()));
        }
        Self::new(m.std().get(0, 0), m.inf().get(0, 0))
    }

    /// Rescale an arbitrary `r + d eps` with `r != 0` onto the unit set.
    pub fn normalize(r: Quaternion, d: Quaternion) -> Result<Self> {
        let (alpha, beta) = inverse_dual_norm(r).ok_or_else(|| Error::Degenerate("zero standard part".into()))?;
        let r1 = r * alpha;
        let d1 = d * alpha + r * (beta * r.dot(d));
        // clean up the last ulps so the constraints hold to UNIT_TOL
        let r2 = r1 * (1.0 / r1.norm());
        let d2 = d1 - r2 * r2.dot(d1);
        Self::new(r2, d2)
    }

    pub fn real(&self) -> Quaternion {
        self.m.std().get(0, 0)
    }

    pub fn dual(&self) -> Quaternion {
        self.m.inf().get(0, 0)
    }

    pub fn as_matrix(&self) -> &DualQuatMatrix {
        &self.m
    }

    /// The inverse of a unit dual quaternion is its quaternion conjugate.
    pub fn inverse(&self) -> Self {
        UnitDualQuaternion {
            m: DualQuatMatrix::new(scalar(self.real().conj()), scalar(self.dual().conj())).expect("1x1"),
        }
    }

    pub fn mul(&self, other: &UnitDualQuaternion) -> UnitDualQuaternion {
        let (r, d) = (self.real(), self.dual());
        let (s, e) = (other.real(), other.dual());
        let rr = r * s;
        let dd = r * e + d * s;
        // products of unit elements are unit up to rounding
        Self::normalize(rr, dd).expect("product of unit dual quaternions")
    }

    /// Rotation axis, angle in `[0, pi]`, and translation.
    pub fn to_pose(&self) -> Pose {
        let r = self.real();
        let r = if r.w < 0.0 { -r } else { r };
        let v = [r.x, r.y, r.z];
        let s = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let angle = 2.0 * s.atan2(r.w);
        let axis = if s > 0.0 {
            [v[0] / s, v[1] / s, v[2] / s]
        } else {
            [0.0, 0.0, 1.0]
        };
        let t = (self.dual() * self.real().conj()) * 2.0;
        Pose {
            axis,
            angle,
            translation: [t.x, t.y, t.z],
        }
    }
}

impl fmt::Display for UnitDualQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({}) eps", self.real(), self.dual())
    }
}

/// `(alpha, beta)` with `1 / |r + d eps| = alpha - beta <r, d> eps`.
fn inverse_dual_norm(r: Quaternion) -> Option<(f64, f64)> {
    let n = r.norm();
    if n == 0.0 {
        return None;
    }
    Some((1.0 / n, -1.0 / (n * n * n)))
}

/// Screw-free description of a rigid motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub axis: [f64; 3],
    pub angle: f64,
    pub translation: [f64; 3],
}

/// `r = cos(angle/2) + sin(angle/2) axis`, `d = t r / 2`.
pub fn pose_to_udq(axis: [f64; 3], angle: f64, translation: [f64; 3]) -> Result<UnitDualQuaternion> {
    let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if (len - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "rotation axis has length {len}, expected 1"
        )));
    }
    let (s, c) = (angle / 2.0).sin_cos();
    let r = Quaternion::new(c, s * axis[0], s * axis[1], s * axis[2]);
    let t = Quaternion::pure(translation[0], translation[1], translation[2]);
    UnitDualQuaternion::new(r, (t * r) * 0.5)
}

/// A random rigid motion: uniform axis, angle in `[0, pi)`, Gaussian translation.
pub fn random_udq<R: Rng + ?Sized>(rng: &mut R) -> UnitDualQuaternion {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n < 1e-6 {
            continue;
        }
        let axis = [v[0] / n, v[1] / n, v[2] / n];
        let angle = rng.random_range(0.0..PI);
        let t: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        if let Ok(q) = pose_to_udq(axis, angle, t) {
            return q;
        }
    }
}

/// `count` pairs with `a = y b x^-1`, optionally perturbed by Gaussian noise
/// of standard deviation `noise` on all eight components of `a` and then
/// renormalized.
pub fn gen_handeye_instance(
    x: &UnitDualQuaternion,
    y: &UnitDualQuaternion,
    count: usize,
    noise: f64,
    seed: u64,
) -> Vec<(UnitDualQuaternion, UnitDualQuaternion)> {
    let tree = SeedTree::new(seed);
    let x_inv = x.inverse();
    (0..count as u64)
        .map(|i| {
            let mut rng = tree.indexed("pair", i).rng("motion");
            let b = random_udq(&mut rng);
            let a = y.mul(&b).mul(&x_inv);
            if noise == 0.0 {
                return (a, b);
            }
            let mut jitter =
                || Quaternion::from_array(std::array::from_fn(|_| noise * rng.sample::<f64, _>(StandardNormal)));
            let (r, d) = (a.real() + jitter(), a.dual() + jitter());
            let a = UnitDualQuaternion::normalize(r, d).expect("noise far below unit scale");
            (a, b)
        })
        .collect()
}

/// One solution of `a x = y b`, scaled onto the unit set.
#[derive(Debug, Clone)]
pub struct HandEyeSolution {
    pub x: UnitDualQuaternion,
    pub y: UnitDualQuaternion,
    pub residual: f64,
    /// Free-parameter draws consumed, including the accepted one.
    pub draws: u64,
}

pub fn handeye_residual(
    a: &UnitDualQuaternion,
    b: &UnitDualQuaternion,
    x: &UnitDualQuaternion,
    y: &UnitDualQuaternion,
) -> f64 {
    let lhs = a.as_matrix() * x.as_matrix();
    let rhs = y.as_matrix() * b.as_matrix();
    dq_norm(&(&lhs - &rhs))
}

/// Draw from the solution family of `a x = y b` until `x` has an invertible
/// standard part, then scale `x` and `y` by the same dual number so that `x`
/// is unit. For unit `a`, `b` this makes `y` unit as well and keeps the
/// equation exact.
pub fn solve_handeye_pair(a: &DualQuatMatrix, b: &DualQuatMatrix, seed: u64) -> Result<HandEyeSolution> {
    let (ua, ub) = match (UnitDualQuaternion::from_matrix(a), UnitDualQuaternion::from_matrix(b)) {
        (Ok(ua), Ok(ub)) => (ua, ub),
        (Err(e), _) | (_, Err(e)) => return Err(Error::Degenerate(format!("hand-eye input rejected: {e}"))),
    };
    let family = ax_eq_yb_family(a, b, SolverConfig::default())?;
    let tree = SeedTree::new(seed);
    for draw in 0..RETRY_BUDGET {
        let free = FreeParams::Random(tree.indexed("draw", draw).seed());
        let (x, y) = family.instantiate(&free)?;
        let (r, d) = (x.std().get(0, 0), x.inf().get(0, 0));
        if r.norm() < MIN_STD_NORM {
            continue;
        }
        let (alpha, beta) = inverse_dual_norm(r).expect("nonzero");
        let (yr, yd) = (y.std().get(0, 0), y.inf().get(0, 0));
        // multiply both by the dual scalar alpha + beta <r, d> eps
        let gamma = beta * r.dot(d);
        let scaled = |p: Quaternion, q: Quaternion| (p * alpha, q * alpha + p * gamma);
        let (xr, xd) = scaled(r, d);
        let (yr, yd) = scaled(yr, yd);
        let (Ok(xu), Ok(yu)) = (
            UnitDualQuaternion::normalize(xr, xd),
            UnitDualQuaternion::normalize(yr, yd),
        ) else {
            continue;
        };
        let residual = handeye_residual(&ua, &ub, &xu, &yu);
        return Ok(HandEyeSolution {
            x: xu,
            y: yu,
            residual,
            draws: draw + 1,
        });
    }
    Err(Error::Degenerate(format!(
        "no draw in {RETRY_BUDGET} gave an invertible standard part for x"
    )))
}
