//! Seeded sampling. Every random quantity in the crate is drawn from a
//! generator derived from one `u64` seed and a stream label, so runs are
//! reproducible bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dualquat::DualQuatMatrix;
use crate::quat::{QuatMatrix, Quaternion};

pub type DetRng = ChaCha8Rng;

/// Splittable seed: children and streams are keyed by label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    seed: u64,
}

impl SeedTree {
    pub fn new(seed: u64) -> Self {
        SeedTree { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn child(&self, label: &str) -> SeedTree {
        SeedTree {
            seed: splitmix64(self.seed ^ fnv1a(label)),
        }
    }

    pub fn indexed(&self, label: &str, index: u64) -> SeedTree {
        SeedTree {
            seed: splitmix64(self.child(label).seed.wrapping_add(splitmix64(index))),
        }
    }

    pub fn rng(&self, label: &str) -> DetRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(fnv1a(label));
        rng
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn gaussian_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    let mut g = || -> f64 { StandardNormal.sample(rng) };
    Quaternion::new(g(), g(), g(), g())
}

/// Standard normal components.
pub fn gaussian_qmatrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> QuatMatrix {
    QuatMatrix::from_fn(rows, cols, |_, _| gaussian_quaternion(rng))
}

/// Normal components rounded to multiples of 1/16. Short mantissas keep
/// products and sums of such matrices exact in double precision, so test
/// instances built from them have exactly the intended ranks.
pub fn grid_qmatrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> QuatMatrix {
    gaussian_qmatrix(rng, rows, cols).map(|q| {
        let r = |v: f64| (v * 16.0).round() / 16.0;
        Quaternion::new(r(q.w), r(q.x), r(q.y), r(q.z))
    })
}

/// Components uniform in `[lo, hi)`.
pub fn uniform_qmatrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, lo: f64, hi: f64) -> QuatMatrix {
    QuatMatrix::from_fn(rows, cols, |_, _| {
        Quaternion::new(
            rng.random_range(lo..hi),
            rng.random_range(lo..hi),
            rng.random_range(lo..hi),
            rng.random_range(lo..hi),
        )
    })
}

/// Product of grid factors with inner dimension `rank`; generically of
/// exactly that rank.
pub fn low_rank_grid<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, rank: usize) -> QuatMatrix {
    let left = grid_qmatrix(rng, rows, rank);
    let right = grid_qmatrix(rng, rank, cols);
    &left * &right
}

pub fn gaussian_dq<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DualQuatMatrix {
    let s = gaussian_qmatrix(rng, rows, cols);
    let i = gaussian_qmatrix(rng, rows, cols);
    DualQuatMatrix::new(s, i).expect("same shape")
}

pub fn grid_dq<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DualQuatMatrix {
    let s = grid_qmatrix(rng, rows, cols);
    let i = grid_qmatrix(rng, rows, cols);
    DualQuatMatrix::new(s, i).expect("same shape")
}
