//! One-sided (Hestenes) Jacobi SVD for dense complex matrices.
//!
//! Columns of a working copy of `A` are orthogonalized by plane rotations
//! accumulated into `V`, so that `A V = W` with mutually orthogonal columns.
//! Singular values are the column norms of `W`. The method is slow next to
//! bidiagonalization but delivers small singular values with high relative
//! accuracy, which the rank decisions downstream depend on.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// `A V = W` with orthogonal columns in `W`; `sigma[j] = |W[:, j]|`.
#[derive(Debug, Clone)]
pub struct JacobiSvd {
    pub w: DMatrix<Complex64>,
    pub v: DMatrix<Complex64>,
    pub sigma: Vec<f64>,
}

impl JacobiSvd {
    /// Decompose a matrix with at least as many rows as columns.
    pub fn new(a: &DMatrix<Complex64>) -> Result<Self> {
        let n = a.ncols();
        let mut w = a.clone();
        let mut v = DMatrix::<Complex64>::identity(n, n);
        // inner products of length-m columns carry ~m eps relative rounding
        let threshold = f64::EPSILON * a.nrows().max(1) as f64;
        // A column far below rounding level of the whole matrix is left alone:
        // rotating it against a large column only rescales it by ~eps.
        let negligible = (f64::EPSILON * f64::EPSILON * a.norm()).powi(2).max(f64::MIN_POSITIVE);

        let mut converged = n < 2;
        for _ in 0..MAX_SWEEPS {
            if converged {
                break;
            }
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let (alpha, beta, gamma) = column_gram(&w, p, q);
                    let g = gamma.norm();
                    if g == 0.0 || alpha.min(beta) <= negligible || g <= threshold * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    // Rotate column q's phase so that the cross term is real
                    // and positive, then apply the real Jacobi rotation.
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    rotate(&mut w, p, q, c, s, phase);
                    rotate(&mut v, p, q, c, s, phase);
                }
            }
            if !rotated {
                converged = true;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps ({}x{})",
                a.nrows(),
                n
            )));
        }
        let sigma = (0..n).map(|j| w.column(j).norm()).collect();
        Ok(JacobiSvd { w, v, sigma })
    }

    pub fn max_singular(&self) -> f64 {
        self.sigma.iter().copied().fold(0.0, f64::max)
    }
}

fn column_gram(w: &DMatrix<Complex64>, p: usize, q: usize) -> (f64, f64, Complex64) {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = Complex64::new(0.0, 0.0);
    let cp = w.column(p);
    let cq = w.column(q);
    for (a, b) in cp.iter().zip(cq.iter()) {
        alpha += a.norm_sqr();
        beta += b.norm_sqr();
        gamma += a.conj() * b;
    }
    (alpha, beta, gamma)
}

fn rotate(m: &mut DMatrix<Complex64>, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let unphase = phase.conj();
    for i in 0..m.nrows() {
        let a = m[(i, p)];
        let b = m[(i, q)] * unphase;
        m[(i, p)] = a * c - b * s;
        m[(i, q)] = a * s + b * c;
    }
}

/// Singular values of an arbitrary complex matrix, unordered.
pub fn singular_values(a: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if a.nrows() >= a.ncols() {
        Ok(JacobiSvd::new(a)?.sigma)
    } else {
        Ok(JacobiSvd::new(&a.adjoint())?.sigma)
    }
}
