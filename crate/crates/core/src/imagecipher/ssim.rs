use super::image::ColorImage;
use crate::error::{Error, Result};

pub const WINDOW: usize = 8;
const L: f64 = 255.0;
const C1: f64 = (0.01 * L) * (0.01 * L);
const C2: f64 = (0.03 * L) * (0.03 * L);

/// Mean SSIM of one channel over all `WINDOW x WINDOW` windows, stride 1,
/// uniform weights and population moments.
fn channel_ssim(x: &[f64], y: &[f64], width: usize, height: usize) -> f64 {
    let n = (WINDOW * WINDOW) as f64;
    let mut total = 0.0;
    let mut count = 0usize;
    for r0 in 0..=height - WINDOW {
        for c0 in 0..=width - WINDOW {
            let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for r in r0..r0 + WINDOW {
                for c in c0..c0 + WINDOW {
                    let (a, b) = (x[r * width + c], y[r * width + c]);
                    sx += a;
                    sy += b;
                    sxx += a * a;
                    syy += b * b;
                    sxy += a * b;
                }
            }
            let (mx, my) = (sx / n, sy / n);
            let vx = sxx / n - mx * mx;
            let vy = syy / n - my * my;
            let cxy = sxy / n - mx * my;
            let num = (2.0 * mx * my + C1) * (2.0 * cxy + C2);
            let den = (mx * mx + my * my + C1) * (vx + vy + C2);
            total += num / den;
            count += 1;
        }
    }
    total / count as f64
}

/// SSIM averaged over the three channels.
pub fn ssim(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    if reference.dims() != test.dims() {
        return Err(Error::dims("ssim", reference.dims(), test.dims()));
    }
    let (w, h) = reference.dims();
    if w < WINDOW || h < WINDOW {
        return Err(Error::InvalidArgument(format!(
            "ssim needs at least {WINDOW}x{WINDOW} pixels, got {w}x{h}"
        )));
    }
    let sum: f64 = (0..3)
        .map(|ch| channel_ssim(&reference.channel(ch), &test.channel(ch), w, h))
        .sum();
    Ok(sum / 3.0)
}
