use std::fs;
use std::path::Path;

use super::image::ColorImage;
use crate::dualquat::{dq_norm, read_dqm, write_dqm, DualQuatMatrix};
use crate::error::{Error, Result};
use crate::quat::{pinv, quat_singular_values, QuatMatrix, Quaternion};
use crate::random::{gaussian_dq, uniform_qmatrix, SeedTree};

/// Largest accepted condition number of `A0` and `B0`.
pub const MAX_CONDITION: f64 = 1e6;
/// Keygen attempts before giving up on the condition bound.
pub const KEYGEN_RETRIES: u64 = 16;
/// How far a decrypted entry may leave the plaintext domain.
pub const DOMAIN_TOL: f64 = 1e-6;
pub const MANIFEST_TAG: &str = "dqcipher-v1";

/// Entry `(r, c)` of the standard part is `(R i + G j + B k) / 255` of `img0`
/// at row `r`, column `c`; the infinitesimal part comes from `img1`.
pub fn encode_pair(img0: &ColorImage, img1: &ColorImage) -> Result<DualQuatMatrix> {
    if img0.dims() != img1.dims() {
        return Err(Error::dims("encode_pair", img0.dims(), img1.dims()));
    }
    DualQuatMatrix::new(encode_image(img0), encode_image(img1))
}

pub fn encode_image(img: &ColorImage) -> QuatMatrix {
    QuatMatrix::from_fn(img.height(), img.width(), |r, c| {
        let [red, green, blue] = img.pixel(r, c);
        Quaternion::pure(red as f64 / 255.0, green as f64 / 255.0, blue as f64 / 255.0)
    })
}

fn to_byte(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Imaginary parts scaled back to 8 bits, clamped and rounded.
pub fn decode_image(m: &QuatMatrix) -> ColorImage {
    ColorImage::from_fn(m.cols(), m.rows(), |r, c| {
        let q = m.get(r, c);
        [to_byte(q.x), to_byte(q.y), to_byte(q.z)]
    })
}

pub fn decode_pair(x: &DualQuatMatrix) -> (ColorImage, ColorImage) {
    (decode_image(x.std()), decode_image(x.inf()))
}

/// The fixed pair `(A, B)` shared by sender and receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct CipherBook {
    pub a: DualQuatMatrix,
    pub b: DualQuatMatrix,
    pub seed: u64,
}

impl CipherBook {
    /// `(n, m)`: plaintexts are `n x m`.
    pub fn dims(&self) -> (usize, usize) {
        (self.a.rows(), self.b.rows())
    }

    pub fn manifest(&self) -> String {
        let (n, m) = self.dims();
        format!("{MANIFEST_TAG} {} {n} {m}\n", self.seed)
    }

    /// `A.dqm`, `B.dqm` and `book.txt` in `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        write_dqm(dir.join("A.dqm"), &self.a)?;
        write_dqm(dir.join("B.dqm"), &self.b)?;
        fs::write(dir.join("book.txt"), self.manifest())?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let text = fs::read_to_string(dir.join("book.txt"))?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [tag, seed, n, m] = fields[..] else {
            return Err(Error::parse(1, "manifest needs four fields"));
        };
        if tag != MANIFEST_TAG {
            return Err(Error::parse(1, format!("unknown manifest tag {tag:?}")));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|e| Error::parse(1, format!("{s:?}: {e}")));
        let (seed, n, m) = (num(seed)?, num(n)? as usize, num(m)? as usize);
        let book = CipherBook {
            a: read_dqm(dir.join("A.dqm"))?,
            b: read_dqm(dir.join("B.dqm"))?,
            seed,
        };
        if book.a.shape() != (n, n) || book.b.shape() != (m, m) {
            return Err(Error::parse(1, "manifest dimensions disagree with A.dqm/B.dqm"));
        }
        Ok(book)
    }
}

/// `sigma_max / sigma_min`; infinite when singular.
pub fn condition_number(a: &QuatMatrix) -> Result<f64> {
    let s = quat_singular_values(a)?;
    let (hi, lo) = (s.first().copied().unwrap_or(0.0), s.last().copied().unwrap_or(0.0));
    Ok(if lo > 0.0 { hi / lo } else { f64::INFINITY })
}

fn conditioned_square(tree: &SeedTree, label: &str, n: usize) -> Result<DualQuatMatrix> {
    for attempt in 0..KEYGEN_RETRIES {
        let m = gaussian_dq(&mut tree.indexed(label, attempt).rng("entries"), n, n);
        if condition_number(m.std())? <= MAX_CONDITION {
            return Ok(m);
        }
    }
    Err(Error::Numerical(format!(
        "no {n}x{n} {label} with condition number <= {MAX_CONDITION:e} in {KEYGEN_RETRIES} attempts"
    )))
}

/// Book `(A, B)` with Gaussian entries and well-conditioned standard parts,
/// and a key `Y` with components uniform in `[-1, 1]`.
pub fn keygen(n: usize, m: usize, seed: u64) -> Result<(CipherBook, DualQuatMatrix)> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("cipher dimensions must be positive".into()));
    }
    let tree = SeedTree::new(seed);
    let a = conditioned_square(&tree, "A", n)?;
    let b = conditioned_square(&tree, "B", m)?;
    let mut rng = tree.rng("key");
    let y0 = uniform_qmatrix(&mut rng, n, m, -1.0, 1.0);
    let y1 = uniform_qmatrix(&mut rng, n, m, -1.0, 1.0);
    Ok((CipherBook { a, b, seed }, DualQuatMatrix::new(y0, y1)?))
}

/// A key made of two images instead of random values.
pub fn key_from_images(img0: &ColorImage, img1: &ColorImage) -> Result<DualQuatMatrix> {
    encode_pair(img0, img1)
}

fn check_shapes(book: &CipherBook, key: &DualQuatMatrix, other: &DualQuatMatrix, what: &'static str) -> Result<()> {
    if key.shape() != book.dims() {
        return Err(Error::dims("cipher key", book.dims(), key.shape()));
    }
    if other.shape() != book.dims() {
        return Err(Error::dims(what, book.dims(), other.shape()));
    }
    Ok(())
}

/// `C = A X - Y B`.
pub fn encrypt(x: &DualQuatMatrix, book: &CipherBook, key: &DualQuatMatrix) -> Result<DualQuatMatrix> {
    check_shapes(book, key, x, "plaintext")?;
    Ok(&(&book.a * x) - &(key * &book.b))
}

/// `X0 = A0^+ (C0 + Y0 B0)`, `X1 = A0^+ (C1 + Y0 B1 + Y1 B0 - A1 X0)`. With
/// `A0` invertible this is the unique solution, whatever the key.
pub fn decrypt_raw(c: &DualQuatMatrix, book: &CipherBook, key: &DualQuatMatrix) -> Result<DualQuatMatrix> {
    check_shapes(book, key, c, "ciphertext")?;
    let (a0, a1) = (book.a.std(), book.a.inf());
    let (b0, b1) = (book.b.std(), book.b.inf());
    let (y0, y1) = (key.std(), key.inf());
    let a0p = pinv(a0)?;
    let x0 = &a0p * (c.std() + y0 * b0);
    let x1 = &a0p * (c.inf() + y0 * b1 + y1 * b0 - a1 * &x0);
    DualQuatMatrix::new(x0, x1)
}

/// Largest distance of any entry from the plaintext domain: zero real part
/// and imaginary parts in `[0, 1]`.
pub fn plaintext_defect(x: &DualQuatMatrix) -> f64 {
    let outside = |v: f64| (-v).max(v - 1.0).max(0.0);
    x.std()
        .as_slice()
        .iter()
        .chain(x.inf().as_slice())
        .map(|q| q.w.abs().max(outside(q.x)).max(outside(q.y)).max(outside(q.z)))
        .fold(0.0, f64::max)
}

/// Decrypted plaintext plus the checks that accepted it.
#[derive(Debug, Clone)]
pub struct Decryption {
    pub x: DualQuatMatrix,
    /// `|A X - Y B - C|`
    pub residual: f64,
    pub defect: f64,
}

/// [`decrypt_raw`], rejecting results that do not solve the equation or do
/// not look like two images (the symptom of a wrong key or book).
pub fn decrypt(c: &DualQuatMatrix, book: &CipherBook, key: &DualQuatMatrix) -> Result<Decryption> {
    let x = decrypt_raw(c, book, key)?;
    let lhs = &(&book.a * &x) - &(key * &book.b);
    let residual = dq_norm(&(&lhs - c));
    if residual > 1e-8 * (1.0 + dq_norm(c)) {
        return Err(Error::Numerical(format!("decryption residual {residual:.3e}")));
    }
    let defect = plaintext_defect(&x);
    if defect > DOMAIN_TOL {
        return Err(Error::KeyMismatch(format!(
            "decrypted values leave the image domain by {defect:.3e}"
        )));
    }
    Ok(Decryption { x, residual, defect })
}
