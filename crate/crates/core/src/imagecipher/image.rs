use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use image::codecs::pnm::{PnmDecoder, PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageDecoder, ImageEncoder};

use crate::error::{Error, Result};

/// An 8-bit RGB image, row-major, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl ColorImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != 3 * width * height {
            return Err(Error::Image(format!(
                "{} bytes for a {width}x{height} RGB image",
                data.len()
            )));
        }
        Ok(ColorImage { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(3 * width * height);
        for r in 0..height {
            for c in 0..width {
                data.extend_from_slice(&f(r, c));
            }
        }
        ColorImage { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let o = 3 * (row * self.width + col);
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    /// One channel as row-major `f64`.
    pub fn channel(&self, ch: usize) -> Vec<f64> {
        self.data.iter().skip(ch).step_by(3).map(|&v| v as f64).collect()
    }

    /// Largest per-channel absolute difference.
    pub fn max_abs_diff(&self, other: &ColorImage) -> Result<u8> {
        if self.dims() != other.dims() {
            return Err(Error::dims("image difference", self.dims(), other.dims()));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0))
    }

    /// Binary PPM (P6, maxval 255).
    pub fn to_ppm_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(self.data.len() + 32);
        PnmEncoder::new(&mut out)
            .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
            .write_image(
                &self.data,
                self.width as u32,
                self.height as u32,
                ExtendedColorType::Rgb8,
            )
            .map_err(|e| Error::Image(e.to_string()))?;
        Ok(out)
    }

    pub fn from_ppm_bytes(bytes: &[u8]) -> Result<Self> {
        let dec = PnmDecoder::new(bytes).map_err(|e| Error::Image(e.to_string()))?;
        Self::decode(dec)
    }

    fn decode<R: std::io::BufRead>(dec: PnmDecoder<R>) -> Result<Self> {
        if dec.subtype() != PnmSubtype::Pixmap(SampleEncoding::Binary) {
            return Err(Error::Image(format!(
                "expected binary PPM (P6), found {:?}",
                dec.subtype()
            )));
        }
        if dec.color_type() != image::ColorType::Rgb8 {
            return Err(Error::Image(format!(
                "expected maxval 255, decoded as {:?}",
                dec.color_type()
            )));
        }
        let (w, h) = dec.dimensions();
        let mut data = vec![0u8; dec.total_bytes() as usize];
        dec.read_image(&mut data).map_err(|e| Error::Image(e.to_string()))?;
        ColorImage::new(w as usize, h as usize, data)
    }
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<ColorImage> {
    let f = BufReader::new(File::open(path)?);
    let dec = PnmDecoder::new(f).map_err(|e| Error::Image(e.to_string()))?;
    ColorImage::decode(dec)
}

pub fn write_ppm(path: impl AsRef<Path>, img: &ColorImage) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(&img.to_ppm_bytes()?)?;
    f.flush()?;
    Ok(())
}
