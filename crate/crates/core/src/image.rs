//! 8-bit RGB images and binary PPM (P6, maxval 255).

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// row-major RGB, `width * height * 3` bytes
    pub data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize) -> Self {
        Image {
            width,
            height,
            data: vec![0; width * height * 3],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [u8; 3]) -> Self {
        let mut img = Image::new(width, height);
        for y in 0..height {
            for x in 0..width {
                img.set(x, y, f(x, y));
            }
        }
        img
    }

    /// Checkerboard with square cells of `cell` texels.
    pub fn checker(width: usize, height: usize, cell: usize, a: [u8; 3], b: [u8; 3]) -> Self {
        let cell = cell.max(1);
        Image::from_fn(width, height, |x, y| if (x / cell + y / cell).is_multiple_of(2) { a } else { b })
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let k = (y * self.width + x) * 3;
        [self.data[k], self.data[k + 1], self.data[k + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, c: [u8; 3]) {
        let k = (y * self.width + x) * 3;
        self.data[k..k + 3].copy_from_slice(&c);
    }

    /// Nearest texel for texture coordinates in [0, 1], clamped at the border.
    pub fn texel(&self, u: f64, v: f64) -> [u8; 3] {
        let ix = (u * self.width as f64).floor();
        let iy = (v * self.height as f64).floor();
        let cx = ix.clamp(0.0, (self.width - 1) as f64) as usize;
        let cy = iy.clamp(0.0, (self.height - 1) as f64) as usize;
        self.get(cx, cy)
    }

    pub fn encode_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn decode_ppm(bytes: &[u8]) -> Result<Image> {
        if bytes.len() < 2 || &bytes[..2] != b"P6" {
            return Err(Error::BadMagic);
        }
        let mut pos = 2;
        let mut fields = [0usize; 3];
        for f in fields.iter_mut() {
            // whitespace and comments
            loop {
                match bytes.get(pos) {
                    Some(b'#') => {
                        while bytes.get(pos).is_some_and(|&c| c != b'\n') {
                            pos += 1;
                        }
                    }
                    Some(c) if c.is_ascii_whitespace() => pos += 1,
                    Some(_) => break,
                    None => return Err(Error::TruncatedData),
                }
            }
            let start = pos;
            while bytes.get(pos).is_some_and(|c| c.is_ascii_digit()) {
                pos += 1;
            }
            if start == pos {
                return Err(Error::BadMagic);
            }
            *f = std::str::from_utf8(&bytes[start..pos])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or(Error::BadMagic)?;
        }
        let [w, h, maxval] = fields;
        if maxval != 255 {
            return Err(Error::BadMagic);
        }
        // exactly one whitespace byte before the raster
        match bytes.get(pos) {
            Some(c) if c.is_ascii_whitespace() => pos += 1,
            _ => return Err(Error::TruncatedData),
        }
        let n = w.checked_mul(h).and_then(|p| p.checked_mul(3)).ok_or(Error::BadMagic)?;
        if bytes.len() - pos < n {
            return Err(Error::TruncatedData);
        }
        Ok(Image {
            width: w,
            height: h,
            data: bytes[pos..pos + n].to_vec(),
        })
    }

    pub fn read_ppm(path: &Path) -> Result<Image> {
        Image::decode_ppm(&std::fs::read(path)?)
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(&self.encode_ppm())?;
        f.flush()?;
        Ok(())
    }

    /// Count of pixels whose colour differs.
    pub fn diff_count(&self, other: &Image) -> usize {
        self.data
            .chunks(3)
            .zip(other.data.chunks(3))
            .filter(|(a, b)| a != b)
            .count()
    }
}
