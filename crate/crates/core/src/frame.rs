//! 84×84 grayscale frames and the binary PGM encoding shared by frames, canvases and heatmaps.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const FRAME_SIZE: usize = 84;
pub const FRAME_PIXELS: usize = FRAME_SIZE * FRAME_SIZE;

/// Row-major grayscale intensities, `pixels[y * 84 + x]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    pixels: Vec<u8>,
}

impl Frame {
    pub fn black() -> Self {
        Self {
            pixels: vec![0; FRAME_PIXELS],
        }
    }

    pub fn from_pixels(pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != FRAME_PIXELS {
            return Err(Error::Usage(format!(
                "frame needs {FRAME_PIXELS} pixels, got {}",
                pixels.len()
            )));
        }
        Ok(Self { pixels })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * FRAME_SIZE + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * FRAME_SIZE + x] = v;
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Fills the rectangle `[x0, x0+w) × [y0, y0+h)`, clipped to the frame.
    pub fn fill_rect(&mut self, x0: i32, y0: i32, w: i32, h: i32, v: u8) {
        let xs = x0.max(0)..(x0 + w).min(FRAME_SIZE as i32);
        let ys = y0.max(0)..(y0 + h).min(FRAME_SIZE as i32);
        for y in ys {
            for x in xs.clone() {
                self.set(x as usize, y as usize, v);
            }
        }
    }

    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        write_pgm(path, FRAME_SIZE, FRAME_SIZE, &self.pixels)
    }
}

impl std::fmt::Debug for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let lit = self.pixels.iter().filter(|&&p| p != 0).count();
        write!(f, "Frame(84x84, {lit} lit)")
    }
}

/// Binary PGM (P5, maxval 255).
pub fn encode_pgm(width: usize, height: usize, data: &[u8]) -> Vec<u8> {
    assert_eq!(data.len(), width * height, "pgm payload size");
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(data);
    out
}

pub fn write_pgm(path: &Path, width: usize, height: usize, data: &[u8]) -> Result<()> {
    let bytes = encode_pgm(width, height, data);
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))
}

/// Parses a P5 file with maxval 255, returning `(width, height, pixels)`.
pub fn decode_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::data(None, "truncated PGM header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    if fields[0] != "P5" {
        return Err(Error::data(None, format!("not a P5 file: {}", fields[0])));
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::data(None, format!("bad PGM header field {s:?}")))
    };
    let (w, h, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
    if maxval != 255 {
        return Err(Error::data(None, format!("unsupported maxval {maxval}")));
    }
    let raster = bytes
        .get(pos..pos + w * h)
        .ok_or_else(|| Error::data(None, "truncated PGM raster"))?;
    Ok((w, h, raster.to_vec()))
}
