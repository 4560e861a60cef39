//! Netpbm image input and output (PBM `P1`/`P4`, PGM `P2`/`P5`).
//!
//! Gray values are compared against the threshold after scaling to `0..=255`,
//! so a 16-bit PGM and its 8-bit reduction give the same mask. PBM bits are
//! ink: a `1` pixel is object. PNG decoding is available with the `png`
//! feature.

use std::fs;
use std::path::{Path, PathBuf};

use crate::contour::BinaryMask;
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: u8 = 127;

/// Decoded single-channel raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<u16>,
}

impl GrayImage {
    /// Object where `value * 255 / maxval > threshold`.
    pub fn to_mask(&self, threshold: u8) -> Result<BinaryMask> {
        let max = u32::from(self.maxval);
        let t = u32::from(threshold);
        BinaryMask::new(self.width, self.height, self.pixels.iter().map(|&v| u32::from(v) * 255 > t * max).collect())
    }
}

fn format_error(reason: impl Into<String>) -> Error {
    Error::ImageFormat { path: PathBuf::new(), reason: reason.into() }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n' && c != b'\r') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format_error(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format_error(format!("{what} out of range")))
    }

    /// Consumes the single whitespace byte separating a binary header from
    /// its raster.
    fn raster(&mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(format_error("missing whitespace before raster")),
        }
    }
}

/// Parses a Netpbm bitmap or graymap.
pub fn decode(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(format_error("not a Netpbm file"));
    }
    let magic = bytes[1];
    if !matches!(magic, b'1' | b'2' | b'4' | b'5') {
        return Err(format_error(format!("unsupported Netpbm type P{}", magic as char)));
    }
    let mut r = Reader { bytes, pos: 2 };
    let width = r.number("width")?;
    let height = r.number("height")?;
    if width == 0 || height == 0 {
        return Err(format_error("zero image dimension"));
    }
    let count = width
        .checked_mul(height)
        .filter(|&c| c <= bytes.len().saturating_mul(8))
        .ok_or_else(|| format_error("image dimensions exceed file size"))?;
    let maxval = if matches!(magic, b'2' | b'5') {
        let m = r.number("maxval")?;
        if m == 0 || m > usize::from(u16::MAX) {
            return Err(format_error(format!("maxval {m} outside 1..=65535")));
        }
        m as u16
    } else {
        1
    };

    let pixels = match magic {
        b'1' => {
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                r.skip_space();
                match r.bytes.get(r.pos) {
                    Some(b'0') => out.push(0),
                    Some(b'1') => out.push(1),
                    Some(&b) => return Err(format_error(format!("invalid bitmap byte {:?}", b as char))),
                    None => return Err(format_error("truncated bitmap")),
                }
                r.pos += 1;
            }
            out
        }
        b'2' => (0..count)
            .map(|_| {
                let v = r.number("pixel value")?;
                if v > usize::from(maxval) {
                    return Err(format_error(format!("pixel value {v} exceeds maxval {maxval}")));
                }
                Ok(v as u16)
            })
            .collect::<Result<_>>()?,
        b'4' => {
            let raster = r.raster()?;
            let stride = width.div_ceil(8);
            if raster.len() < stride * height {
                return Err(format_error("truncated bitmap raster"));
            }
            let mut out = Vec::with_capacity(count);
            for row in raster.chunks(stride).take(height) {
                out.extend((0..width).map(|x| u16::from(row[x / 8] >> (7 - x % 8) & 1)));
            }
            out
        }
        _ => {
            let raster = r.raster()?;
            let wide = maxval > 255;
            let need = if wide { 2 * count } else { count };
            if raster.len() < need {
                return Err(format_error("truncated graymap raster"));
            }
            let out: Vec<u16> = if wide {
                raster[..need].chunks(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
            } else {
                raster[..need].iter().map(|&b| u16::from(b)).collect()
            };
            if let Some(v) = out.iter().find(|&&v| v > maxval) {
                return Err(format_error(format!("pixel value {v} exceeds maxval {maxval}")));
            }
            out
        }
    };
    Ok(GrayImage { width, height, maxval, pixels })
}

#[cfg(feature = "png")]
fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| format_error(e.to_string()))?
        .into_luma8();
    Ok(GrayImage {
        width: img.width() as usize,
        height: img.height() as usize,
        maxval: 255,
        pixels: img.into_raw().into_iter().map(u16::from).collect(),
    })
}

#[cfg(not(feature = "png"))]
fn decode_png(_bytes: &[u8]) -> Result<GrayImage> {
    Err(format_error("PNG input needs the `png` feature"))
}

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Reads an image file and thresholds it into a mask.
pub fn load_mask(path: impl AsRef<Path>, threshold: u8) -> Result<BinaryMask> {
    let path = path.as_ref();
    let with_path = |e: Error| match e {
        Error::ImageFormat { reason, .. } => Error::ImageFormat { path: path.to_path_buf(), reason },
        other => other,
    };
    let bytes = fs::read(path)?;
    let image = if bytes.starts_with(PNG_SIGNATURE) { decode_png(&bytes) } else { decode(&bytes) };
    image.and_then(|img| img.to_mask(threshold)).map_err(with_path)
}

/// Binary graymap with object pixels at 255.
pub fn encode_pgm(mask: &BinaryMask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width(), mask.height()).into_bytes();
    out.extend(mask.data().iter().map(|&b| if b { 255u8 } else { 0 }));
    out
}

/// Packed bitmap with object pixels set.
pub fn encode_pbm(mask: &BinaryMask) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", mask.width(), mask.height()).into_bytes();
    for row in mask.data().chunks(mask.width()) {
        for byte in row.chunks(8) {
            out.push(byte.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << (7 - i))));
        }
    }
    out
}

/// Writes a mask as PBM when the extension is `.pbm`, PGM otherwise.
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pbm")) {
        encode_pbm(mask)
    } else {
        encode_pgm(mask)
    };
    fs::write(path, bytes)?;
    Ok(())
}
