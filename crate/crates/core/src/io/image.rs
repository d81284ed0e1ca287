use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{atomic_write, decode_epik, EPIK_MAGIC};
use crate::error::{FormatError, Result};
use crate::metrics::{magnitude_profiles, ProfileAxis};
use crate::numerics::{ComplexMatrix, RealImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    /// 8-bit binary PGM scaled so the maximum maps to 255.
    Pgm,
    /// Row-major little-endian f64, no header.
    RawF64,
}

/// 8-bit P5 PGM, linearly scaled so the image maximum maps to 255 with
/// round-half-up. An all-zero image stays all zero.
pub fn encode_pgm(img: &RealImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.n_cols(), img.n_rows()).into_bytes();
    let max = img.max();
    out.extend(img.data().iter().map(|&v| {
        if max <= 0.0 {
            0u8
        } else {
            (v.max(0.0) / max * 255.0 + 0.5).floor().min(255.0) as u8
        }
    }));
    out
}

pub fn encode_raw_f64(img: &RealImage) -> Vec<u8> {
    img.data().iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn export_image(img: &RealImage, path: &Path, format: ImageFormat) -> Result<()> {
    let bytes = match format {
        ImageFormat::Pgm => encode_pgm(img),
        ImageFormat::RawF64 => encode_raw_f64(img),
    };
    atomic_write(path, &bytes)
}

/// Parses an 8-bit P5 PGM into an image of gray levels 0..=maxval.
pub fn parse_pgm(bytes: &[u8]) -> Result<RealImage> {
    let bad = |msg: &str| FormatError::Pgm(msg.to_string());
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(bad("missing P5 magic").into());
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad header field"))?;
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("header not terminated").into());
    }
    pos += 1;
    let [w, h, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(bad("only 8-bit PGM is supported").into());
    }
    let payload = &bytes[pos..];
    if payload.len() != w * h {
        return Err(bad("payload length does not match dimensions").into());
    }
    RealImage::new(w, h, payload.iter().map(|&b| b as f64).collect())
}

/// Loads a magnitude image from an EPIK file (reconstructed to image space
/// if needed) or a P5 PGM.
pub fn read_image_input(path: &Path) -> Result<RealImage> {
    let bytes = fs::read(path)?;
    if bytes.len() >= 4 && bytes[..4] == EPIK_MAGIC {
        return Ok(decode_epik(&bytes)?.to_image()?.magnitude());
    }
    if bytes.len() >= 2 && &bytes[..2] == b"P5" {
        return parse_pgm(&bytes);
    }
    Err(FormatError::UnknownInput.into())
}

/// One line per profile, comma-separated magnitudes.
pub fn profiles_csv(m: &ComplexMatrix, axis: ProfileAxis) -> String {
    let mut out = String::new();
    for profile in magnitude_profiles(m, axis) {
        for (i, v) in profile.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}
