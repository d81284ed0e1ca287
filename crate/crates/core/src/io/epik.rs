use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::atomic_write;
use crate::error::{Error, FormatError, Result};
use crate::numerics::{AcquisitionMeta, ComplexMatrix, Domain, KSpaceData};

pub const EPIK_MAGIC: [u8; 4] = *b"EPIK";
pub const EPIK_VERSION: u8 = 1;
pub const EPIK_HEADER_LEN: usize = 16;

// Header layout (little-endian):
//   0..4   magic "EPIK"
//   4      version
//   5      domain tag (0 kx/ky, 1 x/ky, 2 x/y)
//   6      reversal flag
//   7      reserved, zero
//   8..12  n_cols u32
//   12..16 n_rows u32
// followed by n_rows * n_cols (re f32, im f32) pairs, row-major.

/// Serializes k-space to EPIK bytes. Components are rounded to the nearest
/// f32; values outside the f32 range are rejected.
pub fn encode_epik(k: &KSpaceData) -> Result<Vec<u8>> {
    let m = k.matrix();
    let mut out = Vec::with_capacity(EPIK_HEADER_LEN + 8 * m.data().len());
    out.extend_from_slice(&EPIK_MAGIC);
    out.push(EPIK_VERSION);
    out.push(k.domain().tag());
    out.push(k.reversal_applied() as u8);
    out.push(0);
    let dim = |v: usize| {
        u32::try_from(v).map_err(|_| {
            Error::Format(FormatError::DimensionOverflow {
                n_cols: u32::MAX,
                n_rows: u32::MAX,
            })
        })
    };
    out.extend_from_slice(&dim(m.n_cols())?.to_le_bytes());
    out.extend_from_slice(&dim(m.n_rows())?.to_le_bytes());
    for (i, z) in m.data().iter().enumerate() {
        let (re, im) = (z.re as f32, z.im as f32);
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite(i));
        }
        out.extend_from_slice(&re.to_le_bytes());
        out.extend_from_slice(&im.to_le_bytes());
    }
    Ok(out)
}

/// Parses EPIK bytes. Metadata defaults unless a sidecar is read separately.
pub fn decode_epik(bytes: &[u8]) -> Result<KSpaceData> {
    if bytes.len() < EPIK_HEADER_LEN {
        if bytes.len() >= 4 && bytes[..4] != EPIK_MAGIC {
            return Err(FormatError::BadMagic(bytes[..4].try_into().unwrap()).into());
        }
        return Err(FormatError::Truncated {
            expected: EPIK_HEADER_LEN as u64,
            found: bytes.len() as u64,
        }
        .into());
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != EPIK_MAGIC {
        return Err(FormatError::BadMagic(magic).into());
    }
    if bytes[4] != EPIK_VERSION {
        return Err(FormatError::UnsupportedVersion(bytes[4]).into());
    }
    let domain = Domain::from_tag(bytes[5]).ok_or(FormatError::BadDomainTag(bytes[5]))?;
    let reversal_applied = match bytes[6] {
        0 => false,
        1 => true,
        other => return Err(FormatError::BadReserved(other).into()),
    };
    if bytes[7] != 0 {
        return Err(FormatError::BadReserved(bytes[7]).into());
    }
    let n_cols = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    let n_rows = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    let payload = (n_cols as u64)
        .checked_mul(n_rows as u64)
        .and_then(|n| n.checked_mul(8))
        .filter(|&n| usize::try_from(n).is_ok())
        .ok_or(FormatError::DimensionOverflow { n_cols, n_rows })?;
    let expected = EPIK_HEADER_LEN as u64 + payload;
    let found = bytes.len() as u64;
    if found < expected {
        return Err(FormatError::Truncated { expected, found }.into());
    }
    if found > expected {
        return Err(FormatError::TrailingBytes(found - expected).into());
    }
    let data = bytes[EPIK_HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes(c[0..4].try_into().unwrap());
            let im = f32::from_le_bytes(c[4..8].try_into().unwrap());
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    let matrix = ComplexMatrix::new(n_cols as usize, n_rows as usize, data)?;
    Ok(KSpaceData::new(
        matrix,
        domain,
        reversal_applied,
        AcquisitionMeta::default(),
    ))
}

pub fn read_epik(path: &Path) -> Result<KSpaceData> {
    decode_epik(&fs::read(path)?)
}

pub fn write_epik(k: &KSpaceData, path: &Path) -> Result<()> {
    atomic_write(path, &encode_epik(k)?)
}

/// `<path>.json`, next to the binary.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Reads the metadata sidecar if one exists.
pub fn read_sidecar(path: &Path) -> Result<Option<AcquisitionMeta>> {
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&side)?;
    let meta: AcquisitionMeta =
        serde_json::from_str(&text).map_err(|e| FormatError::Json(e.to_string()))?;
    meta.validate()?;
    Ok(Some(meta))
}

pub fn read_epik_with_sidecar(path: &Path) -> Result<(KSpaceData, bool)> {
    let mut k = read_epik(path)?;
    let meta = read_sidecar(path)?;
    let found = meta.is_some();
    if let Some(meta) = meta {
        k.meta = meta;
    }
    Ok((k, found))
}

pub fn write_epik_with_sidecar(k: &KSpaceData, path: &Path) -> Result<()> {
    let json = super::to_json_string(&k.meta)?;
    write_epik(k, path)?;
    atomic_write(&sidecar_path(path), json.as_bytes())
}
