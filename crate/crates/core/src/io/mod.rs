//! File formats: EPIK k-space containers with JSON metadata sidecars, PGM
//! and raw image exports, JSON reports and profile CSVs.
//!
//! Every writer goes through [`atomic_write`], so an output path either
//! holds the complete new file or is left untouched.

mod epik;
mod image;
mod report;

pub use epik::{
    decode_epik, encode_epik, read_epik, read_epik_with_sidecar, read_sidecar, sidecar_path,
    write_epik, write_epik_with_sidecar, EPIK_HEADER_LEN, EPIK_MAGIC, EPIK_VERSION,
};
pub use image::{
    encode_pgm, encode_raw_f64, export_image, parse_pgm, profiles_csv, read_image_input,
    ImageFormat,
};
pub use report::{
    baseline_from_json, pipeline_report_json, quality_report_json, to_json_string, MeasureJson,
    PipelineReportJson, QualityReportJson, SweepEntryJson, SweepReportJson,
};

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
