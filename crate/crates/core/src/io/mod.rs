//! File formats: WAV audio, corpus manifests, segment labels and
//! spectrogram exports. Readers reject anything structurally unexpected
//! with an error that names the file and location.

pub mod export;
pub mod labels;
pub mod manifest;
pub mod wav;

pub use export::{export_spectrogram, ExportFormat, SpectrogramExport};
pub use labels::{read_label_table, read_segment_labels, LabelDialect, SegmentClass, SegmentLabels};
pub use manifest::{read_manifest, write_manifest, Label, ManifestRow};
pub use wav::{read_wav, write_wav, WavEncoding, WavFormat};

use std::path::Path;

use crate::error::{Error, Result};

/// Writes `bytes` to `path`, creating parent directories.
pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
