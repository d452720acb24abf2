//! Corpus manifest: one CSV row per track.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    BonaFide,
    Spliced,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::BonaFide => "bona_fide",
            Label::Spliced => "spliced",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bona_fide" => Ok(Label::BonaFide),
            "spliced" => Ok(Label::Spliced),
            other => Err(Error::invalid(format!("unknown label `{other}`"))),
        }
    }
}

/// Column order is the on-disk order. Optional fields are empty cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    /// Relative to the manifest's directory unless absolute.
    pub path: String,
    pub label: Label,
    pub splice_sample: Option<usize>,
    pub source_a: Option<String>,
    pub source_b: Option<String>,
    pub ola_window: Option<usize>,
    pub noise_snr_db: Option<f64>,
    pub highpass: bool,
    pub seed: u64,
    pub peak_warning: bool,
}

impl ManifestRow {
    pub fn resolve(&self, manifest_dir: &Path) -> PathBuf {
        let p = Path::new(&self.path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            manifest_dir.join(p)
        }
    }
}

pub fn write_manifest(path: impl AsRef<Path>, rows: &[ManifestRow]) -> Result<()> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    if rows.is_empty() {
        w.write_record([
            "path",
            "label",
            "splice_sample",
            "source_a",
            "source_b",
            "ola_window",
            "noise_snr_db",
            "highpass",
            "seed",
            "peak_warning",
        ])
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?;
    super::write_file(path, &bytes)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(std::io::BufReader::new(file));
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?);
    }
    Ok(rows)
}
