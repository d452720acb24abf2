//! Spectrogram exports for plotting elsewhere.
//!
//! `csv` writes one row per frame: the frame start time followed by one
//! column per bin, headed by bin frequencies. `pgm8` writes a binary PGM
//! with time along x and frequency increasing upwards. Both formats get a
//! `.json` sidecar describing axes, the dB mapping and any annotated
//! splice times.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsp::Spectrogram;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Csv,
    Pgm8,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Pgm8 => "pgm",
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Pgm8 => "pgm8",
        })
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "pgm8" | "pgm" => Ok(ExportFormat::Pgm8),
            other => Err(Error::invalid(format!("unknown export format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramExport {
    pub format: ExportFormat,
    /// Maps to pixel 0. Defaults to the spectrogram minimum.
    pub min_db: Option<f64>,
    /// Maps to pixel 255. Defaults to the spectrogram maximum.
    pub max_db: Option<f64>,
    /// Annotated splice times in seconds, copied to the sidecar.
    pub splice_times: Vec<f64>,
}

impl SpectrogramExport {
    pub fn new(format: ExportFormat) -> Self {
        Self {
            format,
            min_db: None,
            max_db: None,
            splice_times: Vec::new(),
        }
    }

    pub fn with_range(mut self, min_db: f64, max_db: f64) -> Self {
        self.min_db = Some(min_db);
        self.max_db = Some(max_db);
        self
    }

    pub fn with_splice_times(mut self, times: Vec<f64>) -> Self {
        self.splice_times = times;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: ExportFormat,
    pub num_frames: usize,
    pub num_bins: usize,
    pub sample_rate: u32,
    pub win_len: usize,
    pub hop: usize,
    pub frame_step_secs: f64,
    pub bin_hz: f64,
    pub min_db: f64,
    pub max_db: f64,
    pub floor_db: f64,
    /// `"time"` for pgm8 (columns are frames); `"frame_rows"` for csv.
    pub x_axis: String,
    pub y_axis: String,
    pub splice_times_secs: Vec<f64>,
}

/// Writes the export to `path` and its sidecar next to it, returning the
/// sidecar path.
pub fn export_spectrogram(spec: &Spectrogram, fmt: &SpectrogramExport, path: impl AsRef<Path>) -> Result<PathBuf> {
    let path = path.as_ref();
    let min_db = fmt.min_db.unwrap_or_else(|| spec.min_db());
    let max_db = fmt.max_db.unwrap_or_else(|| spec.max_db());
    if !(min_db.is_finite() && max_db.is_finite() && min_db <= max_db) {
        return Err(Error::invalid(format!("bad dB range [{min_db}, {max_db}]")));
    }
    let bytes = match fmt.format {
        ExportFormat::Csv => csv_bytes(spec),
        ExportFormat::Pgm8 => pgm_bytes(spec, min_db, max_db),
    };
    super::write_file(path, &bytes)?;

    let (x_axis, y_axis) = match fmt.format {
        ExportFormat::Csv => ("frame_rows", "bin_columns"),
        ExportFormat::Pgm8 => ("time", "frequency_upwards"),
    };
    let sidecar = Sidecar {
        format: fmt.format,
        num_frames: spec.num_frames(),
        num_bins: spec.num_bins(),
        sample_rate: spec.sample_rate(),
        win_len: spec.win_len(),
        hop: spec.hop(),
        frame_step_secs: spec.hop() as f64 / spec.sample_rate() as f64,
        bin_hz: spec.bin_hz(),
        min_db,
        max_db,
        floor_db: spec.floor_db(),
        x_axis: x_axis.into(),
        y_axis: y_axis.into(),
        splice_times_secs: fmt.splice_times.clone(),
    };
    let sidecar_path = path.with_extension(format!(
        "{}.json",
        path.extension().and_then(|e| e.to_str()).unwrap_or("export")
    ));
    let json = serde_json::to_vec_pretty(&sidecar).map_err(|source| Error::Json {
        path: sidecar_path.clone(),
        source,
    })?;
    super::write_file(&sidecar_path, &json)?;
    Ok(sidecar_path)
}

fn csv_bytes(spec: &Spectrogram) -> Vec<u8> {
    let mut s = String::from("time_s");
    for k in 0..spec.num_bins() {
        write!(s, ",{}", spec.bin_frequency(k)).unwrap();
    }
    s.push('\n');
    for (m, frame) in spec.frames().enumerate() {
        write!(s, "{}", spec.frame_start_secs(m)).unwrap();
        for v in frame {
            write!(s, ",{v}").unwrap();
        }
        s.push('\n');
    }
    s.into_bytes()
}

/// Linear map of `[min_db, max_db]` onto `0..=255`, clamped.
pub fn db_to_pixel(v: f64, min_db: f64, max_db: f64) -> u8 {
    if max_db <= min_db {
        return if v >= max_db { 255 } else { 0 };
    }
    let t = ((v - min_db) / (max_db - min_db)).clamp(0.0, 1.0);
    (t * 255.0).round() as u8
}

fn pgm_bytes(spec: &Spectrogram, min_db: f64, max_db: f64) -> Vec<u8> {
    let (w, h) = (spec.num_frames(), spec.num_bins());
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h);
    for k in (0..h).rev() {
        out.extend((0..w).map(|m| db_to_pixel(spec.get(k, m), min_db, max_db)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::AudioBuffer;
    use crate::dsp::{frame_count, make_window, stft_db, WindowKind, DEFAULT_FLOOR_DB};

    fn two_by_two() -> Spectrogram {
        Spectrogram::from_frames(vec![vec![-10.0, 0.0], vec![-20.0, 5.0]], 16000, 2, 1, DEFAULT_FLOOR_DB).unwrap()
    }

    #[test]
    fn csv_has_header_and_one_row_per_frame() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        export_spectrogram(&two_by_two(), &SpectrogramExport::new(ExportFormat::Csv), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "time_s,0,8000");
        assert_eq!(lines[2], "0.0000625,-20,5");
    }

    #[test]
    fn pgm_endpoints_and_orientation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.pgm");
        let fmt = SpectrogramExport::new(ExportFormat::Pgm8).with_range(-20.0, 5.0);
        let sidecar = export_spectrogram(&two_by_two(), &fmt, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        // top row is the highest bin
        assert_eq!(&bytes[header.len()..], &[204, 255, 102, 0]);
        let meta: Sidecar = serde_json::from_slice(&std::fs::read(sidecar).unwrap()).unwrap();
        assert_eq!(meta.min_db, -20.0);
        assert_eq!(meta.x_axis, "time");
    }

    #[test]
    fn pixel_mapping() {
        assert_eq!(db_to_pixel(-120.0, -120.0, 0.0), 0);
        assert_eq!(db_to_pixel(0.0, -120.0, 0.0), 255);
        assert_eq!(db_to_pixel(-500.0, -120.0, 0.0), 0);
        assert_eq!(db_to_pixel(40.0, -120.0, 0.0), 255);
        assert_eq!(db_to_pixel(-60.0, -120.0, 0.0), 128);
    }

    #[test]
    fn fig4_width_matches_frame_formula() {
        let n = 4 * 16000;
        let x = AudioBuffer::new((0..n).map(|i| (i as f64 * 0.01).sin()).collect(), 16000).unwrap();
        let w = make_window(WindowKind::HannPeriodic, 2048).unwrap();
        let spec = stft_db(&x, &w, 256, DEFAULT_FLOOR_DB).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fig4.pgm");
        export_spectrogram(&spec, &SpectrogramExport::new(ExportFormat::Pgm8), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let expected = (n - 2048) / 256 + 1;
        assert_eq!(expected, 243);
        assert_eq!(frame_count(n, 2048, 256), expected);
        let header = format!("P5\n{expected} 1025\n255\n");
        assert!(bytes.starts_with(header.as_bytes()));
        assert_eq!(bytes.len(), header.len() + expected * 1025);
    }

    #[test]
    fn exports_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        for f in [ExportFormat::Csv, ExportFormat::Pgm8] {
            let a = dir.path().join(format!("a.{}", f.extension()));
            let b = dir.path().join(format!("b.{}", f.extension()));
            let fmt = SpectrogramExport::new(f).with_splice_times(vec![0.5]);
            export_spectrogram(&two_by_two(), &fmt, &a).unwrap();
            export_spectrogram(&two_by_two(), &fmt, &b).unwrap();
            assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        }
    }
}
