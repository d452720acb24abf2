//! Dynamic-range detector for induced splicing artifacts.
//!
//! A track is analysed into a dB spectrogram `X_dB[k, m]`; the rows in a
//! chosen band `F` are averaged per frame,
//!
//! ```text
//! v[m] = (1/|F|) Σ_{k∈F} X_dB[k, m]
//! ```
//!
//! and the score is `d = max(v) − min(v)`. Bands with no speech content are
//! flat in genuine audio; a splice injects a broadband burst that lifts one
//! or two frames and so widens `d`. Larger `d` means more likely spliced.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::dsp::{self, Spectrogram, WindowKind};
use crate::error::{Error, Result};

/// Which spectrogram rows form the band `F`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "bins", rename_all = "snake_case")]
pub enum BandSelection {
    /// Rows `0..n`.
    LowestN(usize),
    /// The top `n` rows, Nyquist included.
    HighestN(usize),
    Explicit(Vec<usize>),
}

impl BandSelection {
    /// Resolves to sorted, de-duplicated row indices for a spectrogram with
    /// `num_bins` rows.
    pub fn resolve(&self, num_bins: usize) -> Result<Vec<usize>> {
        let bins: Vec<usize> = match self {
            BandSelection::LowestN(n) => (0..*n).collect(),
            BandSelection::HighestN(n) => (num_bins.saturating_sub(*n)..num_bins).collect(),
            BandSelection::Explicit(list) => {
                let mut v = list.clone();
                v.sort_unstable();
                v.dedup();
                v
            }
        };
        if bins.is_empty() {
            return Err(Error::invalid("band selects no frequency bins"));
        }
        let needed = match self {
            BandSelection::LowestN(n) | BandSelection::HighestN(n) => *n,
            BandSelection::Explicit(_) => bins.last().map_or(0, |b| b + 1),
        };
        if needed > num_bins {
            return Err(Error::invalid(format!(
                "band needs {needed} bins but the spectrogram has {num_bins}"
            )));
        }
        Ok(bins)
    }
}

impl fmt::Display for BandSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandSelection::LowestN(n) => write!(f, "lowest:{n}"),
            BandSelection::HighestN(n) => write!(f, "highest:{n}"),
            BandSelection::Explicit(bins) => {
                let list: Vec<String> = bins.iter().map(|b| b.to_string()).collect();
                write!(f, "bins:{}", list.join(","))
            }
        }
    }
}

impl FromStr for BandSelection {
    type Err = Error;

    /// `lowest:16`, `highest:5` or `bins:0,1,2`.
    fn from_str(s: &str) -> Result<Self> {
        let (mode, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("band `{s}` is not mode:value")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("`{t}` is not a bin count or index")))
        };
        match mode {
            "lowest" => Ok(BandSelection::LowestN(num(arg)?)),
            "highest" => Ok(BandSelection::HighestN(num(arg)?)),
            "bins" => Ok(BandSelection::Explicit(
                arg.split(',').map(num).collect::<Result<_>>()?,
            )),
            other => Err(Error::invalid(format!("unknown band mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub window: WindowKind,
    pub win_len: usize,
    pub hop: usize,
    pub floor_db: f64,
    pub band: BandSelection,
    /// Frames dropped from each end of `v` before taking the range.
    #[serde(default)]
    pub trim_frames: usize,
}

impl DetectorConfig {
    /// Hann 4096, hop 1024, lowest 16 bins (below 62.5 Hz at 16 kHz).
    pub fn partialspoof() -> Self {
        Self {
            window: WindowKind::HannPeriodic,
            win_len: 4096,
            hop: 1024,
            floor_db: dsp::DEFAULT_FLOOR_DB,
            band: BandSelection::LowestN(16),
            trim_frames: 0,
        }
    }

    /// Hann 2048, hop 512, highest 5 bins (7968.75–8000 Hz at 16 kHz).
    pub fn had() -> Self {
        Self {
            window: WindowKind::HannPeriodic,
            win_len: 2048,
            hop: 512,
            floor_db: dsp::DEFAULT_FLOOR_DB,
            band: BandSelection::HighestN(5),
            trim_frames: 0,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "partialspoof" | "ps" => Ok(Self::partialspoof()),
            "had" => Ok(Self::had()),
            other => Err(Error::invalid(format!("unknown detector preset `{other}`"))),
        }
    }

    pub fn num_bins(&self) -> usize {
        self.win_len / 2 + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionScore {
    pub track_id: String,
    /// Band-averaged dB per frame.
    pub v: Vec<f64>,
    /// `max(v) − min(v)` over the (trimmed) frames, dB.
    pub d: f64,
    /// Frame holding `max(v)`; a coarse hint at where the splice is.
    pub argmax_frame: usize,
}

impl DetectionScore {
    pub fn frames(&self) -> usize {
        self.v.len()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.track_id = id.into();
        self
    }
}

pub fn band_average(spec: &Spectrogram, band: &BandSelection) -> Result<Vec<f64>> {
    let bins = band.resolve(spec.num_bins())?;
    let count = bins.len() as f64;
    Ok(spec
        .frames()
        .map(|frame| bins.iter().map(|&k| frame[k]).sum::<f64>() / count)
        .collect())
}

pub fn dynamic_range(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::invalid("dynamic range of an empty sequence"));
    }
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    Ok(hi - lo)
}

pub fn score_track(x: &AudioBuffer, cfg: &DetectorConfig) -> Result<DetectionScore> {
    let window = dsp::make_window(cfg.window, cfg.win_len)?;
    let spec = match dsp::stft_db(x, &window, cfg.hop, cfg.floor_db) {
        Err(Error::EmptySpectrogram { len, win_len }) => {
            return Err(Error::TooShort(format!(
                "{len} samples, detector window is {win_len}"
            )))
        }
        other => other?,
    };
    let v = band_average(&spec, &cfg.band)?;
    let t = cfg.trim_frames;
    if v.len() <= 2 * t {
        return Err(Error::TooShort(format!(
            "{} frames leave nothing after trimming {t} from each end",
            v.len()
        )));
    }
    let kept = &v[t..v.len() - t];
    let d = dynamic_range(kept)?;
    let argmax_frame = t + kept
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i);
    Ok(DetectionScore {
        track_id: String::new(),
        v,
        d,
        argmax_frame,
    })
}
