use serde::{Deserialize, Serialize};

use super::dft::FrameAnalyzer;
use super::window::WindowFunction;
use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// dB value substituted for an exactly-zero magnitude.
pub const DEFAULT_FLOOR_DB: f64 = -300.0;

/// Number of whole frames of `win_len` samples at `hop` that fit in `len`
/// samples. Partial trailing frames are dropped.
pub fn frame_count(len: usize, win_len: usize, hop: usize) -> usize {
    if hop == 0 || len < win_len {
        0
    } else {
        (len - win_len) / hop + 1
    }
}

/// One-sided amplitude spectrogram in dB, `X_dB[k, m]`.
///
/// Frames are stored contiguously: [`Spectrogram::frame`] is a slice of
/// `num_bins` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrogram {
    values_db: Vec<f64>,
    num_bins: usize,
    num_frames: usize,
    sample_rate: u32,
    win_len: usize,
    hop: usize,
    floor_db: f64,
}

impl Spectrogram {
    /// Builds a spectrogram from explicit frame-major values, clamping to
    /// `floor_db`. Mostly useful for tests and for re-importing exports.
    pub fn from_frames(
        frames: Vec<Vec<f64>>,
        sample_rate: u32,
        win_len: usize,
        hop: usize,
        floor_db: f64,
    ) -> Result<Self> {
        let num_bins = win_len / 2 + 1;
        if frames.is_empty() {
            return Err(Error::invalid("spectrogram needs at least one frame"));
        }
        if win_len < 2 || hop == 0 || sample_rate == 0 {
            return Err(Error::invalid("win_len >= 2, hop >= 1 and sample_rate > 0 required"));
        }
        let num_frames = frames.len();
        let mut values_db = Vec::with_capacity(num_frames * num_bins);
        for (m, f) in frames.into_iter().enumerate() {
            if f.len() != num_bins {
                return Err(Error::invalid(format!(
                    "frame {m} has {} bins, expected {num_bins}",
                    f.len()
                )));
            }
            if f.iter().any(|v| v.is_nan()) {
                return Err(Error::invalid(format!("frame {m} contains NaN")));
            }
            values_db.extend(f.into_iter().map(|v| v.max(floor_db)));
        }
        Ok(Self {
            values_db,
            num_bins,
            num_frames,
            sample_rate,
            win_len,
            hop,
            floor_db,
        })
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    pub fn num_frames(&self) -> usize {
        self.num_frames
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn win_len(&self) -> usize {
        self.win_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn floor_db(&self) -> f64 {
        self.floor_db
    }

    /// Frequency resolution in Hz per bin.
    pub fn bin_hz(&self) -> f64 {
        self.sample_rate as f64 / self.win_len as f64
    }

    pub fn bin_frequency(&self, k: usize) -> f64 {
        k as f64 * self.bin_hz()
    }

    /// Start of frame `m` in seconds.
    pub fn frame_start_secs(&self, m: usize) -> f64 {
        (m * self.hop) as f64 / self.sample_rate as f64
    }

    pub fn get(&self, k: usize, m: usize) -> f64 {
        self.values_db[m * self.num_bins + k]
    }

    pub fn frame(&self, m: usize) -> &[f64] {
        &self.values_db[m * self.num_bins..(m + 1) * self.num_bins]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[f64]> {
        self.values_db.chunks_exact(self.num_bins)
    }

    pub fn min_db(&self) -> f64 {
        self.values_db.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_db(&self) -> f64 {
        self.values_db.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Short-time magnitude spectrum in dB (`20·log10|X|`, clamped at
/// `floor_db`). Frame `m` covers `[m·hop, m·hop + L)`; no zero padding.
pub fn stft_db(
    signal: &AudioBuffer,
    window: &WindowFunction,
    hop: usize,
    floor_db: f64,
) -> Result<Spectrogram> {
    if hop == 0 {
        return Err(Error::invalid("hop must be at least 1"));
    }
    if floor_db.is_nan() {
        return Err(Error::invalid("floor_db must be a number"));
    }
    let win_len = window.len();
    let x = signal.samples();
    let num_frames = frame_count(x.len(), win_len, hop);
    if num_frames == 0 {
        return Err(Error::EmptySpectrogram {
            len: x.len(),
            win_len,
        });
    }
    let num_bins = win_len / 2 + 1;
    let mut values_db = vec![0.0; num_frames * num_bins];
    let mut analyzer = FrameAnalyzer::new(win_len);
    for (m, out) in values_db.chunks_exact_mut(num_bins).enumerate() {
        let start = m * hop;
        analyzer.magnitudes(&x[start..start + win_len], Some(window.values()), out);
        for v in out.iter_mut() {
            *v = amplitude_db(*v, floor_db);
        }
    }
    Ok(Spectrogram {
        values_db,
        num_bins,
        num_frames,
        sample_rate: signal.sample_rate(),
        win_len,
        hop,
        floor_db,
    })
}

fn amplitude_db(mag: f64, floor_db: f64) -> f64 {
    if mag > 0.0 {
        (20.0 * mag.log10()).max(floor_db)
    } else {
        floor_db
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::window::{make_window, WindowKind};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tone(len: usize) -> AudioBuffer {
        AudioBuffer::new(
            (0..len)
                .map(|n| (2.0 * PI * 800.0 * n as f64 / 16000.0).sin())
                .collect(),
            16000,
        )
        .unwrap()
    }

    #[test]
    fn silence_sits_on_the_floor() {
        let x = AudioBuffer::new(vec![0.0; 400], 16000).unwrap();
        let w = make_window(WindowKind::HannPeriodic, 64).unwrap();
        let s = stft_db(&x, &w, 16, DEFAULT_FLOOR_DB).unwrap();
        assert!(s.frames().flatten().all(|v| *v == DEFAULT_FLOOR_DB));
    }

    #[test]
    fn periodic_tone_peaks_at_bin_four() {
        let w = make_window(WindowKind::Rectangular, 80).unwrap();
        let s = stft_db(&tone(1600), &w, 80, DEFAULT_FLOOR_DB).unwrap();
        assert_eq!(s.num_frames(), 20);
        for frame in s.frames() {
            let argmax = frame
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            assert_eq!(argmax, 4);
        }
    }

    #[test]
    fn partial_frames_are_dropped() {
        let w = make_window(WindowKind::HannPeriodic, 80).unwrap();
        let s = stft_db(&tone(100), &w, 10, DEFAULT_FLOOR_DB).unwrap();
        assert_eq!(s.num_frames(), 3);
        assert_eq!(s.num_bins(), 41);
        assert_eq!(s.bin_hz(), 200.0);
    }

    #[test]
    fn shorter_than_window_is_an_error() {
        let w = make_window(WindowKind::HannPeriodic, 80).unwrap();
        assert!(matches!(
            stft_db(&tone(79), &w, 10, DEFAULT_FLOOR_DB),
            Err(Error::EmptySpectrogram { len: 79, win_len: 80 })
        ));
        assert!(stft_db(&tone(200), &w, 0, DEFAULT_FLOOR_DB).is_err());
    }

    #[test]
    fn from_frames_clamps_and_validates() {
        let s = Spectrogram::from_frames(vec![vec![-500.0, 0.0]], 8000, 2, 1, -300.0).unwrap();
        assert_eq!(s.frame(0), &[-300.0, 0.0]);
        assert!(Spectrogram::from_frames(vec![vec![0.0]], 8000, 2, 1, -300.0).is_err());
    }

    proptest! {
        #[test]
        fn entries_bounded_below_by_floor(
            x in prop::collection::vec(-1.0f64..1.0, 64..400),
            hop in 1usize..40
        ) {
            let buf = AudioBuffer::new(x, 8000).unwrap();
            let w = make_window(WindowKind::HannPeriodic, 64).unwrap();
            let s = stft_db(&buf, &w, hop, -120.0).unwrap();
            prop_assert_eq!(s.num_frames(), frame_count(buf.len(), 64, hop));
            prop_assert!(s.frames().flatten().all(|v| v.is_finite() && *v >= -120.0));
        }

        /// Analysing a hop-aligned suffix reproduces the tail frames exactly.
        #[test]
        fn chunk_invariance(
            x in prop::collection::vec(-1.0f64..1.0, 200..600),
            hop in 4usize..32,
            skip in 0usize..5
        ) {
            let w = make_window(WindowKind::HannPeriodic, 64).unwrap();
            let full = stft_db(&AudioBuffer::new(x.clone(), 8000).unwrap(), &w, hop, -300.0).unwrap();
            let offset = skip * hop;
            prop_assume!(x.len() >= offset + 64);
            let tail = stft_db(&AudioBuffer::new(x[offset..].to_vec(), 8000).unwrap(), &w, hop, -300.0).unwrap();
            prop_assert_eq!(tail.num_frames(), full.num_frames() - skip);
            for m in 0..tail.num_frames() {
                prop_assert_eq!(tail.frame(m), full.frame(m + skip));
            }
        }
    }
}
