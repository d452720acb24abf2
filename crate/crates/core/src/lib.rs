//! Training-free forensics for partially fake speech.
//!
//! Concatenating two recordings leaves a short broadband burst at the join:
//! the discontinuity spreads energy over every frequency bin of the STFT
//! frames that straddle it. Bands that normally carry no speech (the lowest
//! few bins of a 16 kHz recording, say) are quiet and flat in genuine audio,
//! so the burst shows up as a jump in their level. [`detector`] measures that
//! jump as the dynamic range of the band-averaged dB spectrogram.
//!
//! The crate is organised bottom-up:
//!
//! * [`dsp`]: windows, DFT magnitude, dB spectrograms, Butterworth filters.
//! * [`signal_lab`]: synthetic sinusoids, hard splices and speech-like hosts.
//! * [`forge`]: silence-anchored splicing with an overlap-add crossfade, and
//!   the low-band noise and high-pass post-processing used to hide it.
//! * [`detector`]: band averaging, dynamic range, dataset presets.
//! * [`eval`]: ROC, AUC and EER over scored corpora.
//! * [`io`]: WAV, manifests, segment-label dialects and spectrogram exports.
//!
//! ```
//! use splicescope::{signal_lab::{self, SinusoidSpec}, detector::{self, DetectorConfig}};
//!
//! let tone = SinusoidSpec::new(1000.0, 0.5, 0.0, 32_000, 16_000);
//! let clean = signal_lab::synth_sinusoid(&tone)?;
//! let flipped = signal_lab::synth_sinusoid(&SinusoidSpec { phase: std::f64::consts::PI, ..tone })?;
//! let (spliced, _) = signal_lab::splice_concat(&clean, &flipped)?;
//!
//! let cfg = DetectorConfig::partialspoof();
//! let d_clean = detector::score_track(&clean, &cfg)?.d;
//! let d_spliced = detector::score_track(&spliced, &cfg)?.d;
//! assert!(d_spliced > d_clean + 30.0);
//! # Ok::<(), splicescope::Error>(())
//! ```

pub mod audio;
pub mod detector;
pub mod dsp;
mod error;
pub mod eval;
pub mod forge;
pub mod io;
pub mod seed;
pub mod signal_lab;

pub use audio::AudioBuffer;
pub use error::{Error, Result};
