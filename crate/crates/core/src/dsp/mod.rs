//! Numerical substrate: windows, DFT magnitudes, dB spectrograms and
//! Butterworth IIR filters. Everything here is a pure function of its inputs.

pub mod dft;
pub mod iir;
pub mod stft;
pub mod window;

pub use dft::{dft_complex, dft_magnitude};
pub use iir::{apply_filter, design_butterworth, FilterKind, IirFilter, Sos};
pub use stft::{frame_count, stft_db, Spectrogram, DEFAULT_FLOOR_DB};
pub use window::{make_window, WindowFunction, WindowKind};

pub use rustfft::num_complex::Complex64;
