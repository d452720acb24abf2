use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Full two-sided DFT, `X[k] = Σ x[n] e^{-2πikn/N}` (unnormalised).
pub fn dft_complex(frame: &[f64]) -> Result<Vec<Complex64>> {
    if frame.is_empty() {
        return Err(Error::invalid("cannot transform an empty frame"));
    }
    let fft = FftPlanner::new().plan_fft_forward(frame.len());
    let mut buf: Vec<Complex64> = frame.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft.process(&mut buf);
    Ok(buf)
}

/// One-sided magnitude spectrum: `len/2 + 1` bins from DC to Nyquist.
pub fn dft_magnitude(frame: &[f64]) -> Result<Vec<f64>> {
    if frame.len() < 2 {
        return Err(Error::invalid(format!(
            "frame must hold at least 2 samples, got {}",
            frame.len()
        )));
    }
    let mut analyzer = FrameAnalyzer::new(frame.len());
    let mut out = vec![0.0; frame.len() / 2 + 1];
    analyzer.magnitudes(frame, None, &mut out);
    Ok(out)
}

/// Reusable FFT plan and buffers for repeated frames of one length.
pub(crate) struct FrameAnalyzer {
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl FrameAnalyzer {
    pub(crate) fn new(len: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(len);
        let scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        Self {
            fft,
            buf: vec![Complex64::default(); len],
            scratch,
        }
    }

    /// Writes `|DFT(frame · window)|` for bins `0..=len/2` into `out`.
    pub(crate) fn magnitudes(&mut self, frame: &[f64], window: Option<&[f64]>, out: &mut [f64]) {
        debug_assert_eq!(frame.len(), self.buf.len());
        match window {
            Some(w) => {
                for ((b, &x), &w) in self.buf.iter_mut().zip(frame).zip(w) {
                    *b = Complex64::new(x * w, 0.0);
                }
            }
            None => {
                for (b, &x) in self.buf.iter_mut().zip(frame) {
                    *b = Complex64::new(x, 0.0);
                }
            }
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (o, c) in out.iter_mut().zip(&self.buf) {
            *o = c.norm();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Direct O(N²) evaluation of the DFT sum.
    fn naive_dft(x: &[f64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(t, &v)| {
                        let ang = -2.0 * PI * (k * t % n) as f64 / n as f64;
                        Complex64::new(v * ang.cos(), v * ang.sin())
                    })
                    .sum()
            })
            .collect()
    }

    fn sine(len: usize, f0: f64, fs: f64) -> Vec<f64> {
        (0..len).map(|n| (2.0 * PI * f0 * n as f64 / fs).sin()).collect()
    }

    fn db_below_peak(mags: &[f64]) -> Vec<f64> {
        let peak = mags.iter().cloned().fold(0.0, f64::max);
        mags.iter()
            .map(|m| 20.0 * (m / peak).max(1e-300).log10())
            .collect()
    }

    #[test]
    fn integer_periods_single_peak() {
        let mags = dft_magnitude(&sine(80, 800.0, 16000.0)).unwrap();
        assert_eq!(mags.len(), 41);
        let db = db_below_peak(&mags);
        let peak = mags
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(peak, 4);
        for (k, v) in db.iter().enumerate() {
            if k != 4 {
                assert!(*v <= -100.0, "bin {k} at {v} dB");
            }
        }
    }

    #[test]
    fn fractional_periods_leak() {
        let db = db_below_peak(&dft_magnitude(&sine(88, 800.0, 16000.0)).unwrap());
        let near = db.iter().filter(|v| **v > -40.0).count();
        assert!(near > 10, "{near} bins within 40 dB");
    }

    #[test]
    fn zeros_give_zeros() {
        assert!(dft_magnitude(&[0.0; 8]).unwrap().iter().all(|m| *m == 0.0));
    }

    #[test]
    fn empty_and_single_rejected() {
        assert!(dft_magnitude(&[]).is_err());
        assert!(dft_magnitude(&[1.0]).is_err());
        assert!(dft_complex(&[]).is_err());
    }

    #[test]
    fn matches_naive_sum() {
        let x: Vec<f64> = (0..37).map(|n| ((n * 7 % 11) as f64 - 5.0) / 5.0).collect();
        let fast = dft_complex(&x).unwrap();
        for (a, b) in fast.iter().zip(naive_dft(&x)) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    fn out_of_peak_fraction(x: &[f64], peak: usize) -> f64 {
        let spec = dft_complex(x).unwrap();
        let n = x.len();
        let total: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        let outside: f64 = spec
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != peak && *k != (n - peak) % n)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        outside / total
    }

    proptest! {
        #[test]
        fn rectangular_leakage_depends_on_period_count(
            periods in 1usize..8,
            period in 4usize..40,
            extra in 1usize..3
        ) {
            let fs = 16000.0;
            let f0 = fs / period as f64;
            let whole = sine(periods * period, f0, fs);
            prop_assert!(out_of_peak_fraction(&whole, periods) < 1e-10);
            // a window that ends part-way through a period
            let len = periods * period + extra;
            let cut = sine(len, f0, fs);
            let peak = ((f0 * len as f64 / fs).round() as usize).min(len / 2);
            prop_assert!(out_of_peak_fraction(&cut, peak) > 1e-3);
        }

        #[test]
        fn parseval(x in prop::collection::vec(-1.0f64..1.0, 2..300)) {
            let time: f64 = x.iter().map(|v| v * v).sum();
            let freq: f64 = dft_complex(&x).unwrap().iter().map(|c| c.norm_sqr()).sum::<f64>()
                / x.len() as f64;
            prop_assert!((time - freq).abs() <= 1e-9 * time.max(1e-300));
        }

        /// DFT(x·w) equals the circular convolution (1/N)·(X ⊛ W).
        #[test]
        fn windowing_is_spectral_convolution(
            x in prop::collection::vec(-1.0f64..1.0, 2..64),
            seed in 0u64..1000
        ) {
            let n = x.len();
            let w: Vec<f64> = (0..n).map(|i| ((i as u64 * 31 + seed) % 17) as f64 / 16.0).collect();
            let xw: Vec<f64> = x.iter().zip(&w).map(|(a, b)| a * b).collect();
            let lhs = naive_dft(&xw);
            let big_x = dft_complex(&x).unwrap();
            let big_w = dft_complex(&w).unwrap();
            let scale = lhs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-12);
            for k in 0..n {
                let conv: Complex64 = (0..n).map(|j| big_x[j] * big_w[(k + n - j) % n]).sum::<Complex64>()
                    / n as f64;
                prop_assert!((conv - lhs[k]).norm() <= 1e-9 * scale);
            }
        }
    }
}
