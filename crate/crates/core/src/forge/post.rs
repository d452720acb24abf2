use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::dsp::{apply_filter, design_butterworth, FilterKind};
use crate::error::{Error, Result};
use crate::seed::{self, Stream};

pub const NOISE_LOWPASS_ORDER: usize = 7;
pub const NOISE_LOWPASS_HZ: f64 = 80.0;
pub const MITIGATION_HIGHPASS_ORDER: usize = 8;
pub const MITIGATION_HIGHPASS_HZ: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// `10·log10(P_signal / P_noise)` with both powers over the whole track
    /// and the noise measured after shaping.
    pub snr_db: f64,
    pub seed: u64,
}

/// Adds white noise shaped by a 7th-order 80 Hz Butterworth low-pass.
pub fn inject_lowband_noise(x: &AudioBuffer, spec: &NoiseSpec) -> Result<AudioBuffer> {
    if !spec.snr_db.is_finite() {
        return Err(Error::invalid(format!("SNR {} dB is not finite", spec.snr_db)));
    }
    let ps = x.power();
    if !(ps > 0.0) {
        return Err(Error::UndefinedSnr);
    }
    let mut rng = seed::rng(spec.seed, Stream::Noise);
    let white: Vec<f64> = (0..x.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let lp = design_butterworth(
        FilterKind::Lowpass,
        NOISE_LOWPASS_ORDER,
        NOISE_LOWPASS_HZ,
        x.sample_rate(),
    )?;
    let noise = lp.filter_samples(&white);
    let pn = noise.iter().map(|v| v * v).sum::<f64>() / noise.len() as f64;
    let gain = (ps / (pn * 10f64.powf(spec.snr_db / 10.0))).sqrt();
    let samples = x
        .samples()
        .iter()
        .zip(&noise)
        .map(|(s, n)| s + gain * n)
        .collect();
    AudioBuffer::new(samples, x.sample_rate())
}

/// 8th-order 100 Hz Butterworth high-pass.
pub fn highpass_mitigate(x: &AudioBuffer) -> Result<AudioBuffer> {
    let hp = design_butterworth(
        FilterKind::Highpass,
        MITIGATION_HIGHPASS_ORDER,
        MITIGATION_HIGHPASS_HZ,
        x.sample_rate(),
    )?;
    Ok(apply_filter(&hp, x))
}
