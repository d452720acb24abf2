//! Butterworth low/high-pass design as cascaded second-order sections.
//!
//! The analog prototype `|H(jΩ)|² = 1 / (1 + (Ω/Ωc)^{2N})` factors into
//! `s² + 2 sin θ_k s + 1` pairs (`θ_k = (2k+1)π / 2N`) plus one `s + 1` term
//! when `N` is odd. Each factor is mapped through the bilinear transform
//! with the cutoff prewarped to `K = tan(π fc / fs)`, so the digital filter
//! is exactly −3.01 dB at `fc`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    Lowpass,
    Highpass,
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterKind::Lowpass => "lowpass",
            FilterKind::Highpass => "highpass",
        })
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowpass" | "low" => Ok(FilterKind::Lowpass),
            "highpass" | "high" => Ok(FilterKind::Highpass),
            other => Err(Error::invalid(format!("unknown filter kind `{other}`"))),
        }
    }
}

/// One biquad, `(b0 + b1 z⁻¹ + b2 z⁻²) / (1 + a1 z⁻¹ + a2 z⁻²)`.
/// First-order sections have `b2 = a2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sos {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Sos {
    fn normalized(b: [f64; 3], a: [f64; 3]) -> Self {
        let a0 = a[0];
        Self {
            b0: b[0] / a0,
            b1: b[1] / a0,
            b2: b[2] / a0,
            a1: a[1] / a0,
            a2: a[2] / a0,
        }
    }

    fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        (self.b0 + self.b1 * z_inv + self.b2 * z2) / (1.0 + self.a1 * z_inv + self.a2 * z2)
    }

    /// Both roots of `z² + a1 z + a2` strictly inside the unit circle.
    pub fn is_stable(&self) -> bool {
        self.a2.abs() < 1.0 && self.a1.abs() < 1.0 + self.a2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IirFilter {
    kind: FilterKind,
    order: usize,
    cutoff_hz: f64,
    sample_rate: u32,
    sections: Vec<Sos>,
}

impl IirFilter {
    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cutoff_hz(&self) -> f64 {
        self.cutoff_hz
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn sections(&self) -> &[Sos] {
        &self.sections
    }

    pub fn is_stable(&self) -> bool {
        self.sections.iter().all(Sos::is_stable)
    }

    /// Complex frequency response at `freq_hz`.
    pub fn response(&self, freq_hz: f64) -> Complex64 {
        let w = 2.0 * PI * freq_hz / self.sample_rate as f64;
        let z_inv = Complex64::from_polar(1.0, -w);
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(z_inv))
    }

    pub fn gain_db(&self, freq_hz: f64) -> f64 {
        20.0 * self.response(freq_hz).norm().log10()
    }

    /// Runs the cascade over `x` from zero initial state (causal, one pass).
    pub fn filter_samples(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for s in &self.sections {
            // transposed direct form II
            let (mut z1, mut z2) = (0.0, 0.0);
            for v in y.iter_mut() {
                let input = *v;
                let out = s.b0 * input + z1;
                z1 = s.b1 * input - s.a1 * out + z2;
                z2 = s.b2 * input - s.a2 * out;
                *v = out;
            }
        }
        y
    }
}

pub fn design_butterworth(
    kind: FilterKind,
    order: usize,
    cutoff_hz: f64,
    sample_rate: u32,
) -> Result<IirFilter> {
    if order == 0 {
        return Err(Error::invalid("filter order must be at least 1"));
    }
    let nyquist = sample_rate as f64 / 2.0;
    if !(cutoff_hz > 0.0 && cutoff_hz < nyquist) {
        return Err(Error::invalid(format!(
            "cutoff {cutoff_hz} Hz must lie strictly between 0 and Nyquist ({nyquist} Hz)"
        )));
    }
    let k = (PI * cutoff_hz / sample_rate as f64).tan();
    let k2 = k * k;
    let mut sections = Vec::with_capacity(order.div_ceil(2));
    if order % 2 == 1 {
        let a = [1.0 + k, k - 1.0, 0.0];
        let b = match kind {
            FilterKind::Lowpass => [k, k, 0.0],
            FilterKind::Highpass => [1.0, -1.0, 0.0],
        };
        sections.push(Sos::normalized(b, a));
    }
    for pair in 0..order / 2 {
        let theta = PI * (2 * pair + 1) as f64 / (2 * order) as f64;
        let damping = 2.0 * theta.sin();
        let a = [
            1.0 + damping * k + k2,
            2.0 * (k2 - 1.0),
            1.0 - damping * k + k2,
        ];
        let b = match kind {
            FilterKind::Lowpass => [k2, 2.0 * k2, k2],
            FilterKind::Highpass => [1.0, -2.0, 1.0],
        };
        sections.push(Sos::normalized(b, a));
    }
    Ok(IirFilter {
        kind,
        order,
        cutoff_hz,
        sample_rate,
        sections,
    })
}

/// Filters `signal` with `filter`. The filter's design rate is not enforced
/// against the signal's; callers design for the rate they intend to run at.
pub fn apply_filter(filter: &IirFilter, signal: &AudioBuffer) -> AudioBuffer {
    let y = filter.filter_samples(signal.samples());
    AudioBuffer::new_allow_empty(y, signal.sample_rate())
        .expect("a stable filter maps finite input to finite output")
}
