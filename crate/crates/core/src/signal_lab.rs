//! Synthetic signals for studying leakage and splicing artifacts.
//!
//! Three families live here:
//!
//! * pure sinusoids, with phase computed from the sample index so that an
//!   integer number of samples per period gives a bitwise periodic signal;
//! * two-segment concatenations (identical continuation, phase jump,
//!   amplitude step) together with their spectrograms;
//! * speech-like hosts: tone-plus-noise bursts separated by pauses over a
//!   quiet background, with nothing below ~80 Hz except a small DC offset.
//!   They stand in for real recordings when exercising the forging and
//!   detection pipeline end to end.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::dsp::{self, FilterKind, Spectrogram, WindowKind};
use crate::error::{Error, Result};
use crate::io::{self, WavEncoding};
use crate::seed::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidSpec {
    pub f0: f64,
    pub amplitude: f64,
    /// Radians.
    pub phase: f64,
    /// Number of samples to generate.
    pub duration: usize,
    pub sample_rate: u32,
    /// Index of the first generated sample on the sinusoid's own time axis.
    /// A non-zero offset continues an earlier segment without a phase jump.
    pub start_index: u64,
}

impl SinusoidSpec {
    pub fn new(f0: f64, amplitude: f64, phase: f64, duration: usize, sample_rate: u32) -> Self {
        Self {
            f0,
            amplitude,
            phase,
            duration,
            sample_rate,
            start_index: 0,
        }
    }

    /// Samples per period, `T = fs / f0`.
    pub fn period(&self) -> f64 {
        self.sample_rate as f64 / self.f0
    }

    fn validate(&self) -> Result<()> {
        let nyquist = self.sample_rate as f64 / 2.0;
        if !(self.f0 > 0.0 && self.f0 < nyquist) {
            return Err(Error::invalid(format!(
                "f0 = {} Hz must lie strictly between 0 and Nyquist ({nyquist} Hz)",
                self.f0
            )));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) || !self.phase.is_finite() {
            return Err(Error::invalid("amplitude must be finite and >= 0, phase finite"));
        }
        if self.duration == 0 {
            return Err(Error::invalid("duration must be at least one sample"));
        }
        Ok(())
    }

    /// Fraction of a cycle elapsed at absolute index `n`, in `[0, 1)`.
    fn cycle_fraction(&self, n: u64) -> f64 {
        let fs = self.sample_rate as u64;
        if self.f0.fract() == 0.0 && self.f0 < u64::MAX as f64 {
            // exact: (n·f0 mod fs) / fs
            let f0 = self.f0 as u64;
            ((n as u128 * f0 as u128) % fs as u128) as f64 / fs as f64
        } else {
            (n as f64 * self.f0 / fs as f64).fract()
        }
    }
}

/// `A·sin(2π f0 n / fs + φ)` for `n` in `start_index..start_index+duration`.
pub fn synth_sinusoid(spec: &SinusoidSpec) -> Result<AudioBuffer> {
    spec.validate()?;
    let samples = (0..spec.duration as u64)
        .map(|i| {
            let frac = spec.cycle_fraction(spec.start_index + i);
            spec.amplitude * (2.0 * PI * frac + spec.phase).sin()
        })
        .collect();
    AudioBuffer::new(samples, spec.sample_rate)
}

/// Butt-joins `x1` and `x2`. The returned index is the first sample of `x2`
/// (0-based; the 1-based convention calls it `N1 + 1`).
pub fn splice_concat(x1: &AudioBuffer, x2: &AudioBuffer) -> Result<(AudioBuffer, usize)> {
    if x1.sample_rate() != x2.sample_rate() {
        return Err(Error::invalid(format!(
            "sample rates differ: {} vs {}",
            x1.sample_rate(),
            x2.sample_rate()
        )));
    }
    let mut samples = Vec::with_capacity(x1.len() + x2.len());
    samples.extend_from_slice(x1.samples());
    samples.extend_from_slice(x2.samples());
    Ok((AudioBuffer::new(samples, x1.sample_rate())?, x1.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Second segment continues the first exactly.
    Identical,
    /// Same frequency and amplitude, phase jumps at the join.
    PhaseShift,
    /// Phase-continuous, amplitude steps at the join.
    AmplitudeChange,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Identical => "identical",
            Scenario::PhaseShift => "phase",
            Scenario::AmplitudeChange => "amplitude",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identical" | "a" => Ok(Scenario::Identical),
            "phase" | "phase_shift" | "b" => Ok(Scenario::PhaseShift),
            "amplitude" | "amplitude_change" | "c" => Ok(Scenario::AmplitudeChange),
            other => Err(Error::invalid(format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcatSpec {
    pub first: SinusoidSpec,
    pub second: SinusoidSpec,
    pub scenario: Scenario,
}

impl ConcatSpec {
    /// `base` for `n1` samples, then the same sinusoid continued for `n2`.
    pub fn identical(base: SinusoidSpec, n1: usize, n2: usize) -> Self {
        Self::continued(base, n1, n2, Scenario::Identical, 0.0, base.amplitude)
    }

    /// Continuation whose phase jumps by `delta` radians at the join.
    pub fn phase_shift(base: SinusoidSpec, n1: usize, n2: usize, delta: f64) -> Self {
        Self::continued(base, n1, n2, Scenario::PhaseShift, delta, base.amplitude)
    }

    /// Phase-continuous continuation at a new amplitude.
    pub fn amplitude_change(base: SinusoidSpec, n1: usize, n2: usize, amplitude: f64) -> Self {
        Self::continued(base, n1, n2, Scenario::AmplitudeChange, 0.0, amplitude)
    }

    fn continued(
        base: SinusoidSpec,
        n1: usize,
        n2: usize,
        scenario: Scenario,
        delta: f64,
        amplitude: f64,
    ) -> Self {
        let first = SinusoidSpec {
            duration: n1,
            ..base
        };
        let second = SinusoidSpec {
            duration: n2,
            start_index: base.start_index + n1 as u64,
            phase: base.phase + delta,
            amplitude,
            ..base
        };
        Self {
            first,
            second,
            scenario,
        }
    }
}

/// STFT settings for the demonstrations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    pub window: WindowKind,
    pub win_len: usize,
    pub hop: usize,
    pub floor_db: f64,
}

impl AnalysisSettings {
    pub fn new(window: WindowKind, win_len: usize, hop: usize) -> Self {
        Self {
            window,
            win_len,
            hop,
            floor_db: dsp::DEFAULT_FLOOR_DB,
        }
    }

    pub fn analyse(&self, x: &AudioBuffer) -> Result<Spectrogram> {
        let w = dsp::make_window(self.window, self.win_len)?;
        dsp::stft_db(x, &w, self.hop, self.floor_db)
    }
}

#[derive(Debug, Clone)]
pub struct DemoOutput {
    pub signal: AudioBuffer,
    pub spectrogram: Spectrogram,
    /// First sample of the second segment, when there is one.
    pub splice_point: Option<usize>,
}

/// A single sinusoid analysed with a rectangular window of `win_len` and a
/// hop of one window. Integer periods per window give one clean peak; a
/// fractional count smears energy into every bin.
pub fn leakage_demo(tone: &SinusoidSpec, win_len: usize) -> Result<DemoOutput> {
    let signal = synth_sinusoid(tone)?;
    let spectrogram =
        AnalysisSettings::new(WindowKind::Rectangular, win_len, win_len).analyse(&signal)?;
    Ok(DemoOutput {
        signal,
        spectrogram,
        splice_point: None,
    })
}

pub fn demo_scenario(spec: &ConcatSpec, analysis: &AnalysisSettings) -> Result<DemoOutput> {
    if spec.first.sample_rate != spec.second.sample_rate {
        return Err(Error::invalid("both segments must share a sample rate"));
    }
    let x1 = synth_sinusoid(&spec.first)?;
    let x2 = synth_sinusoid(&spec.second)?;
    let (signal, splice) = splice_concat(&x1, &x2)?;
    let spectrogram = analysis.analyse(&signal)?;
    Ok(DemoOutput {
        signal,
        spectrogram,
        splice_point: Some(splice),
    })
}

/// Per-frame energy outside bins `fundamental ± guard`, in dB
/// (`10·log10 Σ |X|²`, with `|X|²` recovered from the dB grid).
pub fn leakage_profile_db(spec: &Spectrogram, fundamental: usize, guard: usize) -> Vec<f64> {
    let lo = fundamental.saturating_sub(guard);
    let hi = fundamental + guard;
    spec.frames()
        .map(|frame| {
            let e: f64 = frame
                .iter()
                .enumerate()
                .filter(|(k, _)| *k < lo || *k > hi)
                .map(|(_, db)| 10f64.powf(db / 10.0))
                .sum();
            10.0 * e.max(f64::MIN_POSITIVE).log10()
        })
        .collect()
}

/// Frames that contain samples from both sides of `splice_point`.
pub fn frames_straddling(spec: &Spectrogram, splice_point: usize) -> Vec<usize> {
    (0..spec.num_frames())
        .filter(|&m| {
            let start = m * spec.hop();
            start < splice_point && splice_point < start + spec.win_len()
        })
        .collect()
}

/// Parameters of a speech-like synthetic host track.
///
/// Layout: leading silence, burst, pause, burst, trailing silence. The pause
/// is the only interior silence, so a silence detector anchors on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostSpec {
    pub sample_rate: u32,
    pub duration_secs: f64,
    /// Peak scale of the voiced bursts.
    pub speech_level: f64,
    /// Tone frequency range in Hz.
    pub tone_hz: (f64, f64),
    /// Burst noise band `(highpass, lowpass)` in Hz.
    pub noise_band_hz: (f64, f64),
    /// Background rumble band `(highpass, lowpass)` in Hz.
    pub background_band_hz: (f64, f64),
    /// Background level relative to `speech_level`, dB.
    pub background_db: f64,
    /// DC offset drawn uniformly from this range.
    pub dc_offset: (f64, f64),
    pub lead_secs: (f64, f64),
    pub first_burst_secs: (f64, f64),
    pub pause_secs: (f64, f64),
    pub trail_secs: (f64, f64),
    pub ramp_secs: f64,
}

impl Default for HostSpec {
    fn default() -> Self {
        Self {
            sample_rate: 16_000,
            duration_secs: 3.0,
            speech_level: 0.25,
            tone_hz: (400.0, 1000.0),
            noise_band_hz: (300.0, 4000.0),
            background_band_hz: (120.0, 300.0),
            background_db: -55.0,
            dc_offset: (0.0, 0.008),
            lead_secs: (0.15, 0.3),
            first_burst_secs: (0.8, 1.1),
            pause_secs: (0.3, 0.5),
            trail_secs: (0.15, 0.3),
            ramp_secs: 0.05,
        }
    }
}

/// Warm-up samples discarded from filtered noise so every host starts in
/// the filters' steady state.
const WARMUP: usize = 2000;

fn band_noise<R: Rng>(
    rng: &mut R,
    len: usize,
    band: (f64, f64),
    orders: (usize, usize),
    fs: u32,
) -> Result<Vec<f64>> {
    let white: Vec<f64> = (0..len + WARMUP).map(|_| rng.sample(StandardNormal)).collect();
    let hp = dsp::design_butterworth(FilterKind::Highpass, orders.0, band.0, fs)?;
    let lp = dsp::design_butterworth(FilterKind::Lowpass, orders.1, band.1, fs)?;
    let mut y = lp.filter_samples(&hp.filter_samples(&white));
    y.drain(..WARMUP);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let std = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len() as f64).sqrt();
    if std > 0.0 {
        y.iter_mut().for_each(|v| *v /= std);
    }
    Ok(y)
}

fn uniform<R: Rng>(rng: &mut R, range: (f64, f64)) -> f64 {
    if range.1 > range.0 {
        rng.random_range(range.0..range.1)
    } else {
        range.0
    }
}

/// Generates one speech-like host from `spec`, reproducibly from `seed`.
pub fn synth_speech_host(spec: &HostSpec, seed: u64) -> Result<AudioBuffer> {
    let fs = spec.sample_rate;
    let n = (spec.duration_secs * fs as f64).round() as usize;
    let secs = |s: f64| (s * fs as f64).round() as usize;
    let mut rng = seed::rng(seed, Stream::Host);

    let lead = secs(uniform(&mut rng, spec.lead_secs));
    let first = secs(uniform(&mut rng, spec.first_burst_secs));
    let pause = secs(uniform(&mut rng, spec.pause_secs));
    let trail = secs(uniform(&mut rng, spec.trail_secs));
    let ramp = secs(spec.ramp_secs).max(1);
    let second_start = lead + first + pause;
    if second_start + 2 * ramp + trail >= n || first < 2 * ramp {
        return Err(Error::invalid("host layout does not fit in the requested duration"));
    }

    let tone_hz = uniform(&mut rng, spec.tone_hz);
    let tone_phase = rng.random_range(0.0..2.0 * PI);
    let dc = uniform(&mut rng, spec.dc_offset);
    let burst_noise = band_noise(&mut rng, n, spec.noise_band_hz, (8, 4), fs)?;
    let background = band_noise(&mut rng, n, spec.background_band_hz, (8, 2), fs)?;

    let mut envelope = vec![0.0; n];
    for (start, end) in [(lead, lead + first), (second_start, n - trail)] {
        for (i, e) in envelope[start..end].iter_mut().enumerate() {
            let from_edge = i.min(end - start - 1 - i);
            *e = if from_edge < ramp {
                0.5 * (1.0 - (PI * from_edge as f64 / ramp as f64).cos())
            } else {
                1.0
            };
        }
    }

    let bg_gain = spec.speech_level * 10f64.powf(spec.background_db / 20.0);
    let samples = (0..n)
        .map(|i| {
            let t = 2.0 * PI * tone_hz * i as f64 / fs as f64 + tone_phase;
            let voiced = 0.7 * t.sin() + 0.5 * burst_noise[i];
            spec.speech_level * envelope[i] * voiced + bg_gain * background[i] + dc
        })
        .collect();
    AudioBuffer::new(samples, fs)
}

/// Writes `count` hosts to `dir` as `{prefix}_{i:05}.wav`, host `i` seeded
/// with `derive(seed, first_index + i)`. Returns the written paths.
pub fn write_hosts(
    dir: &Path,
    prefix: &str,
    count: usize,
    first_index: u64,
    spec: &HostSpec,
    seed: u64,
    encoding: WavEncoding,
) -> Result<Vec<PathBuf>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let x = synth_speech_host(spec, seed::derive(seed, first_index + i as u64))?;
            let path = dir.join(format!("{prefix}_{i:05}.wav"));
            io::write_wav(&path, &x, encoding)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(duration: usize) -> SinusoidSpec {
        SinusoidSpec::new(800.0, 1.0, 0.0, duration, 16000)
    }

    #[test]
    fn quarter_period_peak() {
        let x = synth_sinusoid(&tone(20)).unwrap();
        assert_eq!(x.samples()[0], 0.0);
        assert!((x.samples()[5] - 1.0).abs() < 1e-15);
        assert_eq!(tone(20).period(), 20.0);
    }

    #[test]
    fn integer_period_is_bitwise_periodic() {
        let x = synth_sinusoid(&tone(40)).unwrap();
        for n in 0..20 {
            assert_eq!(x.samples()[n].to_bits(), x.samples()[n + 20].to_bits());
        }
    }

    #[test]
    fn zero_amplitude_is_silent() {
        let x = synth_sinusoid(&SinusoidSpec { amplitude: 0.0, ..tone(64) }).unwrap();
        assert!(x.samples().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rejects_nyquist() {
        assert!(synth_sinusoid(&SinusoidSpec::new(8000.0, 1.0, 0.0, 10, 16000)).is_err());
        assert!(synth_sinusoid(&SinusoidSpec::new(0.0, 1.0, 0.0, 10, 16000)).is_err());
    }

    #[test]
    fn concat_lengths() {
        let a = AudioBuffer::new(vec![1.0; 3], 16000).unwrap();
        let b = AudioBuffer::new(vec![2.0; 2], 16000).unwrap();
        let (x, at) = splice_concat(&a, &b).unwrap();
        assert_eq!(x.len(), 5);
        assert_eq!(at, 3);
        assert_eq!(x.samples(), &[1.0, 1.0, 1.0, 2.0, 2.0]);
        let c = AudioBuffer::new(vec![2.0; 2], 8000).unwrap();
        assert!(splice_concat(&a, &c).is_err());
    }

    #[test]
    fn identical_scenario_equals_unspliced() {
        let spec = ConcatSpec::identical(tone(0), 810, 790);
        let settings = AnalysisSettings::new(WindowKind::Rectangular, 80, 20);
        let demo = demo_scenario(&spec, &settings).unwrap();
        let plain = settings.analyse(&synth_sinusoid(&tone(1600)).unwrap()).unwrap();
        assert_eq!(demo.signal.samples(), synth_sinusoid(&tone(1600)).unwrap().samples());
        assert_eq!(demo.spectrogram, plain);
    }

    fn splice_excess_db(spec: &ConcatSpec) -> (f64, f64) {
        let settings = AnalysisSettings::new(WindowKind::Rectangular, 80, 20);
        let demo = demo_scenario(spec, &settings).unwrap();
        let splice = demo.splice_point.unwrap();
        let leak = leakage_profile_db(&demo.spectrogram, 4, 1);
        let straddle = frames_straddling(&demo.spectrogram, splice);
        assert!(!straddle.is_empty());
        let at_splice = straddle.iter().map(|&m| leak[m]).fold(f64::MIN, f64::max);
        let elsewhere = (0..leak.len())
            .filter(|m| !straddle.contains(m))
            .map(|m| leak[m])
            .fold(f64::MIN, f64::max);
        (at_splice, elsewhere)
    }

    #[test]
    fn phase_jump_leaks_at_the_join() {
        let (at, elsewhere) = splice_excess_db(&ConcatSpec::phase_shift(tone(0), 810, 790, PI));
        assert!(at - elsewhere >= 20.0, "{at} vs {elsewhere}");
    }

    #[test]
    fn amplitude_step_leaks_at_the_join() {
        let (at, elsewhere) =
            splice_excess_db(&ConcatSpec::amplitude_change(tone(0), 810, 790, 0.5));
        assert!(at - elsewhere >= 20.0, "{at} vs {elsewhere}");
    }

    #[test]
    fn continuous_join_has_no_excess() {
        let (at, elsewhere) = splice_excess_db(&ConcatSpec::identical(tone(0), 810, 790));
        assert!(at - elsewhere < 1.0, "{at} vs {elsewhere}");
    }

    #[test]
    fn fig1_windows() {
        let t = tone(1760);
        let clean = leakage_demo(&t, 80).unwrap();
        let leaky = leakage_demo(&t, 88).unwrap();
        let clean_leak = leakage_profile_db(&clean.spectrogram, 4, 0);
        let leaky_leak = leakage_profile_db(&leaky.spectrogram, 4, 0);
        assert!(clean_leak.iter().all(|v| *v < -200.0));
        assert!(leaky_leak.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn hosts_are_reproducible_and_quiet_below_80hz() {
        let spec = HostSpec::default();
        let a = synth_speech_host(&spec, 11).unwrap();
        let b = synth_speech_host(&spec, 11).unwrap();
        let c = synth_speech_host(&spec, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 48000);
        assert!(a.peak() < 1.0);
        // Apart from DC, the 16-bin low band sits far below the speech bins.
        let s = AnalysisSettings::new(WindowKind::HannPeriodic, 4096, 1024)
            .analyse(&a)
            .unwrap();
        let mid = s.num_frames() / 4;
        let low: f64 = (2..16).map(|k| s.get(k, mid)).sum::<f64>() / 14.0;
        let speech = (100..200).map(|k| s.get(k, mid)).fold(f64::MIN, f64::max);
        assert!(speech - low > 100.0, "speech {speech} low {low}");
    }
}
