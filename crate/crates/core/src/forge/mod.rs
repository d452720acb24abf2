//! Partially fake tracks: cut two hosts at their longest interior silence,
//! crossfade with Hann halves, then optionally post-process.

mod corpus;
mod post;
mod vad;

pub use corpus::{generate_corpus, table2_grid, CorpusPlan, CorpusSummary, GridConfig};
pub use post::{
    highpass_mitigate, inject_lowband_noise, NoiseSpec, MITIGATION_HIGHPASS_HZ, MITIGATION_HIGHPASS_ORDER,
    NOISE_LOWPASS_HZ, NOISE_LOWPASS_ORDER,
};
pub use vad::{find_longest_silence, SilentRegion, VadConfig};

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::dsp::{make_window, WindowKind};
use crate::error::{Error, Result};
use crate::io::Label;
use crate::seed::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceRole {
    Real,
    Fake,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceRef {
    pub id: String,
    pub role: SourceRole,
}

impl fmt::Display for SourceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let role = match self.role {
            SourceRole::Real => "real",
            SourceRole::Fake => "fake",
        };
        write!(f, "{role}:{}", self.id)
    }
}

/// A host track together with its provenance.
#[derive(Debug, Clone, Copy)]
pub struct Source<'a> {
    pub id: &'a str,
    pub role: SourceRole,
    pub audio: &'a AudioBuffer,
}

impl Source<'_> {
    fn to_ref(self) -> SourceRef {
        SourceRef {
            id: self.id.to_string(),
            role: self.role,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpliceRecord {
    /// Host of the first segment.
    pub source_a: SourceRef,
    /// Host of the second segment.
    pub source_b: SourceRef,
    /// Centre of the crossfade.
    pub splice_sample: usize,
    pub ola_window: usize,
    pub noise_snr_db: Option<f64>,
    pub highpass_applied: bool,
    pub rng_seed: u64,
    pub label: Label,
    /// Some sample left `[-1, 1]`; nothing was clipped.
    pub peak_warning: bool,
}

/// Overlap-adds the tail of `first` and the head of `second` over
/// `ola_window / 2` samples, returning the output and the overlap centre.
pub fn crossfade(first: &[f64], second: &[f64], ola_window: usize, sample_rate: u32) -> Result<(AudioBuffer, usize)> {
    if ola_window < 2 || ola_window % 2 != 0 {
        return Err(Error::invalid(format!("OLA window {ola_window} must be even and >= 2")));
    }
    let h = ola_window / 2;
    if first.len() <= h || second.len() <= h {
        return Err(Error::TooShort(format!(
            "segments of {} and {} samples cannot take a {h}-sample crossfade",
            first.len(),
            second.len()
        )));
    }
    let w = make_window(WindowKind::HannPeriodic, ola_window)?;
    let (fade_in, fade_out) = w.values().split_at(h);
    let keep = first.len() - h;
    let mut out = Vec::with_capacity(first.len() + second.len() - h);
    out.extend_from_slice(&first[..keep]);
    out.extend(
        first[keep..]
            .iter()
            .zip(fade_out)
            .zip(second.iter().zip(fade_in))
            .map(|((a, wa), (b, wb))| a * wa + b * wb),
    );
    out.extend_from_slice(&second[h..]);
    Ok((AudioBuffer::new(out, sample_rate)?, keep + h / 2))
}

/// Forges one spliced track from two hosts. A coin flip drawn from `seed`
/// decides which host supplies the first segment.
pub fn forge_splice(
    host_a: Source<'_>,
    host_b: Source<'_>,
    ola_window: usize,
    cfg: &VadConfig,
    seed: u64,
) -> Result<(AudioBuffer, SpliceRecord)> {
    let fs = host_a.audio.sample_rate();
    if host_b.audio.sample_rate() != fs {
        return Err(Error::invalid(format!(
            "sample rates differ: {} vs {} Hz",
            fs,
            host_b.audio.sample_rate()
        )));
    }
    let swap = seed::rng(seed, Stream::CoinFlip).random_bool(0.5);
    let (first, second) = if swap { (host_b, host_a) } else { (host_a, host_b) };
    let r1 = find_longest_silence(first.audio, cfg)?;
    let r2 = find_longest_silence(second.audio, cfg)?;
    let seg1 = &first.audio.samples()[..r1.end];
    let seg2 = &second.audio.samples()[r2.start..];
    let (out, splice_sample) = crossfade(seg1, seg2, ola_window, fs)?;
    let record = SpliceRecord {
        source_a: first.to_ref(),
        source_b: second.to_ref(),
        splice_sample,
        ola_window,
        noise_snr_db: None,
        highpass_applied: false,
        rng_seed: seed,
        label: Label::Spliced,
        peak_warning: out.peak() > 1.0,
    };
    Ok((out, record))
}
