use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::dsp::frame_count;
use crate::error::{Error, Result};

/// Energy-threshold voice activity detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VadConfig {
    pub frame_len: usize,
    pub hop: usize,
    /// A frame is silent when its RMS is this far below the track RMS.
    pub threshold_db: f64,
    pub min_region_ms: f64,
    /// Measure RMS about the mean, so a constant offset reads as silence.
    pub remove_dc: bool,
}

impl VadConfig {
    /// 20 ms frames, 10 ms hop, −40 dB, 60 ms minimum.
    pub fn for_rate(sample_rate: u32) -> Self {
        Self {
            frame_len: (sample_rate as usize / 50).max(2),
            hop: (sample_rate as usize / 100).max(1),
            threshold_db: -40.0,
            min_region_ms: 60.0,
            remove_dc: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.hop == 0 || self.frame_len < self.hop {
            return Err(Error::invalid(format!(
                "VAD needs frame_len >= hop >= 1, got {} and {}",
                self.frame_len, self.hop
            )));
        }
        if !(self.min_region_ms > 0.0) || !self.threshold_db.is_finite() {
            return Err(Error::invalid("VAD needs min_region_ms > 0 and a finite threshold"));
        }
        Ok(())
    }
}

impl Default for VadConfig {
    fn default() -> Self {
        Self::for_rate(16_000)
    }
}

/// Half-open sample range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SilentRegion {
    pub start: usize,
    pub end: usize,
}

impl SilentRegion {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

fn rms(x: &[f64], remove_dc: bool) -> f64 {
    let n = x.len() as f64;
    let mean = if remove_dc { x.iter().sum::<f64>() / n } else { 0.0 };
    (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Longest run of silent frames that touches neither the first nor the
/// last frame. Boundaries fall on the hop grid; the earliest run wins ties.
pub fn find_longest_silence(x: &AudioBuffer, cfg: &VadConfig) -> Result<SilentRegion> {
    cfg.validate()?;
    if x.len() <= cfg.frame_len {
        return Err(Error::TooShort(format!(
            "{} samples, VAD frame is {}",
            x.len(),
            cfg.frame_len
        )));
    }
    let no_silence = Error::NoSilence {
        min_ms: cfg.min_region_ms,
    };
    let track = rms(x.samples(), cfg.remove_dc);
    if track == 0.0 {
        return Err(no_silence);
    }
    let nf = frame_count(x.len(), cfg.frame_len, cfg.hop);
    let limit = track * 10f64.powf(cfg.threshold_db / 20.0);
    let silent: Vec<bool> = (0..nf)
        .map(|m| {
            let s = m * cfg.hop;
            rms(&x.samples()[s..s + cfg.frame_len], cfg.remove_dc) < limit
        })
        .collect();

    let min_len = cfg.min_region_ms * 1e-3 * x.sample_rate() as f64;
    let mut best: Option<SilentRegion> = None;
    let mut m = 0;
    while m < nf {
        if !silent[m] {
            m += 1;
            continue;
        }
        let first = m;
        while m < nf && silent[m] {
            m += 1;
        }
        if first == 0 || m == nf {
            continue;
        }
        let region = SilentRegion {
            start: first * cfg.hop,
            end: (m - 1) * cfg.hop + cfg.frame_len,
        };
        if (region.len() as f64) >= min_len && best.is_none_or(|b| region.len() > b.len()) {
            best = Some(region);
        }
    }
    best.ok_or(no_silence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 440.0 * i as f64 / 16000.0).sin())
            .collect()
    }

    #[test]
    fn interior_gap_is_found_exactly() {
        let mut s = tone(16000);
        s.extend(vec![0.0; 3200]);
        s.extend(tone(16000));
        let r = find_longest_silence(&AudioBuffer::new(s, 16000).unwrap(), &VadConfig::default()).unwrap();
        assert_eq!(r, SilentRegion { start: 16000, end: 19200 });
    }

    #[test]
    fn all_zero_track_has_no_interior_silence() {
        let x = AudioBuffer::new(vec![0.0; 16000], 16000).unwrap();
        assert!(matches!(
            find_longest_silence(&x, &VadConfig::default()),
            Err(Error::NoSilence { .. })
        ));
    }

    #[test]
    fn leading_and_trailing_silence_are_ignored() {
        let mut s = vec![0.0; 8000];
        s.extend(tone(16000));
        let x = AudioBuffer::new(s.clone(), 16000).unwrap();
        assert!(find_longest_silence(&x, &VadConfig::default()).is_err());
        s.extend(vec![0.0; 8000]);
        let x = AudioBuffer::new(s, 16000).unwrap();
        assert!(find_longest_silence(&x, &VadConfig::default()).is_err());
    }

    #[test]
    fn short_gaps_are_rejected_and_longest_wins() {
        let mut s = tone(8000);
        s.extend(vec![0.0; 640]);
        s.extend(tone(8000));
        let x = AudioBuffer::new(s.clone(), 16000).unwrap();
        assert!(find_longest_silence(&x, &VadConfig::default()).is_err());
        s.extend(vec![0.0; 1600]);
        s.extend(tone(4000));
        s.extend(vec![0.0; 2400]);
        s.extend(tone(4000));
        let x = AudioBuffer::new(s, 16000).unwrap();
        let r = find_longest_silence(&x, &VadConfig::default()).unwrap();
        assert_eq!(r.len(), 2400);
    }

    #[test]
    fn dc_offset_reads_as_silence() {
        let mut s: Vec<f64> = tone(16000);
        s.extend(vec![0.0; 3200]);
        s.extend(tone(16000));
        let shifted: Vec<f64> = s.iter().map(|v| v + 0.3).collect();
        let x = AudioBuffer::new(shifted, 16000).unwrap();
        assert!(find_longest_silence(&x, &VadConfig::default()).is_ok());
        let cfg = VadConfig {
            remove_dc: false,
            ..VadConfig::default()
        };
        assert!(find_longest_silence(&x, &cfg).is_err());
    }

    #[test]
    fn config_validation() {
        let x = AudioBuffer::new(tone(1000), 16000).unwrap();
        let bad = VadConfig {
            hop: 400,
            ..VadConfig::default()
        };
        assert!(matches!(find_longest_silence(&x, &bad), Err(Error::InvalidArgument(_))));
        let short = AudioBuffer::new(tone(100), 16000).unwrap();
        assert!(matches!(
            find_longest_silence(&short, &VadConfig::default()),
            Err(Error::TooShort(_))
        ));
    }
}
