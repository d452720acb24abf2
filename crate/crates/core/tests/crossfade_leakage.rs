//! Longer crossfades spread less energy into the quiet low band around the
//! join of two sinusoids.

use splicescope::detector::{band_average, BandSelection};
use splicescope::dsp::{make_window, stft_db, WindowKind, DEFAULT_FLOOR_DB};
use splicescope::forge::crossfade;
use splicescope::signal_lab::{frames_straddling, synth_sinusoid, SinusoidSpec};

fn splice_band_db(ola_window: usize, phase: f64, amp: f64) -> f64 {
    let a = synth_sinusoid(&SinusoidSpec::new(440.0, 0.5, 0.0, 24000, 16000)).unwrap();
    // the second tone picks up where the overlap starts, offset by `phase`
    let b = synth_sinusoid(&SinusoidSpec {
        start_index: (24000 - ola_window / 2) as u64,
        ..SinusoidSpec::new(440.0, amp, phase, 24000, 16000)
    })
    .unwrap();
    let (x, centre) = crossfade(a.samples(), b.samples(), ola_window, 16000).unwrap();
    let spec = stft_db(&x, &make_window(WindowKind::HannPeriodic, 4096).unwrap(), 1024, DEFAULT_FLOOR_DB).unwrap();
    let v = band_average(&spec, &BandSelection::LowestN(16)).unwrap();
    frames_straddling(&spec, centre)
        .into_iter()
        .map(|m| v[m])
        .fold(f64::MIN, f64::max)
}

#[test]
fn low_band_leakage_falls_with_window() {
    for (phase, amp) in [(std::f64::consts::PI, 0.5), (1.0, 0.5), (0.0, 0.2), (2.0, 0.8)] {
        let seq: Vec<f64> = [256, 512, 1024, 2048, 4096]
            .iter()
            .map(|&w| splice_band_db(w, phase, amp))
            .collect();
        for w in seq.windows(2) {
            assert!(w[1] <= w[0], "phase {phase} amp {amp}: {seq:?}");
        }
    }
}
