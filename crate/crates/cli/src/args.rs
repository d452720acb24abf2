use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use splicescope::detector::{BandSelection, DetectorConfig};
use splicescope::dsp::WindowKind;
use splicescope::io::{ExportFormat, LabelDialect, WavEncoding};
use splicescope::signal_lab::Scenario;

#[derive(Debug, Parser)]
#[command(name = "splicescope", version, about = "Spectral-leakage splice detection for partially fake speech")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every random draw
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses all available cores
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Only log warnings and errors
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// Output directory
    #[arg(long, global = true, env = "SPLICESCOPE_OUT", default_value = "splicescope-out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export the synthetic leakage and splicing demonstrations
    #[command(subcommand)]
    Demo(Demo),
    /// Export the dB spectrogram of a WAV file
    Spectrogram(SpectrogramArgs),
    /// Build spliced corpora from real and fake host directories
    Forge(ForgeArgs),
    /// Score WAV files or every track of a manifest
    Detect(DetectArgs),
    /// Score a labelled corpus and report AUC and EER
    Evaluate(EvaluateArgs),
    /// Write synthetic speech-like host tracks for desk experiments
    SynthHosts(SynthHostsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExportArg {
    Csv,
    Pgm8,
    Both,
}

impl ExportArg {
    pub fn formats(self) -> Vec<ExportFormat> {
        match self {
            ExportArg::Csv => vec![ExportFormat::Csv],
            ExportArg::Pgm8 => vec![ExportFormat::Pgm8],
            ExportArg::Both => vec![ExportFormat::Csv, ExportFormat::Pgm8],
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// One tone, one rectangular frame: `--win 80` gives a single peak,
    /// `--win 88` smears across the spectrum
    Leakage(LeakageArgs),
    /// Two concatenated tones analysed across the join
    Splice(SpliceArgs),
}

#[derive(Debug, Args)]
pub struct LeakageArgs {
    /// Tone frequency, Hz
    #[arg(long, default_value_t = 800.0)]
    pub f0: f64,
    /// Sample rate, Hz
    #[arg(long, default_value_t = 16000)]
    pub fs: u32,
    /// Rectangular window length, samples
    #[arg(long, default_value_t = 80)]
    pub win: usize,
    /// Signal length in samples (default: one window)
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = ExportArg::Both)]
    pub export: ExportArg,
}

#[derive(Debug, Args)]
pub struct SpliceArgs {
    #[arg(long, default_value_t = Scenario::PhaseShift)]
    pub scenario: Scenario,
    /// Phase of the second segment in radians; accepts `pi`, `pi/2`, `-0.5pi`
    #[arg(long, default_value = "pi", value_parser = parse_phase)]
    pub phase: f64,
    /// Amplitude of the second segment (amplitude scenario)
    #[arg(long, default_value_t = 0.5)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 800.0)]
    pub f0: f64,
    #[arg(long, default_value_t = 16000)]
    pub fs: u32,
    /// Samples in the first segment
    #[arg(long, default_value_t = 810)]
    pub n1: usize,
    /// Samples in the second segment
    #[arg(long, default_value_t = 790)]
    pub n2: usize,
    #[arg(long, default_value_t = WindowKind::Rectangular)]
    pub window: WindowKind,
    #[arg(long, default_value_t = 80)]
    pub win: usize,
    #[arg(long, default_value_t = 20)]
    pub hop: usize,
    #[arg(long, value_enum, default_value_t = ExportArg::Both)]
    pub export: ExportArg,
}

pub fn parse_phase(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || format!("`{s}` is not a phase (try 1.57, pi, pi/2 or -0.5pi)");
    let Some(at) = t.find("pi") else {
        return t.parse().map_err(|_| bad());
    };
    let coeff = match &t[..at] {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &t[at + 2..];
    let div = match rest {
        "" => 1.0,
        r => r.strip_prefix('/').and_then(|d| d.parse::<f64>().ok()).ok_or_else(bad)?,
    };
    Ok(coeff * std::f64::consts::PI / div)
}

#[derive(Debug, Args)]
pub struct SpectrogramArgs {
    pub wav: PathBuf,
    #[arg(long, default_value_t = 2048)]
    pub win: usize,
    #[arg(long, default_value_t = 256)]
    pub hop: usize,
    #[arg(long, default_value_t = WindowKind::HannPeriodic)]
    pub window: WindowKind,
    #[arg(long, value_enum, default_value_t = ExportArg::Both)]
    pub export: ExportArg,
    /// Segment labels whose class changes are copied to the sidecar
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = LabelDialect::Native)]
    pub dialect: LabelDialect,
    /// dB mapped to black in pgm8 (default: spectrogram minimum)
    #[arg(long, allow_hyphen_values = true)]
    pub min_db: Option<f64>,
    /// dB mapped to white in pgm8 (default: spectrogram maximum)
    #[arg(long, allow_hyphen_values = true)]
    pub max_db: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ForgeArgs {
    /// Directory of real host WAVs
    #[arg(long)]
    pub real: PathBuf,
    /// Directory of fake host WAVs
    #[arg(long)]
    pub fake: PathBuf,
    /// Spliced tracks per configuration
    #[arg(long, default_value_t = 1200)]
    pub count: usize,
    /// Bona fide tracks per configuration (default: --count)
    #[arg(long)]
    pub bona_fide_count: Option<usize>,
    /// Crossfade window, samples; repeat for several
    #[arg(long = "ola-window", default_values_t = [256])]
    pub ola_windows: Vec<usize>,
    /// Inject 80 Hz low-pass noise at this SNR, dB
    #[arg(long)]
    pub snr_db: Option<f64>,
    /// Apply the 100 Hz order-8 high-pass
    #[arg(long)]
    pub highpass: bool,
    /// Every OLA window 256..4096 crossed with clean, SNR 60/50/46/40 and high-pass
    #[arg(long, conflicts_with_all = ["ola_windows", "snr_db", "highpass"])]
    pub grid: bool,
    /// Leave bona fide tracks unprocessed in noise and high-pass corpora
    #[arg(long)]
    pub raw_bona_fide: bool,
    #[arg(long, default_value_t = WavEncoding::Pcm16)]
    pub encoding: WavEncoding,
    /// VAD silence threshold relative to track RMS, dB
    #[arg(long, default_value_t = -40.0, allow_hyphen_values = true)]
    pub vad_threshold_db: f64,
    /// Shortest usable silence, ms
    #[arg(long, default_value_t = 60.0)]
    pub vad_min_region_ms: f64,
}

#[derive(Debug, Args, Clone)]
pub struct DetectorArgs {
    /// `partialspoof`: Hann 4096, hop 1024, lowest 16 bins.
    /// `had`: Hann 2048, hop 512, highest 5 bins
    #[arg(long, default_value = "partialspoof")]
    pub preset: String,
    /// Override the window length
    #[arg(long)]
    pub win: Option<usize>,
    /// Override the hop
    #[arg(long)]
    pub hop: Option<usize>,
    #[arg(long)]
    pub window: Option<WindowKind>,
    /// Override the band: `lowest:16`, `highest:5` or `bins:0,1,2`
    #[arg(long)]
    pub band: Option<BandSelection>,
    /// Frames dropped from each end before taking the range
    #[arg(long, default_value_t = 0)]
    pub trim_frames: usize,
}

impl DetectorArgs {
    pub fn resolve(&self) -> splicescope::Result<DetectorConfig> {
        let mut cfg = DetectorConfig::preset(&self.preset)?;
        if let Some(w) = self.win {
            cfg.win_len = w;
        }
        if let Some(h) = self.hop {
            cfg.hop = h;
        }
        if let Some(k) = self.window {
            cfg.window = k;
        }
        if let Some(b) = &self.band {
            cfg.band = b.clone();
        }
        cfg.trim_frames = self.trim_frames;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// WAV files, or manifest CSVs whose tracks are all scored
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub detector: DetectorArgs,
    /// Write scores here instead of stdout
    #[arg(long)]
    pub scores: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Manifest CSVs, or directories searched one level deep for manifest.csv
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub detector: DetectorArgs,
    /// Report path for a single manifest (default: <out>/report.json)
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthHostsArgs {
    /// Hosts written to <out>/real
    #[arg(long, default_value_t = 400)]
    pub real: usize,
    /// Hosts written to <out>/fake
    #[arg(long, default_value_t = 200)]
    pub fake: usize,
    #[arg(long, default_value_t = 3.0)]
    pub duration_secs: f64,
    #[arg(long, default_value_t = WavEncoding::Pcm16)]
    pub encoding: WavEncoding,
}
