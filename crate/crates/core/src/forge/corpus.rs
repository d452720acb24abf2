use std::fmt;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{forge_splice, highpass_mitigate, inject_lowband_noise, NoiseSpec, Source, SourceRole, VadConfig};
use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::io::{self, Label, ManifestRow, WavEncoding};
use crate::seed::{self, Stream};

/// One sub-corpus: a crossfade length and at most one post-processing step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub ola_window: usize,
    pub noise_snr_db: Option<f64>,
    pub highpass: bool,
}

impl GridConfig {
    pub fn clean(ola_window: usize) -> Self {
        Self {
            ola_window,
            noise_snr_db: None,
            highpass: false,
        }
    }

    /// Directory name, e.g. `ola256_clean`, `ola512_snr46`, `ola1024_highpass`.
    pub fn name(&self) -> String {
        let mut s = format!("ola{}", self.ola_window);
        if let Some(snr) = self.noise_snr_db {
            s.push_str(&format!("_snr{snr}"));
        }
        if self.highpass {
            s.push_str("_highpass");
        }
        if self.noise_snr_db.is_none() && !self.highpass {
            s.push_str("_clean");
        }
        s
    }
}

impl fmt::Display for GridConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

pub const OLA_WINDOWS: [usize; 5] = [256, 512, 1024, 2048, 4096];
pub const NOISE_SNRS_DB: [f64; 4] = [60.0, 50.0, 46.0, 40.0];

/// Every crossfade length crossed with clean, each noise level and
/// high-pass: 30 sub-corpora.
pub fn table2_grid() -> Vec<GridConfig> {
    let mut grid = Vec::new();
    for &ola_window in &OLA_WINDOWS {
        grid.push(GridConfig::clean(ola_window));
        for &snr in &NOISE_SNRS_DB {
            grid.push(GridConfig {
                ola_window,
                noise_snr_db: Some(snr),
                highpass: false,
            });
        }
        grid.push(GridConfig {
            ola_window,
            noise_snr_db: None,
            highpass: true,
        });
    }
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusPlan {
    /// Spliced tracks per sub-corpus.
    pub count: usize,
    /// Untouched real tracks per sub-corpus.
    pub bona_fide_count: usize,
    pub configs: Vec<GridConfig>,
    pub vad: VadConfig,
    pub seed: u64,
    pub encoding: WavEncoding,
    /// Apply each sub-corpus's post-processing to its bona fide tracks too.
    pub process_bona_fide: bool,
}

impl CorpusPlan {
    pub fn new(count: usize, configs: Vec<GridConfig>, seed: u64) -> Self {
        Self {
            count,
            bona_fide_count: count,
            configs,
            vad: VadConfig::default(),
            seed,
            encoding: WavEncoding::Pcm16,
            process_bona_fide: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    /// `(config, manifest path)` in plan order.
    pub manifests: Vec<(GridConfig, PathBuf)>,
    pub spliced: usize,
    pub bona_fide: usize,
    pub peak_warnings: usize,
    pub skipped_real: usize,
    pub skipped_fake: usize,
}

struct Loaded {
    id: String,
    audio: AudioBuffer,
}

fn list_wavs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_wav = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
        if is_wav && path.is_file() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn load_dir(dir: &Path) -> Result<Vec<Loaded>> {
    list_wavs(dir)?
        .par_iter()
        .map(|p| {
            Ok(Loaded {
                id: p.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
                audio: io::read_wav(p)?,
            })
        })
        .collect()
}

/// Whether the host can serve as either segment for every window in the plan.
fn usable(x: &AudioBuffer, vad: &VadConfig, half: usize) -> bool {
    match super::find_longest_silence(x, vad) {
        Ok(r) => r.end > half && x.len() - r.start > half,
        Err(_) => false,
    }
}

fn post_process(x: AudioBuffer, cfg: &GridConfig, seed: u64) -> Result<AudioBuffer> {
    let mut y = x;
    if let Some(snr_db) = cfg.noise_snr_db {
        y = inject_lowband_noise(&y, &NoiseSpec { snr_db, seed })?;
    }
    if cfg.highpass {
        y = highpass_mitigate(&y)?;
    }
    Ok(y)
}

/// Builds one sub-corpus per grid config under `out_dir`, each with its
/// own `manifest.csv`.
///
/// Sources are read in file-name order and shuffled from the plan seed.
/// Every sub-corpus reuses the same host pairs and bona fide tracks, so
/// rows differ only in crossfade length and post-processing. Hosts without
/// a usable interior silence are skipped. Output does not depend on the
/// number of threads.
pub fn generate_corpus(
    real_dir: impl AsRef<Path>,
    fake_dir: impl AsRef<Path>,
    out_dir: impl AsRef<Path>,
    plan: &CorpusPlan,
) -> Result<CorpusSummary> {
    let out_dir = out_dir.as_ref();
    if plan.configs.is_empty() {
        return Err(Error::invalid("corpus plan has no configurations"));
    }
    let reals = load_dir(real_dir.as_ref())?;
    let fakes = load_dir(fake_dir.as_ref())?;
    let rate = reals
        .first()
        .or(fakes.first())
        .map(|l| l.audio.sample_rate())
        .unwrap_or(16_000);
    if let Some(odd) = reals.iter().chain(&fakes).find(|l| l.audio.sample_rate() != rate) {
        return Err(Error::invalid(format!(
            "source `{}` is {} Hz, expected {rate} Hz",
            odd.id,
            odd.audio.sample_rate()
        )));
    }

    let half = plan.configs.iter().map(|c| c.ola_window / 2).max().unwrap();
    let mut rng = seed::rng(plan.seed, Stream::Pairing);
    let mut real_order: Vec<usize> = (0..reals.len()).collect();
    let mut fake_order: Vec<usize> = (0..fakes.len()).collect();
    real_order.shuffle(&mut rng);
    fake_order.shuffle(&mut rng);

    let real_ok: Vec<bool> = reals.par_iter().map(|l| usable(&l.audio, &plan.vad, half)).collect();
    let fake_ok: Vec<bool> = fakes.par_iter().map(|l| usable(&l.audio, &plan.vad, half)).collect();
    let splice_reals: Vec<usize> = real_order.iter().copied().filter(|&i| real_ok[i]).take(plan.count).collect();
    let splice_fakes: Vec<usize> = fake_order.iter().copied().filter(|&i| fake_ok[i]).take(plan.count).collect();
    if splice_reals.len() < plan.count {
        return Err(Error::CorpusExhausted {
            what: "real hosts with an interior silence",
            needed: plan.count,
            available: splice_reals.len(),
        });
    }
    if splice_fakes.len() < plan.count {
        return Err(Error::CorpusExhausted {
            what: "fake hosts with an interior silence",
            needed: plan.count,
            available: splice_fakes.len(),
        });
    }
    let bona: Vec<usize> = real_order
        .iter()
        .copied()
        .filter(|i| !splice_reals.contains(i))
        .take(plan.bona_fide_count)
        .collect();
    if bona.len() < plan.bona_fide_count {
        return Err(Error::CorpusExhausted {
            what: "real tracks left over for bona fide",
            needed: plan.bona_fide_count,
            available: bona.len(),
        });
    }
    let skipped_real = real_ok.iter().filter(|ok| !**ok).count();
    let skipped_fake = fake_ok.iter().filter(|ok| !**ok).count();
    if skipped_real + skipped_fake > 0 {
        log::info!("{skipped_real} real and {skipped_fake} fake hosts lack a usable silence");
    }

    let mut manifests = Vec::new();
    let mut peak_warnings = 0;
    for cfg in &plan.configs {
        let dir = out_dir.join(cfg.name());
        let spliced: Vec<ManifestRow> = (0..plan.count)
            .into_par_iter()
            .map(|i| -> Result<ManifestRow> {
                let track_seed = seed::derive(plan.seed, i as u64);
                let (r, f) = (&reals[splice_reals[i]], &fakes[splice_fakes[i]]);
                let real = Source {
                    id: &r.id,
                    role: SourceRole::Real,
                    audio: &r.audio,
                };
                let fake = Source {
                    id: &f.id,
                    role: SourceRole::Fake,
                    audio: &f.audio,
                };
                let (x, rec) = forge_splice(real, fake, cfg.ola_window, &plan.vad, track_seed)?;
                let y = post_process(x, cfg, track_seed)?;
                let name = format!("spliced_{i:05}.wav");
                io::write_wav(dir.join(&name), &y, plan.encoding)?;
                Ok(ManifestRow {
                    path: name,
                    label: Label::Spliced,
                    splice_sample: Some(rec.splice_sample),
                    source_a: Some(rec.source_a.to_string()),
                    source_b: Some(rec.source_b.to_string()),
                    ola_window: Some(cfg.ola_window),
                    noise_snr_db: cfg.noise_snr_db,
                    highpass: cfg.highpass,
                    seed: track_seed,
                    peak_warning: y.peak() > 1.0,
                })
            })
            .collect::<Result<_>>()?;
        let bona_rows: Vec<ManifestRow> = (0..bona.len())
            .into_par_iter()
            .map(|j| -> Result<ManifestRow> {
                let track_seed = seed::derive(plan.seed, (plan.count + j) as u64);
                let r = &reals[bona[j]];
                let y = if plan.process_bona_fide {
                    post_process(r.audio.clone(), cfg, track_seed)?
                } else {
                    r.audio.clone()
                };
                let name = format!("bona_fide_{j:05}.wav");
                io::write_wav(dir.join(&name), &y, plan.encoding)?;
                let processed = plan.process_bona_fide;
                Ok(ManifestRow {
                    path: name,
                    label: Label::BonaFide,
                    splice_sample: None,
                    source_a: Some(format!("real:{}", r.id)),
                    source_b: None,
                    ola_window: None,
                    noise_snr_db: cfg.noise_snr_db.filter(|_| processed),
                    highpass: cfg.highpass && processed,
                    seed: track_seed,
                    peak_warning: y.peak() > 1.0,
                })
            })
            .collect::<Result<_>>()?;

        let mut rows = bona_rows;
        rows.extend(spliced);
        rows.sort_by(|a, b| a.path.cmp(&b.path));
        peak_warnings += rows.iter().filter(|r| r.peak_warning).count();
        let manifest = dir.join("manifest.csv");
        io::write_manifest(&manifest, &rows)?;
        log::info!("wrote {} ({} tracks)", manifest.display(), rows.len());
        manifests.push((*cfg, manifest));
    }
    if peak_warnings > 0 {
        log::warn!("{peak_warnings} tracks exceed full scale; see peak_warning in the manifests");
    }
    Ok(CorpusSummary {
        manifests,
        spliced: plan.count * plan.configs.len(),
        bona_fide: bona.len() * plan.configs.len(),
        peak_warnings,
        skipped_real,
        skipped_fake,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_names() {
        let grid = table2_grid();
        assert_eq!(grid.len(), 30);
        assert_eq!(grid[0].name(), "ola256_clean");
        assert_eq!(grid[1].name(), "ola256_snr60");
        assert_eq!(grid[5].name(), "ola256_highpass");
        assert_eq!(grid[29].name(), "ola4096_highpass");
        let mut names: Vec<_> = grid.iter().map(GridConfig::name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 30);
    }
}
