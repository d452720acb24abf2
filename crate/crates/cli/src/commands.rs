use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use splicescope::detector::{score_track, DetectorConfig};
use splicescope::eval::{evaluate_corpus, EvalReport};
use splicescope::forge::{generate_corpus, table2_grid, CorpusPlan, GridConfig, VadConfig};
use splicescope::io::{self, export_spectrogram, read_segment_labels, SpectrogramExport};
use splicescope::signal_lab::{
    demo_scenario, leakage_demo, write_hosts, AnalysisSettings, ConcatSpec, DemoOutput, HostSpec, Scenario,
    SinusoidSpec,
};
use splicescope::AudioBuffer;

use crate::args::{
    Demo, DetectArgs, EvaluateArgs, ExportArg, ForgeArgs, Global, SpectrogramArgs, SynthHostsArgs,
};
use crate::UsageError;

fn log_config(what: &str, global: &Global, value: &impl serde::Serialize) {
    let threads = if global.threads == 0 {
        rayon::current_num_threads()
    } else {
        global.threads
    };
    log::info!(
        "{what}: seed={} threads={threads} out={} config={}",
        global.seed,
        global.out.display(),
        serde_json::to_string(value).unwrap_or_default()
    );
}

fn write_waveform(path: &Path, x: &AudioBuffer) -> Result<()> {
    let mut s = String::from("index,time_s,sample\n");
    for (i, v) in x.samples().iter().enumerate() {
        writeln!(s, "{i},{},{v}", i as f64 / x.sample_rate() as f64).unwrap();
    }
    std::fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))
        .with_context(|| format!("creating {}", path.display()))?;
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn export_demo(dir: &Path, demo: &DemoOutput, export: ExportArg) -> Result<()> {
    write_waveform(&dir.join("waveform.csv"), &demo.signal)?;
    let splice_times: Vec<f64> = demo
        .splice_point
        .map(|s| s as f64 / demo.signal.sample_rate() as f64)
        .into_iter()
        .collect();
    for fmt in export.formats() {
        let path = dir.join(format!("spectrogram.{}", fmt.extension()));
        export_spectrogram(
            &demo.spectrogram,
            &SpectrogramExport::new(fmt).with_splice_times(splice_times.clone()),
            &path,
        )?;
        println!("{}", path.display());
    }
    Ok(())
}

pub fn demo(global: &Global, demo: &Demo) -> Result<()> {
    match demo {
        Demo::Leakage(a) => {
            let n = a.samples.unwrap_or(a.win);
            let tone = SinusoidSpec::new(a.f0, 1.0, 0.0, n, a.fs);
            log_config("demo leakage", global, &(&tone, a.win));
            let out = leakage_demo(&tone, a.win)?;
            let peak = out.spectrogram.frame(0);
            let k = (0..peak.len()).max_by(|x, y| peak[*x].total_cmp(&peak[*y])).unwrap_or(0);
            log::info!("peak at bin {k} ({} Hz)", out.spectrogram.bin_frequency(k));
            export_demo(&global.out.join(format!("demo-leakage-win{}", a.win)), &out, a.export)
        }
        Demo::Splice(a) => {
            let base = SinusoidSpec::new(a.f0, 1.0, 0.0, 0, a.fs);
            let spec = match a.scenario {
                Scenario::Identical => ConcatSpec::identical(base, a.n1, a.n2),
                Scenario::PhaseShift => ConcatSpec::phase_shift(base, a.n1, a.n2, a.phase),
                Scenario::AmplitudeChange => ConcatSpec::amplitude_change(base, a.n1, a.n2, a.amplitude),
            };
            let analysis = AnalysisSettings::new(a.window, a.win, a.hop);
            log_config("demo splice", global, &(&spec, &analysis));
            let out = demo_scenario(&spec, &analysis)?;
            export_demo(&global.out.join(format!("demo-splice-{}", a.scenario)), &out, a.export)
        }
    }
}

pub fn spectrogram(global: &Global, a: &SpectrogramArgs) -> Result<()> {
    let analysis = AnalysisSettings::new(a.window, a.win, a.hop);
    log_config("spectrogram", global, &analysis);
    let x = io::read_wav(&a.wav)?;
    let spec = analysis.analyse(&x)?;
    let splice_times = match &a.labels {
        Some(p) => read_segment_labels(p, a.dialect)?.splice_times(),
        None => Vec::new(),
    };
    let stem = a.wav.file_stem().unwrap_or_default().to_string_lossy();
    for fmt in a.export.formats() {
        let mut e = SpectrogramExport::new(fmt).with_splice_times(splice_times.clone());
        e.min_db = a.min_db;
        e.max_db = a.max_db;
        let path = global.out.join(format!("{stem}.{}", fmt.extension()));
        export_spectrogram(&spec, &e, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}

pub fn forge(global: &Global, a: &ForgeArgs) -> Result<()> {
    let configs: Vec<GridConfig> = if a.grid {
        table2_grid()
    } else {
        a.ola_windows
            .iter()
            .map(|&ola_window| GridConfig {
                ola_window,
                noise_snr_db: a.snr_db,
                highpass: a.highpass,
            })
            .collect()
    };
    let mut plan = CorpusPlan::new(a.count, configs, global.seed);
    plan.bona_fide_count = a.bona_fide_count.unwrap_or(a.count);
    plan.encoding = a.encoding;
    plan.process_bona_fide = !a.raw_bona_fide;
    plan.vad = VadConfig {
        threshold_db: a.vad_threshold_db,
        min_region_ms: a.vad_min_region_ms,
        ..VadConfig::default()
    };
    log_config("forge", global, &plan);
    let summary = generate_corpus(&a.real, &a.fake, &global.out, &plan)?;
    for (_, manifest) in &summary.manifests {
        println!("{}", manifest.display());
    }
    log::info!(
        "{} spliced and {} bona fide tracks in {} sub-corpora",
        summary.spliced,
        summary.bona_fide,
        summary.manifests.len()
    );
    Ok(())
}

fn is_manifest(p: &Path) -> bool {
    p.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn detect(global: &Global, a: &DetectArgs) -> Result<()> {
    let cfg = a.detector.resolve()?;
    log_config("detect", global, &cfg);
    let mut tracks: Vec<(String, PathBuf, String)> = Vec::new();
    for input in &a.inputs {
        if is_manifest(input) {
            let dir = input.parent().map(Path::to_path_buf).unwrap_or_default();
            for row in io::read_manifest(input)? {
                let path = row.resolve(&dir);
                tracks.push((path.display().to_string(), path, row.label.to_string()));
            }
        } else {
            tracks.push((input.display().to_string(), input.clone(), String::new()));
        }
    }
    tracks.sort_by(|x, y| x.0.cmp(&y.0));
    let rows: Vec<String> = tracks
        .par_iter()
        .map(|(id, path, label)| {
            match io::read_wav(path).and_then(|x| score_track(&x, &cfg)) {
                Ok(s) => format!("{id},{label},{},{},{},", s.d, s.frames(), s.argmax_frame),
                Err(e) => {
                    log::warn!("skipping {id}: {e}");
                    format!("{id},{label},,,,\"{}\"", e.to_string().replace('"', "'"))
                }
            }
        })
        .collect();
    let mut text = String::from("track_id,label,d_db,frames,argmax_frame,error\n");
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    match &a.scores {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn collect_manifests(inputs: &[PathBuf]) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let direct = input.join("manifest.csv");
            if direct.is_file() {
                out.push((input.display().to_string(), direct));
                continue;
            }
            let mut found = Vec::new();
            for entry in std::fs::read_dir(input).with_context(|| format!("reading {}", input.display()))? {
                let sub = entry?.path();
                let m = sub.join("manifest.csv");
                if m.is_file() {
                    let name = sub.file_name().unwrap_or_default().to_string_lossy().into_owned();
                    found.push((name, m));
                }
            }
            if found.is_empty() {
                return Err(UsageError(format!("no manifest.csv under {}", input.display())).into());
            }
            found.sort();
            out.extend(found);
        } else {
            let name = input
                .parent()
                .and_then(|p| p.file_name())
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| input.display().to_string());
            out.push((name, input.clone()));
        }
    }
    Ok(out)
}

/// Rows are OLA windows, columns the post-processing, when every name
/// follows the forge naming scheme.
fn grid_table(results: &[(String, EvalReport)]) -> Option<String> {
    let parse = |name: &str| -> Option<(usize, String)> {
        let rest = name.strip_prefix("ola")?;
        let (w, col) = rest.split_once('_')?;
        Some((w.parse().ok()?, col.to_string()))
    };
    let cells: Vec<(usize, String, f64)> = results
        .iter()
        .map(|(n, r)| parse(n).map(|(w, c)| (w, c, r.auc)))
        .collect::<Option<_>>()?;
    let order = ["clean", "snr60", "snr50", "snr46", "snr40", "highpass"];
    let mut cols: Vec<String> = Vec::new();
    for c in order.iter().map(|s| s.to_string()).chain(cells.iter().map(|c| c.1.clone())) {
        if cells.iter().any(|x| x.1 == c) && !cols.contains(&c) {
            cols.push(c);
        }
    }
    let mut rows: Vec<usize> = cells.iter().map(|c| c.0).collect();
    rows.sort_unstable();
    rows.dedup();
    let mut s = format!("{:>9}", "AUC %");
    for c in &cols {
        write!(s, " {c:>9}").unwrap();
    }
    s.push('\n');
    for w in rows {
        write!(s, "{:>9}", format!("OLA {w}")).unwrap();
        for c in &cols {
            match cells.iter().find(|x| x.0 == w && &x.1 == c) {
                Some(x) => write!(s, " {:>9.2}", 100.0 * x.2).unwrap(),
                None => write!(s, " {:>9}", "-").unwrap(),
            }
        }
        s.push('\n');
    }
    Some(s)
}

fn evaluate_one(manifest: &Path, cfg: &DetectorConfig) -> Result<EvalReport> {
    match evaluate_corpus(manifest, cfg) {
        Err(splicescope::Error::InvalidArgument(msg)) => {
            Err(UsageError(format!("{}: {msg}", manifest.display())).into())
        }
        other => Ok(other?),
    }
}

pub fn evaluate(global: &Global, a: &EvaluateArgs) -> Result<()> {
    let cfg = a.detector.resolve()?;
    log_config("evaluate", global, &cfg);
    let manifests = collect_manifests(&a.inputs)?;
    if a.report.is_some() && manifests.len() > 1 {
        return Err(UsageError("--report needs exactly one manifest".into()).into());
    }
    let mut results = Vec::new();
    for (name, manifest) in &manifests {
        let report = evaluate_one(manifest, &cfg)?;
        let json = match (&a.report, manifests.len()) {
            (Some(p), _) => p.clone(),
            (None, 1) => global.out.join("report.json"),
            (None, _) => global.out.join(name).join("report.json"),
        };
        report.write_json(&json)?;
        report.write_roc_csv(json.with_extension("roc.csv"))?;
        log::info!("{name}: wrote {}", json.display());
        results.push((name.clone(), report));
    }

    if let [(_, r)] = &results[..] {
        println!("AUC {:.1} EER {:.1}", 100.0 * r.auc, 100.0 * r.eer);
        if r.excluded > 0 {
            println!("excluded {} tracks", r.excluded);
        }
        return Ok(());
    }
    if let Some(table) = grid_table(&results) {
        print!("{table}");
    }
    println!("{:<24} {:>6} {:>6} {:>8} {:>8} {:>8}", "corpus", "n_pos", "n_neg", "AUC %", "EER %", "excluded");
    for (name, r) in &results {
        println!(
            "{name:<24} {:>6} {:>6} {:>8.2} {:>8.2} {:>8}",
            r.n_pos,
            r.n_neg,
            100.0 * r.auc,
            100.0 * r.eer,
            r.excluded
        );
    }
    Ok(())
}

pub fn synth_hosts(global: &Global, a: &SynthHostsArgs) -> Result<()> {
    let spec = HostSpec {
        duration_secs: a.duration_secs,
        ..HostSpec::default()
    };
    log_config("synth-hosts", global, &spec);
    let real = write_hosts(&global.out.join("real"), "real", a.real, 0, &spec, global.seed, a.encoding)?;
    let fake = write_hosts(
        &global.out.join("fake"),
        "fake",
        a.fake,
        a.real as u64,
        &spec,
        global.seed,
        a.encoding,
    )?;
    log::info!("wrote {} real and {} fake hosts", real.len(), fake.len());
    println!("{}", global.out.join("real").display());
    println!("{}", global.out.join("fake").display());
    Ok(())
}

