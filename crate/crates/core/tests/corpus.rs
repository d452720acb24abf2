use std::path::Path;

use splicescope::forge::{forge_splice, generate_corpus, CorpusPlan, GridConfig, Source, SourceRole, VadConfig};
use splicescope::io::{read_manifest, read_wav, Label, WavEncoding};
use splicescope::signal_lab::{write_hosts, HostSpec};
use splicescope::Error;

fn hosts(root: &Path, real: usize, fake: usize) {
    let spec = HostSpec::default();
    write_hosts(&root.join("real"), "real", real, 0, &spec, 1, WavEncoding::Float32).unwrap();
    write_hosts(&root.join("fake"), "fake", fake, real as u64, &spec, 1, WavEncoding::Float32).unwrap();
}

fn bytes_under(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn same_seed_same_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    hosts(tmp.path(), 20, 10);
    let plan = CorpusPlan::new(10, vec![GridConfig::clean(1024)], 77);
    for out in ["a", "b"] {
        generate_corpus(tmp.path().join("real"), tmp.path().join("fake"), tmp.path().join(out), &plan).unwrap();
    }
    let a = bytes_under(&tmp.path().join("a/ola1024_clean"));
    assert_eq!(a.len(), 21);
    assert_eq!(a, bytes_under(&tmp.path().join("b/ola1024_clean")));

    let other = CorpusPlan::new(10, vec![GridConfig::clean(1024)], 78);
    generate_corpus(tmp.path().join("real"), tmp.path().join("fake"), tmp.path().join("c"), &other).unwrap();
    assert_ne!(a, bytes_under(&tmp.path().join("c/ola1024_clean")));
}

#[test]
fn one_manifest_per_window_with_one_splice_per_track() {
    let tmp = tempfile::tempdir().unwrap();
    hosts(tmp.path(), 8, 4);
    let grid: Vec<_> = [256, 512, 1024, 2048, 4096].into_iter().map(GridConfig::clean).collect();
    let plan = CorpusPlan::new(4, grid, 3);
    let summary = generate_corpus(tmp.path().join("real"), tmp.path().join("fake"), tmp.path().join("out"), &plan).unwrap();
    assert_eq!(summary.manifests.len(), 5);
    for (cfg, manifest) in &summary.manifests {
        let rows = read_manifest(manifest).unwrap();
        assert_eq!(rows.len(), 8);
        for r in &rows {
            match r.label {
                Label::Spliced => {
                    assert!(r.splice_sample.is_some());
                    assert_eq!(r.ola_window, Some(cfg.ola_window));
                    assert!(r.source_a.is_some() && r.source_b.is_some());
                }
                Label::BonaFide => assert!(r.splice_sample.is_none() && r.source_b.is_none()),
            }
        }
        let mut paths: Vec<_> = rows.iter().map(|r| r.path.clone()).collect();
        paths.sort();
        assert_eq!(paths, rows.iter().map(|r| r.path.clone()).collect::<Vec<_>>());
    }
}

#[test]
fn manifest_row_regenerates_the_track() {
    let tmp = tempfile::tempdir().unwrap();
    hosts(tmp.path(), 6, 3);
    let mut plan = CorpusPlan::new(3, vec![GridConfig::clean(512)], 9);
    plan.encoding = WavEncoding::Float32;
    let summary = generate_corpus(tmp.path().join("real"), tmp.path().join("fake"), tmp.path().join("out"), &plan).unwrap();
    let manifest = &summary.manifests[0].1;
    let dir = manifest.parent().unwrap();
    for row in read_manifest(manifest).unwrap().iter().filter(|r| r.label == Label::Spliced) {
        let load = |tag: &str| {
            let (role, id) = tag.split_once(':').unwrap();
            let audio = read_wav(tmp.path().join(role).join(format!("{id}.wav"))).unwrap();
            let role = if role == "real" { SourceRole::Real } else { SourceRole::Fake };
            (id.to_string(), role, audio)
        };
        let (ida, ra, a) = load(row.source_a.as_deref().unwrap());
        let (idb, rb, b) = load(row.source_b.as_deref().unwrap());
        // the coin flip is replayed from the seed, so pass the hosts as real, fake
        let (real, fake) = if ra == SourceRole::Real {
            (Source { id: &ida, role: ra, audio: &a }, Source { id: &idb, role: rb, audio: &b })
        } else {
            (Source { id: &idb, role: rb, audio: &b }, Source { id: &ida, role: ra, audio: &a })
        };
        let (x, rec) = forge_splice(real, fake, 512, &VadConfig::default(), row.seed).unwrap();
        assert_eq!(Some(rec.splice_sample), row.splice_sample);
        let stored = read_wav(dir.join(&row.path)).unwrap();
        let x32: Vec<f64> = x.samples().iter().map(|v| *v as f32 as f64).collect();
        assert_eq!(stored.samples(), &x32[..]);
    }
}

#[test]
fn shortfall_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    hosts(tmp.path(), 5, 5);
    let plan = CorpusPlan::new(3, vec![GridConfig::clean(256)], 0);
    match generate_corpus(tmp.path().join("real"), tmp.path().join("fake"), tmp.path().join("out"), &plan) {
        Err(Error::CorpusExhausted { needed, available, what }) => {
            assert_eq!((needed, available), (3, 2));
            assert!(what.contains("bona fide"));
        }
        other => panic!("expected a shortfall, got {other:?}"),
    }
    let empty = tempfile::tempdir().unwrap();
    std::fs::create_dir(empty.path().join("real")).unwrap();
    std::fs::create_dir(empty.path().join("fake")).unwrap();
    assert!(matches!(
        generate_corpus(empty.path().join("real"), empty.path().join("fake"), empty.path().join("o"), &plan),
        Err(Error::CorpusExhausted { available: 0, .. })
    ));
}
