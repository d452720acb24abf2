//! Threshold-free evaluation: ROC, AUC and EER over labelled detector
//! scores.
//!
//! A track is called spliced when `score >= threshold`.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{score_track, DetectorConfig};
use crate::error::{Error, Result};
use crate::io::{self, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScore {
    pub track_id: String,
    /// Detector output `d`, dB.
    pub score: f64,
    pub label: Label,
}

impl LabeledScore {
    pub fn new(track_id: impl Into<String>, score: f64, label: Label) -> Self {
        Self {
            track_id: track_id.into(),
            score,
            label,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// `None` for the initial (0, 0) point, which no finite threshold reaches.
    pub threshold: Option<f64>,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eer {
    pub eer: f64,
    pub threshold: f64,
}

fn class_counts(scores: &[LabeledScore]) -> Result<(usize, usize)> {
    if let Some(s) = scores.iter().find(|s| !s.score.is_finite()) {
        return Err(Error::invalid(format!("score for `{}` is not finite", s.track_id)));
    }
    let pos = scores.iter().filter(|s| s.label == Label::Spliced).count();
    let neg = scores.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::invalid(format!(
            "need both classes, got {pos} spliced and {neg} bona fide"
        )));
    }
    Ok((pos, neg))
}

/// Groups of equal scores in ascending order, as `(score, pos, neg)`.
fn tie_groups(scores: &[LabeledScore]) -> Vec<(f64, usize, usize)> {
    let mut sorted: Vec<(f64, bool)> = scores
        .iter()
        .map(|s| (s.score, s.label == Label::Spliced))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut groups: Vec<(f64, usize, usize)> = Vec::new();
    for (score, is_pos) in sorted {
        match groups.last_mut() {
            Some(g) if g.0 == score => {}
            _ => groups.push((score, 0, 0)),
        }
        let g = groups.last_mut().unwrap();
        if is_pos {
            g.1 += 1;
        } else {
            g.2 += 1;
        }
    }
    groups
}

/// Mann–Whitney AUC: the share of (spliced, bona fide) pairs ordered
/// correctly, ties counting half.
pub fn compute_auc(scores: &[LabeledScore]) -> Result<f64> {
    let (p, n) = class_counts(scores)?;
    let mut rank = 0usize;
    let mut pos_rank_sum = 0.0;
    for (_, gp, gn) in tie_groups(scores) {
        let size = gp + gn;
        let mid = (2 * rank + size + 1) as f64 / 2.0;
        pos_rank_sum += mid * gp as f64;
        rank += size;
    }
    let u = pos_rank_sum - (p * (p + 1)) as f64 / 2.0;
    Ok(u / (p as f64 * n as f64))
}

/// Operating points from the strictest threshold down to the most lenient:
/// (0, 0), then one point per distinct score, ending at (1, 1).
pub fn roc_curve(scores: &[LabeledScore]) -> Result<Vec<RocPoint>> {
    let (p, n) = class_counts(scores)?;
    let mut out = vec![RocPoint {
        threshold: None,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    for (score, gp, gn) in tie_groups(scores).into_iter().rev() {
        tp += gp;
        fp += gn;
        out.push(RocPoint {
            threshold: Some(score),
            fpr: fp as f64 / n as f64,
            tpr: tp as f64 / p as f64,
        });
    }
    Ok(out)
}

/// Sweeps thresholds at every distinct score plus one just above the
/// maximum, and interpolates linearly where `FPR − FNR` changes sign.
pub fn compute_eer(scores: &[LabeledScore]) -> Result<Eer> {
    let (p, n) = class_counts(scores)?;
    let groups = tie_groups(scores);
    let sentinel = groups.last().unwrap().0.next_up();

    // (threshold, fpr, fnr), thresholds ascending
    let mut sweep = Vec::with_capacity(groups.len() + 1);
    let (mut pos_below, mut neg_below) = (0usize, 0usize);
    for &(score, gp, gn) in &groups {
        sweep.push((
            score,
            (n - neg_below) as f64 / n as f64,
            pos_below as f64 / p as f64,
        ));
        pos_below += gp;
        neg_below += gn;
    }
    sweep.push((sentinel, 0.0, 1.0));

    // FPR − FNR starts at 1 and ends at −1, and never increases
    let i = sweep
        .iter()
        .position(|&(_, fpr, fnr)| fpr - fnr <= 0.0)
        .expect("sweep ends with FPR − FNR = −1");
    let (t1, fpr1, fnr1) = sweep[i];
    if fpr1 == fnr1 {
        return Ok(Eer {
            eer: fpr1,
            threshold: t1,
        });
    }
    let (t0, fpr0, fnr0) = sweep[i - 1];
    let d0 = fpr0 - fnr0;
    let d1 = fpr1 - fnr1;
    let alpha = d0 / (d0 - d1);
    Ok(Eer {
        eer: fpr0 + alpha * (fpr1 - fpr0),
        threshold: t0 + alpha * (t1 - t0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackError {
    pub track_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub auc: f64,
    pub eer: f64,
    pub eer_threshold: f64,
    pub n_pos: usize,
    pub n_neg: usize,
    pub excluded: usize,
    pub config: DetectorConfig,
    pub roc: Vec<RocPoint>,
    /// Sorted by track id.
    pub scores: Vec<LabeledScore>,
    pub errors: Vec<TrackError>,
}

impl EvalReport {
    pub fn from_scores(
        mut scores: Vec<LabeledScore>,
        config: DetectorConfig,
        mut errors: Vec<TrackError>,
    ) -> Result<Self> {
        scores.sort_by(|a, b| a.track_id.cmp(&b.track_id));
        errors.sort_by(|a, b| a.track_id.cmp(&b.track_id));
        let (n_pos, n_neg) = class_counts(&scores)?;
        let eer = compute_eer(&scores)?;
        Ok(Self {
            auc: compute_auc(&scores)?,
            eer: eer.eer,
            eer_threshold: eer.threshold,
            n_pos,
            n_neg,
            excluded: errors.len(),
            config,
            roc: roc_curve(&scores)?,
            scores,
            errors,
        })
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut bytes = serde_json::to_vec_pretty(self).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        bytes.push(b'\n');
        io::write_file(path, &bytes)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_slice(&bytes).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Columns `threshold,fpr,tpr`; the threshold of the (0, 0) point is
    /// written as `inf`.
    pub fn write_roc_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut s = String::from("threshold,fpr,tpr\n");
        for p in &self.roc {
            match p.threshold {
                Some(t) => s.push_str(&format!("{t},{},{}\n", p.fpr, p.tpr)),
                None => s.push_str(&format!("inf,{},{}\n", p.fpr, p.tpr)),
            }
        }
        io::write_file(path.as_ref(), s.as_bytes())
    }
}

/// Scores every track listed in the manifest. Tracks that fail to load or
/// score are excluded and listed in the report's `errors`.
pub fn evaluate_corpus(manifest: impl AsRef<Path>, cfg: &DetectorConfig) -> Result<EvalReport> {
    let manifest = manifest.as_ref();
    let rows = io::read_manifest(manifest)?;
    let dir = manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let results: Vec<std::result::Result<LabeledScore, TrackError>> = rows
        .par_iter()
        .map(|row| {
            let path: PathBuf = row.resolve(&dir);
            io::read_wav(&path)
                .and_then(|x| score_track(&x, cfg))
                .map(|s| LabeledScore::new(row.path.clone(), s.d, row.label))
                .map_err(|e| {
                    log::warn!("excluding {}: {e}", row.path);
                    TrackError {
                        track_id: row.path.clone(),
                        error: e.to_string(),
                    }
                })
        })
        .collect();
    let (mut scores, mut errors) = (Vec::new(), Vec::new());
    for r in results {
        match r {
            Ok(s) => scores.push(s),
            Err(e) => errors.push(e),
        }
    }
    EvalReport::from_scores(scores, cfg.clone(), errors)
}
