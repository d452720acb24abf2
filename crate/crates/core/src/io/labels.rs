//! Segment-level ground truth in three dialects.
//!
//! | dialect | one record |
//! |---|---|
//! | `native` | CSV with header `track_id,start,end,class`, class `real` or `fake` |
//! | `partialspoof` | `utt start end bonafide\|spoof`, one segment per line |
//! | `had` | `utt s-e-T/s-e-F/... label`, one track per line; `T` is real, `F` fake, trailing label `1` real or `0` fake |
//!
//! Fields are separated by any whitespace in the line-oriented dialects;
//! nothing else is tolerated. Times are seconds.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::manifest::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelDialect {
    Native,
    PartialSpoof,
    Had,
}

impl fmt::Display for LabelDialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LabelDialect::Native => "native",
            LabelDialect::PartialSpoof => "partialspoof",
            LabelDialect::Had => "had",
        })
    }
}

impl FromStr for LabelDialect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "native" => Ok(LabelDialect::Native),
            "partialspoof" => Ok(LabelDialect::PartialSpoof),
            "had" => Ok(LabelDialect::Had),
            other => Err(Error::invalid(format!("unknown label dialect `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentClass {
    Real,
    Fake,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub class: SegmentClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentLabels {
    pub track_id: String,
    pub segments: Vec<Segment>,
}

impl SegmentLabels {
    /// Spliced iff both classes occur.
    pub fn track_label(&self) -> Label {
        let has = |c| self.segments.iter().any(|s| s.class == c);
        if has(SegmentClass::Real) && has(SegmentClass::Fake) {
            Label::Spliced
        } else {
            Label::BonaFide
        }
    }

    /// Times where the class changes between neighbouring segments. With a
    /// gap between them the midpoint of the gap is used.
    pub fn splice_times(&self) -> Vec<f64> {
        self.segments
            .windows(2)
            .filter(|w| w[0].class != w[1].class)
            .map(|w| 0.5 * (w[0].end + w[1].start))
            .collect()
    }

    fn validate(&self, path: &Path) -> Result<()> {
        let mut bad = Vec::new();
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.start >= 0.0 && s.end > s.start && s.end.is_finite()) {
                bad.push(format!("segment {i} [{}, {}] is empty or negative", s.start, s.end));
            }
        }
        for (i, w) in self.segments.windows(2).enumerate() {
            if w[1].start < w[0].end {
                bad.push(format!(
                    "segments {i} [{}, {}] and {} [{}, {}] overlap or are out of order",
                    w[0].start,
                    w[0].end,
                    i + 1,
                    w[1].start,
                    w[1].end
                ));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(labels_err(path, format!("track `{}`: {}", self.track_id, bad.join("; "))))
        }
    }
}

fn labels_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Labels {
        path: PathBuf::from(path),
        msg: msg.into(),
    }
}

/// Reads a file that must describe exactly one track.
pub fn read_segment_labels(path: impl AsRef<Path>, dialect: LabelDialect) -> Result<SegmentLabels> {
    let path = path.as_ref();
    let mut table = read_label_table(path, dialect)?;
    if table.len() != 1 {
        let ids: Vec<_> = table.iter().map(|t| t.track_id.as_str()).collect();
        return Err(labels_err(
            path,
            format!("expected one track, found {}: {}", table.len(), ids.join(", ")),
        ));
    }
    Ok(table.pop().unwrap())
}

/// Reads every track in the file, ordered by track id.
pub fn read_label_table(path: impl AsRef<Path>, dialect: LabelDialect) -> Result<Vec<SegmentLabels>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_label_table(&text, dialect, path)
}

pub fn parse_label_table(text: &str, dialect: LabelDialect, path: &Path) -> Result<Vec<SegmentLabels>> {
    let mut tracks: BTreeMap<String, Vec<Segment>> = BTreeMap::new();
    match dialect {
        LabelDialect::Native => parse_native(text, path, &mut tracks)?,
        LabelDialect::PartialSpoof => parse_partialspoof(text, path, &mut tracks)?,
        LabelDialect::Had => parse_had(text, path, &mut tracks)?,
    }
    if tracks.is_empty() {
        return Err(labels_err(path, "no segments"));
    }
    let out: Vec<_> = tracks
        .into_iter()
        .map(|(track_id, segments)| SegmentLabels { track_id, segments })
        .collect();
    for t in &out {
        t.validate(path)?;
    }
    Ok(out)
}

fn parse_time(s: &str, path: &Path, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|t| t.is_finite())
        .ok_or_else(|| labels_err(path, format!("line {line}: bad time `{s}`")))
}

#[derive(Deserialize)]
struct NativeRecord {
    track_id: String,
    start: f64,
    end: f64,
    class: SegmentClass,
}

fn parse_native(text: &str, path: &Path, tracks: &mut BTreeMap<String, Vec<Segment>>) -> Result<()> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    if headers != vec!["track_id", "start", "end", "class"] {
        return Err(labels_err(
            path,
            "line 1: header must be `track_id,start,end,class`",
        ));
    }
    for rec in r.deserialize::<NativeRecord>() {
        let rec = rec.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        tracks.entry(rec.track_id).or_default().push(Segment {
            start: rec.start,
            end: rec.end,
            class: rec.class,
        });
    }
    Ok(())
}

fn parse_partialspoof(text: &str, path: &Path, tracks: &mut BTreeMap<String, Vec<Segment>>) -> Result<()> {
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let [utt, start, end, class] = fields[..] else {
            return Err(labels_err(path, format!("line {n}: expected 4 fields, found {}", fields.len())));
        };
        let class = match class {
            "bonafide" => SegmentClass::Real,
            "spoof" => SegmentClass::Fake,
            other => return Err(labels_err(path, format!("line {n}: unknown class `{other}`"))),
        };
        tracks.entry(utt.to_string()).or_default().push(Segment {
            start: parse_time(start, path, n)?,
            end: parse_time(end, path, n)?,
            class,
        });
    }
    Ok(())
}

fn parse_had(text: &str, path: &Path, tracks: &mut BTreeMap<String, Vec<Segment>>) -> Result<()> {
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let (utt, spans, overall) = match fields[..] {
            [u, s] => (u, s, None),
            [u, s, l] => (u, s, Some(l)),
            _ => {
                return Err(labels_err(
                    path,
                    format!("line {n}: expected 2 or 3 fields, found {}", fields.len()),
                ))
            }
        };
        if tracks.contains_key(utt) {
            return Err(labels_err(path, format!("line {n}: track `{utt}` listed twice")));
        }
        let mut segments = Vec::new();
        for span in spans.split('/') {
            let parts: Vec<&str> = span.split('-').collect();
            let [s, e, c] = parts[..] else {
                return Err(labels_err(path, format!("line {n}: bad segment `{span}`")));
            };
            let class = match c {
                "T" => SegmentClass::Real,
                "F" => SegmentClass::Fake,
                other => return Err(labels_err(path, format!("line {n}: unknown class `{other}`"))),
            };
            segments.push(Segment {
                start: parse_time(s, path, n)?,
                end: parse_time(e, path, n)?,
                class,
            });
        }
        if let Some(l) = overall {
            let any_fake = segments.iter().any(|s| s.class == SegmentClass::Fake);
            let claimed_fake = match l {
                "0" => true,
                "1" => false,
                other => return Err(labels_err(path, format!("line {n}: unknown track label `{other}`"))),
            };
            if claimed_fake != any_fake {
                return Err(labels_err(
                    path,
                    format!("line {n}: track label `{l}` contradicts its segments"),
                ));
            }
        }
        tracks.insert(utt.to_string(), segments);
    }
    Ok(())
}
