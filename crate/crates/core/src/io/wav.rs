//! Mono RIFF/WAVE files, 16-bit PCM or 32-bit IEEE float.
//!
//! PCM16 samples map to `k / 32768`, so −32768 reads as exactly −1.0 and the
//! largest positive code is `32767/32768`. Writing clamps to that range.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WavEncoding {
    Pcm16,
    Float32,
}

impl WavEncoding {
    fn bytes_per_sample(self) -> usize {
        match self {
            WavEncoding::Pcm16 => 2,
            WavEncoding::Float32 => 4,
        }
    }
}

impl fmt::Display for WavEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WavEncoding::Pcm16 => "pcm16",
            WavEncoding::Float32 => "float32",
        })
    }
}

impl FromStr for WavEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pcm16" => Ok(WavEncoding::Pcm16),
            "float32" => Ok(WavEncoding::Float32),
            other => Err(Error::invalid(format!("unknown WAV encoding `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavFormat {
    pub encoding: WavEncoding,
    pub channels: u16,
    pub sample_rate: u32,
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    read_wav_with_format(path).map(|(x, _)| x)
}

pub fn read_wav_with_format(path: impl AsRef<Path>) -> Result<(AudioBuffer, WavFormat)> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_wav(&bytes, path)
}

pub fn write_wav(path: impl AsRef<Path>, x: &AudioBuffer, encoding: WavEncoding) -> Result<()> {
    super::write_file(path.as_ref(), &encode_wav(x, encoding))
}

/// Canonical byte layout: `RIFF`, `fmt ` (16 bytes for PCM; 18 plus a
/// `fact` chunk for float), then `data`.
pub fn encode_wav(x: &AudioBuffer, encoding: WavEncoding) -> Vec<u8> {
    let n = x.len();
    let bps = encoding.bytes_per_sample();
    let data_len = n * bps;
    let (format_tag, fmt_len, fact) = match encoding {
        WavEncoding::Pcm16 => (FORMAT_PCM, 16u32, false),
        WavEncoding::Float32 => (FORMAT_FLOAT, 18u32, true),
    };
    let mut out = Vec::with_capacity(60 + data_len + 1);
    let riff_len = 4 + (8 + fmt_len) + if fact { 12 } else { 0 } + 8 + data_len as u32 + (data_len as u32 & 1);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&riff_len.to_le_bytes());
    out.extend_from_slice(b"WAVE");

    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&fmt_len.to_le_bytes());
    out.extend_from_slice(&format_tag.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&x.sample_rate().to_le_bytes());
    out.extend_from_slice(&(x.sample_rate() * bps as u32).to_le_bytes());
    out.extend_from_slice(&(bps as u16).to_le_bytes());
    out.extend_from_slice(&(8 * bps as u16).to_le_bytes());
    if fmt_len == 18 {
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    if fact {
        out.extend_from_slice(b"fact");
        out.extend_from_slice(&4u32.to_le_bytes());
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }

    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    match encoding {
        WavEncoding::Pcm16 => {
            let mut clamped = 0usize;
            for &s in x.samples() {
                let (code, clipped) = pcm16_code(s);
                clamped += clipped as usize;
                out.extend_from_slice(&code.to_le_bytes());
            }
            if clamped > 0 {
                log::warn!("{clamped} samples outside [-1, 1) clamped for pcm16");
            }
        }
        WavEncoding::Float32 => {
            for &s in x.samples() {
                out.extend_from_slice(&(s as f32).to_le_bytes());
            }
        }
    }
    if data_len & 1 == 1 {
        out.push(0);
    }
    out
}

fn pcm16_code(s: f64) -> (i16, bool) {
    let scaled = (s * 32768.0).round();
    if scaled > i16::MAX as f64 {
        (i16::MAX, true)
    } else if scaled < i16::MIN as f64 {
        (i16::MIN, true)
    } else {
        (scaled as i16, false)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn err(&self, chunk: &'static str, msg: impl Into<String>) -> Error {
        Error::Wav {
            path: PathBuf::from(self.path),
            chunk,
            msg: msg.into(),
        }
    }

    fn u16_at(&self, at: usize) -> u16 {
        u16::from_le_bytes([self.bytes[at], self.bytes[at + 1]])
    }

    fn u32_at(&self, at: usize) -> u32 {
        u32::from_le_bytes(self.bytes[at..at + 4].try_into().unwrap())
    }
}

struct FmtChunk {
    encoding: WavEncoding,
    channels: u16,
    sample_rate: u32,
}

pub fn decode_wav(bytes: &[u8], path: &Path) -> Result<(AudioBuffer, WavFormat)> {
    let r = Reader { bytes, path };
    if bytes.len() < 12 {
        return Err(r.err("RIFF", format!("file is {} bytes, header needs 12", bytes.len())));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(r.err("RIFF", "missing RIFF signature"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(r.err("RIFF", "form type is not WAVE"));
    }
    let riff_len = r.u32_at(4) as usize;
    if riff_len + 8 != bytes.len() {
        return Err(r.err(
            "RIFF",
            format!(
                "declares {} bytes but file holds {}",
                riff_len + 8,
                bytes.len()
            ),
        ));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    let mut at = 12;
    while at < bytes.len() {
        if at + 8 > bytes.len() {
            return Err(r.err("RIFF", format!("truncated chunk header at byte {at}")));
        }
        let id: [u8; 4] = bytes[at..at + 4].try_into().unwrap();
        let len = r.u32_at(at + 4) as usize;
        let body = at + 8;
        let name = chunk_name(&id);
        if body + len > bytes.len() {
            return Err(r.err(
                name,
                format!(
                    "declares {len} bytes at offset {body} but only {} remain",
                    bytes.len() - body
                ),
            ));
        }
        match &id {
            b"fmt " => {
                if fmt.is_some() {
                    return Err(r.err("fmt ", "duplicate chunk"));
                }
                fmt = Some(parse_fmt(&r, body, len)?);
            }
            b"data" => {
                if fmt.is_none() {
                    return Err(r.err("data", "appears before `fmt `"));
                }
                if data.is_some() {
                    return Err(r.err("data", "duplicate chunk"));
                }
                data = Some(&bytes[body..body + len]);
            }
            _ => {}
        }
        at = body + len + (len & 1);
    }
    if at != bytes.len() {
        return Err(r.err("RIFF", "odd-length chunk is missing its pad byte"));
    }

    let fmt = fmt.ok_or_else(|| r.err("fmt ", "chunk missing"))?;
    let data = data.ok_or_else(|| r.err("data", "chunk missing"))?;
    let bps = fmt.encoding.bytes_per_sample();
    if data.len() % bps != 0 {
        return Err(r.err(
            "data",
            format!("{} bytes is not a whole number of {bps}-byte samples", data.len()),
        ));
    }
    let samples: Vec<f64> = match fmt.encoding {
        WavEncoding::Pcm16 => data
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / 32768.0)
            .collect(),
        WavEncoding::Float32 => data
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
    };
    if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
        return Err(r.err("data", format!("sample {i} is not finite")));
    }
    let buffer = AudioBuffer::new_allow_empty(samples, fmt.sample_rate)?;
    Ok((
        buffer,
        WavFormat {
            encoding: fmt.encoding,
            channels: fmt.channels,
            sample_rate: fmt.sample_rate,
        },
    ))
}

fn chunk_name(id: &[u8; 4]) -> &'static str {
    match id {
        b"fmt " => "fmt ",
        b"data" => "data",
        b"fact" => "fact",
        b"LIST" => "LIST",
        _ => "unknown",
    }
}

fn parse_fmt(r: &Reader<'_>, body: usize, len: usize) -> Result<FmtChunk> {
    if !matches!(len, 16 | 18 | 40) {
        return Err(r.err("fmt ", format!("unsupported chunk size {len}")));
    }
    let mut tag = r.u16_at(body);
    let channels = r.u16_at(body + 2);
    let sample_rate = r.u32_at(body + 4);
    let byte_rate = r.u32_at(body + 8);
    let block_align = r.u16_at(body + 12);
    let bits = r.u16_at(body + 14);
    if tag == FORMAT_EXTENSIBLE {
        if len != 40 {
            return Err(r.err("fmt ", "extensible format needs a 40-byte chunk"));
        }
        // first two bytes of the sub-format GUID carry the real tag
        tag = r.u16_at(body + 24);
    }
    let encoding = match (tag, bits) {
        (FORMAT_PCM, 16) => WavEncoding::Pcm16,
        (FORMAT_FLOAT, 32) => WavEncoding::Float32,
        (t, b) => {
            return Err(r.err(
                "fmt ",
                format!("unsupported encoding: format tag {t} with {b} bits per sample"),
            ))
        }
    };
    if channels != 1 {
        return Err(r.err("fmt ", format!("{channels} channels; only mono is supported")));
    }
    if sample_rate == 0 {
        return Err(r.err("fmt ", "sample rate is zero"));
    }
    let bps = encoding.bytes_per_sample() as u32;
    if block_align as u32 != bps {
        return Err(r.err("fmt ", format!("block align {block_align}, expected {bps}")));
    }
    if byte_rate != sample_rate * bps {
        return Err(r.err(
            "fmt ",
            format!("byte rate {byte_rate}, expected {}", sample_rate * bps),
        ));
    }
    Ok(FmtChunk {
        encoding,
        channels,
        sample_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> &'static Path {
        Path::new("mem.wav")
    }

    fn buf(v: Vec<f64>) -> AudioBuffer {
        AudioBuffer::new_allow_empty(v, 16000).unwrap()
    }

    #[test]
    fn pcm16_scaling() {
        let x = buf(vec![-1.0, 0.0, 0.5, 32767.0 / 32768.0]);
        let (y, fmt) = decode_wav(&encode_wav(&x, WavEncoding::Pcm16), p()).unwrap();
        assert_eq!(y, x);
        assert_eq!(fmt.encoding, WavEncoding::Pcm16);
        assert_eq!(fmt.sample_rate, 16000);
    }

    #[test]
    fn pcm16_clamps() {
        let x = buf(vec![1.0, -1.5]);
        let (y, _) = decode_wav(&encode_wav(&x, WavEncoding::Pcm16), p()).unwrap();
        assert_eq!(y.samples(), &[32767.0 / 32768.0, -1.0]);
    }

    #[test]
    fn canonical_header() {
        let bytes = encode_wav(&buf(vec![0.0; 3]), WavEncoding::Pcm16);
        assert_eq!(bytes.len(), 44 + 6);
        assert_eq!(&bytes[36..40], b"data");
        let float = encode_wav(&buf(vec![0.0; 3]), WavEncoding::Float32);
        assert_eq!(float.len(), 12 + 26 + 12 + 8 + 12);
    }

    #[test]
    fn empty_data_chunk() {
        let bytes = encode_wav(&buf(vec![]), WavEncoding::Float32);
        let (y, _) = decode_wav(&bytes, p()).unwrap();
        assert!(y.is_empty());
    }

    #[test]
    fn truncated_data_is_an_error() {
        let mut bytes = encode_wav(&buf(vec![0.25; 10]), WavEncoding::Pcm16);
        bytes.truncate(bytes.len() - 4);
        // keep RIFF length consistent so the data chunk itself is the culprit
        let riff = (bytes.len() - 8) as u32;
        bytes[4..8].copy_from_slice(&riff.to_le_bytes());
        match decode_wav(&bytes, p()) {
            Err(Error::Wav { chunk, .. }) => assert_eq!(chunk, "data"),
            other => panic!("expected data chunk error, got {other:?}"),
        }
    }

    #[test]
    fn riff_length_mismatch() {
        let mut bytes = encode_wav(&buf(vec![0.25; 10]), WavEncoding::Pcm16);
        bytes.truncate(bytes.len() - 2);
        assert!(matches!(decode_wav(&bytes, p()), Err(Error::Wav { chunk: "RIFF", .. })));
    }

    #[test]
    fn rejects_stereo_and_24_bit() {
        let mut stereo = encode_wav(&buf(vec![0.0; 4]), WavEncoding::Pcm16);
        stereo[22] = 2;
        assert!(matches!(decode_wav(&stereo, p()), Err(Error::Wav { chunk: "fmt ", .. })));
        let mut bits = encode_wav(&buf(vec![0.0; 4]), WavEncoding::Pcm16);
        bits[34] = 24;
        let err = decode_wav(&bits, p()).unwrap_err().to_string();
        assert!(err.contains("unsupported encoding"), "{err}");
    }

    #[test]
    fn rejects_missing_chunks() {
        assert!(decode_wav(b"RIFF\x04\x00\x00\x00WAVE", p()).is_err());
        assert!(decode_wav(b"RIFX", p()).is_err());
    }

    #[test]
    fn skips_unknown_chunks() {
        let plain = encode_wav(&buf(vec![0.5, -0.5]), WavEncoding::Pcm16);
        let mut with_list = plain[..36].to_vec();
        with_list.extend_from_slice(b"LIST\x03\x00\x00\x00abc\x00");
        with_list.extend_from_slice(&plain[36..]);
        let riff = (with_list.len() - 8) as u32;
        with_list[4..8].copy_from_slice(&riff.to_le_bytes());
        let (y, _) = decode_wav(&with_list, p()).unwrap();
        assert_eq!(y.samples(), &[0.5, -0.5]);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/x.wav");
        let x = buf(vec![0.1, -0.2, 0.3]);
        write_wav(&path, &x, WavEncoding::Float32).unwrap();
        let y = read_wav(&path).unwrap();
        for (a, b) in x.samples().iter().zip(y.samples()) {
            assert_eq!(*a as f32, *b as f32);
        }
        assert!(matches!(read_wav(dir.path().join("none.wav")), Err(Error::Io { .. })));
    }

    proptest! {
        #[test]
        fn float32_round_trip_is_bitwise(v in prop::collection::vec(-4.0f32..4.0, 0..200)) {
            let x = buf(v.iter().map(|s| *s as f64).collect());
            let (y, _) = decode_wav(&encode_wav(&x, WavEncoding::Float32), p()).unwrap();
            prop_assert_eq!(y.samples(), x.samples());
        }

        #[test]
        fn pcm16_grid_round_trip(codes in prop::collection::vec(i16::MIN..=i16::MAX, 0..200)) {
            let x = buf(codes.iter().map(|c| *c as f64 / 32768.0).collect());
            let bytes = encode_wav(&x, WavEncoding::Pcm16);
            let (y, _) = decode_wav(&bytes, p()).unwrap();
            prop_assert_eq!(y.samples(), x.samples());
            prop_assert_eq!(encode_wav(&y, WavEncoding::Pcm16), bytes);
        }
    }
}
