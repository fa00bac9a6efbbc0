//! RIFF/WAVE container restricted to 16-bit integer PCM.
//!
//! Chunks other than `fmt ` and the first `data` chunk are kept verbatim,
//! in their original order, so a parsed file serializes back unchanged.

use thiserror::Error;

pub const MIN_WAV_LEN: usize = 44;

const PCM_FORMAT: u16 = 1;
const FMT_BASE_LEN: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WavError {
    #[error("not a RIFF/WAVE file")]
    NotWav,
    #[error("unsupported WAV: {0}")]
    UnsupportedWav(String),
    #[error("truncated WAV: {0}")]
    Truncated(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiffChunk {
    pub id: [u8; 4],
    pub body: Vec<u8>,
    /// Value of the pad byte that follows an odd-length body.
    pub pad: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Fmt,
    Data,
    Extra(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavClip {
    pub sample_rate: u32,
    pub channels: u16,
    /// Interleaved 16-bit samples.
    pub samples: Vec<i16>,
    pub extra_chunks: Vec<RiffChunk>,
    /// Bytes of the fmt chunk past the 16-byte PCM core (e.g. `cbSize`).
    fmt_tail: Vec<u8>,
    order: Vec<Slot>,
}

impl WavClip {
    pub const BITS_PER_SAMPLE: u16 = 16;

    /// A canonical 44-byte-header clip.
    pub fn new(sample_rate: u32, channels: u16, samples: Vec<i16>) -> Self {
        assert!(channels > 0, "clip needs at least one channel");
        assert_eq!(
            samples.len() % channels as usize,
            0,
            "sample count must be a multiple of the channel count"
        );
        Self {
            sample_rate,
            channels,
            samples,
            extra_chunks: Vec::new(),
            fmt_tail: Vec::new(),
            order: vec![Slot::Fmt, Slot::Data],
        }
    }

    pub fn bits_per_sample(&self) -> u16 {
        Self::BITS_PER_SAMPLE
    }

    pub fn frames(&self) -> usize {
        self.samples.len() / self.channels as usize
    }

    /// De-interleaved copy of one channel.
    pub fn channel(&self, index: usize) -> Vec<i16> {
        self.samples
            .iter()
            .skip(index)
            .step_by(self.channels as usize)
            .copied()
            .collect()
    }

    /// Overwrite one channel from a de-interleaved buffer of `frames()` samples.
    pub fn set_channel(&mut self, index: usize, values: &[i16]) {
        assert_eq!(values.len(), self.frames());
        let stride = self.channels as usize;
        for (slot, &v) in self
            .samples
            .iter_mut()
            .skip(index)
            .step_by(stride)
            .zip(values)
        {
            *slot = v;
        }
    }

    fn block_align(&self) -> u16 {
        self.channels * (Self::BITS_PER_SAMPLE / 8)
    }
}

fn read_u16(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

pub fn parse_wav(bytes: &[u8]) -> Result<WavClip, WavError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(WavError::NotWav);
    }
    if bytes.len() < MIN_WAV_LEN {
        return Err(WavError::Truncated(format!(
            "{} bytes, need at least {MIN_WAV_LEN}",
            bytes.len()
        )));
    }
    let riff_end = read_u32(bytes, 4) as u64 + 8;
    if riff_end > bytes.len() as u64 {
        return Err(WavError::Truncated(format!(
            "RIFF size claims {riff_end} bytes, file has {}",
            bytes.len()
        )));
    }
    if riff_end < bytes.len() as u64 {
        return Err(WavError::UnsupportedWav(format!(
            "{} trailing bytes after RIFF chunk",
            bytes.len() as u64 - riff_end
        )));
    }

    let mut fmt: Option<Vec<u8>> = None;
    let mut data: Option<Vec<u8>> = None;
    let mut extra_chunks = Vec::new();
    let mut order = Vec::new();

    let mut pos = 12;
    while pos < bytes.len() {
        if bytes.len() - pos < 8 {
            return Err(WavError::Truncated(format!(
                "partial chunk header at {pos}"
            )));
        }
        let id: [u8; 4] = bytes[pos..pos + 4].try_into().expect("4-byte slice");
        let len = read_u32(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(len)
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| {
                WavError::Truncated(format!(
                    "chunk {:?} at {pos} claims {len} bytes",
                    String::from_utf8_lossy(&id)
                ))
            })?;
        let body = bytes[body_start..body_end].to_vec();
        let mut pad = 0;
        pos = body_end;
        if len % 2 == 1 {
            pad = *bytes
                .get(pos)
                .ok_or_else(|| WavError::Truncated("missing chunk pad byte".into()))?;
            pos += 1;
        }

        match &id {
            b"fmt " if fmt.is_none() => {
                fmt = Some(body);
                order.push(Slot::Fmt);
            }
            b"data" if data.is_none() => {
                if fmt.is_none() {
                    return Err(WavError::UnsupportedWav(
                        "data chunk before fmt chunk".into(),
                    ));
                }
                data = Some(body);
                order.push(Slot::Data);
            }
            _ => {
                order.push(Slot::Extra(extra_chunks.len()));
                extra_chunks.push(RiffChunk { id, body, pad });
            }
        }
    }

    let fmt = fmt.ok_or_else(|| WavError::UnsupportedWav("missing fmt chunk".into()))?;
    let data = data.ok_or_else(|| WavError::UnsupportedWav("missing data chunk".into()))?;
    if fmt.len() < FMT_BASE_LEN {
        return Err(WavError::Truncated(format!(
            "fmt chunk of {} bytes",
            fmt.len()
        )));
    }

    let format_tag = read_u16(&fmt, 0);
    let channels = read_u16(&fmt, 2);
    let sample_rate = read_u32(&fmt, 4);
    let byte_rate = read_u32(&fmt, 8);
    let block_align = read_u16(&fmt, 12);
    let bits = read_u16(&fmt, 14);

    if format_tag != PCM_FORMAT {
        return Err(WavError::UnsupportedWav(format!(
            "format tag {format_tag:#06x}"
        )));
    }
    if bits != WavClip::BITS_PER_SAMPLE {
        return Err(WavError::UnsupportedWav(format!("{bits} bits per sample")));
    }
    if channels == 0 || sample_rate == 0 {
        return Err(WavError::UnsupportedWav(format!(
            "{channels} channels at {sample_rate} Hz"
        )));
    }
    if block_align as u32 != channels as u32 * 2
        || byte_rate as u64 != sample_rate as u64 * block_align as u64
    {
        return Err(WavError::UnsupportedWav(format!(
            "inconsistent fmt: block align {block_align}, byte rate {byte_rate}"
        )));
    }
    if data.len() % block_align as usize != 0 {
        return Err(WavError::UnsupportedWav(format!(
            "data length {} is not a whole number of frames",
            data.len()
        )));
    }

    let samples = data
        .chunks_exact(2)
        .map(|p| i16::from_le_bytes([p[0], p[1]]))
        .collect();

    Ok(WavClip {
        sample_rate,
        channels,
        samples,
        extra_chunks,
        fmt_tail: fmt[FMT_BASE_LEN..].to_vec(),
        order,
    })
}

fn push_chunk(out: &mut Vec<u8>, id: &[u8; 4], body: &[u8], pad: u8) {
    out.extend_from_slice(id);
    out.extend_from_slice(&(body.len() as u32).to_le_bytes());
    out.extend_from_slice(body);
    if body.len() % 2 == 1 {
        out.push(pad);
    }
}

pub fn write_wav(clip: &WavClip) -> Vec<u8> {
    let mut out = Vec::with_capacity(MIN_WAV_LEN + clip.samples.len() * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&[0; 4]);
    out.extend_from_slice(b"WAVE");

    let mut slots = clip.order.clone();
    // Chunks appended by callers after parsing go at the end.
    let known = slots.iter().filter(|s| matches!(s, Slot::Extra(_))).count();
    slots.extend((known..clip.extra_chunks.len()).map(Slot::Extra));

    for slot in slots {
        match slot {
            Slot::Fmt => {
                let block_align = clip.block_align();
                let mut fmt = Vec::with_capacity(FMT_BASE_LEN + clip.fmt_tail.len());
                fmt.extend_from_slice(&PCM_FORMAT.to_le_bytes());
                fmt.extend_from_slice(&clip.channels.to_le_bytes());
                fmt.extend_from_slice(&clip.sample_rate.to_le_bytes());
                fmt.extend_from_slice(&(clip.sample_rate * block_align as u32).to_le_bytes());
                fmt.extend_from_slice(&block_align.to_le_bytes());
                fmt.extend_from_slice(&WavClip::BITS_PER_SAMPLE.to_le_bytes());
                fmt.extend_from_slice(&clip.fmt_tail);
                push_chunk(&mut out, b"fmt ", &fmt, 0);
            }
            Slot::Data => {
                let body: Vec<u8> = clip.samples.iter().flat_map(|s| s.to_le_bytes()).collect();
                push_chunk(&mut out, b"data", &body, 0);
            }
            Slot::Extra(i) => {
                if let Some(chunk) = clip.extra_chunks.get(i) {
                    push_chunk(&mut out, &chunk.id, &chunk.body, chunk.pad);
                }
            }
        }
    }

    let riff_len = (out.len() - 8) as u32;
    out[4..8].copy_from_slice(&riff_len.to_le_bytes());
    out
}
