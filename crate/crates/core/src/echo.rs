//! Echo hiding in 16-bit PCM audio.
//!
//! Each bit owns one segment of `segment_len` samples of channel 0. Inside
//! that segment the output is `s[n] = f[n] + decay * f[n - d]`, where `d`
//! is `delay_one` for a 1 bit and `delay_zero` for a 0 bit, and `f` is the
//! cover indexed over the whole clip (so the echo source may lie in the
//! previous segment). A receiver holding only the stego clip compares the
//! real cepstrum of each segment at the two candidate delays.

use thiserror::Error;

use crate::cepstrum::CepstrumPlan;
use crate::exec::Execution;
use crate::wav::WavClip;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EchoError {
    #[error("{bits} bits of {segment_len} samples need {needed} frames, clip has {frames}")]
    TooManyBits {
        bits: usize,
        segment_len: usize,
        needed: usize,
        frames: usize,
    },
    #[error("bad echo parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoParams {
    pub delay_zero: usize,
    pub delay_one: usize,
    pub decay: f64,
    pub segment_len: usize,
}

impl Default for EchoParams {
    fn default() -> Self {
        Self {
            delay_zero: 50,
            delay_one: 100,
            decay: 0.5,
            segment_len: 1024,
        }
    }
}

impl EchoParams {
    pub fn validate(&self) -> Result<(), EchoError> {
        let bad = |msg: String| Err(EchoError::BadParams(msg));
        if self.delay_zero == 0 || self.delay_one == 0 {
            return bad("delays must be positive".into());
        }
        if self.delay_zero == self.delay_one {
            return bad(format!("delay_zero and delay_one both {}", self.delay_one));
        }
        let longest = self.delay_zero.max(self.delay_one);
        if 2 * longest >= self.segment_len {
            return bad(format!(
                "delay {longest} must be under half the segment length {}",
                self.segment_len
            ));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return bad(format!("decay {} outside (0, 1)", self.decay));
        }
        Ok(())
    }

    fn delay_for(&self, bit: bool) -> usize {
        if bit {
            self.delay_one
        } else {
            self.delay_zero
        }
    }
}

/// Bits in transmission order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitSequence(pub Vec<bool>);

impl BitSequence {
    /// Unpack bytes, most significant bit first.
    pub fn from_bytes_msb(bytes: &[u8]) -> Self {
        Self(
            bytes
                .iter()
                .flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
                .collect(),
        )
    }

    /// Pack bits most significant first; the last byte is zero-padded.
    pub fn to_bytes_msb(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &bit)| acc | ((bit as u8) << (7 - i)))
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for BitSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &bit in &self.0 {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn check_fit(nbits: usize, params: &EchoParams, frames: usize) -> Result<(), EchoError> {
    let needed = nbits.saturating_mul(params.segment_len);
    if needed > frames {
        return Err(EchoError::TooManyBits {
            bits: nbits,
            segment_len: params.segment_len,
            needed,
            frames,
        });
    }
    Ok(())
}

fn clamp_i16(v: i64) -> i16 {
    v.clamp(i16::MIN as i64, i16::MAX as i64) as i16
}

pub fn echo_embed(
    cover: &WavClip,
    bits: &BitSequence,
    params: &EchoParams,
) -> Result<WavClip, EchoError> {
    echo_embed_with(cover, bits, params, Execution::default())
}

pub fn echo_embed_with(
    cover: &WavClip,
    bits: &BitSequence,
    params: &EchoParams,
    exec: Execution,
) -> Result<WavClip, EchoError> {
    params.validate()?;
    check_fit(bits.len(), params, cover.frames())?;

    let source = cover.channel(0);
    let mut out = source.clone();
    let len = params.segment_len;
    let body = bits.len() * len;

    exec.for_each_chunk_mut(&mut out[..body], len, |i, segment| {
        let delay = params.delay_for(bits.0[i]);
        let start = i * len;
        for (offset, sample) in segment.iter_mut().enumerate() {
            let n = start + offset;
            let echo = match n.checked_sub(delay) {
                Some(m) => (params.decay * source[m] as f64).round() as i64,
                None => 0,
            };
            *sample = clamp_i16(source[n] as i64 + echo);
        }
    });

    let mut stego = cover.clone();
    stego.set_channel(0, &out);
    Ok(stego)
}

pub fn echo_extract(
    stego: &WavClip,
    nbits: usize,
    params: &EchoParams,
) -> Result<BitSequence, EchoError> {
    echo_extract_with(stego, nbits, params, Execution::default())
}

pub fn echo_extract_with(
    stego: &WavClip,
    nbits: usize,
    params: &EchoParams,
    exec: Execution,
) -> Result<BitSequence, EchoError> {
    params.validate()?;
    check_fit(nbits, params, stego.frames())?;

    let signal = stego.channel(0);
    let plan = CepstrumPlan::new(params.segment_len);
    let len = params.segment_len;
    let bits = exec.map_indices(nbits, |i| {
        let c = plan.compute(&signal[i * len..(i + 1) * len]);
        c[params.delay_one] > c[params.delay_zero]
    });
    Ok(BitSequence(bits))
}

/// Strongest cepstral peak in one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayEstimate {
    pub delay: usize,
    /// Cepstrum value at `delay`.
    pub peak: f64,
    /// `peak` divided by the RMS of the other searched coefficients. Values
    /// near the expected maximum of noise (3-4) mean there is no real echo.
    pub strength: f64,
}

pub fn estimate_echo_delay(
    stego: &WavClip,
    segment_index: usize,
    max_delay: usize,
    params: &EchoParams,
) -> Result<DelayEstimate, EchoError> {
    params.validate()?;
    let len = params.segment_len;
    if max_delay == 0 || 2 * max_delay >= len {
        return Err(EchoError::BadParams(format!(
            "max_delay {max_delay} must be in 1..{}",
            len.div_ceil(2)
        )));
    }
    let frames = stego.frames();
    if (segment_index + 1) * len > frames {
        return Err(EchoError::BadParams(format!(
            "segment {segment_index} ends past the clip's {frames} frames"
        )));
    }

    let signal = stego.channel(0);
    let start = segment_index * len;
    let c = CepstrumPlan::new(len).compute(&signal[start..start + len]);
    let searched = &c[1..=max_delay];
    let (idx, &peak) = searched
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty search range");

    let rest: Vec<f64> = searched
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, &v)| v)
        .collect();
    let rms = if rest.is_empty() {
        0.0
    } else {
        (rest.iter().map(|v| v * v).sum::<f64>() / rest.len() as f64).sqrt()
    };
    let strength = if rms > 0.0 { peak / rms } else { f64::INFINITY };

    Ok(DelayEstimate {
        delay: idx + 1,
        peak,
        strength,
    })
}
