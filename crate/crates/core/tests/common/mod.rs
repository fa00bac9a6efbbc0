#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stegkit::bmp::synth_bmp;
use stegkit::WavClip;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random-content 24-bit BMP file bytes.
pub fn random_cover(rng: &mut ChaCha8Rng, width: u32, height: u32) -> Vec<u8> {
    synth_bmp(width, height, |_, _| rng.gen())
}

pub fn noise_clip(rng: &mut ChaCha8Rng, rate: u32, frames: usize, amplitude: i16) -> WavClip {
    let samples = (0..frames)
        .map(|_| rng.gen_range(-amplitude..=amplitude))
        .collect();
    WavClip::new(rate, 1, samples)
}

pub fn random_ext(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
    let len = rng.gen_range(0..=3);
    (0..len)
        .map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())] as char)
        .collect()
}

fn le_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

/// Byte-level port of the original C encoder's main loop, written against
/// raw file bytes only. Works only where that loop loses no data.
///
/// Header: copy the cover, store the payload length in the reserved field,
/// write '1' and the extension at offset head_size. Pixels: walk
/// `wid * height` 3-byte groups from `offset` with a gap counter, substituting a payload byte
/// whenever the counter reaches the spacing.
pub fn appendix_encrypt(cover: &[u8], msg: &[u8], ext: &[u8]) -> Vec<u8> {
    let f_size = le_u32(cover, 2) as usize;
    let offset = le_u32(cover, 10) as usize;
    let head_size = le_u32(cover, 14) as usize;
    let wid = le_u32(cover, 18) as usize;
    let height = le_u32(cover, 22) as usize;
    let pixel_spacing = (f_size - offset) / (3 * msg.len());

    let mut enc = cover.to_vec();
    enc[6..10].copy_from_slice(&(msg.len() as u32).to_le_bytes());
    enc[head_size] = b'1';
    for i in 0..3 {
        enc[head_size + 1 + i] = *ext.get(i).unwrap_or(&0);
    }

    let mut msg_iter = msg.iter();
    let mut gap = 0usize;
    let mut pos = offset;
    for _ in 0..wid * height {
        if gap == pixel_spacing {
            if let Some(&ch) = msg_iter.next() {
                let ch_r = (ch & 192) >> 6;
                let ch_g = (ch & 56) >> 3;
                let ch_b = ch & 7;
                enc[pos] = (enc[pos] & 252) | ch_r;
                enc[pos + 1] = (enc[pos + 1] & 248) | ch_g;
                enc[pos + 2] = (enc[pos + 2] & 248) | ch_b;
            }
            gap = 0;
        }
        gap += 1;
        pos += 3;
    }
    enc
}
