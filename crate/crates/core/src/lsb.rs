//! 2-3-3 LSB substitution into the carrier of a 24-bit BMP.
//!
//! One payload byte goes into one 3-byte carrier group: its top two bits
//! replace the low two bits of the first byte, the middle three bits the
//! low three of the second, the bottom three bits the low three of the
//! third. Payload bytes land on groups `ps, 2*ps, ..., M*ps` where
//! `ps = carrier_len / (3 * M)`, reduced by one in the cases where that
//! would run off the end of the carrier (see [`embed_stride`]).
//!
//! Stego metadata lives in the header: the payload length in the reserved
//! field (bytes 6-9, little-endian), the marker `'1'` at byte `info_size`
//! and a zero-padded three byte extension right after it.

use std::fmt;

use thiserror::Error;

use crate::bmp::BmpImage;

pub const MARKER: u8 = b'1';
pub const EXTENSION_LEN: usize = 3;

const RESERVED_OFFSET: usize = 6;
/// Marker byte plus extension.
const TAG_LEN: usize = 1 + EXTENSION_LEN;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LsbError {
    #[error("payload of {payload} bytes exceeds cover capacity of {capacity} bytes")]
    CapacityExceeded { payload: usize, capacity: usize },
    #[error("extension {0:?} is longer than 3 characters")]
    ExtensionTooLong(String),
    #[error("extension {0:?} must be printable ASCII without '.'")]
    InvalidExtension(String),
    #[error("payload is empty")]
    EmptyPayload,
    #[error("marker region {start}..{end} spills into pixel data at {data_offset}")]
    MetadataCollision {
        start: usize,
        end: usize,
        data_offset: usize,
    },
    #[error("no stego marker: unrecognised format, can't be extracted")]
    NotGenuineStego,
    #[error("corrupt stego metadata: {0}")]
    CorruptMetadata(String),
}

/// One carrier group, in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PackedChannels {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl PackedChannels {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    fn read(bytes: &[u8]) -> Self {
        Self::new(bytes[0], bytes[1], bytes[2])
    }

    fn write(self, bytes: &mut [u8]) {
        bytes[..3].copy_from_slice(&[self.r, self.g, self.b]);
    }
}

/// A payload byte split into its 2-3-3 bit fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PayloadByte(pub u8);

impl PayloadByte {
    pub fn red_bits(self) -> u8 {
        (self.0 & 0xC0) >> 6
    }

    pub fn green_bits(self) -> u8 {
        (self.0 & 0x38) >> 3
    }

    pub fn blue_bits(self) -> u8 {
        self.0 & 0x07
    }
}

pub fn pack_byte(carrier: PackedChannels, ch: u8) -> PackedChannels {
    let ch = PayloadByte(ch);
    PackedChannels {
        r: (carrier.r & 0xFC) | ch.red_bits(),
        g: (carrier.g & 0xF8) | ch.green_bits(),
        b: (carrier.b & 0xF8) | ch.blue_bits(),
    }
}

pub fn unpack_byte(carrier: PackedChannels) -> u8 {
    ((carrier.r & 0x03) << 6) | ((carrier.g & 0x07) << 3) | (carrier.b & 0x07)
}

/// Spacing between embedded groups as the original tool computed it:
/// `carrier_len / (3 * payload_size)`.
pub fn pixel_spacing(carrier_len: usize, payload_size: usize) -> Result<usize, LsbError> {
    if payload_size == 0 {
        return Err(LsbError::EmptyPayload);
    }
    match carrier_len / (3 * payload_size) {
        0 => Err(LsbError::CapacityExceeded {
            payload: payload_size,
            capacity: capacity_for_len(carrier_len),
        }),
        ps => Ok(ps),
    }
}

/// Stride actually used to place payload bytes at groups `ps, 2*ps, ..,
/// M*ps`.
///
/// Equal to [`pixel_spacing`] whenever that layout fits. When the payload
/// size divides the group count, `M * pixel_spacing` lands one past the
/// last group (the original tool silently lost the final byte there), and
/// the stride is one less. Both cases are `(groups - 1) / M`.
pub fn embed_stride(carrier_len: usize, payload_size: usize) -> Result<usize, LsbError> {
    if payload_size == 0 {
        return Err(LsbError::EmptyPayload);
    }
    let groups = carrier_len / 3;
    match groups.saturating_sub(1) / payload_size {
        0 => Err(LsbError::CapacityExceeded {
            payload: payload_size,
            capacity: capacity_for_len(carrier_len),
        }),
        ps => Ok(ps),
    }
}

/// Largest payload that fits a carrier of `carrier_len` bytes. Every
/// smaller size fits as well.
pub fn capacity_for_len(carrier_len: usize) -> usize {
    (carrier_len / 3).saturating_sub(1).min(u32::MAX as usize)
}

pub fn capacity(image: &BmpImage) -> usize {
    capacity_for_len(image.carrier.len())
}

/// Three stored extension bytes, zero padded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Extension([u8; EXTENSION_LEN]);

impl Extension {
    pub fn parse(ext: &str) -> Result<Self, LsbError> {
        if ext.len() > EXTENSION_LEN {
            return Err(LsbError::ExtensionTooLong(ext.to_owned()));
        }
        if !ext.bytes().all(|c| c.is_ascii_graphic() && c != b'.') {
            return Err(LsbError::InvalidExtension(ext.to_owned()));
        }
        let mut raw = [0u8; EXTENSION_LEN];
        raw[..ext.len()].copy_from_slice(ext.as_bytes());
        Ok(Self(raw))
    }

    /// Decode stored bytes; `None` if they are not a valid padded extension.
    pub fn from_stored(raw: [u8; EXTENSION_LEN]) -> Option<Self> {
        let len = raw.iter().position(|&c| c == 0).unwrap_or(EXTENSION_LEN);
        let (text, pad) = raw.split_at(len);
        let ok =
            pad.iter().all(|&c| c == 0) && text.iter().all(|&c| c.is_ascii_graphic() && c != b'.');
        ok.then_some(Self(raw))
    }

    pub fn stored(&self) -> [u8; EXTENSION_LEN] {
        self.0
    }

    pub fn as_str(&self) -> &str {
        let len = self.0.iter().position(|&c| c == 0).unwrap_or(EXTENSION_LEN);
        // Constructors only admit ASCII.
        std::str::from_utf8(&self.0[..len]).expect("extension is ASCII")
    }

    pub fn is_empty(&self) -> bool {
        self.0[0] == 0
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Payload {
    data: Vec<u8>,
    extension: Extension,
}

impl Payload {
    pub fn new(data: Vec<u8>, extension: &str) -> Result<Self, LsbError> {
        if data.is_empty() {
            return Err(LsbError::EmptyPayload);
        }
        Ok(Self {
            data,
            extension: Extension::parse(extension)?,
        })
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StegoMetadata {
    pub payload_size: u32,
    pub extension: Extension,
    pub marker: u8,
    pub pixel_spacing: usize,
}

fn tag_range(image: &BmpImage) -> Result<std::ops::Range<usize>, LsbError> {
    let start = image.header.info_size() as usize;
    let end = start + TAG_LEN;
    let data_offset = image.header.data_offset() as usize;
    if end > data_offset {
        return Err(LsbError::MetadataCollision {
            start,
            end,
            data_offset,
        });
    }
    Ok(start..end)
}

pub fn embed(cover: &BmpImage, payload: &Payload) -> Result<BmpImage, LsbError> {
    let tag = tag_range(cover)?;
    let size = payload.data.len();
    let cap = capacity(cover);
    if size > cap {
        return Err(LsbError::CapacityExceeded {
            payload: size,
            capacity: cap,
        });
    }
    let ps = embed_stride(cover.carrier.len(), size)?;

    let mut stego = cover.clone();
    stego
        .header
        .patch(RESERVED_OFFSET, &(size as u32).to_le_bytes());
    let mut tag_bytes = [MARKER; TAG_LEN];
    tag_bytes[1..].copy_from_slice(&payload.extension.stored());
    stego.header.patch(tag.start, &tag_bytes);

    for (k, &ch) in (1..).zip(&payload.data) {
        let at = 3 * k * ps;
        let group = &mut stego.carrier[at..at + 3];
        pack_byte(PackedChannels::read(group), ch).write(group);
    }
    Ok(stego)
}

/// Read and validate the header metadata without touching the carrier.
pub fn read_metadata(image: &BmpImage) -> Result<StegoMetadata, LsbError> {
    let tag = tag_range(image).map_err(|_| LsbError::NotGenuineStego)?;
    let raw = &image.header.raw_bytes()[tag];
    if raw[0] != MARKER {
        return Err(LsbError::NotGenuineStego);
    }
    let stored: [u8; EXTENSION_LEN] = raw[1..].try_into().expect("tag slice length");
    let extension = Extension::from_stored(stored)
        .ok_or_else(|| LsbError::CorruptMetadata(format!("extension bytes {stored:02x?}")))?;

    let payload_size = image.header.reserved();
    if payload_size == 0 {
        return Err(LsbError::CorruptMetadata("payload size is 0".into()));
    }
    let carrier_len = image.carrier.len();
    let groups = carrier_len / 3;
    let ps = embed_stride(carrier_len, payload_size as usize).map_err(|_| {
        LsbError::CorruptMetadata(format!(
            "payload size {payload_size} gives zero spacing over {carrier_len} carrier bytes"
        ))
    })?;
    if (payload_size as usize) * ps > groups - 1 {
        return Err(LsbError::CorruptMetadata(format!(
            "payload size {payload_size} at spacing {ps} runs past the last of {groups} groups"
        )));
    }
    Ok(StegoMetadata {
        payload_size,
        extension,
        marker: MARKER,
        pixel_spacing: ps,
    })
}

pub fn extract(stego: &BmpImage) -> Result<Payload, LsbError> {
    let meta = read_metadata(stego)?;
    let ps = meta.pixel_spacing;
    let data = (1..=meta.payload_size as usize)
        .map(|k| {
            let at = 3 * k * ps;
            unpack_byte(PackedChannels::read(&stego.carrier[at..at + 3]))
        })
        .collect();
    Ok(Payload {
        data,
        extension: meta.extension,
    })
}

/// Result of a non-destructive look at an image's stego metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inspection {
    NoMarker,
    Valid(StegoMetadata),
    /// The marker is present but the rest of the metadata does not hold up.
    Implausible {
        payload_size: u32,
        extension_bytes: [u8; EXTENSION_LEN],
        reason: String,
    },
}

pub fn inspect(image: &BmpImage) -> Inspection {
    match read_metadata(image) {
        Ok(meta) => Inspection::Valid(meta),
        Err(LsbError::NotGenuineStego) => Inspection::NoMarker,
        Err(err) => {
            let start = image.header.info_size() as usize + 1;
            let mut extension_bytes = [0u8; EXTENSION_LEN];
            extension_bytes
                .copy_from_slice(&image.header.raw_bytes()[start..start + EXTENSION_LEN]);
            Inspection::Implausible {
                payload_size: image.header.reserved(),
                extension_bytes,
                reason: err.to_string(),
            }
        }
    }
}
