//! 24-bit uncompressed BMP container.
//!
//! The pixel-data region is kept as an opaque flat byte run (row padding
//! included) and the header is kept verbatim, so `write_bmp(parse_bmp(b))`
//! reproduces `b` exactly.

use thiserror::Error;

/// Length of the BITMAPFILEHEADER.
pub const FILE_HEADER_LEN: usize = 14;
/// Smallest file we accept: file header plus a BITMAPINFOHEADER.
pub const MIN_BMP_LEN: usize = 54;

const MIN_INFO_SIZE: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BmpError {
    #[error("not a BMP file (magic bytes {0:02x?})")]
    NotBmp([u8; 2]),
    #[error("unsupported BMP: {0}")]
    UnsupportedBmp(String),
    #[error("truncated BMP: {0}")]
    Truncated(String),
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn i32_at(b: &[u8], at: usize) -> i32 {
    i32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Decoded header fields plus the verbatim bytes `[0, data_offset)`.
///
/// Fields are read-only; the only mutation path is [`BmpHeader::patch`],
/// which rewrites the raw bytes and re-decodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmpHeader {
    file_size: u32,
    reserved: u32,
    data_offset: u32,
    info_size: u32,
    width: i32,
    height: i32,
    planes: u16,
    bits_per_pixel: u16,
    raw: Vec<u8>,
}

impl BmpHeader {
    pub fn file_size(&self) -> u32 {
        self.file_size
    }

    /// Bytes 6-9. Zero in ordinary files; the payload length in stego files.
    pub fn reserved(&self) -> u32 {
        self.reserved
    }

    pub fn data_offset(&self) -> u32 {
        self.data_offset
    }

    pub fn info_size(&self) -> u32 {
        self.info_size
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn planes(&self) -> u16 {
        self.planes
    }

    pub fn bits_per_pixel(&self) -> u16 {
        self.bits_per_pixel
    }

    pub fn raw_bytes(&self) -> &[u8] {
        &self.raw
    }

    /// Overwrite `bytes` at `offset` inside the raw header.
    ///
    /// Only the reserved field and bytes at or after the end of the
    /// BITMAPINFOHEADER's structural fields may be touched; anything that
    /// would change how the file is parsed is refused.
    pub(crate) fn patch(&mut self, offset: usize, bytes: &[u8]) {
        let end = offset + bytes.len();
        assert!(end <= self.raw.len(), "patch past end of header");
        let reserved = 6..10;
        let structural = 0..34;
        assert!(
            (offset >= reserved.start && end <= reserved.end) || offset >= structural.end,
            "patch would alter structural header fields"
        );
        self.raw[offset..end].copy_from_slice(bytes);
        self.reserved = u32_at(&self.raw, 6);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmpImage {
    pub header: BmpHeader,
    /// Pixel-data region `[data_offset, file_size)`, row padding included.
    pub carrier: Vec<u8>,
}

impl BmpImage {
    pub fn file_len(&self) -> usize {
        self.header.raw.len() + self.carrier.len()
    }
}

pub fn parse_bmp(bytes: &[u8]) -> Result<BmpImage, BmpError> {
    if bytes.len() >= 2 && &bytes[..2] != b"BM" {
        return Err(BmpError::NotBmp([bytes[0], bytes[1]]));
    }
    if bytes.len() < MIN_BMP_LEN {
        return Err(BmpError::Truncated(format!(
            "{} bytes, need at least {MIN_BMP_LEN}",
            bytes.len()
        )));
    }

    let file_size = u32_at(bytes, 2);
    let reserved = u32_at(bytes, 6);
    let data_offset = u32_at(bytes, 10);
    let info_size = u32_at(bytes, 14);
    let width = i32_at(bytes, 18);
    let height = i32_at(bytes, 22);
    let planes = u16_at(bytes, 26);
    let bits_per_pixel = u16_at(bytes, 28);
    let compression = u32_at(bytes, 30);

    if info_size < MIN_INFO_SIZE {
        return Err(BmpError::UnsupportedBmp(format!(
            "info header size {info_size} (need >= {MIN_INFO_SIZE})"
        )));
    }
    if bits_per_pixel != 24 {
        return Err(BmpError::UnsupportedBmp(format!(
            "{bits_per_pixel} bits per pixel (only 24 supported)"
        )));
    }
    if compression != 0 {
        return Err(BmpError::UnsupportedBmp(format!(
            "compression method {compression}"
        )));
    }
    if planes != 1 {
        return Err(BmpError::UnsupportedBmp(format!("{planes} colour planes")));
    }
    if width <= 0 || height <= 0 {
        return Err(BmpError::UnsupportedBmp(format!(
            "dimensions {width}x{height} (only bottom-up images supported)"
        )));
    }
    if (data_offset as u64) < FILE_HEADER_LEN as u64 + info_size as u64 {
        return Err(BmpError::UnsupportedBmp(format!(
            "pixel data offset {data_offset} overlaps the {info_size}-byte info header"
        )));
    }
    if data_offset > file_size {
        return Err(BmpError::UnsupportedBmp(format!(
            "pixel data offset {data_offset} beyond declared file size {file_size}"
        )));
    }

    let actual = bytes.len() as u64;
    if file_size as u64 > actual {
        return Err(BmpError::Truncated(format!(
            "declared file size {file_size}, only {actual} bytes present"
        )));
    }
    if (file_size as u64) < actual {
        return Err(BmpError::UnsupportedBmp(format!(
            "{} trailing bytes after declared file size {file_size}",
            actual - file_size as u64
        )));
    }

    let split = data_offset as usize;
    Ok(BmpImage {
        header: BmpHeader {
            file_size,
            reserved,
            data_offset,
            info_size,
            width,
            height,
            planes,
            bits_per_pixel,
            raw: bytes[..split].to_vec(),
        },
        carrier: bytes[split..].to_vec(),
    })
}

pub fn write_bmp(image: &BmpImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(image.file_len());
    out.extend_from_slice(&image.header.raw);
    out.extend_from_slice(&image.carrier);
    out
}

/// Build a bottom-up 24-bit BMP with a 40-byte info header.
///
/// `pixel(x, y)` returns the (b, g, r) bytes stored for column `x` of
/// stored row `y` (row 0 is the bottom of the picture). Row padding is
/// zero-filled.
pub fn synth_bmp<F>(width: u32, height: u32, mut pixel: F) -> Vec<u8>
where
    F: FnMut(u32, u32) -> [u8; 3],
{
    let row_len = (width as usize * 3).div_ceil(4) * 4;
    let data_len = row_len * height as usize;
    let file_size = MIN_BMP_LEN + data_len;

    let mut out = Vec::with_capacity(file_size);
    out.extend_from_slice(b"BM");
    out.extend_from_slice(&(file_size as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&(MIN_BMP_LEN as u32).to_le_bytes());
    out.extend_from_slice(&40u32.to_le_bytes());
    out.extend_from_slice(&(width as i32).to_le_bytes());
    out.extend_from_slice(&(height as i32).to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&24u16.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes()); // BI_RGB
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    out.extend_from_slice(&2835i32.to_le_bytes()); // 72 dpi
    out.extend_from_slice(&2835i32.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    debug_assert_eq!(out.len(), MIN_BMP_LEN);

    for y in 0..height {
        let row_start = out.len();
        for x in 0..width {
            out.extend_from_slice(&pixel(x, y));
        }
        out.resize(row_start + row_len, 0);
    }
    out
}
