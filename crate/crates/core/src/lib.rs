//! Steganography codecs: 2-3-3 LSB substitution with pixel spacing for
//! 24-bit BMP images, and echo hiding with cepstrum detection for 16-bit
//! PCM WAV audio.

pub mod bmp;
pub mod cepstrum;
pub mod cli;
pub mod echo;
pub mod exec;
pub mod lsb;
pub mod metrics;
pub mod wav;

pub use bmp::{parse_bmp, write_bmp, BmpError, BmpHeader, BmpImage};
pub use echo::{
    echo_embed, echo_extract, estimate_echo_delay, BitSequence, DelayEstimate, EchoError,
    EchoParams,
};
pub use exec::Execution;
pub use lsb::{
    capacity, embed, extract, inspect, pack_byte, pixel_spacing, unpack_byte, Inspection, LsbError,
    PackedChannels, Payload, StegoMetadata,
};
pub use metrics::{bit_error_rate, distortion, DistortionReport, MetricsError, ValueRange};
pub use wav::{parse_wav, write_wav, WavClip, WavError};
