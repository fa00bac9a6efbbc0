//! `stegkit` command line.
//!
//! Every action prints one JSON summary line on stdout. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O failure reading or writing a file |
//! | 2 | input is not a supported BMP/WAV, or inputs cannot be compared |
//! | 3 | payload does not fit (capacity, bit count, extension) |
//! | 4 | stego metadata missing or corrupt |
//! | 5 | usage error |

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bmp::{parse_bmp, write_bmp, BmpError};
use crate::echo::{echo_embed, echo_extract, BitSequence, EchoError, EchoParams};
use crate::lsb::{self, Inspection, LsbError, Payload};
use crate::metrics::{distortion, MetricsError, ValueRange};
use crate::wav::{parse_wav, write_wav, WavError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_FORMAT: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_METADATA: i32 = 4;
pub const EXIT_USAGE: i32 = 5;

/// Default stem of extracted payload files.
pub const EXTRACT_STEM: &str = "org";

#[derive(Debug, Parser)]
#[command(
    name = "stegkit",
    version,
    about = "Hide files in 24-bit BMP images and bits in PCM WAV audio"
)]
pub struct Cli {
    /// Print a human-readable note to stderr for each action.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hide a payload file inside a BMP cover.
    Embed {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        payload: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Extension stored for the payload (default: payload filename suffix).
        #[arg(long)]
        ext: Option<String>,
    },
    /// Recover the payload from a stego BMP as `<out-dir>/org.<ext>`.
    Extract {
        #[arg(long)]
        stego: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Report stego metadata without extracting.
    Inspect {
        #[arg(long)]
        stego: PathBuf,
    },
    /// Largest payload, in bytes, a BMP cover can carry.
    Capacity {
        #[arg(long)]
        cover: PathBuf,
    },
    /// Echo-hide the bits of a file (MSB first) in a WAV cover.
    AudioEmbed {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        bits: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        echo: EchoArgs,
    },
    /// Recover echo-hidden bits from a WAV.
    AudioExtract {
        #[arg(long)]
        stego: PathBuf,
        #[arg(long)]
        nbits: usize,
        /// Write the bits packed MSB first; otherwise they go in the summary.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        echo: EchoArgs,
    },
    /// Distortion between two files (BMP bytes, WAV samples, or raw bytes).
    Metrics {
        #[arg(long = "a")]
        a: PathBuf,
        #[arg(long = "b")]
        b: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct EchoArgs {
    #[arg(long, default_value_t = EchoParams::default().delay_zero)]
    pub delay0: usize,
    #[arg(long, default_value_t = EchoParams::default().delay_one)]
    pub delay1: usize,
    #[arg(long, default_value_t = EchoParams::default().decay)]
    pub decay: f64,
    #[arg(long, default_value_t = EchoParams::default().segment_len)]
    pub segment: usize,
}

impl From<EchoArgs> for EchoParams {
    fn from(a: EchoArgs) -> Self {
        EchoParams {
            delay_zero: a.delay0,
            delay_one: a.delay1,
            decay: a.decay,
            segment_len: a.segment,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Bmp(#[from] BmpError),
    #[error(transparent)]
    Wav(#[from] WavError),
    #[error(transparent)]
    Lsb(#[from] LsbError),
    #[error(transparent)]
    Echo(#[from] EchoError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Bmp(_) | CliError::Wav(_) | CliError::Metrics(_) => EXIT_FORMAT,
            CliError::Lsb(e) => match e {
                LsbError::NotGenuineStego | LsbError::CorruptMetadata(_) => EXIT_METADATA,
                LsbError::MetadataCollision { .. } => EXIT_FORMAT,
                LsbError::CapacityExceeded { .. }
                | LsbError::ExtensionTooLong(_)
                | LsbError::InvalidExtension(_)
                | LsbError::EmptyPayload => EXIT_CAPACITY,
            },
            CliError::Echo(EchoError::TooManyBits { .. }) => EXIT_CAPACITY,
            CliError::Echo(EchoError::BadParams(_)) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Write through a temp file in the destination directory, then rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Text after the last '.' of the file name, as the appendix tool did.
fn extension_of(path: &Path) -> String {
    path.file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.rsplit_once('.'))
        .map(|(_, ext)| ext.to_owned())
        .unwrap_or_default()
}

fn extracted_name(ext: &str) -> String {
    if ext.is_empty() {
        EXTRACT_STEM.to_owned()
    } else {
        format!("{EXTRACT_STEM}.{ext}")
    }
}

fn action_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Embed { .. } => "embed",
        Command::Extract { .. } => "extract",
        Command::Inspect { .. } => "inspect",
        Command::Capacity { .. } => "capacity",
        Command::AudioEmbed { .. } => "audio-embed",
        Command::AudioExtract { .. } => "audio-extract",
        Command::Metrics { .. } => "metrics",
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

pub fn execute(cmd: &Command) -> Result<Value, CliError> {
    match cmd {
        Command::Embed {
            cover,
            payload,
            out,
            ext,
        } => {
            let image = parse_bmp(&read(cover)?)?;
            let ext = ext.clone().unwrap_or_else(|| extension_of(payload));
            let payload = Payload::new(read(payload)?, &ext)?;
            let stego = lsb::embed(&image, &payload)?;
            let spacing = lsb::pixel_spacing(stego.carrier.len(), payload.data().len())?;
            write_atomic(out, &write_bmp(&stego))?;
            Ok(json!({
                "out": path_str(out),
                "payload_size": payload.data().len(),
                "extension": payload.extension().as_str(),
                "pixel_spacing": spacing,
                "capacity": lsb::capacity(&image),
            }))
        }
        Command::Extract { stego, out_dir } => {
            let image = parse_bmp(&read(stego)?)?;
            let payload = lsb::extract(&image)?;
            let path = out_dir.join(extracted_name(payload.extension().as_str()));
            write_atomic(&path, payload.data())?;
            Ok(json!({
                "out": path_str(&path),
                "payload_size": payload.data().len(),
                "extension": payload.extension().as_str(),
            }))
        }
        Command::Inspect { stego } => {
            let image = parse_bmp(&read(stego)?)?;
            let capacity = lsb::capacity(&image);
            Ok(match lsb::inspect(&image) {
                Inspection::NoMarker => json!({"marker": false, "capacity": capacity}),
                Inspection::Valid(m) => json!({
                    "marker": true,
                    "plausible": true,
                    "payload_size": m.payload_size,
                    "extension": m.extension.as_str(),
                    "pixel_spacing": m.pixel_spacing,
                    "capacity": capacity,
                }),
                Inspection::Implausible {
                    payload_size,
                    extension_bytes,
                    reason,
                } => json!({
                    "marker": true,
                    "plausible": false,
                    "payload_size": payload_size,
                    "extension_bytes": extension_bytes,
                    "reason": reason,
                    "capacity": capacity,
                }),
            })
        }
        Command::Capacity { cover } => {
            let image = parse_bmp(&read(cover)?)?;
            Ok(json!({"capacity": lsb::capacity(&image)}))
        }
        Command::AudioEmbed {
            cover,
            bits,
            out,
            echo,
        } => {
            let clip = parse_wav(&read(cover)?)?;
            let bits = BitSequence::from_bytes_msb(&read(bits)?);
            let params = EchoParams::from(*echo);
            let stego = echo_embed(&clip, &bits, &params)?;
            write_atomic(out, &write_wav(&stego))?;
            Ok(json!({
                "out": path_str(out),
                "nbits": bits.len(),
                "segments_available": clip.frames() / params.segment_len,
            }))
        }
        Command::AudioExtract {
            stego,
            nbits,
            out,
            echo,
        } => {
            let clip = parse_wav(&read(stego)?)?;
            let bits = echo_extract(&clip, *nbits, &EchoParams::from(*echo))?;
            match out {
                Some(path) => {
                    write_atomic(path, &bits.to_bytes_msb())?;
                    Ok(json!({"out": path_str(path), "nbits": bits.len()}))
                }
                None => Ok(json!({"nbits": bits.len(), "bits": bits.to_string()})),
            }
        }
        Command::Metrics { a, b } => {
            let (a, b) = (read(a)?, read(b)?);
            let (kind, report) = match (parse_wav(&a), parse_wav(&b)) {
                (Ok(wa), Ok(wb)) => (
                    "wav-samples",
                    distortion(&wa.samples, &wb.samples, ValueRange::Sample16)?,
                ),
                _ => {
                    let kind = if parse_bmp(&a).is_ok() && parse_bmp(&b).is_ok() {
                        "bmp-bytes"
                    } else {
                        "bytes"
                    };
                    (kind, distortion(&a, &b, ValueRange::Byte)?)
                }
            };
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["compared"] = json!(kind);
            Ok(v)
        }
    }
}

fn summary(action: &str, status: &str, mut body: Value) -> String {
    let mut line = json!({"action": action, "status": status});
    if let (Some(dst), Some(src)) = (line.as_object_mut(), body.as_object_mut()) {
        dst.append(src);
    }
    line.to_string()
}

/// Parse `args` (program name first), run the action, report, and return
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };

    let action = action_name(&cli.command);
    match execute(&cli.command) {
        Ok(body) => {
            let line = summary(action, "ok", body);
            if cli.verbose {
                let _ = writeln!(stderr, "stegkit {action}: done");
            }
            let _ = writeln!(stdout, "{line}");
            EXIT_OK
        }
        Err(err) => {
            let code = err.exit_code();
            let _ = writeln!(stderr, "stegkit {action}: {err}");
            let body = json!({"exit_code": code, "error": err.to_string()});
            let _ = writeln!(stdout, "{}", summary(action, "error", body));
            code
        }
    }
}
