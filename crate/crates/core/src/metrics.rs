//! Distortion and bit-error measurements.

use serde::Serialize;
use thiserror::Error;

use crate::echo::BitSequence;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("inputs are empty")]
    Empty,
}

/// Peak signal value used for PSNR. Chosen by the caller, never inferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ValueRange {
    /// 8-bit data, peak 255.
    Byte,
    /// Signed 16-bit samples, peak 32767.
    Sample16,
}

impl ValueRange {
    pub fn peak(self) -> f64 {
        match self {
            ValueRange::Byte => 255.0,
            ValueRange::Sample16 => 32767.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    pub mse: f64,
    /// `f64::INFINITY` when the inputs are identical.
    #[serde(serialize_with = "psnr_as_json")]
    pub psnr_db: f64,
    pub max_abs_diff: u64,
    pub changed_count: usize,
}

fn psnr_as_json<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

pub fn distortion<T>(a: &[T], b: &[T], range: ValueRange) -> Result<DistortionReport, MetricsError>
where
    T: Copy + Into<i64>,
{
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(MetricsError::Empty);
    }

    let mut sum_sq = 0u128;
    let mut max_abs_diff = 0u64;
    let mut changed_count = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let d = (x.into() - y.into()).unsigned_abs();
        if d != 0 {
            changed_count += 1;
            max_abs_diff = max_abs_diff.max(d);
            sum_sq += (d as u128) * (d as u128);
        }
    }

    let mse = sum_sq as f64 / a.len() as f64;
    let psnr_db = if sum_sq == 0 {
        f64::INFINITY
    } else {
        10.0 * (range.peak().powi(2) / mse).log10()
    };
    Ok(DistortionReport {
        mse,
        psnr_db,
        max_abs_diff,
        changed_count,
    })
}

pub fn bit_error_rate(a: &BitSequence, b: &BitSequence) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(MetricsError::Empty);
    }
    let errors = a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count();
    Ok(errors as f64 / a.len() as f64)
}
