//! Real cepstrum of the power spectrum.
//!
//! `c = IDFT(ln(|DFT(x)|^2 + eps))`, with `x` zero-padded to the next power
//! of two. An echo `x[n] + a*x[n-d]` shows up as a positive peak of height
//! close to `a` at quefrency `d`.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Guard added to the squared magnitude before taking the log.
pub const LOG_EPSILON: f64 = 1e-10;

/// Forward and inverse plans for one transform length; cheap to share
/// between threads.
#[derive(Clone)]
pub struct CepstrumPlan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CepstrumPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CepstrumPlan")
            .field("len", &self.len)
            .finish()
    }
}

impl CepstrumPlan {
    /// Plan for segments of `segment_len` samples.
    pub fn new(segment_len: usize) -> Self {
        let len = segment_len.max(1).next_power_of_two();
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    /// Transform length after padding.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn compute<S: Copy + Into<f64>>(&self, segment: &[S]) -> Vec<f64> {
        assert!(segment.len() <= self.len, "segment longer than plan");
        let mut buf: Vec<Complex<f64>> = segment
            .iter()
            .map(|&s| Complex::new(s.into(), 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
            .take(self.len)
            .collect();
        self.forward.process(&mut buf);
        for z in &mut buf {
            *z = Complex::new((z.norm_sqr() + LOG_EPSILON).ln(), 0.0);
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        buf.iter().map(|z| z.re * scale).collect()
    }
}

pub fn real_cepstrum<S: Copy + Into<f64>>(segment: &[S]) -> Vec<f64> {
    CepstrumPlan::new(segment.len()).compute(segment)
}
