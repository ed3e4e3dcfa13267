//! Offline IIR conditioning filters: second-order high-pass and band-pass
//! biquads applied anti-causally (backward in time) to measurement records.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// Second-order section, Direct Form II Transposed.
///
/// Transfer function H(z) = (b0 + b1 z⁻¹ + b2 z⁻²)/(1 + a1 z⁻¹ + a2 z⁻²).
#[derive(Debug, Clone)]
pub struct Biquad {
    b: [f64; 3],
    a: [f64; 2],
    state: [f64; 2],
}

impl Biquad {
    pub fn new(b: [f64; 3], a: [f64; 2]) -> Self {
        Biquad { b, a, state: [0.0; 2] }
    }

    pub fn process(&mut self, x: f64) -> f64 {
        let y = self.b[0] * x + self.state[0];
        self.state[0] = self.b[1] * x - self.a[0] * y + self.state[1];
        self.state[1] = self.b[2] * x - self.a[1] * y;
        y
    }

    pub fn reset(&mut self) {
        self.state = [0.0; 2];
    }

    /// Magnitude response at normalized angular frequency w = 2π f / fs.
    pub fn magnitude(&self, w: f64) -> f64 {
        let (zr, zi) = (w.cos(), -w.sin()); // z⁻¹ on the unit circle
        // evaluate numerator and denominator at z⁻¹, z⁻²
        let z2r = zr * zr - zi * zi;
        let z2i = 2.0 * zr * zi;
        let nr = self.b[0] + self.b[1] * zr + self.b[2] * z2r;
        let ni = self.b[1] * zi + self.b[2] * z2i;
        let dr = 1.0 + self.a[0] * zr + self.a[1] * z2r;
        let di = self.a[0] * zi + self.a[1] * z2i;
        ((nr * nr + ni * ni) / (dr * dr + di * di)).sqrt()
    }

    pub fn process_slice(&mut self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.process(x)).collect()
    }
}

fn check_band(f_hz: f64, fs_hz: f64) -> Result<()> {
    if !(f_hz > 0.0) {
        return Err(Error::invalid("filter frequency must be positive"));
    }
    if f_hz >= 0.5 * fs_hz {
        return Err(Error::invalid(format!(
            "filter frequency {f_hz} Hz is at or above Nyquist ({} Hz)",
            0.5 * fs_hz
        )));
    }
    Ok(())
}

/// Second-order Butterworth high-pass via the bilinear transform with
/// frequency prewarping.
pub fn butter2_highpass(fc_hz: f64, fs_hz: f64) -> Result<Biquad> {
    check_band(fc_hz, fs_hz)?;
    let k = (PI * fc_hz / fs_hz).tan();
    let norm = 1.0 / (1.0 + SQRT_2 * k + k * k);
    Ok(Biquad::new(
        [norm, -2.0 * norm, norm],
        [2.0 * (k * k - 1.0) * norm, (1.0 - SQRT_2 * k + k * k) * norm],
    ))
}

/// Second-order Butterworth band-pass (one biquad, unit peak gain) centered
/// at `fc_hz` with full bandwidth `bw_hz`.
pub fn butter2_bandpass(fc_hz: f64, bw_hz: f64, fs_hz: f64) -> Result<Biquad> {
    check_band(fc_hz, fs_hz)?;
    if !(bw_hz > 0.0 && bw_hz < fc_hz) {
        return Err(Error::invalid("bandpass bandwidth must lie in (0, center)"));
    }
    let w0 = 2.0 * PI * fc_hz / fs_hz;
    let q = fc_hz / bw_hz;
    let alpha = w0.sin() / (2.0 * q);
    let a0 = 1.0 + alpha;
    Ok(Biquad::new(
        [alpha / a0, 0.0, -alpha / a0],
        [-2.0 * w0.cos() / a0, (1.0 - alpha) / a0],
    ))
}

/// Cascade of two second-order high-pass stages, applied backward in time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    /// Cutoff frequencies of the two stages in Hz.
    pub hp_cutoffs_hz: [f64; 2],
}

impl Default for FilterSpec {
    fn default() -> Self {
        FilterSpec { hp_cutoffs_hz: [3000.0, 9000.0] }
    }
}

impl FilterSpec {
    /// Settling span of the slowest stage: 10/(2π min cutoff) seconds at the
    /// processing start, i.e. at the chronological end of the record.
    pub fn warmup_seconds(&self) -> f64 {
        10.0 / (2.0 * PI * self.hp_cutoffs_hz[0].min(self.hp_cutoffs_hz[1]))
    }

    pub fn warmup_samples(&self, dt: f64) -> usize {
        (self.warmup_seconds() / dt).ceil() as usize
    }
}

/// Apply the two high-pass stages to the time-reversed record and reverse
/// the result back. Estimates within `warmup_seconds` of the record end are
/// not settled.
pub fn highpass_backward(record: &[f64], spec: &FilterSpec, dt: f64) -> Result<Vec<f64>> {
    let fs = 1.0 / dt;
    let mut stage1 = butter2_highpass(spec.hp_cutoffs_hz[0], fs)?;
    let mut stage2 = butter2_highpass(spec.hp_cutoffs_hz[1], fs)?;
    let mut out: Vec<f64> = record
        .iter()
        .rev()
        .map(|&x| stage2.process(stage1.process(x)))
        .collect();
    out.reverse();
    Ok(out)
}
