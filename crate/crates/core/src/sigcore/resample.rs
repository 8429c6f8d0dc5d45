use std::f64::consts::PI;

use super::Signal;
use crate::error::{ensure, Result};

const TAPS: usize = 64;
const HALF: f64 = (TAPS / 2) as f64;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn blackman(d: f64) -> f64 {
    if d.abs() >= HALF {
        return 0.0;
    }
    let u = PI * d / HALF;
    0.42 + 0.5 * u.cos() + 0.08 * (2.0 * u).cos()
}

/// Band-limited resampling with a 64-tap Blackman-windowed sinc.
///
/// The cutoff tracks the lower of the two Nyquist rates. Output length is
/// `round(len * target / rate)`; samples beyond either end count as zero.
pub fn resample(x: &Signal, target_rate: f64) -> Result<Signal> {
    ensure!(
        target_rate.is_finite() && target_rate > 0.0,
        "target rate must be positive, got {target_rate}"
    );
    let rate = x.sample_rate();
    if (target_rate - rate).abs() <= f64::EPSILON * rate {
        return Ok(x.clone());
    }
    let input = x.samples();
    let step = rate / target_rate;
    let cutoff = (target_rate / rate).min(1.0);
    let out_len = ((input.len() as f64) * target_rate / rate).round() as usize;

    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len {
        let pos = n as f64 * step;
        let base = pos.floor() as i64;
        let mut acc = 0.0;
        let mut norm = 0.0;
        for tap in 0..TAPS as i64 {
            let k = base - (TAPS as i64 / 2 - 1) + tap;
            let d = pos - k as f64;
            let h = cutoff * sinc(cutoff * d) * blackman(d);
            norm += h;
            if k >= 0 && (k as usize) < input.len() {
                acc += h * input[k as usize];
            }
        }
        out.push(if norm.abs() > 0.0 { acc / norm } else { 0.0 });
    }
    Signal::new(out, target_rate)
}
