use super::{fft_in_place, Complex64, ComplexSequence, Signal};
use crate::error::Result;

/// Analytic associate of a real signal via the frequency-domain Hilbert transform.
///
/// DC (and Nyquist, for even lengths) keep unit gain, strictly positive bins are
/// doubled and strictly negative bins are zeroed. The real part of the result is
/// the input, copied verbatim.
pub fn analytic(x: &Signal) -> Result<ComplexSequence> {
    x.require_len(2, "analytic signal")?;
    let n = x.len();
    let mut buf: Vec<Complex64> = x
        .samples()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft_in_place(&mut buf, false);
    let half = n / 2;
    for (m, v) in buf.iter_mut().enumerate() {
        let gain = if m == 0 || (n.is_multiple_of(2) && m == half) {
            1.0
        } else if m <= (n - 1) / 2 {
            2.0
        } else {
            0.0
        };
        *v *= gain;
    }
    fft_in_place(&mut buf, true);
    let scale = 1.0 / n as f64;
    Ok(buf
        .into_iter()
        .zip(x.samples())
        .map(|(v, &re)| Complex64::new(re, v.im * scale))
        .collect())
}
