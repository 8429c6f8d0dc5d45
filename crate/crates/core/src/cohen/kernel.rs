use crate::error::{ensure, Result};
use crate::sigcore::{analytic, fft_in_place, Complex64, ComplexSequence, Signal};

/// Longest input accepted by the bilinear transforms.
pub const MAX_SAMPLES: usize = 16_384;
/// Longest input for which a full ambiguity surface is materialized.
pub const MAX_AMBIGUITY_SAMPLES: usize = 2_048;

pub(crate) fn check_len(x: &Signal, max: usize) -> Result<()> {
    x.require_len(4, "bilinear distribution")?;
    ensure!(
        x.len() <= max,
        "{} samples exceeds the {max}-sample limit of the direct bilinear transform; decimate first",
        x.len()
    );
    Ok(())
}

pub(crate) fn source(x: &Signal, use_analytic: bool) -> Result<ComplexSequence> {
    if use_analytic {
        analytic(x)
    } else {
        Ok(x.samples()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect())
    }
}

/// Band-limited interpolation by two: zero-insertion followed by an ideal
/// low-pass, done by zero-padding the spectrum. Even output samples equal the
/// input.
pub(crate) fn upsample2(z: &[Complex64]) -> Vec<Complex64> {
    let n = z.len();
    let mut spec = z.to_vec();
    fft_in_place(&mut spec, false);
    let mut wide = vec![Complex64::new(0.0, 0.0); 2 * n];
    let half = n / 2;
    for (k, v) in spec.iter().enumerate() {
        if n.is_multiple_of(2) && k == half {
            wide[k] += v * 0.5;
            wide[k + n] += v * 0.5;
        } else if k <= half {
            wide[k] = *v;
        } else {
            wide[k + n] = *v;
        }
    }
    fft_in_place(&mut wide, true);
    let scale = 1.0 / n as f64;
    wide.iter_mut().for_each(|v| *v *= scale);
    wide
}

/// Instantaneous autocorrelation on the half-sample grid.
pub(crate) struct LagKernel {
    z2: Vec<Complex64>,
    n: usize,
}

impl LagKernel {
    pub(crate) fn new(x: &Signal, use_analytic: bool) -> Result<Self> {
        let z = source(x, use_analytic)?;
        Ok(Self {
            n: z.len(),
            z2: upsample2(&z),
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    /// Largest admissible `|m|` at time `n`.
    pub(crate) fn max_lag(&self, n: usize) -> usize {
        (2 * n).min(2 * self.n - 1 - 2 * n)
    }

    /// `K[n, m]`; zero outside the support.
    #[inline]
    pub(crate) fn at(&self, n: usize, m: isize) -> Complex64 {
        if m.unsigned_abs() > self.max_lag(n) {
            return Complex64::new(0.0, 0.0);
        }
        let c = 2 * n as isize;
        self.z2[(c + m) as usize] * self.z2[(c - m) as usize].conj()
    }

    /// `|z(n)|^2`, the zero-lag value.
    #[cfg(test)]
    pub(crate) fn power(&self, n: usize) -> f64 {
        self.z2[2 * n].norm_sqr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upsample_keeps_even_samples() {
        for n in [5usize, 8, 33] {
            let z: Vec<Complex64> = (0..n)
                .map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 0.3).cos()))
                .collect();
            let up = upsample2(&z);
            for k in 0..n {
                assert!((up[2 * k] - z[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn kernel_hermitian_in_lag() {
        let x = Signal::new((0..40).map(|k| (k as f64 * 0.4).sin()).collect(), 100.0).unwrap();
        let k = LagKernel::new(&x, true).unwrap();
        for n in 0..40 {
            for m in 0..=k.max_lag(n) as isize {
                assert!((k.at(n, -m) - k.at(n, m).conj()).norm() < 1e-15);
            }
            assert_eq!(k.at(n, k.max_lag(n) as isize + 1), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn length_guard() {
        assert!(check_len(&Signal::zeros(3, 1.0).unwrap(), MAX_SAMPLES).is_err());
        assert!(check_len(&Signal::zeros(MAX_SAMPLES + 1, 1.0).unwrap(), MAX_SAMPLES).is_err());
        assert!(check_len(&Signal::zeros(4, 1.0).unwrap(), MAX_SAMPLES).is_ok());
    }
}
