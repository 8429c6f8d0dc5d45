use super::kernel::{check_len, LagKernel, MAX_AMBIGUITY_SAMPLES};
use crate::error::Result;
use crate::sigcore::{fft_in_place, Complex64, Signal};

/// Doppler x lag correlation surface.
///
/// Rows follow `doppler_axis` (cycles/sample, ascending from -1/2), columns
/// follow `lag_axis` (integer samples, ascending and symmetric about zero).
#[derive(Debug, Clone)]
pub struct AmbiguitySurface {
    pub values: Vec<Complex64>,
    pub doppler_axis: Vec<f64>,
    pub lag_axis: Vec<isize>,
}

impl AmbiguitySurface {
    pub fn get(&self, doppler: usize, lag: usize) -> Complex64 {
        self.values[doppler * self.lag_axis.len() + lag]
    }

    /// Indices of `eta = 0, tau = 0`.
    pub fn origin(&self) -> (usize, usize) {
        let d = self
            .doppler_axis
            .iter()
            .position(|&e| e == 0.0)
            .expect("doppler axis contains zero");
        (d, self.lag_axis.len() / 2)
    }
}

/// `A(eta, tau) = sum_t z(t + tau/2) z*(t - tau/2) exp(-j 2 pi eta t)` on an
/// `N`-point doppler grid and all lags `|tau| < N`.
pub fn ambiguity(x: &Signal, use_analytic: bool) -> Result<AmbiguitySurface> {
    check_len(x, MAX_AMBIGUITY_SAMPLES)?;
    let kernel = LagKernel::new(x, use_analytic)?;
    let n = kernel.len();
    let max_lag = n as isize - 1;
    let lags: Vec<isize> = (-max_lag..=max_lag).collect();
    let width = lags.len();
    let mut values = vec![Complex64::new(0.0, 0.0); n * width];
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    let shift = n / 2;
    for (j, &m) in lags.iter().enumerate() {
        for (t, slot) in column.iter_mut().enumerate() {
            *slot = kernel.at(t, m);
        }
        fft_in_place(&mut column, false);
        // rotate so that row 0 holds the most negative doppler
        for (k, v) in column.iter().enumerate() {
            let sorted = (k + shift) % n;
            values[sorted * width + j] = *v;
        }
    }
    let doppler_axis = (0..n)
        .map(|r| (r as isize - shift as isize) as f64 / n as f64)
        .collect();
    Ok(AmbiguitySurface {
        values,
        doppler_axis,
        lag_axis: lags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_energy() {
        let x = Signal::new(
            (0..50).map(|k| (k as f64 * 0.3).sin() + 0.1).collect(),
            10.0,
        )
        .unwrap();
        let a = ambiguity(&x, true).unwrap();
        let z = crate::sigcore::analytic(&x).unwrap();
        let energy: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        let (d, l) = a.origin();
        assert_eq!(a.lag_axis[l], 0);
        assert!((a.get(d, l).norm() - energy).abs() < 1e-9 * energy);
    }

    #[test]
    fn zero_signal_zero_surface() {
        let a = ambiguity(&Signal::zeros(16, 1.0).unwrap(), true).unwrap();
        assert!(a.values.iter().all(|v| v.norm() == 0.0));
        assert!(ambiguity(&Signal::zeros(3, 1.0).unwrap(), true).is_err());
    }
}
