use std::cell::RefCell;

use rustfft::FftPlanner;

use super::Complex64;
use crate::error::{ensure, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized in-place transform; `inverse` flips the exponent sign only.
pub fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    if buf.len() <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

/// `X[m] = sum_k x[k] exp(-j 2 pi m k / N)`.
pub fn dft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    ensure!(!x.is_empty(), "dft of an empty sequence");
    let mut buf = x.to_vec();
    fft_in_place(&mut buf, false);
    Ok(buf)
}

pub fn dft_real(x: &[f64]) -> Result<Vec<Complex64>> {
    ensure!(!x.is_empty(), "dft of an empty sequence");
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, false);
    Ok(buf)
}

/// Inverse of [`dft`], including the `1/N` factor.
pub fn idft(spectrum: &[Complex64]) -> Result<Vec<Complex64>> {
    ensure!(!spectrum.is_empty(), "idft of an empty sequence");
    let mut buf = spectrum.to_vec();
    fft_in_place(&mut buf, true);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    Ok(buf)
}

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|m| {
                (0..n)
                    .map(|k| {
                        let ang = -2.0 * PI * ((m * k) % n) as f64 / n as f64;
                        x[k] * Complex64::new(ang.cos(), ang.sin())
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn impulse_and_constant() {
        let imp = dft_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        for v in imp {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let c = dft_real(&[1.0; 4]).unwrap();
        assert!((c[0] - Complex64::new(4.0, 0.0)).norm() < 1e-15);
        for v in &c[1..] {
            assert!(v.norm() < 1e-15);
        }
        assert!(dft(&[]).is_err());
    }

    #[test]
    fn sinusoid_at_bin_five() {
        let n = 128;
        let x: Vec<f64> = (0..n)
            .map(|k| (2.0 * PI * 5.0 * k as f64 / n as f64).cos())
            .collect();
        let fast = dft_real(&x).unwrap();
        let slow = naive(
            &x.iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect::<Vec<_>>(),
        );
        let peak = fast.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (m, v) in fast.iter().enumerate() {
            assert!((v - slow[m]).norm() < 1e-9);
            if m == 5 || m == 123 {
                assert!((v.norm() - peak).abs() < 1e-9);
            } else {
                assert!(v.norm() <= 1e-9 * peak);
            }
        }
    }

    #[test]
    fn odd_lengths_match_naive() {
        for n in [1usize, 3, 7, 12, 30, 97] {
            let x: Vec<Complex64> = (0..n)
                .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos()))
                .collect();
            let fast = dft(&x).unwrap();
            let slow = naive(&x);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-9);
            }
            let back = idft(&fast).unwrap();
            for (a, b) in back.iter().zip(&x) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pow2() {
        assert_eq!(next_pow2(0), 1);
        assert_eq!(next_pow2(1), 1);
        assert_eq!(next_pow2(5), 8);
        assert_eq!(next_pow2(512), 512);
    }
}
