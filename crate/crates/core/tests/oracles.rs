//! Transforms and statistics checked against direct, slow evaluations of
//! their defining sums.

mod common;

use std::f64::consts::PI;

use common::*;
use rand::Rng;
use tfdkit::cohen::{wvd, CohenConfig};
use tfdkit::dataset::Label;
use tfdkit::evalstats::{exact_distribution, mann_whitney_u, MwMode};
use tfdkit::refclf::{init_params, loss_and_grad, Example};
use tfdkit::sigcore::{analytic, gaussian_window, hann_window, Complex64, Signal};
use tfdkit::tfd::{chirplet, cwt, stft, ChirpletConfig, CwtConfig, ScaleSpec, StftConfig, TfdGrid};

fn assert_grid_close(g: &TfdGrid, expect: impl Fn(usize, usize) -> f64, rel: f64) {
    let scale = g.max_abs();
    for r in 0..g.rows() {
        for c in 0..g.cols() {
            let e = expect(r, c);
            assert!(
                (g.get(r, c) - e).abs() <= rel * scale,
                "row {r} col {c}: {} vs {e}",
                g.get(r, c)
            );
        }
    }
}

/// Analytic signal of an odd-length real sequence, from the naive DFT, evaluated
/// on the half-sample grid by trigonometric interpolation.
fn analytic_half_grid(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    assert!(n % 2 == 1);
    let spec = naive_dft(
        &x.iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect::<Vec<_>>(),
    );
    (0..2 * n)
        .map(|j| {
            let t = j as f64 / 2.0;
            let mut acc = spec[0];
            for (k, s) in spec.iter().enumerate().take(n / 2 + 1).skip(1) {
                acc += 2.0 * s * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * t / n as f64);
            }
            acc / n as f64
        })
        .collect()
}

#[test]
fn wvd_matches_direct_lag_sum() {
    let fs = 1000.0;
    let mut r = rng(21);
    for n in [31usize, 64 + 1, 127] {
        let x = random_real(&mut r, n);
        let z2 = analytic_half_grid(&x);
        let nfft = 256;
        let g = wvd(
            &Signal::new(x, fs).unwrap(),
            &CohenConfig {
                freq_bins: nfft,
                ..CohenConfig::default()
            },
        )
        .unwrap();
        assert_eq!((g.rows(), g.cols()), (n, nfft / 2 + 1));
        assert_grid_close(
            &g,
            |t, k| {
                let c = 2 * t as isize;
                let reach = c.min(2 * n as isize - 1 - c);
                let mut acc = Complex64::new(0.0, 0.0);
                for m in -reach..=reach {
                    let kv = z2[(c + m) as usize] * z2[(c - m) as usize].conj();
                    acc += kv
                        * Complex64::from_polar(
                            1.0,
                            -2.0 * PI * (k as f64) * (m as f64) / nfft as f64,
                        );
                }
                acc.re / fs
            },
            1e-9,
        );
    }
}

#[test]
fn cwt_matches_time_domain_correlation() {
    let fs = 500.0;
    // below about four samples the sampled wavelet aliases past Nyquist and
    // the two definitions drift apart by more than the tolerance
    let scales = vec![4.0, 5.5, 9.0, 17.0, 30.0];
    let cfg = CwtConfig {
        scales: ScaleSpec::Explicit(scales.clone()),
        ..CwtConfig::default()
    };
    let x = random_real(&mut rng(22), 200);
    let g = cwt(&Signal::new(x.clone(), fs).unwrap(), &cfg).unwrap();
    let w0 = 2.0 * PI * cfg.center_frequency;
    // columns follow descending scale
    assert_grid_close(
        &g,
        |b, c| {
            let a = scales[scales.len() - 1 - c];
            let sum: Complex64 = x
                .iter()
                .enumerate()
                .map(|(t, &v)| {
                    let u = (t as f64 - b as f64) / a;
                    let psi = Complex64::from_polar(PI.powf(-0.25) * (-0.5 * u * u).exp(), w0 * u);
                    v * psi.conj() / a.sqrt()
                })
                .sum();
            sum.norm()
        },
        1e-9,
    );
}

#[test]
fn stft_matches_direct_windowed_sum() {
    let fs = 2000.0;
    let x = random_real(&mut rng(23), 700);
    let cfg = StftConfig::default();
    let g = stft(&Signal::new(x.clone(), fs).unwrap(), &cfg).unwrap();
    let w = hann_window(256).unwrap();
    assert_eq!(g.rows(), (700 - 256) / 6 + 1);
    assert_grid_close(
        &g,
        |f, m| {
            let frame: Complex64 = (0..256)
                .map(|k| {
                    let phase = -2.0 * PI * (m * k % 512) as f64 / 512.0;
                    x[f * 6 + k] * w[k] * Complex64::from_polar(1.0, phase)
                })
                .sum();
            frame.norm()
        },
        1e-10,
    );
    assert!((g.time_axis()[3] - 18.0 / fs).abs() < 1e-15);
}

#[test]
fn chirplet_matches_direct_sum_with_rate() {
    let fs = 1000.0;
    let x = random_real(&mut rng(24), 300);
    let cfg = ChirpletConfig {
        chirp_rate: 350.0,
        freq_points: 64,
        hop: 17,
        ..ChirpletConfig::default()
    };
    let g = chirplet(&Signal::new(x.clone(), fs).unwrap(), &cfg).unwrap();
    let z = analytic(&Signal::new(x, fs).unwrap()).unwrap();
    let w = gaussian_window(64, 8.0).unwrap();
    let alpha = 2.0 * PI * cfg.chirp_rate;
    assert_grid_close(
        &g,
        |f, m| {
            let start = f * cfg.hop;
            let sum: Complex64 = (0..64)
                .map(|k| {
                    let d = (k as f64 - 31.5) / fs;
                    let rot = Complex64::from_polar(1.0, -0.5 * alpha * d * d);
                    let phase = -2.0 * PI * (m * k) as f64 / 128.0;
                    z[start + k] * w[k] * rot * Complex64::from_polar(1.0, phase)
                })
                .sum();
            sum.norm()
        },
        1e-10,
    );
    assert!((g.time_axis()[0] - 31.5 / fs).abs() < 1e-15);
}

#[test]
fn analytic_matches_naive_construction() {
    let mut r = rng(25);
    for n in [2usize, 7, 16, 33, 100] {
        let x = random_real(&mut r, n);
        let z = analytic(&Signal::new(x.clone(), 1.0).unwrap()).unwrap();
        let spec = naive_dft(
            &x.iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect::<Vec<_>>(),
        );
        for (t, zt) in z.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, s) in spec.iter().enumerate() {
                let gain = if k == 0 || 2 * k == n {
                    1.0
                } else if 2 * k < n {
                    2.0
                } else {
                    0.0
                };
                acc += gain * s * Complex64::from_polar(1.0, 2.0 * PI * (k * t) as f64 / n as f64);
            }
            assert!((zt - acc / n as f64).norm() < 1e-12);
            assert_eq!(zt.re, x[t]);
        }
    }
}

#[test]
fn mann_whitney_exact_matches_enumeration() {
    let mut r = rng(26);
    for n1 in 1..=6 {
        for n2 in 1..=6 {
            let a: Vec<f64> = (0..n1).map(|_| r.random_range(0..3) as f64).collect();
            let b: Vec<f64> = (0..n2).map(|_| r.random_range(0..3) as f64).collect();
            let got = mann_whitney_u(&a, &b, MwMode::Exact).unwrap();
            assert_eq!(got.u, pairwise_u(&a, &b));
            assert!((got.p_two_sided - brute_force_p(&a, &b)).abs() < 1e-12);
            let dist = exact_distribution(&a, &b).unwrap();
            let total: f64 = dist.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut r = rng(27);
    let p = init_params(5, 4, 9);
    let examples: Vec<Example> = (0..3)
        .map(|i| Example {
            features: random_real(&mut r, 5),
            label: Label::from_index(i % 2),
        })
        .collect();
    let batch: Vec<&Example> = examples.iter().collect();
    let (_, grad) = loss_and_grad(&p, &batch).unwrap();
    let flat = p.flatten();
    let analytic_grad = grad.flatten();
    let h = 1e-5;
    for i in 0..flat.len() {
        let mut plus = p.clone();
        let mut minus = p.clone();
        let mut fp = flat.clone();
        fp[i] += h;
        plus.set_flat(&fp).unwrap();
        fp[i] -= 2.0 * h;
        minus.set_flat(&fp).unwrap();
        let numeric = (loss_and_grad(&plus, &batch).unwrap().0
            - loss_and_grad(&minus, &batch).unwrap().0)
            / (2.0 * h);
        let err = (numeric - analytic_grad[i]).abs()
            / numeric.abs().max(analytic_grad[i].abs()).max(1e-3);
        assert!(
            err < 1e-4,
            "parameter {i}: {numeric} vs {}",
            analytic_grad[i]
        );
    }
}
