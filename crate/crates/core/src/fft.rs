//! 3D FFT on row-major cubes, built from rustfft 1D plans.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> PlanPair {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

fn transform(data: &mut [Complex64], n: usize, fft: &dyn Fft<f64>) {
    assert_eq!(data.len(), n * n * n);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    // last axis: contiguous lines
    fft.process_with_scratch(data, &mut scratch);

    let mut plane = vec![Complex64::default(); n * n];
    // middle axis: transpose each (j, k) slab
    for i in 0..n {
        let slab = &mut data[i * n * n..(i + 1) * n * n];
        for j in 0..n {
            for k in 0..n {
                plane[k * n + j] = slab[j * n + k];
            }
        }
        fft.process_with_scratch(&mut plane, &mut scratch);
        for j in 0..n {
            for k in 0..n {
                slab[j * n + k] = plane[k * n + j];
            }
        }
    }
    // first axis: gather (i, k) planes at fixed j
    for j in 0..n {
        for i in 0..n {
            let row = (i * n + j) * n;
            for k in 0..n {
                plane[k * n + i] = data[row + k];
            }
        }
        fft.process_with_scratch(&mut plane, &mut scratch);
        for i in 0..n {
            let row = (i * n + j) * n;
            for k in 0..n {
                data[row + k] = plane[k * n + i];
            }
        }
    }
}

/// Unnormalized forward transform with kernel `exp(-2 pi i m j / n)`.
pub fn forward(data: &mut [Complex64], n: usize) {
    let (fwd, _) = plans(n);
    transform(data, n, fwd.as_ref());
}

/// Inverse transform including the `1/n^3` factor.
pub fn inverse(data: &mut [Complex64], n: usize) {
    let (_, inv) = plans(n);
    transform(data, n, inv.as_ref());
    let s = 1.0 / (n * n * n) as f64;
    for v in data.iter_mut() {
        *v *= s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matches_naive_dft() {
        let n = 8;
        let data: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        forward(&mut fast, n);
        for (mi, mj, mk) in [(0, 0, 0), (1, 2, 3), (7, 4, 5)] {
            let mut acc = Complex64::default();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let ph = -2.0 * PI * ((mi * i + mj * j + mk * k) as f64) / n as f64;
                        acc += data[(i * n + j) * n + k] * Complex64::from_polar(1.0, ph);
                    }
                }
            }
            let got = fast[(mi * n + mj) * n + mk];
            assert!((got - acc).norm() < 1e-10, "{got} vs {acc}");
        }
    }

    #[test]
    fn roundtrip() {
        let n = 16;
        let data: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64).sqrt(), -(i as f64 * 0.5).sin()))
            .collect();
        let mut buf = data.clone();
        forward(&mut buf, n);
        inverse(&mut buf, n);
        let err: f64 = buf.iter().zip(&data).map(|(a, b)| (a - b).norm_sqr()).sum();
        let nrm: f64 = data.iter().map(|a| a.norm_sqr()).sum();
        assert!((err / nrm).sqrt() < 1e-13);
    }
}
