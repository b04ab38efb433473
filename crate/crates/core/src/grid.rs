use std::f64::consts::PI;

use crate::error::{HartreeError, Result};

/// Periodic cube `[-L/2, L/2)^3` sampled at `n` points per axis.
///
/// Samples are stored row-major with the last axis fastest: flat index
/// `(i * n + j) * n + k` for axis indices `(i, j, k)`.
#[derive(Debug, Clone)]
pub struct GridSpec {
    n: usize,
    l: f64,
    h: f64,
    coords: Vec<f64>,
    wavenumbers: Vec<f64>,
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.l == other.l
    }
}

pub fn make_grid(n: usize, l: f64) -> Result<GridSpec> {
    if n < 8 || !n.is_power_of_two() {
        return Err(HartreeError::Grid(format!(
            "n = {n} must be a power of two and at least 8"
        )));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(HartreeError::Grid(format!("L = {l} must be positive")));
    }
    let h = l / n as f64;
    let coords = (0..n).map(|i| -l / 2.0 + i as f64 * h).collect();
    let wavenumbers = (0..n)
        .map(|j| 2.0 * PI * mode_index(j, n) as f64 / l)
        .collect();
    Ok(GridSpec {
        n,
        l,
        h,
        coords,
        wavenumbers,
    })
}

/// Signed integer frequency of DFT slot `j`, in `[-n/2, n/2)`.
#[inline]
pub fn mode_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl GridSpec {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn cell_volume(&self) -> f64 {
        self.h * self.h * self.h
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Angular wavenumbers `2 pi m / L` per DFT slot.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Derivative multiplier: the wavenumber with the Nyquist slot zeroed.
    pub fn derivative_wavenumbers(&self) -> Vec<f64> {
        let mut k = self.wavenumbers.clone();
        k[self.n / 2] = 0.0;
        k
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.h
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    /// Position of flat index `idx`.
    #[inline]
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let (i, j, k) = self.unravel(idx);
        [self.coords[i], self.coords[j], self.coords[k]]
    }

    /// Wave vector of flat spectral index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let (i, j, k) = self.unravel(idx);
        [
            self.wavenumbers[i],
            self.wavenumbers[j],
            self.wavenumbers[k],
        ]
    }

    /// `|x|^2` at every grid point.
    pub fn radius_squared(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.len());
        for i in 0..n {
            for j in 0..n {
                let a = self.coords[i] * self.coords[i] + self.coords[j] * self.coords[j];
                for k in 0..n {
                    out.push(a + self.coords[k] * self.coords[k]);
                }
            }
        }
        out
    }

    /// `|k|^2` at every spectral slot, Nyquist included.
    pub fn wavenumber_squared(&self) -> Vec<f64> {
        let n = self.n;
        let kk = &self.wavenumbers;
        let mut out = Vec::with_capacity(self.len());
        for i in 0..n {
            for j in 0..n {
                let a = kk[i] * kk[i] + kk[j] * kk[j];
                for k in 0..n {
                    out.push(a + kk[k] * kk[k]);
                }
            }
        }
        out
    }

    /// `|k|^2` using the derivative multiplier (Nyquist slots contribute 0).
    pub fn derivative_wavenumber_squared(&self) -> Vec<f64> {
        let n = self.n;
        let kk = self.derivative_wavenumbers();
        let mut out = Vec::with_capacity(self.len());
        for i in 0..n {
            for j in 0..n {
                let a = kk[i] * kk[i] + kk[j] * kk[j];
                for k in 0..n {
                    out.push(a + kk[k] * kk[k]);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_coordinates() {
        let g = make_grid(8, 8.0).unwrap();
        assert_eq!(g.h(), 1.0);
        assert_eq!(g.coords(), &[-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(g.coords()[g.n() / 2], 0.0);
    }

    #[test]
    fn wavenumbers() {
        let g = make_grid(8, 8.0).unwrap();
        assert!((g.wavenumbers()[1] - PI / 4.0).abs() < 1e-15);
        let g = make_grid(16, 32.0).unwrap();
        assert_eq!(g.h(), 2.0);
        assert!((g.wavenumbers()[1] - PI / 16.0).abs() < 1e-15);
        assert!((g.wavenumbers()[8] + PI / 2.0).abs() < 1e-15);
        assert_eq!(g.derivative_wavenumbers()[8], 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_grid(12, 1.0).is_err());
        assert!(make_grid(4, 1.0).is_err());
        assert!(make_grid(16, 0.0).is_err());
        assert!(make_grid(16, -2.0).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let g = make_grid(16, 1.0).unwrap();
        for idx in [0, 17, 300, 4095] {
            let (i, j, k) = g.unravel(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
    }
}
