use num_complex::Complex64;

use crate::error::{HartreeError, Result};
use crate::fft;
use crate::grid::GridSpec;

/// Complex samples of a field on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

/// DFT coefficients of a [`ScalarField`]; slot `j` carries integer
/// frequency `mode_index(j, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    grid: GridSpec,
    modes: Vec<Complex64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(HartreeError::Grid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(HartreeError::Numerical("non-finite sample".into()));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self::from_raw(grid.clone(), vec![Complex64::default(); grid.len()])
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn([f64; 3]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self::from_raw(grid.clone(), values)
    }

    pub fn from_real_fn(grid: &GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn from_real(grid: &GridSpec, values: &[f64]) -> Self {
        Self::from_raw(
            grid.clone(),
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_raw(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn zip_with(
        &self,
        other: &ScalarField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.grid != other.grid {
            return Err(HartreeError::GridMismatch);
        }
        Ok(Self::from_raw(
            self.grid.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// Largest imaginary part relative to the largest modulus.
    pub fn imag_fraction(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / m
    }

    pub fn to_spectrum(&self) -> SpectrumField {
        let mut modes = self.values.clone();
        fft::forward(&mut modes, self.grid.n());
        SpectrumField {
            grid: self.grid.clone(),
            modes,
        }
    }
}

impl SpectrumField {
    pub fn new(grid: GridSpec, modes: Vec<Complex64>) -> Result<Self> {
        if modes.len() != grid.len() {
            return Err(HartreeError::Grid(format!(
                "expected {} modes, got {}",
                grid.len(),
                modes.len()
            )));
        }
        Ok(Self { grid, modes })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    pub(crate) fn modes_mut(&mut self) -> &mut [Complex64] {
        &mut self.modes
    }

    /// Multiply every slot by `m[slot]`.
    pub fn apply_multiplier(&mut self, m: &[f64]) {
        for (v, &s) in self.modes.iter_mut().zip(m) {
            *v *= s;
        }
    }

    pub fn apply_complex_multiplier(&mut self, m: &[Complex64]) {
        for (v, &s) in self.modes.iter_mut().zip(m) {
            *v *= s;
        }
    }

    pub fn to_field(&self) -> ScalarField {
        let mut values = self.modes.clone();
        fft::inverse(&mut values, self.grid.n());
        ScalarField::from_raw(self.grid.clone(), values)
    }

    pub fn into_field(mut self) -> ScalarField {
        fft::inverse(&mut self.modes, self.grid.n());
        ScalarField::from_raw(self.grid, self.modes)
    }

    /// `sum |c|^2 * L^3 / n^6`, equal to the `L^2` norm squared of the field.
    pub fn parseval_mass(&self) -> f64 {
        let n3 = self.grid.len() as f64;
        self.modes.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume() / n3
    }
}
