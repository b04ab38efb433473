//! Parameters, weight, Riesz potential and conserved functionals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{param_err, HartreeError, Result};
use crate::field::ScalarField;
use crate::grid::GridSpec;
use crate::spectral;

/// Default regularization length of the weight `(|x|^2 + eps^2)^{-b/2}`.
pub const DEFAULT_EPS_REG: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Focusing,
    Defocusing,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Focusing => 1.0,
            Sign::Defocusing => -1.0,
        }
    }

    pub fn from_value(s: f64) -> Option<Self> {
        if s == 1.0 {
            Some(Sign::Focusing)
        } else if s == -1.0 {
            Some(Sign::Defocusing)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub b: f64,
    pub p: f64,
    pub sign: Sign,
    pub eps_reg: f64,
}

/// Largest admissible `b` for the given `alpha`.
pub fn b_bound(alpha: f64) -> f64 {
    ((1.0 + alpha) / 3.0).min(alpha / 2.0)
}

pub fn validate_params(alpha: f64, b: f64, sign: Sign) -> Result<ModelParams> {
    if !(alpha > 0.0 && alpha < 3.0) {
        return Err(param_err("alpha", format!("{alpha} not in (0, 3)")));
    }
    if !(b >= 0.0) {
        return Err(param_err("b", format!("{b} is negative")));
    }
    let bound = b_bound(alpha);
    if b > bound * (1.0 + 1e-12) {
        return Err(param_err(
            "b",
            format!("{b} exceeds min((1+alpha)/3, alpha/2) = {bound}"),
        ));
    }
    let p = 3.0 + alpha - 2.0 * b;
    if p < 3.0 - 1e-12 {
        return Err(param_err("p", format!("p = {p} < 3")));
    }
    Ok(ModelParams {
        alpha,
        b,
        p,
        sign,
        eps_reg: DEFAULT_EPS_REG,
    })
}

impl ModelParams {
    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(param_err("eps_reg", format!("{eps} must be positive")));
        }
        self.eps_reg = eps;
        Ok(self)
    }

    pub fn sigma(&self) -> f64 {
        self.sign.value()
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }
}

/// Normalization of the Riesz kernel `K / |x|^{3 - alpha}`.
pub fn riesz_constant(alpha: f64) -> f64 {
    use statrs::function::gamma::gamma;
    gamma((3.0 - alpha) / 2.0) / (gamma(alpha / 2.0) * PI.powf(1.5) * 2f64.powf(alpha))
}

/// Multiplier table `|k|^{-alpha}` with the zero mode removed.
#[derive(Debug, Clone)]
pub struct RieszOperator {
    alpha: f64,
    table: Vec<f64>,
}

impl RieszOperator {
    pub fn new(grid: &GridSpec, alpha: f64) -> Self {
        let table = grid
            .wavenumber_squared()
            .into_iter()
            .map(|k2| if k2 > 0.0 { k2.powf(-alpha / 2.0) } else { 0.0 })
            .collect();
        Self { alpha, table }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Apply to a real density, returning the real part of the result.
    pub fn apply_real(&self, grid: &GridSpec, g: &[f64]) -> Vec<f64> {
        let f = ScalarField::from_real(grid, g);
        let mut spec = f.to_spectrum();
        spec.apply_multiplier(&self.table);
        spec.into_field().real_part()
    }
}

pub fn apply_riesz(f: &ScalarField, op: &RieszOperator) -> ScalarField {
    let grid = f.grid();
    let l1: f64 = f.values().iter().map(|v| v.norm()).sum::<f64>() * grid.cell_volume();
    let total = spectral::integrate(f).norm();
    if total > 1e-3 * l1 {
        log::warn!(
            "riesz source has nonzero mean ({total:.3e} vs L1 {l1:.3e}); torus mean removal differs from the whole-space operator"
        );
    }
    let mut spec = f.to_spectrum();
    spec.apply_multiplier(&op.table);
    spec.into_field()
}

/// Sampled `(|x|^2 + eps^2)^{-b/2}`.
#[derive(Debug, Clone)]
pub struct SingularWeight {
    b: f64,
    eps: f64,
    values: Vec<f64>,
}

impl SingularWeight {
    pub fn new(grid: &GridSpec, b: f64, eps: f64) -> Self {
        let values = if b == 0.0 {
            vec![1.0; grid.len()]
        } else {
            grid.radius_squared()
                .into_iter()
                .map(|r2| (r2 + eps * eps).powf(-b / 2.0))
                .collect()
        };
        Self { b, eps, values }
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `|u|^e` from `|u|^2`: repeated multiplication for integer `e`, otherwise
/// `exp(e log|u|)` with `|u|` floored at `1e-300`.
#[derive(Debug, Clone, Copy)]
pub struct Power {
    e: f64,
    int: Option<i32>,
}

impl Power {
    pub fn new(e: f64) -> Self {
        let int = if e.fract() == 0.0 && e.abs() < 64.0 { Some(e as i32) } else { None };
        Self { e, int }
    }

    #[inline]
    pub fn of_square(&self, a2: f64) -> f64 {
        match self.int {
            Some(k) if k % 2 == 0 => a2.powi(k / 2),
            Some(k) => a2.powi(k / 2) * a2.sqrt(),
            None => (self.e * a2.sqrt().max(1e-300).ln()).exp(),
        }
    }
}

/// Intermediate quantities of the nonlinearity for one field.
#[derive(Debug, Clone)]
pub struct NonlinearTerms {
    /// `w |u|^p`
    pub density: Vec<f64>,
    /// `I_alpha * (w |u|^p)`
    pub potential: Vec<f64>,
    /// `|u|^{p-2}`
    pub abs_pm2: Vec<f64>,
}

/// Grid-bound model: parameters with precomputed weight and Riesz tables.
#[derive(Debug, Clone)]
pub struct HartreeModel {
    grid: GridSpec,
    params: ModelParams,
    riesz: RieszOperator,
    weight: SingularWeight,
    dilation_q: Vec<f64>,
}

impl HartreeModel {
    pub fn new(grid: &GridSpec, params: ModelParams) -> Self {
        let eps2 = params.eps_reg * params.eps_reg;
        let dilation_q = grid
            .radius_squared()
            .into_iter()
            .map(|r2| r2 / (r2 + eps2))
            .collect();
        Self {
            grid: grid.clone(),
            params,
            riesz: RieszOperator::new(grid, params.alpha),
            weight: SingularWeight::new(grid, params.b, params.eps_reg),
            dilation_q,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn riesz(&self) -> &RieszOperator {
        &self.riesz
    }

    pub fn weight(&self) -> &SingularWeight {
        &self.weight
    }

    /// Same grid and tables with the opposite or given sign.
    pub fn with_sign(&self, sign: Sign) -> Self {
        let mut m = self.clone();
        m.params.sign = sign;
        m
    }

    /// `|x|^2 / (|x|^2 + eps^2)`, the logarithmic dilation rate of the weight over `-b`.
    pub fn dilation_q(&self) -> &[f64] {
        &self.dilation_q
    }

    fn check_grid(&self, u: &ScalarField) -> Result<()> {
        if u.grid() != &self.grid {
            return Err(HartreeError::GridMismatch);
        }
        Ok(())
    }

    pub fn nonlinear_terms(&self, u: &[Complex64]) -> Result<NonlinearTerms> {
        let p = self.params.p;
        let umax = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if umax > 0.0 && p * umax.ln() > 600.0 {
            return Err(HartreeError::Numerical(format!(
                "|u|^p overflow: max |u| = {umax:.3e}"
            )));
        }
        let w = self.weight.values();
        let mut density = Vec::with_capacity(u.len());
        let mut abs_pm2 = Vec::with_capacity(u.len());
        let pow = Power::new(p);
        let pow2 = Power::new(p - 2.0);
        for (v, &wi) in u.iter().zip(w) {
            let a2 = v.norm_sqr();
            density.push(wi * pow.of_square(a2));
            abs_pm2.push(pow2.of_square(a2));
        }
        let potential = self.riesz.apply_real(&self.grid, &density);
        Ok(NonlinearTerms {
            density,
            potential,
            abs_pm2,
        })
    }

    /// `Phi = sigma w (I_alpha * (w |u|^p)) |u|^{p-2}`, so the nonlinear term is `Phi u`.
    pub fn phase_values(&self, u: &[Complex64]) -> Result<Vec<f64>> {
        let t = self.nonlinear_terms(u)?;
        let s = self.params.sigma();
        Ok(t.potential
            .iter()
            .zip(self.weight.values())
            .zip(&t.abs_pm2)
            .map(|((v, w), a)| s * w * v * a)
            .collect())
    }

    pub fn hartree_phase(&self, u: &ScalarField) -> Result<ScalarField> {
        self.check_grid(u)?;
        let phi = self.phase_values(u.values())?;
        Ok(ScalarField::from_real(&self.grid, &phi))
    }

    /// `w (I_alpha * (w |u|^p)) |u|^{p-2} u`, independent of the sign.
    pub fn nonlinearity(&self, u: &ScalarField) -> Result<ScalarField> {
        self.check_grid(u)?;
        let t = self.nonlinear_terms(u.values())?;
        let values = u
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| v * (self.weight.values()[i] * t.potential[i] * t.abs_pm2[i]))
            .collect();
        Ok(ScalarField::from_raw(self.grid.clone(), values))
    }

    pub fn potential_from_terms(&self, t: &NonlinearTerms) -> f64 {
        t.density
            .iter()
            .zip(&t.potential)
            .map(|(g, v)| g * v)
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    /// `P(u) = int (I_alpha * (w |u|^p)) w |u|^p`.
    pub fn potential_energy(&self, u: &ScalarField) -> Result<f64> {
        self.check_grid(u)?;
        let t = self.nonlinear_terms(u.values())?;
        Ok(self.potential_from_terms(&t))
    }

    /// `P` with an extra factor `|x|^2 / (|x|^2 + eps^2)` in the outer integral.
    pub fn potential_dilation_weighted(&self, t: &NonlinearTerms) -> f64 {
        t.density
            .iter()
            .zip(&t.potential)
            .zip(&self.dilation_q)
            .map(|((g, v), q)| g * v * q)
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    pub fn kinetic(&self, u: &ScalarField) -> f64 {
        spectral::kinetic_from_spectrum(&u.to_spectrum())
    }

    pub fn mass(&self, u: &ScalarField) -> f64 {
        spectral::mass(u)
    }

    /// `E = K - sigma P / p`.
    pub fn energy(&self, u: &ScalarField) -> Result<f64> {
        let k = self.kinetic(u);
        let p = self.potential_energy(u)?;
        Ok(k - self.params.sigma() * p / self.params.p)
    }
}

pub fn mass(u: &ScalarField) -> f64 {
    spectral::mass(u)
}

pub fn kinetic(u: &ScalarField) -> f64 {
    spectral::kinetic_from_spectrum(&u.to_spectrum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn admissible_params() {
        let m = validate_params(2.0, 0.5, Sign::Focusing).unwrap();
        assert_eq!(m.p, 4.0);
        assert_eq!(validate_params(2.0, 0.0, Sign::Focusing).unwrap().p, 5.0);
        let e = validate_params(1.0, 0.7, Sign::Focusing).unwrap_err();
        assert!(e.to_string().contains("b"));
        assert!(validate_params(3.0, 0.0, Sign::Focusing).is_err());
        assert!(validate_params(0.0, 0.0, Sign::Focusing).is_err());
        assert!(validate_params(2.0, -0.1, Sign::Focusing).is_err());
        assert!(validate_params(1.0, 0.5, Sign::Focusing).is_ok());
    }

    #[test]
    fn riesz_constant_values() {
        assert!((riesz_constant(2.0) - 1.0 / (4.0 * PI)).abs() < 1e-14);
        assert!((riesz_constant(1.0) - 1.0 / (2.0 * PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn weight_bounds() {
        let g = make_grid(16, 8.0).unwrap();
        let w = SingularWeight::new(&g, 0.5, 0.5);
        let max = 0.5f64.powf(-0.5);
        assert!(w.values().iter().all(|&v| v > 0.0 && v <= max * (1.0 + 1e-14)));
        let c = g.index(8, 8, 8);
        assert!((w.values()[c] - max).abs() < 1e-14);
        let w0 = SingularWeight::new(&g, 0.0, 0.5);
        assert!(w0.values().iter().all(|&v| v == 1.0));
    }
}
