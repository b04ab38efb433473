//! Quadrature, norms and Fourier multipliers on the periodic grid.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{HartreeError, Result};
use crate::field::{ScalarField, SpectrumField};
use crate::grid::{mode_index, GridSpec};

/// Largest allowed tail fraction beyond two thirds of Nyquist for resampled fields.
pub const ALIAS_TAIL_LIMIT: f64 = 1e-6;

/// Rectangle rule `h^3 * sum f`.
pub fn integrate(f: &ScalarField) -> Complex64 {
    f.values().iter().sum::<Complex64>() * f.grid().cell_volume()
}

/// `h^3 * sum of real samples`.
pub fn integrate_real(grid: &GridSpec, values: &[f64]) -> f64 {
    values.iter().sum::<f64>() * grid.cell_volume()
}

/// Discrete `L^r` norm; pass `f64::INFINITY` for the sup norm.
pub fn norm(f: &ScalarField, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(HartreeError::Param {
            name: "r",
            reason: format!("norm exponent {r} must be >= 1"),
        });
    }
    if r.is_infinite() {
        return Ok(f.max_abs());
    }
    let dv = f.grid().cell_volume();
    let s: f64 = if r == 2.0 {
        f.values().iter().map(|v| v.norm_sqr()).sum()
    } else {
        f.values().iter().map(|v| v.norm().powf(r)).sum()
    };
    Ok((s * dv).powf(1.0 / r))
}

/// Squared `L^2` norm.
pub fn mass(f: &ScalarField) -> f64 {
    f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid().cell_volume()
}

/// Spectral gradient; the Nyquist slot of each axis is differentiated to zero.
pub fn gradient(f: &ScalarField) -> [ScalarField; 3] {
    let spec = f.to_spectrum();
    gradient_from_spectrum(&spec)
}

pub fn gradient_from_spectrum(spec: &SpectrumField) -> [ScalarField; 3] {
    let grid = spec.grid();
    let kd = grid.derivative_wavenumbers();
    let n = grid.n();
    let mut out: Vec<ScalarField> = Vec::with_capacity(3);
    for axis in 0..3 {
        let mut s = spec.clone();
        for (idx, v) in s.modes_mut().iter_mut().enumerate() {
            let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
            let kk = match axis {
                0 => kd[i],
                1 => kd[j],
                _ => kd[k],
            };
            *v *= Complex64::new(0.0, kk);
        }
        out.push(s.into_field());
    }
    let mut it = out.into_iter();
    [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
}

/// `||grad f||_{L^2}` evaluated in Fourier space.
pub fn sobolev_h1dot(f: &ScalarField) -> f64 {
    kinetic_from_spectrum(&f.to_spectrum()).sqrt()
}

/// `||grad f||^2_{L^2}` from the spectrum, using the Laplacian symbol `|k|^2`.
/// Differs from the squared norm of [`gradient`] only through Nyquist slots,
/// which carry no kinetic cost there and would make the functional degenerate.
pub fn kinetic_from_spectrum(spec: &SpectrumField) -> f64 {
    let grid = spec.grid();
    let k2 = grid.wavenumber_squared();
    let s: f64 = spec
        .modes()
        .iter()
        .zip(&k2)
        .map(|(v, &k)| k * v.norm_sqr())
        .sum();
    s * grid.cell_volume() / grid.len() as f64
}

/// Unit-modulus multiplier `exp(-i |k|^2 t)` for the free flow over time `t`.
pub fn propagator_multiplier(grid: &GridSpec, t: f64) -> Vec<Complex64> {
    grid.wavenumber_squared()
        .into_iter()
        .map(|k2| Complex64::from_polar(1.0, -k2 * t))
        .collect()
}

/// `exp(i t Laplacian) f`.
pub fn free_propagator(f: &ScalarField, t: f64) -> ScalarField {
    if t == 0.0 {
        return f.clone();
    }
    let mut spec = f.to_spectrum();
    spec.apply_complex_multiplier(&propagator_multiplier(f.grid(), t));
    spec.into_field()
}

/// Fourier multiplier `|k|^s`; the zero mode maps to 0 for any `s`.
pub fn fractional_laplacian(f: &ScalarField, s: f64) -> ScalarField {
    let m: Vec<f64> = f
        .grid()
        .wavenumber_squared()
        .into_iter()
        .map(|k2| if k2 > 0.0 { k2.powf(s / 2.0) } else { 0.0 })
        .collect();
    let mut spec = f.to_spectrum();
    spec.apply_multiplier(&m);
    spec.into_field()
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let m: Vec<f64> = f.grid().wavenumber_squared().into_iter().map(|k2| -k2).collect();
    let mut spec = f.to_spectrum();
    spec.apply_multiplier(&m);
    spec.into_field()
}

/// `(-Laplacian)^{-1}` with the zero mode dropped.
pub fn inverse_neg_laplacian(f: &ScalarField) -> ScalarField {
    let m: Vec<f64> = f
        .grid()
        .wavenumber_squared()
        .into_iter()
        .map(|k2| if k2 > 0.0 { 1.0 / k2 } else { 0.0 })
        .collect();
    let mut spec = f.to_spectrum();
    spec.apply_multiplier(&m);
    spec.into_field()
}

/// Fraction of spectral mass in slots whose largest |m| exceeds n/3.
pub fn tail_fraction_from_spectrum(spec: &SpectrumField) -> f64 {
    let n = spec.grid().n();
    let cut = n as i64 / 3;
    let mut tail = 0.0;
    let mut total = 0.0;
    for (idx, v) in spec.modes().iter().enumerate() {
        let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
        let m = mode_index(i, n)
            .abs()
            .max(mode_index(j, n).abs())
            .max(mode_index(k, n).abs());
        let e = v.norm_sqr();
        total += e;
        if m > cut {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

pub fn tail_fraction(f: &ScalarField) -> f64 {
    tail_fraction_from_spectrum(&f.to_spectrum())
}

/// Fraction of `L^2` mass outside the ball `|x| <= r`.
pub fn mass_fraction_outside(f: &ScalarField, r: f64) -> f64 {
    let grid = f.grid();
    let r2 = grid.radius_squared();
    let mut out = 0.0;
    let mut total = 0.0;
    for (v, &q) in f.values().iter().zip(&r2) {
        let e = v.norm_sqr();
        total += e;
        if q > r * r {
            out += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        out / total
    }
}

/// Periodic band-limited interpolation kernel for sample offset `t`.
fn dirichlet_kernel(t: f64, n: usize, l: f64) -> f64 {
    let h = l / n as f64;
    let s = (PI * t / l).tan();
    if s.abs() < 1e-14 {
        return 1.0;
    }
    (PI * t / h).sin() / (n as f64 * s)
}

fn resample_axis(data: &mut [Complex64], n: usize, axis: usize, w: &[f64]) {
    let mut line = vec![Complex64::default(); n];
    let mut out = vec![Complex64::default(); n];
    let stride = match axis {
        0 => n * n,
        1 => n,
        _ => 1,
    };
    for a in 0..n {
        for b in 0..n {
            let base = match axis {
                0 => a * n + b,
                1 => a * n * n + b,
                _ => (a * n + b) * n,
            };
            for (t, l) in line.iter_mut().enumerate() {
                *l = data[base + t * stride];
            }
            for (i, o) in out.iter_mut().enumerate() {
                let row = &w[i * n..(i + 1) * n];
                let mut acc = Complex64::default();
                for (c, v) in row.iter().zip(&line) {
                    acc += v * c;
                }
                *o = acc;
            }
            for (t, o) in out.iter().enumerate() {
                data[base + t * stride] = *o;
            }
        }
    }
}

/// `lambda^{1/2} f(lambda x)` by trigonometric interpolation, zero where
/// `lambda x` falls outside the box.
pub fn rescale_field(f: &ScalarField, lambda: f64) -> Result<ScalarField> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(HartreeError::Param {
            name: "lambda",
            reason: format!("scale {lambda} must be positive"),
        });
    }
    if lambda == 1.0 {
        return Ok(f.clone());
    }
    let grid = f.grid();
    let n = grid.n();
    let l = grid.l();
    let h = grid.h();
    let x = grid.coords();

    // the source must vanish wherever the target would sample outside the box
    let half = if lambda < 1.0 { lambda * l / 2.0 } else { l / 2.0 } - 2.0 * h;
    let total = mass(f);
    if total > 0.0 {
        let outside: f64 = f
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let p = grid.position(*i);
                p.iter().any(|c| c.abs() > half)
            })
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
            * grid.cell_volume();
        if outside > ALIAS_TAIL_LIMIT * total {
            return Err(HartreeError::Support);
        }
    }

    let mut w = vec![0.0; n * n];
    for i in 0..n {
        let y = lambda * x[i];
        if y < -l / 2.0 || y >= l / 2.0 {
            continue;
        }
        for j in 0..n {
            w[i * n + j] = dirichlet_kernel(y - x[j], n, l);
        }
    }
    let mut data = f.values().to_vec();
    for axis in 0..3 {
        resample_axis(&mut data, n, axis, &w);
    }
    let s = lambda.sqrt();
    for v in data.iter_mut() {
        *v *= s;
    }
    let out = ScalarField::new(grid.clone(), data)?;
    let tail = tail_fraction(&out);
    if tail > ALIAS_TAIL_LIMIT {
        return Err(HartreeError::Aliasing {
            tail,
            limit: ALIAS_TAIL_LIMIT,
        });
    }
    Ok(out)
}

/// `h^3 * sum conj(a) b`.
pub fn inner(a: &ScalarField, b: &ScalarField) -> Complex64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        * a.grid().cell_volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn integrate_examples() {
        let g = make_grid(8, 8.0).unwrap();
        let one = ScalarField::from_real_fn(&g, |_| 1.0);
        assert!((integrate(&one).re - 512.0).abs() < 1e-12);
        let s = ScalarField::from_real_fn(&g, |x| (2.0 * PI * x[0] / 8.0).sin());
        assert!(integrate(&s).norm() < 1e-13);
    }

    #[test]
    fn norm_examples() {
        let g = make_grid(8, 8.0).unwrap();
        let z = ScalarField::zeros(&g);
        assert_eq!(norm(&z, 3.0).unwrap(), 0.0);
        assert_eq!(norm(&z, f64::INFINITY).unwrap(), 0.0);
        let two = ScalarField::from_real_fn(&g, |_| 2.0);
        assert!((norm(&two, 2.0).unwrap() - 2.0 * 512f64.sqrt()).abs() < 1e-12);
        assert!(norm(&two, 0.5).is_err());
    }

    #[test]
    fn gradient_of_single_mode() {
        let g = make_grid(8, 8.0).unwrap();
        let k = 2.0 * PI / 8.0;
        let f = ScalarField::from_fn(&g, |x| Complex64::from_polar(1.0, k * x[0]));
        let [gx, gy, gz] = gradient(&f);
        for (a, b) in gx.values().iter().zip(f.values()) {
            assert!((a - Complex64::new(0.0, k) * b).norm() < 1e-12);
        }
        assert!(gy.max_abs() < 1e-12 && gz.max_abs() < 1e-12);
    }

    #[test]
    fn h1dot_of_sine() {
        let g = make_grid(8, 8.0).unwrap();
        let f = ScalarField::from_real_fn(&g, |x| (2.0 * PI * x[0] / 8.0).sin());
        let want = (PI / 4.0) * 16.0;
        assert!((sobolev_h1dot(&f) - want).abs() < 1e-10);
        let direct: f64 = gradient(&f).iter().map(|c| mass(c)).sum::<f64>().sqrt();
        assert!((direct - want).abs() < 1e-10);
    }

    #[test]
    fn nyquist_derivative_is_zero() {
        let g = make_grid(8, 8.0).unwrap();
        let f = ScalarField::from_real_fn(&g, |x| (PI * x[0]).cos());
        let [gx, _, _] = gradient(&f);
        assert!(gx.max_abs() < 1e-12);
    }

    #[test]
    fn propagator_single_mode() {
        let g = make_grid(8, 8.0).unwrap();
        let k = PI / 4.0;
        let f = ScalarField::from_fn(&g, |x| Complex64::from_polar(1.0, k * x[1]));
        let t = 0.37;
        let u = free_propagator(&f, t);
        let ph = Complex64::from_polar(1.0, -k * k * t);
        for (a, b) in u.values().iter().zip(f.values()) {
            assert!((a - ph * b).norm() < 1e-12);
        }
    }

    #[test]
    fn dirichlet_kernel_interpolates_nodes() {
        let n = 16;
        let l = 4.0;
        let h = l / n as f64;
        assert_eq!(dirichlet_kernel(0.0, n, l), 1.0);
        for j in 1..n {
            assert!(dirichlet_kernel(j as f64 * h, n, l).abs() < 1e-13);
        }
    }

    #[test]
    fn rescale_identity() {
        let g = make_grid(16, 10.0).unwrap();
        let f = ScalarField::from_real_fn(&g, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp());
        assert_eq!(rescale_field(&f, 1.0).unwrap(), f);
    }
}
