//! Commutative side: plane functions, the Laguerre–Gauss bases `e_{m,n}`
//! and `ε_{j,n}`, coefficient analysis/synthesis and angular modes.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, WeylError};
use crate::ncspace::{DiagonalIndex, OperatorMatrix};
use crate::quadrature::PolarScheme;
use crate::specfun::{ell_magnitude_all, i_pow, laguerre_gauss, laguerre_gauss_table, EpsParam};

type Evaluator = dyn Fn(f64, f64) -> Complex64 + Send + Sync;

/// A complex function on the plane, `(x, y) ↦ f(x, y)`.
#[derive(Clone)]
pub struct PhaseFunction {
    eval: Arc<Evaluator>,
    band_limit: Option<usize>,
}

impl std::fmt::Debug for PhaseFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhaseFunction").field("band_limit", &self.band_limit).finish()
    }
}

impl PhaseFunction {
    pub fn new(f: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            band_limit: None,
        }
    }

    /// Declares that only angular modes `|j| ≤ band` are present.
    pub fn with_band_limit(mut self, band: usize) -> Self {
        self.band_limit = Some(band);
        self
    }

    pub fn band_limit(&self) -> Option<usize> {
        self.band_limit
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        (self.eval)(x, y)
    }

    pub fn eval_polar(&self, rho: f64, theta: f64) -> Complex64 {
        self.eval(rho * theta.cos(), rho * theta.sin())
    }

    pub fn as_fn(&self) -> impl Fn(f64, f64) -> Complex64 + Sync + '_ {
        move |x, y| self.eval(x, y)
    }

    pub fn zero() -> Self {
        Self::new(|_, _| Complex64::new(0.0, 0.0)).with_band_limit(0)
    }

    /// `e^{-a(x² + y²)/2}`.
    pub fn gaussian(a: f64) -> Self {
        Self::new(move |x, y| Complex64::new((-0.5 * a * (x * x + y * y)).exp(), 0.0)).with_band_limit(0)
    }

    pub fn e_basis(m: usize, n: usize, eps: EpsParam) -> Self {
        Self::new(move |x, y| e_basis_eval(m, n, x, y, eps)).with_band_limit(m.abs_diff(n))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let f = self.eval.clone();
        Self {
            eval: Arc::new(move |x, y| c * f(x, y)),
            band_limit: self.band_limit,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let band = self.band_limit.zip(other.band_limit).map(|(a, b)| a.max(b));
        Self {
            eval: Arc::new(move |x, y| f(x, y) + g(x, y)),
            band_limit: band,
        }
    }

    pub fn times(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let band = self.band_limit.zip(other.band_limit).map(|(a, b)| a + b);
        Self {
            eval: Arc::new(move |x, y| f(x, y) * g(x, y)),
            band_limit: band,
        }
    }
}

/// `e_{m,n}(x, y) = (2/ε)(−1)^m l_{n,m}(2y/√ε, −2x/√ε)`.
pub fn e_basis_eval(m: usize, n: usize, x: f64, y: f64, eps: EpsParam) -> Complex64 {
    let r = 2.0 / eps.sqrt();
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    laguerre_gauss(n, m, r * y, -r * x) * (sign * 2.0 / eps.get())
}

/// Radial factors `(2/ε)(−1)^n i^{-|j|} ℓ_{|j|,n}(2ρ/√ε)` for n = 0..=nmax.
pub fn epsilon_radial_all(j: i64, nmax: usize, rho: f64, eps: EpsParam) -> Vec<Complex64> {
    let k = j.unsigned_abs() as usize;
    // ℓ carries i^{|j|}; the basis carries i^{-|j|}
    let phase = i_pow(k as i64) * i_pow(-(k as i64));
    ell_magnitude_all(k, nmax, 2.0 * rho / eps.sqrt())
        .into_iter()
        .enumerate()
        .map(|(n, v)| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            phase * (sign * 2.0 / eps.get() * v)
        })
        .collect()
}

/// `ε_{j,n}` in polar coordinates.
pub fn epsilon_basis_eval(j: i64, n: usize, rho: f64, theta: f64, eps: EpsParam) -> Complex64 {
    epsilon_radial_all(j, n, rho, eps)[n] * Complex64::from_polar(1.0, -(j as f64) * theta)
}

/// Coefficients against `e_{m,n}`, normalized so that `e_{m,n}` maps to the
/// unit field at (m, n).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffField {
    pub eps: EpsParam,
    pub c: Array2<Complex64>,
}

impl CoeffField {
    pub fn zeros(size: usize, eps: EpsParam) -> Self {
        Self {
            eps,
            c: Array2::zeros((size, size)),
        }
    }

    pub fn size(&self) -> usize {
        self.c.nrows()
    }

    pub fn into_operator(self) -> OperatorMatrix {
        OperatorMatrix { eps: self.eps, a: self.c }
    }

    pub fn from_operator(a: OperatorMatrix) -> Self {
        Self { eps: a.eps, c: a.a }
    }
}

/// Angular Fourier modes `f_j(ρ_k)` on a scheme's radial nodes.
#[derive(Debug, Clone)]
pub struct AngularModes {
    pub band: usize,
    pub rho: Vec<f64>,
    /// `modes[j + band][k]`.
    pub modes: Vec<Vec<Complex64>>,
}

impl AngularModes {
    pub fn mode(&self, j: i64) -> Option<&[Complex64]> {
        let idx = j + self.band as i64;
        (idx >= 0 && (idx as usize) < self.modes.len()).then(|| self.modes[idx as usize].as_slice())
    }

    /// `Σ_j f_j(ρ_k) e^{ijθ}`.
    pub fn reconstruct(&self, k: usize, theta: f64) -> Complex64 {
        (0..self.modes.len())
            .map(|i| {
                let j = i as i64 - self.band as i64;
                self.modes[i][k] * Complex64::from_polar(1.0, j as f64 * theta)
            })
            .sum()
    }
}

/// Samples on the scheme grid, `[radial][angular]`.
fn sample_grid(f: &PhaseFunction, scheme: &PolarScheme) -> Vec<Vec<Complex64>> {
    scheme
        .rho()
        .par_iter()
        .map(|&r| (0..scheme.angular_count).map(|t| f.eval_polar(r, scheme.theta(t))).collect())
        .collect()
}

fn modes_from_samples(samples: &[Vec<Complex64>], band: usize, count: usize) -> Vec<Vec<Complex64>> {
    let unit: Vec<Complex64> = (0..count)
        .map(|t| Complex64::from_polar(1.0, -2.0 * PI * t as f64 / count as f64))
        .collect();
    let width = 2 * band + 1;
    let per_radius: Vec<Vec<Complex64>> = samples
        .par_iter()
        .map(|ring| {
            (0..width)
                .map(|i| {
                    let j = i as i64 - band as i64;
                    let jm = j.rem_euclid(count as i64) as usize;
                    let s: Complex64 = ring.iter().enumerate().map(|(t, v)| v * unit[(jm * t) % count]).sum();
                    s / count as f64
                })
                .collect()
        })
        .collect();
    (0..width).map(|i| per_radius.iter().map(|row| row[i]).collect()).collect()
}

/// `f_j(ρ_k) = (2π)^{-1} ∫ e^{-ijθ} f(ρ_k, θ) dθ` for |j| ≤ band.
pub fn angular_decompose(f: &PhaseFunction, band: usize, scheme: &PolarScheme) -> Result<AngularModes> {
    if scheme.angular_count < 2 * band + 1 {
        return Err(WeylError::InvalidParameter {
            name: "band",
            reason: format!("{} angular nodes cannot resolve band {band}", scheme.angular_count),
        });
    }
    let samples = sample_grid(f, scheme);
    Ok(AngularModes {
        band,
        rho: scheme.rho().to_vec(),
        modes: modes_from_samples(&samples, band, scheme.angular_count),
    })
}

/// `c[m][n] = (ε/2π)⟨e_{m,n}, f⟩`.
pub fn analyze(f: &PhaseFunction, size: usize, eps: EpsParam, scheme: &PolarScheme) -> Result<CoeffField> {
    let band = size - 1;
    let modes = angular_decompose(f, band, scheme)?;
    let idx = DiagonalIndex::new(size);
    let weights = scheme.radial_weights();
    let mut c = Array2::zeros((size, size));
    let per_j: Vec<(i64, Vec<Complex64>)> = (-(band as i64)..=band as i64)
        .into_par_iter()
        .map(|j| {
            let len = idx.diagonal_len(j);
            let fm = modes.mode(-j).expect("mode within band");
            let mut acc = vec![Complex64::new(0.0, 0.0); len];
            for (k, &r) in modes.rho.iter().enumerate() {
                let radial = epsilon_radial_all(j, len - 1, r, eps);
                let wf = fm[k] * weights[k];
                for (a, rad) in acc.iter_mut().zip(&radial) {
                    *a += rad.conj() * wf;
                }
            }
            // (ε/2π)·2π∫ conj(R) f_{-j} ρdρ
            (j, acc.into_iter().map(|v| v * eps.get()).collect())
        })
        .collect();
    for (j, vals) in per_j {
        for (r, v) in vals.into_iter().enumerate() {
            let (m, n) = idx.to_mn(j, r).expect("radial label in range");
            c[[m, n]] = v;
        }
    }
    Ok(CoeffField { eps, c })
}

/// `Σ c[m][n] e_{m,n}(x, y)`.
pub fn synthesize(field: &CoeffField, x: f64, y: f64) -> Complex64 {
    let size = field.size();
    if size == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let r = 2.0 / field.eps.sqrt();
    let table = laguerre_gauss_table(size, r * y, -r * x);
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..size {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        for n in 0..size {
            let c = field.c[[m, n]];
            if c != Complex64::new(0.0, 0.0) {
                sum += c * table[n][m] * sign;
            }
        }
    }
    sum * (2.0 / field.eps.get())
}
