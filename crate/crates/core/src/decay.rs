//! Weighted ℓ¹(σ) → ℓ∞(σ⁻¹) norms of the Laguerre Jacobi propagator
//! `exp(−iDt)` and the closed-form decay curve `(1+t²)^{−(1+α)/2}`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result, WeylError};
use crate::linalg::{PartialEigen, SymTridiagonal};
use crate::specfun::ln_gamma;

/// Truncation of the three-term operator with diagonal `2n+α+1` and
/// off-diagonal `−√((n+1)(n+α+1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    pub alpha: f64,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// `σ_n = [L^{(α)}_n(0)]^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub alpha: f64,
    pub sigma: Vec<f64>,
}

impl JacobiMatrix {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        self.tridiagonal().to_dense()
    }

    fn tridiagonal(&self) -> SymTridiagonal {
        SymTridiagonal {
            diag: self.diag.clone(),
            off: self.off.clone(),
        }
    }

    /// Eigenvalues plus the first `rows` components of each eigenvector.
    pub fn spectrum(&self, rows: usize) -> Result<JacobiSpectrum> {
        let PartialEigen { values, vectors } = self.tridiagonal().eigen_rows(rows)?;
        Ok(JacobiSpectrum { values, vectors })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha", format!("must be finite and >= 0, got {alpha}")));
    }
    Ok(())
}

pub fn weight_vector(alpha: f64, size: usize) -> Result<WeightVector> {
    check_alpha(alpha)?;
    let base = ln_gamma(alpha + 1.0);
    let sigma = (0..size)
        .map(|n| match n {
            // empty product; keeps σ_0 exactly 1
            0 => 1.0,
            _ => {
                let n = n as f64;
                (0.5 * (ln_gamma(n + alpha + 1.0) - ln_gamma(n + 1.0) - base)).exp()
            }
        })
        .collect();
    Ok(WeightVector { alpha, sigma })
}

pub fn build_jacobi(alpha: f64, size: usize) -> Result<(JacobiMatrix, WeightVector)> {
    check_alpha(alpha)?;
    if size < 2 {
        return Err(invalid("N", format!("must be >= 2, got {size}")));
    }
    let diag = (0..size).map(|n| 2.0 * n as f64 + alpha + 1.0).collect();
    let off = (0..size - 1)
        .map(|n| {
            let n = n as f64;
            -((n + 1.0) * (n + alpha + 1.0)).sqrt()
        })
        .collect();
    Ok((JacobiMatrix { alpha, diag, off }, weight_vector(alpha, size)?))
}

/// Eigen-data of a [`JacobiMatrix`], restricted to leading rows.
#[derive(Debug, Clone)]
pub struct JacobiSpectrum {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

impl JacobiSpectrum {
    /// Leading `rows × rows` block of `exp(−iDt)`.
    pub fn block(&self, t: f64) -> Array2<Complex64> {
        let v = self.vectors.mapv(|x| Complex64::new(x, 0.0));
        let phases = Array1::from_iter(self.values.iter().map(|&l| Complex64::from_polar(1.0, -l * t)));
        let scaled = &v * &phases;
        scaled.dot(&v.t())
    }
}

/// The full `exp(−iDt)` of the truncated matrix.
pub fn propagator(jac: &JacobiMatrix, t: f64) -> Result<Array2<Complex64>> {
    if !t.is_finite() {
        return Err(invalid("t", "must be finite"));
    }
    Ok(jac.spectrum(jac.size())?.block(t))
}

fn check_dims(g: &Array2<Complex64>, u: &[f64]) -> Result<()> {
    if g.nrows() != u.len() || g.ncols() != u.len() {
        return Err(WeylError::DimensionMismatch {
            expected: u.len(),
            got: g.nrows().max(g.ncols()),
        });
    }
    Ok(())
}

/// `max_{m,n} u_m⁻¹ u_n⁻¹ |G_mn|`.
pub fn weighted_norm(g: &Array2<Complex64>, u: &[f64]) -> Result<f64> {
    check_dims(g, u)?;
    let inv: Vec<f64> = u.iter().map(|x| x.recip()).collect();
    Ok(g
        .indexed_iter()
        .map(|((m, n), z)| (z * inv[m] * inv[n]).norm())
        .fold(0.0, f64::max))
}

/// Same quantity as [`weighted_norm`], computed as the max entry of the
/// matrix product `U⁻¹ G U⁻¹`.
pub fn conjugated_max_entry(g: &Array2<Complex64>, u: &[f64]) -> Result<f64> {
    check_dims(g, u)?;
    let d = Array2::from_diag(&Array1::from_iter(u.iter().map(|x| Complex64::new(x.recip(), 0.0))));
    Ok(d.dot(g).dot(&d).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

pub fn decay_reference(alpha: f64, t: f64) -> f64 {
    (1.0 + t * t).powf(-(1.0 + alpha) / 2.0)
}

/// Truncation control for [`decay_curve`]. The sup is taken over the
/// leading `window × window` block, which stays clear of edge reflections
/// once `N` is large enough; `N` doubles until the curve stops moving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayOptions {
    pub window: usize,
    pub n_start: usize,
    pub n_max: usize,
    pub tol: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            window: 32,
            n_start: 256,
            n_max: 4096,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    pub alpha: f64,
    /// Truncation size at which the curve was accepted.
    pub n: usize,
    pub times: Vec<f64>,
    pub measured: Vec<f64>,
    pub reference: Vec<f64>,
    pub max_rel_dev: f64,
    /// Max change between the last two truncation sizes.
    pub last_change: f64,
}

impl DecayCurve {
    pub fn rel_deviation(&self) -> Vec<f64> {
        self.measured.iter().zip(&self.reference).map(|(m, r)| (m - r).abs() / r).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.times
            .iter()
            .zip(&self.measured)
            .zip(&self.reference)
            .zip(self.rel_deviation())
            .map(|(((&t, &m), &r), d)| vec![t, m, r, d])
            .collect()
    }
}

/// Windowed weighted norms at a fixed truncation size.
pub fn windowed_norms(alpha: f64, size: usize, window: usize, times: &[f64]) -> Result<Vec<f64>> {
    let (jac, w) = build_jacobi(alpha, size)?;
    let window = window.min(size);
    let spec = jac.spectrum(window)?;
    let u = &w.sigma[..window];
    times.par_iter().map(|&t| weighted_norm(&spec.block(t), u)).collect()
}

pub fn decay_curve(alpha: f64, times: &[f64], opts: DecayOptions) -> Result<DecayCurve> {
    check_alpha(alpha)?;
    if let Some(&t) = times.iter().find(|t| !t.is_finite()) {
        return Err(invalid("t", format!("must be finite, got {t}")));
    }
    let mut n = opts.n_start.max(2 * opts.window).max(2);
    let mut prev = windowed_norms(alpha, n, opts.window, times)?;
    let mut change = f64::INFINITY;
    while n < opts.n_max {
        n *= 2;
        let next = windowed_norms(alpha, n, opts.window, times)?;
        change = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prev = next;
        if change < opts.tol {
            break;
        }
    }
    if !(change < opts.tol) {
        return Err(WeylError::TruncationNoConvergence { n, change, tol: opts.tol });
    }
    let reference: Vec<f64> = times.iter().map(|&t| decay_reference(alpha, t)).collect();
    let max_rel_dev = prev.iter().zip(&reference).map(|(m, r)| (m - r).abs() / r).fold(0.0, f64::max);
    Ok(DecayCurve {
        alpha,
        n,
        times: times.to_vec(),
        measured: prev,
        reference,
        max_rel_dev,
        last_change: change,
    })
}

/// `steps` equally spaced points on `[0, tmax]`.
pub fn time_grid(tmax: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..steps).map(|k| tmax * k as f64 / (steps - 1) as f64).collect(),
    }
}
