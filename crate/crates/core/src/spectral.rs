//! Generalized eigenvectors of the Laplacian on both sides of the transform
//! and the eigen-relation of the rotation superoperator.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::ncspace::{apply_superop, DiagonalIndex, OperatorMatrix, SuperOpKind};
use crate::phase_space::PhaseFunction;
use crate::quadrature::PolarScheme;
use crate::specfun::{bessel_j, ell_radial_all, i_pow, EpsParam};
use crate::weyl::weyl_forward;

/// Spectral parameter `λ ≥ 0` and angular index `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub lambda: f64,
    pub j: i64,
}

impl SpectralPoint {
    pub fn new(lambda: f64, j: i64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda", format!("must be finite and >= 0, got {lambda}")));
        }
        Ok(Self { lambda, j })
    }
}

/// `ω_{λ,j}(ρ, θ) = i^{-|j|} J_{|j|}(√λ ρ) e^{ijθ}`.
pub fn omega_eval(pt: SpectralPoint, rho: f64, theta: f64) -> Complex64 {
    i_pow(-pt.j.abs()) * bessel_j(pt.j.abs(), pt.lambda.sqrt() * rho) * Complex64::from_polar(1.0, pt.j as f64 * theta)
}

pub fn omega_function(pt: SpectralPoint) -> PhaseFunction {
    PhaseFunction::new(move |x, y| omega_eval(pt, x.hypot(y), y.atan2(x))).with_band_limit(pt.j.unsigned_abs() as usize)
}

/// Coefficients of the operator-side eigenvector on diagonal `−j`:
/// `c[n] = (−1)^j ℓ_{|j|,n}(√(ελ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaCoeffs {
    pub pt: SpectralPoint,
    pub eps: EpsParam,
    pub size: usize,
    pub c: Vec<Complex64>,
}

impl OmegaCoeffs {
    pub fn to_operator(&self) -> OperatorMatrix {
        let idx = DiagonalIndex::new(self.size);
        let mut out = OperatorMatrix::zeros(self.size, self.eps);
        for (r, &v) in self.c.iter().enumerate() {
            let (m, n) = idx.to_mn(-self.pt.j, r).expect("radial label in range");
            out.a[[m, n]] = v;
        }
        out
    }
}

pub fn omega_coeffs(pt: SpectralPoint, size: usize, eps: EpsParam) -> Result<OmegaCoeffs> {
    let k = pt.j.unsigned_abs() as usize;
    if k >= size {
        return Err(invalid("j", format!("|j| = {k} must be < N = {size}")));
    }
    let sign = if pt.j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let c = ell_radial_all(pt.j, size - k - 1, (eps.get() * pt.lambda).sqrt())
        .into_iter()
        .map(|v| v * sign)
        .collect();
    Ok(OmegaCoeffs { pt, eps, size, c })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenKind {
    Laplacian,
    Rotation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub kind: EigenKind,
    pub pt: SpectralPoint,
    pub eps: f64,
    pub size: usize,
    /// Least-squares eigenvalue on the interior block.
    pub fitted: Complex64,
    /// Value predicted by the first-principles derivation.
    pub expected: f64,
    /// The other printed candidate (`ελ` for the Laplacian, `j` for the
    /// rotation).
    pub alternative: f64,
    /// Max interior entry of `op(Ω) − expected·Ω`.
    pub residual: f64,
    /// Max interior entry of `op(Ω) − fitted·Ω`.
    pub fit_residual: f64,
}

impl std::fmt::Display for EigenReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (name, alt) = match self.kind {
            EigenKind::Laplacian => ("laplacian", "eps*lambda"),
            EigenKind::Rotation => ("rotation", "j"),
        };
        write!(
            f,
            "{name} lambda={} j={} eps={} N={}: fitted={:.12} expected={:.12} {alt}={:.12} residual={:.3e}",
            self.pt.lambda, self.pt.j, self.eps, self.size, self.fitted.re, self.expected, self.alternative, self.residual
        )
    }
}

pub fn eigencheck(kind: EigenKind, pt: SpectralPoint, size: usize, eps: EpsParam) -> Result<EigenReport> {
    let om = omega_coeffs(pt, size, eps)?;
    let omega = om.to_operator();
    let image = match kind {
        EigenKind::Laplacian => apply_superop(SuperOpKind::L, &omega)?,
        EigenKind::Rotation => apply_superop(SuperOpKind::J, &omega)?,
    };
    let (expected, alternative) = match kind {
        EigenKind::Laplacian => (pt.lambda, eps.get() * pt.lambda),
        EigenKind::Rotation => (eps.get() * pt.j as f64, pt.j as f64),
    };
    let idx = DiagonalIndex::new(size);
    let interior = om.c.len().saturating_sub(2);
    let pairs: Vec<(Complex64, Complex64)> = (0..interior)
        .map(|r| {
            let (m, n) = idx.to_mn(-pt.j, r).expect("interior label");
            (omega.get(m, n), image.get(m, n))
        })
        .collect();
    let num: Complex64 = pairs.iter().map(|(w, v)| w.conj() * v).sum();
    let den: f64 = pairs.iter().map(|(w, _)| w.norm_sqr()).sum();
    let fitted = if den > 0.0 { num / den } else { Complex64::new(0.0, 0.0) };
    let worst = |mu: Complex64| pairs.iter().map(|(w, v)| (v - mu * w).norm()).fold(0.0, f64::max);
    Ok(EigenReport {
        kind,
        pt,
        eps: eps.get(),
        size,
        fitted,
        expected,
        alternative,
        residual: worst(Complex64::new(expected, 0.0)),
        fit_residual: worst(fitted),
    })
}

/// Residual of the eigen-relation for each truncation size.
pub fn residual_table(kind: EigenKind, pt: SpectralPoint, eps: EpsParam, sizes: &[usize]) -> Result<Vec<(usize, f64)>> {
    sizes
        .par_iter()
        .map(|&n| Ok((n, eigencheck(kind, pt, n, eps)?.residual)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutativeReport {
    /// Max residual of the radial Bessel equation.
    pub bessel: f64,
    /// Max residual of `−4∂_ζ∂_ζ̄ ω − λω`.
    pub laplacian: f64,
}

/// Finite-difference residuals of the plane eigen-equation at the given radii
/// (angles 0.3 and 2.1), step `h`.
pub fn commutative_eigencheck(pt: SpectralPoint, radii: &[f64], h: f64) -> CommutativeReport {
    let k = pt.j.abs();
    let sl = pt.lambda.sqrt();
    let g = |r: f64| bessel_j(k, sl * r);
    let j2 = (k * k) as f64;
    let bessel = radii
        .iter()
        .map(|&r| {
            let d2 = (g(r + h) - 2.0 * g(r) + g(r - h)) / (h * h);
            let d1 = (g(r + h) - g(r - h)) / (2.0 * h);
            (-d2 - d1 / r + j2 * g(r) / (r * r) - pt.lambda * g(r)).abs()
        })
        .fold(0.0, f64::max);

    let w = |x: f64, y: f64| omega_eval(pt, x.hypot(y), y.atan2(x));
    let i = Complex64::new(0.0, 1.0);
    let dbar = |x: f64, y: f64| ((w(x + h, y) - w(x - h, y)) + i * (w(x, y + h) - w(x, y - h))) / (4.0 * h);
    let dz = |x: f64, y: f64| ((dbar(x + h, y) - dbar(x - h, y)) - i * (dbar(x, y + h) - dbar(x, y - h))) / (4.0 * h);
    let laplacian = radii
        .iter()
        .flat_map(|&r| [0.3f64, 2.1].map(|th| (r * th.cos(), r * th.sin())))
        .map(|(x, y)| (-4.0 * dz(x, y) - pt.lambda * w(x, y)).norm())
        .fold(0.0, f64::max);
    CommutativeReport { bessel, laplacian }
}

/// `x ∫₀^T t J₀(xt) [∫ φ(y) J₀(yt) dy] dt` for a Gaussian bump `φ` centred
/// at 1 with the given width; approaches `φ(x)` as `T → ∞`.
pub fn bessel_closure_smeared(x: f64, width: f64, t_max: f64) -> f64 {
    let phi = |y: f64| (-(y - 1.0) * (y - 1.0) / (2.0 * width * width)).exp();
    let (lo, hi) = ((1.0 - 12.0 * width).max(0.0), 1.0 + 12.0 * width);
    let ny = 800;
    let hy = (hi - lo) / ny as f64;
    let ys: Vec<(f64, f64)> = (0..=ny)
        .map(|k| {
            let y = lo + k as f64 * hy;
            let w = if k == 0 || k == ny { 0.5 * hy } else { hy };
            (y, w * phi(y))
        })
        .filter(|&(_, w)| w > 1e-300)
        .collect();
    let nt = ((t_max / 0.02).ceil() as usize).next_multiple_of(2);
    let ht = t_max / nt as f64;
    let total: f64 = (0..=nt)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 * ht;
            let simpson = if k == 0 || k == nt {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let big_phi: f64 = ys.iter().map(|&(y, w)| w * bessel_j(0, y * t)).sum();
            simpson * t * bessel_j(0, x * t) * big_phi
        })
        .sum();
    x * total * ht / 3.0
}

/// Correlation between the diagonal-(−j) coefficients of the forward
/// transform of `ω_{λ,j}·e^{−ρ²/2σ²}` and [`omega_coeffs`], together with
/// the least-squares scale between them.
pub fn omega_surrogate_correlation(pt: SpectralPoint, sigma: f64, size: usize, eps: EpsParam) -> Result<(f64, Complex64)> {
    let om = omega_coeffs(pt, size, eps)?;
    let damp = PhaseFunction::gaussian(1.0 / (sigma * sigma));
    let f = omega_function(pt).times(&damp);
    let scheme = PolarScheme::new(160, 4 * size, 1.0 / eps.get() + 0.5 / (sigma * sigma))?;
    let fwd = weyl_forward(&f, size, eps, &scheme)?;
    let idx = DiagonalIndex::new(size);
    let meas: Vec<Complex64> = (0..om.c.len())
        .map(|r| {
            let (m, n) = idx.to_mn(-pt.j, r).expect("label in range");
            fwd.get(m, n)
        })
        .collect();
    let dot: Complex64 = om.c.iter().zip(&meas).map(|(a, b)| a.conj() * b).sum();
    let na: f64 = om.c.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = meas.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
    Ok((dot.norm() / (na * nb), dot / (na * na)))
}

/// Peak magnitude of each angular mode of `ω` up to `band`.
pub fn angular_support(pt: SpectralPoint, band: usize, scheme: &PolarScheme) -> Result<Vec<(i64, f64)>> {
    let modes = crate::phase_space::angular_decompose(&omega_function(pt), band, scheme)?;
    Ok((-(band as i64)..=band as i64)
        .map(|j| (j, modes.mode(j).unwrap().iter().map(|v| v.norm()).fold(0.0, f64::max)))
        .collect())
}
