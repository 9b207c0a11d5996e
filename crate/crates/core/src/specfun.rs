//! Special functions: Hermite and Laguerre families, integer-order Bessel
//! functions, the complex Laguerre–Gauss functions `l_{m,n}` and the
//! discrete three-term operators whose eigenvectors they are.
//!
//! Normalized functions are produced by recurring on the normalized values
//! themselves with a running logarithmic shift, so orders in the thousands
//! stay finite.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const RESCALE: f64 = 1e150;

/// Deformation parameter ε > 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EpsParam(f64);

impl EpsParam {
    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_finite() && eps > 0.0 {
            Ok(Self(eps))
        } else {
            Err(invalid("eps", format!("must be finite and > 0, got {eps}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn sqrt(self) -> f64 {
        self.0.sqrt()
    }
}

impl Default for EpsParam {
    fn default() -> Self {
        Self(1.0)
    }
}

impl TryFrom<f64> for EpsParam {
    type Error = crate::WeylError;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<EpsParam> for f64 {
    fn from(e: EpsParam) -> f64 {
        e.0
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `mantissa * exp(shift)` without losing the value when `exp(shift)` alone
/// would under- or overflow.
fn unshift(mantissa: f64, shift: f64) -> f64 {
    if mantissa == 0.0 {
        0.0
    } else if shift.abs() < 700.0 {
        mantissa * shift.exp()
    } else {
        mantissa.signum() * (mantissa.abs().ln() + shift).exp()
    }
}

/// Physicists' Hermite polynomial by upward recurrence. Overflows to
/// infinity for very large `n·x`.
pub fn hermite_poly(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `h_0(x), …, h_nmax(x)` for the ε-scaled Hermite functions.
pub fn hermite_fn_all(nmax: usize, x: f64, eps: EpsParam) -> Vec<f64> {
    let t = x / eps.sqrt();
    let mut shift = -0.25 * eps.get().ln() - 0.25 * PI.ln() - 0.5 * t * t;
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(unshift(cur, shift));
    for k in 0..nmax {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * t * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            shift += RESCALE.ln();
        }
        out.push(unshift(cur, shift));
    }
    out
}

pub fn hermite_fn(n: usize, x: f64, eps: EpsParam) -> f64 {
    hermite_fn_all(n, x, eps)[n]
}

/// Generalized Laguerre polynomial by upward recurrence.
pub fn laguerre_poly(alpha: f64, n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized Laguerre recurrence started from `exp(log0)` at n = 0.
fn laguerre_normalized(alpha: f64, nmax: usize, x: f64, log0: f64) -> Vec<f64> {
    let mut shift = log0;
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(unshift(cur, shift));
    for k in 0..nmax {
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 - x) * cur - (kf * (kf + alpha)).sqrt() * prev)
            / ((kf + 1.0) * (kf + alpha + 1.0)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            shift += RESCALE.ln();
        }
        out.push(unshift(cur, shift));
    }
    out
}

/// `l^{(α)}_0(x), …, l^{(α)}_nmax(x)`.
pub fn laguerre_fn_all(alpha: f64, nmax: usize, x: f64) -> Vec<f64> {
    laguerre_normalized(alpha, nmax, x, -0.5 * x - 0.5 * ln_gamma(alpha + 1.0))
}

pub fn laguerre_fn(alpha: f64, n: usize, x: f64) -> f64 {
    laguerre_fn_all(alpha, n, x)[n]
}

/// Both sides of the even/odd Hermite–Laguerre bridge at order `n`:
/// `ε^{1/4} h_{2n}(√ε x) = (−1)^n l^{(−1/2)}_n(x²)` and
/// `ε^{1/4} h_{2n+1}(√ε x) = (−1)^n x l^{(1/2)}_n(x²)`.
/// Returns `[(even_h, even_l), (odd_h, odd_l)]`.
pub fn half_integer_bridge(n: usize, x: f64, eps: EpsParam) -> [(f64, f64); 2] {
    let h = hermite_fn_all(2 * n + 1, eps.sqrt() * x, eps);
    let scale = eps.get().powf(0.25);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let even = laguerre_fn(-0.5, n, x * x);
    let odd = laguerre_fn(0.5, n, x * x);
    [(scale * h[2 * n], sign * even), (scale * h[2 * n + 1], sign * x * odd)]
}

/// `i^k` for any integer k.
pub fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Real part of `ℓ_{a,n}(ρ)` without the `i^a`:
/// `(ρ/√2)^a l^{(a)}_n(ρ²/2)` for n = 0..=nmax.
pub fn ell_magnitude_all(a: usize, nmax: usize, rho: f64) -> Vec<f64> {
    let x = 0.5 * rho * rho;
    if a > 0 && rho == 0.0 {
        return vec![0.0; nmax + 1];
    }
    let af = a as f64;
    let pre = if a == 0 {
        0.0
    } else {
        af * (rho * FRAC_1_SQRT_2).ln()
    };
    laguerre_normalized(af, nmax, x, pre - 0.5 * x - 0.5 * ln_gamma(af + 1.0))
}

pub fn ell_radial_all(j: i64, nmax: usize, rho: f64) -> Vec<Complex64> {
    let phase = i_pow(j.abs());
    ell_magnitude_all(j.unsigned_abs() as usize, nmax, rho)
        .into_iter()
        .map(|v| phase * v)
        .collect()
}

/// `ℓ_{|j|,n}(ρ) = (iρ/√2)^{|j|} l^{(|j|)}_n(ρ²/2)`.
pub fn ell_radial(j: i64, n: usize, rho: f64) -> Complex64 {
    ell_radial_all(j, n, rho)[n]
}

/// Complex Laguerre–Gauss function `l_{m,n}` at `ζ = zx + i·zy`.
pub fn laguerre_gauss(m: usize, n: usize, zx: f64, zy: f64) -> Complex64 {
    let z = Complex64::new(zx, zy);
    let k = m as i64 - n as i64;
    let radial = ell_radial(k, m.min(n), z.norm());
    radial * Complex64::from_polar(1.0, k as f64 * z.arg())
}

/// All `l_{m,n}(ζ)` for m, n < size.
pub fn laguerre_gauss_table(size: usize, zx: f64, zy: f64) -> Vec<Vec<Complex64>> {
    let z = Complex64::new(zx, zy);
    let (r, phi) = (z.norm(), z.arg());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for k in 0..size {
        let mags = ell_magnitude_all(k, size - 1 - k, r);
        let up = i_pow(k as i64) * Complex64::from_polar(1.0, k as f64 * phi);
        let down = i_pow(k as i64) * Complex64::from_polar(1.0, -(k as f64) * phi);
        for (n, &v) in mags.iter().enumerate() {
            out[n + k][n] = up * v;
            out[n][n + k] = down * v;
        }
    }
    out
}

/// Power series for `J_n(x)`, n ≥ 0.
pub fn bessel_j_series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn bessel_j_miller(n: usize, x: f64) -> f64 {
    let top = (n as f64).max(x.abs());
    let mut start = (1.2 * top) as usize + 40;
    start += start % 2;
    let two_over_x = 2.0 / x;
    let (mut jp, mut j) = (0.0_f64, 1e-300_f64);
    let mut norm = 0.0;
    let mut want = 0.0;
    for k in (1..=start).rev() {
        let jm = k as f64 * two_over_x * j - jp;
        jp = j;
        j = jm;
        if j.abs() > RESCALE {
            j /= RESCALE;
            jp /= RESCALE;
            norm /= RESCALE;
            want /= RESCALE;
        }
        // j now holds J_{k-1}
        if k - 1 == n {
            want = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
    }
    norm += j;
    want / norm
}

/// Integer-order Bessel function of the first kind.
pub fn bessel_j(j: i64, x: f64) -> f64 {
    let n = j.unsigned_abs() as usize;
    let mut sign = if j < 0 && n % 2 == 1 { -1.0 } else { 1.0 };
    if x < 0.0 && n % 2 == 1 {
        sign = -sign;
    }
    let ax = x.abs();
    if ax == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let v = if ax <= 1.0 {
        bessel_j_series(n, ax)
    } else {
        bessel_j_miller(n, ax)
    };
    sign * v
}

/// The four discrete three-term operators acting on sequences indexed by n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JacobiKind {
    /// `v_{n+1}/2 + n v_{n-1}`; eigenvectors `H_n(x)` with eigenvalue x.
    A,
    /// Normalized form of `A`; eigenvectors `h_n(x)` with eigenvalue `x/√ε`.
    B,
    /// Laguerre-polynomial recurrence.
    C(f64),
    /// Normalized (symmetric) Laguerre-function recurrence.
    D(f64),
}

impl JacobiKind {
    pub fn validate(self) -> Result<Self> {
        match self {
            JacobiKind::C(a) | JacobiKind::D(a) if !(a > -1.0) || !a.is_finite() => {
                Err(invalid("alpha", format!("must be > -1, got {a}")))
            }
            k => Ok(k),
        }
    }

    /// Row `n` as (coefficient of v_{n-1}, of v_n, of v_{n+1}).
    pub fn row(self, n: usize) -> (f64, f64, f64) {
        let nf = n as f64;
        match self {
            JacobiKind::A => (nf, 0.0, 0.5),
            JacobiKind::B => ((0.5 * nf).sqrt(), 0.0, (0.5 * (nf + 1.0)).sqrt()),
            JacobiKind::C(a) => (-(nf + a), 2.0 * nf + a + 1.0, -(nf + 1.0)),
            JacobiKind::D(a) => (
                -(nf * (nf + a)).sqrt(),
                2.0 * nf + a + 1.0,
                -((nf + 1.0) * (nf + a + 1.0)).sqrt(),
            ),
        }
    }

    pub fn is_symmetric(self) -> bool {
        match self {
            JacobiKind::A => false,
            JacobiKind::B | JacobiKind::D(_) => true,
            JacobiKind::C(a) => a == 0.0,
        }
    }

    /// Diagonal and off-diagonal of the truncated matrix; only for the
    /// symmetric kinds.
    pub fn symmetric_tridiagonal(self, size: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let kind = self.validate()?;
        if !kind.is_symmetric() {
            return Err(invalid(
                "kind",
                format!("{kind:?} is not a symmetric operator"),
            ));
        }
        let diag = (0..size).map(|n| kind.row(n).1).collect();
        let off = (0..size.saturating_sub(1)).map(|n| kind.row(n).2).collect();
        Ok((diag, off))
    }
}

/// Applies the operator to a finite sequence; the out-of-range `v_N` term
/// is dropped.
pub fn jacobi_apply<T>(kind: JacobiKind, v: &[T]) -> Result<Vec<T>>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let kind = kind.validate()?;
    let len = v.len();
    Ok((0..len)
        .map(|n| {
            let (lo, mid, hi) = kind.row(n);
            let mut acc = v[n] * mid;
            if n > 0 {
                acc = acc + v[n - 1] * lo;
            }
            if n + 1 < len {
                acc = acc + v[n + 1] * hi;
            }
            acc
        })
        .collect())
}
