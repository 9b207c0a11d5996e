//! Gauss rules and the polar plane scheme used by every integral oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::linalg::SymTridiagonal;
use crate::specfun::ln_gamma;

const RESCALE: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleKind {
    /// Weight `e^{-x²}` on the real line.
    Hermite,
    /// Weight `x^α e^{-x}` on the half line.
    Laguerre { alpha: f64 },
}

/// Gauss rule. `scaled_weights[i] = weights[i] / weight_fn(nodes[i])`, which
/// stays representable where the plain weights underflow.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub scaled_weights: Vec<f64>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ weight·g` by the rule.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// `ln Σ_{k<n} p_k(x)²` for an orthonormal family given by its first value
/// and a three-term step, with rescaling against overflow.
fn ln_christoffel_sum(n: usize, p0: f64, step: impl Fn(usize, f64, f64) -> f64) -> f64 {
    let (mut prev, mut cur) = (0.0, p0);
    let mut shift = 0.0;
    let mut sum = cur * cur;
    for k in 0..n - 1 {
        let next = step(k, cur, prev);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            sum /= RESCALE * RESCALE;
            shift += 2.0 * RESCALE.ln();
        }
        sum += cur * cur;
    }
    sum.ln() + shift
}

/// Golub–Welsch nodes with Christoffel-function weights.
pub fn gauss_rule(kind: RuleKind, n: usize) -> Result<Quadrature> {
    if n == 0 {
        return Err(invalid("n", "quadrature needs at least one node"));
    }
    let (diag, off): (Vec<f64>, Vec<f64>) = match kind {
        RuleKind::Hermite => (vec![0.0; n], (1..n).map(|k| (0.5 * k as f64).sqrt()).collect()),
        RuleKind::Laguerre { alpha } => {
            if !(alpha > -1.0) || !alpha.is_finite() {
                return Err(invalid("alpha", format!("must be > -1, got {alpha}")));
            }
            (
                (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect(),
                (1..n).map(|k| (k as f64 * (k as f64 + alpha)).sqrt()).collect(),
            )
        }
    };
    let mut nodes = SymTridiagonal::new(diag, off)?.eigenvalues()?;
    if kind == RuleKind::Hermite {
        // exact symmetry of the rule
        for i in 0..n / 2 {
            let v = 0.5 * (nodes[n - 1 - i] - nodes[i]);
            nodes[i] = -v;
            nodes[n - 1 - i] = v;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
    }
    let mut weights = Vec::with_capacity(n);
    let mut scaled = Vec::with_capacity(n);
    for &x in &nodes {
        let (ln_sum, ln_wfn) = match kind {
            RuleKind::Hermite => (
                ln_christoffel_sum(n, PI.powf(-0.25), |k, cur, prev| {
                    let kf = k as f64;
                    (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev
                }),
                -x * x,
            ),
            RuleKind::Laguerre { alpha } => (
                ln_christoffel_sum(n, (-0.5 * ln_gamma(alpha + 1.0)).exp(), |k, cur, prev| {
                    let kf = k as f64;
                    ((2.0 * kf + alpha + 1.0 - x) * cur - (kf * (kf + alpha)).sqrt() * prev)
                        / ((kf + 1.0) * (kf + alpha + 1.0)).sqrt()
                }),
                alpha * x.ln() - x,
            ),
        };
        weights.push((-ln_sum).exp());
        scaled.push((-ln_sum - ln_wfn).exp());
    }
    Ok(Quadrature {
        kind,
        nodes,
        weights,
        scaled_weights: scaled,
    })
}

macro_rules! point2 {
    ($name:ident, $a:ident, $b:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name {
            pub $a: f64,
            pub $b: f64,
        }

        impl $name {
            pub fn new($a: f64, $b: f64) -> Self {
                Self { $a, $b }
            }

            pub fn from_polar(r: f64, angle: f64) -> Self {
                Self::new(r * angle.cos(), r * angle.sin())
            }

            pub fn radius(&self) -> f64 {
                self.$a.hypot(self.$b)
            }

            /// Angle in `[0, 2π)`.
            pub fn angle(&self) -> f64 {
                self.$b.atan2(self.$a).rem_euclid(2.0 * PI)
            }
        }
    };
}

point2!(PlanePoint, x, y);
point2!(FreqPoint, xi_x, xi_y);

/// Product rule on the plane: Gauss–Laguerre in `u = scale·ρ²` times a
/// uniform angular grid.
#[derive(Debug, Clone)]
pub struct PolarScheme {
    pub radial: Quadrature,
    pub angular_count: usize,
    pub scale: f64,
    rho: Vec<f64>,
    radial_weight: Vec<f64>,
}

impl PolarScheme {
    pub fn new(radial_count: usize, angular_count: usize, scale: f64) -> Result<Self> {
        if angular_count == 0 {
            return Err(invalid("angular_count", "must be positive"));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(invalid("scale", format!("must be finite and > 0, got {scale}")));
        }
        let radial = gauss_rule(RuleKind::Laguerre { alpha: 0.0 }, radial_count)?;
        let rho = radial.nodes.iter().map(|u| (u / scale).sqrt()).collect();
        let radial_weight = radial.scaled_weights.iter().map(|w| w / (2.0 * scale)).collect();
        Ok(Self {
            radial,
            angular_count,
            scale,
            rho,
            radial_weight,
        })
    }

    /// 128 × 256 with the radial scale matched to products of two basis
    /// functions at this ε.
    pub fn default_for(eps: f64) -> Self {
        Self::new(128, 256, 2.0 / eps).expect("default scheme parameters are valid")
    }

    /// Radial nodes ρ_k.
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// Weights for `∫₀^∞ g(ρ) ρ dρ`.
    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weight
    }

    pub fn theta(&self, t: usize) -> f64 {
        2.0 * PI * t as f64 / self.angular_count as f64
    }

    pub fn angular_weight(&self) -> f64 {
        2.0 * PI / self.angular_count as f64
    }

    /// `∫ g(ρ, θ) dx dy`.
    pub fn integrate<G>(&self, g: G) -> Complex64
    where
        G: Fn(f64, f64) -> Complex64 + Sync,
    {
        let dtheta = self.angular_weight();
        self.rho
            .par_iter()
            .zip(self.radial_weight.par_iter())
            .map(|(&r, &w)| {
                let ring: Complex64 = (0..self.angular_count).map(|t| g(r, self.theta(t))).sum();
                ring * (w * dtheta)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum()
    }
}

/// `⟨f, g⟩ = ∫ conj(f)·g` over the plane.
pub fn plane_inner_product<F, G>(f: F, g: G, scheme: &PolarScheme) -> Complex64
where
    F: Fn(f64, f64) -> Complex64 + Sync,
    G: Fn(f64, f64) -> Complex64 + Sync,
{
    scheme.integrate(|r, th| {
        let (x, y) = (r * th.cos(), r * th.sin());
        f(x, y).conj() * g(x, y)
    })
}

/// `(2π)^{-1} ∫ e^{-i(ξx·x + ξy·y)} f(x, y) dx dy`.
pub fn fourier_point<F>(f: F, xi: FreqPoint, scheme: &PolarScheme) -> Complex64
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    scheme.integrate(|r, th| {
        let (x, y) = (r * th.cos(), r * th.sin());
        f(x, y) * Complex64::from_polar(1.0, -(xi.xi_x * x + xi.xi_y * y))
    }) / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gauss(a: f64) -> impl Fn(f64, f64) -> Complex64 + Sync {
        move |x: f64, y: f64| Complex64::new((-0.5 * a * (x * x + y * y)).exp(), 0.0)
    }

    #[test]
    fn one_point_rules() {
        let h = gauss_rule(RuleKind::Hermite, 1).unwrap();
        assert_eq!(h.nodes, vec![0.0]);
        assert_relative_eq!(h.weights[0], PI.sqrt(), epsilon = 1e-15);
        let l = gauss_rule(RuleKind::Laguerre { alpha: 0.0 }, 1).unwrap();
        assert_relative_eq!(l.nodes[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(l.weights[0], 1.0, epsilon = 1e-15);
        assert!(gauss_rule(RuleKind::Laguerre { alpha: -1.0 }, 3).is_err());
        assert!(gauss_rule(RuleKind::Hermite, 0).is_err());
    }

    #[test]
    fn hermite_rule_moments() {
        for &n in &[5usize, 20, 64, 200] {
            let q = gauss_rule(RuleKind::Hermite, n).unwrap();
            assert!(q.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(q.weights.iter().all(|&w| w > 0.0));
            let s: f64 = q.weights.iter().sum();
            assert!((s - PI.sqrt()).abs() < 1e-13, "n={n}: {}", s - PI.sqrt());
            // ∫ x^{2k} e^{-x²} = Γ(k + 1/2)
            for k in 1..n.min(40) {
                let exact = ln_gamma(k as f64 + 0.5).exp();
                let got = q.integrate(|x| x.powi(2 * k as i32));
                assert!(((got - exact) / exact).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn laguerre_rule_moments() {
        for &alpha in &[0.0, 1.0, 2.5, -0.5] {
            let q = gauss_rule(RuleKind::Laguerre { alpha }, 30).unwrap();
            for k in 0..30 {
                let exact = (ln_gamma(k as f64 + alpha + 1.0)).exp();
                let got = q.integrate(|x| x.powi(k));
                assert!(((got - exact) / exact).abs() < 1e-11, "alpha={alpha} k={k}");
            }
        }
    }

    #[test]
    fn scaled_weights_large_rule() {
        let q = gauss_rule(RuleKind::Laguerre { alpha: 0.0 }, 300).unwrap();
        assert!(q.scaled_weights.iter().all(|w| w.is_finite() && *w > 0.0));
        // ∫ e^{-x/2} = 2 through the scaled weights
        let s: f64 = q.nodes.iter().zip(&q.scaled_weights).map(|(x, w)| w * (-0.5 * x).exp()).sum();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn plane_gaussian_norms() {
        let s = PolarScheme::new(64, 32, 1.0).unwrap();
        let v = plane_inner_product(gauss(1.0), gauss(1.0), &s);
        assert_relative_eq!(v.re, PI, epsilon = 1e-13);
        let s2 = PolarScheme::default_for(1.0);
        let v2 = plane_inner_product(gauss(1.0), gauss(1.0), &s2);
        assert_relative_eq!(v2.re, PI, epsilon = 1e-12);
    }

    #[test]
    fn conjugate_symmetry() {
        let s = PolarScheme::new(48, 64, 1.0).unwrap();
        let f = |x: f64, y: f64| Complex64::new(x - 0.3, y * y) * (-(x * x + y * y) / 2.0).exp();
        let g = |x: f64, y: f64| Complex64::new(0.2, x * y + 1.0) * (-(x * x + y * y) / 2.0).exp();
        let a = plane_inner_product(f, g, &s);
        let b = plane_inner_product(g, f, &s);
        assert!((a - b.conj()).norm() < 1e-13);
    }

    #[test]
    fn fourier_of_gaussians() {
        let s = PolarScheme::new(96, 128, 0.5).unwrap();
        for &xi in &[FreqPoint::new(0.0, 0.0), FreqPoint::new(1.3, -0.4), FreqPoint::new(-2.0, 2.5)] {
            let got = fourier_point(gauss(1.0), xi, &s);
            let r2 = xi.xi_x * xi.xi_x + xi.xi_y * xi.xi_y;
            assert!((got - (-r2 / 2.0).exp()).norm() < 1e-12);
        }
        for &a in &[0.5, 2.0] {
            let s = PolarScheme::new(96, 128, a / 2.0).unwrap();
            let xi = FreqPoint::new(0.7, 1.1);
            let r2 = 0.7f64 * 0.7 + 1.1 * 1.1;
            let got = fourier_point(gauss(a), xi, &s);
            assert!((got - (-r2 / (2.0 * a)).exp() / a).norm() < 1e-12, "a={a}");
        }
    }

    #[test]
    fn fourier_twice_reflects() {
        // the inner rule has to resolve e^{-iξ·x} out to the largest outer
        // radius, where the outer weights are large
        let inner = PolarScheme::new(96, 128, 0.5).unwrap();
        let outer = PolarScheme::new(24, 48, 0.5).unwrap();
        let f = |x: f64, y: f64| Complex64::new(x + 0.5 * y * y, 0.3 * x * y) * (-(x * x + y * y) / 2.0).exp();
        let ff = |a: f64, b: f64| fourier_point(f, FreqPoint::new(a, b), &inner);
        for &(x, y) in &[(0.3, -0.8), (1.2, 0.4)] {
            let v = fourier_point(ff, FreqPoint::new(x, y), &outer);
            assert!((v - f(-x, -y)).norm() < 1e-8, "{v} {}", f(-x, -y));
        }
    }

    #[test]
    fn fourier_linear() {
        let s = PolarScheme::new(48, 64, 0.5).unwrap();
        let xi = FreqPoint::new(0.9, -0.2);
        let (a, b) = (Complex64::new(0.3, 1.0), Complex64::new(-2.0, 0.5));
        let f = |x: f64, y: f64| Complex64::new(x, 0.0) * (-(x * x + y * y) / 2.0).exp();
        let g = gauss(1.0);
        let lhs = fourier_point(|x, y| a * f(x, y) + b * g(x, y), xi, &s);
        let rhs = a * fourier_point(f, xi, &s) + b * fourier_point(&g, xi, &s);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn polar_accessors() {
        let p = PlanePoint::new(-1.0, -1.0);
        assert_relative_eq!(p.radius(), 2f64.sqrt());
        assert!(p.angle() >= 0.0 && p.angle() < 2.0 * PI);
        assert_relative_eq!(p.angle(), 1.25 * PI, epsilon = 1e-15);
    }
}
