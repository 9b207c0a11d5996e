//! The transform: forward through the `e_{m,n}` expansion, an independent
//! frequency-domain oracle, inverse, rank-one inverse, the Plancherel
//! constant and the derivative/multiplication correspondences.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::ncspace::{apply_superop, weyl_element, weyl_element_table, OperatorMatrix, SuperOpKind};
use crate::phase_space::{analyze, synthesize, CoeffField, PhaseFunction};
use crate::quadrature::{fourier_point, FreqPoint, PolarScheme};
use crate::specfun::EpsParam;

pub fn weyl_forward(f: &PhaseFunction, size: usize, eps: EpsParam, scheme: &PolarScheme) -> Result<OperatorMatrix> {
    Ok(analyze(f, size, eps, scheme)?.into_operator())
}

/// Two nested polar schemes: `inner` computes `𝒻f(ξ)`, `outer` integrates
/// over ξ.
#[derive(Debug, Clone)]
pub struct FrequencyScheme {
    pub inner: PolarScheme,
    pub outer: PolarScheme,
}

impl FrequencyScheme {
    /// Tuned for functions decaying like `e^{-aρ²/2}`: the inner radial
    /// scale matches `f`, the outer one matches `𝒻f · l_{m,n}`.
    pub fn for_gaussian_decay(a: f64, eps: EpsParam) -> Result<Self> {
        Ok(Self {
            inner: PolarScheme::new(64, 128, 0.5 * a)?,
            outer: PolarScheme::new(32, 64, 0.5 / a + 0.25 * eps.get())?,
        })
    }
}

/// `(2π)^{-1} ∫ 𝒻f(ξ) ⟨h_m, W_ξ h_n⟩ dξ` for all m, n < size, read literally.
pub fn frequency_integral(f: &PhaseFunction, size: usize, eps: EpsParam, scheme: &FrequencyScheme) -> OperatorMatrix {
    let outer = &scheme.outer;
    let dtheta = outer.angular_weight();
    let points: Vec<(f64, f64, f64)> = outer
        .rho()
        .iter()
        .zip(outer.radial_weights())
        .flat_map(|(&r, &w)| (0..outer.angular_count).map(move |t| (r, outer.theta(t), w * dtheta)))
        .collect();
    let partial: Vec<Vec<Vec<Complex64>>> = points
        .par_iter()
        .map(|&(r, th, w)| {
            let xi = FreqPoint::from_polar(r, th);
            let ff = fourier_point(f.as_fn(), xi, &scheme.inner) * w;
            let table = weyl_element_table(size, xi.xi_x, xi.xi_y, eps);
            table.into_iter().map(|row| row.into_iter().map(|v| v * ff).collect()).collect()
        })
        .collect();
    let mut out = OperatorMatrix::zeros(size, eps);
    for t in partial {
        for m in 0..size {
            for n in 0..size {
                out.a[[m, n]] += t[m][n];
            }
        }
    }
    out.scale(Complex64::new(1.0 / (2.0 * PI), 0.0))
}

/// Frequency-domain forward transform in the coefficient normalization used
/// by [`weyl_forward`]: the literal integral times ε.
pub fn weyl_forward_oracle_matrix(f: &PhaseFunction, size: usize, eps: EpsParam, scheme: &FrequencyScheme) -> OperatorMatrix {
    frequency_integral(f, size, eps, scheme).scale(Complex64::new(eps.get(), 0.0))
}

pub fn weyl_forward_oracle(f: &PhaseFunction, m: usize, n: usize, eps: EpsParam, scheme: &FrequencyScheme) -> Complex64 {
    weyl_forward_oracle_matrix(f, m.max(n) + 1, eps, scheme).get(m, n)
}

/// `(x, y) ↦ Σ A[m][n] e_{m,n}(x, y)`.
pub fn weyl_inverse(a: &OperatorMatrix) -> PhaseFunction {
    let field = CoeffField::from_operator(a.clone());
    PhaseFunction::new(move |x, y| synthesize(&field, x, y))
}

/// Inverse of the rank-one operator `ψ ⊗ φ*` evaluated through Weyl-operator
/// matrix elements with the reflected `ψ̂(x) = ψ(−x)`.
pub fn inverse_rank1(phi: &[Complex64], psi: &[Complex64], x: f64, y: f64, eps: EpsParam) -> Complex64 {
    let e = eps.get();
    let (xi_x, xi_y) = (2.0 * y / e, -2.0 * x / e);
    let mut sum = Complex64::new(0.0, 0.0);
    for (m, p) in phi.iter().enumerate() {
        for (n, q) in psi.iter().enumerate() {
            // h_n(−x) = (−1)^n h_n(x)
            let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
            sum += p.conj() * q * parity * weyl_element(m, n, xi_x, xi_y, eps);
        }
    }
    sum * (2.0 / e)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelReport {
    /// `⟨f, g⟩` by plane quadrature.
    pub plane: Complex64,
    /// `Σ conj(F[m][n]) G[m][n]`.
    pub trace: Complex64,
    /// `plane / trace`, or `None` when the trace pairing is at noise level.
    pub ratio: Option<Complex64>,
    pub expected: f64,
    pub deviation: Option<f64>,
}

pub fn plancherel_ratio(
    f: &PhaseFunction,
    g: &PhaseFunction,
    size: usize,
    eps: EpsParam,
    scheme: &PolarScheme,
) -> Result<PlancherelReport> {
    let plane = crate::quadrature::plane_inner_product(f.as_fn(), g.as_fn(), scheme);
    let ff = weyl_forward(f, size, eps, scheme)?;
    let gg = weyl_forward(g, size, eps, scheme)?;
    let trace = ff.trace_pairing(&gg);
    let expected = 2.0 * PI / eps.get();
    // a pairing at quadrature-noise level carries no ratio
    let ratio = (trace.norm() > 1e-10 * ff.frobenius() * gg.frobenius()).then(|| plane / trace);
    Ok(PlancherelReport {
        plane,
        trace,
        ratio,
        expected,
        deviation: ratio.map(|r| (r - expected).norm()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correspondence {
    /// `−iε∂_x` ↔ `P_X`
    Px,
    /// `−iε∂_y` ↔ `P_Y`
    Py,
    /// `x·` ↔ `M_X`
    Mx,
    /// `y·` ↔ `M_Y`
    My,
}

const DIFF_STEP: f64 = 1e-4;

/// The commutative-side operator applied to `f`, with central differences
/// for the derivatives.
pub fn apply_commutative(kind: Correspondence, f: &PhaseFunction, eps: EpsParam) -> PhaseFunction {
    let g = f.clone();
    let e = eps.get();
    let h = DIFF_STEP;
    let minus_i_eps = Complex64::new(0.0, -e);
    match kind {
        Correspondence::Mx => PhaseFunction::new(move |x, y| g.eval(x, y) * x),
        Correspondence::My => PhaseFunction::new(move |x, y| g.eval(x, y) * y),
        Correspondence::Px => PhaseFunction::new(move |x, y| minus_i_eps * (g.eval(x + h, y) - g.eval(x - h, y)) / (2.0 * h)),
        Correspondence::Py => PhaseFunction::new(move |x, y| minus_i_eps * (g.eval(x, y + h) - g.eval(x, y - h)) / (2.0 * h)),
    }
}

/// Max difference between `𝒲(op f)` and `superop(𝒲f)` on the block
/// m, n < N − 1. `image` overrides the commutative side when an analytic
/// expression is available.
pub fn correspondence_residual(
    kind: Correspondence,
    f: &PhaseFunction,
    image: Option<&PhaseFunction>,
    size: usize,
    eps: EpsParam,
    scheme: &PolarScheme,
) -> Result<f64> {
    let lhs_fn = match image {
        Some(g) => g.clone(),
        None => apply_commutative(kind, f, eps),
    };
    let lhs = weyl_forward(&lhs_fn, size, eps, scheme)?;
    let sk = match kind {
        Correspondence::Px => SuperOpKind::PX,
        Correspondence::Py => SuperOpKind::PY,
        Correspondence::Mx => SuperOpKind::MX,
        Correspondence::My => SuperOpKind::MY,
    };
    let rhs = apply_superop(sk, &weyl_forward(f, size, eps, scheme)?)?;
    Ok(lhs.max_diff_block(&rhs, size - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::e_basis_eval;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eps(v: f64) -> EpsParam {
        EpsParam::new(v).unwrap()
    }

    #[test]
    fn forward_basis_and_linearity() {
        let e = eps(1.0);
        let s = PolarScheme::default_for(1.0);
        let f = weyl_forward(&PhaseFunction::e_basis(0, 0, e), 6, e, &s).unwrap();
        assert!(f.max_diff(&OperatorMatrix::unit(6, 0, 0, e)) < 1e-12);
        let (a, b) = (Complex64::new(0.3, -2.0), Complex64::new(1.5, 0.25));
        let g = PhaseFunction::e_basis(2, 1, e).scaled(a).plus(&PhaseFunction::e_basis(0, 3, e).scaled(b));
        let m = weyl_forward(&g, 6, e, &s).unwrap();
        let mut expect = OperatorMatrix::zeros(6, e);
        expect.a[[2, 1]] = a;
        expect.a[[0, 3]] = b;
        assert!(m.max_diff(&expect) < 1e-12);
    }

    #[test]
    fn oracle_literal_integral_carries_inverse_eps() {
        for &ev in &[0.5, 2.0] {
            let e = eps(ev);
            let f = PhaseFunction::e_basis(0, 0, e);
            let sch = FrequencyScheme::for_gaussian_decay(2.0 / ev, e).unwrap();
            let lit = frequency_integral(&f, 2, e, &sch);
            assert_relative_eq!(lit.get(0, 0).re, 1.0 / ev, max_relative = 1e-9);
            let o = weyl_forward_oracle(&f, 0, 0, e, &sch);
            assert!((o - 1.0).norm() < 1e-9);
        }
        let zero = weyl_forward_oracle(&PhaseFunction::zero(), 1, 0, eps(1.0), &FrequencyScheme::for_gaussian_decay(1.0, eps(1.0)).unwrap());
        assert_eq!(zero, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn forward_matches_oracle_for_gaussian() {
        let e = eps(1.0);
        let f = PhaseFunction::gaussian(1.0);
        let fwd = weyl_forward(&f, 9, e, &PolarScheme::default_for(1.0)).unwrap();
        let orc = weyl_forward_oracle_matrix(&f, 9, e, &FrequencyScheme::for_gaussian_decay(1.0, e).unwrap());
        assert!(fwd.max_diff(&orc) < 1e-7, "{}", fwd.max_diff(&orc));
        let direct = crate::quadrature::plane_inner_product(
            |x, y| e_basis_eval(0, 0, x, y, e),
            f.as_fn(),
            &PolarScheme::default_for(1.0),
        ) / (2.0 * PI);
        assert!((orc.get(0, 0) - direct).norm() < 1e-9);
    }

    #[test]
    fn inverse_examples() {
        let e = eps(0.7);
        let u = weyl_inverse(&OperatorMatrix::unit(3, 0, 0, e));
        let (x, y) = (0.4, -0.9);
        assert!((u.eval(x, y) - 2.0 / 0.7 * (-(x * x + y * y) / 0.7f64).exp()).norm() < 1e-14);
        assert_eq!(weyl_inverse(&OperatorMatrix::zeros(3, e)).eval(x, y), Complex64::new(0.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut a = OperatorMatrix::zeros(12, e);
        for v in a.a.iter_mut() {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let back = weyl_forward(&weyl_inverse(&a), 12, e, &PolarScheme::default_for(0.7)).unwrap();
        assert!(back.max_diff(&a) < 1e-8);
    }

    #[test]
    fn rank_one_inverse() {
        let e = eps(1.2);
        let e0 = [Complex64::new(1.0, 0.0)];
        assert_relative_eq!(inverse_rank1(&e0, &e0, 0.0, 0.0, e).re, 2.0 / 1.2, epsilon = 1e-14);
        let e1 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        for &(x, y) in &[(0.3, 0.2), (-1.0, 0.7), (0.0, -1.5)] {
            assert!((inverse_rank1(&e1, &e1, x, y, e) - e_basis_eval(1, 1, x, y, e)).norm() < 1e-9);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut rv = |n: usize| -> Vec<Complex64> { (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect() };
        for _ in 0..10 {
            let (phi, psi) = (rv(5), rv(5));
            let mut a = OperatorMatrix::zeros(5, e);
            for m in 0..5 {
                for n in 0..5 {
                    a.a[[m, n]] = psi[m] * phi[n].conj();
                }
            }
            let f = weyl_inverse(&a);
            for &(x, y) in &[(0.1, 0.2), (-0.8, 1.1)] {
                assert!((inverse_rank1(&phi, &psi, x, y, e) - f.eval(x, y)).norm() < 1e-8);
            }
        }
        // bilinearity
        let (p, q) = (rv(4), rv(4));
        let c = Complex64::new(0.5, 2.0);
        let scaled: Vec<Complex64> = q.iter().map(|v| v * c).collect();
        let l = inverse_rank1(&p, &scaled, 0.3, -0.1, e);
        let r = inverse_rank1(&p, &q, 0.3, -0.1, e) * c;
        assert!((l - r).norm() < 1e-13);
    }

    #[test]
    fn plancherel_examples() {
        let e = eps(1.0);
        let s = PolarScheme::default_for(1.0);
        let f = PhaseFunction::e_basis(0, 0, e);
        let rep = plancherel_ratio(&f, &f, 4, e, &s).unwrap();
        assert!(rep.deviation.unwrap() < 1e-7);
        let g = PhaseFunction::e_basis(1, 1, e);
        let rep = plancherel_ratio(&f, &g, 4, e, &s).unwrap();
        assert!(rep.ratio.is_none(), "{rep:?}");
        assert!(rep.plane.norm() < 1e-12);
    }

    #[test]
    fn correspondences() {
        let e = eps(1.0);
        let s = PolarScheme::default_for(1.0);
        let e00 = PhaseFunction::e_basis(0, 0, e);
        for kind in [Correspondence::Mx, Correspondence::My, Correspondence::Px, Correspondence::Py] {
            let r = correspondence_residual(kind, &e00, None, 10, e, &s).unwrap();
            assert!(r < 1e-6, "{kind:?}: {r}");
        }
        let g = PhaseFunction::gaussian(1.0);
        let dg = PhaseFunction::new(|x, y| Complex64::new(0.0, x) * (-(x * x + y * y) / 2.0).exp());
        let r = correspondence_residual(Correspondence::Px, &g, Some(&dg), 10, e, &s).unwrap();
        assert!(r < 1e-6, "{r}");
        let z = correspondence_residual(Correspondence::Mx, &PhaseFunction::zero(), None, 6, e, &s).unwrap();
        assert_eq!(z, 0.0);
    }
}
