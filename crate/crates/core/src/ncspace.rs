//! Operator side: truncated Hermite-basis matrices, Weyl-operator matrix
//! elements, superoperators and the closed-form images of polar symbols.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{invalid, Result, WeylError};
use crate::quadrature::Quadrature;
use crate::specfun::{hermite_fn_all, laguerre_gauss, laguerre_gauss_table, EpsParam};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `A[m][n] = ⟨h_m, A h_n⟩`, truncated to N×N.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub eps: EpsParam,
    pub a: Array2<Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(size: usize, eps: EpsParam) -> Self {
        Self {
            eps,
            a: Array2::zeros((size, size)),
        }
    }

    pub fn identity(size: usize, eps: EpsParam) -> Self {
        Self {
            eps,
            a: Array2::eye(size),
        }
    }

    /// The matrix unit `E_{m,n} = h_m ⊗ h_n*`.
    pub fn unit(size: usize, m: usize, n: usize, eps: EpsParam) -> Self {
        let mut out = Self::zeros(size, eps);
        out.a[[m, n]] = ONE;
        out
    }

    pub fn from_array(a: Array2<Complex64>, eps: EpsParam) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(WeylError::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        Ok(Self { eps, a })
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.a[[m, n]]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            eps: self.eps,
            a: self.a.t().mapv(|z| z.conj()),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self {
            eps: self.eps,
            a: self.a.dot(&other.a),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            eps: self.eps,
            a: &self.a + &other.a,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            eps: self.eps,
            a: &self.a - &other.a,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            eps: self.eps,
            a: self.a.mapv(|z| z * c),
        }
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// `(self·other + other·self)/2`.
    pub fn anticommutator_half(&self, other: &Self) -> Self {
        self.matmul(other).add(&other.matmul(self)).scale(Complex64::new(0.5, 0.0))
    }

    /// Max entrywise difference over the leading `block × block` corner.
    pub fn max_diff_block(&self, other: &Self, block: usize) -> f64 {
        let b = block.min(self.size()).min(other.size());
        let mut worst = 0.0_f64;
        for m in 0..b {
            for n in 0..b {
                worst = worst.max((self.a[[m, n]] - other.a[[m, n]]).norm());
            }
        }
        worst
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.max_diff_block(other, self.size())
    }

    pub fn frobenius(&self) -> f64 {
        self.a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ conj(self[m][n])·other[m][n]`, the trace pairing `tr(self†·other)`.
    pub fn trace_pairing(&self, other: &Self) -> Complex64 {
        self.a.iter().zip(other.a.iter()).map(|(x, y)| x.conj() * y).sum()
    }
}

/// `(j, n) ↔ (m, n)`: diagonal label `j = m − n` and radial label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalIndex {
    pub size: usize,
}

impl DiagonalIndex {
    pub fn new(size: usize) -> Self {
        Self { size }
    }

    /// Number of radial labels on diagonal `j`.
    pub fn diagonal_len(&self, j: i64) -> usize {
        self.size.saturating_sub(j.unsigned_abs() as usize)
    }

    pub fn to_mn(&self, j: i64, r: usize) -> Option<(usize, usize)> {
        let k = j.unsigned_abs() as usize;
        let (m, n) = if j >= 0 { (r + k, r) } else { (r, r + k) };
        (m < self.size && n < self.size).then_some((m, n))
    }

    pub fn to_jr(&self, m: usize, n: usize) -> (i64, usize) {
        (m as i64 - n as i64, m.min(n))
    }
}

/// Truncated ladder and position operators.
#[derive(Debug, Clone)]
pub struct BasisOperators {
    pub s: OperatorMatrix,
    pub sdag: OperatorMatrix,
    pub x: OperatorMatrix,
    pub y: OperatorMatrix,
}

pub fn basis_operators(size: usize, eps: EpsParam) -> Result<BasisOperators> {
    if size < 2 {
        return Err(invalid("N", format!("must be >= 2, got {size}")));
    }
    let mut s = OperatorMatrix::zeros(size, eps);
    for n in 1..size {
        s.a[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let sdag = s.adjoint();
    let c = (0.5 * eps.get()).sqrt();
    let x = sdag.add(&s).scale(Complex64::new(c, 0.0));
    let y = sdag.sub(&s).scale(Complex64::new(0.0, c));
    Ok(BasisOperators { s, sdag, x, y })
}

/// `⟨h_m, W_ξ h_n⟩` in closed form.
pub fn weyl_element(m: usize, n: usize, xi_x: f64, xi_y: f64, eps: EpsParam) -> Complex64 {
    let r = eps.sqrt();
    laguerre_gauss(m, n, r * xi_x, r * xi_y)
}

/// All `⟨h_m, W_ξ h_n⟩` for m, n < size.
pub fn weyl_element_table(size: usize, xi_x: f64, xi_y: f64, eps: EpsParam) -> Vec<Vec<Complex64>> {
    let r = eps.sqrt();
    laguerre_gauss_table(size, r * xi_x, r * xi_y)
}

/// Quadrature of `∫ e^{iξx·x} h_m(x − εξy/2) h_n(x + εξy/2) dx` for all
/// m, n < size, using a Gauss–Hermite rule in `x = √ε·t`.
pub fn weyl_element_oracle_table(
    size: usize,
    xi_x: f64,
    xi_y: f64,
    eps: EpsParam,
    rule: &Quadrature,
) -> Vec<Vec<Complex64>> {
    let shift = 0.5 * eps.get() * xi_y;
    let root = eps.sqrt();
    let mut out = vec![vec![ZERO; size]; size];
    for (&t, &w) in rule.nodes.iter().zip(&rule.scaled_weights) {
        let x = root * t;
        let left = hermite_fn_all(size - 1, x - shift, eps);
        let right = hermite_fn_all(size - 1, x + shift, eps);
        let phase = Complex64::from_polar(w * root, xi_x * x);
        for m in 0..size {
            for n in 0..size {
                out[m][n] += phase * (left[m] * right[n]);
            }
        }
    }
    out
}

pub fn weyl_element_oracle(
    m: usize,
    n: usize,
    xi_x: f64,
    xi_y: f64,
    eps: EpsParam,
    rule: &Quadrature,
) -> Complex64 {
    weyl_element_oracle_table(m.max(n) + 1, xi_x, xi_y, eps, rule)[m][n]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperOpKind {
    /// `A ↦ (XA + AX)/2`
    MX,
    /// `A ↦ (YA + AY)/2`
    MY,
    /// `ad_Y`
    PX,
    /// `−ad_X`
    PY,
    /// Laplacian, by its diagonal stencil.
    L,
    /// Quadratic potential, by its diagonal stencil.
    V,
    /// `(ε/2)L + (4/ε)V`. Not diagonal: the shift terms survive with
    /// coefficient `+√`.
    H,
    /// `(ε/2)L + (2/ε)V`, diagonal with eigenvalue `2(m + n + 1)`.
    Oscillator,
    /// Rotation `M_X∘P_Y − M_Y∘P_X`.
    J,
    /// `(R²A + AR²)/2`, diagonal in the matrix units.
    MR2,
}

/// Dimensionless stencils `(ε/2)L` and `(4/ε)V` as (lower, centre, upper)
/// coefficients at entry (m, n).
fn stencil(kind: SuperOpKind, m: usize, n: usize) -> (f64, f64, f64) {
    let (mf, nf) = (m as f64, n as f64);
    let lo = (mf * nf).sqrt();
    let hi = ((mf + 1.0) * (nf + 1.0)).sqrt();
    let c = mf + nf + 1.0;
    match kind {
        SuperOpKind::L => (-lo, c, -hi),
        SuperOpKind::V => (2.0 * lo, 2.0 * c, 2.0 * hi),
        _ => unreachable!("only L and V have stencils"),
    }
}

fn apply_stencil(kind: SuperOpKind, a: &Array2<Complex64>) -> Array2<Complex64> {
    let size = a.nrows();
    Array2::from_shape_fn((size, size), |(m, n)| {
        let (lo, c, hi) = stencil(kind, m, n);
        let mut acc = a[[m, n]] * c;
        if m > 0 && n > 0 {
            acc += a[[m - 1, n - 1]] * lo;
        }
        if m + 1 < size && n + 1 < size {
            acc += a[[m + 1, n + 1]] * hi;
        }
        acc
    })
}

pub fn apply_superop(kind: SuperOpKind, a: &OperatorMatrix) -> Result<OperatorMatrix> {
    let eps = a.eps.get();
    let size = a.size();
    let real = |v: f64| Complex64::new(v, 0.0);
    let ops = || basis_operators(size, a.eps);
    let out = match kind {
        SuperOpKind::L => OperatorMatrix {
            eps: a.eps,
            a: apply_stencil(SuperOpKind::L, &a.a) * real(2.0 / eps),
        },
        SuperOpKind::V => OperatorMatrix {
            eps: a.eps,
            a: apply_stencil(SuperOpKind::V, &a.a) * real(eps / 4.0),
        },
        SuperOpKind::H => OperatorMatrix {
            eps: a.eps,
            a: apply_stencil(SuperOpKind::L, &a.a) + apply_stencil(SuperOpKind::V, &a.a),
        },
        SuperOpKind::Oscillator => OperatorMatrix {
            eps: a.eps,
            a: apply_stencil(SuperOpKind::L, &a.a) + apply_stencil(SuperOpKind::V, &a.a) * real(0.5),
        },
        SuperOpKind::MR2 => OperatorMatrix {
            eps: a.eps,
            a: Array2::from_shape_fn((size, size), |(m, n)| a.a[[m, n]] * ((m + n + 1) as f64 * eps)),
        },
        SuperOpKind::MX => ops()?.x.anticommutator_half(a),
        SuperOpKind::MY => ops()?.y.anticommutator_half(a),
        SuperOpKind::PX => ops()?.y.commutator(a),
        SuperOpKind::PY => ops()?.x.commutator(a).scale(real(-1.0)),
        SuperOpKind::J => {
            let mx_py = apply_superop(SuperOpKind::MX, &apply_superop(SuperOpKind::PY, a)?)?;
            let my_px = apply_superop(SuperOpKind::MY, &apply_superop(SuperOpKind::PX, a)?)?;
            mx_py.sub(&my_px)
        }
    };
    Ok(out)
}

/// Matrix-product forms: `L = ε^{-2}(ad_X² + ad_Y²)`, `V = M_X² + M_Y²`,
/// `H = (ε/2)L + (4/ε)V`, and the oscillator with `2/ε`. Other kinds fall through to [`apply_superop`].
pub fn apply_superop_by_products(kind: SuperOpKind, a: &OperatorMatrix) -> Result<OperatorMatrix> {
    let eps = a.eps.get();
    let real = |v: f64| Complex64::new(v, 0.0);
    let ops = basis_operators(a.size(), a.eps)?;
    let lap = || {
        let ax = ops.x.commutator(&ops.x.commutator(a));
        let ay = ops.y.commutator(&ops.y.commutator(a));
        ax.add(&ay).scale(real(1.0 / (eps * eps)))
    };
    let pot = || {
        let mx = ops.x.anticommutator_half(&ops.x.anticommutator_half(a));
        let my = ops.y.anticommutator_half(&ops.y.anticommutator_half(a));
        mx.add(&my)
    };
    Ok(match kind {
        SuperOpKind::L => lap(),
        SuperOpKind::V => pot(),
        SuperOpKind::H => lap().scale(real(eps / 2.0)).add(&pot().scale(real(4.0 / eps))),
        SuperOpKind::Oscillator => lap().scale(real(eps / 2.0)).add(&pot().scale(real(2.0 / eps))),
        other => apply_superop(other, a)?,
    })
}

/// `sign · (1/2) ad_{R²}` with the exact diagonal `R²`; `sign = −1`
/// reproduces the rotation superoperator.
pub fn rotation_shortcut(a: &OperatorMatrix, sign: f64) -> OperatorMatrix {
    let r2 = build_r_pow(2, a.size(), a.eps);
    r2.commutator(a).scale(Complex64::new(0.5 * sign, 0.0))
}

/// Multiplies the entry at (m, n) by `[ε(m + n + 1)]^p`, the spectral
/// calculus of `M_{R²}`.
pub fn mr2_power(p: f64, a: &OperatorMatrix) -> OperatorMatrix {
    let eps = a.eps.get();
    let size = a.size();
    OperatorMatrix {
        eps: a.eps,
        a: Array2::from_shape_fn((size, size), |(m, n)| {
            let lam = eps * (m + n + 1) as f64;
            let f = if p == 0.0 {
                1.0
            } else if p == 1.0 {
                lam
            } else {
                lam.powf(p)
            };
            a.a[[m, n]] * f
        }),
    }
}

/// Image of the pure phase `e^{-ijθ}`:
/// `2^{|j|/2} Σ_n √((n+|j|)!/n!) (2n+|j|+1)^{-|j|/2} ℰ_{j,n}`.
pub fn build_t(j: i64, size: usize, eps: EpsParam) -> Result<OperatorMatrix> {
    let k = j.unsigned_abs() as usize;
    if k >= size {
        return Err(invalid("j", format!("|j| = {k} must be < N = {size}")));
    }
    let idx = DiagonalIndex::new(size);
    let mut out = OperatorMatrix::zeros(size, eps);
    for r in 0..idx.diagonal_len(j) {
        let denom = (2 * r + k + 1) as f64;
        let coeff: f64 = (1..=k).map(|i| (2.0 * (r + i) as f64 / denom).sqrt()).product();
        let (m, n) = idx.to_mn(j, r).expect("radial label in range");
        out.a[[m, n]] = Complex64::new(coeff, 0.0);
    }
    Ok(out)
}

/// `R^k = diag([ε(2n+1)]^{k/2})`.
pub fn build_r_pow(k: u32, size: usize, eps: EpsParam) -> OperatorMatrix {
    let mut out = OperatorMatrix::zeros(size, eps);
    for n in 0..size {
        let lam = eps.get() * (2 * n + 1) as f64;
        let v = if k % 2 == 0 {
            lam.powi((k / 2) as i32)
        } else {
            lam.powf(0.5 * k as f64)
        };
        out.a[[n, n]] = Complex64::new(v, 0.0);
    }
    out
}

/// Bargmann–Segal quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bargmann {
    /// Basis function `κ_n(s)`.
    Kappa(usize),
    /// Integral kernel `𝓑(s, x)`.
    Kernel(f64),
}

pub fn bargmann_eval(what: Bargmann, s: Complex64, eps: EpsParam) -> Complex64 {
    let e = eps.get();
    match what {
        Bargmann::Kappa(n) => {
            let mut v = Complex64::new(e.powf(-0.25) / PI.sqrt(), 0.0);
            let z = s / eps.sqrt();
            for k in 1..=n {
                v *= z / (k as f64).sqrt();
            }
            v
        }
        Bargmann::Kernel(x) => {
            let arg = -s * s / (2.0 * e) + s * (2f64.sqrt() * x / e) - x * x / (2.0 * e);
            arg.exp() * (e.powf(-0.5) * PI.powf(-0.75))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_rule, RuleKind};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eps(v: f64) -> EpsParam {
        EpsParam::new(v).unwrap()
    }

    fn random_matrix(size: usize, e: EpsParam, rng: &mut ChaCha8Rng) -> OperatorMatrix {
        OperatorMatrix {
            eps: e,
            a: Array2::from_shape_fn((size, size), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
        }
    }

    #[test]
    fn ladder_examples() {
        let ops = basis_operators(6, eps(1.0)).unwrap();
        let mut e3 = Array2::zeros((6, 1));
        e3[[3, 0]] = ONE;
        let img = ops.s.a.dot(&e3);
        assert_relative_eq!(img[[2, 0]].re, 3f64.sqrt());
        assert_eq!(ops.x.max_diff(&ops.x.adjoint()), 0.0);
        assert_eq!(ops.y.max_diff(&ops.y.adjoint()), 0.0);
        assert!(basis_operators(1, eps(1.0)).is_err());
    }

    #[test]
    fn commutator_float_path() {
        for &e in &[0.5, 1.0, 2.0] {
            let ops = basis_operators(10, eps(e)).unwrap();
            let c = ops.x.commutator(&ops.y);
            for m in 0..10 {
                for n in 0..10 {
                    let expect = if m != n {
                        ZERO
                    } else if m == 9 {
                        Complex64::new(0.0, -9.0 * e)
                    } else {
                        Complex64::new(0.0, e)
                    };
                    assert!((c.a[[m, n]] - expect).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn weyl_element_examples() {
        let e = eps(0.8);
        for m in 0..5 {
            for n in 0..5 {
                let v = weyl_element(m, n, 0.0, 0.0, e);
                assert!((v - if m == n { ONE } else { ZERO }).norm() < 1e-15);
            }
        }
        let (xx, xy) = (0.6, -1.2);
        let r2 = xx * xx + xy * xy;
        assert!((weyl_element(0, 0, xx, xy, e) - (-e.get() * r2 / 4.0).exp()).norm() < 1e-15);
        let expect = Complex64::new(0.0, (e.get() / 2.0).sqrt()) * Complex64::new(xx, xy) * (-e.get() * r2 / 4.0).exp();
        assert!((weyl_element(1, 0, xx, xy, e) - expect).norm() < 1e-15);
        for m in 0..6 {
            for n in 0..6 {
                let a = weyl_element(m, n, xx, xy, e);
                let b = weyl_element(n, m, -xx, -xy, e).conj();
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn weyl_element_against_oracle() {
        let rule = gauss_rule(RuleKind::Hermite, 200).unwrap();
        for &e in &[0.5, 1.0, 2.0] {
            for &(xx, xy) in &[(0.0, 0.0), (1.5, -0.5), (-3.0, 3.0), (2.2, 0.9)] {
                let o = weyl_element_oracle_table(12, xx, xy, eps(e), &rule);
                let c = weyl_element_table(12, xx, xy, eps(e));
                for m in 0..12 {
                    for n in 0..12 {
                        assert!((o[m][n] - c[m][n]).norm() < 1e-10, "e={e} m={m} n={n}");
                    }
                }
            }
        }
        assert!((weyl_element_oracle(0, 0, 0.0, 0.0, eps(1.0), &rule) - ONE).norm() < 1e-14);
    }

    #[test]
    fn superop_examples() {
        let e = eps(0.7);
        let ev = e.get();
        let size = 8;
        for m in 0..5 {
            for n in 0..5 {
                let u = OperatorMatrix::unit(size, m, n, e);
                let osc = apply_superop(SuperOpKind::Oscillator, &u).unwrap();
                assert_eq!(osc, u.scale(Complex64::new(2.0 * (m + n + 1) as f64, 0.0)));
                let h = apply_superop(SuperOpKind::H, &u).unwrap();
                assert_eq!(h.get(m, n).re, 3.0 * (m + n + 1) as f64);
                if m > 0 && n > 0 {
                    assert_relative_eq!(h.get(m - 1, n - 1).re, ((m * n) as f64).sqrt());
                }
                let j = apply_superop(SuperOpKind::J, &u).unwrap();
                let expect = u.scale(Complex64::new(-ev * (m as f64 - n as f64), 0.0));
                assert!(j.max_diff_block(&expect, size - 2) < 1e-13);
            }
        }
        let l = apply_superop(SuperOpKind::L, &OperatorMatrix::unit(size, 0, 0, e)).unwrap();
        assert_relative_eq!(l.get(0, 0).re, 2.0 / ev);
        assert_relative_eq!(l.get(1, 1).re, -2.0 / ev);
        let r = apply_superop(SuperOpKind::MR2, &OperatorMatrix::unit(size, 2, 3, e)).unwrap();
        assert_relative_eq!(r.get(2, 3).re, 6.0 * ev);
    }

    #[test]
    fn products_agree_with_stencils_on_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = eps(1.3);
        let a = random_matrix(16, e, &mut rng);
        for kind in [SuperOpKind::L, SuperOpKind::V, SuperOpKind::H, SuperOpKind::Oscillator] {
            let s = apply_superop(kind, &a).unwrap();
            let p = apply_superop_by_products(kind, &a).unwrap();
            assert!(s.max_diff_block(&p, 14) < 1e-12, "{kind:?}");
        }
        let mr2 = apply_superop(SuperOpKind::MR2, &a).unwrap();
        let ops = basis_operators(16, e).unwrap();
        let r2 = ops.x.matmul(&ops.x).add(&ops.y.matmul(&ops.y));
        assert!(mr2.max_diff_block(&r2.anticommutator_half(&a), 15) < 1e-12);
    }

    #[test]
    fn mx_preserves_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let b = random_matrix(16, eps(1.0), &mut rng);
            let h = b.add(&b.adjoint());
            let mx = apply_superop(SuperOpKind::MX, &h).unwrap();
            assert!(mx.max_diff(&mx.adjoint()) < 1e-14);
        }
    }

    #[test]
    fn ad_ladders_commute_on_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let size = 16;
        let ops = basis_operators(size, eps(1.0)).unwrap();
        let a = random_matrix(size, eps(1.0), &mut rng);
        let lhs = ops.s.commutator(&ops.sdag.commutator(&a));
        let rhs = ops.sdag.commutator(&ops.s.commutator(&a));
        assert!(lhs.max_diff_block(&rhs, size - 2) < 1e-12);
    }

    #[test]
    fn rotation_is_negative_half_ad_r2() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &e in &[0.5, 2.0] {
            let a = random_matrix(14, eps(e), &mut rng);
            let j = apply_superop(SuperOpKind::J, &a).unwrap();
            assert!(j.max_diff_block(&rotation_shortcut(&a, -1.0), 12) < 1e-12);
            assert!(j.max_diff_block(&rotation_shortcut(&a, 1.0), 12) > 1e-3);
        }
    }

    #[test]
    fn mr2_power_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = eps(0.6);
        let a = random_matrix(9, e, &mut rng);
        assert_eq!(mr2_power(0.0, &a), a);
        assert!(mr2_power(1.0, &a).max_diff(&apply_superop(SuperOpKind::MR2, &a).unwrap()) < 1e-13);
        let idx = DiagonalIndex::new(9);
        for j in -3i64..=3 {
            for r in 0..idx.diagonal_len(j) {
                let (m, n) = idx.to_mn(j, r).unwrap();
                let u = OperatorMatrix::unit(9, m, n, e);
                let v = mr2_power(-0.5, &u).get(m, n).re;
                let expect = e.get().powf(-0.5) * ((2 * r) as f64 + j.abs() as f64 + 1.0).powf(-0.5);
                assert_relative_eq!(v, expect, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn diagonal_index_bijective() {
        let idx = DiagonalIndex::new(7);
        let mut seen = std::collections::HashSet::new();
        for j in -6i64..=6 {
            for r in 0..idx.diagonal_len(j) {
                let (m, n) = idx.to_mn(j, r).unwrap();
                assert_eq!(m as i64 - n as i64, j);
                assert_eq!(idx.to_jr(m, n), (j, r));
                assert!(seen.insert((m, n)));
            }
            assert!(idx.to_mn(j, idx.diagonal_len(j)).is_none());
        }
        assert_eq!(seen.len(), 49);
    }

    #[test]
    fn t_operator_examples() {
        let e = eps(1.0);
        let t1 = build_t(1, 10, e).unwrap();
        for m in 0..10 {
            for n in 0..10 {
                let expect = if m == n + 1 { ONE } else { ZERO };
                assert_eq!(t1.get(m, n), expect);
            }
        }
        let prod = t1.adjoint().matmul(&t1);
        for n in 0..10 {
            let expect = if n == 9 { 0.0 } else { 1.0 };
            assert_relative_eq!(prod.get(n, n).re, expect);
        }
        let t2 = build_t(2, 10, e).unwrap();
        assert_relative_eq!(t2.get(2, 0).re, 2.0 * 2f64.sqrt() / 3.0, epsilon = 1e-15);
        let tm2 = build_t(-2, 10, e).unwrap();
        assert_eq!(tm2.get(0, 2), t2.get(2, 0));
        assert!(build_t(10, 10, e).is_err());
    }

    #[test]
    fn r_pow_examples() {
        let e = eps(0.9);
        assert_eq!(build_r_pow(0, 5, e), OperatorMatrix::identity(5, e));
        let r2 = build_r_pow(2, 5, e);
        for n in 0..5 {
            assert_eq!(r2.get(n, n).re, 0.9 * (2 * n + 1) as f64);
        }
        let r1 = build_r_pow(1, 5, e);
        assert!(r1.matmul(&r1).max_diff(&r2) < 1e-14);
    }

    #[test]
    fn bargmann_series_and_intertwining() {
        let e = eps(1.0);
        assert_relative_eq!(bargmann_eval(Bargmann::Kappa(0), Complex64::new(0.3, 0.2), e).re, PI.powf(-0.5));
        for &s in &[Complex64::new(0.5, -0.3), Complex64::new(-1.0, 0.0), Complex64::new(0.2, 0.9)] {
            for &x in &[-2.0, 0.0, 1.3, 2.0] {
                let h = hermite_fn_all(40, x, e);
                let series: Complex64 = (0..=40).map(|n| bargmann_eval(Bargmann::Kappa(n), s, e) * h[n]).sum();
                let kernel = bargmann_eval(Bargmann::Kernel(x), s, e);
                assert!((series - kernel).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn bargmann_intertwines_position() {
        let rule = gauss_rule(RuleKind::Hermite, 80).unwrap();
        for &ev in &[1.0, 0.6] {
            let e = eps(ev);
            let transform = |s: Complex64, f: &dyn Fn(f64) -> f64| -> Complex64 {
                rule.nodes
                    .iter()
                    .zip(&rule.scaled_weights)
                    .map(|(&t, &w)| {
                        let x = e.sqrt() * t;
                        bargmann_eval(Bargmann::Kernel(x), s, e) * (w * e.sqrt() * f(x))
                    })
                    .sum()
            };
            for order in 0..2usize {
                let psi = move |x: f64| hermite_fn_all(1, x, e)[order];
                let xpsi = move |x: f64| x * hermite_fn_all(1, x, e)[order];
                let s = Complex64::new(0.4, -0.3);
                let step = 1e-5;
                let ds = (transform(s + step, &psi) - transform(s - step, &psi)) / (2.0 * step);
                let lhs = transform(s, &xpsi);
                let rhs = (s * transform(s, &psi) + ds * ev) / 2f64.sqrt();
                assert!((lhs - rhs).norm() < 1e-7, "eps={ev} order={order}");
            }
        }
    }
}
