//! The self-test suite: ten checks, each comparing two independent routes
//! to the same quantity. A perturbation can be injected into any single
//! check to confirm that the suite notices.

use std::f64::consts::PI;
use std::time::Instant;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decay::{decay_curve, time_grid, DecayOptions};
use crate::error::Result;
use crate::exact::{oscillator_stencils_on_unit, scaled_position_pair, SurdMatrix};
use crate::ncspace::{
    apply_superop, apply_superop_by_products, basis_operators, build_r_pow, build_t, mr2_power, weyl_element_oracle_table, weyl_element_table,
    OperatorMatrix, SuperOpKind,
};
use crate::phase_space::PhaseFunction;
use crate::quadrature::{gauss_rule, PolarScheme, RuleKind};
use crate::spectral::{eigencheck, EigenKind, SpectralPoint};
use crate::specfun::{half_integer_bridge, ln_gamma, EpsParam};
use crate::weyl::{plancherel_ratio, weyl_forward, weyl_forward_oracle_matrix, weyl_inverse, FrequencyScheme};

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "matrix elements vs quadrature"),
    (2, "diagonal oscillator superoperator"),
    (3, "round trip and frequency oracle"),
    (4, "Plancherel constant"),
    (5, "truncated commutator"),
    (6, "half-integer Hermite-Laguerre bridge"),
    (7, "polar elementary images"),
    (8, "Laplacian spectral recurrence"),
    (9, "rotation eigenvalue"),
    (10, "weighted decay law"),
];

/// Relative size of the error injected by `perturb`.
pub const PERTURBATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AcceptanceOptions {
    pub seed: u64,
    /// Check whose primary route is scaled by `1 + PERTURBATION`.
    pub perturb: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn eps(v: f64) -> EpsParam {
    EpsParam::new(v).expect("positive literal")
}

const EPS_SET: [f64; 3] = [0.5, 1.0, 2.0];

/// Outcome of one check: pass flag and a one-line summary.
type Check = Result<(bool, String)>;

fn matrix_elements(skew: f64) -> Check {
    let rule = gauss_rule(RuleKind::Hermite, 200)?;
    let grid = [-3.0, -1.5, 0.0, 1.5, 3.0];
    let mut worst: f64 = 0.0;
    for &e in &EPS_SET {
        for &xx in &grid {
            for &xy in &grid {
                let closed = weyl_element_table(9, xx, xy, eps(e));
                let oracle = weyl_element_oracle_table(9, xx, xy, eps(e), &rule);
                for m in 0..9 {
                    for n in 0..9 {
                        worst = worst.max((closed[m][n] * skew - oracle[m][n]).norm());
                    }
                }
            }
        }
    }
    Ok((worst < 1e-8, format!("max |closed - quadrature| = {worst:.3e} (tol 1e-8)")))
}

/// `H E_{m,n} = 3(m+n+1) E_{m,n}` on the exact index formulas, plus the
/// product path against the index path. The index formulas here are the
/// ones that agree with `M_X² + M_Y²`; with them `H` keeps `+√` shift
/// terms, so the diagonal claim does not hold. The detail line also reports
/// the combination `(ε/2)L + (2/ε)V`, which is diagonal.
fn oscillator_diagonal(skew: f64) -> Check {
    let size = 16;
    let mut diagonal = true;
    let mut osc_diagonal = true;
    let mut worst_shift: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for m in 0..size {
        for n in 0..size {
            let (l, v) = oscillator_stencils_on_unit(size, m, n);
            let h = l.add(&v);
            let osc = l.add(&l).add(&v);
            let expect = 3.0 * (m + n + 1) as f64 * skew;
            for a in 0..size {
                for b in 0..size {
                    let want = if (a, b) == (m, n) { expect } else { 0.0 };
                    let got = h.get(a, b).to_complex();
                    diagonal &= got == Complex64::new(want, 0.0);
                    if (a, b) != (m, n) {
                        worst_shift = worst_shift.max(got.norm());
                    }
                    let want_osc = if (a, b) == (m, n) { 4 * (m + n + 1) as i64 } else { 0 };
                    osc_diagonal &= osc.get(a, b).as_gaussian_int() == Some((want_osc, 0));
                }
            }
            for &e in &EPS_SET {
                let u = OperatorMatrix::unit(size, m, n, eps(e));
                let p = apply_superop_by_products(SuperOpKind::H, &u)?.scale(Complex64::new(skew, 0.0));
                let s = apply_superop(SuperOpKind::H, &u)?;
                worst = worst.max(p.max_diff_block(&s, size - 2));
            }
        }
    }
    Ok((
        diagonal && worst < 1e-12,
        format!(
            "H E_mn = 3(m+n+1) E_mn exactly: {diagonal} (largest shift coefficient {worst_shift:.3}); \
             product vs index path interior dev = {worst:.3e} (tol 1e-12); (eps/2)L + (2/eps)V diagonal with 2(m+n+1): {osc_diagonal}"
        ),
    ))
}

fn round_trip(skew: f64, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 12;
    let mut worst_rt: f64 = 0.0;
    for &e in &EPS_SET {
        let c = OperatorMatrix {
            eps: eps(e),
            a: Array2::from_shape_fn((size, size), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
        };
        let f = weyl_inverse(&c);
        let back = weyl_forward(&f, size, eps(e), &PolarScheme::default_for(e))?.scale(Complex64::new(skew, 0.0));
        worst_rt = worst_rt.max(back.sub(&c).frobenius() / c.frobenius());
    }
    let g = PhaseFunction::gaussian(1.0);
    let mut worst_or: f64 = 0.0;
    for &e in &EPS_SET {
        let fwd = weyl_forward(&g, 9, eps(e), &PolarScheme::default_for(e))?.scale(Complex64::new(skew, 0.0));
        let oracle = weyl_forward_oracle_matrix(&g, 9, eps(e), &FrequencyScheme::for_gaussian_decay(1.0, eps(e))?);
        worst_or = worst_or.max(fwd.max_diff(&oracle));
    }
    Ok((
        worst_rt < 1e-7 && worst_or < 1e-7,
        format!("round-trip rel L2 err = {worst_rt:.3e}; forward vs frequency oracle = {worst_or:.3e} (tol 1e-7)"),
    ))
}

fn random_combination(rng: &mut ChaCha8Rng, e: EpsParam) -> PhaseFunction {
    let mut f = PhaseFunction::zero();
    for _ in 0..4 {
        let (m, n) = (rng.gen_range(0..6), rng.gen_range(0..6));
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        f = f.plus(&PhaseFunction::e_basis(m, n, e).scaled(c));
    }
    f
}

fn plancherel(skew: f64, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut worst_dev: f64 = 0.0;
    let mut worst_spread: f64 = 0.0;
    let mut skipped = 0;
    for &e in &EPS_SET {
        let scheme = PolarScheme::default_for(e);
        let mut ratios = Vec::new();
        while ratios.len() < 20 {
            let f = random_combination(&mut rng, eps(e));
            let g = f.plus(&random_combination(&mut rng, eps(e)));
            let rep = plancherel_ratio(&f, &g, 6, eps(e), &scheme)?;
            match rep.ratio {
                Some(r) => ratios.push(r * skew),
                None => skipped += 1,
            }
        }
        let expected = 2.0 * PI / e;
        for r in &ratios {
            worst_dev = worst_dev.max((r - expected).norm());
            for q in &ratios {
                worst_spread = worst_spread.max((r - q).norm());
            }
        }
    }
    Ok((
        worst_dev < 1e-6 && worst_spread < 1e-6,
        format!("max |ratio - 2pi/eps| = {worst_dev:.3e}, spread = {worst_spread:.3e} (tol 1e-6, {skipped} null pairings skipped)"),
    ))
}

fn commutator(skew: f64) -> Check {
    let mut exact_ok = true;
    let mut float_dev: f64 = 0.0;
    for size in [4usize, 64] {
        let (xs, ys) = scaled_position_pair(size);
        let c = xs.commutator(&ys);
        for &e in &EPS_SET {
            // [X, Y] = (ε/2)[X̃, Ỹ]
            for m in 0..size {
                for n in 0..size {
                    let want = match (m == n, m == size - 1) {
                        (false, _) => 0.0,
                        (true, false) => e,
                        (true, true) => -e * (size - 1) as f64,
                    };
                    let got = match c.get(m, n).as_gaussian_int() {
                        Some((re, im)) => Complex64::new(re as f64, im as f64) * (0.5 * e),
                        None => Complex64::new(f64::NAN, f64::NAN),
                    };
                    exact_ok &= got * skew == Complex64::new(0.0, want);
                }
            }
            let ops = basis_operators(size, eps(e))?;
            let fc = ops.x.commutator(&ops.y);
            for m in 0..size {
                let want = if m == size - 1 { -e * (size - 1) as f64 } else { e };
                float_dev = float_dev.max((fc.get(m, m) - Complex64::new(0.0, want)).norm());
            }
        }
    }
    Ok((
        exact_ok,
        format!("exact integer check: {exact_ok}; floating-point path max dev = {float_dev:.3e}"),
    ))
}

fn bridge(skew: f64) -> Check {
    let mut worst: f64 = 0.0;
    let mut literal_dev: f64 = 0.0;
    for &e in &EPS_SET {
        for n in 0..=15usize {
            let ln_fact = ln_gamma(n as f64 + 1.0);
            for k in 0..=50 {
                let x = -5.0 + 0.2 * k as f64 + 0.013;
                for (h, l) in half_integer_bridge(n, x, eps(e)) {
                    if l != 0.0 {
                        worst = worst.max((h * skew - l).abs() / l.abs());
                    }
                }
                // the literal display: ε^{-1/4}h_{2n}(√ε x) over (−1)^n n! l^{(−1/2)}_n(x²)
                let [(h, l), _] = half_integer_bridge(n, x, eps(e));
                if l.abs() > 1e-12 {
                    let literal = (e.powf(-0.5) * h) / (l * ln_fact.exp());
                    let predicted = e.powf(-0.5) / ln_fact.exp();
                    literal_dev = literal_dev.max((literal - predicted).abs() / predicted);
                }
            }
        }
    }
    Ok((
        worst < 1e-9,
        format!("max rel err = {worst:.3e} (tol 1e-9); literal-form ratio equals eps^(-1/2)/n! to {literal_dev:.1e}"),
    ))
}

fn polar_images(skew: f64) -> Check {
    let size = 16;
    let mut t1_exact = true;
    let mut worst: f64 = 0.0;
    let mut r2_exact = true;
    let one = Complex64::new(skew, 0.0);
    for &e in &EPS_SET {
        let ep = eps(e);
        let t1 = build_t(1, size, ep)?.scale(one);
        for m in 0..size {
            for n in 0..size {
                let want = if m == n + 1 { 1.0 } else { 0.0 };
                t1_exact &= t1.get(m, n) == Complex64::new(want, 0.0);
            }
        }
        let ops = basis_operators(size, ep)?;
        let i = Complex64::new(0.0, 1.0);
        let lower = ops.x.add(&ops.y.scale(i));
        let raise = ops.x.sub(&ops.y.scale(i));
        for j in (-4i64..=4).filter(|&j| j != 0) {
            let k = j.unsigned_abs() as usize;
            let base = if j > 0 { &raise } else { &lower };
            let mut p = OperatorMatrix::identity(size, ep);
            for _ in 0..k {
                p = p.matmul(base);
            }
            let via_mr2 = mr2_power(-(k as f64) / 2.0, &p);
            worst = worst.max(build_t(j, size, ep)?.scale(one).max_diff(&via_mr2));
        }
        // R² against (ε/2)(X̃² + Ỹ²), off the corner
        let (xs, ys) = scaled_position_pair(size);
        let sq: SurdMatrix = xs.matmul(&xs).add(&ys.matmul(&ys));
        let r2 = build_r_pow(2, size, ep).scale(one);
        for m in 0..size - 1 {
            for n in 0..size - 1 {
                let exact = sq.get(m, n).to_complex() * (0.5 * e);
                r2_exact &= sq.get(m, n).as_gaussian_int().is_some() && r2.get(m, n) == exact;
            }
        }
    }
    Ok((
        t1_exact && worst < 1e-12 && r2_exact,
        format!("T_1 exact: {t1_exact}; M_R2 power path max dev = {worst:.3e} (tol 1e-12); R^2 exact off corner: {r2_exact}"),
    ))
}

fn laplacian_recurrence(skew: f64) -> Check {
    let mut worst_res: f64 = 0.0;
    let mut worst_fit: f64 = 0.0;
    let mut alt = Vec::new();
    for &e in &EPS_SET {
        for &lam in &[0.5, 2.0, 5.0] {
            for j in -4i64..=4 {
                let r = eigencheck(EigenKind::Laplacian, SpectralPoint::new(lam, j)?, 200, eps(e))?;
                worst_res = worst_res.max(r.residual);
                worst_fit = worst_fit.max((r.fitted * skew - lam).norm() / lam);
                if j == 1 && lam == 2.0 {
                    alt.push(format!("eps={e}: fitted {:.10} vs eps*lambda {:.10}", r.fitted.re, r.alternative));
                }
            }
        }
    }
    Ok((
        worst_res < 1e-9 && worst_fit < 1e-9,
        format!(
            "interior residual = {worst_res:.3e} (tol 1e-9); fitted/lambda - 1 = {worst_fit:.3e}; lambda=2 j=1 {}",
            alt.join(", ")
        ),
    ))
}

fn rotation(skew: f64) -> Check {
    let mut worst: f64 = 0.0;
    for &e in &EPS_SET {
        for &lam in &[0.5, 2.0, 5.0] {
            for j in -4i64..=4 {
                let r = eigencheck(EigenKind::Rotation, SpectralPoint::new(lam, j)?, 40, eps(e))?;
                worst = worst.max((r.fitted * skew - e * j as f64).norm());
            }
        }
    }
    Ok((worst < 1e-10, format!("max |fitted - eps*j| = {worst:.3e} (tol 1e-10)")))
}

fn decay_law(skew: f64) -> Check {
    let times = time_grid(5.0, 21);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for alpha in [0.0, 1.0, 2.0] {
        let c = decay_curve(alpha, &times, DecayOptions::default())?;
        let dev = c
            .measured
            .iter()
            .zip(&c.reference)
            .map(|(m, r)| (m * skew - r).abs() / r)
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        parts.push(format!("alpha={alpha}: N={} change={:.1e}", c.n, c.last_change));
    }
    Ok((worst < 1e-4, format!("max rel dev = {worst:.3e} (tol 1e-4); {}", parts.join(", "))))
}

pub fn run_one(id: u32, opts: AcceptanceOptions) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown");
    let skew = if opts.perturb == Some(id) { 1.0 + PERTURBATION } else { 1.0 };
    let start = Instant::now();
    let outcome = match id {
        1 => matrix_elements(skew),
        2 => oscillator_diagonal(skew),
        3 => round_trip(skew, opts.seed),
        4 => plancherel(skew, opts.seed),
        5 => commutator(skew),
        6 => bridge(skew),
        7 => polar_images(skew),
        8 => laplacian_recurrence(skew),
        9 => rotation(skew),
        10 => decay_law(skew),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(opts: AcceptanceOptions) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _)| run_one(id, opts)).collect()
}
