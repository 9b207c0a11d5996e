//! Exact arithmetic in `Z[i][√2, √3, …]` for the truncated ladder algebra.
//!
//! Entries of `S`, `S†` and their polynomials are Gaussian-integer
//! combinations of square roots of integers, so identities such as the
//! truncated commutator can be checked with no rounding at all.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// `Σ c_r √r` with squarefree `r` and Gaussian-integer `c_r = (re, im)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Surd(BTreeMap<u64, (i64, i64)>);

fn squarefree_split(mut n: u64) -> (i64, u64) {
    let mut outside = 1i64;
    let mut p = 2u64;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            outside *= p as i64;
        }
        p += 1;
    }
    (outside, n)
}

impl Surd {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn int(v: i64) -> Self {
        Self::gaussian(v, 0)
    }

    pub fn gaussian(re: i64, im: i64) -> Self {
        let mut m = BTreeMap::new();
        if re != 0 || im != 0 {
            m.insert(1, (re, im));
        }
        Self(m)
    }

    /// `√n`.
    pub fn sqrt(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let (c, r) = squarefree_split(n);
        let mut m = BTreeMap::new();
        m.insert(r, (c, 0));
        Self(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn times_i(&self) -> Self {
        Self(self.0.iter().map(|(&r, &(a, b))| (r, (-b, a))).collect())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|(&r, &(a, b))| (r, (a, -b))).collect())
    }

    /// The value when it is a plain Gaussian integer.
    pub fn as_gaussian_int(&self) -> Option<(i64, i64)> {
        match self.0.len() {
            0 => Some((0, 0)),
            1 => self.0.get(&1).copied(),
            _ => None,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.0
            .iter()
            .map(|(&r, &(a, b))| Complex64::new(a as f64, b as f64) * (r as f64).sqrt())
            .sum()
    }

    fn accumulate(&mut self, r: u64, c: (i64, i64)) {
        let e = self.0.entry(r).or_insert((0, 0));
        e.0 += c.0;
        e.1 += c.1;
        if *e == (0, 0) {
            self.0.remove(&r);
        }
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (&r, &c) in &rhs.0 {
            out.accumulate(r, c);
        }
        out
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd(self.0.iter().map(|(&r, &(a, b))| (r, (-a, -b))).collect())
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        self + &(-rhs)
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (&r1, &(a1, b1)) in &self.0 {
            for (&r2, &(a2, b2)) in &rhs.0 {
                let (c, r) = squarefree_split(r1 * r2);
                let re = (a1 * a2 - b1 * b2) * c;
                let im = (a1 * b2 + b1 * a2) * c;
                out.accumulate(r, (re, im));
            }
        }
        out
    }
}

/// Dense square matrix of surds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurdMatrix {
    size: usize,
    data: Vec<Surd>,
}

impl SurdMatrix {
    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            data: vec![Surd::zero(); size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, m: usize, n: usize) -> &Surd {
        &self.data[m * self.size + n]
    }

    pub fn set(&mut self, m: usize, n: usize, v: Surd) {
        self.data[m * self.size + n] = v;
    }

    pub fn unit(size: usize, m: usize, n: usize) -> Self {
        let mut out = Self::zeros(size);
        out.set(m, n, Surd::int(1));
        out
    }

    /// Truncated lowering operator: `S[n-1][n] = √n`.
    pub fn lowering(size: usize) -> Self {
        let mut s = Self::zeros(size);
        for n in 1..size {
            s.set(n - 1, n, Surd::sqrt(n as u64));
        }
        s
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.size);
        for m in 0..self.size {
            for n in 0..self.size {
                out.set(n, m, self.get(m, n).conj());
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Surd) -> Surd) -> Self {
        Self {
            size: self.size,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let n = self.size;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * n + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            size: self.size,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            size: self.size,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }
}

/// `(X̃, Ỹ)` with `X = √(ε/2)·X̃`, `Y = √(ε/2)·Ỹ`:
/// `X̃ = S† + S`, `Ỹ = i(S† − S)`.
pub fn scaled_position_pair(size: usize) -> (SurdMatrix, SurdMatrix) {
    let s = SurdMatrix::lowering(size);
    let sd = s.adjoint();
    (sd.add(&s), sd.sub(&s).map(Surd::times_i))
}

/// The dimensionless Laplacian and potential stencils applied to a unit
/// `E_{m,n}`, both kept exact. Returns `(ℓ, v)` where
/// `ℓ = (ε/2)·L E_{m,n}` and `v = (4/ε)·V E_{m,n}`.
pub fn oscillator_stencils_on_unit(size: usize, m: usize, n: usize) -> (SurdMatrix, SurdMatrix) {
    let mut l = SurdMatrix::zeros(size);
    let mut v = SurdMatrix::zeros(size);
    let centre = (m + n + 1) as i64;
    l.set(m, n, Surd::int(centre));
    v.set(m, n, Surd::int(2 * centre));
    if m + 1 < size && n + 1 < size {
        let r = Surd::sqrt(((m + 1) * (n + 1)) as u64);
        l.set(m + 1, n + 1, -&r);
        v.set(m + 1, n + 1, &r + &r);
    }
    if m > 0 && n > 0 {
        let r = Surd::sqrt((m * n) as u64);
        l.set(m - 1, n - 1, -&r);
        v.set(m - 1, n - 1, &r + &r);
    }
    (l, v)
}
