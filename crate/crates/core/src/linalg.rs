//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson-type
//! shifts). Eigenvector accumulation can be limited to the leading rows,
//! which is all the quadrature rules and the decay propagator need.

use ndarray::Array2;

use crate::error::{Result, WeylError};

const MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// Eigenvalues in ascending order with the first `rows` components of the
/// matching unit eigenvectors (`vectors[[r, k]]` is component r of vector k).
#[derive(Debug, Clone)]
pub struct PartialEigen {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if off.len() + 1 != diag.len() && !(diag.is_empty() && off.is_empty()) {
            return Err(WeylError::DimensionMismatch {
                expected: diag.len().saturating_sub(1),
                got: off.len(),
            });
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.len();
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = self.diag[i];
        }
        for i in 0..n.saturating_sub(1) {
            a[[i, i + 1]] = self.off[i];
            a[[i + 1, i]] = self.off[i];
        }
        a
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigen_rows(0)?.values)
    }

    pub fn eigen(&self) -> Result<PartialEigen> {
        self.eigen_rows(self.len())
    }

    pub fn eigen_rows(&self, rows: usize) -> Result<PartialEigen> {
        let n = self.len();
        let rows = rows.min(n);
        let mut d = self.diag.clone();
        let mut e = vec![0.0; n];
        e[..n.saturating_sub(1)].copy_from_slice(&self.off);
        let mut z = Array2::<f64>::zeros((rows, n));
        for r in 0..rows {
            z[[r, r]] = 1.0;
        }

        for l in 0..n {
            let mut sweeps = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(WeylError::EigenNoConvergence {
                        index: l,
                        iterations: sweeps,
                    });
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                let mut deflated = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for k in 0..rows {
                        let zf = z[[k, i + 1]];
                        let zi = z[[k, i]];
                        z[[k, i + 1]] = s * zi + c * zf;
                        z[[k, i]] = c * zi - s * zf;
                    }
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        let values = order.iter().map(|&k| d[k]).collect();
        let mut vectors = Array2::zeros((rows, n));
        for (dst, &src) in order.iter().enumerate() {
            for r in 0..rows {
                vectors[[r, dst]] = z[[r, src]];
            }
        }
        Ok(PartialEigen { values, vectors })
    }
}
