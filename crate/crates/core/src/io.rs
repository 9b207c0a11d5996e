//! File formats: the shared `{eps, N, re, im}` matrix JSON and plain CSV
//! tables with 17 significant digits.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WeylError};
use crate::ncspace::OperatorMatrix;
use crate::phase_space::CoeffField;
use crate::specfun::EpsParam;

/// Serialized form shared by [`OperatorMatrix`] and [`CoeffField`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixRecord {
    pub fn from_array(eps: EpsParam, a: &Array2<Complex64>) -> Self {
        let rows = |f: fn(&Complex64) -> f64| a.outer_iter().map(|row| row.iter().map(f).collect()).collect();
        Self {
            eps: eps.get(),
            n: a.nrows(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_array(&self) -> Result<(EpsParam, Array2<Complex64>)> {
        let eps = EpsParam::new(self.eps)?;
        let n = self.n;
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(WeylError::DimensionMismatch {
                expected: n,
                got: self.re.len(),
            });
        }
        Ok((eps, Array2::from_shape_fn((n, n), |(i, j)| Complex64::new(self.re[i][j], self.im[i][j]))))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).map_err(|source| WeylError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        fs::write(path, text + "\n").map_err(|source| WeylError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| WeylError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| WeylError::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

impl From<&OperatorMatrix> for MatrixRecord {
    fn from(a: &OperatorMatrix) -> Self {
        Self::from_array(a.eps, &a.a)
    }
}

impl From<&CoeffField> for MatrixRecord {
    fn from(c: &CoeffField) -> Self {
        Self::from_array(c.eps, &c.c)
    }
}

impl TryFrom<&MatrixRecord> for OperatorMatrix {
    type Error = WeylError;
    fn try_from(r: &MatrixRecord) -> Result<Self> {
        let (eps, a) = r.to_array()?;
        OperatorMatrix::from_array(a, eps)
    }
}

impl TryFrom<&MatrixRecord> for CoeffField {
    type Error = WeylError;
    fn try_from(r: &MatrixRecord) -> Result<Self> {
        let (eps, c) = r.to_array()?;
        Ok(CoeffField { eps, c })
    }
}

/// 17 significant digits, enough to round-trip an IEEE double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a header row and numeric rows.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let wrap = |source| WeylError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_f64(v))).map_err(wrap)?;
    }
    w.flush().map_err(|source| WeylError::Io {
        path: path.to_path_buf(),
        source,
    })
}
