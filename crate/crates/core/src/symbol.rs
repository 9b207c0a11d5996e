//! Built-in symbols for the CLI: `e:m,n`, `gauss:a`, `omega:lambda,j[,sigma]`,
//! joined with `+` and optionally prefixed by a real `scalar*`.
//! The same content can be supplied as a JSON file.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WeylError};
use crate::phase_space::PhaseFunction;
use crate::spectral::{omega_function, SpectralPoint};
use crate::specfun::EpsParam;

pub const DEFAULT_OMEGA_WIDTH: f64 = 8.0;

fn default_width() -> f64 {
    DEFAULT_OMEGA_WIDTH
}

fn unit_coeff() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Atom {
    /// Basis function `e_{m,n}`.
    E { m: usize, n: usize },
    /// `e^{-a ρ²/2}`.
    Gauss { a: f64 },
    /// Spectral vector damped by `e^{-ρ²/2σ²}`.
    Omega {
        lambda: f64,
        j: i64,
        #[serde(default = "default_width")]
        sigma: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    /// `[re, im]`.
    #[serde(default = "unit_coeff")]
    pub coeff: [f64; 2],
    pub atom: Atom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    pub terms: Vec<Term>,
}

fn bad(msg: impl Into<String>) -> WeylError {
    WeylError::Symbol(msg.into())
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| bad(format!("cannot read {what} from {s:?}")))
}

fn parse_atom(s: &str) -> Result<Atom> {
    let (head, args) = s.split_once(':').ok_or_else(|| bad(format!("missing ':' in {s:?}")))?;
    let args: Vec<&str> = args.split(',').collect();
    let atom = match (head.trim(), args.as_slice()) {
        ("e", [m, n]) => Atom::E {
            m: num(m, "m")?,
            n: num(n, "n")?,
        },
        ("gauss", [a]) => Atom::Gauss { a: num(a, "a")? },
        ("omega", [l, j]) => Atom::Omega {
            lambda: num(l, "lambda")?,
            j: num(j, "j")?,
            sigma: DEFAULT_OMEGA_WIDTH,
        },
        ("omega", [l, j, w]) => Atom::Omega {
            lambda: num(l, "lambda")?,
            j: num(j, "j")?,
            sigma: num(w, "sigma")?,
        },
        _ => return Err(bad(format!("unknown symbol {s:?}"))),
    };
    Ok(atom)
}

impl Symbol {
    pub fn parse(text: &str) -> Result<Self> {
        let terms = text
            .split('+')
            .map(|t| {
                let t = t.trim();
                if t.is_empty() {
                    return Err(bad(format!("empty term in {text:?}")));
                }
                match t.split_once('*') {
                    Some((c, a)) => Ok(Term {
                        coeff: [num(c, "scalar")?, 0.0],
                        atom: parse_atom(a.trim())?,
                    }),
                    None => Ok(Term {
                        coeff: unit_coeff(),
                        atom: parse_atom(t)?,
                    }),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let sym = Self { terms };
        sym.validate()?;
        Ok(sym)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| WeylError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let sym: Self = serde_json::from_str(&text).map_err(|source| WeylError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        sym.validate()?;
        Ok(sym)
    }

    fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(bad("no terms"));
        }
        for t in &self.terms {
            match t.atom {
                Atom::Gauss { a } if !(a > 0.0) => return Err(bad(format!("gauss needs a > 0, got {a}"))),
                Atom::Omega { lambda, sigma, .. } if !(lambda >= 0.0) || !(sigma > 0.0) => {
                    return Err(bad(format!("omega needs lambda >= 0 and sigma > 0, got {lambda}, {sigma}")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn to_function(&self, eps: EpsParam) -> Result<PhaseFunction> {
        let mut acc: Option<PhaseFunction> = None;
        for t in &self.terms {
            let f = match t.atom {
                Atom::E { m, n } => PhaseFunction::e_basis(m, n, eps),
                Atom::Gauss { a } => PhaseFunction::gaussian(a),
                Atom::Omega { lambda, j, sigma } => {
                    omega_function(SpectralPoint::new(lambda, j)?).times(&PhaseFunction::gaussian(1.0 / (sigma * sigma)))
                }
            };
            let f = f.scaled(Complex64::new(t.coeff[0], t.coeff[1]));
            acc = Some(match acc {
                Some(g) => g.plus(&f),
                None => f,
            });
        }
        acc.ok_or_else(|| bad("no terms"))
    }

    /// Largest Gaussian decay rate `a` in `e^{-aρ²/2}` among the terms, used
    /// to size quadrature. Basis terms decay like `e^{-ρ²·2/ε}`.
    pub fn slowest_decay(&self, eps: EpsParam) -> f64 {
        self.terms
            .iter()
            .map(|t| match t.atom {
                Atom::E { .. } => 2.0 / eps.get(),
                Atom::Gauss { a } => a,
                Atom::Omega { sigma, .. } => 1.0 / (sigma * sigma),
            })
            .fold(f64::INFINITY, f64::min)
    }
}
