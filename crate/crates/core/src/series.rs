//! Formal power series over [`ComplexRational`] with an optional geometric tail.
//!
//! A series is a finite coefficient prefix `ĥ(0..D)` followed, optionally, by a
//! geometric tail `ĥ(j) = s·q^(j−n0)` for `j ≥ n0 = D + 1`. Polynomials have no tail.
//! The series `h₀ = f · Σ (z/c)^j` built by [`build_h0`] is the central object: for
//! polynomial `f` its tail is exactly geometric, so every coefficient is available
//! in closed form.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ComplexRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailModel {
    None,
    Geometric { scale: ComplexRational, ratio: ComplexRational, start: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    prefix: Vec<ComplexRational>,
    tail: TailModel,
}

impl PowerSeries {
    /// A polynomial with the given coefficients (lowest degree first).
    pub fn polynomial(coeffs: Vec<ComplexRational>) -> Self {
        PowerSeries { prefix: coeffs, tail: TailModel::None }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::polynomial(coeffs.iter().map(|&c| ComplexRational::from_int(c)).collect())
    }

    /// Parses a comma-separated coefficient list such as `"1/2, -1"`.
    pub fn parse_coeffs(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(ComplexRational::parse)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::polynomial(coeffs))
    }

    pub fn zero() -> Self {
        Self::polynomial(Vec::new())
    }

    pub fn constant(c: ComplexRational) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn monomial(degree: usize, c: ComplexRational) -> Self {
        let mut coeffs = vec![ComplexRational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::polynomial(coeffs)
    }

    /// `prefix` followed by `s·q^(j−n0)` where `n0 = prefix.len()`.
    pub fn with_geometric_tail(
        prefix: Vec<ComplexRational>,
        scale: ComplexRational,
        ratio: ComplexRational,
    ) -> Self {
        let start = prefix.len();
        PowerSeries { prefix, tail: TailModel::Geometric { scale, ratio, start } }
    }

    pub fn prefix(&self) -> &[ComplexRational] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailModel {
        &self.tail
    }

    pub fn is_polynomial(&self) -> bool {
        match &self.tail {
            TailModel::None => true,
            TailModel::Geometric { scale, .. } => scale.is_zero(),
        }
    }

    /// Degree of the polynomial, `None` for the zero polynomial or a live tail.
    pub fn degree(&self) -> Option<usize> {
        if !self.is_polynomial() {
            return None;
        }
        self.prefix.iter().rposition(|c| !c.is_zero())
    }

    /// Coefficient of `z^j`; total over all `j`.
    pub fn coeff(&self, j: usize) -> ComplexRational {
        if let Some(c) = self.prefix.get(j) {
            return c.clone();
        }
        match &self.tail {
            TailModel::None => ComplexRational::zero(),
            TailModel::Geometric { scale, ratio, start } => {
                if scale.is_zero() {
                    return ComplexRational::zero();
                }
                let k = (j - start) as i64;
                scale * ratio.powi(k).expect("nonnegative power")
            }
        }
    }

    /// Coefficients `ĥ(0..len)` as a vector.
    pub fn coeffs(&self, len: usize) -> Vec<ComplexRational> {
        let mut out: Vec<ComplexRational> = self.prefix.iter().take(len).cloned().collect();
        if out.len() < len {
            if let TailModel::Geometric { scale, ratio, .. } = &self.tail {
                let mut cur = self.coeff(out.len());
                while out.len() < len {
                    out.push(cur.clone());
                    if scale.is_zero() {
                        continue;
                    }
                    cur = &cur * ratio;
                }
            } else {
                out.resize(len, ComplexRational::zero());
            }
        }
        out
    }

    /// Same series with the tail unrolled into a prefix of length `len` (tail kept).
    pub fn materialize(&self, len: usize) -> Self {
        match &self.tail {
            TailModel::None => self.clone(),
            TailModel::Geometric { ratio, start, .. } => {
                let n0 = (*start).max(len);
                let new_scale = self.coeff(n0);
                PowerSeries {
                    prefix: self.coeffs(n0),
                    tail: TailModel::Geometric { scale: new_scale, ratio: ratio.clone(), start: n0 },
                }
            }
        }
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut prefix = vec![ComplexRational::zero(); k];
        prefix.extend(self.prefix.iter().cloned());
        let tail = match &self.tail {
            TailModel::None => TailModel::None,
            TailModel::Geometric { scale, ratio, start } => TailModel::Geometric {
                scale: scale.clone(),
                ratio: ratio.clone(),
                start: start + k,
            },
        };
        PowerSeries { prefix, tail }
    }
}

/// Cauchy product, exact through degree `d`; the result has no tail.
pub fn ps_mul_truncated(f: &PowerSeries, g: &PowerSeries, d: usize) -> PowerSeries {
    let fc = f.coeffs(d + 1);
    let gc = g.coeffs(d + 1);
    let out = (0..=d)
        .map(|j| {
            let mut acc = ComplexRational::zero();
            for i in 0..=j {
                if fc[i].is_zero() || gc[j - i].is_zero() {
                    continue;
                }
                acc += &(&fc[i] * &gc[j - i]);
            }
            acc
        })
        .collect();
    PowerSeries::polynomial(out)
}

/// `Σ_j (z/b)^j`.
pub fn geometric_series(b: &ComplexRational) -> Result<PowerSeries> {
    let q = b.inv().map_err(|_| Error::DivisionByZero("geometric series with b = 0"))?;
    Ok(PowerSeries::with_geometric_tail(Vec::new(), ComplexRational::one(), q))
}

/// Horner evaluation of a polynomial.
pub fn poly_eval(f: &PowerSeries, w: &ComplexRational) -> Result<ComplexRational> {
    if !f.is_polynomial() {
        return Err(Error::PreconditionViolation("poly_eval needs a polynomial".into()));
    }
    Ok(f
        .prefix()
        .iter()
        .rev()
        .fold(ComplexRational::zero(), |acc, c| &(&acc * w) + c))
}

/// Geometric tail of `h₀ = f·Σ(z/c)^j` for polynomial `f` of degree `n`:
/// `ĥ₀(j) = f(c)/c^j` for `j ≥ n`.
pub fn tail_closed_form_at(f: &PowerSeries, c: &ComplexRational) -> Result<TailModel> {
    if !f.is_polynomial() {
        return Err(Error::PreconditionViolation("closed-form tail needs a polynomial".into()));
    }
    if c.is_zero() {
        return Err(Error::PreconditionViolation("closed-form tail needs c ≠ 0".into()));
    }
    let n = f.degree().unwrap_or(0);
    let fc = poly_eval(f, c)?;
    let scale = fc.checked_div(&c.powi(n as i64)?)?;
    Ok(TailModel::Geometric { scale, ratio: c.inv()?, start: n })
}

/// Tail of `h₀` for `c = f(0)`: `f(f(0))·Σ_{j≥n} z^j / f(0)^j`.
pub fn tail_closed_form(f: &PowerSeries) -> Result<TailModel> {
    let f0 = f.coeff(0);
    if f0.is_zero() {
        return Err(Error::PreconditionViolation("f(0) = 0 has no h₀ tail".into()));
    }
    tail_closed_form_at(f, &f0)
}

/// `ĥ₀(j) = Σ_{i≤j} f̂(j−i)/c^i`, exact through degree `d`.
///
/// For polynomial `f` the geometric tail is attached, so the returned series is exact
/// at every degree; otherwise coefficients beyond `d` are not represented.
pub fn build_h0(f: &PowerSeries, c: &ComplexRational, d: usize) -> Result<PowerSeries> {
    let c_inv = c.inv().map_err(|_| Error::DivisionByZero("h₀ with c = 0"))?;
    if f.is_polynomial() {
        let n = f.degree().unwrap_or(0);
        let prefix = h0_recurrence(f, &c_inv, n);
        let TailModel::Geometric { scale, ratio, .. } = tail_closed_form_at(f, c)? else {
            unreachable!("closed form is geometric");
        };
        return Ok(PowerSeries::with_geometric_tail(prefix, scale, ratio));
    }
    Ok(PowerSeries::polynomial(h0_recurrence(f, &c_inv, d + 1)))
}

// ĥ₀(j) = f̂(j) + ĥ₀(j−1)/c
fn h0_recurrence(f: &PowerSeries, c_inv: &ComplexRational, len: usize) -> Vec<ComplexRational> {
    let mut out: Vec<ComplexRational> = Vec::with_capacity(len);
    for j in 0..len {
        let mut v = f.coeff(j);
        if let Some(prev) = out.last() {
            v += &(prev * c_inv);
        }
        out.push(v);
    }
    out
}

/// Serializable view of a series: prefix strings plus optional tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub prefix: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSummary {
    pub scale: String,
    pub ratio: String,
    pub start: usize,
}

impl From<&PowerSeries> for SeriesSummary {
    fn from(h: &PowerSeries) -> Self {
        let tail = match h.tail() {
            TailModel::None => None,
            TailModel::Geometric { scale, ratio, start } => Some(TailSummary {
                scale: scale.to_string(),
                ratio: ratio.to_string(),
                start: *start,
            }),
        };
        SeriesSummary { prefix: h.prefix().iter().map(|c| c.to_string()).collect(), tail }
    }
}

impl std::fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut terms: Vec<(bool, String)> = Vec::new();
        for (j, c) in self.prefix.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, c) = if c.re.is_zero() || c.im.is_zero() {
                let s = c.to_string();
                match s.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, s),
                }
            } else {
                (false, format!("({c})"))
            };
            let body = match (j, c.as_str()) {
                (0, _) => c,
                (1, "1") => "z".to_string(),
                (1, _) => format!("{c}·z"),
                (_, "1") => format!("z^{j}"),
                _ => format!("{c}·z^{j}"),
            };
            terms.push((neg, body));
        }
        if let TailModel::Geometric { scale, ratio, start } = &self.tail {
            if !scale.is_zero() {
                terms.push((false, format!("({scale})·Σ_{{j≥{start}}} ({ratio})^(j−{start}) z^j")));
            }
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (neg, body)) in terms.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}
