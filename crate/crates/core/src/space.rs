//! Diagonal-kernel functional Hilbert spaces.
//!
//! A space is fixed by positive weights `a_j` with `a_0 = 1`: the kernel is
//! `κ(z, w) = Σ a_j (z w̄)^j`, monomials are orthogonal and `‖z^j‖² = 1/a_j`.
//! Multiplication by `z` is the weighted shift with weights `√(a_j / a_{j+1})`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rational, rational_to_f64, ComplexRational, Rational};
use crate::series::{PowerSeries, TailModel};

/// Weight ratios are spot-checked on `0..=RATIO_SAMPLE`.
pub const RATIO_SAMPLE: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Hardy,
    Bergman,
    Dirichlet,
    Custom,
}

impl SpaceKind {
    pub const NAMED: [SpaceKind; 3] = [SpaceKind::Hardy, SpaceKind::Bergman, SpaceKind::Dirichlet];

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Hardy => "hardy",
            SpaceKind::Bergman => "bergman",
            SpaceKind::Dirichlet => "dirichlet",
            SpaceKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hardy" => Ok(SpaceKind::Hardy),
            "bergman" => Ok(SpaceKind::Bergman),
            "dirichlet" => Ok(SpaceKind::Dirichlet),
            "custom" => Ok(SpaceKind::Custom),
            other => Err(Error::Parse { input: other.into(), reason: "unknown space kind".into() }),
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters for [`make_space`]; only `Custom` reads them.
#[derive(Clone, Debug, Default)]
pub struct SpaceParams {
    /// `a_0, a_1, …`; past the end the last ratio `a_{L−2}/a_{L−1}` repeats.
    pub table: Vec<Rational>,
    pub rho_min: Option<Rational>,
    pub rho_max: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    kind: SpaceKind,
    table: Vec<Rational>,
    rho_min: Rational,
    rho_max: Rational,
}

pub fn make_space(kind: SpaceKind, params: SpaceParams) -> Result<WeightSequence> {
    let space = match kind {
        SpaceKind::Hardy => WeightSequence {
            kind,
            table: Vec::new(),
            rho_min: Rational::one(),
            rho_max: Rational::one(),
        },
        SpaceKind::Bergman => WeightSequence {
            kind,
            table: Vec::new(),
            rho_min: rational(1, 2),
            rho_max: Rational::one(),
        },
        SpaceKind::Dirichlet => WeightSequence {
            kind,
            table: Vec::new(),
            rho_min: Rational::one(),
            rho_max: rational(2, 1),
        },
        SpaceKind::Custom => {
            let (Some(rho_min), Some(rho_max)) = (params.rho_min, params.rho_max) else {
                return Err(Error::InvalidSpace("custom space needs rho_min and rho_max".into()));
            };
            if params.table.is_empty() {
                return Err(Error::InvalidSpace("custom space needs a weight table".into()));
            }
            if !params.table[0].is_one() {
                return Err(Error::InvalidSpace(format!(
                    "a_0 must be 1 (kernel normalized at the origin), got {}",
                    params.table[0]
                )));
            }
            if let Some(j) = params.table.iter().position(|a| !a.is_positive()) {
                return Err(Error::InvalidSpace(format!("weight a_{j} = {} is not positive", params.table[j])));
            }
            if !rho_min.is_positive() || rho_max < rho_min {
                return Err(Error::InvalidSpace(format!(
                    "ratio bounds must satisfy 0 < rho_min ≤ rho_max, got [{rho_min}, {rho_max}]"
                )));
            }
            WeightSequence { kind, table: params.table, rho_min, rho_max }
        }
    };
    space.check_ratios()?;
    Ok(space)
}

/// Hardy, Bergman or Dirichlet space.
pub fn named(kind: SpaceKind) -> WeightSequence {
    assert_ne!(kind, SpaceKind::Custom, "custom spaces need parameters");
    make_space(kind, SpaceParams::default()).expect("named spaces are valid")
}

impl WeightSequence {
    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn rho_min(&self) -> &Rational {
        &self.rho_min
    }

    pub fn rho_max(&self) -> &Rational {
        &self.rho_max
    }

    pub fn is_named(&self) -> bool {
        self.kind != SpaceKind::Custom
    }

    /// `a_j`.
    pub fn weight(&self, j: usize) -> Rational {
        match self.kind {
            SpaceKind::Hardy => Rational::one(),
            SpaceKind::Bergman => rational(j as i64 + 1, 1),
            SpaceKind::Dirichlet => rational(1, j as i64 + 1),
            SpaceKind::Custom => {
                let len = self.table.len();
                if j < len {
                    return self.table[j].clone();
                }
                if len == 1 {
                    return self.table[0].clone();
                }
                let r = &self.table[len - 1] / &self.table[len - 2];
                let k = (j - len + 1) as i32;
                &self.table[len - 1] * num_traits::pow::Pow::pow(&r, k)
            }
        }
    }

    pub fn weight_f64(&self, j: usize) -> f64 {
        match self.kind {
            SpaceKind::Hardy => 1.0,
            SpaceKind::Bergman => (j + 1) as f64,
            SpaceKind::Dirichlet => 1.0 / (j + 1) as f64,
            SpaceKind::Custom => rational_to_f64(&self.weight(j)),
        }
    }

    /// `a_j / a_{j+1}` = `‖z^{j+1}‖² / ‖z^j‖²`.
    pub fn ratio(&self, j: usize) -> Rational {
        self.weight(j) / self.weight(j + 1)
    }

    /// Shift weight `√(a_j / a_{j+1})` = `‖M_z z^j‖ / ‖z^j‖`.
    pub fn shift_weight(&self, j: usize) -> f64 {
        match self.kind {
            SpaceKind::Hardy => 1.0,
            SpaceKind::Bergman => ((j + 1) as f64 / (j + 2) as f64).sqrt(),
            SpaceKind::Dirichlet => ((j + 2) as f64 / (j + 1) as f64).sqrt(),
            SpaceKind::Custom => rational_to_f64(&self.ratio(j)).sqrt(),
        }
    }

    /// `‖z^j‖² = 1/a_j`.
    pub fn monomial_norm_sq(&self, j: usize) -> Rational {
        self.weight(j).recip()
    }

    /// Upper bound on `a_j/a_{j+1}` over `j ≥ from`.
    pub fn ratio_sup_from(&self, from: usize) -> Rational {
        match self.kind {
            SpaceKind::Hardy | SpaceKind::Bergman => Rational::one(),
            SpaceKind::Dirichlet => rational(from as i64 + 2, from as i64 + 1),
            SpaceKind::Custom => self.rho_max.clone(),
        }
    }

    fn check_ratios(&self) -> Result<()> {
        // Closed-form named weights satisfy their bounds by construction.
        if self.is_named() {
            return Ok(());
        }
        let mut prev = self.weight(0);
        for j in 0..RATIO_SAMPLE {
            let next = self.weight(j + 1);
            let r = &prev / &next;
            if r < self.rho_min || r > self.rho_max {
                return Err(Error::InvalidSpace(format!(
                    "a_{j}/a_{} = {r} outside declared [{}, {}]",
                    j + 1,
                    self.rho_min,
                    self.rho_max
                )));
            }
            prev = next;
        }
        Ok(())
    }

    /// `⟨h, g⟩ = Σ ĥ(j)·conj(ĝ(j)) / a_j` over the first `len` coefficients.
    pub fn inner(&self, h: &[ComplexRational], g: &[ComplexRational]) -> ComplexRational {
        let mut acc = ComplexRational::zero();
        for (j, (x, y)) in h.iter().zip(g).enumerate() {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            acc += &(x * &y.conj()).scale(&self.monomial_norm_sq(j));
        }
        acc
    }

    /// Inner product of two polynomials.
    pub fn inner_poly(&self, h: &PowerSeries, g: &PowerSeries) -> Result<ComplexRational> {
        if !h.is_polynomial() || !g.is_polynomial() {
            return Err(Error::PreconditionViolation("inner_poly needs polynomials".into()));
        }
        let len = h.prefix().len().min(g.prefix().len());
        Ok(self.inner(&h.coeffs(len), &g.coeffs(len)))
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())
    }
}

/// Exact or estimated `‖h‖²`.
#[derive(Clone, Debug, PartialEq)]
pub enum NormValue {
    Exact(Rational),
    /// Partial sum plus an upper bound on what is left (possibly infinite).
    Approx { value: f64, tail_bound: f64 },
}

impl NormValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            NormValue::Exact(q) => rational_to_f64(q),
            NormValue::Approx { value, .. } => *value,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            NormValue::Exact(_) => true,
            NormValue::Approx { tail_bound, .. } => tail_bound.is_finite(),
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Exact(q) => write!(f, "{q}"),
            NormValue::Approx { value, tail_bound } => write!(f, "{value:.12e} (+≤{tail_bound:.3e})"),
        }
    }
}

/// `‖h‖² = Σ |ĥ(j)|²/a_j`.
///
/// The prefix is summed exactly. A geometric tail is summed in closed form on the
/// Hardy space; elsewhere it is summed in floating point through degree `d` and a
/// geometric bound is reported for the remainder.
pub fn norm_sq(h: &PowerSeries, space: &WeightSequence, d: usize) -> Result<NormValue> {
    let mut exact = Rational::zero();
    for (j, c) in h.prefix().iter().enumerate() {
        if !c.is_zero() {
            exact += c.norm_sqr() * space.monomial_norm_sq(j);
        }
    }
    let TailModel::Geometric { scale, ratio, start } = h.tail() else {
        return Ok(NormValue::Exact(exact));
    };
    if scale.is_zero() {
        return Ok(NormValue::Exact(exact));
    }
    let verdict = classify_tail(scale, ratio, *start, space);
    if verdict.0 == MembershipStatus::NonMember {
        return Err(Error::Divergent(verdict.1));
    }
    let q2 = ratio.norm_sqr();
    let s2 = scale.norm_sqr();
    if space.kind() == SpaceKind::Hardy {
        // Σ_{k≥0} |s|² |q|^{2k} = |s|² / (1 − |q|²)
        return Ok(NormValue::Exact(exact + s2 / (Rational::one() - q2)));
    }
    let q2f = rational_to_f64(&q2);
    let end = d.max(*start);
    let mut term = rational_to_f64(&s2) / space.weight_f64(*start);
    let mut partial = 0.0;
    for j in *start..=end {
        partial += term;
        term *= q2f * space.weight_f64(j) / space.weight_f64(j + 1);
    }
    // `term` is now the first omitted term t_{end+1}.
    let r = q2f * rational_to_f64(&space.ratio_sup_from(end + 1));
    let tail_bound = if r < 1.0 { term / (1.0 - r) } else { f64::INFINITY };
    Ok(NormValue::Approx { value: rational_to_f64(&exact) + partial, tail_bound })
}

/// Float partial sum `Σ_{j≤d} |ĥ(j)|²/a_j`.
pub fn partial_norm_sq(h: &PowerSeries, space: &WeightSequence, d: usize) -> f64 {
    let mut sum = 0.0;
    let prefix = h.prefix();
    for j in 0..=d.min(prefix.len().saturating_sub(1)) {
        if prefix.is_empty() {
            break;
        }
        sum += rational_to_f64(&prefix[j].norm_sqr()) / space.weight_f64(j);
    }
    if let TailModel::Geometric { scale, ratio, start } = h.tail() {
        if scale.is_zero() || d < *start {
            return sum;
        }
        let q2 = rational_to_f64(&ratio.norm_sqr());
        let mut term = rational_to_f64(&scale.norm_sqr()) / space.weight_f64(*start);
        for j in *start..=d {
            sum += term;
            term *= q2 * space.weight_f64(j) / space.weight_f64(j + 1);
        }
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MembershipStatus {
    Member,
    NonMember,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipVerdict {
    pub status: MembershipStatus,
    pub norm_sq: Option<NormValue>,
    /// For non-members this names the divergence witness.
    pub reason: String,
}

/// Decides whether `Σ |ĥ(j)|²/a_j` converges.
///
/// Only the tail matters. With term ratio `|q|²·a_j/a_{j+1}` the ratio test gives
/// membership when `|q|²·ρ_max < 1` and divergence when `|q|²·ρ_min ≥ 1`. Between
/// the two, the named spaces are settled by comparison (their ratios tend to 1, so
/// the answer is `|q| < 1`); custom spaces are reported as inconclusive.
pub fn membership(h: &PowerSeries, space: &WeightSequence) -> MembershipVerdict {
    let (status, reason) = match h.tail() {
        TailModel::None => (MembershipStatus::Member, "polynomial: finite sum".to_string()),
        TailModel::Geometric { scale, ratio, start } => classify_tail(scale, ratio, *start, space),
    };
    let norm_sq = match status {
        MembershipStatus::Member => norm_sq(h, space, h.prefix().len() + 512).ok(),
        _ => None,
    };
    MembershipVerdict { status, norm_sq, reason }
}

fn classify_tail(
    scale: &ComplexRational,
    ratio: &ComplexRational,
    start: usize,
    space: &WeightSequence,
) -> (MembershipStatus, String) {
    if scale.is_zero() {
        return (MembershipStatus::Member, "zero tail: finite sum".into());
    }
    let q2 = ratio.norm_sqr();
    let hi = &q2 * space.rho_max();
    let lo = &q2 * space.rho_min();
    if hi < Rational::one() {
        return (
            MembershipStatus::Member,
            format!("ratio test: |q|²·ρ_max = {hi} < 1 from degree {start}"),
        );
    }
    if lo >= Rational::one() {
        return (
            MembershipStatus::NonMember,
            format!("ratio test: |q|²·ρ_min = {lo} ≥ 1, terms do not decrease from degree {start}"),
        );
    }
    if !space.is_named() {
        return (
            MembershipStatus::Inconclusive,
            format!("|q|² = {q2} lies in the ratio band [1/ρ_max, 1/ρ_min) of a custom space"),
        );
    }
    if q2 < Rational::one() {
        return (
            MembershipStatus::Member,
            format!("comparison: |q|² = {q2} < 1 and a_j/a_{{j+1}} → 1 on {}", space.kind()),
        );
    }
    let witness = match space.kind() {
        SpaceKind::Hardy => "terms |s|²|q|^{2k} ≥ |s|² do not tend to 0",
        SpaceKind::Bergman => "terms ≥ |s|²/(j+1), harmonic series diverges",
        SpaceKind::Dirichlet => "terms ≥ |s|²(j+1) grow without bound",
        SpaceKind::Custom => unreachable!(),
    };
    (MembershipStatus::NonMember, format!("comparison with |q|² = {q2} ≥ 1: {witness}"))
}

/// Membership of `1/(b − z) = Σ b^{−(j+1)} z^j`.
pub fn resolvent_membership(b: &ComplexRational, space: &WeightSequence) -> Result<MembershipVerdict> {
    let q = b.inv().map_err(|_| Error::DivisionByZero("resolvent 1/(b − z) with b = 0"))?;
    let h = PowerSeries::with_geometric_tail(Vec::new(), q.clone(), q);
    Ok(membership(&h, space))
}
