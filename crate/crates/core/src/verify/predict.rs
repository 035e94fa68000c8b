//! Closed-form predictions for `S = M_z + f⊗g` with constant `g = γ·1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ComplexRational;
use crate::series::{build_h0, PowerSeries};
use crate::space::{membership, resolvent_membership, MembershipStatus, MembershipVerdict, WeightSequence};
use crate::spectral::{GridSpec, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `⟨f, g⟩ = 0`.
    ZeroAtOrigin,
    H0NonMember,
    H0Member,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticityVerdict {
    pub branch: Branch,
    /// `c = ⟨f, g⟩`.
    pub pairing: ComplexRational,
    pub h0: Option<PowerSeries>,
    pub membership: Option<MembershipVerdict>,
    pub reason: String,
}

impl AnalyticityVerdict {
    /// `None` when membership of `h₀` could not be decided.
    pub fn analytic(&self) -> Option<bool> {
        match self.branch {
            Branch::ZeroAtOrigin | Branch::H0NonMember => Some(true),
            Branch::H0Member => Some(false),
            Branch::Inconclusive => None,
        }
    }
}

fn scaled_f(f: &PowerSeries, gamma: &ComplexRational) -> Result<PowerSeries> {
    if !f.is_polynomial() {
        return Err(Error::PreconditionViolation("perturbation f must be a polynomial".into()));
    }
    let k = gamma.conj();
    let len = f.degree().map_or(0, |d| d + 1);
    Ok(PowerSeries::polynomial(f.coeffs(len).iter().map(|x| x * &k).collect()))
}

/// Analyticity of `M_z + f⊗1`.
pub fn analyticity_verdict(f: &PowerSeries, space: &WeightSequence) -> Result<AnalyticityVerdict> {
    analyticity_verdict_scaled(f, &ComplexRational::one(), space)
}

/// Analyticity of `M_z + f⊗(γ·1)`, using `f⊗(γ·1) = (γ̄f)⊗1`.
pub fn analyticity_verdict_scaled(f: &PowerSeries, gamma: &ComplexRational, space: &WeightSequence) -> Result<AnalyticityVerdict> {
    let ft = scaled_f(f, gamma)?;
    let c = ft.coeff(0);
    if c.is_zero() {
        return Ok(AnalyticityVerdict {
            branch: Branch::ZeroAtOrigin,
            pairing: c,
            h0: None,
            membership: None,
            reason: "⟨f, g⟩ = 0".into(),
        });
    }
    let h0 = build_h0(&ft, &c, ft.degree().unwrap_or(0))?;
    let m = membership(&h0, space);
    let branch = match m.status {
        MembershipStatus::Member => Branch::H0Member,
        MembershipStatus::NonMember => Branch::H0NonMember,
        MembershipStatus::Inconclusive => Branch::Inconclusive,
    };
    let reason = format!("h₀ for c = {c}: {}", m.reason);
    Ok(AnalyticityVerdict { branch, pairing: c, h0: Some(h0), membership: Some(m), reason })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpair {
    pub value: ComplexRational,
    pub vector: PowerSeries,
}

/// The point spectrum of `M_z + f⊗(γ·1)`: empty or a single eigenvalue.
pub fn predict_point_spectrum(f: &PowerSeries, gamma: &ComplexRational, space: &WeightSequence) -> Result<Vec<Eigenpair>> {
    let v = analyticity_verdict_scaled(f, gamma, space)?;
    match v.branch {
        Branch::H0Member => Ok(vec![Eigenpair { value: v.pairing, vector: v.h0.expect("member branch carries h₀") }]),
        Branch::H0NonMember => Ok(Vec::new()),
        Branch::Inconclusive => Err(Error::Inconclusive(v.reason)),
        Branch::ZeroAtOrigin => {
            // S h = 0 forces h = −ĥ(0)·γ̄f/z and then γ̄f'(0) = −1.
            let ft = scaled_f(f, gamma)?;
            if ft.coeff(1) != -ComplexRational::one() {
                return Ok(Vec::new());
            }
            let deg = ft.degree().unwrap_or(0);
            let h: Vec<_> = (1..=deg).map(|j| -ft.coeff(j)).collect();
            Ok(vec![Eigenpair { value: ComplexRational::zero(), vector: PowerSeries::polynomial(h) }])
        }
    }
}

/// Grid index nearest to `w`, if `w` lies inside the grid rectangle.
pub fn nearest_grid_index(grid: &GridSpec, w: C64) -> Option<usize> {
    let inside = |x: f64, lo: f64, hi: f64, step: f64| x >= lo - step / 2.0 && x <= hi + step / 2.0;
    if !inside(w.re, grid.re_min, grid.re_max, grid.re_step()) || !inside(w.im, grid.im_min, grid.im_max, grid.im_step()) {
        return None;
    }
    let last = grid.resolution - 1;
    let snap = |x: f64, lo: f64, step: f64| (((x - lo) / step).round().max(0.0) as usize).min(last);
    let j = snap(w.re, grid.re_min, grid.re_step());
    let i = snap(w.im, grid.im_min, grid.im_step());
    Some(i * grid.resolution + j)
}

/// The base mask with the grid points nearest each eigenvalue switched on.
pub fn predict_left_spectrum(base_mask: &[bool], grid: &GridSpec, point_spectrum: &[Eigenpair]) -> Vec<bool> {
    let mut mask = base_mask.to_vec();
    for e in point_spectrum {
        if let Some(k) = nearest_grid_index(grid, e.value.to_complex64()) {
            mask[k] = true;
        }
    }
    mask
}

pub fn predict_spectral_radius(base_radius: f64, pairing: &ComplexRational) -> f64 {
    base_radius.max(pairing.to_complex64().norm())
}

/// Basis of `ker S*` in monomial coefficients for `S = M_z + f⊗(γ·1)`.
///
/// `S*h = M_z*h + γ⟨h, f⟩·1` vanishes only on `span{1, z}`, where it reduces to
/// `α·γ·conj f(0) + β(1 + γ·conj f'(0)) = 0` for `h = α + β·a_1 z`.
pub fn predict_adjoint_kernel(f: &PowerSeries, gamma: &ComplexRational, space: &WeightSequence) -> Result<Vec<PowerSeries>> {
    let ft = scaled_f(f, gamma)?;
    let p = ft.coeff(0).conj();
    let q = &ComplexRational::one() + &ft.coeff(1).conj();
    let a1 = ComplexRational::real(space.weight(1));
    let one = PowerSeries::constant(ComplexRational::one());
    Ok(match (p.is_zero(), q.is_zero()) {
        (true, true) => vec![one, PowerSeries::monomial(1, a1)],
        (true, false) => vec![one],
        (false, _) => vec![PowerSeries::polynomial(vec![q, -(&p * &a1)])],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Section3Case {
    /// `b = 0`, `a ≠ 0`.
    ZeroConstant,
    /// `b ≠ 0`, `a ≠ −1`, `1/(b − z) ∈ H`.
    ResolventMember,
    /// `b ≠ 0`, `a ≠ −1`, `1/(b − z) ∉ H`.
    ResolventNonMember,
    Unclassified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeftSpectrumShape {
    Base,
    BaseWithZero,
    BaseWithB,
    /// Only `σ_l(S) \ {b} = σ_l(M_z) \ {b}` is known.
    EqualOffB,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadiusShape {
    Base,
    MaxWithB,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section3Expectation {
    pub case: Section3Case,
    pub analytic: Option<bool>,
    pub left_spectrum: LeftSpectrumShape,
    pub radius: RadiusShape,
}

/// Expected behaviour of `M_z + (az + b)⊗1`.
pub fn section3_classify(a: &ComplexRational, b: &ComplexRational, space: &WeightSequence) -> Result<Section3Expectation> {
    let minus_one = -ComplexRational::one();
    if b.is_zero() {
        let case = if a.is_zero() { Section3Case::Unclassified } else { Section3Case::ZeroConstant };
        let left_spectrum = if *a == minus_one { LeftSpectrumShape::BaseWithZero } else { LeftSpectrumShape::Base };
        return Ok(Section3Expectation { case, analytic: Some(true), left_spectrum, radius: RadiusShape::Base });
    }
    if *a == minus_one {
        return Ok(Section3Expectation {
            case: Section3Case::Unclassified,
            analytic: Some(false),
            left_spectrum: LeftSpectrumShape::EqualOffB,
            radius: RadiusShape::MaxWithB,
        });
    }
    let expectation = match resolvent_membership(b, space)?.status {
        MembershipStatus::Member => Section3Expectation {
            case: Section3Case::ResolventMember,
            analytic: Some(false),
            left_spectrum: LeftSpectrumShape::BaseWithB,
            radius: RadiusShape::MaxWithB,
        },
        MembershipStatus::NonMember => Section3Expectation {
            case: Section3Case::ResolventNonMember,
            analytic: Some(true),
            left_spectrum: LeftSpectrumShape::Base,
            radius: RadiusShape::Base,
        },
        MembershipStatus::Inconclusive => Section3Expectation {
            case: Section3Case::Unclassified,
            analytic: None,
            left_spectrum: LeftSpectrumShape::EqualOffB,
            radius: RadiusShape::MaxWithB,
        },
    };
    Ok(expectation)
}
