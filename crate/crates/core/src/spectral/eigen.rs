use serde::{Deserialize, Serialize};

use super::spec::{orthonormal_coords, vec_norm, OperatorSpec, C64};
use crate::error::{Error, Result};
use crate::operators::apply_perturbed_shift;
use crate::scalar::{rational_to_f64, ComplexRational};
use crate::series::{PowerSeries, TailModel};
use crate::space::{norm_sq, NormValue};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenCheck {
    /// `‖(S − λ)P_N h‖ / ‖P_N h‖`.
    pub residual: f64,
    pub candidate_norm: f64,
    /// Bound on `‖h − P_N h‖`; infinite when `h` is not in the space.
    pub tail_norm_bound: f64,
    pub n: usize,
}

/// `‖h − P_N h‖`, bounded from above.
fn tail_norm(h: &PowerSeries, spec: &OperatorSpec, n: usize) -> f64 {
    let m = h.materialize(n);
    let mut prefix = m.prefix().to_vec();
    prefix.iter_mut().take(n).for_each(|x| *x = ComplexRational::zero());
    let tail = match m.tail() {
        TailModel::Geometric { scale, ratio, .. } => PowerSeries::with_geometric_tail(prefix, scale.clone(), ratio.clone()),
        TailModel::None => PowerSeries::polynomial(prefix),
    };
    match norm_sq(&tail, &spec.space, n + 512) {
        Ok(NormValue::Exact(q)) => rational_to_f64(&q).sqrt(),
        Ok(NormValue::Approx { value, tail_bound }) => (value + tail_bound).sqrt(),
        Err(_) => f64::INFINITY,
    }
}

/// Relative residual of the candidate eigenpair `(λ, h)` on the exact-degree truncation.
pub fn eigen_check(spec: &OperatorSpec, lambda: C64, h: &PowerSeries, n: usize) -> EigenCheck {
    let x = orthonormal_coords(h, &spec.space, n);
    let candidate_norm = vec_norm(&x);
    let r = spec.applicator().apply_shifted(&x, lambda);
    let residual = if candidate_norm > 0.0 { vec_norm(&r) / candidate_norm } else { f64::INFINITY };
    EigenCheck { residual, candidate_norm, tail_norm_bound: tail_norm(h, spec, n), n }
}

/// `(S − λ)h` in exact arithmetic for a polynomial `h`.
pub fn eigen_residual_exact(spec: &OperatorSpec, lambda: &ComplexRational, h: &PowerSeries) -> Result<Vec<ComplexRational>> {
    if !h.is_polynomial() {
        return Err(Error::PreconditionViolation("exact eigen residual needs a polynomial candidate".into()));
    }
    let v = h.coeffs(h.degree().map_or(1, |d| d + 1));
    let mut out = apply_perturbed_shift(&v, &spec.f, &spec.g, &spec.space);
    for (o, x) in out.iter_mut().zip(&v) {
        *o -= &(lambda * x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::build_h0;
    use crate::space::{named, SpaceKind};

    #[test]
    fn hardy_eigenpairs() {
        let hardy = named(SpaceKind::Hardy);
        let f = PowerSeries::from_ints(&[2]);
        let spec = OperatorSpec::with_constant(hardy.clone(), f.clone(), ComplexRational::one()).unwrap();
        let h0 = build_h0(&f, &ComplexRational::from_int(2), 4).unwrap();
        let check = eigen_check(&spec, C64::new(2.0, 0.0), &h0, 256);
        assert!(check.residual < 1e-10, "{check:?}");
        assert!(check.tail_norm_bound < 1e-70);

        let b = PowerSeries::polynomial(vec![ComplexRational::from_ratio(1, 2), ComplexRational::from_int(-1)]);
        let spec = OperatorSpec::with_constant(hardy, b, ComplexRational::one()).unwrap();
        let one = PowerSeries::from_ints(&[1]);
        let r = eigen_residual_exact(&spec, &ComplexRational::from_ratio(1, 2), &one).unwrap();
        assert!(r.iter().all(ComplexRational::is_zero));
        assert_eq!(eigen_check(&spec, C64::new(0.5, 0.0), &one, 64).residual, 0.0);
    }

    #[test]
    fn non_member_candidate_has_infinite_tail() {
        let f = PowerSeries::from_ints(&[1, 1]);
        let spec = OperatorSpec::with_constant(named(SpaceKind::Hardy), f.clone(), ComplexRational::one()).unwrap();
        let h0 = build_h0(&f, &ComplexRational::one(), 4).unwrap();
        let check = eigen_check(&spec, C64::new(1.0, 0.0), &h0, 128);
        assert!(check.tail_norm_bound.is_infinite());
        assert!(check.residual > 0.01);
    }
}
