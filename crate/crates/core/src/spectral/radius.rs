use serde::{Deserialize, Serialize};

use super::spec::{vec_norm, OperatorSpec, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    /// `‖S^{n_max}‖^{1/n_max}`.
    pub radius: f64,
    /// `‖S^n‖^{1/n}` for `n = 1..=n_max`.
    pub sequence: Vec<f64>,
}

const POWER_ITERATIONS: usize = 60;

/// Largest singular value of the column set by power iteration on `A^H A`.
fn largest_singular_value(cols: &[Vec<C64>]) -> f64 {
    let n = cols.len();
    let rows = cols.iter().map(Vec::len).max().unwrap_or(0);
    let apply = |x: &[C64]| -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); rows];
        for (c, xj) in cols.iter().zip(x) {
            for (yi, ci) in y.iter_mut().zip(c) {
                *yi += ci * xj;
            }
        }
        y
    };
    let apply_h = |y: &[C64]| -> Vec<C64> {
        cols.iter().map(|c| c.iter().zip(y).map(|(ci, yi)| ci.conj() * yi).sum()).collect()
    };
    // Start from the column of largest norm plus a little of every coordinate.
    let best = (0..n).max_by(|&a, &b| vec_norm(&cols[a]).total_cmp(&vec_norm(&cols[b]))).unwrap_or(0);
    let mut x: Vec<C64> = (0..n).map(|j| C64::new(if j == best { 1.0 } else { 1e-3 / (1.0 + j as f64) }, 0.0)).collect();
    let mut sigma = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let nx = vec_norm(&x);
        if nx == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let y = apply(&x);
        let s = vec_norm(&y);
        x = apply_h(&y);
        if (s - sigma).abs() <= 1e-13 * s {
            return s;
        }
        sigma = s;
    }
    sigma
}

/// Gelfand estimate of the spectral radius from powers of `S` on `span_N`.
///
/// Each power is applied to the unit vectors `u_0..u_{N−1}` without truncation,
/// so `‖S^n|span_N‖` is exact up to rounding and the singular-value solve.
pub fn spectral_radius_gelfand(spec: &OperatorSpec, n: usize, n_max: usize) -> RadiusEstimate {
    assert!(n >= 1 && n_max >= 1, "truncation and power count must be positive");
    let mut app = spec.applicator();
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|k| {
            let mut e = vec![C64::new(0.0, 0.0); k + 1];
            e[k] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let mut sequence = Vec::with_capacity(n_max);
    for p in 1..=n_max {
        cols = cols.iter().map(|c| app.apply(c)).collect();
        let norm = largest_singular_value(&cols);
        sequence.push(norm.powf(1.0 / p as f64));
    }
    RadiusEstimate { radius: *sequence.last().expect("n_max ≥ 1"), sequence }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ComplexRational;
    use crate::series::PowerSeries;
    use crate::space::{named, SpaceKind};

    #[test]
    fn norms_match_dense_svd() {
        let spec = OperatorSpec::with_constant(named(SpaceKind::Dirichlet), PowerSeries::from_ints(&[1, -1]), ComplexRational::one()).unwrap();
        let est = spectral_radius_gelfand(&spec, 24, 4);
        // Square truncation big enough that four powers never reach its last row.
        let s = spec.square_matrix(24 + 4 + 2);
        let mut p = s.clone();
        for k in 1..=4 {
            let svd = p.columns(0, 24).singular_values().max();
            assert!((est.sequence[k - 1] - svd.powf(1.0 / k as f64)).abs() < 1e-9, "power {k}");
            p = &s * &p;
        }
    }

    #[test]
    fn hardy_examples() {
        let hardy = named(SpaceKind::Hardy);
        let r = spectral_radius_gelfand(&OperatorSpec::shift(hardy.clone()), 256, 32).radius;
        assert!((r - 1.0).abs() < 0.02);
        let two = OperatorSpec::with_constant(hardy.clone(), PowerSeries::from_ints(&[2]), ComplexRational::one()).unwrap();
        let r = spectral_radius_gelfand(&two, 256, 32).radius;
        assert!((r - 2.0).abs() < 0.1, "{r}");
        let half = OperatorSpec::with_constant(hardy, PowerSeries::polynomial(vec![ComplexRational::from_ratio(1, 2), ComplexRational::from_int(-1)]), ComplexRational::one()).unwrap();
        let r = spectral_radius_gelfand(&half, 256, 32).radius;
        assert!((r - 1.0).abs() < 0.05, "{r}");
    }
}
