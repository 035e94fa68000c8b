//! Kernel of `S*`, hyper-range, principal angles and the wandering-subspace check.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::spec::{vec_norm, Applicator, OperatorSpec, C64};
use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, ComplexRational, Rational};

/// Escape level separating a settled hyper-range candidate from one that drifts
/// to high degrees; calls are made at `ESCAPE_REFERENCE / gap` and `ESCAPE_REFERENCE · gap`.
pub const ESCAPE_REFERENCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceEstimate {
    pub dimension: usize,
    /// Orthonormal basis in orthonormal coordinates `u_j = √a_j z^j`.
    pub basis: Vec<Vec<C64>>,
    /// Singular values behind the dimension call, ascending.
    pub singular_values: Vec<f64>,
    /// Ratio between the two sides of the dimension call; at least the requested gap.
    pub gap_ratio: f64,
    pub diagnostics: String,
}

impl SubspaceEstimate {
    pub fn basis_matrix(&self, rows: usize) -> DMatrix<C64> {
        basis_matrix(&self.basis, rows)
    }
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

pub(crate) fn basis_matrix(cols: &[Vec<C64>], rows: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j].get(i).copied().unwrap_or_else(zero))
}

fn orthonormalize(m: &DMatrix<C64>) -> DMatrix<C64> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 1e-12 * smax).collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Principal angles (ascending, radians) between the column spans of `a` and `b`.
///
/// Small angles come from the sines `σ((I − Q_a Q_a^H) Q_b)`, large ones from the
/// cosines `σ(Q_a^H Q_b)`, so both ends are resolved to full precision.
pub fn principal_angles(a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<f64> {
    let rows = a.iter().chain(b).map(Vec::len).max().unwrap_or(0);
    let (mut qa, mut qb) = (orthonormalize(&basis_matrix(a, rows)), orthonormalize(&basis_matrix(b, rows)));
    if qb.ncols() > qa.ncols() {
        std::mem::swap(&mut qa, &mut qb);
    }
    let k = qb.ncols();
    if k == 0 {
        return Vec::new();
    }
    let mut cos: Vec<f64> = (qa.adjoint() * &qb).singular_values().iter().copied().collect();
    let resid = &qb - &qa * (qa.adjoint() * &qb);
    let mut sin: Vec<f64> = resid.singular_values().iter().copied().collect();
    cos.sort_by(|x, y| y.total_cmp(x));
    sin.sort_by(|x, y| x.total_cmp(y));
    (0..k)
        .map(|i| {
            let (c, s) = (cos.get(i).copied().unwrap_or(0.0).min(1.0), sin[i].min(1.0));
            if s < std::f64::consts::FRAC_1_SQRT_2 {
                s.asin()
            } else {
                c.acos()
            }
        })
        .collect()
}

/// Largest principal angle between two spans.
pub fn max_principal_angle(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    principal_angles(a, b).into_iter().fold(0.0, f64::max)
}

/// Kernel of `S*` from the trailing singular vectors of its `N×N` truncation.
///
/// `S*` maps `span_N` into itself once `N > deg f, deg g`, so the truncation is
/// exact and `ker S* ∩ span_N` is what the singular values see.
pub fn adjoint_kernel(spec: &OperatorSpec, n: usize, gap: f64) -> Result<SubspaceEstimate> {
    if n <= spec.f_degree().max(spec.g_degree()) + 1 {
        return Err(Error::PreconditionViolation("truncation must exceed deg f and deg g".into()));
    }
    let adj = spec.square_matrix(n).adjoint();
    let svd = adj.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv[n - 1];
    let floor = f64::EPSILON * smax.max(1.0);
    let dim = sv.iter().take_while(|&&s| s <= 1e-6 * smax).count();
    let dropped = if dim == 0 { floor } else { sv[dim - 1].max(floor) };
    let gap_ratio = if dim == n { f64::INFINITY } else { sv[dim] / dropped };
    let diagnostics = format!("kept σ = {:.3e}, dropped σ = {:.3e}", sv.get(dim).copied().unwrap_or(0.0), dropped);
    if gap_ratio < gap {
        return Err(Error::InconclusiveGap(format!("ker S*: gap ratio {gap_ratio:.3e} < {gap} ({diagnostics})")));
    }
    let basis = order[..dim].iter().map(|&i| (0..n).map(|j| v_t[(i, j)].conj()).collect()).collect();
    Ok(SubspaceEstimate { dimension: dim, basis, singular_values: sv.into_iter().take(dim + 4).collect(), gap_ratio, diagnostics })
}

/// `P_L S^p` on `span_L`, columns rescaled to unit maximum norm after every power.
///
/// For `L > deg g` the leading `L` coordinates of `S x` depend only on the leading
/// `L` coordinates of `x`, so the window is exact.
fn compressed_power(app: &mut Applicator, window: usize, power: usize) -> DMatrix<C64> {
    let mut cols: Vec<Vec<C64>> = (0..window)
        .map(|k| {
            let mut e = vec![zero(); window];
            e[k] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    for _ in 0..power {
        for c in cols.iter_mut() {
            let mut y = app.apply(c);
            y.truncate(window);
            *c = y;
        }
        let m = cols.iter().map(|c| vec_norm(c)).fold(0.0, f64::max);
        if m > 0.0 {
            cols.iter_mut().for_each(|c| c.iter_mut().for_each(|v| *v /= m));
        }
    }
    basis_matrix(&cols, window)
}

/// Rank of `P_{p+1} S^p`; returns `(rank, singular values descending, gap ratio)`.
fn compressed_rank(app: &mut Applicator, power: usize, g_len: usize) -> (usize, Vec<f64>, f64) {
    let window = (power + 1).max(g_len);
    let m = compressed_power(app, window, power).rows(0, power + 1).into_owned();
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    // Columns are scaled to unit maximum norm, so an absolute floor is meaningful.
    let floor = 1e-10;
    let rank = sv.iter().take_while(|&&s| s > floor).count();
    let kept = if rank == 0 { 1.0 } else { sv[rank - 1] };
    let dropped = sv.get(rank).copied().unwrap_or(0.0).max(f64::EPSILON);
    (rank, sv, kept / dropped)
}

/// Dominant left singular vector of `P_L S^{L−1}` on `span_L`.
fn range_candidate(app: &mut Applicator, window: usize) -> Vec<C64> {
    let m = compressed_power(app, window, window - 1);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let top = svd.singular_values.imax();
    (0..window).map(|i| u[(i, top)]).collect()
}

/// `P_L S^p 1` in monomial coefficients, exactly, for `g = γ·1`.
///
/// Here `S v = z·v + v̂(0)·γ̄·f`, and degrees at or above `L` never feed back.
fn exact_power_of_one(spec: &OperatorSpec, gamma: &ComplexRational, window: usize, power: usize) -> Vec<ComplexRational> {
    let k = gamma.conj();
    let f: Vec<ComplexRational> = spec.f.coeffs(spec.f_degree() + 1).iter().map(|x| x * &k).collect();
    let mut v = vec![ComplexRational::one()];
    for _ in 0..power {
        let head = v[0].clone();
        v.insert(0, ComplexRational::zero());
        if !head.is_zero() {
            if v.len() < f.len() {
                v.resize(f.len(), ComplexRational::zero());
            }
            for (vj, fj) in v.iter_mut().zip(&f) {
                *vj += &(&head * fj);
            }
        }
        v.truncate(window);
    }
    v.resize(window, ComplexRational::zero());
    v
}

/// Orthonormal coordinates of `v`, rescaled by a power of two so the largest entry
/// is of order one.
fn scaled_orthonormal(spec: &OperatorSpec, v: &[ComplexRational]) -> Vec<C64> {
    let exponent = v
        .iter()
        .flat_map(|c| [&c.re, &c.im])
        .filter(|q| !num_traits::Zero::is_zero(*q))
        .map(|q| q.numer().bits() as i64 - q.denom().bits() as i64)
        .max()
        .unwrap_or(0);
    let two = Rational::from_integer(2.into());
    let scale = if exponent >= 0 {
        num_traits::pow(two, exponent as usize).recip()
    } else {
        num_traits::pow(two, (-exponent) as usize)
    };
    v.iter()
        .enumerate()
        .map(|(j, c)| {
            let re = rational_to_f64(&(&c.re * &scale));
            let im = rational_to_f64(&(&c.im * &scale));
            C64::new(re, im) / spec.space.weight_f64(j).sqrt()
        })
        .collect()
}

/// With `g = γ·1` every `P_L S^p` has rank at most one with range spanned by
/// `P_L S^p 1`, so ranks and candidates are computed exactly. In floating point
/// the low-degree part of `S^p 1` drowns in roundoff once `|⟨f,g⟩|^p` falls
/// below machine precision.
fn hyper_range_exact(spec: &OperatorSpec, gamma: &ComplexRational, n: usize, k: usize, gap: f64) -> Result<SubspaceEstimate> {
    let lead = |p: usize| exact_power_of_one(spec, gamma, p + 1, p);
    let (prev, last) = (lead(k - 1), lead(k));
    let nonzero = |v: &[ComplexRational]| v.iter().any(|c| !c.is_zero());
    let (r_prev, rank) = (usize::from(nonzero(&prev)), usize::from(nonzero(&last)));
    let sigma = vec_norm(&scaled_orthonormal(spec, &last));
    if rank != r_prev {
        return Err(Error::InconclusiveGap(format!("compressed range rank {r_prev} at K−1 but {rank} at K")));
    }
    if rank == 0 {
        return Ok(SubspaceEstimate {
            dimension: 0,
            basis: Vec::new(),
            singular_values: vec![0.0],
            gap_ratio: f64::INFINITY,
            diagnostics: format!("P_(K+1) S^K 1 = 0 exactly at K = {k}"),
        });
    }
    let coarse = scaled_orthonormal(spec, &exact_power_of_one(spec, gamma, n / 2, n / 2 - 1));
    let fine = scaled_orthonormal(spec, &exact_power_of_one(spec, gamma, n, n - 1));
    settle(coarse, fine, vec![sigma], gap)
}

/// Dimension call from the escape of a rank-one candidate between windows `N/2` and `N`.
fn settle(coarse: Vec<C64>, fine: Vec<C64>, singular_values: Vec<f64>, gap: f64) -> Result<SubspaceEstimate> {
    let escape = max_principal_angle(&[coarse], std::slice::from_ref(&fine)).sin();
    let diagnostics = format!("escape sin θ(N/2, N) = {escape:.3e}");
    if escape * gap <= ESCAPE_REFERENCE {
        let norm = vec_norm(&fine);
        let basis = vec![fine.iter().map(|v| v / norm).collect()];
        let ratio = ESCAPE_REFERENCE / escape.max(f64::MIN_POSITIVE);
        Ok(SubspaceEstimate { dimension: 1, basis, singular_values, gap_ratio: ratio, diagnostics })
    } else if escape >= ESCAPE_REFERENCE * gap {
        Ok(SubspaceEstimate { dimension: 0, basis: Vec::new(), singular_values, gap_ratio: escape / ESCAPE_REFERENCE, diagnostics })
    } else {
        Err(Error::InconclusiveGap(format!("hyper-range candidate neither settles nor escapes ({diagnostics})")))
    }
}

/// Hyper-range `∩_n S^n H` estimated from compressed ranges of powers.
///
/// For `p ≤ K` the compressed range `P_{p+1} S^p H` pins down the leading
/// coefficients of every hyper-range element; its rank must agree at `K−1` and
/// `K`. A rank-one candidate is then extended to windows `N/2` and `N` and kept
/// only if it stays put: its principal angle across the two windows (the escape)
/// must fall below `ESCAPE_REFERENCE / gap`. An escape above
/// `ESCAPE_REFERENCE · gap` means the candidate series has no limit in the
/// space and the hyper-range is trivial.
///
/// With `g = γ·1` the ranks and candidates are computed exactly.
pub fn hyper_range(spec: &OperatorSpec, n: usize, k: usize, gap: f64) -> Result<SubspaceEstimate> {
    if k < 2 || n < 4 * (spec.g_degree() + 1) {
        return Err(Error::PreconditionViolation("hyper_range needs K ≥ 2 and N ≥ 4(deg g + 1)".into()));
    }
    if let Some(gamma) = spec.constant_g() {
        return hyper_range_exact(spec, &gamma, n, k, gap);
    }
    let mut app = spec.applicator();
    let g_len = spec.g_degree() + 1;
    let (r_prev, _, _) = compressed_rank(&mut app, k - 1, g_len);
    let (rank, sv, rank_gap) = compressed_rank(&mut app, k, g_len);
    let mut ascending = sv.clone();
    ascending.reverse();
    if rank != r_prev {
        return Err(Error::InconclusiveGap(format!("compressed range rank {r_prev} at K−1 but {rank} at K")));
    }
    if rank_gap < gap {
        return Err(Error::InconclusiveGap(format!("compressed range rank {rank}: gap ratio {rank_gap:.3e} < {gap}")));
    }
    if rank == 0 {
        return Ok(SubspaceEstimate {
            dimension: 0,
            basis: Vec::new(),
            singular_values: ascending,
            gap_ratio: rank_gap,
            diagnostics: format!("P_(K+1) S^K vanishes at K = {k}"),
        });
    }
    if rank > 1 {
        return Err(Error::InconclusiveGap(format!("compressed range rank {rank} > 1")));
    }
    let coarse = range_candidate(&mut app, n / 2);
    let fine = range_candidate(&mut app, n);
    settle(coarse, fine, ascending, gap)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WanderingCheck {
    pub kernel_dimension: usize,
    /// `max_k ‖u_k − Π u_k‖` over `k < N/2`, `Π` the projection onto `span{S^n e}`.
    pub max_residual: f64,
    pub worst_index: usize,
    /// `‖u_k − Π u_k‖` for each `k < N/2`.
    pub residuals: Vec<f64>,
    pub krylov_dimension: usize,
}

/// Orthogonalizes `v` against `basis` twice and appends it if anything is left.
fn push_orthogonal(basis: &mut Vec<Vec<C64>>, mut v: Vec<C64>) -> bool {
    let start = vec_norm(&v);
    if start == 0.0 {
        return false;
    }
    for _ in 0..2 {
        for q in basis.iter() {
            if v.len() < q.len() {
                v.resize(q.len(), zero());
            }
            let ip: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= ip * qi;
            }
        }
    }
    let left = vec_norm(&v);
    if left <= 1e-13 * start {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= left);
    basis.push(v);
    true
}

/// Residual of each `u_k`, `k < N/2`, against `span{S^n e : e ∈ ker S*, 0 ≤ n ≤ N}`.
///
/// The span is built by Arnoldi steps `q ← S q` with full reorthogonalization;
/// vectors grow with the degree so nothing is truncated.
pub fn wandering_subspace_check(spec: &OperatorSpec, n: usize, gap: f64) -> Result<WanderingCheck> {
    let kernel = adjoint_kernel(spec, n, gap)?;
    let mut app = spec.applicator();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut chains: Vec<Vec<C64>> = kernel.basis.clone();
    for step in 0..=n {
        let mut next = Vec::new();
        for v in chains {
            if push_orthogonal(&mut basis, v) {
                let q = basis.last().expect("just pushed").clone();
                if step < n {
                    next.push(app.apply(&q));
                }
            }
        }
        chains = next;
    }
    let mut max_residual: f64 = 0.0;
    let mut worst_index = 0;
    let mut residuals = Vec::with_capacity(n / 2);
    for k in 0..n / 2 {
        let mut r = vec![zero(); k + 1];
        r[k] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for q in &basis {
                if r.len() < q.len() {
                    r.resize(q.len(), zero());
                }
                let ip: C64 = q.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= ip * qi;
                }
            }
        }
        let res = vec_norm(&r);
        residuals.push(res);
        if res > max_residual {
            max_residual = res;
            worst_index = k;
        }
    }
    Ok(WanderingCheck { kernel_dimension: kernel.dimension, max_residual, worst_index, residuals, krylov_dimension: basis.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ComplexRational;
    use crate::series::PowerSeries;
    use crate::space::{named, SpaceKind};

    fn e(k: usize, len: usize) -> Vec<C64> {
        let mut v = vec![zero(); len];
        v[k] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn principal_angle_basics() {
        let a = vec![e(0, 3), e(1, 3)];
        assert!(max_principal_angle(&a, &[vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0), zero()]]) < 1e-15);
        let angle = max_principal_angle(&[e(0, 3)], &[vec![C64::new(1.0, 0.0), C64::new(1e-9, 0.0), zero()]]);
        assert!((angle - 1e-9).abs() < 1e-20);
        assert!((max_principal_angle(&[e(0, 3)], &[e(2, 3)]) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    fn hardy(f: &[i64]) -> OperatorSpec {
        OperatorSpec::with_constant(named(SpaceKind::Hardy), PowerSeries::from_ints(f), ComplexRational::one()).unwrap()
    }

    #[test]
    fn adjoint_kernel_examples() {
        let k = adjoint_kernel(&hardy(&[0, -1, 1]), 64, 10.0).unwrap();
        assert_eq!(k.dimension, 2);
        assert!(max_principal_angle(&k.basis, &[e(0, 64), e(1, 64)]) < 1e-8);
        let k = adjoint_kernel(&hardy(&[0, 0, 1]), 64, 10.0).unwrap();
        assert_eq!(k.dimension, 1);
        assert!(max_principal_angle(&k.basis, &[e(0, 64)]) < 1e-8);
        let k = adjoint_kernel(&hardy(&[1]), 64, 10.0).unwrap();
        assert_eq!(k.dimension, 1);
        let mut v = e(0, 64);
        v[1] = C64::new(-1.0, 0.0);
        assert!(max_principal_angle(&k.basis, &[v]) < 1e-8);
    }

    #[test]
    fn hyper_range_examples() {
        let h = hyper_range(&hardy(&[2]), 128, 12, 10.0).unwrap();
        assert_eq!(h.dimension, 1);
        let h = hyper_range(&hardy(&[1, 1]), 128, 12, 10.0).unwrap();
        assert_eq!(h.dimension, 0);
        let f = PowerSeries::polynomial(vec![ComplexRational::from_ratio(1, 2), ComplexRational::from_int(-1)]);
        let spec = OperatorSpec::with_constant(named(SpaceKind::Hardy), f, ComplexRational::one()).unwrap();
        let h = hyper_range(&spec, 128, 12, 10.0).unwrap();
        assert_eq!(h.dimension, 1);
        assert!(max_principal_angle(&h.basis, &[e(0, 128)]) < 1e-10);
        for f in [&[0, -1][..], &[0, 0, 1], &[0, -1, 1]] {
            assert_eq!(hyper_range(&hardy(f), 128, 12, 10.0).unwrap().dimension, 0, "{f:?}");
        }
    }

    #[test]
    fn wandering_examples() {
        let shift = OperatorSpec::shift(named(SpaceKind::Hardy));
        assert!(wandering_subspace_check(&shift, 64, 10.0).unwrap().max_residual < 1e-12);
        let w = wandering_subspace_check(&hardy(&[1]), 64, 10.0).unwrap();
        assert!(w.max_residual < 1e-8, "{w:?}");
        let w = wandering_subspace_check(&hardy(&[2, -1]), 64, 10.0).unwrap();
        assert!(w.max_residual > 0.5 && w.worst_index == 0, "{w:?}");
    }
}
