//! Truncated matrices of `M_z`, its rank-one perturbations, adjoints and Cauchy duals.
//!
//! Exact work happens in monomial coordinates, where the Gram matrix is
//! `diag(1/a_j)`. Products of degree-raising operators are evaluated on a range
//! large enough to hold every image, so the exact identities below carry no
//! truncation error. The orthonormal basis `u_j = √a_j z^j` is float-only.

use std::fmt::Write as _;

use nalgebra::{Complex, DMatrix};
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::scalar::{rational_to_f64, ComplexRational};
use crate::series::PowerSeries;
use crate::space::WeightSequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Monomial,
    Orthonormal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Structure {
    ShiftBanded,
    BandedPlusRankOne,
    Dense,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    Exact(QMatrix),
    Float(DMatrix<Complex<f64>>),
}

/// A map `span{z^0..z^{N−1}} → span{z^0..z^{M−1}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    pub entries: Entries,
    pub basis: Basis,
    pub structure: Structure,
    pub space: WeightSequence,
}

impl TruncatedOperator {
    fn exact(m: QMatrix, structure: Structure, space: &WeightSequence) -> Self {
        TruncatedOperator { entries: Entries::Exact(m), basis: Basis::Monomial, structure, space: space.clone() }
    }

    pub fn rows(&self) -> usize {
        match &self.entries {
            Entries::Exact(m) => m.rows(),
            Entries::Float(m) => m.nrows(),
        }
    }

    pub fn cols(&self) -> usize {
        match &self.entries {
            Entries::Exact(m) => m.cols(),
            Entries::Float(m) => m.ncols(),
        }
    }

    /// Exact monomial entries.
    ///
    /// # Panics
    /// If the operator holds float entries.
    pub fn matrix(&self) -> &QMatrix {
        match &self.entries {
            Entries::Exact(m) => m,
            Entries::Float(_) => panic!("operator holds float entries"),
        }
    }

    pub fn to_float(&self) -> DMatrix<Complex<f64>> {
        match &self.entries {
            Entries::Exact(m) => DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].to_complex64()),
            Entries::Float(m) => m.clone(),
        }
    }

    /// Applies the operator to the first `cols` coefficients of `x`.
    pub fn apply(&self, x: &[ComplexRational]) -> Vec<ComplexRational> {
        let mut v = x.to_vec();
        v.resize(self.cols(), ComplexRational::zero());
        self.matrix().mul_vec(&v)
    }

    /// Orthonormal-basis representation `B_ij = A_ij·√a_j/√a_i`.
    pub fn to_orthonormal(&self) -> TruncatedOperator {
        if self.basis == Basis::Orthonormal {
            return self.clone();
        }
        let root = |j: usize| self.space.weight_f64(j).sqrt();
        let a = self.to_float();
        let b = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (root(j) / root(i)));
        TruncatedOperator { entries: Entries::Float(b), basis: Basis::Orthonormal, ..self.clone() }
    }

    /// Monomial-basis float representation; exact operators are just converted.
    pub fn to_monomial_float(&self) -> DMatrix<Complex<f64>> {
        let a = self.to_float();
        if self.basis == Basis::Monomial {
            return a;
        }
        let root = |j: usize| self.space.weight_f64(j).sqrt();
        DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (root(i) / root(j)))
    }

    /// Row-major CSV; each cell is written as two fields `re,im`.
    pub fn to_csv(&self) -> String {
        let a = self.to_float();
        let mut out = String::new();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{},{}", a[(i, j)].re, a[(i, j)].im);
            }
            out.push('\n');
        }
        out
    }
}

/// The reproducing vector for the `n`-th Taylor coefficient: `e_n = a_n z^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisVector {
    pub n: usize,
}

impl BasisVector {
    pub fn series(&self, space: &WeightSequence) -> PowerSeries {
        PowerSeries::monomial(self.n, ComplexRational::real(space.weight(self.n)))
    }

    /// `⟨h, e_n⟩`, which equals `ĥ(n)`.
    pub fn pair(&self, h: &PowerSeries, space: &WeightSequence) -> ComplexRational {
        let len = self.n + 1;
        space.inner(&h.coeffs(len), &self.series(space).coeffs(len))
    }
}

/// `M_z` on `span{z^0..z^{N−1}}` as an `(N+1)×N` monomial matrix.
pub fn shift_matrix(space: &WeightSequence, n: usize) -> TruncatedOperator {
    assert!(n >= 1, "shift_matrix needs N ≥ 1");
    let m = QMatrix::from_fn(n + 1, n, |i, j| if i == j + 1 { ComplexRational::one() } else { ComplexRational::zero() });
    TruncatedOperator::exact(m, Structure::ShiftBanded, space)
}

/// `M_z` in the orthonormal basis: subdiagonal `w_j = √(a_j/a_{j+1})`.
pub fn shift_matrix_orthonormal(space: &WeightSequence, rows: usize, cols: usize) -> TruncatedOperator {
    let m = DMatrix::from_fn(rows, cols, |i, j| {
        if i == j + 1 {
            Complex::new(space.shift_weight(j), 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    TruncatedOperator {
        entries: Entries::Float(m),
        basis: Basis::Orthonormal,
        structure: Structure::ShiftBanded,
        space: space.clone(),
    }
}

/// `⟨z^j, g⟩ = conj(ĝ(j))/a_j`.
fn pairing_with(g: &PowerSeries, space: &WeightSequence, j: usize) -> ComplexRational {
    g.coeff(j).conj().scale(&space.monomial_norm_sq(j))
}

/// `f ⊗ g : h ↦ ⟨h, g⟩ f`, rows `M`, columns `N`.
pub fn rank_one_matrix(f: &PowerSeries, g: &PowerSeries, space: &WeightSequence, rows: usize, cols: usize) -> TruncatedOperator {
    let fc = f.coeffs(rows);
    let mut m = QMatrix::zeros(rows, cols);
    for j in 0..cols {
        let w = pairing_with(g, space, j);
        if w.is_zero() {
            continue;
        }
        for (i, c) in fc.iter().enumerate() {
            if !c.is_zero() {
                m[(i, j)] = c * &w;
            }
        }
    }
    let structure = if f.is_polynomial() && g.is_polynomial() { Structure::BandedPlusRankOne } else { Structure::Dense };
    TruncatedOperator::exact(m, structure, space)
}

/// `S = M_z + f⊗g` as an `M×N` monomial matrix.
pub fn perturbed_shift(f: &PowerSeries, g: &PowerSeries, space: &WeightSequence, rows: usize, cols: usize) -> TruncatedOperator {
    let mut m = rank_one_matrix(f, g, space, rows, cols).matrix().clone();
    for j in 0..cols {
        if j + 1 < rows {
            m[(j + 1, j)] += &ComplexRational::one();
        }
    }
    TruncatedOperator::exact(m, Structure::BandedPlusRankOne, space)
}

/// Hilbert-space adjoint.
///
/// In monomial coordinates `(A*)_{ij} = a_i·conj(A_{ji})/a_j`, so that
/// `⟨Ax, y⟩ = ⟨x, A*y⟩` with the diagonal Gram on both sides. In the orthonormal
/// basis it is the conjugate transpose.
pub fn adjoint(a: &TruncatedOperator) -> TruncatedOperator {
    let structure = if a.structure == Structure::ShiftBanded { Structure::ShiftBanded } else { Structure::Dense };
    match &a.entries {
        Entries::Exact(m) => {
            let space = &a.space;
            let weights_in: Vec<_> = (0..m.cols()).map(|i| space.weight(i)).collect();
            let inv_out: Vec<_> = (0..m.rows()).map(|j| space.monomial_norm_sq(j)).collect();
            let adj = QMatrix::from_fn(m.cols(), m.rows(), |i, j| {
                let e = &m[(j, i)];
                if e.is_zero() {
                    ComplexRational::zero()
                } else {
                    e.conj().scale(&(&weights_in[i] * &inv_out[j]))
                }
            });
            TruncatedOperator { entries: Entries::Exact(adj), basis: a.basis, structure, space: space.clone() }
        }
        Entries::Float(m) => {
            let adj = if a.basis == Basis::Orthonormal {
                m.adjoint()
            } else {
                let w = |j: usize| a.space.weight_f64(j);
                DMatrix::from_fn(m.ncols(), m.nrows(), |i, j| m[(j, i)].conj() * (w(i) / w(j)))
            };
            TruncatedOperator { entries: Entries::Float(adj), basis: a.basis, structure, space: a.space.clone() }
        }
    }
}

/// Checks that `g` is a constant `γ·1` and returns `γ`.
fn constant_of(g: &PowerSeries, what: &str) -> Result<ComplexRational> {
    if !g.is_polynomial() || g.degree().unwrap_or(0) > 0 {
        return Err(Error::PreconditionViolation(format!("{what}: g must be a constant (T*g = 0)")));
    }
    Ok(g.coeff(0))
}

fn poly_degree(f: &PowerSeries, what: &str) -> Result<usize> {
    if !f.is_polynomial() {
        return Err(Error::PreconditionViolation(format!("{what}: f must be a polynomial")));
    }
    Ok(f.degree().unwrap_or(0))
}

/// Rows needed so that `n` applications of `M_z + f⊗g` to `span_N` stay exact.
pub fn power_rows(f: &PowerSeries, n: usize, cols: usize) -> usize {
    cols + n + f.degree().unwrap_or(0)
}

/// `(M_z + f⊗g)^n = M_z^n + Σ_{j<n} ⟨f,g⟩^{n−j−1} (z^j f)⊗g` for constant `g`.
pub fn power_via_lemma(space: &WeightSequence, f: &PowerSeries, g: &PowerSeries, n: usize, cols: usize) -> Result<TruncatedOperator> {
    constant_of(g, "power_via_lemma")?;
    if n == 0 {
        return Err(Error::PreconditionViolation("power_via_lemma needs n ≥ 1".into()));
    }
    lemma_rhs_unchecked(space, f, g, n, cols)
}

/// The right-hand side of the power formula without the `T*g = 0` check.
pub fn lemma_rhs_unchecked(space: &WeightSequence, f: &PowerSeries, g: &PowerSeries, n: usize, cols: usize) -> Result<TruncatedOperator> {
    poly_degree(f, "power formula")?;
    let rows = power_rows(f, n, cols);
    let flen = f.prefix().len();
    let c = space.inner(&f.coeffs(flen), &g.coeffs(flen));
    let mut m = QMatrix::zeros(rows, cols);
    for k in 0..cols {
        m[(k + n, k)] = ComplexRational::one();
    }
    let glen = g.prefix().len().min(cols);
    for j in 0..n {
        let weight = c.powi((n - j - 1) as i64)?;
        if weight.is_zero() {
            continue;
        }
        let zf = f.shift(j).coeffs(rows);
        for k in 0..glen {
            let w = &weight * &pairing_with(g, space, k);
            if w.is_zero() {
                continue;
            }
            for (i, fi) in zf.iter().enumerate() {
                if !fi.is_zero() {
                    m[(i, k)] += &(fi * &w);
                }
            }
        }
    }
    Ok(TruncatedOperator::exact(m, Structure::BandedPlusRankOne, space))
}

/// `(M_z + f⊗g)^n` by repeated multiplication of square truncations; any polynomial `g`.
pub fn direct_power(space: &WeightSequence, f: &PowerSeries, g: &PowerSeries, n: usize, cols: usize) -> Result<TruncatedOperator> {
    poly_degree(f, "direct_power")?;
    poly_degree(g, "direct_power")?;
    let rows = power_rows(f, n, cols);
    let s = perturbed_shift(f, g, space, rows, rows);
    let p = s.matrix().pow(n as u32).resized(rows, cols);
    Ok(TruncatedOperator::exact(p, Structure::Dense, space))
}

/// `S v = z·v + ⟨v, g⟩ f` on monomial coefficient vectors, growing as needed.
pub fn apply_perturbed_shift(v: &[ComplexRational], f: &PowerSeries, g: &PowerSeries, space: &WeightSequence) -> Vec<ComplexRational> {
    let flen = f.prefix().len();
    let mut out = vec![ComplexRational::zero(); (v.len() + 1).max(flen)];
    for (j, x) in v.iter().enumerate() {
        out[j + 1] = x.clone();
    }
    let glen = v.len().min(g.prefix().len());
    let ip = space.inner(&v[..glen], &g.coeffs(glen));
    if !ip.is_zero() {
        for (j, fj) in f.prefix().iter().enumerate() {
            out[j] += &(fj * &ip);
        }
    }
    out
}

fn sub_padded(a: &[ComplexRational], b: &[ComplexRational]) -> Vec<ComplexRational> {
    let len = a.len().max(b.len());
    let zero = ComplexRational::zero();
    (0..len).map(|j| a.get(j).unwrap_or(&zero) - b.get(j).unwrap_or(&zero)).collect()
}

/// Residual of `T^n ξ = S^n ξ − ⟨ξ,g⟩ S^{n−1} f` for `S = T + f⊗g`, `g` constant.
///
/// `ξ` is truncated to its first `cols` coefficients. The result is exactly zero.
pub fn two_cyclic_identity(
    xi: &PowerSeries,
    f: &PowerSeries,
    g: &PowerSeries,
    space: &WeightSequence,
    n: usize,
    cols: usize,
) -> Result<Vec<ComplexRational>> {
    constant_of(g, "two_cyclic_identity")?;
    let flen = poly_degree(f, "two_cyclic_identity")? + 1;
    if n == 0 {
        return Err(Error::PreconditionViolation("two_cyclic_identity needs n ≥ 1".into()));
    }
    let x = xi.coeffs(cols);
    let mut tn = vec![ComplexRational::zero(); n];
    tn.extend(x.iter().cloned());

    let mut sn = x.clone();
    for _ in 0..n {
        sn = apply_perturbed_shift(&sn, f, g, space);
    }
    let mut sf = f.coeffs(flen);
    for _ in 0..n - 1 {
        sf = apply_perturbed_shift(&sf, f, g, space);
    }
    let ip = space.inner(&x[..cols.min(1)], &g.coeffs(cols.min(1)));
    let scaled: Vec<_> = sf.iter().map(|c| c * &ip).collect();
    Ok(sub_padded(&tn, &sub_padded(&sn, &scaled)))
}

/// Cauchy dual `T' = T(T*T)⁻¹` of `M_z`: `T' z^k = (a_{k+1}/a_k) z^{k+1}`.
pub fn cauchy_dual(space: &WeightSequence, n: usize) -> Result<TruncatedOperator> {
    let t = shift_matrix(space, n);
    let tt = adjoint(&t).matrix().mul(t.matrix());
    // T*T is diagonal: solve entry by entry.
    let mut m = QMatrix::zeros(n + 1, n);
    for k in 0..n {
        let d = &tt[(k, k)];
        if d.is_zero() {
            return Err(Error::InvalidSpace(format!("T*T is singular at index {k}")));
        }
        m[(k + 1, k)] = d.inv()?;
    }
    Ok(TruncatedOperator::exact(m, Structure::ShiftBanded, space))
}

/// Coefficients of `(T*T)⁻¹ h = Σ ĥ(j)(a_{j+1}/a_j) z^j`.
fn gram_inverse_apply(h: &[ComplexRational], space: &WeightSequence) -> Vec<ComplexRational> {
    h.iter().enumerate().map(|(j, c)| c.scale(&space.ratio(j).recip())).collect()
}

/// Coefficients of `T' h`.
fn cauchy_dual_apply(h: &[ComplexRational], space: &WeightSequence) -> Vec<ComplexRational> {
    let mut out = vec![ComplexRational::zero()];
    out.extend(gram_inverse_apply(h, space));
    out
}

/// `(T + f⊗g)' = T' + (1 + ‖T'g‖²)⁻¹ (f − T'g) ⊗ (T*T)⁻¹g` for a unit constant `f`.
///
/// Output has `max(N+1, deg g + 2)` rows.
pub fn cauchy_dual_perturbed(space: &WeightSequence, f: &PowerSeries, g: &PowerSeries, n: usize) -> Result<TruncatedOperator> {
    let u = constant_of(f, "cauchy_dual_perturbed").map_err(|_| {
        Error::PreconditionViolation("cauchy_dual_perturbed: f must lie in ker T*, i.e. be constant".into())
    })?;
    if !u.norm_sqr().is_one() {
        return Err(Error::PreconditionViolation(format!("cauchy_dual_perturbed: ‖f‖² = {} ≠ 1", u.norm_sqr())));
    }
    let glen = poly_degree(g, "cauchy_dual_perturbed")? + 1;
    let rows = (n + 1).max(glen + 1);
    let gc = g.coeffs(glen);

    let tg = cauchy_dual_apply(&gc, space);
    let tg_norm = space.inner(&tg, &tg);
    let denom = (ComplexRational::one() + tg_norm).inv()?;
    let mut left = sub_padded(&f.coeffs(1), &tg);
    left.resize(rows, ComplexRational::zero());
    let right = PowerSeries::polynomial(gram_inverse_apply(&gc, space));

    let mut m = cauchy_dual(space, n)?.matrix().resized(rows, n);
    for k in 0..n {
        let w = &pairing_with(&right, space, k) * &denom;
        if w.is_zero() {
            continue;
        }
        for (i, l) in left.iter().enumerate() {
            if !l.is_zero() {
                m[(i, k)] += &(l * &w);
            }
        }
    }
    Ok(TruncatedOperator::exact(m, Structure::BandedPlusRankOne, space))
}

/// `S(S*S)⁻¹` computed from scratch on `span_K`, `K = N + deg g + 4`, restricted to
/// the first `N` columns.
pub fn cauchy_dual_direct(space: &WeightSequence, f: &PowerSeries, g: &PowerSeries, n: usize) -> Result<TruncatedOperator> {
    let fdeg = poly_degree(f, "cauchy_dual_direct")?;
    let gdeg = poly_degree(g, "cauchy_dual_direct")?;
    let k = n + gdeg + fdeg + 4;
    let s = perturbed_shift(f, g, space, k + 1, k);
    let ss = adjoint(&s).matrix().mul(s.matrix());
    let dual = s.matrix().mul(&ss.inverse()?);
    let rows = (n + 1).max(gdeg + 2).max(fdeg + 1);
    Ok(TruncatedOperator::exact(dual.resized(rows, n), Structure::Dense, space))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelCondition {
    pub holds: bool,
    /// `M_z*M_z 1` in monomial coefficients.
    pub image: Vec<String>,
    /// The eigenvalue `a_0/a_1` when the condition holds.
    pub eigenvalue: Option<f64>,
}

/// Whether `M_z*M_z` maps `ker M_z* = span{1}` into itself.
pub fn kernel_condition_check(space: &WeightSequence) -> KernelCondition {
    let t = shift_matrix(space, 3);
    let tt = adjoint(&t).matrix().mul(t.matrix());
    let image = tt.column(0);
    let holds = image.iter().skip(1).all(ComplexRational::is_zero);
    KernelCondition {
        holds,
        eigenvalue: holds.then(|| rational_to_f64(&image[0].re)),
        image: image.iter().map(ToString::to_string).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::space::{named, SpaceKind};

    fn q(n: i64, d: i64) -> ComplexRational {
        ComplexRational::from_ratio(n, d)
    }

    #[test]
    fn shift_weights() {
        let h = shift_matrix(&named(SpaceKind::Hardy), 4).to_orthonormal().to_float();
        for j in 0..4 {
            assert!((h[(j + 1, j)].re - 1.0).abs() < 1e-15);
        }
        let b = shift_matrix(&named(SpaceKind::Bergman), 4).to_orthonormal().to_float();
        assert!((b[(1, 0)].re - 0.5f64.sqrt()).abs() < 1e-15);
        let d = shift_matrix(&named(SpaceKind::Dirichlet), 4).to_orthonormal().to_float();
        assert!((d[(1, 0)].re - 2f64.sqrt()).abs() < 1e-15);
        let direct = shift_matrix_orthonormal(&named(SpaceKind::Dirichlet), 5, 4).to_float();
        assert!((direct - d).norm() < 1e-14);
    }

    #[test]
    fn rank_one_columns() {
        let hardy = named(SpaceKind::Hardy);
        let one = PowerSeries::from_ints(&[1]);
        let m = rank_one_matrix(&one, &one, &hardy, 3, 3);
        assert_eq!(m.matrix().column(0), vec![q(1, 1), q(0, 1), q(0, 1)]);
        assert!(m.matrix().column(1).iter().all(ComplexRational::is_zero));
        let m = rank_one_matrix(&PowerSeries::from_ints(&[3, -1]), &one, &hardy, 3, 2);
        assert_eq!(m.matrix().column(0), vec![q(3, 1), q(-1, 1), q(0, 1)]);
        let berg = named(SpaceKind::Bergman);
        let m = rank_one_matrix(&one, &PowerSeries::from_ints(&[0, 1]), &berg, 2, 2);
        assert_eq!(m.matrix().column(1), vec![q(1, 2), q(0, 1)]);
        assert!(m.matrix().column(0).iter().all(ComplexRational::is_zero));
    }

    #[test]
    fn shift_adjoint_examples() {
        for kind in SpaceKind::NAMED {
            let s = named(kind);
            let t = shift_matrix(&s, 6);
            let ts = adjoint(&t);
            let mut one = vec![ComplexRational::zero(); 7];
            one[0] = q(1, 1);
            assert!(ts.apply(&one).iter().all(ComplexRational::is_zero));
            for k in 1..6 {
                let mut zk = vec![ComplexRational::zero(); 7];
                zk[k] = q(1, 1);
                let img = ts.apply(&zk);
                let expect = ComplexRational::real(s.weight(k - 1) / s.weight(k));
                assert_eq!(img[k - 1], expect);
                assert!(img.iter().enumerate().all(|(i, c)| i == k - 1 || c.is_zero()));
            }
        }
        let hardy = named(SpaceKind::Hardy);
        let img = adjoint(&shift_matrix(&hardy, 3)).apply(&[q(0, 1), q(1, 1)]);
        assert_eq!(img[0], q(1, 1));
    }

    #[test]
    fn orthonormal_adjoint_agrees() {
        let s = named(SpaceKind::Dirichlet);
        let f = PowerSeries::from_ints(&[1, -2, 1]);
        let g = PowerSeries::from_ints(&[2, 0, 3]);
        let a = perturbed_shift(&f, &g, &s, 7, 5);
        let via_exact = adjoint(&a).to_orthonormal().to_float();
        let via_float = adjoint(&a.to_orthonormal()).to_float();
        assert!((via_exact - via_float).norm() < 1e-12);
    }

    #[test]
    fn lemma_small_cases() {
        let hardy = named(SpaceKind::Hardy);
        let one = PowerSeries::from_ints(&[1]);
        let f = PowerSeries::polynomial(vec![q(3, 2), q(-1, 1)]);
        let base = power_via_lemma(&hardy, &f, &one, 1, 5).unwrap();
        let s = perturbed_shift(&f, &one, &hardy, base.rows(), 5);
        assert_eq!(base.matrix(), s.matrix());
        for (ff, n) in [(f.clone(), 2), (PowerSeries::from_ints(&[0, 1]), 3)] {
            let lemma = power_via_lemma(&hardy, &ff, &one, n, 6).unwrap();
            let direct = direct_power(&hardy, &ff, &one, n, 6).unwrap();
            assert_eq!(lemma.matrix(), direct.matrix());
        }
    }

    #[test]
    fn lemma_rejects_nonconstant_g() {
        let hardy = named(SpaceKind::Hardy);
        let one = PowerSeries::from_ints(&[1]);
        let z = PowerSeries::from_ints(&[0, 1]);
        assert!(matches!(power_via_lemma(&hardy, &one, &z, 2, 4), Err(Error::PreconditionViolation(_))));
        let rhs = lemma_rhs_unchecked(&hardy, &one, &z, 2, 4).unwrap();
        let direct = direct_power(&hardy, &one, &z, 2, 4).unwrap();
        assert_ne!(rhs.matrix(), direct.matrix());
    }

    #[test]
    fn two_cyclic_examples() {
        let hardy = named(SpaceKind::Hardy);
        let berg = named(SpaceKind::Bergman);
        let one = PowerSeries::from_ints(&[1]);
        let xi = PowerSeries::from_ints(&[0, 1, 1]);
        let r = two_cyclic_identity(&xi, &PowerSeries::from_ints(&[2]), &one, &hardy, 4, 8).unwrap();
        assert!(r.iter().all(ComplexRational::is_zero));
        let r = two_cyclic_identity(&one, &PowerSeries::from_ints(&[3, -1]), &one, &berg, 3, 8).unwrap();
        assert!(r.iter().all(ComplexRational::is_zero));
        let r = two_cyclic_identity(&xi, &PowerSeries::from_ints(&[1, 2]), &one, &berg, 1, 8).unwrap();
        assert!(r.iter().all(ComplexRational::is_zero));
    }

    #[test]
    fn cauchy_dual_examples() {
        let hardy = cauchy_dual(&named(SpaceKind::Hardy), 5).unwrap();
        assert_eq!(hardy.matrix(), shift_matrix(&named(SpaceKind::Hardy), 5).matrix());
        let b = cauchy_dual(&named(SpaceKind::Bergman), 5).unwrap();
        assert_eq!(b.matrix()[(1, 0)], q(2, 1));
        let d = cauchy_dual(&named(SpaceKind::Dirichlet), 5).unwrap();
        assert_eq!(d.matrix()[(1, 0)], q(1, 2));
    }

    #[test]
    fn cauchy_dual_gram_identity() {
        for kind in SpaceKind::NAMED {
            let s = named(kind);
            let d = cauchy_dual(&s, 8).unwrap();
            let lhs = adjoint(&d).matrix().mul(d.matrix());
            let t = shift_matrix(&s, 8);
            let tt = adjoint(&t).matrix().mul(t.matrix());
            assert_eq!(lhs, tt.inverse().unwrap());
        }
    }

    #[test]
    fn perturbed_dual_examples() {
        let hardy = named(SpaceKind::Hardy);
        let one = PowerSeries::from_ints(&[1]);
        let zero = PowerSeries::zero();
        let p = cauchy_dual_perturbed(&hardy, &one, &zero, 5).unwrap();
        assert_eq!(p.matrix(), cauchy_dual(&hardy, 5).unwrap().matrix());

        let p = cauchy_dual_perturbed(&hardy, &one, &one, 5).unwrap();
        let mut expect = cauchy_dual(&hardy, 5).unwrap().matrix().clone();
        expect[(0, 0)] += &q(1, 2);
        expect[(1, 0)] -= &q(1, 2);
        assert_eq!(p.matrix(), &expect);

        let berg = named(SpaceKind::Bergman);
        let z = PowerSeries::from_ints(&[0, 1]);
        let p = cauchy_dual_perturbed(&berg, &one, &z, 6).unwrap();
        let d = cauchy_dual_direct(&berg, &one, &z, 6).unwrap();
        assert_eq!(p.matrix(), &d.matrix().resized(p.rows(), 6));
    }

    #[test]
    fn perturbed_dual_preconditions() {
        let hardy = named(SpaceKind::Hardy);
        let g = PowerSeries::from_ints(&[1]);
        let two = PowerSeries::from_ints(&[2]);
        assert!(matches!(cauchy_dual_perturbed(&hardy, &two, &g, 4), Err(Error::PreconditionViolation(_))));
        let z = PowerSeries::from_ints(&[0, 1]);
        assert!(matches!(cauchy_dual_perturbed(&hardy, &z, &g, 4), Err(Error::PreconditionViolation(_))));
        let unimodular = PowerSeries::polynomial(vec![ComplexRational::new(rational(3, 5), rational(4, 5))]);
        assert!(cauchy_dual_perturbed(&hardy, &unimodular, &g, 4).is_ok());
    }

    #[test]
    fn kernel_condition_examples() {
        for (kind, value) in [(SpaceKind::Hardy, 1.0), (SpaceKind::Bergman, 0.5), (SpaceKind::Dirichlet, 2.0)] {
            let k = kernel_condition_check(&named(kind));
            assert!(k.holds);
            assert_eq!(k.eigenvalue, Some(value));
        }
    }

    #[test]
    fn basis_vectors_reproduce_coefficients() {
        let h = PowerSeries::from_ints(&[4, -1, 0, 7, 2]);
        for kind in SpaceKind::NAMED {
            let s = named(kind);
            for n in 0..6 {
                assert_eq!(BasisVector { n }.pair(&h, &s), h.coeff(n));
            }
        }
    }

    #[test]
    fn csv_export() {
        let csv = shift_matrix(&named(SpaceKind::Hardy), 2).to_csv();
        assert_eq!(csv, "0,0,0,0\n1,0,0,0\n0,0,1,0\n");
    }
}
