use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::scalar::ComplexRational;
use crate::series::{PowerSeries, TailModel};
use crate::space::WeightSequence;

pub type C64 = Complex<f64>;

/// `S = M_z + f⊗g` on a diagonal-kernel space, with `f` and `g` polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    pub space: WeightSequence,
    pub f: PowerSeries,
    pub g: PowerSeries,
}

impl OperatorSpec {
    pub fn new(space: WeightSequence, f: PowerSeries, g: PowerSeries) -> Result<Self> {
        if !f.is_polynomial() || !g.is_polynomial() {
            return Err(Error::PreconditionViolation("f and g must be polynomials".into()));
        }
        Ok(OperatorSpec { space, f, g })
    }

    /// The unperturbed shift `M_z`.
    pub fn shift(space: WeightSequence) -> Self {
        OperatorSpec { space, f: PowerSeries::zero(), g: PowerSeries::zero() }
    }

    /// `M_z + f⊗(γ·1)`.
    pub fn with_constant(space: WeightSequence, f: PowerSeries, gamma: ComplexRational) -> Result<Self> {
        Self::new(space, f, PowerSeries::constant(gamma))
    }

    /// `⟨f, g⟩`.
    pub fn pairing(&self) -> ComplexRational {
        let len = self.f.prefix().len().min(self.g.prefix().len());
        self.space.inner(&self.f.coeffs(len), &self.g.coeffs(len))
    }

    /// `γ` when `g = γ·1`.
    pub fn constant_g(&self) -> Option<ComplexRational> {
        (self.g.degree().unwrap_or(0) == 0).then(|| self.g.coeff(0))
    }

    pub fn f_degree(&self) -> usize {
        self.f.degree().unwrap_or(0)
    }

    pub fn g_degree(&self) -> usize {
        self.g.degree().unwrap_or(0)
    }

    pub fn is_unperturbed(&self) -> bool {
        self.f.degree().is_none() || self.g.degree().is_none()
    }

    /// `f` in orthonormal coordinates `u_j = √a_j z^j`.
    pub fn f_orth(&self) -> Vec<C64> {
        orthonormal_coords(&self.f, &self.space, self.f_degree() + 1)
    }

    pub fn g_orth(&self) -> Vec<C64> {
        orthonormal_coords(&self.g, &self.space, self.g_degree() + 1)
    }

    /// Shift weights `w_0..w_{n−1}`.
    pub fn weights(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.space.shift_weight(j)).collect()
    }

    /// Rows of the exact rectangular truncation on `span_N`.
    pub fn rect_rows(&self, n: usize) -> usize {
        n + 1 + self.f_degree()
    }

    /// `S − λ` on `span_N` in orthonormal coordinates, `(N+1+deg f)×N`.
    pub fn rect_matrix(&self, lambda: C64, n: usize) -> DMatrix<C64> {
        let rows = self.rect_rows(n);
        let w = self.weights(n);
        let f = self.f_orth();
        let g = self.g_orth();
        let mut m = DMatrix::zeros(rows, n);
        for j in 0..n {
            m[(j, j)] -= lambda;
            m[(j + 1, j)] += C64::new(w[j], 0.0);
            if let Some(gj) = g.get(j) {
                for (i, fi) in f.iter().enumerate() {
                    m[(i, j)] += fi * gj.conj();
                }
            }
        }
        m
    }

    /// Square `N×N` truncation `P_N S P_N` in orthonormal coordinates.
    pub fn square_matrix(&self, n: usize) -> DMatrix<C64> {
        self.rect_matrix(C64::new(0.0, 0.0), n).rows(0, n).into_owned()
    }

    /// Float applicator for `S` in orthonormal coordinates.
    pub fn applicator(&self) -> Applicator {
        Applicator { w: Vec::new(), f: self.f_orth(), g: self.g_orth(), space: self.space.clone() }
    }
}

/// Applies `S` to orthonormal coordinate vectors without truncation.
#[derive(Clone, Debug)]
pub struct Applicator {
    w: Vec<f64>,
    f: Vec<C64>,
    g: Vec<C64>,
    space: WeightSequence,
}

impl Applicator {
    fn weight(&mut self, j: usize) -> f64 {
        while self.w.len() <= j {
            let k = self.w.len();
            self.w.push(self.space.shift_weight(k));
        }
        self.w[j]
    }

    /// `S x`; the output is long enough to hold the full image.
    pub fn apply(&mut self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); (x.len() + 1).max(self.f.len())];
        for (j, xj) in x.iter().enumerate() {
            out[j + 1] = xj * self.weight(j);
        }
        let ip: C64 = x.iter().zip(&self.g).map(|(a, b)| a * b.conj()).sum();
        if ip != C64::new(0.0, 0.0) {
            for (o, fj) in out.iter_mut().zip(&self.f) {
                *o += fj * ip;
            }
        }
        out
    }

    /// `(S − λ) x`.
    pub fn apply_shifted(&mut self, x: &[C64], lambda: C64) -> Vec<C64> {
        let mut out = self.apply(x);
        for (o, xj) in out.iter_mut().zip(x) {
            *o -= lambda * xj;
        }
        out
    }
}

/// First `len` orthonormal coordinates `ĥ(j)/√a_j`; the geometric tail is generated in floating point.
pub fn orthonormal_coords(h: &PowerSeries, space: &WeightSequence, len: usize) -> Vec<C64> {
    let prefix = h.prefix();
    let mut out: Vec<C64> = prefix.iter().take(len).map(ComplexRational::to_complex64).collect();
    if out.len() < len {
        match h.tail() {
            TailModel::Geometric { ratio, .. } => {
                let q = ratio.to_complex64();
                let mut cur = h.coeff(out.len()).to_complex64();
                while out.len() < len {
                    out.push(cur);
                    cur *= q;
                }
            }
            TailModel::None => out.resize(len, C64::new(0.0, 0.0)),
        }
    }
    for (j, v) in out.iter_mut().enumerate() {
        *v /= space.weight_f64(j).sqrt();
    }
    out
}

/// Monomial coefficients from orthonormal coordinates.
pub fn monomial_coords(x: &[C64], space: &WeightSequence) -> Vec<C64> {
    x.iter().enumerate().map(|(j, v)| v * space.weight_f64(j).sqrt()).collect()
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{named, SpaceKind};

    #[test]
    fn rect_matrix_matches_exact_operator() {
        let space = named(SpaceKind::Bergman);
        let f = PowerSeries::from_ints(&[2, -1, 3]);
        let g = PowerSeries::from_ints(&[1, 1]);
        let spec = OperatorSpec::new(space.clone(), f.clone(), g.clone()).unwrap();
        let n = 6;
        let float = spec.rect_matrix(C64::new(0.0, 0.0), n);
        let exact = crate::operators::perturbed_shift(&f, &g, &space, spec.rect_rows(n), n).to_orthonormal().to_float();
        assert!((float - exact).norm() < 1e-13);
    }

    #[test]
    fn applicator_agrees_with_matrix() {
        let space = named(SpaceKind::Dirichlet);
        let spec = OperatorSpec::with_constant(space, PowerSeries::from_ints(&[1, 0, -2]), ComplexRational::from_ratio(1, 3)).unwrap();
        let n = 7;
        let lambda = C64::new(0.3, -0.2);
        let m = spec.rect_matrix(lambda, n);
        let x: Vec<C64> = (0..n).map(|j| C64::new(j as f64 - 2.0, 0.5 * j as f64)).collect();
        let via_m = &m * nalgebra::DVector::from_column_slice(&x);
        let via_a = spec.applicator().apply_shifted(&x, lambda);
        for i in 0..m.nrows() {
            let a = via_a.get(i).copied().unwrap_or_default();
            assert!((via_m[i] - a).norm() < 1e-13);
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let space = named(SpaceKind::Bergman);
        let h = PowerSeries::from_ints(&[1, 2, 3]);
        let back = monomial_coords(&orthonormal_coords(&h, &space, 3), &space);
        for (j, v) in back.iter().enumerate() {
            assert!((v - h.coeff(j).to_complex64()).norm() < 1e-14);
        }
    }
}
