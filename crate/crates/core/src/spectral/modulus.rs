//! Injectivity modulus `m_N(λ) = σ_min((S − λ)|span_N)` and left-spectrum scans.
//!
//! `S − λ` restricted to `span_N` is an exact `(N+1+deg f)×N` matrix, so its Gram
//! matrix `B = A^H A` is Hermitian and banded. The smallest eigenvalue of `B` is
//! located by bisection on the inertia of `B − μI`, read off an `LDL^H`
//! factorization. The leading `N×N` block of `B` does not depend on the truncation
//! size, so counts (and therefore the moduli) are monotone in `N` in floating
//! point as well.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{OperatorSpec, C64};
use crate::scalar::rational_to_f64;

/// Relative width at which a full-precision bisection stops.
pub const FULL_PRECISION: f64 = 1e-15;
/// Bisection width used by grid scans.
pub const SCAN_PRECISION: f64 = 1e-10;

/// Square grid spec; points are `re_min + j·step` by `im_min + i·step`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub resolution: usize,
}

impl GridSpec {
    /// `[−R, R]²` with `resolution` points per side.
    pub fn centered(radius: f64, resolution: usize) -> Self {
        GridSpec { re_min: -radius, re_max: radius, im_min: -radius, im_max: radius, resolution }
    }

    pub fn re_step(&self) -> f64 {
        (self.re_max - self.re_min) / (self.resolution.max(2) - 1) as f64
    }

    pub fn im_step(&self) -> f64 {
        (self.im_max - self.im_min) / (self.resolution.max(2) - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.re_step().max(self.im_step())
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        self.resolution == 0
    }

    /// Row-major: index `i·resolution + j` is row `i` (imaginary part), column `j` (real part).
    pub fn point(&self, index: usize) -> C64 {
        let (i, j) = (index / self.resolution, index % self.resolution);
        C64::new(self.re_min + j as f64 * self.re_step(), self.im_min + i as f64 * self.im_step())
    }

    pub fn points(&self) -> Vec<C64> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralScan {
    pub grid: GridSpec,
    pub n: usize,
    pub tau: f64,
    pub modulus: Vec<f64>,
    pub mask: Vec<bool>,
}

impl SpectralScan {
    pub fn masked_points(&self) -> Vec<C64> {
        (0..self.grid.len()).filter(|&k| self.mask[k]).map(|k| self.grid.point(k)).collect()
    }

    /// CSV with header `re,im,modulus,in_left_spectrum`, rows in grid order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,modulus,in_left_spectrum\n");
        for k in 0..self.grid.len() {
            let p = self.grid.point(k);
            let _ = writeln!(out, "{},{},{:.12e},{}", p.re, p.im, self.modulus[k], u8::from(self.mask[k]));
        }
        out
    }
}

/// Gram matrix `A^H A` of `A = S − λ` on `span_N`, stored by lower band.
struct BandedGram {
    n: usize,
    b: usize,
    /// `band[j·(b+1) + k] = B_{j, j−k}`.
    band: Vec<C64>,
}

impl BandedGram {
    fn new(spec: &OperatorSpec, lambda: C64, n: usize) -> Self {
        let f = spec.f_orth();
        let g = spec.g_orth();
        let flen = if spec.is_unperturbed() { 0 } else { f.len() };
        let glen = if spec.is_unperturbed() { 0 } else { g.len() };
        // Columns beyond deg g touch rows {j, j+1} only; the head columns also touch rows 0..=deg f.
        let b = 1usize.max(flen.saturating_sub(1)).max(glen.saturating_sub(1));
        let w = spec.weights(n);

        // Columns touching the rank-one part, held densely.
        let head = glen.min(n);
        let head_cols = (head + b + 1).min(n);
        let head_rows = head_cols + 1 + flen;
        let mut dense = vec![C64::new(0.0, 0.0); head_cols * head_rows];
        for j in 0..head_cols {
            let col = &mut dense[j * head_rows..(j + 1) * head_rows];
            col[j] -= lambda;
            col[j + 1] += w[j];
            if j < glen {
                let gj = g[j].conj();
                for (i, fi) in f.iter().enumerate().take(flen) {
                    col[i] += fi * gj;
                }
            }
        }
        let dot = |i: usize, j: usize| -> C64 {
            let ci = &dense[i * head_rows..(i + 1) * head_rows];
            let cj = &dense[j * head_rows..(j + 1) * head_rows];
            ci.iter().zip(cj).map(|(x, y)| y.conj() * x).sum()
        };

        let mut band = vec![C64::new(0.0, 0.0); n * (b + 1)];
        for j in 0..n {
            for k in 0..=b.min(j) {
                let i = j - k;
                let v = if j < head || i < head {
                    dot(i, j)
                } else if k == 0 {
                    C64::new(lambda.norm_sqr() + w[j] * w[j], 0.0)
                } else if k == 1 {
                    -lambda.conj() * w[i]
                } else {
                    C64::new(0.0, 0.0)
                };
                band[j * (b + 1) + k] = v;
            }
        }
        BandedGram { n, b, band }
    }

    fn entry(&self, j: usize, k: usize) -> C64 {
        self.band[j * (self.b + 1) + k]
    }

    /// Number of eigenvalues of `B` below `mu`.
    fn count_below(&self, mu: f64, l: &mut [C64], d: &mut [f64]) -> usize {
        let (n, b) = (self.n, self.b);
        let pivmin = f64::MIN_POSITIVE / f64::EPSILON;
        if b == 1 {
            return self.sturm_count(mu, pivmin);
        }
        let mut negatives = 0;
        // l[i·(b+1) + k] = L_{i, i−k}
        for k in 0..n {
            let mut dk = self.entry(k, 0).re - mu;
            for t in 1..=b.min(k) {
                dk -= l[k * (b + 1) + t].norm_sqr() * d[k - t];
            }
            if dk.abs() < pivmin {
                dk = -pivmin;
            }
            d[k] = dk;
            if dk < 0.0 {
                negatives += 1;
            }
            for i in k + 1..=(k + b).min(n - 1) {
                let off = i - k;
                let mut v = self.entry(i, off);
                for t in 1..=b.min(k) {
                    let jj = k - t;
                    if i - jj > b {
                        break;
                    }
                    v -= l[i * (b + 1) + (i - jj)] * l[k * (b + 1) + t].conj() * d[jj];
                }
                l[i * (b + 1) + off] = v / dk;
            }
        }
        negatives
    }
}

const LANES: usize = 8;

impl BandedGram {
    /// Tridiagonal case for several shifts at once: does `B − μ_i` have a negative pivot?
    fn sturm_any_below(&self, mus: &[f64; LANES]) -> [bool; LANES] {
        let pivmin = f64::MIN_POSITIVE / f64::EPSILON;
        let mut prev = [1.0; LANES];
        let mut neg = [false; LANES];
        for k in 0..self.n {
            let diag = self.band[2 * k].re;
            let off = if k > 0 { self.band[2 * k + 1].norm_sqr() } else { 0.0 };
            for i in 0..LANES {
                let mut dk = diag - mus[i] - off / prev[i];
                if dk.abs() < pivmin {
                    dk = -pivmin;
                }
                neg[i] |= dk < 0.0;
                prev[i] = dk;
            }
        }
        neg
    }

    /// Tridiagonal case: the classical Sturm recurrence on `d_k`.
    fn sturm_count(&self, mu: f64, pivmin: f64) -> usize {
        let mut negatives = 0;
        let mut prev = 1.0;
        for k in 0..self.n {
            let mut dk = self.band[2 * k].re - mu;
            if k > 0 {
                dk -= self.band[2 * k + 1].norm_sqr() / prev;
            }
            if dk.abs() < pivmin {
                dk = -pivmin;
            }
            if dk < 0.0 {
                negatives += 1;
            }
            prev = dk;
        }
        negatives
    }
}

/// Upper bound on `‖S − λ‖²`, independent of the truncation size.
fn norm_bound_sq(spec: &OperatorSpec, lambda: C64) -> f64 {
    let w = rational_to_f64(spec.space.rho_max()).sqrt();
    let rank_one = if spec.is_unperturbed() {
        0.0
    } else {
        super::spec::vec_norm(&spec.f_orth()) * super::spec::vec_norm(&spec.g_orth())
    };
    let bound = w + lambda.norm() + rank_one;
    bound * bound * (1.0 + 1e-12) + 1e-300
}

/// `m_N(λ)` with bisection stopping at relative width `precision`.
pub fn injectivity_modulus_with(spec: &OperatorSpec, lambda: C64, n: usize, precision: f64) -> f64 {
    assert!(n >= 1, "truncation size must be positive");
    let gram = BandedGram::new(spec, lambda, n);
    let mut l = vec![C64::new(0.0, 0.0); n * (gram.b + 1)];
    let mut d = vec![0.0; n];
    let mut lo = 0.0;
    let mut hi = norm_bound_sq(spec, lambda);
    let width = hi * precision;
    // Multisection: LANES interior points per round share one pass over the matrix.
    while hi - lo > width {
        let step = (hi - lo) / (LANES + 1) as f64;
        let mus: [f64; LANES] = std::array::from_fn(|i| lo + step * (i + 1) as f64);
        let below = if gram.b == 1 {
            gram.sturm_any_below(&mus)
        } else {
            mus.map(|mu| gram.count_below(mu, &mut l, &mut d) > 0)
        };
        match below.iter().position(|&x| x) {
            Some(0) => hi = mus[0],
            Some(i) => {
                lo = mus[i - 1];
                hi = mus[i];
            }
            None => lo = mus[LANES - 1],
        }
    }
    (0.5 * (lo + hi)).sqrt()
}

/// Smallest singular value of `S − λ` on `span_N`: `inf ‖(S − λ)h‖` over unit `h ∈ span_N`.
pub fn injectivity_modulus(spec: &OperatorSpec, lambda: C64, n: usize) -> f64 {
    injectivity_modulus_with(spec, lambda, n, FULL_PRECISION)
}

/// Evaluates `m_N` over the grid in parallel and marks points with `m_N(λ) ≤ τ`.
pub fn left_spectrum_scan(spec: &OperatorSpec, grid: &GridSpec, n: usize, tau: f64) -> SpectralScan {
    let modulus: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| injectivity_modulus_with(spec, grid.point(k), n, SCAN_PRECISION))
        .collect();
    let mask = modulus.iter().map(|&m| m <= tau).collect();
    SpectralScan { grid: grid.clone(), n, tau, modulus, mask }
}

/// Default threshold `τ = 10/√N`.
pub fn default_tau(n: usize) -> f64 {
    10.0 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ComplexRational;
    use crate::series::PowerSeries;
    use crate::space::{named, SpaceKind};

    fn svd_min(spec: &OperatorSpec, lambda: C64, n: usize) -> f64 {
        spec.rect_matrix(lambda, n).singular_values().min()
    }

    #[test]
    fn agrees_with_dense_svd() {
        let cases = [
            (SpaceKind::Hardy, vec![2], 1),
            (SpaceKind::Bergman, vec![1, 1], 1),
            (SpaceKind::Dirichlet, vec![0, -1, 1], 1),
            (SpaceKind::Hardy, vec![1, 0, 0, 2], 2),
        ];
        for (kind, f, gamma) in cases {
            let spec = OperatorSpec::with_constant(named(kind), PowerSeries::from_ints(&f), ComplexRational::from_int(gamma)).unwrap();
            for lambda in [C64::new(0.0, 0.0), C64::new(0.9, 0.3), C64::new(-1.7, 0.0), C64::new(2.0, 0.0)] {
                let fast = injectivity_modulus(&spec, lambda, 40);
                let slow = svd_min(&spec, lambda, 40);
                // Bisection works on σ², so tiny moduli are only resolved to about √ε.
                assert!((fast * fast - slow * slow).abs() < 1e-13, "{kind} {f:?} λ={lambda}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn general_g_agrees_with_dense_svd() {
        let spec = OperatorSpec::new(named(SpaceKind::Bergman), PowerSeries::from_ints(&[1, 2]), PowerSeries::from_ints(&[0, 1, -1])).unwrap();
        for lambda in [C64::new(0.2, 0.1), C64::new(1.5, -0.5)] {
            let fast = injectivity_modulus(&spec, lambda, 30);
            let slow = svd_min(&spec, lambda, 30);
            assert!((fast * fast - slow * slow).abs() < 1e-13);
        }
    }

    #[test]
    fn hardy_shift_values() {
        let spec = OperatorSpec::shift(named(SpaceKind::Hardy));
        assert!((injectivity_modulus(&spec, C64::new(0.0, 0.0), 64) - 1.0).abs() < 1e-12);
        // |λ| − 1, approached from above like N⁻²
        assert!((injectivity_modulus(&spec, C64::new(2.0, 0.0), 512) - 1.0).abs() < 1e-4);
        let a = injectivity_modulus(&spec, C64::new(1.0, 0.0), 256);
        let b = injectivity_modulus(&spec, C64::new(1.0, 0.0), 512);
        assert!(b <= 0.05 && b < a);
    }

    #[test]
    fn grid_layout() {
        let g = GridSpec::centered(1.0, 5);
        assert_eq!(g.point(0), C64::new(-1.0, -1.0));
        assert_eq!(g.point(1), C64::new(-0.5, -1.0));
        assert_eq!(g.point(12), C64::new(0.0, 0.0));
        assert_eq!(g.len(), 25);
    }
}
