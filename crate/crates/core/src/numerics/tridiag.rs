//! Finite-difference Hamiltonians `-d²/dx² + V` and their eigenvalues.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::{potential, Branch, Family, PotentialModel};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Second-order stencil on interior points `x_i = lo + i h`, `i = 1..=N`,
/// with Dirichlet ends. Complex symmetric: the off-diagonal is shared by both
/// sides and is not conjugated.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub diagonal: Vec<Complex64>,
    pub off_diagonal: Vec<Complex64>,
    pub h: f64,
    pub x_grid: Vec<f64>,
}

impl TridiagonalOperator {
    /// Builds an operator from explicit entries; used for tests and small
    /// matrices.
    pub fn from_entries(diagonal: Vec<Complex64>, off_diagonal: Vec<Complex64>) -> Result<Self> {
        let n = diagonal.len();
        if n == 0 || off_diagonal.len() + 1 != n {
            return Err(Error::Argument(format!(
                "need N >= 1 diagonal and N-1 off-diagonal entries, got {} and {}",
                n,
                off_diagonal.len()
            )));
        }
        Ok(TridiagonalOperator { diagonal, off_diagonal, h: f64::NAN, x_grid: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.diagonal.iter().chain(&self.off_diagonal).all(|z| z.im == 0.0)
    }

    /// Infinity norm.
    pub fn norm(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let left = if i > 0 { self.off_diagonal[i - 1].norm() } else { 0.0 };
                let right = self.off_diagonal.get(i).map_or(0.0, |z| z.norm());
                self.diagonal[i].norm() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diagonal[i] * v[i];
                if i > 0 {
                    acc += self.off_diagonal[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.off_diagonal[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }
}

/// Discretizes `-d²/dx² + v(x)` on `(lo, hi)` with `n >= 100` interior points.
pub fn discretize_fn<F>(v: F, lo: f64, hi: f64, n: usize) -> Result<TridiagonalOperator>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if n < 100 {
        return Err(Error::Argument(format!("grid needs at least 100 interior points, got {n}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Argument(format!("invalid interval ({lo}, {hi})")));
    }
    let h = (hi - lo) / (n + 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let x_grid: Vec<f64> = (1..=n).map(|i| lo + i as f64 * h).collect();
    let diagonal = x_grid.iter().map(|&x| Ok(v(x)? + 2.0 * inv_h2)).collect::<Result<Vec<_>>>()?;
    let off_diagonal = vec![Complex64::new(-inv_h2, 0.0); n - 1];
    Ok(TridiagonalOperator { diagonal, off_diagonal, h, x_grid })
}

/// Discretizes a model's potential, rejecting intervals that contain a pole
/// of the Hermitian potential.
pub fn discretize(m: &PotentialModel, lo: f64, hi: f64, n: usize) -> Result<TridiagonalOperator> {
    if m.eps == 0.0 {
        if let Some(x) = hermitian_pole_in(m, lo, hi) {
            return Err(Error::Singularity { x, what: format!("potential pole inside ({lo}, {hi})") });
        }
    }
    discretize_fn(|x| potential(m, x), lo, hi, n)
}

fn hermitian_pole_in(m: &PotentialModel, lo: f64, hi: f64) -> Option<f64> {
    match m.family {
        Family::RadialExtended => (lo < 0.0 && hi > 0.0).then_some(0.0),
        Family::ScarfExtended => {
            // cos(kx + phase) = 0 at kx = π/2 - phase + jπ
            let phase = match m.branch {
                Branch::Sin => 0.0,
                Branch::Cos => FRAC_PI_2,
            };
            let (ulo, uhi) = {
                let (p, q) = (m.k * lo + phase, m.k * hi + phase);
                (p.min(q), p.max(q))
            };
            let j = ((ulo - FRAC_PI_2) / PI).floor() + 1.0;
            let u = FRAC_PI_2 + j * PI;
            (u < uhi).then(|| (u - phase) / m.k)
        }
    }
}

/// Number of eigenvalues below `x` of the real symmetric tridiagonal matrix.
fn sturm_count(d: &[f64], e2: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    for i in 0..d.len() {
        if i > 0 {
            q = d[i] - x - e2[i - 1] / q;
        }
        if q.abs() <= pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `m` smallest eigenvalues of a real operator, by Sturm bisection to
/// near machine precision.
pub fn lowest_eigenvalues(t: &TridiagonalOperator, m: usize) -> Result<Vec<f64>> {
    if !t.is_real() {
        return Err(Error::Type("operator has complex entries; use eigen_near_shift".into()));
    }
    let n = t.len();
    if m > n {
        return Err(Error::Argument(format!("asked for {m} eigenvalues of a {n}x{n} operator")));
    }
    let d: Vec<f64> = t.diagonal.iter().map(|z| z.re).collect();
    let e: Vec<f64> = t.off_diagonal.iter().map(|z| z.re).collect();
    let e2: Vec<f64> = e.iter().map(|x| x * x).collect();
    let pivmin = f64::MIN_POSITIVE * e2.iter().fold(1.0_f64, |a, &b| a.max(b));

    let mut glo = f64::INFINITY;
    let mut ghi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + e.get(i).map_or(0.0, |x| x.abs());
        glo = glo.min(d[i] - r);
        ghi = ghi.max(d[i] + r);
    }
    let pad = f64::EPSILON * n as f64 * glo.abs().max(ghi.abs()).max(1.0);
    let (glo, ghi) = (glo - pad, ghi + pad);

    let mut out = Vec::with_capacity(m);
    let mut lower = glo;
    for idx in 0..m {
        let (mut lo, mut hi) = (lower, ghi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + pivmin || mid == lo || mid == hi {
                break;
            }
            if sturm_count(&d, &e2, mid, pivmin) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let value = 0.5 * (lo + hi);
        out.push(value);
        lower = lo;
    }
    Ok(out)
}

/// `T - σ` factored with partial pivoting between neighbouring rows.
struct ShiftedLu {
    dl: Vec<Complex64>,
    d: Vec<Complex64>,
    du: Vec<Complex64>,
    du2: Vec<Complex64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &TridiagonalOperator, sigma: Complex64) -> Option<Self> {
        let n = t.len();
        let mut d: Vec<Complex64> = t.diagonal.iter().map(|z| z - sigma).collect();
        let mut dl = t.off_diagonal.clone();
        let mut du = t.off_diagonal.clone();
        let mut du2 = vec![ZERO; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i] == ZERO {
                    return None;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d.iter().any(|z| *z == ZERO || !(z.re.is_finite() && z.im.is_finite())) {
            return None;
        }
        Some(ShiftedLu { dl, d, du, du2, swapped })
    }

    fn solve(&self, b: &mut [Complex64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] = b[i + 1] - self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    /// `‖(T - λ)v‖ / ‖v‖`.
    pub residual: f64,
    pub iterations: usize,
    /// Shift actually used, after any perturbation.
    pub sigma: Complex64,
    /// Other Ritz value of the converged two-dimensional block, if any.
    pub partner: Option<Complex64>,
}

impl EigenPair {
    /// Mean of the two Ritz values. When the target is a defective
    /// eigenvalue, a perturbation of size δ splits it by O(√δ) while this
    /// mean moves only by O(δ).
    pub fn cluster_mean(&self) -> Complex64 {
        self.partner.map_or(self.value, |p| 0.5 * (self.value + p))
    }
}

/// Residual bound for accepting an eigenpair.
const EIGEN_TOL: f64 = 1e-8;

fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram-Schmidt; drops vectors that become dependent.
fn orthonormalize(block: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(block.len());
    for mut v in block {
        let before = norm(&v);
        for q in &out {
            let c = dot(q, &v);
            v.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
        }
        let after = norm(&v);
        if after > 1e-10 * before && after > 0.0 {
            v.iter_mut().for_each(|x| *x /= after);
            out.push(v);
        }
    }
    out
}

/// Eigenvalue of `T` nearest `sigma` by shift-invert iteration.
///
/// A block of two vectors is iterated and the eigenvalue is taken from the
/// Rayleigh-Ritz projection, which separates close pairs that defeat
/// single-vector iteration. A singular factorization is retried once with
/// `sigma` perturbed by `1e-8 (1 + |sigma|)`.
pub fn eigen_near_shift(t: &TridiagonalOperator, sigma: Complex64, iters: usize) -> Result<EigenPair> {
    let (lu, sigma) = match ShiftedLu::factor(t, sigma) {
        Some(lu) => (lu, sigma),
        None => {
            let nudged = sigma + 1e-8 * (1.0 + sigma.norm());
            let lu = ShiftedLu::factor(t, nudged).ok_or_else(|| {
                Error::Construction(format!("T - sigma is singular at sigma = {sigma} and at {nudged}"))
            })?;
            (lu, nudged)
        }
    };
    let n = t.len();
    let width = n.min(2);
    // fixed pseudo-random start block
    let mut state = 0x9e37_79b9_7f4a_7c15_u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut block: Vec<Vec<Complex64>> =
        (0..width).map(|_| (0..n).map(|_| Complex64::new(next(), next())).collect()).collect();

    let mut residual = f64::INFINITY;
    for it in 1..=iters {
        for v in block.iter_mut() {
            lu.solve(v);
        }
        block = orthonormalize(block);
        if block.is_empty() {
            return Err(Error::Construction("inverse iteration collapsed to zero".into()));
        }
        let images: Vec<Vec<Complex64>> = block.iter().map(|v| t.apply(v)).collect();
        let (lambda, partner, coeffs) = ritz_pair(&block, &images, sigma);
        let mut y = vec![ZERO; n];
        let mut ty = vec![ZERO; n];
        for (j, c) in coeffs.iter().enumerate() {
            for i in 0..n {
                y[i] += c * block[j][i];
                ty[i] += c * images[j][i];
            }
        }
        let r: Vec<Complex64> = ty.iter().zip(&y).map(|(a, b)| a - lambda * b).collect();
        residual = norm(&r) / norm(&y);
        if residual <= EIGEN_TOL {
            return Ok(EigenPair { value: lambda, residual, iterations: it, sigma, partner });
        }
    }
    Err(Error::Convergence { iters, residual })
}

/// Ritz value nearest `sigma` and its coefficients in the block basis.
fn ritz_pair(
    block: &[Vec<Complex64>],
    images: &[Vec<Complex64>],
    sigma: Complex64,
) -> (Complex64, Option<Complex64>, Vec<Complex64>) {
    let h = |i: usize, j: usize| dot(&block[i], &images[j]);
    if block.len() == 1 {
        return (h(0, 0), None, vec![Complex64::new(1.0, 0.0)]);
    }
    let (a, b, c, d) = (h(0, 0), h(0, 1), h(1, 0), h(1, 1));
    let half_tr = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * c).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    let (lambda, other) = if (l1 - sigma).norm() <= (l2 - sigma).norm() { (l1, l2) } else { (l2, l1) };
    // null vector of [[a-λ, b], [c, d-λ]] from the better-conditioned row
    let v1 = [b, lambda - a];
    let v2 = [lambda - d, c];
    let v = if v1[0].norm() + v1[1].norm() >= v2[0].norm() + v2[1].norm() { v1 } else { v2 };
    if v[0].norm() + v[1].norm() == 0.0 {
        return (lambda, Some(other), vec![Complex64::new(1.0, 0.0), ZERO]);
    }
    (lambda, Some(other), v.to_vec())
}
