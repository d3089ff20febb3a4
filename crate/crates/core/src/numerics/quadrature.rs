//! Adaptive composite Gauss–Legendre quadrature on finite and semi-infinite
//! intervals.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be summed by a quadrature rule.
pub trait QuadValue: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
    fn describe(&self) -> String;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn describe(&self) -> String {
        format!("{self}")
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn describe(&self) -> String {
        format!("{self}")
    }
}

/// How the unit parameter interval is mapped onto the integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainMap {
    /// `x = lo + (hi - lo) t`
    Finite { lo: f64, hi: f64 },
    /// `x = lo - scale ln(1 - t)`, suited to exponentially decaying integrands
    SemiInfiniteExp { lo: f64, scale: f64 },
    /// `x = lo + scale t / (1 - t)`
    SemiInfiniteAlgebraic { lo: f64, scale: f64 },
}

impl DomainMap {
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            DomainMap::Finite { lo, hi } => (lo + (hi - lo) * t, hi - lo),
            DomainMap::SemiInfiniteExp { lo, scale } => {
                let u = 1.0 - t;
                (lo - scale * u.ln(), scale / u)
            }
            DomainMap::SemiInfiniteAlgebraic { lo, scale } => {
                let u = 1.0 - t;
                (lo + scale * t / u, scale / (u * u))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    /// Gauss–Legendre base nodes on `(-1, 1)`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain_map: DomainMap,
    pub rel_tol: f64,
    pub max_panels: usize,
}

const DEFAULT_ORDER: usize = 20;
const DEFAULT_REL_TOL: f64 = 1e-12;
const INITIAL_PANELS: usize = 8;

impl Quadrature {
    pub fn new(domain_map: DomainMap, order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Quadrature { nodes, weights, domain_map, rel_tol: DEFAULT_REL_TOL, max_panels: 4000 }
    }

    pub fn finite(lo: f64, hi: f64) -> Self {
        Self::new(DomainMap::Finite { lo, hi }, DEFAULT_ORDER)
    }

    pub fn semi_infinite_exp(lo: f64) -> Self {
        Self::new(DomainMap::SemiInfiniteExp { lo, scale: 2.0 }, DEFAULT_ORDER)
    }

    pub fn semi_infinite_algebraic(lo: f64) -> Self {
        Self::new(DomainMap::SemiInfiniteAlgebraic { lo, scale: 1.0 }, DEFAULT_ORDER)
    }

    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Base rule on the parameter panel `[t0, t1]`; returns the estimate and
    /// the integral of the magnitude.
    fn panel<T, F>(&self, f: &F, t0: f64, t1: f64) -> Result<(T, f64)>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        let half = 0.5 * (t1 - t0);
        let mid = 0.5 * (t1 + t0);
        let mut sum = T::zero();
        let mut abs = 0.0;
        for (node, w) in self.nodes.iter().zip(&self.weights) {
            let t = mid + half * node;
            let (x, jac) = self.domain_map.map(t);
            if !x.is_finite() {
                // node rounded onto the point at infinity
                continue;
            }
            let v = f(x);
            if !v.is_finite_value() {
                return Err(Error::Evaluation { x, value: v.describe() });
            }
            let term = v * (w * jac * half);
            abs += v.magnitude() * (w * jac * half).abs();
            sum = sum + term;
        }
        Ok((sum, abs))
    }
}

/// Gauss–Legendre nodes and weights of the given order on `(-1, 1)`, by
/// Newton iteration on `P_n`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

struct Panel<T> {
    t0: f64,
    t1: f64,
    est: T,
    abs: f64,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

impl Quadrature {
    /// Panel refined once: the two-half value, its magnitude integral and
    /// the change against the one-panel value `coarse`.
    fn refined_panel<T, F>(&self, f: &F, t0: f64, t1: f64, coarse: T) -> Result<Panel<T>>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        let tm = 0.5 * (t0 + t1);
        let (l, la) = self.panel(f, t0, tm)?;
        let (r, ra) = self.panel(f, tm, t1)?;
        let est = l + r;
        let err = (est + coarse * -1.0).magnitude();
        Ok(Panel { t0, t1, est, abs: la + ra, err })
    }
}

/// Adaptive composite quadrature of `f` over `q.domain_map`.
///
/// The panel whose one-level refinement moved the most is bisected until the
/// summed refinement changes fall below `rel_tol * ∫|f|`.
pub fn integrate<T, F>(f: F, q: &Quadrature) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let mut heap = std::collections::BinaryHeap::with_capacity(256);
    let width = 1.0 / INITIAL_PANELS as f64;
    for i in 0..INITIAL_PANELS {
        let (t0, t1) = (i as f64 * width, (i + 1) as f64 * width);
        let (coarse, _) = q.panel(&f, t0, t1)?;
        heap.push(q.refined_panel(&f, t0, t1, coarse)?);
    }

    let mut err_sum: f64 = heap.iter().map(|p: &Panel<T>| p.err).sum();
    let mut abs_sum: f64 = heap.iter().map(|p| p.abs).sum();
    loop {
        if err_sum <= q.rel_tol * abs_sum || err_sum <= 1e-300 {
            break;
        }
        if heap.len() >= q.max_panels {
            return Err(Error::Convergence { iters: heap.len(), residual: err_sum });
        }
        let worst = heap.pop().expect("panel heap is never empty");
        let tm = 0.5 * (worst.t0 + worst.t1);
        if tm <= worst.t0 || tm >= worst.t1 {
            return Err(Error::Convergence { iters: heap.len(), residual: err_sum });
        }
        let (l, _) = q.panel(&f, worst.t0, tm)?;
        let (r, _) = q.panel(&f, tm, worst.t1)?;
        let left = q.refined_panel(&f, worst.t0, tm, l)?;
        let right = q.refined_panel(&f, tm, worst.t1, r)?;
        err_sum += left.err + right.err - worst.err;
        abs_sum += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
        if heap.len() % 64 == 0 {
            // resum to keep drift out of the running totals
            err_sum = heap.iter().map(|p| p.err).sum();
            abs_sum = heap.iter().map(|p| p.abs).sum();
        }
    }
    Ok(heap.iter().fold(T::zero(), |acc, p| acc + p.est))
}
