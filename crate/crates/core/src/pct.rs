//! Point-canonical-transformation engine.
//!
//! With `ψ(x) = f(x) F(g(x))` and `F'' + Q F' + R F = 0`, the Schrödinger
//! equation `-ψ'' + Vψ = Eψ` holds when
//!
//! ```text
//! E - V(x) = g'''/(2g') - (3/4)(g''/g')² + g'² (R - Q'/2 - Q²/4)
//! f(x)     = g'^{-1/2} exp(½ ∫ Q dg)
//! ```
//!
//! The engine evaluates both for the coordinate maps `¼(kx+d)²`,
//! `sin(kx+d)` and `cos(kx+d)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate, Quadrature};
use crate::xop::{x1_ode_coefficients, OdeCoefficients, X1Family};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    /// `g = ¼(kx+d)²`, satisfying `g'²/g = k²`
    Quadratic,
    /// `g = sin(kx+d)`, satisfying `g'²/(1-g²) = k²`
    Sine,
    /// `g = cos(kx+d)`, same constraint as the sine map
    Cosine,
}

/// Coordinate map `g(x)` with its analytic derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GMap {
    pub kind: MapKind,
    pub k: f64,
    /// Purely real or purely imaginary shift.
    pub d: Complex64,
}

impl GMap {
    pub fn new(kind: MapKind, k: f64, d: Complex64) -> Result<Self> {
        if k == 0.0 || !k.is_finite() {
            return Err(Error::Argument(format!("map scale k must be finite and nonzero, got {k}")));
        }
        if !(d.re.is_finite() && d.im.is_finite()) {
            return Err(Error::Argument(format!("shift d = {d} is not finite")));
        }
        if d.re != 0.0 && d.im != 0.0 {
            return Err(Error::Argument(format!(
                "shift d = {d} must be purely real or purely imaginary"
            )));
        }
        Ok(GMap { kind, k, d })
    }

    pub fn real_shift(kind: MapKind, k: f64, d: f64) -> Result<Self> {
        Self::new(kind, k, Complex64::new(d, 0.0))
    }

    pub fn imaginary_shift(kind: MapKind, k: f64, eps: f64) -> Result<Self> {
        Self::new(kind, k, Complex64::new(0.0, eps))
    }

    /// `[g, g', g'', g''']` at `x`.
    pub fn derivs(&self, x: f64) -> [Complex64; 4] {
        self.derivs_complex(Complex64::new(x, 0.0))
    }

    pub fn derivs_complex(&self, x: Complex64) -> [Complex64; 4] {
        let k = self.k;
        let u = k * x + self.d;
        match self.kind {
            MapKind::Quadratic => [
                0.25 * u * u,
                0.5 * k * u,
                Complex64::new(0.5 * k * k, 0.0),
                Complex64::new(0.0, 0.0),
            ],
            MapKind::Sine => {
                let (s, c) = (u.sin(), u.cos());
                [s, k * c, -k * k * s, -k * k * k * c]
            }
            MapKind::Cosine => {
                let (s, c) = (u.sin(), u.cos());
                [c, -k * s, -k * k * c, k * k * k * s]
            }
        }
    }

    pub fn g(&self, x: f64) -> Complex64 {
        self.derivs(x)[0]
    }

    /// `g'²/g - k²` (quadratic) or `g'²/(1-g²) - k²` (trigonometric).
    pub fn constraint_residual(&self, x: f64) -> Complex64 {
        let [g, g1, _, _] = self.derivs(x);
        let k2 = self.k * self.k;
        match self.kind {
            MapKind::Quadratic => g1 * g1 / g - k2,
            MapKind::Sine | MapKind::Cosine => g1 * g1 / (1.0 - g * g) - k2,
        }
    }

    /// Reference point of `∫ Q dg` for the wavefunction prefactor.
    fn reference_g(&self) -> f64 {
        match self.kind {
            MapKind::Quadratic => 1.0,
            MapKind::Sine | MapKind::Cosine => 0.0,
        }
    }

    /// `E - V` written through `g` alone, using the map's constraint to
    /// eliminate `x`.
    fn e_minus_v_of_g(&self, ode: &OdeCoefficients, g: Complex64) -> Complex64 {
        let k2 = self.k * self.k;
        let (g1_sq, ratio2_sq, ratio3) = match self.kind {
            MapKind::Quadratic => (k2 * g, k2 / (4.0 * g), Complex64::new(0.0, 0.0)),
            MapKind::Sine | MapKind::Cosine => {
                let one_m = 1.0 - g * g;
                (k2 * one_m, k2 * g * g / one_m, Complex64::new(-k2, 0.0))
            }
        };
        let q = ode.q(g);
        0.5 * ratio3 - 0.75 * ratio2_sq + g1_sq * (ode.r(g) - 0.5 * ode.dq(g) - 0.25 * q * q)
    }
}

fn check_regular(ode: &OdeCoefficients, g: Complex64, g1: Complex64, x: f64) -> Result<()> {
    if g1.norm() <= 1e-14 * (1.0 + g.norm()) {
        return Err(Error::Singularity { x, what: "g'(x) vanishes".into() });
    }
    if ode.singular_distance(g) <= 1e-12 * (1.0 + g.norm()) {
        return Err(Error::Singularity { x, what: format!("g(x) = {g} is a singular point of the ODE") });
    }
    Ok(())
}

/// `E - V(x)` from the transformation identity.
pub fn pct_e_minus_v(gm: &GMap, ode: &OdeCoefficients, x: f64) -> Result<Complex64> {
    let [g, g1, g2, g3] = gm.derivs(x);
    check_regular(ode, g, g1, x)?;
    let q = ode.q(g);
    let ratio = g2 / g1;
    Ok(g3 / (2.0 * g1) - 0.75 * ratio * ratio + g1 * g1 * (ode.r(g) - 0.5 * ode.dq(g) - 0.25 * q * q))
}

/// Prefactor `f(x) = g'^{-1/2} exp(½ ∫_{g0}^{g(x)} Q dg)`, up to a constant.
///
/// `g0` is 1 for the quadratic map and 0 for the trigonometric maps. Without
/// a supplied antiderivative the integral runs along the straight segment
/// from `g0` to `g(x)`; a segment passing through an ODE singularity is an
/// error. Different paths can change the phase of the result but not its
/// modulus, since every residue of `Q` is real.
pub fn pct_wavefactor(
    gm: &GMap,
    ode: &OdeCoefficients,
    x: f64,
    antiderivative_of_q: Option<&dyn Fn(Complex64) -> Complex64>,
) -> Result<Complex64> {
    let [g, g1, _, _] = gm.derivs(x);
    check_regular(ode, g, g1, x)?;
    let g0 = Complex64::new(gm.reference_g(), 0.0);
    let integral = match antiderivative_of_q {
        Some(anti) => anti(g) - anti(g0),
        None => {
            let seg = g - g0;
            for s in ode.singular_points() {
                if segment_distance(g0, g, Complex64::new(s, 0.0)) <= 1e-10 * (1.0 + s.abs()) {
                    return Err(Error::Singularity {
                        x,
                        what: format!("integration path from {g0} to {g} crosses singular point {s}"),
                    });
                }
            }
            let q = Quadrature::finite(0.0, 1.0).with_tolerance(1e-12);
            integrate(|t: f64| ode.q(g0 + t * seg) * seg, &q)?
        }
    };
    Ok((0.5 * integral).exp() / g1.sqrt())
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * ab.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (a + t * ab - p).norm()
}

/// Number of points on the gauge contour.
const GAUGE_POINTS: usize = 128;

/// Energy in the gauge where `V` has no constant term as `g → ∞`: the
/// constant Laurent coefficient of `E - V` at infinity, taken as the mean of
/// `E - V` over a circle enclosing every singular point.
pub fn gauge_energy(gm: &GMap, ode: &OdeCoefficients) -> Complex64 {
    let reach = ode
        .singular_points()
        .iter()
        .fold(1.0_f64, |m, s| m.max(s.abs()));
    let radius = 4.0 * (1.0 + reach);
    let sum: Complex64 = (0..GAUGE_POINTS)
        .map(|j| {
            let theta = 2.0 * PI * (j as f64 + 0.5) / GAUGE_POINTS as f64;
            gm.e_minus_v_of_g(ode, Complex64::from_polar(radius, theta))
        })
        .sum();
    sum / GAUGE_POINTS as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialExtraction {
    pub grid: Vec<f64>,
    pub v: Vec<Complex64>,
    pub e1: Complex64,
    pub e2: Complex64,
}

/// Relative tolerance on the x-independence of `W_{n1} - W_{n2}`.
const CONSISTENCY_TOL: f64 = 1e-9;

/// Separates `E - V(x)` into energies and potential using two levels.
///
/// The energies come from [`gauge_energy`]; `V(x) = E_{n1} - W_{n1}(x)`.
/// Fails with a consistency error when `W_{n1} - W_{n2}` is not the constant
/// `E_{n1} - E_{n2}` over the grid, which happens when the map does not fit
/// the ODE.
pub fn pct_extract_potential(
    gm: &GMap,
    family: X1Family,
    n_pair: (usize, usize),
    grid: &[f64],
) -> Result<PotentialExtraction> {
    let (n1, n2) = n_pair;
    if n1 == n2 {
        return Err(Error::Argument(format!("levels must differ, got n1 = n2 = {n1}")));
    }
    let ode1 = x1_ode_coefficients(family, n1)?;
    let ode2 = x1_ode_coefficients(family, n2)?;
    let e1 = gauge_energy(gm, &ode1);
    let e2 = gauge_energy(gm, &ode2);
    let gap = e1 - e2;

    let mut v = Vec::with_capacity(grid.len());
    for &x in grid {
        let w1 = pct_e_minus_v(gm, &ode1, x)?;
        let w2 = pct_e_minus_v(gm, &ode2, x)?;
        let drift = (w1 - w2 - gap).norm();
        let tol = CONSISTENCY_TOL * gap.norm() + 1e-13 * w1.norm().max(w2.norm());
        if drift > tol {
            return Err(Error::Consistency(format!(
                "W_{n1} - W_{n2} at x = {x} differs from E_{n1} - E_{n2} = {gap} by {drift:e}; \
                 the n dependence does not separate into a constant energy for this map"
            )));
        }
        v.push(e1 - w1);
    }
    Ok(PotentialExtraction { grid: grid.to_vec(), v, e1, e2 })
}
