//! Closed-form rationally extended potentials, energies and bound states.
//!
//! Two families are covered, each in Hermitian form (`eps = 0`) and in the
//! complex-shifted form obtained by `kx → kx + iε`:
//!
//! * radial oscillator: `V = k⁴x²/16 + (a²-¼)/x² + 4k²/(k²x²+4a) - 32ak²/(k²x²+4a)²`,
//!   `E_n = k²(2n+a-1)/2`;
//! * trigonometric Scarf: with `s = sin kx`, `D = a+b-(b-a)s`,
//!   `V = k²(2a²+2b²-1)/4·sec² - k²(b²-a²)/2·sec·tan + 2k²(a+b)/D - 8k²ab/D²`,
//!   `E_n = (k²/4)(2n+a+b-1)²`.
//!
//! The Scarf rational term `-8k²ab/D²` is the one the transformation engine
//! reproduces. The alternative form `2k²[(a-b)²-4ab]/D²` is off by
//! `2k²(a-b)²/D²` and does not satisfy the transformation identity.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate, Quadrature};
use crate::polycore::gamma;
use crate::polycore::Polynomial;
use crate::xop::{x1_polynomial, X1Family};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    RadialExtended,
    ScarfExtended,
}

/// Which trigonometric map the Scarf family uses; `Cos` evaluates the sine
/// form at `kx + π/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Branch {
    #[default]
    Sin,
    Cos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialModel {
    pub family: Family,
    pub a: f64,
    /// Unused by the radial family.
    pub b: f64,
    pub k: f64,
    /// Imaginary shift `ε`; zero gives the Hermitian potential.
    pub eps: f64,
    /// Unused by the radial family.
    pub branch: Branch,
}

/// One violated parameter constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub constraint: String,
    pub reason: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.constraint, self.reason)
    }
}

impl PotentialModel {
    pub fn radial(a: f64, k: f64, eps: f64) -> Result<Self> {
        Self::checked(PotentialModel { family: Family::RadialExtended, a, b: 0.0, k, eps, branch: Branch::Sin })
    }

    pub fn scarf(a: f64, b: f64, k: f64, eps: f64, branch: Branch) -> Result<Self> {
        Self::checked(PotentialModel { family: Family::ScarfExtended, a, b, k, eps, branch })
    }

    fn checked(m: Self) -> Result<Self> {
        validate_params(&m).map_err(|diags| {
            Error::Argument(diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
        })?;
        Ok(m)
    }

    /// Same model with a different shift.
    pub fn with_eps(&self, eps: f64) -> Self {
        PotentialModel { eps, ..*self }
    }

    pub fn hermitian(&self) -> Self {
        self.with_eps(0.0)
    }

    /// Interval on which the Hermitian potential is regular and its states
    /// are normalizable.
    pub fn hermitian_domain(&self) -> (f64, f64) {
        let k = self.k.abs();
        match (self.family, self.branch) {
            (Family::RadialExtended, _) => (0.0, f64::INFINITY),
            (Family::ScarfExtended, Branch::Sin) => (-FRAC_PI_2 / k, FRAC_PI_2 / k),
            (Family::ScarfExtended, Branch::Cos) => {
                let end = PI / self.k;
                (end.min(0.0), end.max(0.0))
            }
        }
    }

    pub fn x1_family(&self) -> X1Family {
        match self.family {
            Family::RadialExtended => X1Family::Laguerre { a: self.a },
            Family::ScarfExtended => X1Family::Jacobi { a: self.a, b: self.b },
        }
    }

    /// Trigonometric argument `kx + iε` (plus `π/2` on the cos branch).
    fn scarf_argument(&self, x: Complex64) -> Complex64 {
        let u = self.k * x + I * self.eps;
        match self.branch {
            Branch::Sin => u,
            Branch::Cos => u + FRAC_PI_2,
        }
    }
}

/// Checks the parameter constraints and singularity guards, returning every
/// violation.
pub fn validate_params(m: &PotentialModel) -> std::result::Result<(), Vec<Diagnostic>> {
    let mut out = Vec::new();
    let mut push = |constraint: &str, reason: String| {
        out.push(Diagnostic { constraint: constraint.to_string(), reason })
    };
    for (name, v) in [("a", m.a), ("b", m.b), ("k", m.k), ("eps", m.eps)] {
        if !v.is_finite() {
            push("finite", format!("{name} = {v} is not finite"));
        }
    }
    if m.k == 0.0 {
        push("k != 0", "the scale k must be nonzero".into());
    }
    match m.family {
        Family::RadialExtended => {
            if !(m.a > 0.0) {
                push("a > 0", format!("a = {} must be positive", m.a));
            }
            if m.eps != 0.0 && m.a > 0.0 {
                let e2 = m.eps * m.eps;
                if (e2 - 4.0 * m.a).abs() <= 1e-12 * e2.max(1.0) {
                    push(
                        "eps^2 != 4a",
                        format!("eps^2 = 4a = {} puts a pole of the shifted potential at x = 0", 4.0 * m.a),
                    );
                }
            }
        }
        Family::ScarfExtended => {
            if !(m.a > -0.5) {
                push("a > -1/2", format!("a = {} gives non-normalizable states", m.a));
            }
            if !(m.b > -0.5) {
                push("b > -1/2", format!("b = {} gives non-normalizable states", m.b));
            }
            if m.a == m.b {
                push("a != b", format!("a = b = {} makes the extension degenerate", m.a));
            } else if !(m.a * m.b > 0.0) {
                push(
                    "a*b > 0",
                    format!(
                        "a = {}, b = {}: a+b-(b-a)sin kx vanishes on the Hermitian interval",
                        m.a, m.b
                    ),
                );
            } else if m.eps != 0.0 {
                let r = (m.a + m.b).abs() / (m.b - m.a).abs();
                if (m.eps.cosh() - r).abs() <= 1e-12 * r {
                    push(
                        "cosh(eps) != |a+b|/|b-a|",
                        format!("cosh(eps) = {r} puts a pole of the shifted potential on the real line"),
                    );
                }
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// `E_n`; independent of `eps`.
pub fn energy(m: &PotentialModel, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::Argument("level index n must be at least 1".into()));
    }
    let (a, k2, n) = (m.a, m.k * m.k, n as f64);
    Ok(match m.family {
        Family::RadialExtended => k2 * (2.0 * n + a - 1.0) / 2.0,
        Family::ScarfExtended => {
            let t = 2.0 * n + a + m.b - 1.0;
            k2 / 4.0 * t * t
        }
    })
}

/// `Ṽ(x)` at real `x`.
pub fn potential(m: &PotentialModel, x: f64) -> Result<Complex64> {
    potential_complex(m, Complex64::new(x, 0.0))
}

/// `Ṽ` continued to complex `x`.
pub fn potential_complex(m: &PotentialModel, x: Complex64) -> Result<Complex64> {
    let k2 = m.k * m.k;
    let v = match m.family {
        Family::RadialExtended => {
            let z = m.k * x + I * m.eps;
            let z2 = z * z;
            let den = z2 + 4.0 * m.a;
            if z2.norm() == 0.0 || den.norm() <= 1e-14 * (z2.norm() + 4.0 * m.a.abs()) {
                return Err(Error::Singularity { x: x.re, what: format!("radial potential pole at kx+iε = {z}") });
            }
            k2 * z2 / 16.0 + k2 * (m.a * m.a - 0.25) / z2 + 4.0 * k2 / den - 32.0 * m.a * k2 / (den * den)
        }
        Family::ScarfExtended => {
            let (a, b) = (m.a, m.b);
            let u = m.scarf_argument(x);
            let (s, c) = (u.sin(), u.cos());
            let c2 = c * c;
            let d = a + b - (b - a) * s;
            if c2.norm() <= 1e-28 {
                return Err(Error::Singularity { x: x.re, what: "sec(kx) diverges".into() });
            }
            if d.norm() <= 1e-14 * (a.abs() + b.abs()) {
                return Err(Error::Singularity { x: x.re, what: "a+b-(b-a)sin vanishes".into() });
            }
            k2 * (2.0 * a * a + 2.0 * b * b - 1.0) / 4.0 / c2 - k2 * (b * b - a * a) / 2.0 * s / c2
                + 2.0 * k2 * (a + b) / d
                - 8.0 * k2 * a * b / (d * d)
        }
    };
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Singularity { x: x.re, what: format!("potential evaluates to {v}") });
    }
    Ok(v)
}

/// Polynomial and normalization data shared by every evaluation of a level.
struct LevelData {
    poly: Polynomial,
    /// Multiplies the unnormalized state.
    norm: f64,
}

type LevelKey = (Family, usize, u64, u64);

fn level_cache() -> &'static Mutex<HashMap<LevelKey, Arc<LevelData>>> {
    static CACHE: OnceLock<Mutex<HashMap<LevelKey, Arc<LevelData>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Level data for unit `k`; the Scarf normalization scales as `√|k|`.
fn level_data(m: &PotentialModel, n: usize) -> Result<Arc<LevelData>> {
    let key = (m.family, n, m.a.to_bits(), m.b.to_bits());
    if let Some(d) = level_cache().lock().expect("level cache poisoned").get(&key) {
        return Ok(d.clone());
    }
    let poly = x1_polynomial(m.x1_family(), n)?;
    let norm = match m.family {
        Family::RadialExtended => {
            let (a, nf) = (m.a, n as f64);
            let fact = gamma(nf)?;
            let n2 = fact / (2f64.powf(2.0 * a - 3.0) * (a + nf) * gamma(a + nf - 1.0)?);
            n2.sqrt()
        }
        Family::ScarfExtended => {
            let q = Quadrature::finite(-FRAC_PI_2, FRAC_PI_2).with_tolerance(1e-13);
            let total = integrate(
                |u: f64| {
                    let s = u.sin();
                    let amp = scarf_envelope_real(m.a, m.b, s) * poly.eval(s);
                    amp * amp
                },
                &q,
            )?;
            1.0 / total.sqrt()
        }
    };
    let data = Arc::new(LevelData { poly, norm });
    // a concurrent miss computes the same value; the first insert wins
    let mut cache = level_cache().lock().expect("level cache poisoned");
    Ok(cache.entry(key).or_insert(data).clone())
}

fn scarf_envelope_real(a: f64, b: f64, s: f64) -> f64 {
    (1.0 - s).max(0.0).powf(a / 2.0 + 0.25) * (1.0 + s).max(0.0).powf(b / 2.0 + 0.25) / (a + b - (b - a) * s)
}

/// `ln sin w`, continuous off the real axis.
///
/// For `Im w ≠ 0` the expansion `sin w = ∓e^{∓iw}(1 - e^{±2iw})/(2i)` has
/// `|e^{±2iw}| < 1`, so the remaining logarithm never meets its cut. This
/// agrees with the principal logarithm wherever `Re sin w > 0`.
fn ln_sin(w: Complex64) -> Option<Complex64> {
    if w.im > 0.0 {
        Some(-I * w - Complex64::new(LN_2, -FRAC_PI_2) + (1.0 - (2.0 * I * w).exp()).ln())
    } else if w.im < 0.0 {
        Some(I * w - Complex64::new(LN_2, FRAC_PI_2) + (1.0 - (-2.0 * I * w).exp()).ln())
    } else {
        let s = w.re.sin();
        (s > 0.0).then(|| Complex64::new(s.ln(), 0.0))
    }
}

/// Normalized `ψ̃_n(x)` at real `x`.
pub fn wavefunction(m: &PotentialModel, n: usize, x: f64) -> Result<Complex64> {
    wavefunction_complex(m, n, Complex64::new(x, 0.0))
}

/// `ψ̃_n` continued to complex `x`; `ψ̃_n(x) = ψ_n(x + iε/k)`.
pub fn wavefunction_complex(m: &PotentialModel, n: usize, x: Complex64) -> Result<Complex64> {
    if n < 1 {
        return Err(Error::Argument("level index n must be at least 1".into()));
    }
    let data = level_data(m, n)?;
    let (a, b, k) = (m.a, m.b, m.k);
    match m.family {
        Family::RadialExtended => {
            let xi = x + I * (m.eps / k);
            if xi.im == 0.0 && xi.re <= 0.0 {
                if xi.re == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                return Err(Error::Domain(format!(
                    "x = {} lies outside the Hermitian radial domain x > 0",
                    xi.re
                )));
            }
            let t = k * k * xi * xi;
            let power = ((a + 0.5) * xi.ln()).exp();
            let norm = data.norm * k.abs().powf(a + 1.0);
            Ok(norm * power * (-t / 8.0).exp() * data.poly.eval(t / 4.0) / (t + 4.0 * a))
        }
        Family::ScarfExtended => {
            let u = k * x + I * m.eps;
            // 1 - s = 2 sin²α, 1 + s = 2 sin²β
            let (alpha, beta, s) = match m.branch {
                Branch::Sin => (FRAC_PI_4 - u / 2.0, FRAC_PI_4 + u / 2.0, u.sin()),
                Branch::Cos => (u / 2.0, FRAC_PI_2 - u / 2.0, u.cos()),
            };
            let outside = || {
                Error::Domain(format!(
                    "x = {} lies outside the Hermitian interval {:?}",
                    x.re,
                    m.hermitian_domain()
                ))
            };
            let la = ln_sin(alpha).ok_or_else(outside)?;
            let lb = ln_sin(beta).ok_or_else(outside)?;
            let (p, q) = (a / 2.0 + 0.25, b / 2.0 + 0.25);
            let envelope = (p * (LN_2 + 2.0 * la) + q * (LN_2 + 2.0 * lb)).exp();
            let d = a + b - (b - a) * s;
            let norm = data.norm * k.abs().sqrt();
            let psi = norm * envelope / d * data.poly.eval(s);
            if !(psi.re.is_finite() && psi.im.is_finite()) {
                return Err(Error::Singularity { x: x.re, what: format!("wavefunction evaluates to {psi}") });
            }
            Ok(psi)
        }
    }
}

/// `ρ = e^{(ε/k)p}`, `p = -i d/dx`, acting on analytic functions as the
/// coordinate shift `x ↦ x - iε/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftOperator {
    pub eps: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `ρ f ρ⁻¹ = f(x - iε/k)`
    Rho,
    /// `ρ⁻¹ f ρ = f(x + iε/k)`
    RhoInverse,
}

impl ShiftOperator {
    pub fn new(eps: f64, k: f64) -> Result<Self> {
        if k == 0.0 || !k.is_finite() || !eps.is_finite() {
            return Err(Error::Argument(format!("shift needs finite eps and nonzero k, got eps = {eps}, k = {k}")));
        }
        Ok(ShiftOperator { eps, k })
    }

    pub fn for_model(m: &PotentialModel) -> Result<Self> {
        Self::new(m.eps, m.k)
    }

    /// Signed imaginary displacement applied to the argument.
    pub fn offset(&self, dir: Direction) -> Complex64 {
        let step = self.eps / self.k;
        match dir {
            Direction::Rho => Complex64::new(0.0, -step),
            Direction::RhoInverse => Complex64::new(0.0, step),
        }
    }
}

/// `x ↦ f(x ∓ iε/k)`.
pub fn apply_rho_shift<T, F>(s: &ShiftOperator, f: F, dir: Direction) -> impl Fn(Complex64) -> T
where
    F: Fn(Complex64) -> T,
{
    let off = s.offset(dir);
    move |x| f(x + off)
}

/// Largest pointwise deviation and the magnitude it is measured against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub max_abs: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_abs / self.scale
        } else {
            self.max_abs
        }
    }
}

fn residual_over<F, G>(grid: &[f64], lhs: F, rhs: G) -> Result<Residual>
where
    F: Fn(f64) -> Result<Complex64>,
    G: Fn(f64) -> Result<Complex64>,
{
    let mut res = Residual { max_abs: 0.0, scale: 0.0 };
    for &x in grid {
        let (l, r) = (lhs(x)?, rhs(x)?);
        res.max_abs = res.max_abs.max((l - r).norm());
        res.scale = res.scale.max(r.norm());
    }
    Ok(res)
}

/// `max |Ṽ(x - iε/k) - V(x)|`, scaled by `max |V|`.
pub fn quasi_hermiticity_residual(m: &PotentialModel, grid: &[f64]) -> Result<Residual> {
    quasi_hermiticity_residual_with_shift(m, m.eps, grid)
}

/// As [`quasi_hermiticity_residual`] but undoing a shift of `shift_eps`
/// instead of the model's own.
pub fn quasi_hermiticity_residual_with_shift(m: &PotentialModel, shift_eps: f64, grid: &[f64]) -> Result<Residual> {
    let rho = ShiftOperator::new(shift_eps, m.k)?;
    let shifted = apply_rho_shift(&rho, |z| potential_complex(m, z), Direction::Rho);
    let plain = m.hermitian();
    residual_over(grid, |x| shifted(Complex64::new(x, 0.0)), |x| potential(&plain, x))
}

/// `max |Ṽ(x - 2iε/k) - conj Ṽ(x)|` (the action of `η = ρ²`), scaled by
/// `max |Ṽ|`.
pub fn pseudo_hermiticity_residual(m: &PotentialModel, grid: &[f64]) -> Result<Residual> {
    let eta = ShiftOperator::new(2.0 * m.eps, m.k)?;
    let shifted = apply_rho_shift(&eta, |z| potential_complex(m, z), Direction::Rho);
    residual_over(grid, |x| shifted(Complex64::new(x, 0.0)), |x| potential(m, x).map(|v| v.conj()))
}

/// `max |conj Ṽ(-x) - Ṽ(x)|`, scaled by `max |Ṽ|`.
pub fn pt_symmetry_residual(m: &PotentialModel, grid: &[f64]) -> Result<Residual> {
    residual_over(grid, |x| potential(m, -x).map(|v| v.conj()), |x| potential(m, x))
}
