//! X1 exceptional Laguerre and Jacobi polynomials built directly from their
//! second-order ODEs, plus the associated weights and Laguerre norms.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polycore::{classical_jacobi, gamma, Polynomial};

/// Singular values below this fraction of the largest count as zero.
const NULL_TOL: f64 = 1e-10;
/// Allowed size of the cleared ODE residual relative to its largest term.
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum X1Family {
    /// `L̂_n^(a)`, `a > 0`
    Laguerre { a: f64 },
    /// `P̂_n^(a,b)`, `a, b > -1`, `a != b`
    Jacobi { a: f64, b: f64 },
}

impl X1Family {
    pub fn laguerre(a: f64) -> Result<Self> {
        let fam = X1Family::Laguerre { a };
        fam.validate()?;
        Ok(fam)
    }

    pub fn jacobi(a: f64, b: f64) -> Result<Self> {
        let fam = X1Family::Jacobi { a, b };
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            X1Family::Laguerre { a } => {
                if !(a > 0.0) || !a.is_finite() {
                    return Err(Error::Argument(format!("X1 Laguerre needs a > 0, got {a}")));
                }
            }
            X1Family::Jacobi { a, b } => {
                if !(a > -1.0 && b > -1.0) || !a.is_finite() || !b.is_finite() {
                    return Err(Error::Argument(format!(
                        "X1 Jacobi needs a, b > -1, got a = {a}, b = {b}"
                    )));
                }
                if a == b {
                    return Err(Error::Argument(format!("X1 Jacobi needs a != b, got a = b = {a}")));
                }
            }
        }
        Ok(())
    }

    /// Polynomial coefficients `(A, B, C)` of the ODE with denominators
    /// cleared, `A y'' + B y' + C y = 0`.
    fn cleared_ode(&self, n: usize) -> [Polynomial; 3] {
        let nf = n as f64;
        match *self {
            X1Family::Laguerre { a } => {
                // multiply through by (x + a)
                let x_plus_a = Polynomial::linear(a, 1.0);
                let x = Polynomial::monomial(1.0, 1);
                let big_a = &x * &x_plus_a;
                let big_b = -&(&Polynomial::linear(-a, 1.0) * &Polynomial::linear(a + 1.0, 1.0));
                let big_c = &Polynomial::linear(-a, 1.0) + &x_plus_a.scale(nf - 1.0);
                [big_a, big_b, big_c]
            }
            X1Family::Jacobi { a, b } => {
                // multiply through by (1 - g²)((b - a) g - b - a)
                let one_minus_g2 = Polynomial::new(vec![1.0, 0.0, -1.0]);
                let d = Polynomial::linear(-(b + a), b - a);
                let big_a = &one_minus_g2 * &d;
                let q_num = Polynomial::linear(a - b, a + b + 2.0);
                let big_b = -&(&(&q_num * &d) + &one_minus_g2.scale(2.0 * (b - a)));
                let r_num = Polynomial::linear(-(nf + a + b) * (nf - 1.0), b - a);
                let big_c = -&(&(&r_num * &d) + &one_minus_g2.scale((a - b) * (a - b)));
                [big_a, big_b, big_c]
            }
        }
    }
}

/// Evaluators for `Q(g)`, `dQ/dg` and `R(g)` of the X1 ODE
/// `F'' + Q F' + R F = 0` at degree `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeCoefficients {
    pub family: X1Family,
    pub n: usize,
}

impl OdeCoefficients {
    pub fn q(&self, g: Complex64) -> Complex64 {
        match self.family {
            X1Family::Laguerre { a } => -(g - a) * (g + a + 1.0) / (g * (g + a)),
            X1Family::Jacobi { a, b } => {
                -((a + b + 2.0) * g + a - b) / (1.0 - g * g)
                    - 2.0 * (b - a) / ((b - a) * g - b - a)
            }
        }
    }

    pub fn dq(&self, g: Complex64) -> Complex64 {
        match self.family {
            // Q = -1 + (a+1)/g - 2/(g+a)
            X1Family::Laguerre { a } => -(a + 1.0) / (g * g) + 2.0 / ((g + a) * (g + a)),
            X1Family::Jacobi { a, b } => {
                let num = (a + b + 2.0) * g + a - b;
                let one_m = 1.0 - g * g;
                let d = (b - a) * g - b - a;
                -((a + b + 2.0) * one_m + 2.0 * g * num) / (one_m * one_m)
                    + 2.0 * (b - a) * (b - a) / (d * d)
            }
        }
    }

    pub fn r(&self, g: Complex64) -> Complex64 {
        let nf = self.n as f64;
        match self.family {
            X1Family::Laguerre { a } => (g - a) / (g * (g + a)) + (nf - 1.0) / g,
            X1Family::Jacobi { a, b } => {
                -((b - a) * g - (nf + a + b) * (nf - 1.0)) / (1.0 - g * g)
                    - (a - b) * (a - b) / ((b - a) * g - b - a)
            }
        }
    }

    /// Points in the g-plane where a denominator of Q or R vanishes.
    pub fn singular_points(&self) -> Vec<f64> {
        match self.family {
            X1Family::Laguerre { a } => vec![0.0, -a],
            X1Family::Jacobi { a, b } => vec![-1.0, 1.0, (a + b) / (b - a)],
        }
    }

    /// Distance from `g` to the nearest singular point.
    pub fn singular_distance(&self, g: Complex64) -> f64 {
        self.singular_points()
            .into_iter()
            .map(|s| (g - s).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn x1_ode_coefficients(family: X1Family, n: usize) -> Result<OdeCoefficients> {
    family.validate()?;
    if n == 0 {
        return Err(Error::Argument("X1 families start at degree 1".into()));
    }
    Ok(OdeCoefficients { family, n })
}

/// Applies the cleared ODE operator to `y`; the result vanishes for the X1
/// member of degree `n`. Also returns the largest coefficient among the three
/// separate terms, for relative comparisons.
pub fn cleared_ode_residual(family: X1Family, n: usize, y: &Polynomial) -> (Polynomial, f64) {
    let [big_a, big_b, big_c] = family.cleared_ode(n);
    let t2 = &big_a * &y.derivative().derivative();
    let t1 = &big_b * &y.derivative();
    let t0 = &big_c * y;
    let scale = t2.max_abs_coeff().max(t1.max_abs_coeff()).max(t0.max_abs_coeff());
    (&(&t2 + &t1) + &t0, scale)
}

fn leading_convention(family: X1Family, n: usize) -> Result<f64> {
    match family {
        X1Family::Laguerre { .. } => {
            let fact: f64 = (1..n).map(|i| i as f64).product();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            Ok(sign / fact)
        }
        X1Family::Jacobi { a, b } => Ok(-0.5 * classical_jacobi(n - 1, a, b)?.leading()),
    }
}

/// The degree-`n` X1 polynomial, obtained as the one-dimensional null space
/// of the cleared ODE acting on degree-`n` polynomials.
///
/// Scale: leading coefficient `(-1)^n/(n-1)!` for Laguerre and half the
/// negated leading coefficient of `P_{n-1}^(a,b)` for Jacobi. Both agree with
/// the familiar first members `L̂_1 = -x-a-1`, `L̂_2 = x² - a(a+2)`.
pub fn x1_polynomial(family: X1Family, n: usize) -> Result<Polynomial> {
    family.validate()?;
    if n == 0 {
        return Err(Error::Argument("X1 families start at degree 1".into()));
    }
    let cols: Vec<Polynomial> = (0..=n)
        .map(|j| cleared_ode_residual(family, n, &Polynomial::monomial(1.0, j)).0)
        .collect();
    let rows = cols.iter().map(|c| c.degree() + 1).max().unwrap_or(1);
    let mut m = DMatrix::<f64>::zeros(rows, n + 1);
    let mut col_scale = vec![1.0; n + 1];
    for (j, c) in cols.iter().enumerate() {
        let norm = c.coeffs().iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            col_scale[j] = 1.0 / norm;
        }
        for (i, v) in c.coeffs().iter().enumerate() {
            m[(i, j)] = v * col_scale[j];
        }
    }

    let svd = m.clone().svd(false, false);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    // a column of all zeros is an exact null direction that the SVD may
    // report without a matching small singular value in a short matrix
    let mut null_count = sv.iter().filter(|&&s| s <= NULL_TOL * smax).count();
    null_count += (n + 1).saturating_sub(sv.len());
    if null_count != 1 {
        return Err(Error::Construction(format!(
            "expected a one-dimensional null space for {family:?}, n = {n}, found dimension {null_count}"
        )));
    }
    // The null direction is fixed by pinning the leading coefficient and
    // solving the remaining columns in least squares.
    let lead = leading_convention(family, n)?;
    let mut reduced = m.columns(0, n).into_owned();
    let mut rhs = m.column(n) * (-lead / col_scale[n]);
    for i in 0..rows {
        let rn = reduced.row(i).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if rn > 0.0 {
            reduced.row_mut(i).scale_mut(1.0 / rn);
            rhs[i] /= rn;
        }
    }
    let sol = reduced
        .svd(true, true)
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Construction(format!("least-squares polish failed: {e}")))?;
    let mut coeffs: Vec<f64> = (0..n).map(|j| sol[j] * col_scale[j]).collect();
    coeffs.push(lead);
    let y = Polynomial::new(coeffs);

    let (resid, scale) = cleared_ode_residual(family, n, &y);
    if resid.max_abs_coeff() > RESIDUAL_TOL * scale {
        return Err(Error::Construction(format!(
            "cleared ODE residual {:e} exceeds tolerance for {family:?}, n = {n}",
            resid.max_abs_coeff() / scale
        )));
    }
    Ok(y)
}

/// Orthogonality weight of an X1 family on its natural interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct X1Weight {
    family: X1Family,
}

impl X1Weight {
    /// `(0, inf)` for Laguerre, `(-1, 1)` for Jacobi.
    pub fn domain(&self) -> (f64, f64) {
        match self.family {
            X1Family::Laguerre { .. } => (0.0, f64::INFINITY),
            X1Family::Jacobi { .. } => (-1.0, 1.0),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain(format!("weight evaluated at {x} outside [{lo}, {hi}]")));
        }
        match self.family {
            X1Family::Laguerre { a } => {
                if x == 0.0 {
                    return Ok(0.0);
                }
                Ok((-x).exp() * x.powf(a) / ((x + a) * (x + a)))
            }
            X1Family::Jacobi { a, b } => {
                let d = a + b - (b - a) * x;
                if d == 0.0 {
                    return Err(Error::Singularity { x, what: "pole of the Jacobi weight".into() });
                }
                Ok((1.0 - x).powf(a) * (1.0 + x).powf(b) / (d * d))
            }
        }
    }
}

/// Weight making the X1 family orthogonal.
///
/// Laguerre: `e^{-x} x^a / (x+a)^2` on `(0, inf)`.
///
/// Jacobi: the radial factor of the Scarf-type states is
/// `(1-s)^{a/2+1/4} (1+s)^{b/2+1/4} / (a+b-(b-a)s)` with `s = sin kx`. Squaring
/// and changing variables with `dx = ds / (k sqrt(1-s)(1+s))` leaves
/// `(1-u)^a (1+u)^b / (a+b-(b-a)u)^2` on `(-1, 1)` up to the constant `1/k`.
/// The pole `u = (a+b)/(b-a)` must lie outside `[-1, 1]`, which fails when `a`
/// and `b` have opposite signs.
pub fn x1_weight(family: X1Family) -> Result<X1Weight> {
    family.validate()?;
    if let X1Family::Jacobi { a, b } = family {
        let pole = (a + b) / (b - a);
        if pole.abs() <= 1.0 {
            return Err(Error::Domain(format!(
                "Jacobi weight pole at u = {pole} lies inside [-1, 1] for a = {a}, b = {b}"
            )));
        }
    }
    Ok(X1Weight { family })
}

/// `(a+n) Γ(a+n-1) / (n-1)!`, the squared norm of `L̂_n^(a)`.
pub fn x1_laguerre_norm(n: usize, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Argument("X1 Laguerre norms start at n = 1".into()));
    }
    if !(a > 0.0) {
        return Err(Error::Argument(format!("X1 Laguerre needs a > 0, got {a}")));
    }
    let fact: f64 = (1..n).map(|i| i as f64).product();
    Ok((a + n as f64) * gamma(a + n as f64 - 1.0)? / fact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{classical_laguerre, count_real_roots_in};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_coeffs(p: &Polynomial, expected: &[f64], tol: f64) {
        assert_eq!(p.coeffs().len(), expected.len(), "{p} vs {expected:?}");
        for (x, y) in p.coeffs().iter().zip(expected) {
            assert!((x - y).abs() <= tol, "{p} vs {expected:?}");
        }
    }

    #[test]
    fn ode_coefficient_examples() {
        let lag = x1_ode_coefficients(X1Family::Laguerre { a: 2.0 }, 3).unwrap();
        assert_eq!(lag.q(c(2.0)), c(0.0));
        assert!((lag.r(c(1.0)) - c(5.0 / 3.0)).norm() < 1e-15);
        assert_eq!(lag.singular_points(), vec![0.0, -2.0]);

        let jac = x1_ode_coefficients(X1Family::Jacobi { a: 1.75, b: 3.0 }, 1).unwrap();
        assert!((jac.q(c(0.0)) - c(1.25 + 2.5 / 4.75)).norm() < 1e-15);
        assert_eq!(jac.singular_points(), vec![-1.0, 1.0, 3.8]);

        assert!(matches!(
            x1_ode_coefficients(X1Family::Laguerre { a: 2.0 }, 0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn dq_matches_central_difference() {
        let fams = [X1Family::Laguerre { a: 2.0 }, X1Family::Jacobi { a: 1.75, b: 3.0 }];
        for fam in fams {
            let ode = x1_ode_coefficients(fam, 2).unwrap();
            for g in [-0.7, -0.3, 0.2, 0.55, 0.9, 1.7, 4.0] {
                let g = c(g);
                if ode.singular_distance(g) < 0.05 {
                    continue;
                }
                let h = 1e-6 * (1.0 + g.norm());
                let fd = (ode.q(g + h) - ode.q(g - h)) / (2.0 * h);
                let an = ode.dq(g);
                assert!((fd - an).norm() <= 1e-6 * an.norm().max(1.0), "{fam:?} g={g}");
            }
        }
    }

    #[test]
    fn laguerre_first_members() {
        for a in [0.5, 2.0] {
            let fam = X1Family::laguerre(a).unwrap();
            assert_coeffs(&x1_polynomial(fam, 1).unwrap(), &[-a - 1.0, -1.0], 1e-12);
            assert_coeffs(&x1_polynomial(fam, 2).unwrap(), &[-a * (a + 2.0), 0.0, 1.0], 1e-12);
        }
    }

    #[test]
    fn jacobi_first_members() {
        for (a, b) in [(1.75, 3.0), (0.5, 1.5)] {
            let fam = X1Family::jacobi(a, b).unwrap();
            let p1 = x1_polynomial(fam, 1).unwrap();
            assert_coeffs(&p1, &[-(2.0 + a + b) / (2.0 * (a - b)), -0.5], 1e-12);
            let p2 = x1_polynomial(fam, 2).unwrap();
            let expected = [
                -(a + b + 2.0) / 4.0,
                -(a * a + b * b + 2.0 * (a + b)) / (2.0 * (a - b)),
                -(a + b + 2.0) / 4.0,
            ];
            assert_coeffs(&p2, &expected, 1e-12);
        }
        let p1 = x1_polynomial(X1Family::jacobi(1.75, 3.0).unwrap(), 1).unwrap();
        assert!((p1.eval(0.0_f64) - 2.7).abs() < 1e-14);
    }

    #[test]
    fn laguerre_matches_classical_combination() {
        // independent route: L̂_n = -(x+a+1) L_{n-1}^(a) + L_{n-2}^(a)
        for a in [0.5, 2.0, 5.0] {
            for n in 1..=12 {
                let l1 = classical_laguerre(n - 1, a).unwrap();
                let mut expected = -&(&Polynomial::linear(a + 1.0, 1.0) * &l1);
                if n >= 2 {
                    expected = &expected + &classical_laguerre(n - 2, a).unwrap();
                }
                let got = x1_polynomial(X1Family::Laguerre { a }, n).unwrap();
                let scale = expected.max_abs_coeff();
                assert_coeffs(&got, expected.coeffs(), 1e-9 * scale);
            }
        }
    }

    #[test]
    fn degree_and_residual() {
        let fams = [
            X1Family::Laguerre { a: 0.5 },
            X1Family::Laguerre { a: 5.0 },
            X1Family::Jacobi { a: 1.75, b: 3.0 },
            X1Family::Jacobi { a: 0.5, b: 1.5 },
            X1Family::Jacobi { a: -0.4, b: -0.7 },
        ];
        for fam in fams {
            for n in 1..=10 {
                let y = x1_polynomial(fam, n).unwrap();
                assert_eq!(y.degree(), n);
                let (r, scale) = cleared_ode_residual(fam, n, &y);
                assert!(r.max_abs_coeff() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(X1Family::jacobi(1.0, 1.0), Err(Error::Argument(_))));
        assert!(matches!(X1Family::laguerre(0.0), Err(Error::Argument(_))));
        assert!(matches!(
            x1_polynomial(X1Family::Jacobi { a: 1.0, b: 1.0 }, 2),
            Err(Error::Argument(_))
        ));
        assert!(matches!(x1_polynomial(X1Family::Laguerre { a: 1.0 }, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn laguerre_zero_structure() {
        for a in [0.5, 2.0, 5.0] {
            for n in 1..=8 {
                let y = x1_polynomial(X1Family::Laguerre { a }, n).unwrap();
                assert_eq!(count_real_roots_in(&y, f64::NEG_INFINITY, -a).unwrap(), 1);
                assert_eq!(count_real_roots_in(&y, 0.0, f64::INFINITY).unwrap(), n - 1);
                assert_eq!(count_real_roots_in(&y, -a, 0.0).unwrap(), 0);
            }
        }
    }

    #[test]
    fn jacobi_zero_structure() {
        // n-1 zeros inside (-1, 1), the remaining one outside
        for (a, b) in [(1.75, 3.0), (0.5, 1.5)] {
            for n in 1..=8 {
                let y = x1_polynomial(X1Family::Jacobi { a, b }, n).unwrap();
                assert_eq!(count_real_roots_in(&y, -1.0, 1.0).unwrap(), n - 1);
                assert_eq!(count_real_roots_in(&y, f64::NEG_INFINITY, f64::INFINITY).unwrap(), n);
            }
        }
    }

    #[test]
    fn weights() {
        let w = x1_weight(X1Family::Laguerre { a: 2.0 }).unwrap();
        assert!((w.eval(2.0).unwrap() - (-2.0f64).exp() * 4.0 / 16.0).abs() < 1e-16);
        assert!((w.eval(2.0).unwrap() - 0.033_833_8).abs() < 1e-7);
        assert_eq!(w.eval(0.0).unwrap(), 0.0);
        assert!(w.eval(1e-12).unwrap() < 1e-20);
        assert!(matches!(w.eval(-1.0), Err(Error::Domain(_))));

        let wj = x1_weight(X1Family::Jacobi { a: 1.75, b: 3.0 }).unwrap();
        assert!((wj.eval(0.0).unwrap() - 1.0 / (4.75 * 4.75)).abs() < 1e-16);
        assert_eq!(wj.domain(), (-1.0, 1.0));

        assert!(matches!(x1_weight(X1Family::Jacobi { a: -0.5, b: 0.5 }), Err(Error::Domain(_))));
    }

    #[test]
    fn laguerre_norms() {
        assert!((x1_laguerre_norm(1, 2.0).unwrap() - 3.0).abs() < 1e-13);
        assert!((x1_laguerre_norm(2, 2.0).unwrap() - 8.0).abs() < 1e-13);
        assert!((x1_laguerre_norm(3, 2.0).unwrap() - 15.0).abs() < 1e-12);
        assert!((x1_laguerre_norm(4, 2.0).unwrap() - 24.0).abs() < 1e-12);
        let v = x1_laguerre_norm(2, 0.5).unwrap();
        assert!((v - 2.5 * std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
        assert!((v - 2.215_567_3).abs() < 1e-7);
        // a + n - 1 = 0 hits the gamma pole only when a = 0, which is rejected first
        assert!(matches!(x1_laguerre_norm(1, 0.0), Err(Error::Argument(_))));
    }
}
