//! Polynomial carrier, gamma function, classical Laguerre/Jacobi families and
//! real-root counting.

mod classical;
mod gamma;
mod sturm;

pub use classical::{classical_jacobi, classical_laguerre};
pub use gamma::gamma;
pub use sturm::{count_real_roots_in, sturm_chain};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense real polynomial, coefficients in ascending powers.
///
/// Trailing zero coefficients are always trimmed, so `coeffs().last()` is the
/// leading coefficient. The zero polynomial is stored as the single
/// coefficient `0.0` and reports degree 0; use [`Polynomial::is_zero`] to tell
/// it apart from a nonzero constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial { coeffs: vec![c] }
    }

    /// `c * x^power`
    pub fn monomial(c: f64, power: usize) -> Self {
        let mut coeffs = vec![0.0; power + 1];
        coeffs[power] = c;
        Polynomial::new(coeffs)
    }

    /// `c0 + c1 x`
    pub fn linear(c0: f64, c1: f64) -> Self {
        Polynomial::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    /// Horner evaluation; works for real and complex arguments.
    pub fn eval<T>(&self, x: T) -> T
    where
        T: Copy + From<f64> + Add<Output = T> + Mul<Output = T>,
    {
        self.coeffs
            .iter()
            .rev()
            .fold(T::from(0.0), |acc, &c| acc * x + T::from(c))
    }

    /// Values `p(x), p'(x), ..., p^(m)(x)` from a single Horner sweep.
    pub fn eval_derivs<T>(&self, x: T, m: usize) -> Vec<T>
    where
        T: Copy + From<f64> + Add<Output = T> + Mul<Output = T>,
    {
        let mut d = vec![T::from(0.0); m + 1];
        for &c in self.coeffs.iter().rev() {
            for j in (1..=m).rev() {
                d[j] = d[j] * x + d[j - 1];
            }
            d[0] = d[0] * x + T::from(c);
        }
        // d[j] holds p^(j)/j!
        let mut fact = 1.0;
        for (j, v) in d.iter_mut().enumerate().skip(1) {
            fact *= j as f64;
            *v = *v * T::from(fact);
        }
        d
    }

    /// Quotient and remainder of polynomial long division.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree();
        if self.degree() < dd {
            return (Polynomial::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; self.degree() - dd + 1];
        for i in (0..quot.len()).rev() {
            let q = rem[i + dd] / lead;
            quot[i] = q;
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= q * c;
            }
            rem[i + dd] = 0.0;
        }
        rem.truncate(dd.max(1));
        (Polynomial::new(quot), Polynomial::new(rem))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 && !(self.is_zero() && i == 0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

fn zip_coeffs(a: &Polynomial, b: &Polynomial, op: impl Fn(f64, f64) -> f64) -> Polynomial {
    let len = a.coeffs.len().max(b.coeffs.len());
    let get = |p: &Polynomial, i: usize| p.coeffs.get(i).copied().unwrap_or(0.0);
    Polynomial::new((0..len).map(|i| op(get(a, i), get(b, i))).collect())
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        zip_coeffs(self, rhs, |x, y| x + y)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        zip_coeffs(self, rhs, |x, y| x - y)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}
