use super::Polynomial;
use crate::error::{Error, Result};

/// Generalized Laguerre polynomial `L_n^(a)` from the three-term recurrence
/// `(m+1) L_{m+1} = (2m+1+a-x) L_m - (m+a) L_{m-1}`.
pub fn classical_laguerre(n: usize, a: f64) -> Result<Polynomial> {
    if !(a > -1.0) {
        return Err(Error::Argument(format!("Laguerre parameter a = {a} must exceed -1")));
    }
    let mut prev = Polynomial::constant(1.0);
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = Polynomial::linear(1.0 + a, -1.0);
    for m in 1..n {
        let m = m as f64;
        let step = &Polynomial::linear(2.0 * m + 1.0 + a, -1.0) * &cur;
        let next = (&step - &prev.scale(m + a)).scale(1.0 / (m + 1.0));
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

/// Jacobi polynomial `P_n^(a,b)` from the standard three-term recurrence.
pub fn classical_jacobi(n: usize, a: f64, b: f64) -> Result<Polynomial> {
    if !(a > -1.0) || !(b > -1.0) {
        return Err(Error::Argument(format!(
            "Jacobi parameters a = {a}, b = {b} must both exceed -1"
        )));
    }
    let mut prev = Polynomial::constant(1.0);
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = Polynomial::linear(0.5 * (a - b), 0.5 * (a + b + 2.0));
    for m in 1..n {
        let m = m as f64;
        let s = 2.0 * m + a + b;
        let c0 = 2.0 * (m + 1.0) * (m + a + b + 1.0) * s;
        let c1 = (s + 1.0) * (s + 2.0) * s;
        let c2 = (s + 1.0) * (a * a - b * b);
        let c3 = 2.0 * (m + a) * (m + b) * (s + 2.0);
        let step = &Polynomial::linear(c2, c1) * &cur;
        let next = (&step - &prev.scale(c3)).scale(1.0 / c0);
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    /// Explicit sum L_n^(a)(x) = Σ_j (-1)^j C(n+a, n-j) x^j / j!
    fn laguerre_series(n: usize, a: f64) -> Vec<f64> {
        (0..=n)
            .map(|j| {
                // C(n+a, n-j) = Π_{i=1}^{n-j} (a + j + i) / i
                let mut binom = 1.0;
                for i in 1..=(n - j) {
                    binom *= (a + j as f64 + i as f64) / i as f64;
                }
                let mut jf = 1.0;
                for i in 1..=j {
                    jf *= i as f64;
                }
                (-1f64).powi(j as i32) * binom / jf
            })
            .collect()
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(classical_laguerre(0, 0.7).unwrap().coeffs(), &[1.0]);
        assert_eq!(classical_laguerre(1, 2.0).unwrap().coeffs(), &[3.0, -1.0]);
        let l2 = classical_laguerre(2, 2.0).unwrap();
        assert!(close(l2.coeffs(), &[6.0, -4.0, 0.5], 1e-14));
    }

    #[test]
    fn laguerre_matches_series() {
        for a in [0.5, 2.0, 5.0] {
            for n in 0..=12 {
                let rec = classical_laguerre(n, a).unwrap();
                let ser = laguerre_series(n, a);
                let scale = ser.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
                assert!(close(rec.coeffs(), &ser, 1e-12 * scale), "n={n} a={a}");
            }
        }
    }

    #[test]
    fn laguerre_satisfies_ode() {
        for a in [0.5, 2.0, 5.0] {
            for n in 0..=12 {
                let l = classical_laguerre(n, a).unwrap();
                for i in 0..20 {
                    let x = 0.25 + 29.5 * i as f64 / 19.0;
                    let d = l.eval_derivs(x, 2);
                    let terms = [x * d[2], (a + 1.0 - x) * d[1], n as f64 * d[0]];
                    let resid: f64 = terms.iter().sum();
                    let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
                    assert!(resid.abs() <= 1e-9 * scale.max(1e-300), "n={n} a={a} x={x}");
                }
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(classical_jacobi(0, 1.75, 3.0).unwrap().coeffs(), &[1.0]);
        let p1 = classical_jacobi(1, 1.75, 3.0).unwrap();
        assert!((p1.eval(1.0_f64) - 2.75).abs() < 1e-14);
        let legendre2 = classical_jacobi(2, 0.0, 0.0).unwrap();
        assert!(close(legendre2.coeffs(), &[-0.5, 0.0, 1.5], 1e-14));
    }

    #[test]
    fn jacobi_endpoint_identity() {
        // P_n^(a,b)(1) = C(n+a, n)
        for (a, b) in [(1.75, 3.0), (0.5, 1.5), (-0.3, 0.8)] {
            let mut binom = 1.0;
            for n in 0..10 {
                if n > 0 {
                    binom *= (a + n as f64) / n as f64;
                }
                let v = classical_jacobi(n, a, b).unwrap().eval(1.0_f64);
                assert!((v - binom).abs() <= 1e-12 * binom.abs().max(1.0), "n={n}");
            }
        }
    }

    #[test]
    fn jacobi_satisfies_ode() {
        // (1-x²) y'' + (b - a - (a+b+2) x) y' + n(n+a+b+1) y = 0
        let (a, b) = (1.75, 3.0);
        for n in 0..10 {
            let p = classical_jacobi(n, a, b).unwrap();
            for i in 0..15 {
                let x = -0.95 + 1.9 * i as f64 / 14.0;
                let d = p.eval_derivs(x, 2);
                let terms = [
                    (1.0 - x * x) * d[2],
                    (b - a - (a + b + 2.0) * x) * d[1],
                    n as f64 * (n as f64 + a + b + 1.0) * d[0],
                ];
                let resid: f64 = terms.iter().sum();
                let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
                assert!(resid.abs() <= 1e-10 * scale.max(1e-300));
            }
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(classical_jacobi(2, -1.0, 0.0), Err(Error::Argument(_))));
        assert!(matches!(classical_jacobi(2, 0.0, -1.5), Err(Error::Argument(_))));
        assert!(matches!(classical_laguerre(2, -2.0), Err(Error::Argument(_))));
    }
}
