use super::Polynomial;
use crate::error::{Error, Result};

/// Relative size below which remainder coefficients are treated as noise.
const DROP_TOL: f64 = 1e-12;

fn normalized(p: &Polynomial) -> Polynomial {
    let m = p.max_abs_coeff();
    if m == 0.0 {
        p.clone()
    } else {
        p.scale(1.0 / m)
    }
}

fn drop_noise(p: &Polynomial, reference: f64) -> Polynomial {
    let cut = DROP_TOL * reference;
    Polynomial::new(
        p.coeffs()
            .iter()
            .map(|&c| if c.abs() < cut { 0.0 } else { c })
            .collect(),
    )
}

/// Sturm chain `p, p', -rem(p, p'), ...`, each member rescaled to unit max
/// coefficient (positive scaling leaves sign counts unchanged).
pub fn sturm_chain(p: &Polynomial) -> Result<Vec<Polynomial>> {
    if p.is_zero() {
        return Err(Error::Argument("Sturm chain of the zero polynomial".into()));
    }
    let mut chain = vec![normalized(p)];
    let d = p.derivative();
    if d.is_zero() {
        return Ok(chain);
    }
    chain.push(normalized(&d));
    loop {
        let n = chain.len();
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        let r = drop_noise(&r, chain[n - 2].max_abs_coeff());
        if r.is_zero() {
            break;
        }
        chain.push(normalized(&-&r));
        if chain[chain.len() - 1].degree() == 0 {
            break;
        }
    }
    Ok(chain)
}

fn sign_changes(values: impl Iterator<Item = f64>) -> usize {
    let mut count = 0;
    let mut last = 0.0_f64;
    for v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

fn changes_at(chain: &[Polynomial], x: f64) -> usize {
    if x == f64::INFINITY {
        sign_changes(chain.iter().map(|q| q.leading()))
    } else if x == f64::NEG_INFINITY {
        sign_changes(chain.iter().map(|q| {
            if q.degree() % 2 == 0 {
                q.leading()
            } else {
                -q.leading()
            }
        }))
    } else {
        sign_changes(chain.iter().map(|q| q.eval(x)))
    }
}

/// Number of distinct real roots of `p` in the open interval `(lo, hi)`.
///
/// Either bound may be infinite. Finite endpoints are nudged inward by
/// `1e-12 * max(1, |endpoint|)` so that a root sitting on an endpoint is not
/// counted.
pub fn count_real_roots_in(p: &Polynomial, lo: f64, hi: f64) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Argument("cannot count roots of the zero polynomial".into()));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::Argument(format!("empty interval ({lo}, {hi})")));
    }
    let chain = sturm_chain(p)?;
    let nudge = |x: f64, dir: f64| {
        if x.is_finite() {
            x + dir * 1e-12 * x.abs().max(1.0)
        } else {
            x
        }
    };
    let lo = nudge(lo, 1.0);
    let hi = nudge(hi, -1.0);
    if lo >= hi {
        return Ok(0);
    }
    Ok(changes_at(&chain, lo).saturating_sub(changes_at(&chain, hi)))
}
