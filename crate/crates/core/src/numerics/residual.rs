//! Pointwise residual of `-ψ'' + Vψ - Eψ` for the closed-form states.

use num_complex::Complex64;

use crate::error::Result;
use crate::models::{energy, potential, wavefunction, PotentialModel};

/// Five-point central second difference.
fn second_difference<F>(f: &F, x: f64, h: f64, centre: Complex64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let (p1, m1) = (f(x + h)?, f(x - h)?);
    let (p2, m2) = (f(x + 2.0 * h)?, f(x - 2.0 * h)?);
    Ok((-(p2 + m2) + 16.0 * (p1 + m1) - 30.0 * centre) / (12.0 * h * h))
}

/// `ψ''` from the five-point rule at steps `h` and `2h`, Richardson-combined.
fn second_derivative<F>(f: &F, x: f64, h: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let centre = f(x)?;
    let fine = second_difference(f, x, h, centre)?;
    let coarse = second_difference(f, x, 2.0 * h, centre)?;
    Ok((16.0 * fine - coarse) / 15.0)
}

/// `max |-ψ_n'' + Ṽψ_n - E_nψ_n| / (|E_n| max|ψ_n|)` over the grid.
///
/// Stencils reaching a pole or leaving the state's domain return the
/// underlying singularity or domain error.
pub fn schrodinger_residual(m: &PotentialModel, n: usize, grid: &[f64]) -> Result<f64> {
    schrodinger_residual_with_energy(m, n, energy(m, n)?, grid)
}

/// As [`schrodinger_residual`] with an explicit trial energy.
pub fn schrodinger_residual_with_energy(m: &PotentialModel, n: usize, e: f64, grid: &[f64]) -> Result<f64> {
    let psi = |x: f64| wavefunction(m, n, x);
    let mut worst = 0.0_f64;
    let mut peak = 0.0_f64;
    for &x in grid {
        let h = 1e-4 * (1.0 + x.abs());
        let d2 = second_derivative(&psi, x, h)?;
        let value = psi(x)?;
        let r = -d2 + (potential(m, x)? - e) * value;
        worst = worst.max(r.norm());
        peak = peak.max(value.norm());
    }
    let scale = e.abs() * peak;
    Ok(if scale > 0.0 { worst / scale } else { worst })
}
