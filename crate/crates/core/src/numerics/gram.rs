//! Gram matrices of the X1 families under their orthogonality weights.

use crate::error::Result;
use crate::numerics::{integrate, Quadrature};
use crate::xop::{x1_polynomial, x1_weight, X1Family};

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    /// `entries[i][j] = ∫ w P_{i+1} P_{j+1}`.
    pub entries: Vec<Vec<f64>>,
    /// Largest `|G_ij| / sqrt(G_ii G_jj)` over `i ≠ j`.
    pub max_offdiag_ratio: f64,
}

impl GramMatrix {
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.entries.len()).map(|i| self.entries[i][i]).collect()
    }
}

/// Inner products of `P_1 ..= P_nmax` with quadrature `q`, which must cover
/// the family's weight domain.
pub fn gram_matrix(family: X1Family, nmax: usize, q: &Quadrature) -> Result<GramMatrix> {
    let weight = x1_weight(family)?;
    let polys = (1..=nmax).map(|n| x1_polynomial(family, n)).collect::<Result<Vec<_>>>()?;
    let mut entries = vec![vec![0.0; nmax]; nmax];
    for i in 0..nmax {
        for j in i..nmax {
            let (p, r) = (&polys[i], &polys[j]);
            let value = integrate(
                |x: f64| {
                    // nodes never sit on the domain ends
                    let w = weight.eval(x).unwrap_or(f64::NAN);
                    w * p.eval(x) * r.eval(x)
                },
                q,
            )?;
            entries[i][j] = value;
            entries[j][i] = value;
        }
    }
    let mut max_offdiag_ratio = 0.0_f64;
    for i in 0..nmax {
        for j in 0..nmax {
            if i != j {
                let ratio = entries[i][j].abs() / (entries[i][i] * entries[j][j]).sqrt();
                max_offdiag_ratio = max_offdiag_ratio.max(ratio);
            }
        }
    }
    Ok(GramMatrix { entries, max_offdiag_ratio })
}
