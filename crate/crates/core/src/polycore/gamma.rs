use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function via the Lanczos approximation (g = 7, nine terms), with the
/// reflection formula below 1/2.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Domain(format!("gamma has a pole at {x}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite argument {x}")));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // split the power so t^(z+1/2) cannot overflow before exp(-t) is applied
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * sum
}
