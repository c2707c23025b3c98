//! Real gamma function on the positive axis.
//!
//! Lanczos approximation with g = 7 and nine coefficients; relative error
//! stays below 3e-14 on (0, 50]. Arguments below 1/2 go through the
//! reflection formula, small integers return the exact factorial.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::Rational;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
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

// Γ(n) = (n-1)! is exact in f64 through n = 23.
const EXACT_FACTORIAL_LIMIT: f64 = 23.0;

// Largest argument whose gamma is finite in f64.
const GAMMA_OVERFLOW: f64 = 171.6;

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS_COEFFS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| acc + c / (x + (i + 1) as f64))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x.fract() == 0.0 && x <= EXACT_FACTORIAL_LIMIT {
        return (2..x as u64).fold(1.0, |acc, i| acc * i as f64);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    // split the power so t^(x+1/2) e^(-t) does not overflow before the product
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_sum(x)
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + lanczos_sum(x).ln()
}

fn check_domain(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::GammaDomain(x))
    }
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    check_domain(x)?;
    if x >= GAMMA_OVERFLOW {
        return Err(Error::GammaDomain(x));
    }
    Ok(gamma_unchecked(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_domain(x)?;
    if x < GAMMA_OVERFLOW - 1.0 {
        return Ok(gamma_unchecked(x).ln());
    }
    Ok(ln_gamma_unchecked(x))
}

/// Γ(αk + β + 1) / Γ(αk + 1), the coefficient factor of a Caputo
/// derivative of order β on a grid of order α.
///
/// Arguments are formed exactly in rational arithmetic before conversion.
/// Beyond the f64 range of Γ the ratio is taken as a log-gamma difference.
pub fn gamma_ratio(alpha: Rational, k: usize, beta: Rational) -> Result<f64> {
    let k = i64::try_from(k).map_err(|_| Error::RationalOverflow)?;
    let low = alpha.checked_mul_int(k)?.checked_add(Rational::ONE)?;
    let high = low.checked_add(beta)?;
    let (low, high) = (low.to_f64(), high.to_f64());
    check_domain(low)?;
    check_domain(high)?;
    if high < GAMMA_OVERFLOW - 1.0 && low < GAMMA_OVERFLOW - 1.0 {
        Ok(gamma_unchecked(high) / gamma_unchecked(low))
    } else {
        Ok((ln_gamma_unchecked(high) - ln_gamma_unchecked(low)).exp())
    }
}
