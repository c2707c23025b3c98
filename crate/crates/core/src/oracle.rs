//! Reference solvers for cross-checking series solutions.
//!
//! Nothing here touches the series or recurrence code: gamma values come
//! from `statrs` and forcing terms are evaluated pointwise.

use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::model::PolyMatrix;

const MAX_TERMS: usize = 10_000;
const MAX_STEPS: usize = 10_000_000;

/// One-parameter Mittag-Leffler index and summation tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub alpha: f64,
    pub tol: f64,
}

impl MLParams {
    pub fn new(alpha: f64, tol: f64) -> Result<Self> {
        if !(alpha > 0.0 && tol > 0.0 && alpha.is_finite()) {
            return Err(Error::Oracle(format!("invalid Mittag-Leffler parameters α={alpha}, tol={tol}")));
        }
        Ok(MLParams { alpha, tol })
    }
}

/// `E_α(z) = Σ z^k / Γ(αk + 1)` by direct summation.
///
/// The term ratio `|z| Γ(αk+1)/Γ(αk+α+1)` decreases in `k`, so once it is
/// below one the remaining tail is bounded by a geometric series; summation
/// stops when that bound drops under `tol`.
pub fn mittag_leffler(params: &MLParams, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(1.0);
    }
    let alpha = params.alpha;
    let ln_abs_z = z.abs().ln();
    let magnitude = |k: usize| (k as f64 * ln_abs_z - ln_gamma(alpha * k as f64 + 1.0)).exp();
    let mut sum = 0.0;
    for k in 0..MAX_TERMS {
        let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        sum += sign * magnitude(k);
        let next = magnitude(k + 1);
        let after = magnitude(k + 2);
        if next == 0.0 {
            return Ok(sum);
        }
        let ratio = after / next;
        if ratio < 1.0 && next / (1.0 - ratio) < params.tol {
            return Ok(sum);
        }
    }
    Err(Error::Oracle(format!("Mittag-Leffler series at z = {z} did not converge in {MAX_TERMS} terms")))
}

/// `Σ c·(t − t0)^e` over `(c, e)` pairs, with `t0` supplied at evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PowerTerms {
    pub terms: Vec<(f64, f64)>,
}

impl PowerTerms {
    pub fn new(terms: Vec<(f64, f64)>) -> Self {
        PowerTerms { terms }
    }

    pub fn eval(&self, dt: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, e)| if e == 0.0 { c } else if dt <= 0.0 { 0.0 } else { c * dt.powf(e) })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    /// `x[i]` is the state at `t[i]`.
    pub x: Vec<Vec<f64>>,
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Fractional Adams-Bashforth-Moulton (PECE) for
/// `ᶜD^ν x = A₀(t) x + f(t)` on `[t0, t1]` with the Caputo derivative based
/// at `t0` and `x(t0) = x0`. `A₀` is evaluated at absolute time, `f` in
/// powers of `t − t0`.
pub fn abm_solve(
    a0: &PolyMatrix,
    forcing: &[PowerTerms],
    nu: f64,
    x0: &[f64],
    t0: f64,
    t1: f64,
    h: f64,
) -> Result<Trajectory> {
    let n = x0.len();
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Oracle(format!("order {nu} outside (0, 1]")));
    }
    if a0.rows() != n || a0.cols() != n || forcing.len() != n {
        return Err(Error::Oracle("dimension mismatch".into()));
    }
    if !(h > 0.0 && t1 > t0) {
        return Err(Error::Oracle(format!("bad interval [{t0}, {t1}] or step {h}")));
    }
    let span = t1 - t0;
    let steps_f = (span / h).round();
    if steps_f > MAX_STEPS as f64 {
        return Err(Error::Oracle(format!("step count {steps_f} exceeds {MAX_STEPS}")));
    }
    let steps = steps_f as usize;
    if steps == 0 || (steps as f64 * h - span).abs() > 1e-9 * span.max(1.0) {
        return Err(Error::Oracle(format!("step {h} does not divide [{t0}, {t1}]")));
    }
    let h = span / steps as f64;

    let rhs = |k: usize, x: &[f64]| -> Vec<f64> {
        let t = t0 + k as f64 * h;
        (0..n)
            .map(|i| {
                let coupled: f64 = (0..n).map(|j| horner(a0.get(i, j).coeffs(), t) * x[j]).sum();
                coupled + forcing[i].eval(k as f64 * h)
            })
            .collect()
    };

    let pow_nu: Vec<f64> = (0..=steps + 1).map(|k| (k as f64).powf(nu)).collect();
    let pow_nu1: Vec<f64> = (0..=steps + 1).map(|k| (k as f64).powf(nu + 1.0)).collect();
    let pred_scale = h.powf(nu) / gamma(nu + 1.0);
    let corr_scale = h.powf(nu) / gamma(nu + 2.0);

    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    let mut fs: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    xs.push(x0.to_vec());
    fs.push(rhs(0, x0));

    for m in 0..steps {
        // m is the index of the last known node; predict node m + 1
        let mut pred = x0.to_vec();
        let mut corr_hist = vec![0.0; n];
        let mf = m as f64;
        let a_first = pow_nu1[m] - (mf - nu) * pow_nu[m + 1];
        for (j, f) in fs.iter().enumerate() {
            let b = pow_nu[m + 1 - j] - pow_nu[m - j];
            let a = if j == 0 {
                a_first
            } else {
                pow_nu1[m - j + 2] + pow_nu1[m - j] - 2.0 * pow_nu1[m - j + 1]
            };
            for i in 0..n {
                pred[i] += pred_scale * b * f[i];
                corr_hist[i] += a * f[i];
            }
        }
        let f_pred = rhs(m + 1, &pred);
        let x_next: Vec<f64> = (0..n)
            .map(|i| x0[i] + corr_scale * (f_pred[i] + corr_hist[i]))
            .collect();
        fs.push(rhs(m + 1, &x_next));
        xs.push(x_next);
    }

    Ok(Trajectory { t: (0..=steps).map(|k| t0 + k as f64 * h).collect(), x: xs })
}
