//! Coefficient recurrence for one delay-free segment.
//!
//! Transforming `ᶜD^ν x = A₀(t) x + f(t)` about the segment start with grid
//! order α = 1/q turns the Caputo derivative into an index shift by `p`:
//!
//! ```text
//! X(k + p) = Γ(k/q + 1) / Γ((k + p)/q + 1) · ( Σ_{l≤k} A₀(l) X(k − l) + F(k) )
//! ```
//!
//! with the first `p` coefficients fixed by the state at the segment start.

use crate::error::{Error, Result};
use crate::model::Violation;
use crate::numeric::{gamma_ratio, Rational};
use crate::series::{FracSeries, SeriesBasis};

/// Grid order for a Caputo order ν = p/q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaChoice {
    pub nu: Rational,
    pub alpha: Rational,
    pub p: usize,
    pub q: usize,
}

impl AlphaChoice {
    /// Index shift of the Caputo term, `ν/α`.
    pub fn k_nu(&self) -> usize {
        self.p
    }

    /// Grid index of `t¹`, `1/α`.
    pub fn k_one(&self) -> usize {
        self.q
    }
}

/// Largest α ∈ (0, 1] such that both ν and 1 are integer multiples of α,
/// which for ν = p/q in lowest terms is 1/q.
pub fn choose_alpha(nu: Rational) -> Result<AlphaChoice> {
    if !nu.is_positive() || nu > Rational::ONE {
        return Err(Error::NuOutOfRange(nu.to_string()));
    }
    let p = nu.numer() as usize;
    let q = nu.denom() as usize;
    Ok(AlphaChoice { nu, alpha: Rational::new(1, nu.denom())?, p, q })
}

/// Seed coefficients `X(0..p)` from the state at the segment start.
///
/// Only `k = 0` has `αk` a nonnegative integer below ν, so `X(0) = x0` and
/// the remaining `p − 1` seeds vanish. Returned as one row per component.
pub fn transform_initial_state(x0: &[f64], choice: &AlphaChoice) -> Vec<Vec<f64>> {
    x0.iter()
        .map(|&x| {
            let mut seeds = vec![0.0; choice.p];
            seeds[0] = x;
            seeds
        })
        .collect()
}

/// One delay-free segment: `ᶜD^ν x = A₀ x + forcing`, `x(t0) = x0`.
///
/// All delayed contributions and the control term are already summed into
/// `forcing`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentProblem {
    pub basis: SeriesBasis,
    /// `a0[i][j]` is the transform of entry (i, j) of A₀.
    pub a0: Vec<Vec<FracSeries>>,
    pub forcing: Vec<FracSeries>,
    pub x0: Vec<f64>,
}

impl SegmentProblem {
    fn check(&self, choice: &AlphaChoice) -> Result<()> {
        if self.basis.alpha() != choice.alpha {
            return Err(Error::IncompatibleBases);
        }
        let n = self.x0.len();
        if self.forcing.len() != n || self.a0.len() != n || self.a0.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid(vec![Violation::DimensionMismatch(format!(
                "segment problem with {n} states has {} forcing terms and a {}-row A0",
                self.forcing.len(),
                self.a0.len()
            ))]));
        }
        let all = self.a0.iter().flatten().chain(&self.forcing);
        if all.into_iter().any(|s| *s.basis() != self.basis) {
            return Err(Error::IncompatibleBases);
        }
        Ok(())
    }
}

/// Solves the segment recurrence up to index `K`.
pub fn build_and_iterate(prob: &SegmentProblem, choice: &AlphaChoice) -> Result<Vec<FracSeries>> {
    prob.check(choice)?;
    let n = prob.x0.len();
    let k_max = prob.basis.k_max();
    let p = choice.p;

    let mut x: Vec<Vec<f64>> = transform_initial_state(&prob.x0, choice)
        .into_iter()
        .map(|mut seeds| {
            seeds.resize(k_max + 1, 0.0);
            seeds
        })
        .collect();
    let coupled: Vec<Vec<bool>> = prob
        .a0
        .iter()
        .map(|row| row.iter().map(|s| s.coeffs().iter().any(|c| *c != 0.0)).collect())
        .collect();

    let mut rhs = vec![0.0; n];
    for k in 0..(k_max + 1).saturating_sub(p) {
        for (i, out) in rhs.iter_mut().enumerate() {
            let mut acc = prob.forcing[i].coeff(k);
            for j in (0..n).filter(|&j| coupled[i][j]) {
                let a = prob.a0[i][j].coeffs();
                acc += (0..=k).map(|l| a[l] * x[j][k - l]).sum::<f64>();
            }
            *out = acc;
        }
        let factor = gamma_ratio(choice.alpha, k, choice.nu)?.recip();
        for i in 0..n {
            x[i][k + p] = factor * rhs[i];
        }
    }

    let input_reliable = prob
        .a0
        .iter()
        .flatten()
        .chain(&prob.forcing)
        .map(FracSeries::reliable_index)
        .min()
        .unwrap_or(k_max);
    let reliable = (input_reliable + p).min(k_max);
    Ok(x
        .into_iter()
        .map(|coeffs| {
            let s = FracSeries::from_coeffs(prob.basis, coeffs);
            if reliable < k_max {
                s.shortened_to(reliable)
            } else {
                s
            }
        })
        .collect())
}
