//! Method of steps over a uniform grid of length τ*.
//!
//! Commensurate delays are all integer multiples `mᵢ·τ*` of one step, so on
//! segment `j` every delayed argument `t − τᵢ` falls exactly on segment
//! `j − mᵢ` (or on the initial state when that index is not positive).
//! Because the segment origins are aligned, a previous segment's series is
//! reused with identical coefficients; only the expansion point moves.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{validate, DelaySystem, PolyMatrix, SolverConfig};
use crate::numeric::{lcm, Rational};
use crate::recurrence::{build_and_iterate, choose_alpha, AlphaChoice, SegmentProblem};
use crate::series::{FracSeries, SeriesBasis};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepPlan {
    pub tau_star: Rational,
    /// `τᵢ = multipliers[i] · τ*`.
    pub multipliers: Vec<usize>,
    pub num_segments: usize,
}

impl StepPlan {
    /// Left end `(j − 1)·τ*` of segment `j` (1-based).
    pub fn segment_left(&self, j: usize) -> Result<Rational> {
        self.tau_star.checked_mul_int(j as i64 - 1)
    }

    pub fn segment_right(&self, j: usize) -> Result<Rational> {
        self.tau_star.checked_mul_int(j as i64)
    }

    /// Segment owning time `t` under half-open `((j−1)τ*, jτ*]`, with
    /// `t = 0` assigned to segment 1. `None` outside the planned segments.
    pub fn owner(&self, t: Rational) -> Option<usize> {
        if t < Rational::ZERO {
            return None;
        }
        let j = t.checked_div(self.tau_star).ok()?.ceil().max(1) as usize;
        (j <= self.num_segments).then_some(j)
    }
}

/// Uniform step for the given delays and horizon.
///
/// With `kᵢ = τᵢ/τ₁` and `k*` the lcm of their denominators, `τ* = τ₁/k*`
/// and `mᵢ = kᵢ·k*`. This τ* is the largest rational dividing every delay.
/// Without delays the whole horizon is one segment.
pub fn commensurate_step(delays: &[Rational], horizon: Rational) -> Result<StepPlan> {
    let Some(&tau_1) = delays.first() else {
        return Ok(StepPlan { tau_star: horizon, multipliers: Vec::new(), num_segments: 1 });
    };
    let ratios = delays.iter().map(|tau| tau.checked_div(tau_1)).collect::<Result<Vec<_>>>()?;
    let k_star = ratios.iter().try_fold(1i64, |acc, k| lcm(acc, k.denom()))?;
    let tau_star = tau_1.checked_div(Rational::from_integer(k_star))?;
    let multipliers = ratios
        .iter()
        .map(|k| {
            let m = k.checked_mul_int(k_star)?;
            m.to_integer().map(|m| m as usize).ok_or(Error::RationalOverflow)
        })
        .collect::<Result<Vec<_>>>()?;
    let num_segments = horizon.checked_div(tau_star)?.ceil().max(1) as usize;
    Ok(StepPlan { tau_star, multipliers, num_segments })
}

/// Where the delayed state `x(t − τᵢ)` comes from on segment `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelaySource {
    InitialState,
    Segment(usize),
}

pub fn resolve_delayed_term(j: usize, multiplier: usize) -> DelaySource {
    if j > multiplier {
        DelaySource::Segment(j - multiplier)
    } else {
        DelaySource::InitialState
    }
}

/// `(t0_j − τᵢ) − t0_{j−mᵢ}` in exact arithmetic; zero whenever the plan is
/// consistent. Only meaningful for `j > mᵢ`.
pub fn alignment_residual(plan: &StepPlan, j: usize, delay_index: usize, delay: Rational) -> Result<Rational> {
    let m = plan.multipliers[delay_index];
    plan.segment_left(j)?.checked_sub(delay)?.checked_sub(plan.segment_left(j - m)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSolution {
    pub index: usize,
    pub t_left: Rational,
    pub t_right: Rational,
    pub basis: SeriesBasis,
    pub components: Vec<FracSeries>,
    /// Delay-free right-hand side used on this segment, excluding `A₀ x`.
    pub forcing: Vec<FracSeries>,
    /// State at `t_left`.
    pub x0: Vec<f64>,
}

impl SegmentSolution {
    pub fn evaluate(&self, t: f64) -> Result<Vec<f64>> {
        self.components.iter().map(|s| s.evaluate(t)).collect()
    }
}

/// Reads a previous segment's series about the current segment's origin.
///
/// The source origin is `t0_j − τᵢ`, so substituting `t − τᵢ` turns
/// `(t − τᵢ) − t0_src` into `t − t0_j` and the coefficients carry over.
pub fn recenter_delayed_series(src: &SegmentSolution, target: &SeriesBasis) -> Result<Vec<FracSeries>> {
    src.components.iter().map(|s| s.rebased(*target)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub plan: StepPlan,
    pub choice: AlphaChoice,
    pub segments: Vec<SegmentSolution>,
}

impl Solution {
    /// State at an exact time, evaluated on the owning segment.
    pub fn state_at(&self, t: Rational) -> Result<Vec<f64>> {
        let j = self.plan.owner(t).ok_or(Error::LeftOfExpansionPoint {
            t: t.to_f64(),
            t0: 0.0,
        })?;
        self.segments[j - 1].evaluate(t.to_f64())
    }

    /// Samples at multiples of `step` up to `horizon`, plus every segment
    /// endpoint inside it and the horizon itself.
    pub fn trajectory(&self, step: Rational, horizon: Rational) -> Result<Vec<(Rational, Vec<f64>)>> {
        if !step.is_positive() {
            return Err(Error::Invalid(vec![crate::model::Violation::SampleStepNotPositive(step)]));
        }
        let mut times = BTreeSet::new();
        let mut t = Rational::ZERO;
        let mut i = 0i64;
        while t <= horizon {
            times.insert(t);
            i += 1;
            t = step.checked_mul_int(i)?;
        }
        for j in 1..=self.plan.num_segments {
            let right = self.plan.segment_right(j)?;
            if right <= horizon {
                times.insert(right);
            }
        }
        times.insert(horizon);
        times.into_iter().map(|t| Ok((t, self.state_at(t)?))).collect()
    }
}

fn matrix_series(mat: &PolyMatrix, basis: SeriesBasis) -> Result<Vec<Vec<FracSeries>>> {
    (0..mat.rows())
        .map(|i| {
            (0..mat.cols())
                .map(|k| FracSeries::from_polynomial(mat.get(i, k), basis))
                .collect()
        })
        .collect()
}

/// `forcing[i] += Σ_k M[i][k] ⊛ v[k]`.
fn accumulate_product(
    forcing: &mut [FracSeries],
    mat: &PolyMatrix,
    mat_series: &[Vec<FracSeries>],
    v: &[FracSeries],
) -> Result<()> {
    for (i, f) in forcing.iter_mut().enumerate() {
        for (k, vk) in v.iter().enumerate() {
            if mat.get(i, k).is_zero() {
                continue;
            }
            f.add_scaled(1.0, &mat_series[i][k].cauchy_product(vk)?)?;
        }
    }
    Ok(())
}

fn build_segment(
    sys: &DelaySystem,
    plan: &StepPlan,
    choice: &AlphaChoice,
    k_max: usize,
    done: &[SegmentSolution],
) -> Result<SegmentSolution> {
    let j = done.len() + 1;
    let t_left = plan.segment_left(j)?;
    let t_right = plan.segment_right(j)?;
    let basis = SeriesBasis::new(t_left.to_f64(), choice.alpha, k_max)?;

    let mut forcing = vec![FracSeries::zero(basis); sys.n];
    if !sys.b.is_zero() {
        let control = sys
            .u
            .iter()
            .map(|u| FracSeries::from_polynomial(u, basis))
            .collect::<Result<Vec<_>>>()?;
        accumulate_product(&mut forcing, &sys.b, &matrix_series(&sys.b, basis)?, &control)?;
    }

    for (d, (&tau, &m)) in sys.delays.iter().zip(&plan.multipliers).enumerate() {
        let a = &sys.a[d + 1];
        if a.is_zero() {
            continue;
        }
        let delayed = match resolve_delayed_term(j, m) {
            DelaySource::Segment(l) => {
                debug_assert_eq!(alignment_residual(plan, j, d, tau), Ok(Rational::ZERO));
                recenter_delayed_series(&done[l - 1], &basis)?
            }
            DelaySource::InitialState => {
                // Φ(t − τ) with t − τ = (t0_j − τ) + s
                let shift = t_left.checked_sub(tau)?.to_f64();
                sys.phi
                    .iter()
                    .map(|phi| FracSeries::from_centered_polynomial(&phi.taylor_shift(shift), basis))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        accumulate_product(&mut forcing, a, &matrix_series(a, basis)?, &delayed)?;
    }

    let x0 = match done.last() {
        None => sys.phi.iter().map(|phi| phi.eval(0.0)).collect(),
        Some(prev) => prev.evaluate(t_left.to_f64())?,
    };
    let problem = SegmentProblem { basis, a0: matrix_series(&sys.a[0], basis)?, forcing, x0 };
    let components = build_and_iterate(&problem, choice)?;
    Ok(SegmentSolution {
        index: j,
        t_left,
        t_right,
        basis,
        components,
        forcing: problem.forcing,
        x0: problem.x0,
    })
}

/// Solves segment by segment up to the horizon.
///
/// Each segment restarts the Caputo derivative at its own left end and is
/// seeded with the previous segment's value there.
pub fn solve(sys: &DelaySystem, cfg: &SolverConfig) -> Result<Solution> {
    validate(sys).map_err(Error::Invalid)?;
    crate::model::validate_config(cfg).map_err(Error::Invalid)?;
    let choice = choose_alpha(sys.nu)?;
    let plan = commensurate_step(&sys.delays, sys.horizon)?;
    let mut segments: Vec<SegmentSolution> = Vec::with_capacity(plan.num_segments);
    for j in 1..=plan.num_segments {
        let seg = build_segment(sys, &plan, &choice, cfg.k_max, &segments)
            .map_err(|e| Error::Segment { index: j, source: Box::new(e) })?;
        segments.push(seg);
    }
    Ok(Solution { plan, choice, segments })
}
