//! Run reports: coefficient tables, sampled trajectories, oracle deviation.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::model::{DelaySystem, SolverConfig};
use crate::numeric::Rational;
use crate::oracle::{abm_solve, PowerTerms};
use crate::series::SeriesTerm;
use crate::steps::{Solution, StepPlan};

/// Number of comparison points per segment in [`oracle_max_abs_error`].
pub const ORACLE_SAMPLES: usize = 50;

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentCoefficients {
    pub segment: usize,
    pub t_left: Rational,
    pub t_right: Rational,
    /// Nonzero terms per state component.
    pub components: Vec<Vec<SeriesTerm>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub plan: StepPlan,
    pub coefficients: Vec<SegmentCoefficients>,
    pub trajectory: Vec<TrajectoryPoint>,
    pub oracle_max_abs_error: Option<f64>,
}

impl RunReport {
    pub fn build(sys: &DelaySystem, cfg: &SolverConfig, sol: &Solution) -> Result<Self> {
        let coefficients = sol
            .segments
            .iter()
            .map(|seg| {
                Ok(SegmentCoefficients {
                    segment: seg.index,
                    t_left: seg.t_left,
                    t_right: seg.t_right,
                    components: seg.components.iter().map(|s| s.nonzero_terms()).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        let trajectory = sol
            .trajectory(cfg.sample_step, sys.horizon)?
            .into_iter()
            .map(|(t, x)| TrajectoryPoint { t: t.to_f64(), x })
            .collect();
        Ok(RunReport { plan: sol.plan.clone(), coefficients, trajectory, oracle_max_abs_error: None })
    }

    pub fn trajectory_csv(&self) -> String {
        let n = self.trajectory.first().map_or(0, |p| p.x.len());
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        for p in &self.trajectory {
            out.push_str(&fmt17(p.t));
            for x in &p.x {
                out.push(',');
                out.push_str(&fmt17(*x));
            }
            out.push('\n');
        }
        out
    }

    pub fn coefficients_csv(&self) -> String {
        let mut out = String::from("segment,component,k,exponent,coeff\n");
        for seg in &self.coefficients {
            for (c, terms) in seg.components.iter().enumerate() {
                for term in terms {
                    let _ = writeln!(out, "{},{},{},{},{}", seg.segment, c + 1, term.k, term.exponent, fmt17(term.coeff));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are finite")
    }
}

/// Re-solves every segment's delay-free system with the ABM oracle using
/// `steps` steps per segment and returns the largest absolute deviation
/// from the series solution over [`ORACLE_SAMPLES`] evenly spaced nodes.
pub fn oracle_max_abs_error(sys: &DelaySystem, sol: &Solution, steps: usize) -> Result<f64> {
    let nu = sys.nu.to_f64();
    let alpha = sol.choice.alpha.to_f64();
    let mut worst: f64 = 0.0;
    for seg in &sol.segments {
        let forcing: Vec<PowerTerms> = seg
            .forcing
            .iter()
            .map(|f| {
                PowerTerms::new(
                    f.coeffs()
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| **c != 0.0)
                        .map(|(k, c)| (*c, alpha * k as f64))
                        .collect(),
                )
            })
            .collect();
        let (t0, t1) = (seg.t_left.to_f64(), seg.t_right.to_f64());
        let h = (t1 - t0) / steps as f64;
        let traj = abm_solve(&sys.a[0], &forcing, nu, &seg.x0, t0, t1, h)?;
        let stride = (steps / ORACLE_SAMPLES).max(1);
        for (t, x) in traj.t.iter().zip(&traj.x).skip(stride).step_by(stride) {
            let series = seg.evaluate(*t)?;
            for (a, b) in series.iter().zip(x) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_problem;
    use crate::steps::solve;

    #[test]
    fn fmt17_has_seventeen_significant_digits() {
        assert_eq!(fmt17(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(fmt17(0.0), "0.0000000000000000e0");
        assert_eq!(fmt17(-2.5), "-2.5000000000000000e0");
        let x = 0.1 + 0.2;
        assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_layouts() {
        let text = include_str!("../problems/example6_nu1.frac");
        let (sys, mut cfg) = parse_problem(text).unwrap();
        cfg.sample_step = Rational::new(1, 3).unwrap();
        let sol = solve(&sys, &cfg).unwrap();
        let report = RunReport::build(&sys, &cfg, &sol).unwrap();
        let csv = report.trajectory_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "t,x1,x2");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("3.3333333333333331e-1,"));

        let coeffs = report.coefficients_csv();
        assert!(coeffs.starts_with("segment,component,k,exponent,coeff\n"));
        // x_{2,1} = t + t²
        assert!(coeffs.contains("\n1,2,1,1,1.0000000000000000e0\n"));
        assert!(coeffs.contains("\n1,2,2,2,1.0000000000000000e0\n"));

        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["plan"]["tau_star"], "1/3");
        assert_eq!(json["coefficients"][1]["components"][0][0]["exponent"], "2");
        assert!(json["oracle_max_abs_error"].is_null());
    }
}
