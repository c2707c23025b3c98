//! # fracsteps
//!
//! Solver for linear Caputo fractional systems with commensurate constant
//! state delays
//!
//! ```text
//! ᶜD^ν x(t) = A₀(t) x(t) + Σᵢ Aᵢ(t) x(t − τᵢ) + B(t) u(t),   0 < ν ≤ 1
//! ```
//!
//! The delays are removed by the method of steps on a uniform grid τ*, and
//! each delay-free segment is solved exactly (up to truncation) by the
//! fractional differential transform: the solution is a power series in
//! `(t − t0)^{k/q}` for ν = p/q whose coefficients satisfy a recurrence.
//!
//! ```
//! use fracsteps::{model::parse_problem, steps::solve, numeric::Rational};
//!
//! let text = "nu = 1\nstate_dim = 1\ncontrol_dim = 1\ndelays = 1\nhorizon = 2\n[A1]\n1\n[phi]\n1\n";
//! let (sys, cfg) = parse_problem(text).unwrap();
//! let sol = solve(&sys, &cfg).unwrap();
//! // x' = x(t − 1), x = 1 on [−1, 0]  ⇒  x(2) = 1 + 2 + 1/2
//! let x = sol.state_at(Rational::from_integer(2)).unwrap();
//! assert!((x[0] - 3.5).abs() < 1e-14);
//! ```

pub mod error;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod recurrence;
pub mod report;
pub mod series;
pub mod steps;

pub use error::{Error, Result};
