//! Exact rationals and the real gamma function.

mod gamma;
mod rational;

pub use gamma::{gamma, gamma_ratio, ln_gamma};
pub use rational::{lcm, Rational};
