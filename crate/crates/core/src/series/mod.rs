//! Truncated fractional power series `Σ_{k=0}^{K} U(k) (t − t0)^{αk}`.
//!
//! A [`FracSeries`] is the coefficient sequence of a function on the
//! exponent grid `{αk}` about `t0`. The operations below are the transform
//! rules for monomials, products, division by `(t − t0)^r`, and the Caputo
//! derivative; every result stays on the grid of its inputs.

mod poly;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{gamma_ratio, Rational};

pub use poly::{PolyParseError, Polynomial};

/// Absolute threshold below which a coefficient counts as zero when a
/// vanishing prefix is required.
pub const VANISHING_TOLERANCE: f64 = 1e-12;

/// Expansion point, grid order, and truncation index shared by a family of
/// series. Two series combine only when their bases are equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesBasis {
    t0: f64,
    alpha: Rational,
    k_max: usize,
}

impl SeriesBasis {
    pub fn new(t0: f64, alpha: Rational, k_max: usize) -> Result<Self> {
        if !alpha.is_positive() || alpha > Rational::ONE {
            return Err(Error::AlphaOutOfRange(alpha.to_string()));
        }
        if !t0.is_finite() {
            return Err(Error::LeftOfExpansionPoint { t: f64::NAN, t0 });
        }
        Ok(SeriesBasis { t0, alpha, k_max })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    /// Highest retained grid index `K`.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Same grid and truncation, different expansion point.
    pub fn with_t0(&self, t0: f64) -> Self {
        SeriesBasis { t0, ..*self }
    }

    /// Grid index `k` with `αk = exponent`, or an off-grid error.
    pub fn grid_index(&self, exponent: Rational) -> Result<usize> {
        let off_grid = || Error::OffGridExponent {
            exponent: exponent.to_string(),
            alpha: self.alpha.to_string(),
        };
        let k = exponent.checked_div(self.alpha)?;
        match k.to_integer() {
            Some(k) if k >= 0 => usize::try_from(k).map_err(|_| off_grid()),
            _ => Err(off_grid()),
        }
    }

    /// The exponent `αk` carried by grid index `k`.
    pub fn exponent(&self, k: usize) -> Result<Rational> {
        let k = i64::try_from(k).map_err(|_| Error::RationalOverflow)?;
        self.alpha.checked_mul_int(k)
    }

    fn positive_shift(&self, r: Rational) -> Result<usize> {
        if !r.is_positive() {
            return Err(Error::NonPositiveExponent(r.to_string()));
        }
        self.grid_index(r)
    }
}

/// One nonzero coefficient, as written to coefficient dumps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesTerm {
    pub k: usize,
    pub exponent: Rational,
    pub coeff: f64,
}

/// Truncated fractional power series on a [`SeriesBasis`].
///
/// `reliable` is the highest index whose coefficient is exact with respect
/// to the untruncated series. Index-shifting operations lower it and the
/// coefficients above it are zero-filled.
#[derive(Debug, Clone, PartialEq)]
pub struct FracSeries {
    basis: SeriesBasis,
    coeff: Vec<f64>,
    reliable: usize,
}

impl FracSeries {
    pub fn zero(basis: SeriesBasis) -> Self {
        FracSeries { basis, coeff: vec![0.0; basis.k_max + 1], reliable: basis.k_max }
    }

    /// Builds a series from raw coefficients; missing entries are zero and
    /// entries past `K` are dropped.
    pub fn from_coeffs(basis: SeriesBasis, mut coeff: Vec<f64>) -> Self {
        coeff.resize(basis.k_max + 1, 0.0);
        FracSeries { basis, coeff, reliable: basis.k_max }
    }

    pub fn constant(basis: SeriesBasis, c: f64) -> Self {
        FracSeries::from_coeffs(basis, vec![c])
    }

    /// Transform of a polynomial in `t`: re-centered at `t0`, the power-`r`
    /// coefficient lands on index `r/α`.
    pub fn from_polynomial(p: &Polynomial, basis: SeriesBasis) -> Result<Self> {
        FracSeries::from_centered_polynomial(&p.taylor_shift(basis.t0), basis)
    }

    /// As [`from_polynomial`](Self::from_polynomial) for a polynomial that is
    /// already written in powers of `(t − t0)`.
    pub fn from_centered_polynomial(p: &Polynomial, basis: SeriesBasis) -> Result<Self> {
        let mut out = FracSeries::zero(basis);
        for (power, &c) in p.coeffs().iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let exponent = Rational::from_integer(power as i64);
            let k = basis.grid_index(exponent)?;
            if k <= basis.k_max {
                out.coeff[k] = c;
            }
        }
        Ok(out)
    }

    pub fn basis(&self) -> &SeriesBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeff
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeff.get(k).copied().unwrap_or(0.0)
    }

    pub fn reliable_index(&self) -> usize {
        self.reliable
    }

    /// True if an index shift left coefficients above the reliable index.
    pub fn is_shortened(&self) -> bool {
        self.reliable < self.basis.k_max
    }

    pub(crate) fn shortened_to(mut self, reliable: usize) -> Self {
        self.reliable = self.reliable.min(reliable);
        self
    }

    /// Same coefficients read about another expansion point on an identical
    /// grid. Used when a solution is substituted into a delayed argument.
    pub fn rebased(&self, basis: SeriesBasis) -> Result<Self> {
        if basis.alpha != self.basis.alpha || basis.k_max != self.basis.k_max {
            return Err(Error::IncompatibleBases);
        }
        Ok(FracSeries { basis, ..self.clone() })
    }

    /// Truncated sum at `t ≥ t0`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let t0 = self.basis.t0;
        if t < t0 || t.is_nan() {
            return Err(Error::LeftOfExpansionPoint { t, t0 });
        }
        if t == t0 {
            return Ok(self.coeff[0]);
        }
        let log_dt = (t - t0).ln();
        let alpha = self.basis.alpha.to_f64();
        Ok(self
            .coeff
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| if k == 0 { *c } else { c * (alpha * k as f64 * log_dt).exp() })
            .sum())
    }

    fn check_same_basis(&self, other: &FracSeries) -> Result<()> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(Error::IncompatibleBases)
        }
    }

    /// `c1·s1 + c2·s2`.
    pub fn linear_combine(c1: f64, s1: &FracSeries, c2: f64, s2: &FracSeries) -> Result<Self> {
        s1.check_same_basis(s2)?;
        Ok(FracSeries {
            basis: s1.basis,
            coeff: s1.coeff.iter().zip(&s2.coeff).map(|(a, b)| c1 * a + c2 * b).collect(),
            reliable: s1.reliable.min(s2.reliable),
        })
    }

    /// In-place `self += c·other`.
    pub fn add_scaled(&mut self, c: f64, other: &FracSeries) -> Result<()> {
        self.check_same_basis(other)?;
        for (a, b) in self.coeff.iter_mut().zip(&other.coeff) {
            *a += c * b;
        }
        self.reliable = self.reliable.min(other.reliable);
        Ok(())
    }

    /// Transform of a product: truncated convolution of the coefficients.
    pub fn cauchy_product(&self, other: &FracSeries) -> Result<Self> {
        self.check_same_basis(other)?;
        let n = self.coeff.len();
        let mut coeff = vec![0.0; n];
        for (l, &a) in self.coeff.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (out, &b) in coeff[l..].iter_mut().zip(&other.coeff) {
                *out += a * b;
            }
        }
        Ok(FracSeries { basis: self.basis, coeff, reliable: self.reliable.min(other.reliable) })
    }

    /// Transform of `g(t) / (t − t0)^r`: shifts the coefficients down by
    /// `m = r/α`. The first `m` coefficients must vanish.
    pub fn shift_divide(&self, r: Rational) -> Result<Self> {
        let m = self.basis.positive_shift(r)?;
        for (index, &value) in self.coeff.iter().take(m).enumerate() {
            if value.abs() > VANISHING_TOLERANCE {
                return Err(Error::NonVanishingSeries { r: r.to_string(), index, value });
            }
        }
        self.shifted_down(m, |_| Ok(1.0))
    }

    /// Transform of the Caputo derivative of order `β` about `t0`:
    /// `F(k) = Γ(αk+β+1)/Γ(αk+1) · G(k + β/α)`.
    pub fn caputo_transform(&self, beta: Rational) -> Result<Self> {
        let b = self.basis.positive_shift(beta)?;
        let alpha = self.basis.alpha;
        self.shifted_down(b, |k| gamma_ratio(alpha, k, beta))
    }

    fn shifted_down(&self, m: usize, factor: impl Fn(usize) -> Result<f64>) -> Result<Self> {
        let mut out = FracSeries::zero(self.basis);
        for k in 0..self.coeff.len().saturating_sub(m) {
            let g = self.coeff[k + m];
            if g != 0.0 {
                out.coeff[k] = factor(k)? * g;
            }
        }
        out.reliable = self.reliable.saturating_sub(m);
        Ok(out)
    }

    /// Nonzero coefficients with their exponents `αk`.
    pub fn nonzero_terms(&self) -> Result<Vec<SeriesTerm>> {
        self.coeff
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, &coeff)| Ok(SeriesTerm { k, exponent: self.basis.exponent(k)?, coeff }))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::gamma;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn basis(t0: f64, alpha: Rational, k: usize) -> SeriesBasis {
        SeriesBasis::new(t0, alpha, k).unwrap()
    }

    fn poly(s: &str) -> Polynomial {
        Polynomial::parse(s).unwrap()
    }

    #[test]
    fn basis_rejects_alpha_outside_unit_interval() {
        assert!(SeriesBasis::new(0.0, r(3, 2), 4).is_err());
        assert!(SeriesBasis::new(0.0, Rational::ZERO, 4).is_err());
        assert!(SeriesBasis::new(0.0, r(-1, 2), 4).is_err());
        assert!(SeriesBasis::new(0.0, Rational::ONE, 4).is_ok());
    }

    #[test]
    fn from_polynomial_examples() {
        let s = FracSeries::from_polynomial(&poly("t^2"), basis(0.0, Rational::ONE, 4)).unwrap();
        assert_eq!(s.coeffs(), &[0.0, 0.0, 1.0, 0.0, 0.0]);

        for q in 1..=5 {
            let b = basis(0.0, r(1, q), 3 * q as usize);
            let s = FracSeries::from_polynomial(&poly("2*t + 1"), b).unwrap();
            for (k, &c) in s.coeffs().iter().enumerate() {
                let want = match k {
                    0 => 1.0,
                    k if k == q as usize => 2.0,
                    _ => 0.0,
                };
                assert_eq!(c, want, "q = {q}, k = {k}");
            }
        }

        let s = FracSeries::from_polynomial(&poly("t"), basis(1.0 / 3.0, Rational::ONE, 3)).unwrap();
        assert_eq!(s.coeffs(), &[1.0 / 3.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn from_polynomial_off_grid() {
        // α = 2/3 puts t¹ at k = 3/2
        let b = basis(0.0, r(2, 3), 6);
        assert!(matches!(
            FracSeries::from_polynomial(&poly("t"), b),
            Err(Error::OffGridExponent { .. })
        ));
        assert!(FracSeries::from_polynomial(&poly("t^2 + 5"), b).is_ok());
    }

    #[test]
    fn evaluate_examples() {
        let b = basis(0.0, Rational::ONE, 4);
        assert_eq!(FracSeries::zero(b).evaluate(0.7).unwrap(), 0.0);

        let x21 = FracSeries::from_coeffs(b, vec![0.0, 1.0, 1.0]);
        assert!((x21.evaluate(1.0 / 3.0).unwrap() - 4.0 / 9.0).abs() < 1e-15);

        let b = basis(0.0, r(1, 2), 6);
        let g32 = gamma(1.5).unwrap();
        let g52 = gamma(2.5).unwrap();
        let s = FracSeries::from_coeffs(b, vec![0.0, 1.0 / g32, 0.0, 2.0 / g52]);
        // mpmath: 0.94101224514636429343
        let got = s.evaluate(1.0 / 3.0).unwrap();
        assert!((got - 0.941_012_245_146_364_3).abs() < 1e-14, "{got}");

        assert_eq!(s.evaluate(0.0).unwrap(), 0.0);
        assert!(matches!(s.evaluate(-0.1), Err(Error::LeftOfExpansionPoint { .. })));
    }

    #[test]
    fn linear_combine_examples() {
        let b = basis(0.0, Rational::ONE, 4);
        let s = FracSeries::from_polynomial(&poly("3 - t + t^4"), b).unwrap();
        let zero = FracSeries::zero(b);
        assert_eq!(FracSeries::linear_combine(1.0, &s, 0.0, &zero).unwrap(), s);
        assert_eq!(FracSeries::linear_combine(1.0, &s, -1.0, &s).unwrap(), zero);

        let t = FracSeries::from_polynomial(&poly("t"), b).unwrap();
        let one = FracSeries::from_polynomial(&poly("1"), b).unwrap();
        let want = FracSeries::from_polynomial(&poly("2*t + 1"), b).unwrap();
        assert_eq!(FracSeries::linear_combine(2.0, &t, 1.0, &one).unwrap(), want);

        let other = FracSeries::zero(basis(0.5, Rational::ONE, 4));
        assert_eq!(
            FracSeries::linear_combine(1.0, &s, 1.0, &other),
            Err(Error::IncompatibleBases)
        );
    }

    #[test]
    fn cauchy_product_examples() {
        let b = basis(0.0, Rational::ONE, 4);
        let s = FracSeries::from_polynomial(&poly("3 - t + t^4"), b).unwrap();
        let one = FracSeries::constant(b, 1.0);
        assert_eq!(s.cauchy_product(&one).unwrap(), s);

        let t = FracSeries::from_polynomial(&poly("t"), b).unwrap();
        let t2 = FracSeries::from_polynomial(&poly("t^2"), b).unwrap();
        assert_eq!(t.cauchy_product(&t).unwrap(), t2);

        let other = FracSeries::zero(basis(0.0, r(1, 2), 4));
        assert_eq!(s.cauchy_product(&other), Err(Error::IncompatibleBases));
    }

    #[test]
    fn cauchy_product_matches_expanded_segment_two_term() {
        // (t − 1/3) · x_{1,2}(t) with x_{1,2} = ½(t−⅓)² + ⅓(t−⅓)³, ν = 1
        let t0 = 1.0 / 3.0;
        let b = basis(t0, Rational::ONE, 6);
        let shift = FracSeries::from_centered_polynomial(&poly("t"), b).unwrap();
        let x12 = FracSeries::from_coeffs(b, vec![0.0, 0.0, 0.5, 1.0 / 3.0]);
        let got = shift.cauchy_product(&x12).unwrap();

        let expanded_x12 = poly("7/162 - 2/9*t + 1/6*t^2 + 1/3*t^3");
        let product = poly("t - 1/3").mul(&expanded_x12);
        let want = FracSeries::from_polynomial(&product, b).unwrap();
        for k in 0..=6 {
            assert!((got.coeff(k) - want.coeff(k)).abs() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn shift_divide_examples() {
        let b = basis(0.0, Rational::ONE, 4);
        let t2 = FracSeries::from_polynomial(&poly("t^2"), b).unwrap();
        let t = FracSeries::from_polynomial(&poly("t"), b).unwrap();
        let got = t2.shift_divide(Rational::ONE).unwrap();
        assert_eq!(got.coeffs(), t.coeffs());
        assert_eq!(got.reliable_index(), 3);
        assert!(got.is_shortened());

        assert!(matches!(
            t.shift_divide(Rational::from_integer(2)),
            Err(Error::NonVanishingSeries { index: 1, .. })
        ));
        assert!(matches!(t2.shift_divide(r(1, 2)), Err(Error::OffGridExponent { .. })));
        assert!(matches!(t2.shift_divide(Rational::ZERO), Err(Error::NonPositiveExponent(_))));
    }

    #[test]
    fn shift_divide_tolerates_tiny_prefix() {
        let b = basis(0.0, Rational::ONE, 3);
        let s = FracSeries::from_coeffs(b, vec![1e-13, 2.0, 3.0]);
        assert_eq!(s.shift_divide(Rational::ONE).unwrap().coeffs(), &[2.0, 3.0, 0.0, 0.0]);
    }

    #[test]
    fn caputo_transform_examples() {
        let b = basis(0.0, Rational::ONE, 4);
        let t2 = FracSeries::from_polynomial(&poly("t^2"), b).unwrap();
        let d = t2.caputo_transform(Rational::ONE).unwrap();
        assert_eq!(d.coeffs(), FracSeries::from_polynomial(&poly("2*t"), b).unwrap().coeffs());
        assert_eq!(d.reliable_index(), 3);

        // ᶜD^ν t^ν = Γ(ν+1)
        for (p, q) in [(1, 2), (2, 3), (3, 4), (1, 1)] {
            let nu = r(p, q);
            let b = basis(0.0, r(1, q), 12);
            let mut coeff = vec![0.0; 13];
            coeff[p as usize] = 1.0;
            let d = FracSeries::from_coeffs(b, coeff).caputo_transform(nu).unwrap();
            let want = gamma(nu.to_f64() + 1.0).unwrap();
            assert!((d.coeff(0) - want).abs() < 1e-14 * want);
            assert!(d.coeffs()[1..].iter().all(|c| *c == 0.0));
        }

        // segment-1 solution with ν = 1: x₂ = t + t², ᶜD x₂ = 2t + 1
        let x21 = FracSeries::from_polynomial(&poly("t + t^2"), b).unwrap();
        let d = x21.caputo_transform(Rational::ONE).unwrap();
        assert_eq!(d, {
            let mut want = FracSeries::from_polynomial(&poly("2*t + 1"), b).unwrap();
            want.reliable = 3;
            want
        });

        assert!(matches!(t2.caputo_transform(r(1, 3)), Err(Error::OffGridExponent { .. })));
    }

    #[test]
    fn rebased_keeps_coefficients() {
        let b = basis(0.0, r(1, 2), 6);
        let s = FracSeries::from_coeffs(b, vec![1.0, 2.0, 3.0]);
        let moved = s.rebased(b.with_t0(1.0)).unwrap();
        assert_eq!(moved.coeffs(), s.coeffs());
        assert_eq!(moved.basis().t0(), 1.0);
        assert_eq!(s.rebased(basis(1.0, r(1, 3), 6)), Err(Error::IncompatibleBases));
        assert_eq!(s.rebased(basis(1.0, r(1, 2), 7)), Err(Error::IncompatibleBases));
    }

    #[test]
    fn nonzero_terms_report_exponents() {
        let b = basis(0.0, r(1, 3), 6);
        let s = FracSeries::from_coeffs(b, vec![0.5, 0.0, 0.0, 0.0, -2.0]);
        let terms = s.nonzero_terms().unwrap();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[1].k, 4);
        assert_eq!(terms[1].exponent, r(4, 3));
        assert_eq!(terms[1].coeff, -2.0);
    }
}
