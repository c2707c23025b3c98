use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Polynomial in `t` with real coefficients, lowest power first.
///
/// The coefficient vector never ends in an exact zero; the zero polynomial
/// has no coefficients at all.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn monomial(c: f64, power: usize) -> Self {
        let mut coeffs = vec![0.0; power + 1];
        coeffs[power] = c;
        Polynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `t^power` (zero beyond the degree).
    pub fn coeff(&self, power: usize) -> f64 {
        self.coeffs.get(power).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Re-centers at `c`: returns `q` with `q(s) = p(c + s)`.
    ///
    /// Binomial expansion `q_j = Σ_{i≥j} p_i C(i, j) c^(i−j)`.
    pub fn taylor_shift(&self, c: f64) -> Polynomial {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        // binomial row C(i, ·), built incrementally
        let mut row: Vec<f64> = Vec::with_capacity(n);
        for (i, &p) in self.coeffs.iter().enumerate() {
            row.push(1.0);
            for j in (1..i).rev() {
                row[j] += row[j - 1];
            }
            if p == 0.0 {
                continue;
            }
            let mut c_pow = 1.0;
            for j in (0..=i).rev() {
                out[j] += p * row[j] * c_pow;
                c_pow *= c;
            }
        }
        Polynomial::new(out)
    }

    /// Parses `c`, `c*t`, `c*t^k`, `t`, `t^k` terms joined by `+` / `-`.
    /// Coefficients are decimal or `p/q` literals. On failure the error
    /// carries the 1-based character column.
    pub fn parse(text: &str) -> Result<Polynomial, PolyParseError> {
        Parser::new(text).parse()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyParseError {
    pub column: usize,
    pub message: String,
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Polynomial::parse(s).map_err(|e| Error::Syntax {
            line: 1,
            column: e.column,
            message: e.message,
        })
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (power, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let magnitude = if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
                c.abs()
            } else {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
                c.abs()
            };
            first = false;
            match (power, magnitude == 1.0) {
                (0, _) => write!(f, "{magnitude}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{magnitude}*t")?,
                (k, true) => write!(f, "t^{k}")?,
                (k, false) => write!(f, "{magnitude}*t^{k}")?,
            }
        }
        Ok(())
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser { chars: text.chars().collect(), pos: 0 }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, PolyParseError> {
        Err(PolyParseError { column: self.pos + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sign(&mut self) -> Option<f64> {
        self.skip_ws();
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(1.0)
            }
            Some('-') | Some('−') => {
                self.pos += 1;
                Some(-1.0)
            }
            _ => None,
        }
    }

    fn parse(mut self) -> Result<Polynomial, PolyParseError> {
        let mut coeffs: Vec<f64> = Vec::new();
        let mut sign = self.sign().unwrap_or(1.0);
        loop {
            let (c, power) = self.term()?;
            if coeffs.len() <= power {
                coeffs.resize(power + 1, 0.0);
            }
            coeffs[power] += sign * c;
            self.skip_ws();
            if self.peek().is_none() {
                break;
            }
            sign = match self.sign() {
                Some(s) => s,
                None => return self.err(format!("unexpected character {:?}", self.chars[self.pos])),
            };
        }
        Ok(Polynomial::new(coeffs))
    }

    fn term(&mut self) -> Result<(f64, usize), PolyParseError> {
        self.skip_ws();
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let n = self.number()?;
                if self.eat('/') {
                    self.skip_ws();
                    let d = self.number()?;
                    if d == 0.0 {
                        return self.err("zero denominator");
                    }
                    Some(n / d)
                } else {
                    Some(n)
                }
            }
            _ => None,
        };
        if coeff.is_some() {
            let star = self.eat('*');
            self.skip_ws();
            if self.peek() != Some('t') {
                if star {
                    return self.err("expected `t` after `*`");
                }
                return Ok((coeff.unwrap_or(1.0), 0));
            }
        }
        self.skip_ws();
        if self.peek() != Some('t') {
            return self.err("expected a coefficient or `t`");
        }
        self.pos += 1;
        let power = if self.eat('^') {
            self.skip_ws();
            self.integer()?
        } else {
            1
        };
        Ok((coeff.unwrap_or(1.0), power))
    }

    fn integer(&mut self) -> Result<usize, PolyParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer exponent");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        match s.parse() {
            Ok(k) if k <= 1024 => Ok(k),
            _ => {
                self.pos = start;
                self.err("exponent too large")
            }
        }
    }

    fn number(&mut self) -> Result<f64, PolyParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.peek() == Some('.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if exp_start == self.pos {
                self.pos = save;
            }
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => {
                self.pos = start;
                self.err(format!("invalid number {s:?}"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s).unwrap()
    }

    #[test]
    fn parses_the_documented_syntax() {
        assert_eq!(p("2*t + 1").coeffs(), &[1.0, 2.0]);
        assert_eq!(p("t^2").coeffs(), &[0.0, 0.0, 1.0]);
        assert_eq!(p("0"), Polynomial::zero());
        assert_eq!(p("-t + 1/4*t^3").coeffs(), &[0.0, -1.0, 0.0, 0.25]);
        assert_eq!(p("3 − 2*t").coeffs(), &[3.0, -2.0]);
        assert_eq!(p("1.5e-1 * t").coeffs(), &[0.0, 0.15]);
        assert_eq!(p("2t + t").coeffs(), &[0.0, 3.0]);
    }

    #[test]
    fn reports_columns() {
        let e = Polynomial::parse("2*t + x").unwrap_err();
        assert_eq!(e.column, 7);
        let e = Polynomial::parse("2* + 1").unwrap_err();
        assert_eq!(e.column, 4);
        assert!(Polynomial::parse("t^").is_err());
        assert!(Polynomial::parse("1/0").is_err());
        assert!(Polynomial::parse("").is_err());
        assert!(Polynomial::parse("2 3").is_err());
    }

    #[test]
    fn display_parses_back() {
        for s in ["2*t + 1", "-t^3 + 0.5*t - 7", "0", "t", "-1", "0.1*t^2"] {
            let q = p(s);
            assert_eq!(p(&q.to_string()), q, "{s} -> {q}");
        }
        assert_eq!(p("1/3").to_string().parse::<Polynomial>().unwrap(), p("1/3"));
    }

    #[test]
    fn taylor_shift_recenters() {
        // t = 1/3 + (t - 1/3)
        let q = p("t").taylor_shift(1.0 / 3.0);
        assert_eq!(q.coeffs(), &[1.0 / 3.0, 1.0]);
        // (c + s)^3 = c^3 + 3c^2 s + 3c s^2 + s^3
        let q = p("t^3").taylor_shift(2.0);
        assert_eq!(q.coeffs(), &[8.0, 12.0, 6.0, 1.0]);
        let r = p("1 - 3*t + 0.5*t^4");
        let shifted = r.taylor_shift(-0.7);
        for s in [0.0, 0.3, 1.9] {
            assert!((shifted.eval(s) - r.eval(s - 0.7)).abs() < 1e-13);
        }
    }

    #[test]
    fn arithmetic() {
        let a = p("1 + t");
        let b = p("1 - t");
        assert_eq!(a.mul(&b).coeffs(), &[1.0, 0.0, -1.0]);
        assert_eq!(a.add(&b.scale(1.0)).coeffs(), &[2.0]);
        assert!(a.add(&a.scale(-1.0)).is_zero());
        assert_eq!(p("3*t^2").degree(), 2);
        assert_eq!(Polynomial::monomial(2.0, 3).eval(2.0), 16.0);
    }
}
