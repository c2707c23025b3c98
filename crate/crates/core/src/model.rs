//! Problem statement for a linear Caputo system with constant state delays
//!
//! ```text
//! ᶜD^ν x(t) = A₀(t) x(t) + Σᵢ Aᵢ(t) x(t − τᵢ) + B(t) u(t),   t ≥ 0
//! x(t) = Φ(t),                                              t ∈ [−τ_r, 0]
//! ```
//!
//! with polynomial coefficient data, and its line-oriented text format.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::series::Polynomial;

/// Matrix of polynomials in `t`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    /// `None` when `entries.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, entries: Vec<Polynomial>) -> Option<Self> {
        (entries.len() == rows * cols).then_some(PolyMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, entries: vec![Polynomial::zero(); rows * cols] }
    }

    /// `None` if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Polynomial>>) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        PolyMatrix::new(n, cols, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    fn max_degree(&self) -> usize {
        self.entries.iter().map(Polynomial::degree).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelaySystem {
    /// Caputo order ν ∈ (0, 1].
    pub nu: Rational,
    pub n: usize,
    pub m: usize,
    /// Strictly increasing positive delays τ₁ < … < τ_r.
    pub delays: Vec<Rational>,
    /// `a[0]` multiplies the undelayed state, `a[i]` the state delayed by
    /// `delays[i-1]`.
    pub a: Vec<PolyMatrix>,
    pub b: PolyMatrix,
    pub u: Vec<Polynomial>,
    /// Initial complete state on `[−τ_r, 0]`.
    pub phi: Vec<Polynomial>,
    pub horizon: Rational,
}

impl DelaySystem {
    pub fn r(&self) -> usize {
        self.delays.len()
    }

    /// Highest polynomial degree among all coefficient data.
    pub fn max_degree(&self) -> usize {
        let vectors = self.u.iter().chain(&self.phi).map(Polynomial::degree);
        self.a
            .iter()
            .chain(std::iter::once(&self.b))
            .map(PolyMatrix::max_degree)
            .chain(vectors)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Highest retained grid index per segment.
    pub k_max: usize,
    /// Spacing of the sampled trajectory.
    pub sample_step: Rational,
}

impl SolverConfig {
    pub const DEFAULT_K: usize = 40;

    /// Warns when `K/q < deg_max + ν·J`, i.e. the grid may be too short to
    /// hold the exponents produced over `num_segments` segments.
    pub fn truncation_warning(&self, sys: &DelaySystem, num_segments: usize) -> Option<String> {
        let q = sys.nu.denom() as f64;
        let reach = self.k_max as f64 / q;
        let need = sys.max_degree() as f64 + sys.nu.to_f64() * num_segments as f64;
        (reach < need).then(|| {
            format!(
                "K = {} reaches exponent {reach} but data degree {} plus ν·{num_segments} needs {need}; \
                 higher-order terms will be truncated",
                self.k_max,
                sys.max_degree()
            )
        })
    }
}

/// A structural problem with a [`DelaySystem`] or [`SolverConfig`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NuOutOfRange(Rational),
    ZeroDimension(&'static str),
    DelayNotPositive(Rational),
    DelaysNotIncreasing,
    HorizonNotPositive(Rational),
    DimensionMismatch(String),
    ZeroTruncation,
    SampleStepNotPositive(Rational),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NuOutOfRange(nu) => write!(f, "ν out of (0,1]: nu = {nu}"),
            Violation::ZeroDimension(what) => write!(f, "dimension mismatch: {what} must be positive"),
            Violation::DelayNotPositive(tau) => write!(f, "delay not positive: {tau}"),
            Violation::DelaysNotIncreasing => write!(f, "delays not increasing"),
            Violation::HorizonNotPositive(h) => write!(f, "horizon not positive: {h}"),
            Violation::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Violation::ZeroTruncation => write!(f, "K must be positive"),
            Violation::SampleStepNotPositive(s) => write!(f, "sample_step not positive: {s}"),
        }
    }
}

/// Checks every structural invariant of `sys` and reports all violations.
///
/// Commensurability needs no check: rational delays always have rational
/// ratios.
pub fn validate(sys: &DelaySystem) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if !sys.nu.is_positive() || sys.nu > Rational::ONE {
        out.push(Violation::NuOutOfRange(sys.nu));
    }
    if sys.n == 0 {
        out.push(Violation::ZeroDimension("state_dim"));
    }
    if sys.m == 0 {
        out.push(Violation::ZeroDimension("control_dim"));
    }
    for tau in sys.delays.iter().filter(|t| !t.is_positive()) {
        out.push(Violation::DelayNotPositive(*tau));
    }
    if sys.delays.windows(2).any(|w| w[0] >= w[1]) {
        out.push(Violation::DelaysNotIncreasing);
    }
    if !sys.horizon.is_positive() {
        out.push(Violation::HorizonNotPositive(sys.horizon));
    }
    if sys.a.len() != sys.r() + 1 {
        out.push(Violation::DimensionMismatch(format!(
            "{} delays need {} A matrices, found {}",
            sys.r(),
            sys.r() + 1,
            sys.a.len()
        )));
    }
    for (i, a) in sys.a.iter().enumerate() {
        if a.rows() != sys.n || a.cols() != sys.n {
            out.push(Violation::DimensionMismatch(format!(
                "A{i} is {}x{}, expected {}x{}",
                a.rows(),
                a.cols(),
                sys.n,
                sys.n
            )));
        }
    }
    if sys.b.rows() != sys.n || sys.b.cols() != sys.m {
        out.push(Violation::DimensionMismatch(format!(
            "B is {}x{}, expected {}x{}",
            sys.b.rows(),
            sys.b.cols(),
            sys.n,
            sys.m
        )));
    }
    if sys.u.len() != sys.m {
        out.push(Violation::DimensionMismatch(format!(
            "u has {} components, expected {}",
            sys.u.len(),
            sys.m
        )));
    }
    if sys.phi.len() != sys.n {
        out.push(Violation::DimensionMismatch(format!(
            "phi has {} components, expected {}",
            sys.phi.len(),
            sys.n
        )));
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

pub fn validate_config(cfg: &SolverConfig) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if cfg.k_max == 0 {
        out.push(Violation::ZeroTruncation);
    }
    if !cfg.sample_step.is_positive() {
        out.push(Violation::SampleStepNotPositive(cfg.sample_step));
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Parses and fully validates a problem file.
pub fn parse_problem(text: &str) -> Result<(DelaySystem, SolverConfig)> {
    let (sys, cfg) = parse_document(text)?;
    let mut violations = validate(&sys).err().unwrap_or_default();
    violations.extend(validate_config(&cfg).err().unwrap_or_default());
    if violations.is_empty() {
        Ok((sys, cfg))
    } else {
        Err(Error::Invalid(violations))
    }
}

/// Parses a problem file, checking syntax only.
///
/// Absent `[A*]`, `[B]`, `[u]` and `[phi]` sections default to zeros of the
/// declared shape; an absent `[solver]` section gives `K = 40` and a
/// sample step of `horizon / 100`.
pub fn parse_document(text: &str) -> Result<(DelaySystem, SolverConfig)> {
    DocParser::default().run(text)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    Header,
    A(usize),
    B,
    U,
    Phi,
    Solver,
}

#[derive(Default)]
struct DocParser {
    nu: Option<Rational>,
    n: Option<usize>,
    m: Option<usize>,
    delays: Option<Vec<Rational>>,
    horizon: Option<Rational>,
    a: Vec<Option<Vec<Vec<Polynomial>>>>,
    b: Option<Vec<Vec<Polynomial>>>,
    u: Option<Vec<Polynomial>>,
    phi: Option<Vec<Polynomial>>,
    k_max: Option<usize>,
    sample_step: Option<Rational>,
    seen: Vec<Section>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, column, message: message.into() }
}

impl DocParser {
    fn run(mut self, text: &str) -> Result<(DelaySystem, SolverConfig)> {
        let mut section = Section::Header;
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let col0 = content.len() - content.trim_start().len();
            let col = content[..col0].chars().count() + 1;
            if let Some(inner) = trimmed.strip_prefix('[') {
                let name = inner
                    .strip_suffix(']')
                    .ok_or_else(|| syntax(line_no, col, "unterminated section header"))?
                    .trim();
                section = self.open_section(name, line_no, col)?;
                continue;
            }
            match section {
                Section::Header | Section::Solver => self.key_value(section, content, line_no)?,
                Section::A(i) => {
                    let row = self.row(content, line_no)?;
                    self.a[i].get_or_insert_with(Vec::new).push(row);
                }
                Section::B => {
                    let row = self.row(content, line_no)?;
                    self.b.get_or_insert_with(Vec::new).push(row);
                }
                Section::U => {
                    let row = self.row(content, line_no)?;
                    self.u.get_or_insert_with(Vec::new).extend(row);
                }
                Section::Phi => {
                    let row = self.row(content, line_no)?;
                    self.phi.get_or_insert_with(Vec::new).extend(row);
                }
            }
        }
        self.finish(last_line + 1)
    }

    fn open_section(&mut self, name: &str, line: usize, col: usize) -> Result<Section> {
        let section = match name {
            "B" => Section::B,
            "u" => Section::U,
            "phi" => Section::Phi,
            "solver" => Section::Solver,
            _ => match name.strip_prefix('A').map(str::parse::<usize>) {
                Some(Ok(i)) => Section::A(i),
                _ => return Err(syntax(line, col, format!("unknown section [{name}]"))),
            },
        };
        if self.seen.contains(&section) {
            return Err(syntax(line, col, format!("duplicate section [{name}]")));
        }
        if let Section::A(i) = section {
            let r = self
                .delays
                .as_ref()
                .ok_or_else(|| syntax(line, col, "`delays` must be given before [A*] sections"))?
                .len();
            if i > r {
                return Err(syntax(line, col, format!("section [A{i}] but only {r} delays")));
            }
            if self.a.len() < r + 1 {
                self.a.resize(r + 1, None);
            }
            self.a[i] = Some(Vec::new());
        }
        self.seen.push(section);
        Ok(section)
    }

    fn key_value(&mut self, section: Section, content: &str, line: usize) -> Result<()> {
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| syntax(line, 1, "expected `key = value`"))?;
        let value_col = key.chars().count() + 2 + (value.len() - value.trim_start().len());
        let (key, value) = (key.trim(), value.trim());
        let rational = |what: &str| -> Result<Rational> {
            value.parse::<Rational>().map_err(|e| match e {
                Error::ZeroDenominator | Error::RationalOverflow => syntax(line, value_col, e.to_string()),
                _ => syntax(line, value_col, format!("non-rational {what}: expected p/q, found {value:?}")),
            })
        };
        let integer = |what: &str| -> Result<usize> {
            value
                .parse::<usize>()
                .map_err(|_| syntax(line, value_col, format!("{what} must be a nonnegative integer")))
        };
        match (section, key) {
            (Section::Header, "nu") => self.nu = Some(rational("ν")?),
            (Section::Header, "state_dim") => self.n = Some(integer("state_dim")?),
            (Section::Header, "control_dim") => self.m = Some(integer("control_dim")?),
            (Section::Header, "horizon") => self.horizon = Some(rational("horizon")?),
            (Section::Header, "delays") => {
                let mut delays = Vec::new();
                if !value.is_empty() {
                    for item in value.split(',') {
                        delays.push(item.trim().parse::<Rational>().map_err(|_| {
                            syntax(line, value_col, format!("non-rational delay {:?}", item.trim()))
                        })?);
                    }
                }
                self.delays = Some(delays);
            }
            (Section::Solver, "K") => self.k_max = Some(integer("K")?),
            (Section::Solver, "sample_step") => self.sample_step = Some(rational("sample_step")?),
            _ => return Err(syntax(line, 1, format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn row(&self, content: &str, line: usize) -> Result<Vec<Polynomial>> {
        let mut offset = 0;
        let mut out = Vec::new();
        for cell in content.split(',') {
            let p = Polynomial::parse(cell)
                .map_err(|e| syntax(line, offset + e.column, e.message))?;
            out.push(p);
            offset += cell.chars().count() + 1;
        }
        Ok(out)
    }

    fn finish(self, eof_line: usize) -> Result<(DelaySystem, SolverConfig)> {
        let missing = |key: &str| syntax(eof_line, 1, format!("missing key `{key}`"));
        let nu = self.nu.ok_or_else(|| missing("nu"))?;
        let n = self.n.ok_or_else(|| missing("state_dim"))?;
        let m = self.m.ok_or_else(|| missing("control_dim"))?;
        let delays = self.delays.ok_or_else(|| missing("delays"))?;
        let horizon = self.horizon.ok_or_else(|| missing("horizon"))?;

        let ragged = |name: String| syntax(eof_line, 1, format!("section [{name}] has rows of unequal length"));
        let mut a = Vec::with_capacity(delays.len() + 1);
        for i in 0..=delays.len() {
            match self.a.get(i).cloned().flatten() {
                Some(rows) => a.push(PolyMatrix::from_rows(rows).ok_or_else(|| ragged(format!("A{i}")))?),
                None => a.push(PolyMatrix::zeros(n, n)),
            }
        }
        let b = match self.b {
            Some(rows) => PolyMatrix::from_rows(rows).ok_or_else(|| ragged("B".into()))?,
            None => PolyMatrix::zeros(n, m),
        };
        let u = self.u.unwrap_or_else(|| vec![Polynomial::zero(); m]);
        let phi = self.phi.unwrap_or_else(|| vec![Polynomial::zero(); n]);

        let sample_step = match self.sample_step {
            Some(s) => s,
            None => horizon.checked_div(Rational::from_integer(100))?,
        };
        let cfg = SolverConfig { k_max: self.k_max.unwrap_or(SolverConfig::DEFAULT_K), sample_step };
        Ok((DelaySystem { nu, n, m, delays, a, b, u, phi, horizon }, cfg))
    }
}

/// Renders a problem in the text format accepted by [`parse_problem`].
pub fn to_problem_text(sys: &DelaySystem, cfg: &SolverConfig) -> String {
    let mut s = String::new();
    let join = |items: Vec<String>| items.join(", ");
    let _ = writeln!(s, "nu = {}", sys.nu);
    let _ = writeln!(s, "state_dim = {}", sys.n);
    let _ = writeln!(s, "control_dim = {}", sys.m);
    let _ = writeln!(s, "delays = {}", join(sys.delays.iter().map(|d| d.to_string()).collect()));
    let _ = writeln!(s, "horizon = {}", sys.horizon);
    let matrix = |s: &mut String, name: String, mat: &PolyMatrix| {
        let _ = writeln!(s, "[{name}]");
        for i in 0..mat.rows() {
            let row = (0..mat.cols()).map(|j| mat.get(i, j).to_string()).collect();
            let _ = writeln!(s, "{}", join(row));
        }
    };
    for (i, a) in sys.a.iter().enumerate() {
        matrix(&mut s, format!("A{i}"), a);
    }
    matrix(&mut s, "B".into(), &sys.b);
    let _ = writeln!(s, "[u]");
    for p in &sys.u {
        let _ = writeln!(s, "{p}");
    }
    let _ = writeln!(s, "[phi]");
    for p in &sys.phi {
        let _ = writeln!(s, "{p}");
    }
    let _ = writeln!(s, "[solver]");
    let _ = writeln!(s, "K = {}", cfg.k_max);
    let _ = writeln!(s, "sample_step = {}", cfg.sample_step);
    s
}
