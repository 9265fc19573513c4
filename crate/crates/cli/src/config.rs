//! Flat `key = value` run configuration for FDE problems.
//!
//! ```text
//! [problem]
//! alpha = 1.9
//! a = 0.0
//! b = 20.0
//! frac_coeff = 1.0
//! coeff_x = 1.0        # coefficient of x
//! coeff_xp = 0.0       # coefficient of x', then coeff_xpp, ...
//! damping = 1.0        # optional extra x' term
//! forcing = cos(t)
//! ic0 = 0.0
//! ic1 = 1.0
//! [approx]
//! m = 0
//! N = 8
//! [solver]
//! abs_tol = 1e-8
//! rel_tol = 1e-8
//! epsilon_start = 2e-5 # optional
//! [output]
//! grid = 100
//! path = out.csv       # optional
//! ```
//!
//! Unknown sections or keys, duplicates, and coefficients or initial
//! conditions beyond the order are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use caputo_core::{Expr, FdeProblem, FractionalOrder, SolverConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub frac_coeff: f64,
    /// Coefficients of `x, x', …`; entries past the end are zero.
    pub coeffs: Vec<f64>,
    pub damping: Option<f64>,
    /// Forcing source text, kept verbatim so printing round-trips.
    pub forcing: String,
    /// `x(a), x'(a), …`, followed by the extra conditions needed when `m ≥ 1`.
    pub ics: Vec<f64>,
    pub m: u32,
    pub n_terms: u32,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub epsilon_start: Option<f64>,
    pub grid: usize,
    pub path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        RunConfig {
            alpha: f64::NAN,
            a: 0.0,
            b: 1.0,
            frac_coeff: 1.0,
            coeffs: Vec::new(),
            damping: None,
            forcing: String::new(),
            ics: Vec::new(),
            m: 0,
            n_terms: 50,
            abs_tol: solver.abs_tol,
            rel_tol: solver.rel_tol,
            epsilon_start: None,
            grid: solver.grid_size,
            path: None,
        }
    }
}

fn coeff_key(j: usize) -> String {
    format!("coeff_x{}", "p".repeat(j))
}

fn parse_coeff_key(key: &str) -> Option<usize> {
    let primes = key.strip_prefix("coeff_x")?;
    primes.bytes().all(|c| c == b'p').then_some(primes.len())
}

fn parse_ic_key(key: &str) -> Option<usize> {
    let digits = key.strip_prefix("ic")?;
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn usage(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("config line {line}: {msg}"))
}

fn number<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| usage(line, format!("`{key}` expects a number, got `{value}`")))
}

impl RunConfig {
    /// Order `n = ⌈α⌉`, or an error when `alpha` is missing or invalid.
    pub fn order(&self) -> CliResult<FractionalOrder> {
        if self.alpha.is_nan() {
            return Err(CliError::Usage("alpha is required".into()));
        }
        FractionalOrder::new(self.alpha).map_err(CliError::numeric)
    }

    pub fn parse(text: &str) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut coeffs = BTreeMap::new();
        let mut ics = BTreeMap::new();
        let mut seen = std::collections::HashSet::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim();
                if !matches!(name, "problem" | "approx" | "solver" | "output") {
                    return Err(usage(line, format!("unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| usage(line, format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if section.is_empty() {
                return Err(usage(line, format!("`{key}` appears before any section")));
            }
            if !seen.insert(format!("{section}.{key}")) {
                return Err(usage(line, format!("duplicate key `{key}` in [{section}]")));
            }
            match (section.as_str(), key) {
                ("problem", "alpha") => cfg.alpha = number(line, key, value)?,
                ("problem", "a") => cfg.a = number(line, key, value)?,
                ("problem", "b") => cfg.b = number(line, key, value)?,
                ("problem", "frac_coeff") => cfg.frac_coeff = number(line, key, value)?,
                ("problem", "damping") => cfg.damping = Some(number(line, key, value)?),
                ("problem", "forcing") => {
                    Expr::parse(value).map_err(|e| usage(line, e))?;
                    cfg.forcing = value.to_string();
                }
                ("problem", k) if parse_coeff_key(k).is_some() => {
                    coeffs.insert(parse_coeff_key(k).unwrap(), number::<f64>(line, key, value)?);
                }
                ("problem", k) if parse_ic_key(k).is_some() => {
                    ics.insert(parse_ic_key(k).unwrap(), number::<f64>(line, key, value)?);
                }
                ("approx", "m") => cfg.m = number(line, key, value)?,
                ("approx", "N") => cfg.n_terms = number(line, key, value)?,
                ("solver", "abs_tol") => cfg.abs_tol = number(line, key, value)?,
                ("solver", "rel_tol") => cfg.rel_tol = number(line, key, value)?,
                ("solver", "epsilon_start") => cfg.epsilon_start = Some(number(line, key, value)?),
                ("output", "grid") => cfg.grid = number(line, key, value)?,
                ("output", "path") => cfg.path = Some(PathBuf::from(value)),
                (s, k) => return Err(usage(line, format!("unknown key `{k}` in [{s}]"))),
            }
        }
        let order = cfg.order()?;
        let n = order.n() as usize;
        if let Some((&j, _)) = coeffs.range(n..).next() {
            return Err(CliError::Usage(format!(
                "`{}` is not allowed: alpha = {} only has integer terms below order {n}",
                coeff_key(j),
                cfg.alpha
            )));
        }
        cfg.coeffs = (0..n).map(|j| coeffs.get(&j).copied().unwrap_or(0.0)).collect();
        let ic_count = n + cfg.m as usize;
        if let Some((&j, _)) = ics.range(ic_count..).next() {
            return Err(CliError::Usage(format!(
                "`ic{j}` is not allowed: alpha = {} with m = {} takes ic0..ic{}",
                cfg.alpha,
                cfg.m,
                ic_count - 1
            )));
        }
        cfg.ics = (0..ic_count).map(|j| ics.get(&j).copied().unwrap_or(0.0)).collect();
        if cfg.forcing.is_empty() {
            return Err(CliError::Usage("[problem] forcing is required".into()));
        }
        Ok(cfg)
    }

    /// Canonical text form; [`RunConfig::parse`] reads it back unchanged.
    pub fn render(&self) -> String {
        let mut s = String::from("[problem]\n");
        let _ = writeln!(s, "alpha = {:?}", self.alpha);
        let _ = writeln!(s, "a = {:?}", self.a);
        let _ = writeln!(s, "b = {:?}", self.b);
        let _ = writeln!(s, "frac_coeff = {:?}", self.frac_coeff);
        for (j, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{} = {c:?}", coeff_key(j));
        }
        if let Some(d) = self.damping {
            let _ = writeln!(s, "damping = {d:?}");
        }
        let _ = writeln!(s, "forcing = {}", self.forcing);
        for (j, v) in self.ics.iter().enumerate() {
            let _ = writeln!(s, "ic{j} = {v:?}");
        }
        s.push_str("\n[approx]\n");
        let _ = writeln!(s, "m = {}", self.m);
        let _ = writeln!(s, "N = {}", self.n_terms);
        s.push_str("\n[solver]\n");
        let _ = writeln!(s, "abs_tol = {:?}", self.abs_tol);
        let _ = writeln!(s, "rel_tol = {:?}", self.rel_tol);
        if let Some(e) = self.epsilon_start {
            let _ = writeln!(s, "epsilon_start = {e:?}");
        }
        s.push_str("\n[output]\n");
        let _ = writeln!(s, "grid = {}", self.grid);
        if let Some(p) = &self.path {
            let _ = writeln!(s, "path = {}", p.display());
        }
        s
    }

    /// Resizes coefficient and initial-condition lists to the current order
    /// and depth, padding with zeros.
    pub fn normalize(&mut self) -> CliResult<()> {
        let n = self.order()?.n() as usize;
        if self.coeffs.len() > n {
            return Err(CliError::Usage(format!(
                "{} integer-order coefficients given, alpha = {} allows {n}",
                self.coeffs.len(),
                self.alpha
            )));
        }
        let ic_count = n + self.m as usize;
        if self.ics.len() > ic_count {
            return Err(CliError::Usage(format!(
                "{} initial conditions given, alpha = {} with m = {} takes {ic_count}",
                self.ics.len(),
                self.alpha,
                self.m
            )));
        }
        self.coeffs.resize(n, 0.0);
        self.ics.resize(ic_count, 0.0);
        Ok(())
    }

    pub fn problem(&self) -> CliResult<FdeProblem> {
        let order = self.order()?;
        let n = order.n() as usize;
        if self.forcing.is_empty() {
            return Err(CliError::Usage("a forcing expression is required".into()));
        }
        let forcing = Expr::parse(&self.forcing).map_err(CliError::numeric)?;
        let mut problem = FdeProblem::new(
            order,
            self.a,
            self.b,
            self.frac_coeff,
            forcing,
            self.ics[..n].to_vec(),
        )
        .with_integer_coefficients(self.coeffs.clone());
        problem.first_order_extra = self.damping;
        problem.extra_initial_conditions = self.ics[n..].to_vec();
        problem.validate().map_err(CliError::solver)?;
        Ok(problem)
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            epsilon_start: self.epsilon_start,
            grid_size: self.grid,
            m: self.m,
            ..SolverConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPRING: &str = "\
# mass-spring-damper
[problem]
alpha = 1.9
b = 20
coeff_x = 1
damping = 1
forcing = cos(t)
ic1 = 1

[approx]
N = 8
";

    #[test]
    fn parses_and_fills_defaults() {
        let cfg = RunConfig::parse(SPRING).unwrap();
        assert_eq!(cfg.alpha, 1.9);
        assert_eq!(cfg.a, 0.0);
        assert_eq!(cfg.b, 20.0);
        assert_eq!(cfg.coeffs, vec![1.0, 0.0]);
        assert_eq!(cfg.damping, Some(1.0));
        assert_eq!(cfg.ics, vec![0.0, 1.0]);
        assert_eq!(cfg.n_terms, 8);
        assert_eq!(cfg.grid, 100);
        let problem = cfg.problem().unwrap();
        assert_eq!(problem.initial_conditions, vec![0.0, 1.0]);
    }

    #[test]
    fn render_round_trips() {
        let mut cfg = RunConfig::parse(SPRING).unwrap();
        assert_eq!(RunConfig::parse(&cfg.render()).unwrap(), cfg);
        cfg.epsilon_start = Some(1.0e-7);
        cfg.path = Some(PathBuf::from("out dir/x.csv"));
        cfg.frac_coeff = 0.1 + 0.2;
        assert_eq!(RunConfig::parse(&cfg.render()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            "[problem]\nalpha = 1.5\nforcing = t\nspeed = 3\n",
            "[physics]\n",
            "alpha = 1.5\n",
            "[problem]\nalpha = 1.5\nalpha = 1.6\nforcing = t\n",
            "[problem]\nalpha = 1.5\nforcing = t\ncoeff_xpp = 1\n",
            "[problem]\nalpha = 1.5\nforcing = t\nic2 = 1\n",
            "[problem]\nalpha = 1.5\n",
            "[problem]\nalpha = x\nforcing = t\n",
            "[problem]\nalpha = 1.5\nforcing = t +\n",
            "[problem]\nforcing = t\n",
            "[problem]\nalpha = 2\nforcing = t\n",
            "[problem]\nalpha = 1.5\nforcing = t\nnonsense\n",
        ];
        for text in cases {
            assert!(
                matches!(RunConfig::parse(text), Err(CliError::Usage(_))),
                "accepted: {text}"
            );
        }
    }

    #[test]
    fn extra_conditions_follow_depth() {
        let text = "[problem]\nalpha = 0.5\nforcing = t\nic0 = 1\nic1 = 2\n[approx]\nm = 1\nN = 10\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.ics, vec![1.0, 2.0]);
        let problem = cfg.problem().unwrap();
        assert_eq!(problem.extra_initial_conditions, vec![2.0]);
    }
}
