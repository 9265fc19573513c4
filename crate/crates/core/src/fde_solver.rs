//! Caputo FDEs of the form
//!
//! ```text
//! c_α D^α x(t) + Σ_{j<n} c_j x^{(j)}(t) + c_v x'(t) = f(t),   x^{(j)}(a) given,
//! ```
//!
//! rewritten as an ordinary system by replacing `D^α x` with its truncated
//! expansion. The state is `(x, x', …, x^{(n+m-1)}, V_0, …, V_{N-m-1})`; the
//! expansion is solved algebraically for `x^{(n+m)}`, and `V_j' = (t-a)^j x^{(n)}`.
//! With `m = 0` (the default) this needs exactly the `n` classical initial
//! conditions. Depth `m ≥ 1` additionally needs `x^{(n)}(a), …, x^{(n+m-1)}(a)`
//! and is experimental.
//!
//! The coefficient of `x^{(n+m)}` vanishes at `t = a`, so integration starts
//! at `a + ε` from a Taylor-shifted state with all moments zero.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::frac_core::{
    uniform_grid, ApproxParams, CoefficientTable, FractionalOrder, GridFunction, KahanSum, Side,
};
use crate::ode::{self, IntegratorConfig, Trajectory};
use crate::reference::l2_grid_error;

/// A semilinear constant-coefficient Caputo FDE on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdeProblem {
    pub order: FractionalOrder,
    pub a: f64,
    pub b: f64,
    /// `c_α`, multiplies the Caputo term; must be non-zero.
    pub frac_coefficient: f64,
    /// `c_0..c_{n-1}` multiplying `x, x', …, x^{(n-1)}`.
    pub integer_coefficients: Vec<f64>,
    /// Extra coefficient on `x'` (a damping term), only allowed for `n ≥ 2`.
    pub first_order_extra: Option<f64>,
    pub forcing: Expr,
    /// `x(a), x'(a), …, x^{(n-1)}(a)`.
    pub initial_conditions: Vec<f64>,
    /// `x^{(n)}(a), …, x^{(n+m-1)}(a)`; only used when `m ≥ 1`.
    pub extra_initial_conditions: Vec<f64>,
}

impl FdeProblem {
    /// Problem with zero integer-order coefficients and no extra conditions.
    pub fn new(
        order: FractionalOrder,
        a: f64,
        b: f64,
        frac_coefficient: f64,
        forcing: Expr,
        initial_conditions: Vec<f64>,
    ) -> Self {
        let n = order.n() as usize;
        FdeProblem {
            order,
            a,
            b,
            frac_coefficient,
            integer_coefficients: vec![0.0; n],
            first_order_extra: None,
            forcing,
            initial_conditions,
            extra_initial_conditions: Vec::new(),
        }
    }

    pub fn with_integer_coefficients(mut self, coefficients: Vec<f64>) -> Self {
        self.integer_coefficients = coefficients;
        self
    }

    pub fn with_first_order_extra(mut self, c_v: f64) -> Self {
        self.first_order_extra = Some(c_v);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.order.n() as usize;
        if !(self.a.is_finite() && self.b.is_finite() && self.a < self.b) {
            return Err(Error::InvalidParameter(format!(
                "interval [{}, {}] must be finite with a < b",
                self.a, self.b
            )));
        }
        if self.frac_coefficient == 0.0 || !self.frac_coefficient.is_finite() {
            return Err(Error::InvalidParameter(
                "the fractional coefficient must be finite and non-zero".into(),
            ));
        }
        if self.initial_conditions.len() != n {
            return Err(Error::InvalidParameter(format!(
                "order {} needs {n} initial conditions, got {}",
                self.order,
                self.initial_conditions.len()
            )));
        }
        if self.integer_coefficients.len() != n {
            return Err(Error::InvalidParameter(format!(
                "order {} needs {n} integer-order coefficients, got {}",
                self.order,
                self.integer_coefficients.len()
            )));
        }
        if self.first_order_extra.is_some() && n < 2 {
            return Err(Error::InvalidParameter(
                "a separate x' term needs n >= 2; use the integer coefficient of x' instead".into(),
            ));
        }
        Ok(())
    }

    /// Effective coefficient of `x^{(j)}` for `j < n`.
    fn coefficient(&self, j: usize) -> f64 {
        let extra = if j == 1 { self.first_order_extra.unwrap_or(0.0) } else { 0.0 };
        self.integer_coefficients[j] + extra
    }
}

/// Solver settings. `epsilon_start = None` means `1e-6 · (b - a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
    pub epsilon_start: Option<f64>,
    pub grid_size: usize,
    /// Expansion depth; values above 0 need extra initial conditions.
    pub m: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            max_steps: 1_000_000,
            epsilon_start: None,
            grid_size: 100,
            m: 0,
        }
    }
}

impl SolverConfig {
    pub fn epsilon(&self, a: f64, b: f64) -> f64 {
        self.epsilon_start.unwrap_or(1e-6 * (b - a))
    }

    fn validate(&self, a: f64, b: f64) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("solver tolerances must be positive".into()));
        }
        let eps = self.epsilon(a, b);
        if !(eps > 0.0 && eps <= 1e-3 * (b - a)) {
            return Err(Error::InvalidParameter(format!(
                "epsilon_start = {eps} must lie in (0, 1e-3 (b - a)]"
            )));
        }
        if self.grid_size < 2 {
            return Err(Error::InvalidParameter("output grid needs at least 2 points".into()));
        }
        Ok(())
    }
}

/// Flat augmented state `(y_0..y_{n+m-1}, v_0..v_{N-m-1})` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    pub t: f64,
    pub derivatives: Vec<f64>,
    pub moments: Vec<f64>,
}

impl AugmentedState {
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = self.derivatives.clone();
        out.extend_from_slice(&self.moments);
        out
    }

    pub fn from_flat(t: f64, flat: &[f64], derivative_count: usize) -> Self {
        AugmentedState {
            t,
            derivatives: flat[..derivative_count].to_vec(),
            moments: flat[derivative_count..].to_vec(),
        }
    }
}

/// `sign(v) · exp(q ln d + ln |v|)`, finite where `d^q` alone would overflow.
fn scaled_power(v: f64, d: f64, q: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    v.signum() * (q * d.ln() + v.abs().ln()).exp()
}

/// Right-hand side of the augmented system.
#[derive(Debug, Clone)]
pub struct AugmentedRhs {
    problem: FdeProblem,
    table: CoefficientTable,
}

impl AugmentedRhs {
    pub fn new(problem: FdeProblem, table: CoefficientTable) -> Result<Self> {
        problem.validate()?;
        if table.side() != Side::Left {
            return Err(Error::InvalidParameter(
                "FDEs are solved with the left expansion".into(),
            ));
        }
        if table.order() != problem.order {
            return Err(Error::InvalidParameter(
                "coefficient table order does not match the problem".into(),
            ));
        }
        let m = table.params().m() as usize;
        if problem.extra_initial_conditions.len() != m {
            return Err(Error::InvalidParameter(format!(
                "depth m = {m} needs {m} extra initial conditions x^(n)(a)..x^(n+m-1)(a), got {}",
                problem.extra_initial_conditions.len()
            )));
        }
        Ok(AugmentedRhs { problem, table })
    }

    pub fn problem(&self) -> &FdeProblem {
        &self.problem
    }

    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }

    /// Number of derivative states, `n + m`.
    pub fn derivative_count(&self) -> usize {
        (self.problem.order.n() + self.table.params().m()) as usize
    }

    pub fn dim(&self) -> usize {
        self.derivative_count() + self.table.params().moment_count()
    }

    /// Solves the expanded equation for `x^{(n+m)}` at `(t, state)`.
    pub fn top_derivative(&self, t: f64, state: &[f64]) -> Result<f64> {
        let p = &self.problem;
        let d = t - p.a;
        if !(d > 0.0) {
            return Err(Error::Singular(format!(
                "the coefficient of the top derivative vanishes at t = {t} <= a = {}",
                p.a
            )));
        }
        let n = p.order.n() as usize;
        let m = self.table.params().m() as usize;
        let alpha = p.order.alpha();
        let dc = self.derivative_count();

        let mut rest = KahanSum::default();
        rest.add(p.forcing.eval(t)?);
        for j in 0..n {
            rest.add(-p.coefficient(j) * state[j]);
        }
        let mut expansion = KahanSum::default();
        for k in 0..m {
            let q = (n + k) as f64 - alpha;
            expansion.add(self.table.a()[k] * scaled_power(state[n + k], d, q));
        }
        for (i, b_k) in self.table.b().iter().enumerate() {
            // k = m + 1 + i, V index i, exponent n + m - k - α.
            let q = n as f64 - 1.0 - i as f64 - alpha;
            expansion.add(b_k * scaled_power(state[dc + i], d, q));
        }
        rest.add(-p.frac_coefficient * expansion.total());
        let lead = p.frac_coefficient * self.table.a()[m] * d.powf((n + m) as f64 - alpha);
        Ok(rest.total() / lead)
    }

    /// Fills `dy` with the time derivative of the augmented state.
    pub fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let dc = self.derivative_count();
        let n = self.problem.order.n() as usize;
        let top = self.top_derivative(t, y)?;
        dy[..dc - 1].copy_from_slice(&y[1..dc]);
        dy[dc - 1] = top;
        let xn = if n == dc { top } else { y[n] };
        let d = t - self.problem.a;
        let mut w = 1.0;
        for v in dy[dc..].iter_mut() {
            *v = w * xn;
            w *= d;
        }
        Ok(())
    }
}

/// Builds the augmented right-hand side for truncation `N` (and `cfg.m`).
pub fn build_rhs(problem: &FdeProblem, n_terms: u32, m: u32) -> Result<AugmentedRhs> {
    let params = ApproxParams::new(m, n_terms)?;
    let table = CoefficientTable::new(problem.order, params, Side::Left)?;
    AugmentedRhs::new(problem.clone(), table)
}

/// Numerical solution on the uniform output grid.
#[derive(Debug, Clone)]
pub struct FdeSolution {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    derivative_count: usize,
    trajectory: Trajectory,
    rhs: AugmentedRhs,
}

impl FdeSolution {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Full augmented state at each output time.
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    /// `x` on the output grid.
    pub fn x(&self) -> GridFunction {
        self.derivative(0)
    }

    /// `x^{(j)}` on the output grid for `j < n + m`.
    pub fn derivative(&self, j: usize) -> GridFunction {
        assert!(j < self.derivative_count, "derivative {j} is not part of the state");
        GridFunction::new(
            self.times.clone(),
            self.states.iter().map(|s| s[j]).collect(),
        )
        .expect("output grid is strictly increasing")
    }

    /// Moment state `V_k` on the output grid.
    pub fn moment(&self, k: usize) -> GridFunction {
        let idx = self.derivative_count + k;
        GridFunction::new(
            self.times.clone(),
            self.states.iter().map(|s| s[idx]).collect(),
        )
        .expect("output grid is strictly increasing")
    }

    pub fn derivative_count(&self) -> usize {
        self.derivative_count
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn rhs(&self) -> &AugmentedRhs {
        &self.rhs
    }
}

/// Taylor shift of the initial derivatives from `a` to `a + eps`.
fn taylor_shift(initial: &[f64], eps: f64) -> Vec<f64> {
    let count = initial.len();
    (0..count)
        .map(|j| {
            let mut acc = 0.0;
            let mut term = 1.0;
            for (i, xi) in initial.iter().enumerate().skip(j) {
                if i > j {
                    term *= eps / (i - j) as f64;
                }
                acc += xi * term;
            }
            acc
        })
        .collect()
}

/// Solves the FDE with truncation `n_terms` and returns it on the `G`-point
/// uniform grid over `[a, b]`; the first row is the exact initial state.
pub fn solve_fde(problem: &FdeProblem, n_terms: u32, cfg: &SolverConfig) -> Result<FdeSolution> {
    problem.validate()?;
    cfg.validate(problem.a, problem.b)?;
    let rhs = build_rhs(problem, n_terms, cfg.m)?;
    let dc = rhs.derivative_count();
    let dim = rhs.dim();
    let eps = cfg.epsilon(problem.a, problem.b);
    let t_start = problem.a + eps;

    let mut initial = problem.initial_conditions.clone();
    initial.extend_from_slice(&problem.extra_initial_conditions);
    let mut y0 = taylor_shift(&initial, eps);
    y0.resize(dim, 0.0);

    let icfg = IntegratorConfig {
        abs_tol: cfg.abs_tol,
        rel_tol: cfg.rel_tol,
        max_steps: cfg.max_steps,
        initial_step: None,
    };
    let trajectory = ode::integrate(|t, y, dy| rhs.eval(t, y, dy), t_start, &y0, problem.b, &icfg)?;

    let times = uniform_grid(problem.a, problem.b, cfg.grid_size);
    let mut states = Vec::with_capacity(times.len());
    for &t in &times {
        if t == problem.a {
            let mut s = initial.clone();
            s.resize(dim, 0.0);
            states.push(s);
        } else if t < t_start {
            let mut s = taylor_shift(&initial, t - problem.a);
            s.resize(dim, 0.0);
            states.push(s);
        } else {
            states.push(trajectory.eval(t));
        }
    }
    Ok(FdeSolution {
        times,
        states,
        derivative_count: dc,
        trajectory,
        rhs,
    })
}

/// `E(g_{N-1}, g_N)`: L² distance between the solutions at truncations
/// `N - 1` and `N` on the shared output grid.
pub fn successive_consistency(problem: &FdeProblem, n_terms: u32, cfg: &SolverConfig) -> Result<f64> {
    if n_terms < 2 {
        return Err(Error::InvalidParameter(format!(
            "successive consistency needs N >= 2, got {n_terms}"
        )));
    }
    let (prev, cur) = std::thread::scope(|s| {
        let prev = s.spawn(|| solve_fde(problem, n_terms - 1, cfg));
        let cur = solve_fde(problem, n_terms, cfg);
        (prev.join().expect("solver thread panicked"), cur)
    });
    l2_grid_error(&prev?.x(), &cur?.x())
}
