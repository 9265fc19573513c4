//! Shared setup for the subcommands that act on a single expression.

use caputo_core::reference::{caputo_direct_grid, caputo_power_exact, QuadratureConfig};
use caputo_core::{uniform_grid, ApproxParams, Expr, FractionalOrder, GridFunction, Side};

use crate::error::{CliError, CliResult};

/// Quadrature settings for the direct oracle column.
pub const ORACLE_QUADRATURE: QuadratureConfig = QuadratureConfig {
    abs_tol: 1e-12,
    rel_tol: 1e-12,
    max_subdivisions: 4000,
};

/// Number of samples used to estimate `max |x^{(n+m+1)}|`.
pub const BOUND_SAMPLES: usize = 1000;
/// Safety factor applied to the sampled maximum.
pub const BOUND_INFLATION: f64 = 1.05;

pub struct FunctionSpec {
    pub expr: Expr,
    pub order: FractionalOrder,
    pub a: f64,
    pub b: f64,
    pub side: Side,
    pub exact_beta: Option<f64>,
}

impl FunctionSpec {
    pub fn new(
        expr: &str,
        alpha: f64,
        a: f64,
        b: f64,
        side: Side,
        exact_beta: Option<f64>,
    ) -> CliResult<Self> {
        let expr = Expr::parse(expr).map_err(CliError::numeric)?;
        let order = FractionalOrder::new(alpha).map_err(CliError::numeric)?;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(CliError::Usage(format!("need a < b, got a = {a}, b = {b}")));
        }
        let spec = FunctionSpec {
            expr,
            order,
            a,
            b,
            side,
            exact_beta,
        };
        if let Some(beta) = exact_beta {
            spec.check_power(beta)?;
        }
        Ok(spec)
    }

    pub fn anchor(&self) -> f64 {
        match self.side {
            Side::Left => self.a,
            Side::Right => self.b,
        }
    }

    fn distance(&self, t: f64) -> f64 {
        match self.side {
            Side::Left => t - self.a,
            Side::Right => self.b - t,
        }
    }

    /// The closed-form oracle only applies to `d^{β-1}`, so refuse anything else.
    fn check_power(&self, beta: f64) -> CliResult<()> {
        for frac in [0.25, 0.5, 0.75] {
            let t = self.a + frac * (self.b - self.a);
            let want = self.distance(t).powf(beta - 1.0);
            let got = self.expr.eval(t).map_err(CliError::numeric)?;
            if (got - want).abs() > 1e-9 * want.abs().max(1.0) {
                return Err(CliError::Usage(format!(
                    "--exact-beta {beta} needs the expression to equal the distance to the \
                     anchor raised to {}; at t = {t} it gives {got}, expected {want}",
                    beta - 1.0
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self, count: usize) -> CliResult<Vec<f64>> {
        if count < 2 {
            return Err(CliError::Usage("--grid needs at least 2 points".into()));
        }
        Ok(uniform_grid(self.a, self.b, count))
    }

    pub fn exact(&self, grid: &[f64]) -> CliResult<Option<GridFunction>> {
        let Some(beta) = self.exact_beta else {
            return Ok(None);
        };
        GridFunction::sample(grid.to_vec(), |t| {
            caputo_power_exact(beta, self.order, self.anchor(), self.side, t)
        })
        .map(Some)
        .map_err(CliError::numeric)
    }

    pub fn direct(&self, grid: &[f64]) -> CliResult<GridFunction> {
        caputo_direct_grid(
            &self.expr,
            self.order,
            self.anchor(),
            self.side,
            grid,
            &ORACLE_QUADRATURE,
        )
        .map_err(CliError::numeric)
    }

    /// Exact oracle when available, direct quadrature otherwise.
    pub fn reference(&self, grid: &[f64]) -> CliResult<GridFunction> {
        match self.exact(grid)? {
            Some(exact) => Ok(exact),
            None => self.direct(grid),
        }
    }

    /// `1.05 · max |x^{(n+m+1)}|` over 1000 uniform samples of `[a, b]`.
    pub fn derivative_bound(&self, params: ApproxParams) -> CliResult<f64> {
        let order = self.order.n() + params.m() + 1;
        let d = self.expr.derivative(order).map_err(CliError::numeric)?;
        let mut max = 0.0f64;
        for t in uniform_grid(self.a, self.b, BOUND_SAMPLES) {
            max = max.max(d.eval(t).map_err(CliError::numeric)?.abs());
        }
        Ok(BOUND_INFLATION * max)
    }
}

pub fn params(m: u32, n_terms: u32) -> CliResult<ApproxParams> {
    ApproxParams::new(m, n_terms).map_err(CliError::numeric)
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// usable points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
