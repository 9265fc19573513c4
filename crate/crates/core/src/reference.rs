//! Independent oracles: closed-form Caputo derivatives of power functions,
//! direct quadrature of the Caputo definition, the Sousa finite-difference
//! scheme for `α ∈ (1, 2)`, and the unweighted L² grid metric.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::frac_core::{power, FractionalOrder, GridFunction, KahanSum, Side};
use crate::quadrature::{integrate_kernel_at_lower, integrate_kernel_at_upper};
use crate::special_fns::{gamma, gamma_ratio};

pub use crate::quadrature::QuadratureConfig;

/// Caputo derivative of `(t-anchor)^{β-1}` (left) or `(anchor-t)^{β-1}` (right):
/// `Γ(β)/Γ(β-α) · d^{β-α-1}` with `d` the distance to the anchor.
pub fn caputo_power_exact(
    beta: f64,
    order: FractionalOrder,
    anchor: f64,
    side: Side,
    t: f64,
) -> Result<f64> {
    if !(beta > f64::from(order.n())) {
        return Err(Error::InvalidParameter(format!(
            "power-function oracle needs beta > n = {}, got {beta}",
            order.n()
        )));
    }
    let d = match side {
        Side::Left => t - anchor,
        Side::Right => anchor - t,
    };
    if d < 0.0 {
        return Err(Error::Grid(format!(
            "t = {t} is on the wrong side of the anchor {anchor}"
        )));
    }
    let alpha = order.alpha();
    Ok(gamma_ratio(beta, beta - alpha)? * power(d, beta - alpha - 1.0))
}

/// Caputo derivative from its integral definition, given a callable for
/// `x^{(n)}`. The kernel singularity at `τ = t` is removed by the substitution
/// `τ = t ∓ s^{1/(n-α)}`.
pub fn caputo_direct_fn<F>(
    nth_derivative: F,
    order: FractionalOrder,
    anchor: f64,
    side: Side,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mu = order.gap();
    let scale = 1.0 / gamma(mu)?;
    match side {
        Side::Left => {
            if t < anchor {
                return Err(Error::Grid(format!("t = {t} lies before the anchor {anchor}")));
            }
            Ok(scale * integrate_kernel_at_upper(nth_derivative, anchor, t, mu, cfg)?)
        }
        Side::Right => {
            if t > anchor {
                return Err(Error::Grid(format!("t = {t} lies after the anchor {anchor}")));
            }
            let sign = if order.n() % 2 == 0 { 1.0 } else { -1.0 };
            Ok(sign * scale * integrate_kernel_at_lower(nth_derivative, t, anchor, mu, cfg)?)
        }
    }
}

/// Caputo derivative of an expression at `t` by direct quadrature.
pub fn caputo_direct(
    e: &Expr,
    order: FractionalOrder,
    anchor: f64,
    side: Side,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let top = e.derivative(order.n())?;
    caputo_direct_fn(|tau| top.eval(tau), order, anchor, side, t, cfg)
}

/// [`caputo_direct`] on every point of a grid.
pub fn caputo_direct_grid(
    e: &Expr,
    order: FractionalOrder,
    anchor: f64,
    side: Side,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<GridFunction> {
    let top = e.derivative(order.n())?;
    GridFunction::sample(grid.to_vec(), |t| {
        caputo_direct_fn(|tau| top.eval(tau), order, anchor, side, t, cfg)
    })
}

/// Sousa weight `d_{j,k} = (j-k)^{2-α} - (j-k-1)^{2-α}`.
pub fn sousa_weight(j: usize, k: usize, alpha: f64) -> f64 {
    let q = 2.0 - alpha;
    let r = (j - k) as f64;
    power(r, q) - power(r - 1.0, q)
}

/// Sousa approximation of the left Caputo derivative (anchored at the first
/// sample) for `α ∈ (1, 2)`. Samples must be uniform; the output holds
/// nodes `t_0..t_{G-2}` because node `j` needs `x(t_{j+1})`.
pub fn sousa_scheme(samples: &GridFunction, alpha: f64) -> Result<GridFunction> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "the Sousa scheme needs 1 < alpha < 2, got {alpha}"
        )));
    }
    let times = samples.times();
    let x = samples.values();
    if times.len() < 2 {
        return Err(Error::Grid("the Sousa scheme needs at least two samples".into()));
    }
    let dt = times[1] - times[0];
    for (i, w) in times.windows(2).enumerate() {
        let step = w[1] - w[0];
        if ((step - dt) / dt).abs() > 1e-9 {
            return Err(Error::Grid(format!(
                "non-uniform grid: step {step} at index {i} differs from {dt}"
            )));
        }
    }
    let scale = dt.powf(-alpha) / gamma(3.0 - alpha)?;
    let second: Vec<f64> = x.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
    let last = times.len() - 1;
    let mut values = Vec::with_capacity(last);
    for j in 0..last {
        let mut acc = KahanSum::default();
        for (k, d2) in second.iter().enumerate().take(j) {
            acc.add(sousa_weight(j, k, alpha) * d2);
        }
        values.push(scale * acc.total());
    }
    GridFunction::new(times[..last].to_vec(), values)
}

/// `(Σ (x_i - y_i)^2)^{1/2}` over a shared grid, with no step-size weighting.
pub fn l2_grid_error(x: &GridFunction, y: &GridFunction) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Grid(format!(
            "grid sizes differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    for (i, (tx, ty)) in x.times().iter().zip(y.times()).enumerate() {
        let scale = tx.abs().max(ty.abs()).max(1.0);
        if (tx - ty).abs() > 1e-12 * scale {
            return Err(Error::Grid(format!(
                "grids differ at index {i}: {tx} vs {ty}"
            )));
        }
    }
    Ok(x
        .values()
        .iter()
        .zip(y.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}
