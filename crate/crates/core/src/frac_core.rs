//! Expansion of left and right Caputo derivatives into integer-order
//! derivatives plus moment integrals, its truncation-error bound, and the
//! Riemann–Liouville bridges.
//!
//! For `α ∈ (n-1, n)`, depth `m` and truncation `N ≥ m+1` the left expansion is
//!
//! ```text
//! D^α x(t) ≈ Σ_{k=0}^{m} A_k (t-a)^{n+k-α} x^{(n+k)}(t)
//!          + Σ_{k=m+1}^{N} B_k (t-a)^{n+m-k-α} V_{k-m-1}(t),
//! V_j(t) = ∫_a^t (τ-a)^j x^{(n)}(τ) dτ.
//! ```
//!
//! The right expansion mirrors it with `b - t`, moments `W_j` anchored at `b`
//! and the sign factors `(-1)^{n+k}` on `A_k` and `(-1)^n` on `B_k`.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quadrature::{
    gauss_legendre5_rule, integrate_kernel_at_lower, integrate_kernel_at_upper, QuadratureConfig,
};
use crate::special_fns::{gamma, ln_factorial, signed_log_gamma};

/// Minimum distance of α from the nearest integer.
pub const INTEGER_ORDER_TOLERANCE: f64 = 1e-9;

/// Relative distance from the anchor below which the moment terms are taken as 0.
pub const ANCHOR_CUTOFF: f64 = 1e-12;

/// A positive non-integer order `α` with `n = ⌈α⌉`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    alpha: f64,
    n: u32,
}

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "fractional order must be positive and finite, got {alpha}"
            )));
        }
        if (alpha - alpha.round()).abs() <= INTEGER_ORDER_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "fractional order must not be an integer, got {alpha}"
            )));
        }
        if alpha > 1e6 {
            return Err(Error::InvalidParameter(format!("fractional order {alpha} is too large")));
        }
        Ok(FractionalOrder {
            alpha,
            n: alpha.ceil() as u32,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `n = ⌈α⌉`, the number of classical initial conditions.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `n - α ∈ (0, 1)`.
    pub fn gap(&self) -> f64 {
        f64::from(self.n) - self.alpha
    }
}

impl fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.alpha)
    }
}

/// Expansion depth `m` and truncation `N` (at least `m + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApproxParams {
    m: u32,
    n_terms: u32,
}

impl ApproxParams {
    pub fn new(m: u32, n_terms: u32) -> Result<Self> {
        if n_terms < m + 1 {
            return Err(Error::InvalidParameter(format!(
                "truncation N = {n_terms} must be at least m + 1 = {}",
                m + 1
            )));
        }
        Ok(ApproxParams { m, n_terms })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// The truncation `N`.
    pub fn n_terms(&self) -> u32 {
        self.n_terms
    }

    /// Number of moment functions, `N - m`.
    pub fn moment_count(&self) -> usize {
        (self.n_terms - self.m) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::InvalidParameter(format!(
                "side must be 'left' or 'right', got '{other}'"
            ))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sampled function on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Grid(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        check_increasing(&times)?;
        Ok(GridFunction { times, values })
    }

    /// Samples `f` on `times`.
    pub fn sample<F>(times: Vec<f64>, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let values = times.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        GridFunction::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.times, self.values)
    }
}

fn check_increasing(times: &[f64]) -> Result<()> {
    if let Some(bad) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::Grid(format!("non-finite grid point {bad}")));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Grid(format!(
            "grid is not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `count` equally spaced points on `[lo, hi]`, endpoints included.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// `d^q` for `d ≥ 0`, with `0^q = 0` for positive `q`.
pub(crate) fn power(d: f64, q: f64) -> f64 {
    if d == 0.0 {
        if q > 0.0 {
            0.0
        } else if q == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        (q * d.ln()).exp()
    }
}

/// Compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum
    }
}

/// `Γ(num) / (Γ(den) · fact!)`, in log space once any argument exceeds 30.
fn gamma_over_gamma_factorial(num: f64, den: f64, fact: u32) -> Result<f64> {
    if num.abs() <= 30.0 && den.abs() <= 30.0 && fact <= 30 {
        let mut f = 1.0;
        for i in 2..=fact {
            f *= f64::from(i);
        }
        return Ok(gamma(num)? / (gamma(den)? * f));
    }
    let a = signed_log_gamma(num)?;
    let b = signed_log_gamma(den)?;
    Ok(f64::from(a.sign * b.sign) * (a.log_abs - b.log_abs - ln_factorial(fact)).exp())
}

/// Precomputed `A_0..A_m` and `B_{m+1}..B_N` for one order, parameter set and side.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    order: FractionalOrder,
    params: ApproxParams,
    side: Side,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl CoefficientTable {
    pub fn new(order: FractionalOrder, params: ApproxParams, side: Side) -> Result<Self> {
        let n = f64::from(order.n());
        let alpha = order.alpha();
        let m = params.m();
        let big_n = params.n_terms();
        let sign_n = if order.n() % 2 == 0 { 1.0 } else { -1.0 };

        let mut a = Vec::with_capacity(m as usize + 1);
        for k in 0..=m {
            let kf = f64::from(k);
            let mut bracket = KahanSum::default();
            bracket.add(1.0);
            for p in (m - k + 1)..=big_n {
                let term = gamma_over_gamma_factorial(
                    f64::from(p) + alpha - n - f64::from(m),
                    alpha - n - kf,
                    p + k - m,
                )?;
                bracket.add(term);
            }
            let mut value = bracket.total() / gamma(n + kf + 1.0 - alpha)?;
            if side == Side::Right {
                value *= sign_n * if k % 2 == 0 { 1.0 } else { -1.0 };
            }
            a.push(value);
        }

        let prefactor = 1.0 / (gamma(n - alpha)? * gamma(alpha + 1.0 - n)?);
        let mut b = Vec::with_capacity(params.moment_count());
        for k in (m + 1)..=big_n {
            let mut value = prefactor
                * gamma_over_gamma_factorial(
                    f64::from(k) + alpha - n - f64::from(m),
                    1.0,
                    k - m - 1,
                )?;
            if side == Side::Right {
                value *= sign_n;
            }
            b.push(value);
        }

        Ok(CoefficientTable {
            order,
            params,
            side,
            a,
            b,
        })
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    pub fn params(&self) -> ApproxParams {
        self.params
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// `A_0..A_m`.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// `B_{m+1}..B_N`; index 0 holds `B_{m+1}`.
    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

/// Builds the coefficient table; see [`CoefficientTable::new`].
pub fn coefficient_table(
    order: FractionalOrder,
    params: ApproxParams,
    side: Side,
) -> Result<CoefficientTable> {
    CoefficientTable::new(order, params, side)
}

/// Moment values `V_0..V_{N-m-1}` (or `W_j` on the right) at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub t: f64,
    pub values: Vec<f64>,
}

/// Moments at one grid point, stored scaled by the distance to the anchor:
/// `scaled[j] = V_j(t) / d^j` with `d = |t - anchor|`. Scaling keeps large `j`
/// finite where `d^j` would underflow.
#[derive(Debug, Clone)]
struct ScaledMoments {
    distance: f64,
    scaled: Vec<f64>,
}

impl ScaledMoments {
    fn unscaled(&self) -> Vec<f64> {
        self.scaled
            .iter()
            .enumerate()
            .map(|(j, s)| s * power(self.distance, j as f64))
            .collect()
    }
}

/// Domain of an expansion: interval plus side, with the anchor derived from it.
#[derive(Debug, Clone, Copy)]
struct Frame {
    a: f64,
    b: f64,
    side: Side,
}

impl Frame {
    fn new(a: f64, b: f64, side: Side) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidParameter(format!(
                "interval [{a}, {b}] must be finite with a < b"
            )));
        }
        Ok(Frame { a, b, side })
    }

    fn distance(&self, t: f64) -> f64 {
        match self.side {
            Side::Left => (t - self.a).max(0.0),
            Side::Right => (self.b - t).max(0.0),
        }
    }

    /// Point at distance `u` from the anchor.
    fn point(&self, u: f64) -> f64 {
        match self.side {
            Side::Left => self.a + u,
            Side::Right => self.b - u,
        }
    }

    fn check_grid(&self, grid: &[f64]) -> Result<()> {
        check_increasing(grid)?;
        let slack = 1e-12 * (self.b - self.a);
        if let Some(t) = grid
            .iter()
            .find(|&&t| t < self.a - slack || t > self.b + slack)
        {
            return Err(Error::Grid(format!(
                "grid point {t} lies outside [{}, {}]",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

/// Cumulative moments along the grid in order of increasing distance from
/// the anchor. Each cell is integrated with composite 5-point Gauss–Legendre;
/// the panel count grows with the highest moment order so that the weight
/// `(u/d)^j` varies by at most a factor `e^{1/2}` per panel.
fn scaled_moments(
    top: &Expr,
    frame: &Frame,
    grid: &[f64],
    count: usize,
) -> Result<Vec<ScaledMoments>> {
    let mut order: Vec<usize> = (0..grid.len()).collect();
    if frame.side == Side::Right {
        order.reverse();
    }
    let mut out = vec![
        ScaledMoments {
            distance: 0.0,
            scaled: vec![0.0; count],
        };
        grid.len()
    ];
    let mut prev_d = 0.0;
    let mut acc = vec![0.0; count];
    for idx in order {
        let d = frame.distance(grid[idx]);
        if d > prev_d {
            // Rescale the running moments from prev_d to d.
            let ratio = prev_d / d;
            let mut scale = 1.0;
            for value in acc.iter_mut() {
                *value *= scale;
                scale *= ratio;
            }
            let width = d - prev_d;
            let max_order = count.saturating_sub(1) as f64;
            let panels = ((max_order * width / d) * 2.0).ceil().max(1.0) as usize;
            for (u, w) in gauss_legendre5_rule(prev_d, d, panels) {
                let fx = top.eval(frame.point(u))?;
                if fx == 0.0 {
                    continue;
                }
                let r = u / d;
                let mut weight = w * fx;
                for value in acc.iter_mut() {
                    *value += weight;
                    weight *= r;
                    if weight == 0.0 {
                        break;
                    }
                }
            }
            prev_d = d;
        }
        out[idx] = ScaledMoments {
            distance: d,
            scaled: acc.clone(),
        };
    }
    Ok(out)
}

/// Moment vectors `V_j(t)` (left) or `W_j(t)` (right) for `j < N - m` at each grid point.
pub fn moment_grid(
    e: &Expr,
    a: f64,
    b: f64,
    order: FractionalOrder,
    params: ApproxParams,
    side: Side,
    grid: &[f64],
) -> Result<Vec<MomentVector>> {
    let frame = Frame::new(a, b, side)?;
    frame.check_grid(grid)?;
    let top = e.derivative(order.n())?;
    let moments = scaled_moments(&top, &frame, grid, params.moment_count())?;
    Ok(grid
        .iter()
        .zip(moments)
        .map(|(&t, s)| MomentVector {
            t,
            values: s.unscaled(),
        })
        .collect())
}

/// Truncated expansion (without the remainder) of the Caputo derivative of
/// `e` at each grid point. Returns exactly 0 at the anchor.
pub fn caputo_expansion(
    e: &Expr,
    a: f64,
    b: f64,
    order: FractionalOrder,
    params: ApproxParams,
    side: Side,
    grid: &[f64],
) -> Result<GridFunction> {
    let table = CoefficientTable::new(order, params, side)?;
    caputo_expansion_with(e, a, b, &table, grid)
}

/// [`caputo_expansion`] with a precomputed coefficient table.
pub fn caputo_expansion_with(
    e: &Expr,
    a: f64,
    b: f64,
    table: &CoefficientTable,
    grid: &[f64],
) -> Result<GridFunction> {
    let order = table.order();
    let params = table.params();
    let frame = Frame::new(a, b, table.side())?;
    frame.check_grid(grid)?;
    let n = order.n();
    let m = params.m();
    let derivs = e.derivatives(n + m)?;
    let moments = scaled_moments(&derivs[n as usize], &frame, grid, params.moment_count())?;
    let alpha = order.alpha();
    let cutoff = ANCHOR_CUTOFF * (b - a);

    let mut values = Vec::with_capacity(grid.len());
    for (&t, mom) in grid.iter().zip(&moments) {
        let d = mom.distance;
        if d == 0.0 {
            values.push(0.0);
            continue;
        }
        let mut sum = KahanSum::default();
        for (k, a_k) in table.a().iter().enumerate() {
            let x = derivs[n as usize + k].eval(t)?;
            sum.add(a_k * power(d, f64::from(n) + k as f64 - alpha) * x);
        }
        if d >= cutoff {
            // B_k d^{n+m-k-α} V_{k-m-1} = B_k d^{n-α-1} · (V_j / d^j), j = k-m-1.
            let scale = power(d, f64::from(n) - alpha - 1.0);
            for (b_k, s) in table.b().iter().zip(&mom.scaled) {
                sum.add(b_k * scale * s);
            }
        }
        values.push(sum.total());
    }
    GridFunction::new(grid.to_vec(), values)
}

/// Upper bound on the truncation remainder at distance `|t - a|` from the
/// anchor, given `max_deriv ≥ max |x^{(n+m+1)}|` between the anchor and `t`.
/// Right-side callers pass `(t, b)`.
pub fn error_bound(
    order: FractionalOrder,
    params: ApproxParams,
    a: f64,
    t: f64,
    max_deriv: f64,
) -> f64 {
    let d = (t - a).abs();
    if d == 0.0 || max_deriv == 0.0 {
        return 0.0;
    }
    let s = f64::from(order.n() + params.m()) - order.alpha();
    let big_n = f64::from(params.n_terms());
    let gamma_s1 = gamma(s + 1.0).expect("s + 1 > 0 is never a pole");
    max_deriv * power(d, s + 1.0) * (s * s + s).exp() / (gamma_s1 * big_n.powf(s) * s)
}

fn rl_from_caputo(
    caputo_values: &GridFunction,
    e: &Expr,
    anchor: f64,
    order: FractionalOrder,
    side: Side,
) -> Result<GridFunction> {
    let n = order.n();
    let alpha = order.alpha();
    let derivs = e.derivatives(n.saturating_sub(1))?;
    let mut terms = Vec::with_capacity(n as usize);
    for (k, dk) in derivs.iter().enumerate() {
        let mut value = dk.eval(anchor)?;
        // d^k/dt^k of (b - t)^k-type boundary terms carries (-1)^k on the right.
        if side == Side::Right && k % 2 == 1 {
            value = -value;
        }
        if value != 0.0 {
            terms.push((k as f64, value / gamma(k as f64 - alpha + 1.0)?));
        }
    }
    let mut out = Vec::with_capacity(caputo_values.len());
    for (t, c) in caputo_values.iter() {
        let d = match side {
            Side::Left => t - anchor,
            Side::Right => anchor - t,
        };
        if d < 0.0 {
            return Err(Error::Grid(format!(
                "grid point {t} is on the wrong side of the anchor {anchor}"
            )));
        }
        let mut sum = KahanSum::default();
        sum.add(c);
        for &(k, coef) in &terms {
            if d == 0.0 {
                return Err(Error::Singular(format!(
                    "boundary term of order {k} is singular at t = {t}"
                )));
            }
            sum.add(coef * power(d, k - alpha));
        }
        out.push(sum.total());
    }
    GridFunction::new(caputo_values.times().to_vec(), out)
}

/// Left Riemann–Liouville derivative from left Caputo values:
/// adds `Σ_{k<n} x^{(k)}(a) (t-a)^{k-α} / Γ(k-α+1)`.
pub fn rl_from_caputo_left(
    caputo_values: &GridFunction,
    e: &Expr,
    a: f64,
    order: FractionalOrder,
) -> Result<GridFunction> {
    rl_from_caputo(caputo_values, e, a, order, Side::Left)
}

/// Right Riemann–Liouville derivative from right Caputo values:
/// adds `Σ_{k<n} (-1)^k x^{(k)}(b) (b-t)^{k-α} / Γ(k-α+1)`.
pub fn rl_from_caputo_right(
    caputo_values: &GridFunction,
    e: &Expr,
    b: f64,
    order: FractionalOrder,
) -> Result<GridFunction> {
    rl_from_caputo(caputo_values, e, b, order, Side::Right)
}

/// Riemann–Liouville integral of order `alpha > 0` of a callable at one point.
pub fn rl_integral_at<F>(
    f: F,
    anchor: f64,
    alpha: f64,
    side: Side,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "integral order must be positive, got {alpha}"
        )));
    }
    let raw = match side {
        Side::Left => {
            if t < anchor {
                return Err(Error::Grid(format!("t = {t} lies before the anchor {anchor}")));
            }
            integrate_kernel_at_upper(f, anchor, t, alpha, cfg)?
        }
        Side::Right => {
            if t > anchor {
                return Err(Error::Grid(format!("t = {t} lies after the anchor {anchor}")));
            }
            integrate_kernel_at_lower(f, t, anchor, alpha, cfg)?
        }
    };
    Ok(raw / gamma(alpha)?)
}

/// Riemann–Liouville integral of `e` of order `alpha` on a grid.
pub fn rl_integral(
    e: &Expr,
    anchor: f64,
    alpha: f64,
    side: Side,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<GridFunction> {
    check_increasing(grid)?;
    GridFunction::sample(grid.to_vec(), |t| {
        rl_integral_at(|tau| e.eval(tau), anchor, alpha, side, t, cfg)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(alpha: f64) -> FractionalOrder {
        FractionalOrder::new(alpha).unwrap()
    }

    #[test]
    fn order_validation() {
        assert_eq!(order(2.5).n(), 3);
        assert_eq!(order(0.3).n(), 1);
        assert!((order(1.9).gap() - 0.1).abs() < 1e-15);
        for bad in [0.0, -1.5, 2.0, 1.0 + 1e-10, f64::NAN] {
            assert!(FractionalOrder::new(bad).is_err(), "{bad}");
        }
        assert!(ApproxParams::new(2, 2).is_err());
        assert!(ApproxParams::new(2, 3).is_ok());
        assert_eq!(ApproxParams::new(1, 50).unwrap().moment_count(), 49);
    }

    #[test]
    fn a0_for_single_term() {
        // α=2.5, m=0, N=1: A_0 = (1 + Γ(0.5)/Γ(-0.5)) / Γ(1.5) = 0.5/Γ(1.5)
        let t = coefficient_table(order(2.5), ApproxParams::new(0, 1).unwrap(), Side::Left).unwrap();
        assert!((t.a()[0] - 0.564_189_583_547_756_3).abs() < 1e-13);
        assert_eq!(t.b().len(), 1);
    }

    #[test]
    fn b_entries_for_order_two_and_a_half() {
        // α=2.5, m=0: B_k = Γ(k-0.5) / (Γ(0.5) Γ(-0.5) (k-1)!)
        let t = coefficient_table(order(2.5), ApproxParams::new(0, 40).unwrap(), Side::Left).unwrap();
        // Γ(n-α) Γ(α+1-n) = Γ(0.5)^2 for α = 2.5.
        let g05 = gamma(0.5).unwrap();
        let mut fact = 1.0;
        for k in 1..=40u32 {
            if k > 1 {
                fact *= f64::from(k - 1);
            }
            let expected = gamma(f64::from(k) - 0.5).unwrap() / (g05 * g05 * fact);
            let got = t.b()[(k - 1) as usize];
            assert!((got - expected).abs() <= 1e-12 * expected.abs(), "k={k}");
        }
        assert!((t.b()[0] - 1.0 / g05).abs() < 1e-14);
    }

    #[test]
    fn right_table_sign_pattern() {
        for alpha in [0.4, 1.5, 2.5] {
            let p = ApproxParams::new(3, 12).unwrap();
            let l = coefficient_table(order(alpha), p, Side::Left).unwrap();
            let r = coefficient_table(order(alpha), p, Side::Right).unwrap();
            let n = order(alpha).n() as i32;
            for k in 0..=3 {
                let s = (-1f64).powi(n + k);
                assert_eq!(r.a()[k as usize], s * l.a()[k as usize]);
            }
            for (bl, br) in l.b().iter().zip(r.b()) {
                assert_eq!(*br, (-1f64).powi(n) * bl);
            }
        }
    }

    #[test]
    fn a0_is_positive_and_decreases_with_n() {
        let mut prev = f64::INFINITY;
        for big_n in [1, 5, 10, 50, 200] {
            let t = coefficient_table(order(1.9), ApproxParams::new(0, big_n).unwrap(), Side::Left)
                .unwrap();
            assert!(t.a()[0] > 0.0 && t.a()[0] < prev);
            prev = t.a()[0];
        }
    }

    #[test]
    fn low_degree_polynomials_vanish() {
        let grid = uniform_grid(0.0, 1.0, 50);
        for (src, alpha) in [("t", 1.5), ("3 - 2*t + t^2", 2.5), ("7", 0.5)] {
            let e = Expr::parse(src).unwrap();
            for side in [Side::Left, Side::Right] {
                let g = caputo_expansion(
                    &e,
                    0.0,
                    1.0,
                    order(alpha),
                    ApproxParams::new(1, 20).unwrap(),
                    side,
                    &grid,
                )
                .unwrap();
                assert!(g.values().iter().all(|&v| v == 0.0), "{src}");
            }
        }
    }

    #[test]
    fn expansion_is_zero_at_the_anchor() {
        let e = Expr::parse("cos(t) + t^3").unwrap();
        let p = ApproxParams::new(1, 30).unwrap();
        let grid = uniform_grid(0.0, 1.0, 11);
        let l = caputo_expansion(&e, 0.0, 1.0, order(1.3), p, Side::Left, &grid).unwrap();
        assert_eq!(l.values()[0], 0.0);
        assert!(l.values()[1] != 0.0);
        let r = caputo_expansion(&e, 0.0, 1.0, order(1.3), p, Side::Right, &grid).unwrap();
        assert_eq!(r.values()[10], 0.0);
    }

    #[test]
    fn grid_outside_interval_is_rejected() {
        let e = Expr::parse("t^6").unwrap();
        let p = ApproxParams::new(1, 10).unwrap();
        let err = caputo_expansion(&e, 0.0, 1.0, order(1.5), p, Side::Left, &[0.5, 1.5]);
        assert!(matches!(err, Err(Error::Grid(_))));
        let err = caputo_expansion(&e, 0.0, 1.0, order(1.5), p, Side::Left, &[0.5, 0.4]);
        assert!(matches!(err, Err(Error::Grid(_))));
    }

    #[test]
    fn moments_match_closed_form() {
        // x = t^6, n = 2: x'' = 30 t^4, V_j(t) = 30 t^{j+5}/(j+5)
        let e = Expr::parse("t^6").unwrap();
        let grid = uniform_grid(0.0, 1.0, 21);
        let mv = moment_grid(
            &e,
            0.0,
            1.0,
            order(1.5),
            ApproxParams::new(0, 60).unwrap(),
            Side::Left,
            &grid,
        )
        .unwrap();
        for m in &mv {
            for (j, v) in m.values.iter().enumerate() {
                let exact = 30.0 * m.t.powi(j as i32 + 5) / (j as f64 + 5.0);
                assert!((v - exact).abs() <= 1e-12 * exact.abs() + 1e-300, "t={} j={j}", m.t);
            }
        }
        // Right side: W_j(t) = ∫_t^1 (1-τ)^j 30 τ^4 dτ, checked at t = 0 for j = 0.
        let mv = moment_grid(
            &e,
            0.0,
            1.0,
            order(1.5),
            ApproxParams::new(0, 5).unwrap(),
            Side::Right,
            &grid,
        )
        .unwrap();
        assert!((mv[0].values[0] - 6.0).abs() < 1e-12);
        assert!(mv[20].values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bound_values() {
        let p = ApproxParams::new(1, 50).unwrap();
        assert_eq!(error_bound(order(1.5), p, 0.0, 0.0, 360.0), 0.0);
        let v = error_bound(order(1.5), p, 0.0, 1.0, 360.0);
        let oracle = 360.0 * 3.75f64.exp() / (gamma(2.5).unwrap() * 50f64.powf(1.5) * 1.5);
        assert!((v - oracle).abs() < 1e-12 * oracle);
        assert!((v - 21.71).abs() < 0.01, "{v}");
        let doubled = error_bound(order(1.5), ApproxParams::new(1, 100).unwrap(), 0.0, 1.0, 360.0);
        assert!((doubled / v - 2f64.powf(-1.5)).abs() < 1e-12);
    }

    #[test]
    fn rl_bridge_for_constant_and_linear() {
        let grid = uniform_grid(0.1, 1.0, 10);
        let zero = GridFunction::new(grid.clone(), vec![0.0; 10]).unwrap();
        let one = Expr::parse("1").unwrap();
        let rl = rl_from_caputo_left(&zero, &one, 0.0, order(0.5)).unwrap();
        for (t, v) in rl.iter() {
            let exact = t.powf(-0.5) / gamma(0.5).unwrap();
            assert!((v - exact).abs() < 1e-14 * exact);
        }
        // x = 1 - t, right side, α = 1.5: RL = (1-t)^{-1/2} / Γ(1/2).
        let grid = uniform_grid(0.0, 0.9, 10);
        let zero = GridFunction::new(grid.clone(), vec![0.0; 10]).unwrap();
        let lin = Expr::parse("1 - t").unwrap();
        let rl = rl_from_caputo_right(&zero, &lin, 1.0, order(1.5)).unwrap();
        for (t, v) in rl.iter() {
            let exact = (1.0 - t).powf(-0.5) / gamma(0.5).unwrap();
            assert!((v - exact).abs() < 1e-13 * exact, "t={t} v={v} exact={exact}");
        }
        // Singular at the anchor when boundary derivatives do not vanish.
        let at_anchor = GridFunction::new(vec![0.0, 0.5], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            rl_from_caputo_left(&at_anchor, &one, 0.0, order(0.5)),
            Err(Error::Singular(_))
        ));
        // t^6 has vanishing boundary derivatives: RL equals Caputo.
        let vals = GridFunction::new(vec![0.0, 0.5], vec![0.0, 2.0]).unwrap();
        let t6 = Expr::parse("t^6").unwrap();
        assert_eq!(rl_from_caputo_left(&vals, &t6, 0.0, order(2.5)).unwrap(), vals);
    }

    #[test]
    fn rl_integral_values() {
        let cfg = QuadratureConfig::default();
        let grid = uniform_grid(0.0, 1.0, 11);
        let lin = Expr::parse("t").unwrap();
        let g = rl_integral(&lin, 0.0, 1.0, Side::Left, &grid, &cfg).unwrap();
        for (t, v) in g.iter() {
            assert!((v - 0.5 * t * t).abs() < 1e-13);
        }
        let t6 = Expr::parse("t^6").unwrap();
        let g = rl_integral(&t6, 0.0, 1.5, Side::Left, &grid, &cfg).unwrap();
        let c = gamma(7.0).unwrap() / gamma(8.5).unwrap();
        for (t, v) in g.iter() {
            let exact = c * t.powf(7.5);
            assert!((v - exact).abs() < 1e-11, "t={t}");
        }
        // Right side of (1-t)^6 mirrors the left side of t^6.
        let y6 = Expr::parse("(1-t)^6").unwrap();
        let g = rl_integral(&y6, 1.0, 1.5, Side::Right, &grid, &cfg).unwrap();
        for (t, v) in g.iter() {
            let exact = c * (1.0 - t).powf(7.5);
            assert!((v - exact).abs() < 1e-11, "t={t}");
        }
    }

    #[test]
    fn uniform_grid_endpoints() {
        let g = uniform_grid(0.0, 20.0, 100);
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[99], 20.0);
    }
}
