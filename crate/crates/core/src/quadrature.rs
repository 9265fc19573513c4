//! Numerical integration: a globally adaptive 7/15-point Gauss–Kronrod
//! engine, power-substitution wrappers for weak endpoint singularities, and
//! fixed 5-point Gauss–Legendre panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and subdivision cap for the adaptive engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if max_subdivisions == 0 {
            return Err(Error::InvalidParameter(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(QuadratureConfig {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 5-point Gauss–Legendre nodes on [-1, 1].
pub const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_663_992_797_626_878_299_392_9,
    -0.538_469_310_105_683_091_036_314_420_700_208_8,
    0.0,
    0.538_469_310_105_683_091_036_314_420_700_208_8,
    0.906_179_845_938_663_992_797_626_878_299_392_9,
];

/// 5-point Gauss–Legendre weights on [-1, 1].
pub const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_087_514_264_040_719_917_4,
    0.478_628_670_499_366_468_041_291_514_835_638_2,
    0.568_888_888_888_888_888_888_888_888_888_888_9,
    0.478_628_670_499_366_468_041_291_514_835_638_2,
    0.236_926_885_056_189_087_514_264_040_719_917_4,
];

/// Nodes and weights of the composite 5-point Gauss–Legendre rule on
/// `[lo, hi]` split into `panels` equal pieces.
pub fn gauss_legendre5_rule(lo: f64, hi: f64, panels: usize) -> impl Iterator<Item = (f64, f64)> {
    let panels = panels.max(1);
    let width = (hi - lo) / panels as f64;
    let half = 0.5 * width;
    (0..panels).flat_map(move |p| {
        let mid = lo + width * p as f64 + half;
        GL5_NODES
            .iter()
            .zip(GL5_WEIGHTS.iter())
            .map(move |(x, w)| (mid + half * x, half * w))
    })
}

/// Composite 5-point Gauss–Legendre quadrature of `f` on `[lo, hi]`.
pub fn gauss_legendre5<F>(mut f: F, lo: f64, hi: f64, panels: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut total = 0.0;
    for (x, w) in gauss_legendre5_rule(lo, hi, panels) {
        total += w * f(x)?;
    }
    Ok(total)
}

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F>(f: &mut F, lo: f64, hi: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() {
        return Err(Error::Eval(format!(
            "non-finite integrand on [{lo}, {hi}]"
        )));
    }
    Ok(Segment {
        lo,
        hi,
        value,
        error,
    })
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[lo, hi]`.
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if lo == hi {
        return Ok(0.0);
    }
    if hi < lo {
        return integrate(f, hi, lo, cfg).map(|v| -v);
    }
    let first = kronrod15(&mut f, lo, hi)?;
    let mut total = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 1;
    loop {
        if error <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            return Ok(total);
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval cannot be split further in floating point.
            return Err(Error::Quadrature {
                estimate: error,
                subdivisions,
            });
        }
        let left = kronrod15(&mut f, worst.lo, mid)?;
        let right = kronrod15(&mut f, mid, worst.hi)?;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        // Re-sum periodically so the running error estimate does not drift.
        if subdivisions % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// `∫_lo^hi (hi - τ)^(mu-1) g(τ) dτ` via `τ = hi - s^(1/mu)`, which turns the
/// kernel and Jacobian into the constant `1/mu`.
pub fn integrate_kernel_at_upper<G>(
    mut g: G,
    lo: f64,
    hi: f64,
    mu: f64,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kernel exponent must be positive, got {mu}"
        )));
    }
    if hi <= lo {
        return Ok(0.0);
    }
    let upper = (hi - lo).powf(mu);
    let inv = 1.0 / mu;
    let v = integrate(|s| g(hi - s.powf(inv)), 0.0, upper, cfg)?;
    Ok(v * inv)
}

/// `∫_lo^hi (τ - lo)^(mu-1) g(τ) dτ` via `τ = lo + s^(1/mu)`.
pub fn integrate_kernel_at_lower<G>(
    mut g: G,
    lo: f64,
    hi: f64,
    mu: f64,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kernel exponent must be positive, got {mu}"
        )));
    }
    if hi <= lo {
        return Ok(0.0);
    }
    let upper = (hi - lo).powf(mu);
    let inv = 1.0 / mu;
    let v = integrate(|s| g(lo + s.powf(inv)), 0.0, upper, cfg)?;
    Ok(v * inv)
}
