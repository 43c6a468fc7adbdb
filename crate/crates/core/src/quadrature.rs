//! Quadrature rules used by every analytic quantity in the crate.
//!
//! Integrals over the whole circle use the uniform-grid trapezoid rule,
//! which converges geometrically for smooth period-one integrands. Integrals
//! over short arcs use composite Gauss-Legendre.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// First panel count tried by [`integrate_periodic_converged`].
pub const START_PANELS: usize = 64;
/// Panel doubling stops here.
pub const MAX_PANELS: usize = 1 << 20;
/// Absolute agreement required between successive doublings.
pub const ABS_TOL: f64 = 1e-12;
/// Relative floor so that large integrals (sigma_1^2 ~ 1e7) can converge
/// despite summation round-off.
pub const REL_TOL: f64 = 1e-14;

/// Trapezoid rule with `panels` equal panels on `[0, 1]`.
///
/// For a period-one integrand this is the rectangle rule on the left
/// endpoints, and it is exact for trigonometric polynomials of degree
/// below `panels`.
pub fn integrate_periodic<F>(integrand: F, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if panels < 8 {
        return Err(Error::InvalidArgument(format!(
            "periodic quadrature needs at least 8 panels, got {panels}"
        )));
    }
    Ok(grid_sum(&integrand, panels, 0.0)? / panels as f64)
}

/// Trapezoid rule with panel doubling from [`START_PANELS`] until two
/// successive values agree to `max(ABS_TOL, REL_TOL * |value|)`.
pub fn integrate_periodic_converged<F>(integrand: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut panels = START_PANELS;
    let mut sum = grid_sum(&integrand, panels, 0.0)?;
    let mut value = sum / panels as f64;
    loop {
        // The refined grid reuses the old nodes; only midpoints are new.
        let mid = grid_sum(&integrand, panels, 0.5)?;
        sum += mid;
        panels *= 2;
        let refined = sum / panels as f64;
        let delta = (refined - value).abs();
        value = refined;
        if delta <= ABS_TOL.max(REL_TOL * refined.abs()) {
            return Ok(value);
        }
        if panels >= MAX_PANELS {
            return Err(Error::NotConverged { panels, delta });
        }
    }
}

fn grid_sum<F>(integrand: &F, panels: usize, shift: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let h = 1.0 / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        let x = (i as f64 + shift) * h;
        let y = integrand(x);
        if !y.is_finite() {
            return Err(Error::NonFiniteSample { x });
        }
        sum += y;
    }
    Ok(sum)
}

const GL_POINTS: usize = 20;
/// Longest sub-panel used by [`integrate_interval`].
const GL_PANEL: f64 = 1.0 / 32.0;

struct GaussLegendre {
    nodes: [f64; GL_POINTS],
    weights: [f64; GL_POINTS],
}

fn gauss_legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut nodes = [0.0; GL_POINTS];
        let mut weights = [0.0; GL_POINTS];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    })
}

/// Legendre polynomial P_n(x) and its derivative by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite 20-point Gauss-Legendre integral of a smooth integrand over
/// `[a, b]`. Sub-panels are at most 1/32 long. Returns the signed integral,
/// so `b < a` flips the sign.
pub fn integrate_interval<F>(integrand: F, a: f64, b: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let rule = gauss_legendre();
    let len = b - a;
    let panels = ((len.abs() / GL_PANEL).ceil() as usize).max(1);
    let h = len / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for (t, w) in rule.nodes.iter().zip(rule.weights.iter()) {
            s += w * integrand(mid + 0.5 * h * t);
        }
        total += 0.5 * h * s;
    }
    total
}
