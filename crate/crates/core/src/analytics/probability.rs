use serde::{Deserialize, Serialize};

use super::kernel::McEstimate;
use crate::density::{AsymptoticConstants, CircularDensity, DensityMoments};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_interval, integrate_periodic_converged};

/// The nested-arc triangle representation needs every relevant arc inside
/// one period.
pub const MAX_EXACT_TRIANGLE_RADIUS: f64 = 0.25;

fn check_radius(r: f64, max: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&r) {
        return Err(Error::InvalidRadius(r));
    }
    if r > max {
        return Err(Error::RadiusTooLarge { r, max });
    }
    Ok(())
}

/// Mass of `f` on `[a, b]` (periodic extension, `a <= b`).
#[inline]
pub(crate) fn mass(density: &CircularDensity, a: f64, b: f64) -> f64 {
    if density.is_uniform() {
        return b - a;
    }
    integrate_interval(|y| density.value(y), a, b)
}

/// `E[A₁₂ | X₁ = x1] = ∫_{x1-r}^{x1+r} f`.
pub fn edge_probability_given(density: &CircularDensity, r: f64, x1: f64) -> Result<f64> {
    check_radius(r, 0.5)?;
    if density.is_uniform() {
        return Ok(2.0 * r);
    }
    Ok(mass(density, x1 - r, x1 + r))
}

/// `2 r f(x) + f''(x) r³ / 3`.
pub fn edge_expansion_given(density: &CircularDensity, r: f64, x1: f64) -> f64 {
    let [f, _, d2] = density.derivs(x1);
    2.0 * r * f + d2 * r.powi(3) / 3.0
}

/// `E[A₁₂ A₂₃ | X₁ = x1] = ∫_{x1-r}^{x1+r} f(y) E[A₁₂ | X₁ = y] dy`.
pub fn twopath_end_given(density: &CircularDensity, r: f64, x1: f64) -> Result<f64> {
    check_radius(r, 0.5)?;
    Ok(integrate_interval(
        |y| density.value(y) * mass(density, y - r, y + r),
        x1 - r,
        x1 + r,
    ))
}

/// `E[A₁₂ A₁₃ A₂₃ | X₁ = x1]`: the second vertex sits either behind or
/// ahead of `x1`, and the third must fall in the overlap of both arcs.
pub fn triangle_probability_given(density: &CircularDensity, r: f64, x1: f64) -> Result<f64> {
    check_radius(r, MAX_EXACT_TRIANGLE_RADIUS)?;
    Ok(triangle_given_unchecked(density, r, x1))
}

fn triangle_given_unchecked(density: &CircularDensity, r: f64, x1: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let behind = integrate_interval(
        |x2| density.value(x2) * mass(density, x1 - r, x2 + r),
        x1 - r,
        x1,
    );
    let ahead = integrate_interval(
        |x2| density.value(x2) * mass(density, x2 - r, x1 + r),
        x1,
        x1 + r,
    );
    behind + ahead
}

/// `3 r² f² + (5 r⁴ / 12) ((f')² + 2 f f'')` at `x1`.
pub fn triangle_expansion_given(density: &CircularDensity, r: f64, x1: f64) -> f64 {
    let [f, d1, d2] = density.derivs(x1);
    3.0 * r * r * f * f + 5.0 * r.powi(4) / 12.0 * (d1 * d1 + 2.0 * f * d2)
}

/// `E[A₁₂ A₁₃] = ∫ (E[A₁₂ | X₁ = x])² f(x) dx`.
pub fn exact_twopath_probability(density: &CircularDensity, r: f64) -> Result<f64> {
    check_radius(r, 0.5)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    integrate_periodic_converged(|x| {
        let e = mass(density, x - r, x + r);
        e * e * density.value(x)
    })
}

/// `4 r² E[f²] + (4 r⁴ / 3) E[f f'']`.
pub fn twopath_expansion(moments: &DensityMoments, r: f64) -> f64 {
    4.0 * r * r * moments.e_f2 + 4.0 * r.powi(4) / 3.0 * moments.e_ffpp
}

/// `E[A₁₂ A₁₃ A₂₃]` by nested quadrature; `r <= 0.25`.
pub fn exact_triangle_probability(density: &CircularDensity, r: f64) -> Result<f64> {
    check_radius(r, MAX_EXACT_TRIANGLE_RADIUS)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    integrate_periodic_converged(|x| triangle_given_unchecked(density, r, x) * density.value(x))
}

/// `3 r² E[f²] + (5 r⁴ / 12) E[(f')² + 2 f f'']`.
pub fn triangle_expansion(moments: &DensityMoments, r: f64) -> f64 {
    3.0 * r * r * moments.e_f2 + 5.0 * r.powi(4) / 12.0 * moments.e_fp2_2ffpp
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuValues {
    /// `E[Δ₁₂₃] / E[P₁₂₃]` from the exact probabilities.
    pub exact: f64,
    /// `(3 + r² a_f) / (4 + r² b_f)`.
    pub expansion: f64,
    pub triangle_probability: f64,
    pub twopath_probability: f64,
}

/// Centering constant for `r` in `(0, 0.25]`.
pub fn mu_n(density: &CircularDensity, r: f64) -> Result<MuValues> {
    check_radius(r, MAX_EXACT_TRIANGLE_RADIUS)?;
    let moments = density.moments()?;
    mu_n_with(density, &moments, r)
}

pub(crate) fn mu_n_with(
    density: &CircularDensity,
    moments: &DensityMoments,
    r: f64,
) -> Result<MuValues> {
    check_radius(r, MAX_EXACT_TRIANGLE_RADIUS)?;
    if r == 0.0 {
        return Err(Error::ZeroDenominator(r));
    }
    let twopath = exact_twopath_probability(density, r)?;
    let triangle = exact_triangle_probability(density, r)?;
    if twopath <= 0.0 {
        return Err(Error::ZeroDenominator(r));
    }
    let a_f = 5.0 * moments.e_fp2_2ffpp / (12.0 * moments.e_f2);
    let b_f = 4.0 * moments.e_ffpp / (3.0 * moments.e_f2);
    Ok(MuValues {
        exact: triangle / twopath,
        expansion: (3.0 + r * r * a_f) / (4.0 + r * r * b_f),
        triangle_probability: triangle,
        twopath_probability: twopath,
    })
}

/// Constants needed to center and scale `C_n` at radius `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeConstants {
    pub r: f64,
    pub mu_n_exact: f64,
    pub mu_n_expansion: f64,
    /// `(3 r² / 8) E[f²]`.
    pub sigma3n_sq_leading: f64,
    pub sigma1_sq: f64,
    /// Monte Carlo estimate of `E[h(X₁,X₂,X₃) h(X₁,X₂,X₄)]`, when computed.
    pub sigma2n_sq: Option<McEstimate>,
}

pub fn regime_constants(
    density: &CircularDensity,
    constants: &AsymptoticConstants,
    r: f64,
) -> Result<RegimeConstants> {
    let mu = mu_n_with(density, &constants.moments, r)?;
    Ok(RegimeConstants {
        r,
        mu_n_exact: mu.exact,
        mu_n_expansion: mu.expansion,
        sigma3n_sq_leading: super::sigma3n_sq_leading(r, constants.moments.e_f2),
        sigma1_sq: constants.sigma1_sq,
        sigma2n_sq: None,
    })
}
