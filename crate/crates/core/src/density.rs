//! Smooth period-one densities with analytic derivatives, and the moment
//! integrals and constants built from them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_periodic_converged;

const TWO_PI: f64 = 2.0 * PI;
/// Grid used to certify positivity of a Fourier density.
const POSITIVITY_GRID: usize = 10_000;

/// Density description as it appears in configuration files.
///
/// ```json
/// {"kind":"uniform"}
/// {"kind":"von_mises","kappa":1.0,"mu":0.1}
/// {"kind":"fourier","cos":[0.2],"sin":[]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "SpecRepr", into = "SpecRepr")]
pub enum DensitySpec {
    Uniform,
    /// `exp(kappa * cos(2 pi x - mu)) / I0(kappa)`.
    VonMises {
        kappa: f64,
        mu: f64,
    },
    /// `1 + sum_k cos[k-1] cos(2 pi k x) + sin[k-1] sin(2 pi k x)`.
    Fourier {
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
}

// Serde ignores `deny_unknown_fields` on unit variants of tagged enums, so
// the wire form uses an empty struct variant for the uniform density.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SpecRepr {
    Uniform {},
    VonMises {
        kappa: f64,
        mu: f64,
    },
    Fourier {
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

impl From<SpecRepr> for DensitySpec {
    fn from(r: SpecRepr) -> Self {
        match r {
            SpecRepr::Uniform {} => DensitySpec::Uniform,
            SpecRepr::VonMises { kappa, mu } => DensitySpec::VonMises { kappa, mu },
            SpecRepr::Fourier { cos, sin } => DensitySpec::Fourier { cos, sin },
        }
    }
}

impl From<DensitySpec> for SpecRepr {
    fn from(s: DensitySpec) -> Self {
        match s {
            DensitySpec::Uniform => SpecRepr::Uniform {},
            DensitySpec::VonMises { kappa, mu } => SpecRepr::VonMises { kappa, mu },
            DensitySpec::Fourier { cos, sin } => SpecRepr::Fourier { cos, sin },
        }
    }
}

impl std::fmt::Display for DensitySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DensitySpec::Uniform => write!(f, "uniform"),
            DensitySpec::VonMises { kappa, mu } => write!(f, "von_mises(kappa={kappa}, mu={mu})"),
            DensitySpec::Fourier { cos, sin } => write!(f, "fourier(cos={cos:?}, sin={sin:?})"),
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Uniform,
    VonMises {
        kappa: f64,
        mu: f64,
        /// `∫ exp(kappa (cos - 1))`, i.e. `I0 * exp(-kappa)`.
        scaled_norm: f64,
    },
    Fourier {
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
}

/// A validated density on the circle `[0, 1)`.
///
/// Immutable after construction; `Send + Sync`.
#[derive(Clone, Debug)]
pub struct CircularDensity {
    spec: DensitySpec,
    kind: Kind,
    sup_f: f64,
    inf_f: f64,
    normalizer: f64,
}

impl CircularDensity {
    pub fn new(spec: DensitySpec) -> Result<Self> {
        match &spec {
            DensitySpec::Uniform => Ok(Self {
                kind: Kind::Uniform,
                sup_f: 1.0,
                inf_f: 1.0,
                normalizer: 1.0,
                spec,
            }),
            &DensitySpec::VonMises { kappa, mu } => {
                if !kappa.is_finite() || kappa < 0.0 {
                    return Err(Error::InvalidDensity(format!(
                        "von Mises concentration must be finite and >= 0, got {kappa}"
                    )));
                }
                if !mu.is_finite() {
                    return Err(Error::InvalidDensity(format!("von Mises location {mu}")));
                }
                let scaled_norm =
                    integrate_periodic_converged(|x| (kappa * ((TWO_PI * x).cos() - 1.0)).exp())?;
                Ok(Self {
                    kind: Kind::VonMises {
                        kappa,
                        mu,
                        scaled_norm,
                    },
                    sup_f: 1.0 / scaled_norm,
                    inf_f: (-2.0 * kappa).exp() / scaled_norm,
                    normalizer: kappa.exp() * scaled_norm,
                    spec,
                })
            }
            DensitySpec::Fourier { cos, sin } => {
                if cos.iter().chain(sin).any(|c| !c.is_finite()) {
                    return Err(Error::InvalidDensity(
                        "non-finite Fourier coefficient".into(),
                    ));
                }
                let kind = Kind::Fourier {
                    cos: cos.clone(),
                    sin: sin.clone(),
                };
                // Grid extremes widened by a Lipschitz bound give certified
                // bounds on the true extremes.
                let coeff = |v: &[f64], k: usize| v.get(k).map_or(0.0, |c: &f64| c.abs());
                let lipschitz: f64 = (0..cos.len().max(sin.len()))
                    .map(|k| TWO_PI * (k + 1) as f64 * (coeff(cos, k) + coeff(sin, k)))
                    .sum();
                let h = 1.0 / POSITIVITY_GRID as f64;
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for i in 0..POSITIVITY_GRID {
                    let v = eval_kind(&kind, i as f64 * h)[0];
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                let slack = 0.5 * h * lipschitz;
                let inf_f = lo - slack;
                if inf_f <= 0.0 {
                    return Err(Error::InvalidDensity(format!(
                        "Fourier density is not bounded away from zero (certified minimum {inf_f:.3e})"
                    )));
                }
                Ok(Self {
                    kind,
                    sup_f: hi + slack,
                    inf_f,
                    normalizer: 1.0,
                    spec,
                })
            }
        }
    }

    pub fn uniform() -> Self {
        Self::new(DensitySpec::Uniform).expect("uniform density is valid")
    }

    pub fn von_mises(kappa: f64, mu: f64) -> Result<Self> {
        Self::new(DensitySpec::VonMises { kappa, mu })
    }

    pub fn spec(&self) -> &DensitySpec {
        &self.spec
    }

    pub fn is_uniform(&self) -> bool {
        match &self.kind {
            Kind::Uniform => true,
            Kind::VonMises { kappa, .. } => *kappa == 0.0,
            Kind::Fourier { cos, sin } => cos.iter().chain(sin).all(|&c| c == 0.0),
        }
    }

    /// Upper bound on `f` (exact for uniform and von Mises).
    pub fn sup_f(&self) -> f64 {
        self.sup_f
    }

    /// Lower bound on `f` (exact for uniform and von Mises).
    pub fn inf_f(&self) -> f64 {
        self.inf_f
    }

    /// The von Mises constant `(1/2π) ∫ exp(κ cos t) dt`; 1 for other kinds.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// `f(x)`, `f'(x)` or `f''(x)` for `order` 0, 1, 2.
    pub fn eval(&self, x: f64, order: u8) -> Result<f64> {
        if order > 2 {
            return Err(Error::InvalidOrder(order));
        }
        Ok(self.derivs(x)[order as usize])
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Uniform => 1.0,
            Kind::VonMises {
                kappa,
                mu,
                scaled_norm,
            } => (kappa * ((TWO_PI * x - mu).cos() - 1.0)).exp() / scaled_norm,
            Kind::Fourier { .. } => eval_kind(&self.kind, x)[0],
        }
    }

    /// `[f, f', f'']` at `x`.
    #[inline]
    pub fn derivs(&self, x: f64) -> [f64; 3] {
        eval_kind(&self.kind, x)
    }

    /// `∫ f` over the circle; should be 1.
    pub fn total_mass(&self) -> Result<f64> {
        integrate_periodic_converged(|x| self.value(x))
    }

    pub fn moments(&self) -> Result<DensityMoments> {
        let e_f2 = integrate_periodic_converged(|x| self.value(x).powi(3))?;
        let e_fp2 = integrate_periodic_converged(|x| {
            let [f, d1, _] = self.derivs(x);
            d1 * d1 * f
        })?;
        let e_ffpp = integrate_periodic_converged(|x| {
            let [f, _, d2] = self.derivs(x);
            f * f * d2
        })?;
        let e_fp2_2ffpp = integrate_periodic_converged(|x| {
            let [f, d1, d2] = self.derivs(x);
            (d1 * d1 + 2.0 * f * d2) * f
        })?;
        Ok(DensityMoments {
            e_f2,
            e_fp2,
            e_ffpp,
            e_fp2_2ffpp,
        })
    }

    pub fn constants(&self) -> Result<AsymptoticConstants> {
        let moments = self.moments()?;
        let a_f = 5.0 * moments.e_fp2_2ffpp / (12.0 * moments.e_f2);
        let b_f = 4.0 * moments.e_ffpp / (3.0 * moments.e_f2);
        let c_f = moments.e_fp2 / moments.e_f2;
        let sigma1_sq = integrate_periodic_converged(|x| {
            let d = self.derivs(x);
            let q = h1_factor(d, c_f);
            q * q * d[0]
        })?;
        Ok(AsymptoticConstants {
            a_f,
            b_f,
            c_f,
            sigma1_sq,
            moments,
        })
    }
}

/// `-3 c_f f² - 2 f f'' - (f')²`, the density-level factor of the leading
/// term of the first Hoeffding projection.
#[inline]
pub(crate) fn h1_factor([f, d1, d2]: [f64; 3], c_f: f64) -> f64 {
    -3.0 * c_f * f * f - 2.0 * f * d2 - d1 * d1
}

#[inline]
fn eval_kind(kind: &Kind, x: f64) -> [f64; 3] {
    match kind {
        Kind::Uniform => [1.0, 0.0, 0.0],
        Kind::VonMises {
            kappa,
            mu,
            scaled_norm,
        } => {
            let theta = TWO_PI * x - mu;
            let (s, c) = theta.sin_cos();
            let f = (kappa * (c - 1.0)).exp() / scaled_norm;
            let ks = TWO_PI * kappa * s;
            [f, -f * ks, f * (ks * ks - TWO_PI * TWO_PI * kappa * c)]
        }
        Kind::Fourier { cos, sin } => {
            let mut out = [1.0, 0.0, 0.0];
            let order = cos.len().max(sin.len());
            for k in 1..=order {
                let a = cos.get(k - 1).copied().unwrap_or(0.0);
                let b = sin.get(k - 1).copied().unwrap_or(0.0);
                if a == 0.0 && b == 0.0 {
                    continue;
                }
                let w = TWO_PI * k as f64;
                let (s, c) = (w * x).sin_cos();
                out[0] += a * c + b * s;
                out[1] += w * (b * c - a * s);
                out[2] -= w * w * (a * c + b * s);
            }
            out
        }
    }
}

/// `(1/2π) ∫₀^{2π} exp(κ cos t) dt` by periodic quadrature.
pub fn normalizer_i0(kappa: f64) -> Result<f64> {
    if !kappa.is_finite() || kappa < 0.0 {
        return Err(Error::InvalidDensity(format!(
            "normalizer needs finite kappa >= 0, got {kappa}"
        )));
    }
    let scaled = integrate_periodic_converged(|x| (kappa * ((TWO_PI * x).cos() - 1.0)).exp())?;
    Ok(kappa.exp() * scaled)
}

/// Moment integrals `E[g(X₁)] = ∫ g f` that enter the expansion constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMoments {
    /// `∫ f³ = E[f²(X₁)]`
    pub e_f2: f64,
    /// `∫ (f')² f = E[(f'(X₁))²]`
    pub e_fp2: f64,
    /// `∫ f² f'' = E[f(X₁) f''(X₁)]`
    pub e_ffpp: f64,
    /// `∫ ((f')² + 2 f f'') f`
    pub e_fp2_2ffpp: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub a_f: f64,
    pub b_f: f64,
    pub c_f: f64,
    /// `E[(-3 c_f f² - 2 f f'' - (f')²)²]` under `X₁ ~ f`.
    pub sigma1_sq: f64,
    pub moments: DensityMoments,
}
