use serde::{Deserialize, Serialize};

use super::probability::{mass, triangle_probability_given, twopath_end_given};
use crate::density::{h1_factor, CircularDensity};
use crate::error::{Error, Result};
use crate::sampler::{circle_distance, sample_in_arc, RngStream};

/// Smallest Monte Carlo budget accepted by [`sigma2n_sq_mc`].
pub const MIN_SIGMA2N_SAMPLES: usize = 100_000;

/// `h(x₁,x₂,x₃) = Δ₁₂₃ - (μ/3)(P₁₂₃ + P₂₁₃ + P₂₃₁)` with its indicator parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub triangle: bool,
    /// 2-paths centred at vertex 2, 1 and 3 respectively.
    pub paths: [bool; 3],
}

pub fn kernel_h(x1: f64, x2: f64, x3: f64, r: f64, mu_n: f64) -> KernelValue {
    let a12 = circle_distance(x1, x2) <= r;
    let a13 = circle_distance(x1, x3) <= r;
    let a23 = circle_distance(x2, x3) <= r;
    let paths = [a12 && a23, a12 && a13, a23 && a13];
    let triangle = a12 && a13 && a23;
    let npaths = paths.iter().filter(|&&p| p).count() as f64;
    KernelValue {
        value: f64::from(u8::from(triangle)) - mu_n / 3.0 * npaths,
        triangle,
        paths,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn relative_error(&self) -> f64 {
        self.std_error / self.estimate.abs()
    }
}

/// Importance-sampled estimate of `σ₂ₙ² = E[h(X₁,X₂,X₃) h(X₁,X₂,X₄)]`.
///
/// A product term can only be nonzero when `X₂, X₃, X₄` all lie within
/// `2r` of `X₁`, so they are drawn from `f` restricted to that arc and the
/// product is weighted by the arc mass cubed. The localization is exact.
pub fn sigma2n_sq_mc(
    density: &CircularDensity,
    r: f64,
    mu_n: f64,
    samples: usize,
    stream: &mut RngStream,
) -> Result<McEstimate> {
    if !(r > 0.0 && r <= 0.1) {
        return Err(Error::InvalidArgument(format!(
            "sigma_2n Monte Carlo needs r in (0, 0.1], got {r}"
        )));
    }
    if samples < MIN_SIGMA2N_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "sigma_2n Monte Carlo needs at least {MIN_SIGMA2N_SAMPLES} samples, got {samples}"
        )));
    }
    let width = 2.0 * r;
    let sup = density.sup_f();
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..samples {
        let x1 = loop {
            let x = stream.uniform();
            if density.is_uniform() || stream.uniform() * sup < density.value(x) {
                break x;
            }
        };
        let arc = mass(density, x1 - width, x1 + width);
        if arc <= 0.0 {
            return Err(Error::InvalidDensity(format!("zero mass near x = {x1}")));
        }
        let x2 = sample_in_arc(density, x1, width, stream);
        let x3 = sample_in_arc(density, x1, width, stream);
        let x4 = sample_in_arc(density, x1, width, stream);
        let v =
            arc.powi(3) * kernel_h(x1, x2, x3, r, mu_n).value * kernel_h(x1, x2, x4, r, mu_n).value;
        // Welford
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (samples - 1) as f64;
    Ok(McEstimate {
        estimate: mean,
        std_error: (var / samples as f64).sqrt(),
        samples,
    })
}

/// `-3 c_f f² - 2 f f'' - (f')²` at `x`; `h₁(x) ≈ (r⁴/4)` times this.
pub fn h1_leading(density: &CircularDensity, x: f64, c_f: f64) -> f64 {
    h1_factor(density.derivs(x), c_f)
}

/// `h₁(x) = E[h(x, X₂, X₃)]` by quadrature (`r <= 0.25`).
pub fn h1_exact(density: &CircularDensity, r: f64, mu_n: f64, x: f64) -> Result<f64> {
    let tri = triangle_probability_given(density, r, x)?;
    let e = mass(density, x - r, x + r);
    let end = twopath_end_given(density, r, x)?;
    Ok(tri - mu_n / 3.0 * (e * e + 2.0 * end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::mu_n;
    use crate::quadrature::integrate_periodic_converged;
    use crate::sampler::{derive_stream, sample_points};

    #[test]
    fn kernel_cases() {
        let mu = 0.76;
        let k = kernel_h(0.1, 0.12, 0.14, 0.05, mu);
        assert!(k.triangle && k.paths == [true; 3]);
        assert!((k.value - (1.0 - mu)).abs() < 1e-15);
        let one_edge = kernel_h(0.1, 0.12, 0.5, 0.05, mu);
        assert_eq!(one_edge.value, 0.0);
        let open = kernel_h(0.1, 0.14, 0.18, 0.05, mu);
        assert!(!open.triangle);
        assert_eq!(open.paths, [true, false, false]);
        assert!((open.value + mu / 3.0).abs() < 1e-15);
        assert_eq!(kernel_h(0.1, 0.4, 0.7, 0.05, mu).value, 0.0);
    }

    #[test]
    fn h1_leading_examples() {
        let u = CircularDensity::uniform();
        assert_eq!(h1_leading(&u, 0.3, 0.0), 0.0);
        // small kappa: h1 factor = 8π²κ cos(2πx - μ) + O(κ²)
        let kappa = 0.01;
        let d = CircularDensity::von_mises(kappa, 0.2).unwrap();
        let c = d.constants().unwrap();
        let tau = std::f64::consts::TAU;
        for x in [0.0, 0.13, 0.4, 0.77] {
            let lead = 2.0 * tau * tau * kappa * (tau * x - 0.2).cos();
            assert!((h1_leading(&d, x, c.c_f) - lead).abs() < 250.0 * kappa * kappa);
        }
        let s = integrate_periodic_converged(|x| h1_leading(&d, x, c.c_f).powi(2) * d.value(x))
            .unwrap();
        assert!((s - c.sigma1_sq).abs() < 1e-12 * s);
    }

    #[test]
    fn h1_exact_matches_leading_term() {
        let d = CircularDensity::von_mises(1.0, 0.0).unwrap();
        let c = d.constants().unwrap();
        let r = 0.005;
        let mu = mu_n(&d, r).unwrap().exact;
        for x in [0.0, 0.25, 0.5] {
            let exact = h1_exact(&d, r, mu, x).unwrap();
            let lead = r.powi(4) / 4.0 * h1_leading(&d, x, c.c_f);
            assert!(
                (exact - lead).abs() < 0.05 * lead.abs().max(1e-9 * r.powi(4)),
                "{exact} {lead}"
            );
        }
        // E[h1] = 0 by construction of mu_n
        let mean =
            integrate_periodic_converged(|x| h1_exact(&d, r, mu, x).unwrap() * d.value(x)).unwrap();
        assert!(mean.abs() < 1e-16, "{mean}");
    }

    /// `σ₂ₙ²` for the uniform density by direct quadrature: `h₂` depends only
    /// on `δ = d(x₁, x₂)`, so integrate `h₂(δ)²` against the density `2` of
    /// `δ` on `[0, 1/2]`, with `h₂(δ)` itself a fine midpoint sum over `x₃`.
    fn uniform_sigma2n_quadrature(r: f64, mu: f64) -> f64 {
        let n_delta = 4000;
        let n_x3 = 4000;
        let hi = 2.0 * r;
        let mut total = 0.0;
        for i in 0..n_delta {
            let delta = (i as f64 + 0.5) / n_delta as f64 * hi;
            let mut h2 = 0.0;
            for j in 0..n_x3 {
                // x3 ranges over the arc around x1 = 0 of half-width 2r; outside it h = 0
                let x3 = -2.0 * r + (j as f64 + 0.5) / n_x3 as f64 * 4.0 * r;
                h2 += kernel_h(0.0, delta, x3.rem_euclid(1.0), r, mu).value;
            }
            h2 *= 4.0 * r / n_x3 as f64;
            total += 2.0 * h2 * h2;
        }
        total * hi / n_delta as f64
    }

    #[test]
    fn uniform_sigma2n_oracle() {
        // closed form r³/6 for mu = 3/4
        for r in [0.02, 0.01] {
            let q = uniform_sigma2n_quadrature(r, 0.75);
            assert!(
                (q / r.powi(3) - 1.0 / 6.0).abs() < 2e-3,
                "{}",
                q / r.powi(3)
            );
        }
    }

    #[test]
    fn uniform_sigma2n_mc_scales_as_r_cubed() {
        let u = CircularDensity::uniform();
        let ratios: Vec<f64> = [0.02, 0.01, 0.005]
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let est =
                    sigma2n_sq_mc(&u, r, 0.75, 400_000, &mut derive_stream(10, i as u64)).unwrap();
                assert!(est.estimate > 0.0);
                est.estimate / r.powi(3)
            })
            .collect();
        for w in ratios.windows(2) {
            let q = w[1] / w[0];
            assert!((0.8..=1.25).contains(&q), "{ratios:?}");
        }
        let oracle = uniform_sigma2n_quadrature(0.02, 0.75) / 0.02f64.powi(3);
        assert!(
            (ratios[0] / oracle - 1.0).abs() < 0.05,
            "{} vs {oracle}",
            ratios[0]
        );
    }

    #[test]
    fn sigma2n_deterministic_and_rate() {
        let u = CircularDensity::uniform();
        let a = sigma2n_sq_mc(&u, 0.01, 0.75, 100_000, &mut derive_stream(1, 1)).unwrap();
        let b = sigma2n_sq_mc(&u, 0.01, 0.75, 100_000, &mut derive_stream(1, 1)).unwrap();
        assert_eq!(a, b);
        let c = sigma2n_sq_mc(&u, 0.01, 0.75, 400_000, &mut derive_stream(1, 2)).unwrap();
        let ratio = a.std_error / c.std_error;
        assert!((1.8..2.2).contains(&ratio), "{ratio}");
    }

    #[test]
    fn sigma2n_argument_checks() {
        let u = CircularDensity::uniform();
        assert!(sigma2n_sq_mc(&u, 0.2, 0.75, 100_000, &mut derive_stream(1, 1)).is_err());
        assert!(sigma2n_sq_mc(&u, 0.01, 0.75, 10, &mut derive_stream(1, 1)).is_err());
    }

    #[test]
    fn non_uniform_sigma2n_is_order_r_cubed() {
        let d = CircularDensity::von_mises(1.0, 0.1).unwrap();
        let r = 0.01;
        let mu = mu_n(&d, r).unwrap().exact;
        let est = sigma2n_sq_mc(&d, r, mu, 200_000, &mut derive_stream(4, 4)).unwrap();
        let ratio = est.estimate / r.powi(3);
        assert!(ratio > 0.05 && ratio < 2.0, "{ratio}");
    }

    #[test]
    fn kernel_is_centered() {
        // E[h] = 0 over unconstrained triples
        let d = CircularDensity::von_mises(1.0, 0.0).unwrap();
        let r = 0.1;
        let mu = mu_n(&d, r).unwrap().exact;
        let m = 1_000_000;
        let pts = sample_points(&d, 3 * m, &mut derive_stream(8, 0)).unwrap();
        // permute with a second stream to decorrelate the sorted order
        let mut xs = pts.positions().to_vec();
        let mut s = derive_stream(8, 1);
        use rand::Rng;
        for i in (1..xs.len()).rev() {
            let j = s.random_range(0..=i);
            xs.swap(i, j);
        }
        let vals: Vec<f64> = xs
            .chunks_exact(3)
            .map(|t| kernel_h(t[0], t[1], t[2], r, mu).value)
            .collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 4.0 * (var / n).sqrt(), "{mean}");
    }
}
