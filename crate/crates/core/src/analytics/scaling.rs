//! Standardizations of `C_n - mu_n` for the three regimes, and the
//! normalizations of the dominant U-statistic projection they are built from.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::regime::RegimeKind;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardizationInputs {
    pub mu_n: f64,
    /// `E[f²(X₁)]`
    pub e_f2: f64,
    pub sigma1_sq: f64,
    pub sigma2n_sq: Option<f64>,
}

/// Factor `s` with `z = s (C_n - mu_n)`.
pub fn scaling(kind: RegimeKind, n: usize, r: f64, inputs: &StandardizationInputs) -> Result<f64> {
    let n = n as f64;
    let e = inputs.e_f2;
    match kind {
        RegimeKind::DenseI => {
            if inputs.sigma1_sq <= 0.0 {
                return Err(Error::DegenerateSigma1(inputs.sigma1_sq));
            }
            Ok(16.0 * n.sqrt() * e / (3.0 * r * r * inputs.sigma1_sq.sqrt()))
        }
        RegimeKind::IntermediateII => {
            let s2 = inputs.sigma2n_sq.ok_or(Error::MissingSigma2n)?;
            if s2 <= 0.0 {
                return Err(Error::MissingSigma2n);
            }
            Ok(2.0 * SQRT_2 * n * r * r * e / (3.0 * s2.sqrt()))
        }
        RegimeKind::SparseIII => Ok(8.0 * n * n.sqrt() * r * e.sqrt() / 3.0),
        RegimeKind::Degenerate | RegimeKind::Ambiguous => Err(Error::RegimeRefused(format!(
            "no standardization for the {kind} regime"
        ))),
    }
}

pub fn standardize(
    c_n: f64,
    n: usize,
    r: f64,
    kind: RegimeKind,
    inputs: &StandardizationInputs,
) -> Result<f64> {
    Ok(scaling(kind, n, r, inputs)? * (c_n - inputs.mu_n))
}

/// `E[h₁²] ≈ r⁸ σ₁² / 16`.
pub fn h1_variance_leading(r: f64, sigma1_sq: f64) -> f64 {
    r.powi(8) * sigma1_sq / 16.0
}

/// `E[h²] ≈ (3 r² / 8) E[f²]`.
pub fn sigma3n_sq_leading(r: f64, e_f2: f64) -> f64 {
    3.0 * r * r / 8.0 * e_f2
}

/// `Σ A_ij A_jk ≈ 4 n³ r² E[f²]`.
pub fn twopath_count_leading(n: usize, r: f64, e_f2: f64) -> f64 {
    4.0 * (n as f64).powi(3) * r * r * e_f2
}

/// The same scaling factors assembled from the 2-path count and the
/// standard deviation of the dominant U-statistic projection:
///
/// * dense: `3 n² · sqrt(n E[h₁²])`
/// * intermediate: `3 n · 2 n σ₂ₙ / √2`
/// * sparse: `√6 n^{3/2} σ₃ₙ`
pub fn projection_scaling(
    kind: RegimeKind,
    n: usize,
    r: f64,
    inputs: &StandardizationInputs,
) -> Result<f64> {
    let nf = n as f64;
    let paths = twopath_count_leading(n, r, inputs.e_f2);
    let sd = match kind {
        RegimeKind::DenseI => {
            if inputs.sigma1_sq <= 0.0 {
                return Err(Error::DegenerateSigma1(inputs.sigma1_sq));
            }
            3.0 * nf * nf * (nf * h1_variance_leading(r, inputs.sigma1_sq)).sqrt()
        }
        RegimeKind::IntermediateII => {
            let s2 = inputs.sigma2n_sq.ok_or(Error::MissingSigma2n)?;
            3.0 * nf * (2.0 * nf * s2.sqrt() / SQRT_2)
        }
        RegimeKind::SparseIII => {
            6f64.sqrt() * nf.powf(1.5) * sigma3n_sq_leading(r, inputs.e_f2).sqrt()
        }
        RegimeKind::Degenerate | RegimeKind::Ambiguous => {
            return Err(Error::RegimeRefused(format!(
                "no standardization for the {kind} regime"
            )))
        }
    };
    Ok(paths / sd)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(e_f2: f64, sigma1_sq: f64, sigma2n_sq: Option<f64>) -> StandardizationInputs {
        StandardizationInputs {
            mu_n: 0.75,
            e_f2,
            sigma1_sq,
            sigma2n_sq,
        }
    }

    #[test]
    fn dense_example() {
        let mut inp = inputs(2.0, 16.0, None);
        inp.mu_n = 0.5;
        let z = standardize(0.51, 100, 0.1, RegimeKind::DenseI, &inp).unwrap();
        assert!((z - 80.0 / 3.0).abs() < 1e-9, "{z}");
    }

    #[test]
    fn sparse_at_center_is_zero() {
        let inp = inputs(1.3, 0.0, None);
        assert_eq!(
            standardize(0.75, 20_000, 1e-5, RegimeKind::SparseIII, &inp).unwrap(),
            0.0
        );
    }

    #[test]
    fn intermediate_uniform_factor() {
        let s2 = 0.01f64.powi(3) / 6.0;
        let inp = inputs(1.0, 0.0, Some(s2));
        let s = scaling(RegimeKind::IntermediateII, 1000, 0.01, &inp).unwrap();
        let expect = 2.0 * SQRT_2 * 1000.0 * 1e-4 / (3.0 * s2.sqrt());
        assert!((s - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn error_paths() {
        let inp = inputs(1.0, 0.0, None);
        assert!(matches!(
            scaling(RegimeKind::DenseI, 10, 0.1, &inp),
            Err(Error::DegenerateSigma1(_))
        ));
        assert!(matches!(
            scaling(RegimeKind::IntermediateII, 10, 0.1, &inp),
            Err(Error::MissingSigma2n)
        ));
        assert!(matches!(
            scaling(RegimeKind::Degenerate, 10, 0.1, &inp),
            Err(Error::RegimeRefused(_))
        ));
    }
}
