use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard normal CDF, `erfc(-x/√2)/2`, with the libm `erfc`
/// (a few ulp; tail values keep full relative accuracy).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `sample` and
/// the standard normal CDF.
pub fn ks_statistic(sample: &[f64]) -> Result<f64> {
    if sample.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "KS statistic needs at least 2 values, got {}",
            sample.len()
        )));
    }
    if sample.iter().any(|z| z.is_nan()) {
        return Err(Error::InvalidArgument("KS statistic of NaN".into()));
    }
    let mut z = sample.to_vec();
    z.sort_by(f64::total_cmp);
    let m = z.len() as f64;
    let d = z.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let p = normal_cdf(x);
        d.max((i + 1) as f64 / m - p).max(p - i as f64 / m)
    });
    Ok(d.clamp(0.0, 1.0))
}

/// Moments and KS distance of a z-sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZStats {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks: f64,
}

pub fn summarize_z(z: &[f64]) -> Result<ZStats> {
    let ks = ks_statistic(z)?;
    let m = z.len() as f64;
    let mean = z.iter().sum::<f64>() / m;
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for &x in z {
        let d = x - mean;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    let m2 = s2 / m;
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (s3 / m / m2.powf(1.5), s4 / m / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    Ok(ZStats {
        count: z.len(),
        mean,
        variance: s2 / (m - 1.0),
        skewness,
        excess_kurtosis,
        ks,
    })
}
