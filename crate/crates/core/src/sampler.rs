//! Seeded vertex sampling.
//!
//! Every replication gets its own ChaCha8 stream: the master seed keys the
//! cipher and the replication index selects the 64-bit stream id, so a
//! replication's draws never depend on which thread ran it or in what order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density::CircularDensity;
use crate::error::{Error, Result};

/// Deterministic generator for one `(master_seed, replication_index)` pair.
#[derive(Clone, Debug)]
pub struct RngStream {
    rng: ChaCha8Rng,
    master_seed: u64,
    replication_index: u64,
}

impl RngStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn replication_index(&self) -> u64 {
        self.replication_index
    }

    /// Uniform draw on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

pub fn derive_stream(master_seed: u64, replication_index: u64) -> RngStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replication_index);
    RngStream {
        rng,
        master_seed,
        replication_index,
    }
}

/// `n` sorted vertex positions on `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    positions: Vec<f64>,
    seed_info: Option<(u64, u64)>,
}

impl PointSample {
    /// Validates that `positions` are sorted and lie in `[0, 1)`.
    pub fn from_sorted(positions: Vec<f64>) -> Result<Self> {
        let in_range = positions.iter().all(|x| (0.0..1.0).contains(x));
        let sorted = positions.windows(2).all(|w| w[0] <= w[1]);
        if !in_range || !sorted {
            return Err(Error::NotSorted);
        }
        Ok(Self {
            positions,
            seed_info: None,
        })
    }

    /// Sorts (stably, so ties keep draw order) and validates.
    pub fn from_unsorted(mut positions: Vec<f64>) -> Result<Self> {
        if positions.iter().any(|x| x.is_nan()) {
            return Err(Error::NotSorted);
        }
        positions.sort_by(f64::total_cmp);
        Self::from_sorted(positions)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    /// `(master_seed, replication_index)` of the stream that produced the
    /// sample, if it was sampled.
    pub fn seed_info(&self) -> Option<(u64, u64)> {
        self.seed_info
    }
}

/// `n` i.i.d. draws from `density` by rejection against the constant
/// envelope `sup_f`, returned sorted.
pub fn sample_points(
    density: &CircularDensity,
    n: usize,
    stream: &mut RngStream,
) -> Result<PointSample> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be >= 1".into()));
    }
    let sup = density.sup_f();
    if !sup.is_finite() || sup <= 0.0 {
        return Err(Error::InvalidDensity(format!("rejection envelope {sup}")));
    }
    let mut positions = Vec::with_capacity(n);
    if density.is_uniform() {
        positions.extend((0..n).map(|_| stream.uniform()));
    } else {
        while positions.len() < n {
            let x = stream.uniform();
            if stream.uniform() * sup < density.value(x) {
                positions.push(x);
            }
        }
    }
    // Stable sort: equal positions stay in draw order.
    positions.sort_by(f64::total_cmp);
    Ok(PointSample {
        positions,
        seed_info: Some((stream.master_seed, stream.replication_index)),
    })
}

/// Draw from `density` restricted to the arc `[center - half_width, center + half_width]`,
/// reduced to `[0, 1)`.
pub(crate) fn sample_in_arc(
    density: &CircularDensity,
    center: f64,
    half_width: f64,
    stream: &mut RngStream,
) -> f64 {
    let sup = density.sup_f();
    loop {
        let x = center + half_width * (2.0 * stream.uniform() - 1.0);
        if density.is_uniform() || stream.uniform() * sup < density.value(x) {
            return x.rem_euclid(1.0);
        }
    }
}

/// `min(|a - b|, 1 - |a - b|)`.
#[inline]
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensitySpec;
    use crate::quadrature::{integrate_interval, integrate_periodic_converged};
    use proptest::prelude::*;
    use rand::RngCore;

    #[test]
    fn stream_is_deterministic() {
        let mut a = derive_stream(42, 0);
        let mut b = derive_stream(42, 0);
        let xa: Vec<u64> = (0..100).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..100).map(|_| b.next_u64()).collect();
        assert_eq!(xa, xb);
        let mut c = derive_stream(42, 1);
        let xc: Vec<u64> = (0..100).map(|_| c.next_u64()).collect();
        assert_ne!(xa, xc);
        let mut d = derive_stream(43, 0);
        assert_ne!(xa[0], d.next_u64());
    }

    #[test]
    fn stream_independent_of_threads() {
        let reference: Vec<f64> = {
            let mut s = derive_stream(42, 7);
            (0..100).map(|_| s.uniform()).collect()
        };
        let handles: Vec<_> = (0..8)
            .map(|_| {
                std::thread::spawn(|| {
                    let mut s = derive_stream(42, 7);
                    (0..100).map(|_| s.uniform()).collect::<Vec<f64>>()
                })
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), reference);
        }
    }

    #[test]
    fn uniform_sample_is_sorted_in_range() {
        let d = CircularDensity::uniform();
        let s = sample_points(&d, 1000, &mut derive_stream(1, 2)).unwrap();
        assert_eq!(s.n(), 1000);
        assert!(s.positions().windows(2).all(|w| w[0] <= w[1]));
        assert!(s.positions().iter().all(|x| (0.0..1.0).contains(x)));
        assert_eq!(s.seed_info(), Some((1, 2)));
    }

    #[test]
    fn uniform_accepts_every_proposal() {
        // one uniform draw per point: the stream is consumed exactly n times
        let d = CircularDensity::uniform();
        let mut s1 = derive_stream(9, 9);
        let sample = sample_points(&d, 50, &mut s1).unwrap();
        let mut s2 = derive_stream(9, 9);
        let mut raw: Vec<f64> = (0..50).map(|_| s2.uniform()).collect();
        raw.sort_by(f64::total_cmp);
        assert_eq!(sample.positions(), &raw[..]);
        assert_eq!(s1.next_u64(), s2.next_u64());
    }

    #[test]
    fn zero_points_rejected() {
        let d = CircularDensity::uniform();
        assert!(sample_points(&d, 0, &mut derive_stream(0, 0)).is_err());
    }

    #[test]
    fn golden_von_mises_sample() {
        let d = CircularDensity::von_mises(1.0, 0.1).unwrap();
        let s = sample_points(&d, 5, &mut derive_stream(2024, 3)).unwrap();
        let golden = [
            0.020334930469887214,
            0.0811479613802043,
            0.12048266616802039,
            0.7698787314879045,
            0.827943196038144,
        ];
        assert_eq!(s.positions(), &golden[..], "{:?}", s.positions());
    }

    #[test]
    fn von_mises_circular_mean() {
        let mu = 0.3;
        let d = CircularDensity::von_mises(1.0, mu).unwrap();
        let s = sample_points(&d, 1_000_000, &mut derive_stream(5, 0)).unwrap();
        let tau = std::f64::consts::TAU;
        let vals: Vec<f64> = s.positions().iter().map(|x| (tau * x - mu).cos()).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        let oracle = integrate_periodic_converged(|x| (tau * x - mu).cos() * d.value(x)).unwrap();
        // I₁(1) / I₀(1)
        assert!((oracle - 0.446_389_965_896_534_5).abs() < 1e-12, "{oracle}");
        assert!(
            (mean - oracle).abs() < 3.0 * se,
            "{mean} vs {oracle} (se {se})"
        );
    }

    #[test]
    fn von_mises_chi_square_fit() {
        let d = CircularDensity::von_mises(1.0, 0.1).unwrap();
        let n = 100_000;
        let s = sample_points(&d, n, &mut derive_stream(77, 0)).unwrap();
        let bins = 50;
        let mut counts = vec![0usize; bins];
        for &x in s.positions() {
            counts[((x * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .enumerate()
            .map(|(b, &c)| {
                let lo = b as f64 / bins as f64;
                let mass = integrate_interval(|x| d.value(x), lo, lo + 1.0 / bins as f64);
                let e = mass * n as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let p = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(chi2);
        assert!(p > 0.001, "chi2 {chi2}, p {p}");
    }

    #[test]
    fn arc_draws_stay_in_arc() {
        let d = CircularDensity::new(DensitySpec::VonMises {
            kappa: 2.0,
            mu: 0.0,
        })
        .unwrap();
        let mut s = derive_stream(3, 3);
        for _ in 0..1000 {
            let x = sample_in_arc(&d, 0.99, 0.02, &mut s);
            assert!((0.0..1.0).contains(&x));
            assert!(circle_distance(x, 0.99) <= 0.02 + 1e-15);
        }
    }

    #[test]
    fn distance_examples() {
        assert!((circle_distance(0.9, 0.1) - 0.2).abs() < 1e-15);
        assert_eq!(circle_distance(0.3, 0.3), 0.0);
        assert_eq!(circle_distance(0.0, 0.5), 0.5);
    }

    #[test]
    fn from_sorted_validation() {
        assert!(PointSample::from_sorted(vec![0.2, 0.1]).is_err());
        assert!(PointSample::from_sorted(vec![0.1, 1.0]).is_err());
        assert!(PointSample::from_unsorted(vec![0.5, 0.1, 0.3]).is_ok());
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
            let ab = circle_distance(a, b);
            prop_assert!((0.0..=0.5).contains(&ab));
            prop_assert_eq!(ab, circle_distance(b, a));
            prop_assert!(ab <= circle_distance(a, c) + circle_distance(c, b) + 1e-15);
        }

        #[test]
        fn sorting_preserves_multiset(mut xs in proptest::collection::vec(0.0..1.0f64, 1..200)) {
            let s = PointSample::from_unsorted(xs.clone()).unwrap();
            xs.sort_by(f64::total_cmp);
            prop_assert_eq!(s.positions(), &xs[..]);
        }
    }
}
