//! Exact subgraph counts for the circular random geometric graph.
//!
//! Adjacency is decided by a single predicate shared with the brute-force
//! oracle: for sorted positions and `j` ahead of `i` in cyclic index order,
//! the forward offset is `x_j - x_i` (no wrap) or `1 - (x_i - x_j)` (wrap),
//! and `i ~ j` iff either forward offset is at most `r`. This is the
//! floating-point expression `min(|Δ|, 1 - |Δ|) <= r` written twice, so the
//! fast paths agree with the definition bit for bit.
//!
//! For `r < 1/2` the forward offsets from `i` are nondecreasing along the
//! cyclic order and the two directions are mutually exclusive, so each
//! closed neighbourhood is one cyclic index interval. Everything below is
//! integer arithmetic on those intervals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{circle_distance, derive_stream, PointSample};

/// Largest sample accepted by [`brute_force_counts`].
pub const BRUTE_FORCE_MAX_N: usize = 2000;

/// Connection radius in `[0, 0.5]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Radius(f64);

impl Radius {
    pub fn new(r: f64) -> Result<Self> {
        if (0.0..=0.5).contains(&r) {
            Ok(Self(r))
        } else {
            Err(Error::InvalidRadius(r))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    fn is_full(self) -> bool {
        self.0 >= 0.5
    }
}

impl TryFrom<f64> for Radius {
    type Error = Error;
    fn try_from(r: f64) -> Result<Self> {
        Radius::new(r)
    }
}

impl From<Radius> for f64 {
    fn from(r: Radius) -> f64 {
        r.0
    }
}

/// Exact counts for one graph realization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphCounts {
    pub n: usize,
    /// Unordered adjacent pairs.
    pub edges: u64,
    /// `Σ d_i (d_i - 1)`: ordered triples `(i, j, k)` of distinct vertices
    /// with `i ~ j` and `j ~ k`.
    pub ordered_two_paths: u128,
    /// Unordered triangles.
    pub triangles: u128,
}

#[inline]
fn forward_offset(pos: &[f64], i: usize, j: usize) -> f64 {
    if j > i {
        pos[j] - pos[i]
    } else {
        1.0 - (pos[i] - pos[j])
    }
}

/// Forward and backward neighbour counts per vertex (`r < 0.5`).
struct Windows {
    forward: Vec<usize>,
    backward: Vec<usize>,
}

fn windows(pos: &[f64], r: f64) -> Windows {
    let n = pos.len();
    let mut forward = vec![0usize; n];
    // `end` is an unrolled index: vertices i+1 .. end (mod n) are forward
    // neighbours of i. It never moves backwards as i advances.
    let mut end = 0usize;
    for (i, m) in forward.iter_mut().enumerate() {
        end = end.max(i + 1);
        while end < i + n && forward_offset(pos, i, end % n) <= r {
            end += 1;
        }
        *m = end - i - 1;
    }
    // Each forward range (i, i + m_i] contributes one backward neighbour to
    // every vertex in it.
    let mut diff = vec![0i64; 2 * n + 1];
    for (i, &m) in forward.iter().enumerate() {
        if m > 0 {
            diff[i + 1] += 1;
            diff[i + m + 1] -= 1;
        }
    }
    let mut backward = vec![0usize; n];
    let mut running = 0i64;
    for (k, d) in diff.iter().take(2 * n).enumerate() {
        running += d;
        backward[k % n] += running as usize;
    }
    Windows { forward, backward }
}

fn check_sorted(sample: &PointSample) -> Result<()> {
    if sample.positions().windows(2).all(|w| w[0] <= w[1]) {
        Ok(())
    } else {
        Err(Error::NotSorted)
    }
}

pub fn degrees(sample: &PointSample, r: Radius) -> Result<Vec<u64>> {
    check_sorted(sample)?;
    let n = sample.n();
    if r.is_full() {
        return Ok(vec![n.saturating_sub(1) as u64; n]);
    }
    let w = windows(sample.positions(), r.get());
    Ok(w.forward
        .iter()
        .zip(&w.backward)
        .map(|(f, b)| (f + b) as u64)
        .collect())
}

/// `Σ d_i (d_i - 1)`.
pub fn count_two_paths(degrees: &[u64]) -> u128 {
    degrees
        .iter()
        .map(|&d| d as u128 * (d as u128).saturating_sub(1))
        .sum()
}

/// Triangle count `Σ C(m_i, 2)` with `m_i` the number of points in the
/// forward arc `(x_i, x_i + r]`.
///
/// Valid only for `r < 1/3`: the three cyclic gaps of a triangle sum to 1,
/// so exactly one of them exceeds `r` and the vertex after it sees both
/// others in its forward arc.
pub fn count_triangles_window(sample: &PointSample, r: Radius) -> Result<u128> {
    check_sorted(sample)?;
    if r.get() >= 1.0 / 3.0 {
        return Err(Error::RadiusTooLarge {
            r: r.get(),
            max: 1.0 / 3.0,
        });
    }
    let w = windows(sample.positions(), r.get());
    Ok(w.forward.iter().map(|&m| choose2(m as u128)).sum())
}

/// Triangle count for any `r <= 0.5`: for every edge, the common
/// neighbours are the intersection of two cyclic index intervals (up to
/// two pieces once `r > 1/4`), minus the edge's own endpoints.
pub fn count_triangles_edge_based(sample: &PointSample, r: Radius) -> Result<u128> {
    check_sorted(sample)?;
    let n = sample.n();
    if r.is_full() {
        return Ok(choose3(n as u128));
    }
    let w = windows(sample.positions(), r.get());
    let intervals: Vec<CyclicInterval> = (0..n)
        .map(|i| CyclicInterval {
            start: (i + n - w.backward[i]) % n,
            len: w.backward[i] + w.forward[i] + 1,
        })
        .collect();
    let mut closed_paths: u128 = 0;
    for i in 0..n {
        for t in 1..=w.forward[i] {
            let j = (i + t) % n;
            closed_paths += (intervals[i].overlap(&intervals[j], n) - 2) as u128;
        }
    }
    debug_assert_eq!(closed_paths % 3, 0);
    Ok(closed_paths / 3)
}

#[derive(Clone, Copy, Debug)]
struct CyclicInterval {
    start: usize,
    len: usize,
}

impl CyclicInterval {
    /// Size of the intersection of two cyclic intervals of `0..n`.
    fn overlap(&self, other: &CyclicInterval, n: usize) -> usize {
        let (a0, a1) = (self.start as i64, (self.start + self.len) as i64);
        let n = n as i64;
        [-n, 0, n]
            .iter()
            .map(|shift| {
                let b0 = other.start as i64 + shift;
                let b1 = b0 + other.len as i64;
                (a1.min(b1) - a0.max(b0)).max(0)
            })
            .sum::<i64>() as usize
    }
}

fn choose2(m: u128) -> u128 {
    m * m.saturating_sub(1) / 2
}

fn choose3(n: u128) -> u128 {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// All three counts; the window triangle counter is used for `r < 1/3`,
/// the edge-based one otherwise.
pub fn counts(sample: &PointSample, r: Radius) -> Result<SubgraphCounts> {
    check_sorted(sample)?;
    let n = sample.n();
    if r.is_full() {
        let n128 = n as u128;
        return Ok(SubgraphCounts {
            n,
            edges: choose2(n128) as u64,
            ordered_two_paths: n128 * n128.saturating_sub(1) * n128.saturating_sub(2),
            triangles: choose3(n128),
        });
    }
    let w = windows(sample.positions(), r.get());
    let edges: u64 = w.forward.iter().map(|&m| m as u64).sum();
    let degs: Vec<u64> = w
        .forward
        .iter()
        .zip(&w.backward)
        .map(|(f, b)| (f + b) as u64)
        .collect();
    let triangles = if r.get() < 1.0 / 3.0 {
        w.forward.iter().map(|&m| choose2(m as u128)).sum()
    } else {
        count_triangles_edge_based(sample, r)?
    };
    Ok(SubgraphCounts {
        n,
        edges,
        ordered_two_paths: count_two_paths(&degs),
        triangles,
    })
}

/// `6 T / Σ d_i (d_i - 1)`, or `None` when the graph has no 2-path.
pub fn clustering_coefficient(counts: &SubgraphCounts) -> Option<f64> {
    if counts.ordered_two_paths == 0 {
        None
    } else {
        Some((6 * counts.triangles) as f64 / counts.ordered_two_paths as f64)
    }
}

/// Counts straight from the definition: O(n²) adjacency, O(n³) triples.
pub fn brute_force_counts(sample: &PointSample, r: Radius) -> Result<SubgraphCounts> {
    let pos = sample.positions();
    let n = pos.len();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let r = r.get();
    let mut adj = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            adj[i * n + j] = i != j && circle_distance(pos[i], pos[j]) <= r;
        }
    }
    let degs: Vec<u64> = (0..n)
        .map(|i| adj[i * n..(i + 1) * n].iter().filter(|&&a| a).count() as u64)
        .collect();
    let mut triangles = 0u128;
    for i in 0..n {
        for j in i + 1..n {
            if !adj[i * n + j] {
                continue;
            }
            for k in j + 1..n {
                if adj[i * n + k] && adj[j * n + k] {
                    triangles += 1;
                }
            }
        }
    }
    Ok(SubgraphCounts {
        n,
        edges: degs.iter().sum::<u64>() / 2,
        ordered_two_paths: count_two_paths(&degs),
        triangles,
    })
}

/// Result of [`oracle_sweep`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub instances: usize,
    pub mismatches: Vec<OracleMismatch>,
    pub wraparound_fixture_ok: bool,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.wraparound_fixture_ok
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleMismatch {
    pub instance: usize,
    pub n: usize,
    pub r: f64,
    pub fast: SubgraphCounts,
    pub brute: SubgraphCounts,
}

/// Compares [`counts`] with [`brute_force_counts`] on `instances` random
/// samples (uniform positions, `n` in `1..=max_n`, `r` uniform on `(0, 0.5]`),
/// plus the `{0, 0.4, 0.8}`, `r = 0.4` wraparound triangle.
pub fn oracle_sweep(instances: usize, max_n: usize, seed: u64) -> Result<OracleReport> {
    let max_n = max_n.clamp(1, BRUTE_FORCE_MAX_N);
    let mut mismatches = Vec::new();
    for k in 0..instances {
        let mut rng = derive_stream(seed, k as u64);
        let n = rng.random_range(1..=max_n);
        // (0, 0.5]
        let r = 0.5 * (1.0 - rng.random::<f64>());
        let positions: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let sample = PointSample::from_unsorted(positions)?;
        let radius = Radius::new(r)?;
        let fast = counts(&sample, radius)?;
        let brute = brute_force_counts(&sample, radius)?;
        if fast != brute {
            mismatches.push(OracleMismatch {
                instance: k,
                n,
                r,
                fast,
                brute,
            });
        }
    }
    let fixture = PointSample::from_sorted(vec![0.0, 0.4, 0.8])?;
    let wraparound_fixture_ok = counts(&fixture, Radius::new(0.4)?)?.triangles == 1;
    Ok(OracleReport {
        instances,
        mismatches,
        wraparound_fixture_ok,
    })
}
