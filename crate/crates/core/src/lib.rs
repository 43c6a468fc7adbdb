//! Non-uniform random geometric graphs on the unit circle.
//!
//! Vertices are i.i.d. draws from a smooth period-one density and two
//! vertices are adjacent when their circular distance is at most `r`.
//! The crate counts edges, ordered 2-paths and triangles exactly, computes
//! the global clustering coefficient, evaluates the analytic constants
//! that govern its limit law, and runs seeded replication experiments
//! that check the normal approximation in the dense, intermediate and
//! sparse regimes.
//!
//! ```
//! use rggcc::{counts, clustering_coefficient, derive_stream, sample_points, CircularDensity, DensitySpec, Radius};
//!
//! let density = CircularDensity::new(DensitySpec::VonMises { kappa: 1.0, mu: 0.1 }).unwrap();
//! let mut stream = derive_stream(7, 0);
//! let sample = sample_points(&density, 2_000, &mut stream).unwrap();
//! let c = counts(&sample, Radius::new(0.01).unwrap()).unwrap();
//! let cc = clustering_coefficient(&c).unwrap();
//! assert!(cc > 0.6 && cc < 0.9);
//! ```

pub mod analytics;
pub mod cltlab;
pub mod density;
mod error;
pub mod geometry;
pub mod quadrature;
pub mod sampler;

pub use analytics::{
    classify_regime, edge_probability_given, exact_triangle_probability, exact_twopath_probability,
    kernel_h, mu_n, regime_constants, sigma2n_sq_mc, standardize, KernelValue, McEstimate,
    MuValues, Regime, RegimeConstants, RegimeKind, StandardizationInputs, Thresholds,
};
pub use cltlab::{
    ks_statistic, run_experiment, table1_reproduce, ExperimentConfig, ExperimentOutcome,
    ExperimentSummary, RadiusRule, RegimeChoice, ReplicationRecord,
};
pub use density::{AsymptoticConstants, CircularDensity, DensityMoments, DensitySpec};
pub use error::{Error, Result};
pub use geometry::{
    brute_force_counts, clustering_coefficient, count_triangles_edge_based, count_triangles_window,
    count_two_paths, counts, degrees, Radius, SubgraphCounts,
};
pub use sampler::{circle_distance, derive_stream, sample_points, PointSample, RngStream};

/// Version string echoed into experiment summaries.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
