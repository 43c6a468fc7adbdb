//! Analytic side of the clustering-coefficient limit theory: exact
//! subgraph probabilities, the centering constant, regime classification,
//! standardization, and the second-projection variance.

mod kernel;
mod probability;
mod regime;
mod scaling;

pub use kernel::{
    h1_exact, h1_leading, kernel_h, sigma2n_sq_mc, KernelValue, McEstimate, MIN_SIGMA2N_SAMPLES,
};
pub use probability::{
    edge_expansion_given, edge_probability_given, exact_triangle_probability,
    exact_twopath_probability, mu_n, regime_constants, triangle_expansion,
    triangle_expansion_given, triangle_probability_given, twopath_end_given, twopath_expansion,
    MuValues, RegimeConstants, MAX_EXACT_TRIANGLE_RADIUS,
};
pub use regime::{classify_regime, Regime, RegimeKind, Thresholds};
pub use scaling::{
    h1_variance_leading, projection_scaling, scaling, sigma3n_sq_leading, standardize,
    twopath_count_leading, StandardizationInputs,
};
