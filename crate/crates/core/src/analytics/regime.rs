use serde::{Deserialize, Serialize};

/// Finite-n cut-offs for the asymptotic regime conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Dense needs `n r⁵ >=` this.
    pub dense_min_nr5: f64,
    /// Intermediate needs `n r >=` this ...
    pub intermediate_min_nr: f64,
    /// ... and `n r⁵ <=` this unless the density is uniform.
    pub intermediate_max_nr5: f64,
    /// Sparse needs `n r <=` this ...
    pub sparse_max_nr: f64,
    /// ... and `n³ r² >=` this.
    pub sparse_min_n3r2: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            dense_min_nr5: 10.0,
            intermediate_min_nr: 10.0,
            intermediate_max_nr5: 0.1,
            sparse_max_nr: 0.1,
            sparse_min_n3r2: 10.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    /// `n r⁵ → ∞`, non-uniform density.
    #[serde(rename = "dense")]
    DenseI,
    /// `n r → ∞` with `n r⁵ → 0` or a uniform density.
    #[serde(rename = "intermediate")]
    IntermediateII,
    /// `n r → 0`, `n³ r² → ∞`.
    #[serde(rename = "sparse")]
    SparseIII,
    /// `n³ r²` too small: triangles vanish.
    Degenerate,
    /// Between the regimes (e.g. `n r` of order one).
    Ambiguous,
}

impl RegimeKind {
    pub fn is_refused(self) -> bool {
        matches!(self, RegimeKind::Degenerate | RegimeKind::Ambiguous)
    }
}

impl std::fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegimeKind::DenseI => "dense (I)",
            RegimeKind::IntermediateII => "intermediate (II)",
            RegimeKind::SparseIII => "sparse (III)",
            RegimeKind::Degenerate => "degenerate",
            RegimeKind::Ambiguous => "ambiguous",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub kind: RegimeKind,
    pub n_r5: f64,
    pub n_r: f64,
    pub n3_r2: f64,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} (n r^5 = {:.4e}, n r = {:.4e}, n^3 r^2 = {:.4e})",
            self.kind, self.n_r5, self.n_r, self.n3_r2
        )
    }
}

pub fn classify_regime(
    n: usize,
    r: f64,
    sigma1_sq: f64,
    uniform: bool,
    thresholds: &Thresholds,
) -> Regime {
    let nf = n as f64;
    let n_r5 = nf * r.powi(5);
    let n_r = nf * r;
    let n3_r2 = nf.powi(3) * r * r;
    let t = thresholds;
    let kind = if n_r5 >= t.dense_min_nr5 && sigma1_sq > 1e-12 && !uniform {
        RegimeKind::DenseI
    } else if n_r >= t.intermediate_min_nr && (n_r5 <= t.intermediate_max_nr5 || uniform) {
        RegimeKind::IntermediateII
    } else if n_r <= t.sparse_max_nr && n3_r2 >= t.sparse_min_n3r2 {
        RegimeKind::SparseIII
    } else if n3_r2 < t.sparse_min_n3r2 {
        RegimeKind::Degenerate
    } else {
        RegimeKind::Ambiguous
    };
    Regime {
        kind,
        n_r5,
        n_r,
        n3_r2,
    }
}
