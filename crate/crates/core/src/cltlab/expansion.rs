use serde::{Deserialize, Serialize};

use crate::analytics::{
    edge_expansion_given, edge_probability_given, exact_triangle_probability,
    exact_twopath_probability, mu_n, triangle_expansion, twopath_expansion,
};
use crate::density::CircularDensity;
use crate::error::{Error, Result};

/// Quantity whose small-`r` expansion is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `P(A₁₂ | X₁ = x)`, worst case over a grid of `x`.
    Edge,
    TwoPath,
    Triangle,
    MuN,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [
        Quantity::Edge,
        Quantity::TwoPath,
        Quantity::Triangle,
        Quantity::MuN,
    ];
}

/// `|exact - expansion|` along a decreasing radius grid and the observed
/// convergence order between successive radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCheck {
    pub quantity: Quantity,
    pub r_grid: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log(e_i / e_{i+1}) / log(r_i / r_{i+1})`; `None` where an error is
    /// exactly zero.
    pub orders: Vec<Option<f64>>,
}

impl ExpansionCheck {
    /// Every defined order is at least `bar`, or the expansion is exact.
    pub fn passes(&self, bar: f64) -> bool {
        self.errors.iter().all(|&e| e == 0.0)
            || self.orders.iter().all(|o| o.is_some_and(|o| o >= bar))
    }

    pub fn min_order(&self) -> Option<f64> {
        self.orders.iter().flatten().copied().reduce(f64::min)
    }
}

const EDGE_X_GRID: usize = 64;

fn error_at(density: &CircularDensity, quantity: Quantity, r: f64) -> Result<f64> {
    Ok(match quantity {
        Quantity::Edge => {
            let mut worst = 0.0f64;
            for i in 0..EDGE_X_GRID {
                let x = i as f64 / EDGE_X_GRID as f64;
                let e =
                    edge_probability_given(density, r, x)? - edge_expansion_given(density, r, x);
                worst = worst.max(e.abs());
            }
            worst
        }
        Quantity::TwoPath => {
            let m = density.moments()?;
            (exact_twopath_probability(density, r)? - twopath_expansion(&m, r)).abs()
        }
        Quantity::Triangle => {
            let m = density.moments()?;
            (exact_triangle_probability(density, r)? - triangle_expansion(&m, r)).abs()
        }
        Quantity::MuN => {
            let mu = mu_n(density, r)?;
            (mu.exact - mu.expansion).abs()
        }
    })
}

pub fn expansion_scaling_check(
    density: &CircularDensity,
    quantity: Quantity,
    r_grid: &[f64],
) -> Result<ExpansionCheck> {
    if r_grid.len() < 2
        || r_grid.windows(2).any(|w| w[1] >= w[0])
        || r_grid.iter().any(|&r| r <= 0.0)
    {
        return Err(Error::InvalidArgument(
            "radius grid must hold at least two strictly decreasing positive values".into(),
        ));
    }
    let errors = r_grid
        .iter()
        .map(|&r| error_at(density, quantity, r))
        .collect::<Result<Vec<_>>>()?;
    let orders = errors
        .windows(2)
        .zip(r_grid.windows(2))
        .map(|(e, r)| (e[0] > 0.0 && e[1] > 0.0).then(|| (e[0] / e[1]).ln() / (r[0] / r[1]).ln()))
        .collect();
    Ok(ExpansionCheck {
        quantity,
        r_grid: r_grid.to_vec(),
        errors,
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [f64; 4] = [0.02, 0.01, 0.005, 0.0025];

    #[test]
    fn uniform_edge_is_exact() {
        let u = CircularDensity::uniform();
        let c = expansion_scaling_check(&u, Quantity::Edge, &GRID).unwrap();
        assert!(c.errors.iter().all(|&e| e == 0.0));
        assert!(c.passes(3.5));
    }

    #[test]
    fn von_mises_orders() {
        let d = CircularDensity::von_mises(1.0, 0.0).unwrap();
        let tri = expansion_scaling_check(&d, Quantity::Triangle, &GRID).unwrap();
        assert!(tri.passes(3.5), "{tri:?}");
        let mu = expansion_scaling_check(&d, Quantity::MuN, &GRID).unwrap();
        assert!(mu.passes(2.5), "{mu:?}");
    }

    #[test]
    fn grid_validation() {
        let u = CircularDensity::uniform();
        assert!(expansion_scaling_check(&u, Quantity::Edge, &[0.01]).is_err());
        assert!(expansion_scaling_check(&u, Quantity::Edge, &[0.01, 0.02]).is_err());
        assert!(expansion_scaling_check(&u, Quantity::Triangle, &[0.4, 0.2]).is_err());
    }
}
