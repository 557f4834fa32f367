//! Exact analytic optima for the homogeneous single-product cases, used both
//! as an API and as ground truth for the numerical optimizer.

use crate::error::{ModelError, Result};
use crate::optimizer::{maximize_1d, DEFAULT_GRID};

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(ModelError::InvalidAcceptance(alpha));
    }
    Ok(())
}

/// Profit-maximizing quality for a homogeneous population at unit price:
/// `alpha / (alpha + 1)`.
pub fn optimal_quality_homogeneous(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(alpha / (alpha + 1.0))
}

/// Optimal profit per buyer for a homogeneous population at unit price:
/// `alpha^(alpha+1) / (alpha+1)^(alpha+2) - z`.
pub fn optimal_profit_homogeneous(alpha: f64, z: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !z.is_finite() || z < 0.0 {
        return Err(ModelError::InvalidCost(z));
    }
    Ok(alpha.powf(alpha + 1.0) / (alpha + 1.0).powf(alpha + 2.0) - z)
}

/// Optimal profit per buyer under the generalized acceptance prefactor
/// `1 - (alpha+1)^(-beta)`. The optimal quality does not depend on β, so
/// this stays closed-form: `(1 - (alpha+1)^(-beta)) * alpha^alpha /
/// (alpha+1)^(alpha+1) - z`.
pub fn optimal_profit_homogeneous_beta(alpha: f64, z: f64, beta: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !z.is_finite() || z < 0.0 {
        return Err(ModelError::InvalidCost(z));
    }
    if !beta.is_finite() || beta <= 0.0 {
        return Err(ModelError::InvalidExponent(beta));
    }
    let peak = alpha.powf(alpha) / (alpha + 1.0).powf(alpha + 1.0);
    Ok((1.0 - (alpha + 1.0).powf(-beta)) * peak - z)
}

/// Joint price/quality optimum for a homogeneous population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceQualityOptimum {
    /// Optimal quality `alpha / 2`.
    pub q_star: f64,
    /// Optimal price, exactly `q_star + 1/2`.
    pub p_star: f64,
    /// Optimal profit per buyer at zero fixed cost.
    pub x_star: f64,
}

/// Closed-form joint optimum `q* = alpha/2`, `p* = (alpha+1)/2`; the profit
/// is evaluated through [`crate::model::expected_profit_priced`].
pub fn optimal_price_quality(alpha: f64) -> Result<PriceQualityOptimum> {
    check_alpha(alpha)?;
    let q_star = alpha / 2.0;
    // Constructed as q* + 1/2 so the constant markup survives rounding.
    let p_star = q_star + 0.5;
    let pop = crate::model::Population::homogeneous(alpha, 0.0)?;
    let cost = crate::model::CostModel::independent(0.0)?;
    let x_star = crate::model::expected_profit_priced(q_star, p_star, &pop, &cost)?;
    Ok(PriceQualityOptimum {
        q_star,
        p_star,
        x_star,
    })
}

/// The acceptance parameter separating the cooperative region (vendor
/// profit rises with buyer discrimination) from the defensive one, i.e. the
/// argmax of `alpha -> optimal_profit_homogeneous_beta(alpha, z, beta)`.
/// Located numerically on alpha in [1e-3, 10] to better than 1e-6.
pub fn cooperative_boundary(z: f64, beta: f64) -> Result<f64> {
    let result = maximize_1d(
        |alpha| optimal_profit_homogeneous_beta(alpha, z, beta),
        1e-3,
        10.0,
        DEFAULT_GRID,
        1e-8,
    )?;
    Ok(result.global_arg[0])
}
