//! Probabilities and expected profits of the two-step purchase model.
//!
//! A buyer first selects one of the displayed variants (selection
//! probability, weighted by display prominence and the buyer's selection
//! parameter σ), then accepts or rejects the selected variant (acceptance
//! probability, driven by quality and the buyer's acceptance parameter α).
//! Profits are reported per buyer.
//!
//! Everything in this module is a pure function of immutable inputs: same
//! inputs give bit-identical outputs, and all types are value-semantic and
//! safe to share across threads.

use crate::error::{ModelError, Result};

/// Absolute tolerance for "sums to one" checks on proportions and weights.
pub const SUM_TOLERANCE: f64 = 1e-12;

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(ModelError::InvalidAcceptance(alpha));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(ModelError::InvalidSelection(sigma));
    }
    Ok(())
}

fn check_quality(q: f64, max: f64) -> Result<()> {
    if !q.is_finite() || q < 0.0 || q > max {
        return Err(ModelError::QualityOutOfRange { value: q, max });
    }
    Ok(())
}

fn check_exponent(e: f64) -> Result<()> {
    if !e.is_finite() || e <= 0.0 {
        return Err(ModelError::InvalidExponent(e));
    }
    Ok(())
}

/// A homogeneous sub-population: acceptance parameter α, selection
/// parameter σ, and its share of the whole population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuyerGroup {
    alpha: f64,
    sigma: f64,
    proportion: f64,
}

impl BuyerGroup {
    pub fn new(alpha: f64, sigma: f64, proportion: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_sigma(sigma)?;
        if !proportion.is_finite() || !(0.0..=1.0).contains(&proportion) {
            return Err(ModelError::InvalidProportion(proportion));
        }
        Ok(Self {
            alpha,
            sigma,
            proportion,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn proportion(&self) -> f64 {
        self.proportion
    }
}

/// A weighted mixture of buyer groups plus the buyer count N.
///
/// N is used only by the Monte Carlo engine and absolute-profit reporting;
/// all analytic profits are per buyer.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    groups: Vec<BuyerGroup>,
    n_buyers: u64,
}

impl Population {
    pub fn new(groups: Vec<BuyerGroup>, n_buyers: u64) -> Result<Self> {
        if groups.is_empty() {
            return Err(ModelError::EmptyPopulation);
        }
        if n_buyers == 0 {
            return Err(ModelError::NoBuyers);
        }
        let total: f64 = groups.iter().map(|g| g.proportion).sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(ModelError::UnnormalizedProportions(total));
        }
        Ok(Self { groups, n_buyers })
    }

    /// Single group with proportion 1 and a buyer count of 1.
    pub fn homogeneous(alpha: f64, sigma: f64) -> Result<Self> {
        Self::new(vec![BuyerGroup::new(alpha, sigma, 1.0)?], 1)
    }

    pub fn groups(&self) -> &[BuyerGroup] {
        &self.groups
    }

    pub fn n_buyers(&self) -> u64 {
        self.n_buyers
    }

    pub fn min_alpha(&self) -> f64 {
        self.groups
            .iter()
            .map(|g| g.alpha)
            .fold(f64::INFINITY, f64::min)
    }
}

/// How production costs scale with the displayed variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductionMode {
    /// Each displayed variant is produced separately: fixed cost M·z and
    /// per-item margin set by its own quality.
    Independent,
    /// One high-quality line, partially degraded: every item carries the
    /// top-quality margin and the fixed cost z is paid once.
    DamagedGoods,
}

/// Fixed cost per variant per buyer plus the production mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    z: f64,
    mode: ProductionMode,
}

impl CostModel {
    pub fn new(z: f64, mode: ProductionMode) -> Result<Self> {
        if !z.is_finite() || z < 0.0 {
            return Err(ModelError::InvalidCost(z));
        }
        Ok(Self { z, mode })
    }

    /// Independent production with fixed cost `z`.
    pub fn independent(z: f64) -> Result<Self> {
        Self::new(z, ProductionMode::Independent)
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn mode(&self) -> ProductionMode {
        self.mode
    }

    /// Total fixed cost per buyer for `m` displayed variants.
    pub fn fixed_cost(&self, m: usize) -> f64 {
        match self.mode {
            ProductionMode::Independent => m as f64 * self.z,
            ProductionMode::DamagedGoods => self.z,
        }
    }
}

/// M displayed qualities with display weights, a unit price, and the
/// prefactor/margin exponents β and γ (both default 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductLine {
    qualities: Vec<f64>,
    weights: Vec<f64>,
    price: f64,
    beta: f64,
    gamma: f64,
}

impl ProductLine {
    /// Uniform weights, price 1, β = γ = 1.
    pub fn new(qualities: Vec<f64>) -> Result<Self> {
        Self::priced(qualities, 1.0)
    }

    /// Uniform weights at an explicit unit price (qualities up to the price
    /// are legal), β = γ = 1.
    pub fn priced(qualities: Vec<f64>, price: f64) -> Result<Self> {
        if qualities.is_empty() {
            return Err(ModelError::EmptyProductLine);
        }
        let m = qualities.len();
        let line = Self {
            qualities,
            weights: vec![1.0 / m as f64; m],
            price,
            beta: 1.0,
            gamma: 1.0,
        };
        line.validate()?;
        Ok(line)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.qualities.len() {
            return Err(ModelError::WeightCountMismatch {
                expected: self.qualities.len(),
                got: weights.len(),
            });
        }
        self.weights = weights;
        self.validate()?;
        Ok(self)
    }

    pub fn with_price(mut self, price: f64) -> Result<Self> {
        self.price = price;
        self.validate()?;
        Ok(self)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !self.price.is_finite() || self.price <= 0.0 {
            return Err(ModelError::InvalidPrice(self.price));
        }
        check_exponent(self.beta)?;
        check_exponent(self.gamma)?;
        for &q in &self.qualities {
            check_quality(q, self.price)?;
        }
        validate_weights(&self.weights)?;
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.qualities.len()
    }

    pub fn qualities(&self) -> &[f64] {
        &self.qualities
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn price(&self) -> f64 {
        self.price
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

pub(crate) fn validate_weights(weights: &[f64]) -> Result<()> {
    let mut total = 0.0;
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(ModelError::InvalidWeight(w));
        }
        total += w;
    }
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(ModelError::UnnormalizedWeights(total));
    }
    Ok(())
}

/// Probability that a buyer with acceptance parameter `alpha` buys a
/// selected product of quality `q` at unit price:
/// `(1 - 1/(alpha+1)) * q^alpha`, with `0^0 := 1`.
pub fn acceptance_prob(q: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_quality(q, 1.0)?;
    Ok((1.0 - 1.0 / (alpha + 1.0)) * q.powf(alpha))
}

/// Acceptance probability with a generalized prefactor
/// `(1 - (alpha+1)^(-beta)) * q^alpha`; `beta = 1` recovers
/// [`acceptance_prob`] bit-for-bit.
pub fn acceptance_prob_beta(q: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_exponent(beta)?;
    if beta == 1.0 {
        return acceptance_prob(q, alpha);
    }
    check_alpha(alpha)?;
    check_quality(q, 1.0)?;
    Ok((1.0 - (alpha + 1.0).powf(-beta)) * q.powf(alpha))
}

/// Acceptance probability with price as a free parameter:
/// `(1 - p/(alpha+1)) * (q/p)^alpha`, requiring `0 < p <= alpha+1` and
/// `0 <= q <= p`. At `p = 1` this reduces to [`acceptance_prob`].
pub fn acceptance_prob_priced(q: f64, price: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !price.is_finite() || price <= 0.0 {
        return Err(ModelError::InvalidPrice(price));
    }
    if price > alpha + 1.0 {
        return Err(ModelError::PriceAboveBound {
            price,
            bound: alpha + 1.0,
        });
    }
    check_quality(q, price)?;
    Ok((1.0 - price / (alpha + 1.0)) * (q / price).powf(alpha))
}

/// Selection probabilities of all displayed variants for one buyer type:
/// `r_m * q_m^sigma / sum_m' r_m' * q_m'^sigma`.
///
/// σ = 0 returns the weights unchanged; if every positively-weighted
/// quality is zero the weights are returned as the degenerate limit.
/// Powers are evaluated on qualities rescaled by the best displayed
/// quality, so large σ never overflows.
pub fn selection_probs(qualities: &[f64], weights: &[f64], sigma: f64) -> Result<Vec<f64>> {
    check_sigma(sigma)?;
    if qualities.is_empty() {
        return Err(ModelError::EmptyProductLine);
    }
    if weights.len() != qualities.len() {
        return Err(ModelError::WeightCountMismatch {
            expected: qualities.len(),
            got: weights.len(),
        });
    }
    for &q in qualities {
        if !q.is_finite() || q < 0.0 {
            return Err(ModelError::QualityOutOfRange {
                value: q,
                max: f64::INFINITY,
            });
        }
    }
    validate_weights(weights)?;

    if sigma == 0.0 {
        return Ok(weights.to_vec());
    }
    let q_max = qualities
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&q, _)| q)
        .fold(0.0, f64::max);
    if q_max == 0.0 {
        return Ok(weights.to_vec());
    }

    let scaled: Vec<f64> = qualities
        .iter()
        .zip(weights)
        .map(|(&q, &w)| w * (q / q_max).powf(sigma))
        .collect();
    let denom: f64 = scaled.iter().sum();
    Ok(scaled.into_iter().map(|u| u / denom).collect())
}

/// Selection probability of variant `m` (0-based index); see
/// [`selection_probs`].
pub fn selection_prob(m: usize, qualities: &[f64], weights: &[f64], sigma: f64) -> Result<f64> {
    if m >= qualities.len() {
        return Err(ModelError::VariantIndexOutOfRange {
            index: m,
            len: qualities.len(),
        });
    }
    Ok(selection_probs(qualities, weights, sigma)?[m])
}

fn margin(q: f64, price: f64, gamma: f64) -> f64 {
    if gamma == 1.0 {
        price - q
    } else {
        price - q.powf(gamma)
    }
}

/// Expected profit per buyer of a single displayed product at unit price:
/// `(1 - q^gamma) * sum_i c_i * P_A(q, alpha_i) - z`.
pub fn expected_profit_single(q: f64, pop: &Population, cost: &CostModel) -> Result<f64> {
    expected_profit_single_with(q, pop, cost, 1.0, 1.0)
}

/// [`expected_profit_single`] with explicit prefactor exponent β and
/// margin exponent γ.
pub fn expected_profit_single_with(
    q: f64,
    pop: &Population,
    cost: &CostModel,
    beta: f64,
    gamma: f64,
) -> Result<f64> {
    if cost.mode() == ProductionMode::DamagedGoods {
        return Err(ModelError::DamagedGoodsSingleVariant);
    }
    check_exponent(gamma)?;
    let margin = margin(q, 1.0, gamma);
    let mut total = 0.0;
    for g in pop.groups() {
        total += g.proportion() * (margin * acceptance_prob_beta(q, g.alpha(), beta)?);
    }
    Ok(total - cost.z())
}

/// Expected profit per buyer of a single product with a free price:
/// `(p - q^gamma) * sum_i c_i * P_A(q, p, alpha_i) - z`.
pub fn expected_profit_priced(
    q: f64,
    price: f64,
    pop: &Population,
    cost: &CostModel,
) -> Result<f64> {
    expected_profit_priced_with(q, price, pop, cost, 1.0)
}

/// [`expected_profit_priced`] with explicit margin exponent γ.
pub fn expected_profit_priced_with(
    q: f64,
    price: f64,
    pop: &Population,
    cost: &CostModel,
    gamma: f64,
) -> Result<f64> {
    if cost.mode() == ProductionMode::DamagedGoods {
        return Err(ModelError::DamagedGoodsSingleVariant);
    }
    check_exponent(gamma)?;
    let bound = pop.min_alpha() + 1.0;
    if price > bound {
        return Err(ModelError::PriceAboveBound { price, bound });
    }
    let margin = margin(q, price, gamma);
    let mut total = 0.0;
    for g in pop.groups() {
        total += g.proportion() * (margin * acceptance_prob_priced(q, price, g.alpha())?);
    }
    Ok(total - cost.z())
}

/// Expected profit per buyer of the full product line under the two-step
/// purchase process.
///
/// Independent mode: `sum_m (margin_m) * sum_i c_i * P_S(m | ...) *
/// P_A(q_m, ...) - M*z`. Damaged-goods mode: every item carries the
/// top-quality margin and the fixed cost is z.
pub fn expected_profit_multi(
    line: &ProductLine,
    pop: &Population,
    cost: &CostModel,
) -> Result<f64> {
    if cost.mode() == ProductionMode::DamagedGoods && line.m() < 2 {
        return Err(ModelError::DamagedGoodsSingleVariant);
    }
    if line.price() != 1.0 {
        if line.beta() != 1.0 {
            return Err(ModelError::UnsupportedConfiguration(
                "a price different from 1 requires beta = 1".into(),
            ));
        }
        let bound = pop.min_alpha() + 1.0;
        if line.price() > bound {
            return Err(ModelError::PriceAboveBound {
                price: line.price(),
                bound,
            });
        }
    }
    profit_multi_checked(
        line.qualities(),
        line.weights(),
        line.price(),
        line.beta(),
        line.gamma(),
        pop,
        cost,
    )
}

fn profit_multi_checked(
    qualities: &[f64],
    weights: &[f64],
    price: f64,
    beta: f64,
    gamma: f64,
    pop: &Population,
    cost: &CostModel,
) -> Result<f64> {
    let m = qualities.len();
    let q_top = qualities.iter().fold(0.0, |a: f64, &b| a.max(b));
    let mut total = 0.0;
    for g in pop.groups() {
        let probs = selection_probs(qualities, weights, g.sigma())?;
        let mut group_value = 0.0;
        for (idx, &q) in qualities.iter().enumerate() {
            let pa = if price == 1.0 {
                acceptance_prob_beta(q, g.alpha(), beta)?
            } else {
                acceptance_prob_priced(q, price, g.alpha())?
            };
            let item_margin = match cost.mode() {
                ProductionMode::Independent => margin(q, price, gamma),
                ProductionMode::DamagedGoods => margin(q_top, price, gamma),
            };
            let p_sel = if m == 1 { 1.0 } else { probs[idx] };
            group_value += p_sel * (item_margin * pa);
        }
        total += g.proportion() * group_value;
    }
    Ok(total - cost.fixed_cost(m))
}

/// Profit evaluation on raw slices for optimizer inner loops. The caller
/// guarantees the ranges that `ProductLine`/`Population` enforce.
pub(crate) fn profit_multi_raw(
    qualities: &[f64],
    weights: &[f64],
    price: f64,
    beta: f64,
    gamma: f64,
    pop: &Population,
    cost: &CostModel,
) -> f64 {
    let m = qualities.len();
    let q_top = qualities.iter().fold(0.0, |a: f64, &b| a.max(b));
    let damaged = cost.mode() == ProductionMode::DamagedGoods;
    let priced = price != 1.0;
    let mut total = 0.0;
    for g in pop.groups() {
        let alpha = g.alpha();
        let sigma = g.sigma();
        let pref = if priced {
            1.0 - price / (alpha + 1.0)
        } else if beta == 1.0 {
            1.0 - 1.0 / (alpha + 1.0)
        } else {
            1.0 - (alpha + 1.0).powf(-beta)
        };
        let group_value = if m == 1 {
            let q = qualities[0];
            let pa = pref
                * if priced {
                    (q / price).powf(alpha)
                } else {
                    q.powf(alpha)
                };
            margin(q, price, gamma) * pa
        } else {
            // One pass: accumulate the selection numerator and denominator
            // together; probabilities are never materialized.
            let q_sel_max = qualities
                .iter()
                .zip(weights)
                .filter(|(_, &w)| w > 0.0)
                .map(|(&q, _)| q)
                .fold(0.0, f64::max);
            if sigma == 0.0 || q_sel_max == 0.0 {
                let mut v = 0.0;
                for (idx, &q) in qualities.iter().enumerate() {
                    let pa = pref
                        * if priced {
                            (q / price).powf(alpha)
                        } else {
                            q.powf(alpha)
                        };
                    let item_margin = if damaged {
                        margin(q_top, price, gamma)
                    } else {
                        margin(q, price, gamma)
                    };
                    v += weights[idx] * (item_margin * pa);
                }
                v
            } else {
                let mut numer = 0.0;
                let mut denom = 0.0;
                for (idx, &q) in qualities.iter().enumerate() {
                    let u = weights[idx] * (q / q_sel_max).powf(sigma);
                    let pa = pref
                        * if priced {
                            (q / price).powf(alpha)
                        } else {
                            q.powf(alpha)
                        };
                    let item_margin = if damaged {
                        margin(q_top, price, gamma)
                    } else {
                        margin(q, price, gamma)
                    };
                    numer += u * (item_margin * pa);
                    denom += u;
                }
                numer / denom
            }
        };
        total += g.proportion() * group_value;
    }
    total - cost.fixed_cost(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn acceptance_examples() {
        // direct substitution at q = 1, alpha = 1
        close(acceptance_prob(1.0, 1.0).unwrap(), 0.5, 0.0);
        // zero quality, alpha > 0
        assert_eq!(acceptance_prob(0.0, 2.0).unwrap(), 0.0);
        // hand evaluation: (2/3) * 0.25
        close(acceptance_prob(0.5, 2.0).unwrap(), 1.0 / 6.0, 1e-15);
        // alpha = 0 kills the prefactor, including at q = 0 where 0^0 = 1
        assert_eq!(acceptance_prob(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(acceptance_prob(0.7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn acceptance_is_in_unit_interval_and_monotone() {
        for &alpha in &[0.0, 0.1, 0.65, 1.0, 3.0, 10.0] {
            let mut prev = -1.0;
            for j in 0..=1000 {
                let q = j as f64 / 1000.0;
                let p = acceptance_prob(q, alpha).unwrap();
                assert!((0.0..1.0).contains(&p) || p == 0.0);
                assert!(p >= prev, "not nondecreasing at q={q} alpha={alpha}");
                prev = p;
            }
        }
    }

    #[test]
    fn acceptance_rejects_invalid_inputs() {
        assert!(acceptance_prob(1.2, 1.0).is_err());
        assert!(acceptance_prob(-0.1, 1.0).is_err());
        assert!(acceptance_prob(0.5, -1.0).is_err());
        assert!(acceptance_prob(f64::NAN, 1.0).is_err());
        assert!(acceptance_prob_beta(0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn priced_acceptance_examples() {
        // must equal the unit-price form
        assert_eq!(
            acceptance_prob_priced(0.5, 1.0, 1.0).unwrap(),
            acceptance_prob(0.5, 1.0).unwrap()
        );
        close(acceptance_prob_priced(0.5, 1.0, 1.0).unwrap(), 0.25, 0.0);
        // hand evaluation: (1 - 0.5/3) * 1
        close(
            acceptance_prob_priced(0.5, 0.5, 2.0).unwrap(),
            5.0 / 6.0,
            1e-15,
        );
        // hand evaluation: (1 - 0.5) * (0/p)^0 with 0^0 = 1
        close(acceptance_prob_priced(0.0, 0.5, 0.0).unwrap(), 0.5, 0.0);
    }

    #[test]
    fn priced_acceptance_domain_errors() {
        assert!(matches!(
            acceptance_prob_priced(0.5, 2.5, 1.0),
            Err(ModelError::PriceAboveBound { .. })
        ));
        assert!(acceptance_prob_priced(0.7, 0.5, 1.0).is_err()); // q > p
        assert!(acceptance_prob_priced(0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn selection_examples() {
        let uniform = [1.0 / 3.0; 3];
        // no discerning power: uniform choice
        close(
            selection_prob(0, &[0.3, 0.6, 0.9], &uniform, 0.0).unwrap(),
            1.0 / 3.0,
            0.0,
        );
        // hand evaluation of the unweighted form
        close(
            selection_prob(1, &[0.8, 0.2], &[0.5, 0.5], 1.0).unwrap(),
            0.2,
            1e-15,
        );
        // equal qualities reduce to the weights
        close(
            selection_prob(0, &[0.5, 0.5], &[0.1, 0.9], 3.0).unwrap(),
            0.1,
            1e-15,
        );
    }

    #[test]
    fn selection_degenerate_cases() {
        // all-zero qualities fall back to the weights
        assert_eq!(
            selection_probs(&[0.0, 0.0], &[0.3, 0.7], 2.0).unwrap(),
            vec![0.3, 0.7]
        );
        // sigma = 0 returns the weights even with zero qualities present
        assert_eq!(
            selection_probs(&[0.0, 0.9], &[0.4, 0.6], 0.0).unwrap(),
            vec![0.4, 0.6]
        );
        // a zero-weight variant never wins
        let p = selection_probs(&[0.9, 0.5], &[0.0, 1.0], 2.0).unwrap();
        assert_eq!(p[0], 0.0);
        assert_eq!(p[1], 1.0);
        assert!(selection_probs(&[0.5], &[1.0], -1.0).is_err());
        assert!(selection_prob(3, &[0.5, 0.6], &[0.5, 0.5], 1.0).is_err());
    }

    #[test]
    fn selection_survives_extreme_sigma() {
        let p = selection_probs(&[0.2, 0.9], &[0.5, 0.5], 5000.0).unwrap();
        assert!(p.iter().all(|v| v.is_finite()));
        close(p[1], 1.0, 1e-12);
        // large sigma with qualities above one (priced lines) must not overflow
        let p = selection_probs(&[1.5, 2.5], &[0.5, 0.5], 2000.0).unwrap();
        assert!(p.iter().all(|v| v.is_finite()));
        close(p[1], 1.0, 1e-12);
    }

    #[test]
    fn single_profit_examples() {
        let z = CostModel::independent(0.05).unwrap();
        let pop = Population::new(
            vec![
                BuyerGroup::new(1.0, 0.0, 0.5).unwrap(),
                BuyerGroup::new(3.0, 0.0, 0.5).unwrap(),
            ],
            1,
        )
        .unwrap();
        // nobody buys at q = 0 when all alpha > 0
        close(expected_profit_single(0.0, &pop, &z).unwrap(), -0.05, 0.0);

        // the analytic optimum of the homogeneous alpha = 1 case
        let homog = Population::homogeneous(1.0, 0.0).unwrap();
        let free = CostModel::independent(0.0).unwrap();
        close(
            expected_profit_single(0.5, &homog, &free).unwrap(),
            0.125,
            1e-15,
        );

        // hand evaluation for a two-group mixture
        let mix = Population::new(
            vec![
                BuyerGroup::new(0.1, 0.0, 0.5).unwrap(),
                BuyerGroup::new(3.0, 0.0, 0.5).unwrap(),
            ],
            1,
        )
        .unwrap();
        let oracle =
            0.5 * (0.5 * (1.0 - 1.0 / 1.1) * 0.5f64.powf(0.1) + 0.5 * 0.75 * 0.5f64.powi(3));
        close(
            expected_profit_single(0.5, &mix, &free).unwrap(),
            oracle,
            1e-15,
        );
    }

    #[test]
    fn multi_profit_matches_single_for_one_variant() {
        let pop = Population::new(
            vec![
                BuyerGroup::new(0.3, 1.0, 0.4).unwrap(),
                BuyerGroup::new(2.0, 3.0, 0.6).unwrap(),
            ],
            1,
        )
        .unwrap();
        let cost = CostModel::independent(0.01).unwrap();
        let line = ProductLine::new(vec![0.42]).unwrap();
        assert_eq!(
            expected_profit_multi(&line, &pop, &cost).unwrap(),
            expected_profit_single(0.42, &pop, &cost).unwrap()
        );
    }

    #[test]
    fn identical_variants_cost_one_extra_z_each() {
        let pop = Population::new(
            vec![
                BuyerGroup::new(0.3, 1.0, 0.4).unwrap(),
                BuyerGroup::new(2.0, 3.0, 0.6).unwrap(),
            ],
            1,
        )
        .unwrap();
        let free = CostModel::independent(0.0).unwrap();
        let single = expected_profit_single(0.4, &pop, &free).unwrap();
        // powers of two make the normalization exact
        for m in [2usize, 4] {
            let line = ProductLine::new(vec![0.4; m]).unwrap();
            assert_eq!(expected_profit_multi(&line, &pop, &free).unwrap(), single);
        }
        let line3 = ProductLine::new(vec![0.4; 3]).unwrap();
        close(
            expected_profit_multi(&line3, &pop, &free).unwrap(),
            single,
            1e-15,
        );

        let z = CostModel::independent(0.003).unwrap();
        let single_z = expected_profit_single(0.4, &pop, &z).unwrap();
        let line2 = ProductLine::new(vec![0.4; 2]).unwrap();
        close(
            expected_profit_multi(&line2, &pop, &z).unwrap(),
            single_z - 0.003,
            1e-15,
        );
    }

    #[test]
    fn multi_profit_hand_example() {
        let homog = Population::homogeneous(1.0, 1.0).unwrap();
        let free = CostModel::independent(0.0).unwrap();
        let line = ProductLine::new(vec![0.2, 0.75]).unwrap();
        let oracle = 0.8 * (0.2 / 0.95) * 0.5 * 0.2 + 0.25 * (0.75 / 0.95) * 0.5 * 0.75;
        close(
            expected_profit_multi(&line, &homog, &free).unwrap(),
            oracle,
            1e-12,
        );
    }

    #[test]
    fn damaged_goods_margin_and_cost() {
        let pop = Population::new(
            vec![
                BuyerGroup::new(0.2, 0.5, 0.5).unwrap(),
                BuyerGroup::new(3.0, 3.0, 0.5).unwrap(),
            ],
            1,
        )
        .unwrap();
        let cost = CostModel::new(0.01, ProductionMode::DamagedGoods).unwrap();
        let line = ProductLine::new(vec![0.3, 0.8]).unwrap();
        let got = expected_profit_multi(&line, &pop, &cost).unwrap();

        // hand evaluation: margin (1 - 0.8) for both items, one fixed cost
        let mut oracle = 0.0;
        for g in pop.groups() {
            let probs = selection_probs(&[0.3, 0.8], &[0.5, 0.5], g.sigma()).unwrap();
            for (i, &q) in [0.3, 0.8].iter().enumerate() {
                oracle += g.proportion()
                    * probs[i]
                    * (1.0 - 0.8)
                    * acceptance_prob(q, g.alpha()).unwrap();
            }
        }
        oracle -= 0.01;
        close(got, oracle, 1e-15);

        let single = ProductLine::new(vec![0.3]).unwrap();
        assert!(matches!(
            expected_profit_multi(&single, &pop, &cost),
            Err(ModelError::DamagedGoodsSingleVariant)
        ));
    }

    #[test]
    fn priced_profit_examples() {
        let homog = Population::homogeneous(1.0, 0.0).unwrap();
        let free = CostModel::independent(0.0).unwrap();
        // substituting the joint optimum: (1/2)*(1/2)*(alpha/(alpha+1))^alpha
        close(
            expected_profit_priced(0.5, 1.0, &homog, &free).unwrap(),
            0.125,
            1e-15,
        );
        // must equal the unit-price profit
        assert_eq!(
            expected_profit_priced(0.5, 1.0, &homog, &free).unwrap(),
            expected_profit_single(0.5, &homog, &free).unwrap()
        );
        // zero margin at q = p
        assert_eq!(
            expected_profit_priced(1.0, 1.0, &homog, &free).unwrap(),
            0.0
        );
        // the bound p <= min alpha + 1 is checked against the population
        assert!(matches!(
            expected_profit_priced(0.5, 2.5, &homog, &free),
            Err(ModelError::PriceAboveBound { .. })
        ));
    }

    #[test]
    fn priced_line_through_multi() {
        let homog = Population::homogeneous(2.0, 1.0).unwrap();
        let free = CostModel::independent(0.0).unwrap();
        let line = ProductLine::priced(vec![1.2], 2.0).unwrap();
        assert_eq!(
            expected_profit_multi(&line, &homog, &free).unwrap(),
            expected_profit_priced(1.2, 2.0, &homog, &free).unwrap()
        );
        // beta != 1 has no priced generalization
        let bad = ProductLine::new(vec![0.5])
            .unwrap()
            .with_price(1.5)
            .unwrap()
            .with_beta(0.5)
            .unwrap();
        assert!(expected_profit_multi(&bad, &homog, &free).is_err());
    }

    #[test]
    fn type_invariants_are_enforced() {
        assert!(BuyerGroup::new(-0.1, 0.0, 1.0).is_err());
        assert!(BuyerGroup::new(1.0, -2.0, 1.0).is_err());
        assert!(BuyerGroup::new(1.0, 0.0, 1.2).is_err());
        assert!(Population::new(vec![], 10).is_err());
        assert!(Population::new(vec![BuyerGroup::new(1.0, 0.0, 0.9).unwrap()], 10).is_err());
        assert!(Population::new(vec![BuyerGroup::new(1.0, 0.0, 1.0).unwrap()], 0).is_err());
        assert!(ProductLine::new(vec![]).is_err());
        assert!(ProductLine::new(vec![1.3]).is_err()); // q > price = 1
        assert!(ProductLine::new(vec![0.4, 0.6])
            .unwrap()
            .with_weights(vec![0.4, 0.7])
            .is_err());
        assert!(ProductLine::new(vec![0.4])
            .unwrap()
            .with_price(-1.0)
            .is_err());
        assert!(CostModel::independent(-0.1).is_err());
        // raising the price legalizes qualities above one
        assert!(ProductLine::new(vec![0.9])
            .unwrap()
            .with_price(2.0)
            .unwrap()
            .with_weights(vec![1.0])
            .is_ok());
    }

    #[test]
    fn evaluations_are_pure() {
        let pop = Population::new(
            vec![
                BuyerGroup::new(0.7, 1.3, 0.25).unwrap(),
                BuyerGroup::new(2.4, 0.2, 0.75).unwrap(),
            ],
            1,
        )
        .unwrap();
        let cost = CostModel::independent(0.004).unwrap();
        let line = ProductLine::new(vec![0.21, 0.77]).unwrap();
        let a = expected_profit_multi(&line, &pop, &cost).unwrap();
        let b = expected_profit_multi(&line, &pop, &cost).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        let p1 = acceptance_prob(0.37, 1.9).unwrap();
        let p2 = acceptance_prob(0.37, 1.9).unwrap();
        assert_eq!(p1.to_bits(), p2.to_bits());
    }

    #[test]
    fn raw_path_matches_checked_path() {
        let pop = Population::new(
            vec![
                BuyerGroup::new(0.2, 0.5, 0.5).unwrap(),
                BuyerGroup::new(3.0, 3.0, 0.5).unwrap(),
            ],
            1,
        )
        .unwrap();
        let cost = CostModel::independent(0.002).unwrap();
        for qs in [vec![0.3], vec![0.1, 0.7], vec![0.2, 0.5, 0.9]] {
            let line = ProductLine::new(qs.clone()).unwrap();
            let a = expected_profit_multi(&line, &pop, &cost).unwrap();
            let b = profit_multi_raw(&qs, line.weights(), 1.0, 1.0, 1.0, &pop, &cost);
            close(a, b, 1e-15);
        }
    }
}
