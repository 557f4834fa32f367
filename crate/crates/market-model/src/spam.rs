//! Economics of repeated display: M identical low-quality variants shown
//! consecutively to identical buyers, each accepted independently.
//!
//! The authoritative optimum comes from an exhaustive scan over the quality
//! grid and every integer display count (the profit is discretely concave
//! in the count, so the scan stops at the first non-improving step without
//! ever skipping a candidate). The closed forms are leading-order
//! approximations and are exposed as diagnostics.

use crate::error::{ModelError, Result};
use crate::exec;
use crate::model::acceptance_prob;

/// Identical buyers with acceptance parameter α, fixed cost z per variant
/// per buyer, and an optional cap on how many variants a buyer examines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpamScenario {
    alpha: f64,
    z: f64,
    perception_cap: Option<u64>,
}

impl SpamScenario {
    pub fn new(alpha: f64, z: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(ModelError::InvalidAcceptance(alpha));
        }
        if !z.is_finite() || z < 0.0 {
            return Err(ModelError::InvalidCost(z));
        }
        Ok(Self {
            alpha,
            z,
            perception_cap: None,
        })
    }

    pub fn with_perception_cap(mut self, cap: u64) -> Result<Self> {
        if cap == 0 {
            return Err(ModelError::ZeroCount);
        }
        self.perception_cap = Some(cap);
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn perception_cap(&self) -> Option<u64> {
        self.perception_cap
    }

    fn clamp_m(&self, m: u64) -> u64 {
        match self.perception_cap {
            Some(cap) => m.min(cap),
            None => m,
        }
    }
}

/// Result of the spam optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpamOptimum {
    /// Quality at the exhaustive-scan optimum.
    pub q_star: f64,
    /// Display count at the exhaustive-scan optimum.
    pub m_star: u64,
    /// Profit per buyer at the optimum.
    pub x_star: f64,
    /// Closed-form display count evaluated at `q_star` (diagnostic).
    pub m_star_real: f64,
    /// Root of the leading-order quality condition
    /// `b ln(alpha q^alpha / b) = q^(alpha+1)` (diagnostic), when it exists.
    pub q_root: Option<f64>,
    /// Auxiliary scale of that condition, `b = z (1 + alpha)`.
    pub b: f64,
}

/// Probability that a buyer accepts at least one of `m` identical variants
/// of quality `q`: `1 - (1 - P_A(q, alpha))^m`.
pub fn spam_accept_prob(q: f64, alpha: f64, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(ModelError::ZeroCount);
    }
    let pa = acceptance_prob(q, alpha)?;
    Ok(1.0 - pow_u64(1.0 - pa, m))
}

fn pow_u64(base: f64, exp: u64) -> f64 {
    if exp <= i32::MAX as u64 {
        base.powi(exp as i32)
    } else {
        base.powf(exp as f64)
    }
}

/// Expected profit per buyer of displaying `m` identical variants:
/// `(1-q) * (1 - (1-P_A)^m) - m*z`, with `m` clamped to the perception cap.
pub fn spam_profit(q: f64, m: u64, scenario: &SpamScenario) -> Result<f64> {
    if m == 0 {
        return Err(ModelError::ZeroCount);
    }
    let m_eff = scenario.clamp_m(m);
    let accept = spam_accept_prob(q, scenario.alpha(), m_eff)?;
    Ok((1.0 - q) * accept - m_eff as f64 * scenario.z())
}

/// Closed-form optimal display count at fixed quality:
/// `(alpha+1)/(alpha q^alpha) * ln[alpha (1-q) q^alpha / (z (alpha+1))]`.
///
/// When the log argument is at or below 1 the optimum degenerates to
/// "display once" and 1 is returned. Callers wanting an integer round to
/// the better of floor/ceil under [`spam_profit`].
pub fn spam_optimal_m(q: f64, scenario: &SpamScenario) -> Result<f64> {
    if scenario.z() == 0.0 {
        return Err(ModelError::ZeroFixedCost);
    }
    if !q.is_finite() || !(0.0..=1.0).contains(&q) {
        return Err(ModelError::QualityOutOfRange { value: q, max: 1.0 });
    }
    let alpha = scenario.alpha();
    if q == 0.0 {
        return Ok(1.0);
    }
    let qa = q.powf(alpha);
    let arg = alpha * (1.0 - q) * qa / (scenario.z() * (alpha + 1.0));
    if arg <= 1.0 {
        return Ok(1.0);
    }
    Ok((alpha + 1.0) / (alpha * qa) * arg.ln())
}

/// Rounds a real display count to the better of floor/ceil under
/// [`spam_profit`] (never below 1).
pub fn spam_round_m(q: f64, m_real: f64, scenario: &SpamScenario) -> Result<u64> {
    let lo = (m_real.floor().max(1.0)) as u64;
    let hi = (m_real.ceil().max(1.0)) as u64;
    if lo == hi {
        return Ok(lo);
    }
    let x_lo = spam_profit(q, lo, scenario)?;
    let x_hi = spam_profit(q, hi, scenario)?;
    Ok(if x_lo >= x_hi { lo } else { hi })
}

/// Best integer display count at fixed quality by exhaustive ascent.
///
/// Profit increments `(1-q) P_A (1-P_A)^m - z` are strictly decreasing in
/// m, so the first non-improving step is the global integer optimum.
pub fn spam_best_m(q: f64, scenario: &SpamScenario) -> Result<(u64, f64)> {
    let pa = acceptance_prob(q, scenario.alpha())?;
    let z = scenario.z();
    let ceiling = if z > 0.0 {
        scenario.clamp_m((10.0 / z).ceil() as u64)
    } else {
        scenario.clamp_m(u64::MAX)
    };
    let margin = 1.0 - q;
    let survive = 1.0 - pa;
    let mut m = 1u64;
    let mut spow = survive; // (1 - P_A)^m
    let mut profit = margin * (1.0 - spow) - z;
    while m < ceiling {
        let gain = margin * spow * pa - z;
        if gain <= 0.0 {
            break;
        }
        m += 1;
        spow *= survive;
        profit = margin * (1.0 - spow) - m as f64 * z;
    }
    Ok((m, profit))
}

const QUALITY_GRID: usize = 1200;

fn quality_grid() -> Vec<f64> {
    // log-spaced: optimal spam qualities shrink with z
    let lo: f64 = 1e-6;
    let hi: f64 = 0.999_999;
    let ratio = (hi / lo).ln();
    (0..=QUALITY_GRID)
        .map(|i| lo * (ratio * i as f64 / QUALITY_GRID as f64).exp())
        .collect()
}

/// Exhaustive (quality x count) optimum plus the closed-form diagnostics.
///
/// Requires `z > 0` (with free displays the count is unbounded). Errors
/// with [`ModelError::NoProfitableSpam`] when no profitable pair exists.
pub fn spam_optimal_quality(scenario: &SpamScenario) -> Result<SpamOptimum> {
    if scenario.z() == 0.0 {
        return Err(ModelError::ZeroFixedCost);
    }
    let grid = quality_grid();
    let scans = exec::map_indexed(grid.len(), |i| {
        let q = grid[i];
        let (m, x) = spam_best_m(q, scenario).expect("grid quality is valid");
        (x, q, m)
    });
    // ordered reduction; ties resolve to the smaller quality
    let mut best = scans[0];
    for s in scans.into_iter().skip(1) {
        if s.0 > best.0 {
            best = s;
        }
    }
    let (x_star, q_star, m_star) = best;
    if x_star <= 0.0 {
        return Err(ModelError::NoProfitableSpam);
    }
    let b = scenario.z() * (1.0 + scenario.alpha());
    Ok(SpamOptimum {
        q_star,
        m_star,
        x_star,
        m_star_real: spam_optimal_m(q_star, scenario)?,
        q_root: transcendental_root(scenario.alpha(), b),
        b,
    })
}

/// Largest root of `b ln(alpha q^alpha / b) = q^(alpha+1)` on (0, 1).
fn transcendental_root(alpha: f64, b: f64) -> Option<f64> {
    let g = |q: f64| b * (alpha * q.powf(alpha) / b).ln() - q.powf(alpha + 1.0);
    // positive log argument needs q > (b/alpha)^(1/alpha)
    let q_min = (b / alpha).powf(1.0 / alpha);
    if !q_min.is_finite() || q_min >= 1.0 {
        return None;
    }
    let lo = q_min * (1.0 + 1e-9);
    let steps = 600;
    let ratio = (1.0 / lo).ln();
    let mut bracket = None;
    let mut prev_q = lo;
    let mut prev_g = g(lo);
    for i in 1..=steps {
        let q = lo * (ratio * i as f64 / steps as f64).exp();
        let cur = g(q);
        if prev_g > 0.0 && cur <= 0.0 {
            bracket = Some((prev_q, q));
        }
        prev_q = q;
        prev_g = cur;
    }
    let (mut a, mut c) = bracket?;
    for _ in 0..200 {
        if c - a < 1e-10 {
            break;
        }
        let mid = 0.5 * (a + c);
        if g(mid) > 0.0 {
            a = mid;
        } else {
            c = mid;
        }
    }
    Some(0.5 * (a + c))
}
