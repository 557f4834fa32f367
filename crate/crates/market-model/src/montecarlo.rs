//! Agent-level sampling of the two-step purchase process.
//!
//! Determinism contract: buyer `i` draws from its own ChaCha8 stream
//! (`seed_from_u64(seed)` then `set_stream(i)`), so a buyer's outcome
//! depends only on `(seed, i)`. Buyers are processed in fixed-size batches
//! whose partial tallies are integer counts merged in batch order; profits
//! and errors derive from those counts. Reports are therefore bit-identical
//! across thread counts and across the parallel/sequential builds.
//! Degenerate draws are skipped: a single group consumes no group draw and
//! a single variant no selection draw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ModelError, Result};
use crate::exec;
use crate::model::{
    acceptance_prob, acceptance_prob_beta, acceptance_prob_priced, selection_probs, CostModel,
    Population, ProductLine, ProductionMode,
};
use crate::spam::SpamScenario;

const BUYER_BATCH: u64 = 8192;

/// Tallies and derived statistics of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    /// Mean sampled profit per buyer (fixed costs included analytically).
    pub profit_per_buyer: f64,
    /// Sample standard deviation of per-buyer profit contributions divided
    /// by sqrt(N); 0 when N = 1.
    pub standard_error: f64,
    /// Purchases per variant, summed over groups.
    pub variant_sales: Vec<u64>,
    /// Purchases per buyer group.
    pub group_acceptances: Vec<u64>,
    /// Purchases per (group, variant).
    pub sales_by_group: Vec<Vec<u64>>,
    /// Buyers drawn from each group.
    pub group_counts: Vec<u64>,
    pub n_buyers: u64,
    pub seed: u64,
}

impl SimulationReport {
    /// Total purchases across all variants; at most one per buyer.
    pub fn total_sales(&self) -> u64 {
        self.variant_sales.iter().sum()
    }
}

struct MarketRun {
    cum_groups: Vec<f64>,
    cum_select: Vec<Vec<f64>>, // [group][variant]
    accept: Vec<Vec<f64>>,     // [group][variant]
    margins: Vec<f64>,
    fixed_cost: f64,
    n_buyers: u64,
    seed: u64,
}

impl MarketRun {
    fn new(
        line: &ProductLine,
        pop: &Population,
        cost: &CostModel,
        n_buyers: u64,
        seed: u64,
    ) -> Result<Self> {
        if n_buyers == 0 {
            return Err(ModelError::NoBuyers);
        }
        if cost.mode() == ProductionMode::DamagedGoods && line.m() < 2 {
            return Err(ModelError::DamagedGoodsSingleVariant);
        }
        let priced = line.price() != 1.0;
        if priced {
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

        let mut cum = 0.0;
        let cum_groups = pop
            .groups()
            .iter()
            .map(|g| {
                cum += g.proportion();
                cum
            })
            .collect();

        let mut cum_select = Vec::with_capacity(pop.groups().len());
        let mut accept = Vec::with_capacity(pop.groups().len());
        for g in pop.groups() {
            let probs = selection_probs(line.qualities(), line.weights(), g.sigma())?;
            let mut c = 0.0;
            cum_select.push(
                probs
                    .iter()
                    .map(|p| {
                        c += p;
                        c
                    })
                    .collect(),
            );
            let mut pa = Vec::with_capacity(line.m());
            for &q in line.qualities() {
                pa.push(if priced {
                    acceptance_prob_priced(q, line.price(), g.alpha())?
                } else {
                    acceptance_prob_beta(q, g.alpha(), line.beta())?
                });
            }
            accept.push(pa);
        }

        let q_top = line.qualities().iter().fold(0.0, |a: f64, &b| a.max(b));
        let margins = line
            .qualities()
            .iter()
            .map(|&q| {
                let base = match cost.mode() {
                    ProductionMode::Independent => q,
                    ProductionMode::DamagedGoods => q_top,
                };
                if line.gamma() == 1.0 {
                    line.price() - base
                } else {
                    line.price() - base.powf(line.gamma())
                }
            })
            .collect();

        Ok(Self {
            cum_groups,
            cum_select,
            accept,
            margins,
            fixed_cost: cost.fixed_cost(line.m()),
            n_buyers,
            seed,
        })
    }

    fn n_batches(&self) -> usize {
        self.n_buyers.div_ceil(BUYER_BATCH) as usize
    }

    fn run_batch(&self, batch: usize) -> BatchTally {
        let groups = self.cum_groups.len();
        let variants = self.margins.len();
        let mut tally = BatchTally::new(groups, variants);
        let start = batch as u64 * BUYER_BATCH;
        let end = (start + BUYER_BATCH).min(self.n_buyers);
        for buyer in start..end {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(buyer);
            let g = if groups == 1 {
                0
            } else {
                pick(&self.cum_groups, rng.gen::<f64>())
            };
            tally.group_counts[g] += 1;
            let m = if variants == 1 {
                0
            } else {
                pick(&self.cum_select[g], rng.gen::<f64>())
            };
            if rng.gen::<f64>() < self.accept[g][m] {
                tally.sales[g][m] += 1;
            }
        }
        tally
    }

    fn assemble(&self, batches: Vec<BatchTally>) -> SimulationReport {
        let groups = self.cum_groups.len();
        let variants = self.margins.len();
        let mut total = BatchTally::new(groups, variants);
        for b in batches {
            total.merge(&b);
        }
        let variant_sales: Vec<u64> = (0..variants)
            .map(|m| (0..groups).map(|g| total.sales[g][m]).sum())
            .collect();
        let group_acceptances: Vec<u64> =
            (0..groups).map(|g| total.sales[g].iter().sum()).collect();

        let n = self.n_buyers as f64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for (m, &count) in variant_sales.iter().enumerate() {
            sum += count as f64 * self.margins[m];
            sum_sq += count as f64 * self.margins[m] * self.margins[m];
        }
        let standard_error = if self.n_buyers > 1 {
            let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        } else {
            0.0
        };

        SimulationReport {
            profit_per_buyer: sum / n - self.fixed_cost,
            standard_error,
            variant_sales,
            group_acceptances,
            sales_by_group: total.sales,
            group_counts: total.group_counts,
            n_buyers: self.n_buyers,
            seed: self.seed,
        }
    }
}

struct BatchTally {
    sales: Vec<Vec<u64>>,
    group_counts: Vec<u64>,
}

impl BatchTally {
    fn new(groups: usize, variants: usize) -> Self {
        Self {
            sales: vec![vec![0; variants]; groups],
            group_counts: vec![0; groups],
        }
    }

    fn merge(&mut self, other: &Self) {
        for (a, b) in self.sales.iter_mut().zip(&other.sales) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (x, y) in self.group_counts.iter_mut().zip(&other.group_counts) {
            *x += y;
        }
    }
}

fn pick(cum: &[f64], u: f64) -> usize {
    // the final cumulative entry absorbs rounding residue
    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
}

/// Samples the two-step purchase process for `n_buyers` buyers.
pub fn simulate_market(
    line: &ProductLine,
    pop: &Population,
    cost: &CostModel,
    n_buyers: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let run = MarketRun::new(line, pop, cost, n_buyers, seed)?;
    let batches = exec::map_indexed(run.n_batches(), |b| run.run_batch(b));
    Ok(run.assemble(batches))
}

/// Sequential reference lane of [`simulate_market`]; bit-identical output.
pub fn simulate_market_seq(
    line: &ProductLine,
    pop: &Population,
    cost: &CostModel,
    n_buyers: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let run = MarketRun::new(line, pop, cost, n_buyers, seed)?;
    let batches = exec::map_indexed_seq(run.n_batches(), |b| run.run_batch(b));
    Ok(run.assemble(batches))
}

struct SpamRun {
    accept: f64,
    margin: f64,
    m_eff: u64,
    fixed_cost: f64,
    n_buyers: u64,
    seed: u64,
}

impl SpamRun {
    fn new(scenario: &SpamScenario, q: f64, m: u64, n_buyers: u64, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(ModelError::ZeroCount);
        }
        if n_buyers == 0 {
            return Err(ModelError::NoBuyers);
        }
        let m_eff = match scenario.perception_cap() {
            Some(cap) => m.min(cap),
            None => m,
        };
        Ok(Self {
            accept: acceptance_prob(q, scenario.alpha())?,
            margin: 1.0 - q,
            m_eff,
            fixed_cost: m_eff as f64 * scenario.z(),
            n_buyers,
            seed,
        })
    }

    fn n_batches(&self) -> usize {
        self.n_buyers.div_ceil(BUYER_BATCH) as usize
    }

    /// Buyers examine up to `m_eff` identical variants in order and stop at
    /// the first acceptance; returns how many accepted.
    fn run_batch(&self, batch: usize) -> u64 {
        let start = batch as u64 * BUYER_BATCH;
        let end = (start + BUYER_BATCH).min(self.n_buyers);
        let mut accepted = 0u64;
        for buyer in start..end {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(buyer);
            for _ in 0..self.m_eff {
                if rng.gen::<f64>() < self.accept {
                    accepted += 1;
                    break;
                }
            }
        }
        accepted
    }

    fn assemble(&self, batches: Vec<u64>) -> SimulationReport {
        let accepted: u64 = batches.iter().sum();
        let n = self.n_buyers as f64;
        let sum = accepted as f64 * self.margin;
        let sum_sq = accepted as f64 * self.margin * self.margin;
        let standard_error = if self.n_buyers > 1 {
            let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        SimulationReport {
            profit_per_buyer: sum / n - self.fixed_cost,
            standard_error,
            variant_sales: vec![accepted],
            group_acceptances: vec![accepted],
            sales_by_group: vec![vec![accepted]],
            group_counts: vec![self.n_buyers],
            n_buyers: self.n_buyers,
            seed: self.seed,
        }
    }
}

/// Samples the sequential-display spam process: each buyer examines up to
/// `m` (or the perception cap) identical variants of quality `q`.
pub fn simulate_spam(
    scenario: &SpamScenario,
    q: f64,
    m: u64,
    n_buyers: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let run = SpamRun::new(scenario, q, m, n_buyers, seed)?;
    let batches = exec::map_indexed(run.n_batches(), |b| run.run_batch(b));
    Ok(run.assemble(batches))
}

/// Sequential reference lane of [`simulate_spam`]; bit-identical output.
pub fn simulate_spam_seq(
    scenario: &SpamScenario,
    q: f64,
    m: u64,
    n_buyers: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let run = SpamRun::new(scenario, q, m, n_buyers, seed)?;
    let batches = exec::map_indexed_seq(run.n_batches(), |b| run.run_batch(b));
    Ok(run.assemble(batches))
}
