use thiserror::Error;

pub type Result<T> = std::result::Result<T, ModelError>;

/// Errors shared by all evaluation, optimization, and simulation entry points.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("quality {value} outside [0, {max}]")]
    QualityOutOfRange { value: f64, max: f64 },
    #[error("acceptance parameter must be finite and >= 0, got {0}")]
    InvalidAcceptance(f64),
    #[error("selection parameter must be finite and >= 0, got {0}")]
    InvalidSelection(f64),
    #[error("proportion must lie in [0, 1], got {0}")]
    InvalidProportion(f64),
    #[error("group proportions sum to {0}, expected 1 within 1e-12")]
    UnnormalizedProportions(f64),
    #[error("population needs at least one group")]
    EmptyPopulation,
    #[error("buyer count must be >= 1")]
    NoBuyers,
    #[error("product line needs at least one variant")]
    EmptyProductLine,
    #[error("variant weight must be finite and >= 0, got {0}")]
    InvalidWeight(f64),
    #[error("variant weights sum to {0}, expected 1 within 1e-12")]
    UnnormalizedWeights(f64),
    #[error("expected {expected} weights, got {got}")]
    WeightCountMismatch { expected: usize, got: usize },
    #[error("price must be finite and > 0, got {0}")]
    InvalidPrice(f64),
    #[error("price {price} exceeds the acceptance bound {bound} (min alpha + 1)")]
    PriceAboveBound { price: f64, bound: f64 },
    #[error("exponent must be finite and > 0, got {0}")]
    InvalidExponent(f64),
    #[error("fixed cost must be finite and >= 0, got {0}")]
    InvalidCost(f64),
    #[error("operation requires a positive fixed cost")]
    ZeroFixedCost,
    #[error("damaged-goods mode needs at least two variants")]
    DamagedGoodsSingleVariant,
    #[error("variant index {index} out of range for {len} variants")]
    VariantIndexOutOfRange { index: usize, len: usize },
    #[error("count must be >= 1")]
    ZeroCount,
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("grid needs at least {min} points, got {got}")]
    GridTooCoarse { min: usize, got: usize },
    #[error("tolerance must be finite and > 0, got {0}")]
    InvalidTolerance(f64),
    #[error("operation requires a homogeneous population, got {0} groups")]
    HeterogeneousPopulation(usize),
    #[error("spam is unprofitable over the whole (quality, count) domain")]
    NoProfitableSpam,
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
}
