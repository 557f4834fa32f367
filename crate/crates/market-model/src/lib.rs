//! A probabilistic consumer-choice market model.
//!
//! Buyers face M displayed product variants; a purchase is a two-step
//! process (select a variant, then accept or reject it) driven by two
//! per-buyer parameters: the acceptance parameter α and the selection
//! parameter σ. The crate evaluates the resulting expected vendor profits,
//! locates their optima (closed forms where they exist, derivative-free
//! searches everywhere else), classifies quality-differentiation phases,
//! covers the repeated-display ("spam") regime, and validates every
//! analytic expectation by seeded agent-level Monte Carlo.
//!
//! The `parallel` feature (on by default) runs the Monte Carlo engine,
//! brute-force scans, and per-count optimizations on rayon. Results are
//! deterministic and bit-identical with or without it.

pub mod closed_form;
pub mod error;
pub mod exec;
pub mod model;
pub mod montecarlo;
pub mod optimizer;
pub mod spam;

pub use error::{ModelError, Result};
pub use model::{BuyerGroup, CostModel, Population, ProductLine, ProductionMode};
pub use montecarlo::SimulationReport;
pub use optimizer::{LocalMaximum, OptimizationResult, ProductionPhase, VariantCountTable};
pub use spam::{SpamOptimum, SpamScenario};
