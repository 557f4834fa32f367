//! Scenario configuration: a single TOML file with one section per concern.
//! Unknown keys are hard errors, and each subcommand accepts exactly the
//! sections it needs.

use anyhow::{bail, Context, Result};
use market_model::model::{BuyerGroup, CostModel, Population, ProductLine, ProductionMode};
use market_model::spam::SpamScenario;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub population: Option<PopulationSpec>,
    pub product: Option<ProductSpec>,
    pub display: Option<DisplaySpec>,
    pub cost: Option<CostSpec>,
    pub spam: Option<SpamSpec>,
    pub sweep: Option<SweepSpec>,
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub groups: Vec<GroupSpec>,
    /// Buyer count used by Monte Carlo validation and absolute profits.
    pub n_buyers: Option<u64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub alpha: f64,
    #[serde(default)]
    pub sigma: f64,
    /// Defaults to 1 (homogeneous population of one group).
    pub proportion: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub qualities: Vec<f64>,
    pub weights: Option<Vec<f64>>,
    pub price: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DisplaySpec {
    /// Variant count for `optimize`/`phase`/`sweep`.
    pub m: Option<usize>,
    /// Largest variant count for `variants`.
    pub m_max: Option<usize>,
    pub weights: Option<Vec<f64>>,
    pub price: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    pub z: f64,
    #[serde(default)]
    pub mode: CostMode,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CostMode {
    #[default]
    Independent,
    DamagedGoods,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpamSpec {
    pub alpha: f64,
    pub z: f64,
    pub perception_cap: Option<u64>,
    /// Fixed quality for `validate`; defaults to the optimized one.
    pub quality: Option<f64>,
    /// Fixed display count for `validate`; defaults to the optimized one.
    pub m: Option<u64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub report: ReportKind,
    pub axes: Vec<AxisSpec>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    Eval,
    Optimize,
    Phase,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<crate::Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Population,
    Product,
    Display,
    Cost,
    Spam,
    Sweep,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: ScenarioConfig = toml::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        Ok(cfg)
    }

    /// Enforces that exactly the sections a subcommand needs are present:
    /// missing required sections and stray unused ones are both errors.
    pub fn require(&self, required: &[Section], optional: &[Section]) -> Result<()> {
        let present = [
            (Section::Population, self.population.is_some()),
            (Section::Product, self.product.is_some()),
            (Section::Display, self.display.is_some()),
            (Section::Cost, self.cost.is_some()),
            (Section::Spam, self.spam.is_some()),
            (Section::Sweep, self.sweep.is_some()),
        ];
        for (section, here) in present {
            let name = match section {
                Section::Population => "population",
                Section::Product => "product",
                Section::Display => "display",
                Section::Cost => "cost",
                Section::Spam => "spam",
                Section::Sweep => "sweep",
            };
            if required.contains(&section) && !here {
                bail!("config is missing the required [{name}] section");
            }
            if here && !required.contains(&section) && !optional.contains(&section) {
                bail!("config section [{name}] is not used by this subcommand");
            }
        }
        Ok(())
    }

    pub fn population(&self) -> Result<Population> {
        let spec = self.population.as_ref().context("missing [population]")?;
        let groups = spec
            .groups
            .iter()
            .map(|g| BuyerGroup::new(g.alpha, g.sigma, g.proportion.unwrap_or(1.0)))
            .collect::<market_model::Result<Vec<_>>>()?;
        Ok(Population::new(groups, spec.n_buyers.unwrap_or(1))?)
    }

    pub fn cost(&self) -> Result<CostModel> {
        let spec = self.cost.as_ref().context("missing [cost]")?;
        let mode = match spec.mode {
            CostMode::Independent => ProductionMode::Independent,
            CostMode::DamagedGoods => ProductionMode::DamagedGoods,
        };
        Ok(CostModel::new(spec.z, mode)?)
    }

    pub fn product_line(&self) -> Result<ProductLine> {
        let spec = self.product.as_ref().context("missing [product]")?;
        let mut line = ProductLine::priced(spec.qualities.clone(), spec.price.unwrap_or(1.0))?;
        if let Some(w) = &spec.weights {
            line = line.with_weights(w.clone())?;
        }
        if let Some(b) = spec.beta {
            line = line.with_beta(b)?;
        }
        if let Some(g) = spec.gamma {
            line = line.with_gamma(g)?;
        }
        Ok(line)
    }

    pub fn spam_scenario(&self) -> Result<SpamScenario> {
        let spec = self.spam.as_ref().context("missing [spam]")?;
        let mut s = SpamScenario::new(spec.alpha, spec.z)?;
        if let Some(cap) = spec.perception_cap {
            s = s.with_perception_cap(cap)?;
        }
        Ok(s)
    }
}
