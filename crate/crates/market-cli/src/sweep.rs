//! Config-driven 1-D and 2-D parameter sweeps.

use anyhow::{bail, Context, Result};
use market_model::exec;
use market_model::model::{
    expected_profit_multi, BuyerGroup, CostModel, Population, ProductLine, ProductionMode,
};
use market_model::optimizer::{differentiation_decision, maximize_qualities_with};
use serde_json::json;

use crate::config::{CostMode, ReportKind, ScenarioConfig, SweepSpec};
use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq)]
enum SweepParam {
    C2,
    Z,
    R2,
    Alpha(usize),
    Sigma(usize),
    Price,
}

impl SweepParam {
    fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "c2" => SweepParam::C2,
            "z" => SweepParam::Z,
            "r2" => SweepParam::R2,
            "price" => SweepParam::Price,
            _ => {
                if let Some(idx) = name
                    .strip_prefix("alpha")
                    .and_then(|s| s.parse::<usize>().ok())
                {
                    SweepParam::Alpha(idx)
                } else if let Some(idx) = name
                    .strip_prefix("sigma")
                    .and_then(|s| s.parse::<usize>().ok())
                {
                    SweepParam::Sigma(idx)
                } else {
                    bail!(
                        "unknown sweep parameter {name:?}; known: c2, z, r2, price, alpha<i>, sigma<i>"
                    )
                }
            }
        })
    }
}

/// Mutable copy of the scenario a sweep perturbs point by point.
#[derive(Debug, Clone)]
struct Scenario {
    groups: Vec<(f64, f64, f64)>, // alpha, sigma, proportion
    qualities: Option<Vec<f64>>,
    m: usize,
    weights: Option<Vec<f64>>,
    price: f64,
    beta: f64,
    gamma: f64,
    z: f64,
    damaged: bool,
}

impl Scenario {
    fn from_config(cfg: &ScenarioConfig, report: ReportKind) -> Result<Self> {
        let pop = cfg.population.as_ref().context("missing [population]")?;
        let cost = cfg.cost.as_ref().context("missing [cost]")?;
        let groups: Vec<(f64, f64, f64)> = pop
            .groups
            .iter()
            .map(|g| (g.alpha, g.sigma, g.proportion.unwrap_or(1.0)))
            .collect();
        let (qualities, m, weights, price, beta, gamma) = match report {
            ReportKind::Eval => {
                let p = cfg
                    .product
                    .as_ref()
                    .context("an eval sweep needs a [product] section with fixed qualities")?;
                (
                    Some(p.qualities.clone()),
                    p.qualities.len(),
                    p.weights.clone(),
                    p.price.unwrap_or(1.0),
                    p.beta.unwrap_or(1.0),
                    p.gamma.unwrap_or(1.0),
                )
            }
            ReportKind::Optimize => {
                let d = cfg.display.as_ref().context(
                    "an optimize sweep needs a [display] section with the variant count",
                )?;
                let m = d.m.context("[display] needs m for an optimize sweep")?;
                (
                    None,
                    m,
                    d.weights.clone(),
                    d.price.unwrap_or(1.0),
                    d.beta.unwrap_or(1.0),
                    d.gamma.unwrap_or(1.0),
                )
            }
            ReportKind::Phase => {
                // one versus two variants; [display] may bias the two-variant
                // weights but is otherwise optional
                let d = cfg.display.as_ref();
                let m = d.and_then(|d| d.m).unwrap_or(2);
                if m != 2 {
                    bail!("a phase sweep compares one versus two variants; omit m or set m = 2");
                }
                (
                    None,
                    m,
                    d.and_then(|d| d.weights.clone()),
                    d.and_then(|d| d.price).unwrap_or(1.0),
                    d.and_then(|d| d.beta).unwrap_or(1.0),
                    d.and_then(|d| d.gamma).unwrap_or(1.0),
                )
            }
        };
        if let Some(w) = &weights {
            if w.len() != m {
                bail!("weights length {} does not match m = {m}", w.len());
            }
        }
        Ok(Self {
            groups,
            qualities,
            m,
            weights,
            price,
            beta,
            gamma,
            z: cost.z,
            damaged: cost.mode == CostMode::DamagedGoods,
        })
    }

    fn apply(&mut self, param: SweepParam, value: f64) -> Result<()> {
        match param {
            SweepParam::C2 => {
                if self.groups.len() != 2 {
                    bail!("sweeping c2 needs exactly two buyer groups");
                }
                self.groups[0].2 = 1.0 - value;
                self.groups[1].2 = value;
            }
            SweepParam::Z => self.z = value,
            SweepParam::R2 => {
                if self.m != 2 {
                    bail!("sweeping r2 needs a two-variant display");
                }
                self.weights = Some(vec![1.0 - value, value]);
            }
            SweepParam::Alpha(i) => {
                let g = self
                    .groups
                    .get_mut(i.wrapping_sub(1))
                    .with_context(|| format!("no buyer group {i}"))?;
                g.0 = value;
            }
            SweepParam::Sigma(i) => {
                let g = self
                    .groups
                    .get_mut(i.wrapping_sub(1))
                    .with_context(|| format!("no buyer group {i}"))?;
                g.1 = value;
            }
            SweepParam::Price => self.price = value,
        }
        Ok(())
    }

    fn population(&self) -> market_model::Result<Population> {
        let groups = self
            .groups
            .iter()
            .map(|&(a, s, c)| BuyerGroup::new(a, s, c))
            .collect::<market_model::Result<Vec<_>>>()?;
        Population::new(groups, 1)
    }

    fn cost(&self) -> market_model::Result<CostModel> {
        CostModel::new(
            self.z,
            if self.damaged {
                ProductionMode::DamagedGoods
            } else {
                ProductionMode::Independent
            },
        )
    }
}

fn axis_values(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 || !from.is_finite() || !to.is_finite() || to < from {
        bail!("empty or invalid sweep range: from {from}, to {to}, step {step}");
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| from + i as f64 * step).collect())
}

pub fn run_sweep(cfg: &ScenarioConfig) -> Result<(Table, serde_json::Value)> {
    let spec: &SweepSpec = cfg.sweep.as_ref().context("missing [sweep]")?;
    if spec.axes.is_empty() || spec.axes.len() > 2 {
        bail!("a sweep needs one or two axes, got {}", spec.axes.len());
    }
    let base = Scenario::from_config(cfg, spec.report)?;

    let params: Vec<SweepParam> = spec
        .axes
        .iter()
        .map(|a| SweepParam::parse(&a.param))
        .collect::<Result<_>>()?;
    let values: Vec<Vec<f64>> = spec
        .axes
        .iter()
        .map(|a| axis_values(a.from, a.to, a.step))
        .collect::<Result<_>>()?;

    // lexicographic row order: first axis outer, second inner
    let coords: Vec<Vec<f64>> = match values.len() {
        1 => values[0].iter().map(|&v| vec![v]).collect(),
        _ => values[0]
            .iter()
            .flat_map(|&a| values[1].iter().map(move |&b| vec![a, b]))
            .collect(),
    };

    // probe one point eagerly for clear parameter errors
    {
        let mut probe = base.clone();
        for (p, v) in params.iter().zip(&coords[0]) {
            probe.apply(*p, *v)?;
        }
    }

    let report = spec.report;
    let rows = exec::map_indexed(coords.len(), |i| -> Result<Vec<Cell>> {
        let mut scenario = base.clone();
        for (p, v) in params.iter().zip(&coords[i]) {
            scenario.apply(*p, *v)?;
        }
        let pop = scenario.population()?;
        let cost = scenario.cost()?;
        let mut row: Vec<Cell> = coords[i].iter().map(|&v| Cell::Float(v)).collect();
        match report {
            ReportKind::Eval => {
                let mut line = ProductLine::priced(
                    scenario.qualities.clone().expect("eval has qualities"),
                    scenario.price,
                )?;
                if let Some(w) = &scenario.weights {
                    line = line.with_weights(w.clone())?;
                }
                line = line.with_beta(scenario.beta)?.with_gamma(scenario.gamma)?;
                row.push(expected_profit_multi(&line, &pop, &cost)?.into());
            }
            ReportKind::Optimize => {
                let r = maximize_qualities_with(
                    scenario.m,
                    &pop,
                    &cost,
                    scenario.weights.as_deref(),
                    scenario.price,
                    scenario.beta,
                    scenario.gamma,
                )?;
                row.push(r.global_value.into());
                for &q in &r.global_arg {
                    row.push(q.into());
                }
                row.push((r.distinct_qualities as u64).into());
            }
            ReportKind::Phase => {
                let label =
                    differentiation_decision(&pop, &cost, scenario.weights.as_deref())?.label();
                row.push((label as u64).into());
            }
        }
        Ok(row)
    });

    let mut columns: Vec<String> = spec.axes.iter().map(|a| a.param.clone()).collect();
    match report {
        ReportKind::Eval => columns.push("x".into()),
        ReportKind::Optimize => {
            columns.push("x_star".into());
            for i in 0..base.m {
                columns.push(format!("q{}", i + 1));
            }
            columns.push("distinct_qualities".into());
        }
        ReportKind::Phase => columns.push("phase".into()),
    }

    let mut table = Table {
        columns,
        rows: Vec::with_capacity(coords.len()),
    };
    for row in rows {
        table.push(row?);
    }
    let meta = json!({
        "report": format!("{report:?}").to_lowercase(),
        "axes": spec.axes.iter().map(|a| json!({
            "param": a.param, "from": a.from, "to": a.to, "step": a.step
        })).collect::<Vec<_>>(),
        "points": table.rows.len(),
    });
    Ok((table, meta))
}
