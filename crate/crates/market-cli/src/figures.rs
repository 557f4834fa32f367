//! Built-in preset datasets. Each preset fixes its parameters in code and
//! emits the full sweep behind one of the model's canonical plots; ranges
//! that the presets choose themselves are listed in the README.

use anyhow::{bail, Result};
use market_model::closed_form::{optimal_price_quality, optimal_profit_homogeneous};
use market_model::exec;
use market_model::model::{expected_profit_single, BuyerGroup, CostModel, Population};
use market_model::optimizer::{
    best_variant_count, maximize_1d, maximize_qualities, OptimizationResult, DEFAULT_GRID,
};
use market_model::spam::{spam_optimal_quality, SpamScenario};
use market_model::ModelError;
use serde_json::json;

use crate::output::Table;

pub const FIGURE_IDS: &[&str] = &[
    "f2", "f3", "f4", "f6", "f7a", "f7b", "f8a", "f8b", "f10", "f11", "f13",
];

pub fn run_figure(id: &str) -> Result<(Table, serde_json::Value)> {
    match id {
        "f2" => profit_vs_acceptance(),
        "f3" => single_product_mixture(),
        "f4" => competing_maxima(),
        "f6" => differentiation_sweep(),
        "f7a" => phase_diagram_two(),
        "f7b" => phase_diagram_free(),
        "f8a" => variant_profits(0.002, 8, "f8a"),
        "f8b" => variant_profits(0.0, 60, "f8b"),
        "f10" => biased_selection(),
        "f11" => price_freedom(),
        "f13" => spam_optima(),
        _ => bail!(
            "unknown figure id {id:?}; known ids: {}",
            FIGURE_IDS.join(", ")
        ),
    }
}

fn two_group(a1: f64, s1: f64, a2: f64, s2: f64, c2: f64) -> Population {
    Population::new(
        vec![
            BuyerGroup::new(a1, s1, 1.0 - c2).expect("preset group"),
            BuyerGroup::new(a2, s2, c2).expect("preset group"),
        ],
        1,
    )
    .expect("preset population")
}

fn grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| from + i as f64 * step).collect()
}

/// Optimal profit per buyer against the acceptance parameter at fixed cost.
fn profit_vs_acceptance() -> Result<(Table, serde_json::Value)> {
    let z = 0.05;
    let mut table = Table::new(&["alpha", "x_star"]);
    for alpha in grid(0.0, 5.0, 0.01) {
        table.push(vec![
            alpha.into(),
            optimal_profit_homogeneous(alpha, z)?.into(),
        ]);
    }
    Ok((
        table,
        json!({"z": z, "alpha": {"from": 0.0, "to": 5.0, "step": 0.01}}),
    ))
}

fn best_single(pop: &Population, cost: &CostModel) -> market_model::Result<OptimizationResult> {
    maximize_1d(
        |q| expected_profit_single(q, pop, cost),
        0.0,
        1.0,
        DEFAULT_GRID,
        1e-9,
    )
}

/// Optimal single-product quality and profit for a two-group mixture, per
/// informed-group share, for several informed-group acceptance levels.
fn single_product_mixture() -> Result<(Table, serde_json::Value)> {
    let (a1, z) = (0.1, 0.01);
    let cost = CostModel::independent(z)?;
    let alpha2s = [0.5, 1.0, 3.0];
    let c2s = grid(0.0, 1.0, 0.005);
    let mut table = Table::new(&["alpha2", "c2", "q_star", "x_star"]);
    for &a2 in &alpha2s {
        let rows = exec::map_indexed(c2s.len(), |i| {
            let pop = two_group(a1, 0.0, a2, 0.0, c2s[i]);
            best_single(&pop, &cost)
        });
        for (i, r) in rows.into_iter().enumerate() {
            let r = r?;
            table.push(vec![
                a2.into(),
                c2s[i].into(),
                r.global_arg[0].into(),
                r.global_value.into(),
            ]);
        }
    }
    Ok((
        table,
        json!({"alpha1": a1, "z": z, "alpha2": alpha2s, "c2": {"from": 0.0, "to": 1.0, "step": 0.005}}),
    ))
}

/// The two competing local maxima of the single-product profit for the
/// ignorant/informed mixture, against the informed share.
fn competing_maxima() -> Result<(Table, serde_json::Value)> {
    let (a1, a2, z) = (0.1, 3.0, 0.01);
    let cost = CostModel::independent(z)?;
    let c2s = grid(0.0, 1.0, 0.005);
    let rows = exec::map_indexed(c2s.len(), |i| {
        let pop = two_group(a1, 0.0, a2, 0.0, c2s[i]);
        best_single(&pop, &cost)
    });
    let mut table = Table::new(&["c2", "q_low_peak", "q_high_peak", "x_low", "x_high"]);
    for (i, r) in rows.into_iter().enumerate() {
        let r = r?;
        let (mut low, mut high) = ((f64::NAN, f64::NAN), (f64::NAN, f64::NAN));
        for lm in &r.local_maxima {
            // the two humps sit well apart; 0.4 splits them
            if lm.argument[0] < 0.4 {
                low = (lm.argument[0], lm.value);
            } else {
                high = (lm.argument[0], lm.value);
            }
        }
        table.push(vec![
            c2s[i].into(),
            low.0.into(),
            high.0.into(),
            low.1.into(),
            high.1.into(),
        ]);
    }
    Ok((
        table,
        json!({"alpha1": a1, "alpha2": a2, "z": z, "c2": {"from": 0.0, "to": 1.0, "step": 0.005}}),
    ))
}

const DIFF_POP: (f64, f64, f64, f64) = (0.2, 0.5, 3.0, 3.0); // a1, s1, a2, s2

/// One- versus two-variant optima across the informed share, for two fixed
/// costs.
fn differentiation_sweep() -> Result<(Table, serde_json::Value)> {
    let (a1, s1, a2, s2) = DIFF_POP;
    let zs = [0.002, 0.01];
    let c2s = grid(0.0, 1.0, 0.01);
    let mut table = Table::new(&[
        "z", "c2", "x1_star", "q1_star", "x2_star", "q2_low", "q2_high",
    ]);
    for &z in &zs {
        let cost = CostModel::independent(z)?;
        let rows = exec::map_indexed(c2s.len(), |i| -> market_model::Result<_> {
            let pop = two_group(a1, s1, a2, s2, c2s[i]);
            let one = best_single(&pop, &cost)?;
            let two = maximize_qualities(2, &pop, &cost, None, 1.0)?;
            Ok((one, two))
        });
        for (i, r) in rows.into_iter().enumerate() {
            let (one, two) = r?;
            table.push(vec![
                z.into(),
                c2s[i].into(),
                one.global_value.into(),
                one.global_arg[0].into(),
                two.global_value.into(),
                two.global_arg[0].into(),
                two.global_arg[1].into(),
            ]);
        }
    }
    Ok((
        table,
        json!({"alpha1": a1, "sigma1": s1, "alpha2": a2, "sigma2": s2, "z": zs,
               "c2": {"from": 0.0, "to": 1.0, "step": 0.01}}),
    ))
}

/// Production phase (0, 1, or 2 variants) over the (c2, z) plane.
fn phase_diagram_two() -> Result<(Table, serde_json::Value)> {
    let (a1, s1, a2, s2) = DIFF_POP;
    let c2s = grid(0.0, 1.0, 0.02);
    let zs = grid(0.0, 0.02, 0.0005);
    let points: Vec<(f64, f64)> = c2s
        .iter()
        .flat_map(|&c2| zs.iter().map(move |&z| (c2, z)))
        .collect();
    let labels = exec::map_indexed(points.len(), |i| -> market_model::Result<u8> {
        let (c2, z) = points[i];
        let pop = two_group(a1, s1, a2, s2, c2);
        let cost = CostModel::independent(z)?;
        Ok(market_model::optimizer::differentiation_decision(&pop, &cost, None)?.label())
    });
    let mut table = Table::new(&["c2", "z", "phase"]);
    for (i, label) in labels.into_iter().enumerate() {
        let (c2, z) = points[i];
        table.push(vec![c2.into(), z.into(), u64::from(label?).into()]);
    }
    Ok((
        table,
        json!({"alpha1": a1, "sigma1": s1, "alpha2": a2, "sigma2": s2,
               "c2": {"from": 0.0, "to": 1.0, "step": 0.02},
               "z": {"from": 0.0, "to": 0.02, "step": 0.0005}}),
    ))
}

/// Optimal displayed-variant count over the (c2, z) plane, unconstrained up
/// to M = 16 (z starts above zero: the free-display optimum needs M ~ 40
/// and is covered by the f8b preset instead).
fn phase_diagram_free() -> Result<(Table, serde_json::Value)> {
    const M_MAX: usize = 16;
    let (a1, s1, a2, s2) = DIFF_POP;
    let c2s = grid(0.0, 1.0, 0.02);
    let zs = grid(0.0005, 0.02, 0.0005);
    let points: Vec<(f64, f64)> = c2s
        .iter()
        .flat_map(|&c2| zs.iter().map(move |&z| (c2, z)))
        .collect();
    let rows = exec::map_indexed(points.len(), |i| -> market_model::Result<_> {
        let (c2, z) = points[i];
        let pop = two_group(a1, s1, a2, s2, c2);
        let cost = CostModel::independent(z)?;
        let table = best_variant_count(M_MAX, &pop, &cost)?;
        let chosen = table.chosen();
        let m_star = if chosen.global_value <= 0.0 {
            0
        } else {
            table.chosen_m as u64
        };
        let distinct = if m_star == 0 {
            0
        } else {
            chosen.distinct_qualities as u64
        };
        Ok((m_star, distinct, chosen.global_value))
    });
    let mut table = Table::new(&["c2", "z", "m_star", "distinct_qualities", "x_star"]);
    for (i, row) in rows.into_iter().enumerate() {
        let (m_star, distinct, x) = row?;
        let (c2, z) = points[i];
        table.push(vec![
            c2.into(),
            z.into(),
            m_star.into(),
            distinct.into(),
            x.into(),
        ]);
    }
    Ok((
        table,
        json!({"alpha1": a1, "sigma1": s1, "alpha2": a2, "sigma2": s2, "m_max": M_MAX,
               "c2": {"from": 0.0, "to": 1.0, "step": 0.02},
               "z": {"from": 0.0005, "to": 0.02, "step": 0.0005}}),
    ))
}

/// Optimal profit per displayed-variant count at fixed informed share.
fn variant_profits(z: f64, m_max: usize, id: &str) -> Result<(Table, serde_json::Value)> {
    let (a1, s1, a2, s2) = DIFF_POP;
    let c2 = 0.5;
    let pop = two_group(a1, s1, a2, s2, c2);
    let cost = CostModel::independent(z)?;
    let counts = best_variant_count(m_max, &pop, &cost)?;
    let mut table = Table::new(&[
        "m",
        "x_star",
        "q_low",
        "q_high",
        "distinct_qualities",
        "chosen",
    ]);
    for (i, r) in counts.results.iter().enumerate() {
        table.push(vec![
            (i as u64 + 1).into(),
            r.global_value.into(),
            r.global_arg[0].into(),
            (*r.global_arg.last().unwrap()).into(),
            (r.distinct_qualities as u64).into(),
            (u64::from(i + 1 == counts.chosen_m)).into(),
        ]);
    }
    Ok((
        table,
        json!({"id": id, "alpha1": a1, "sigma1": s1, "alpha2": a2, "sigma2": s2,
               "c2": c2, "z": z, "m_max": m_max}),
    ))
}

/// Two-variant optima against the premium display weight.
fn biased_selection() -> Result<(Table, serde_json::Value)> {
    let (a1, s1, a2, s2, z, c2) = (0.2, 0.2, 3.0, 2.0, 0.01, 0.5);
    let pop = two_group(a1, s1, a2, s2, c2);
    let cost = CostModel::independent(z)?;
    let r2s = grid(0.005, 0.995, 0.005);
    let rows = exec::map_indexed(r2s.len(), |i| {
        let r2 = r2s[i];
        maximize_qualities(2, &pop, &cost, Some(&[1.0 - r2, r2]), 1.0)
    });
    let mut table = Table::new(&["r2", "q1", "q2", "x_star"]);
    for (i, r) in rows.into_iter().enumerate() {
        let r = r?;
        table.push(vec![
            r2s[i].into(),
            r.global_arg[0].into(),
            r.global_arg[1].into(),
            r.global_value.into(),
        ]);
    }
    Ok((
        table,
        json!({"alpha1": a1, "sigma1": s1, "alpha2": a2, "sigma2": s2, "z": z, "c2": c2,
               "r2": {"from": 0.005, "to": 0.995, "step": 0.005}}),
    ))
}

/// Optimal profit with the price fixed at 1 versus freely chosen.
fn price_freedom() -> Result<(Table, serde_json::Value)> {
    let mut table = Table::new(&["alpha", "x_fixed_price", "x_free_price"]);
    for alpha in grid(0.0, 5.0, 0.01) {
        table.push(vec![
            alpha.into(),
            optimal_profit_homogeneous(alpha, 0.0)?.into(),
            optimal_price_quality(alpha)?.x_star.into(),
        ]);
    }
    Ok((
        table,
        json!({"z": 0.0, "alpha": {"from": 0.0, "to": 5.0, "step": 0.01}}),
    ))
}

/// Repeated-display optima against the acceptance parameter, per fixed cost.
fn spam_optima() -> Result<(Table, serde_json::Value)> {
    let zs = [1e-2, 1e-3, 1e-4];
    let n_alpha = 40;
    let alphas: Vec<f64> = (0..n_alpha)
        .map(|i| 1e-2 * 100.0f64.powf(i as f64 / (n_alpha - 1) as f64))
        .collect();
    let mut table = Table::new(&["z", "alpha", "q_star", "m_star", "x_star"]);
    for &z in &zs {
        let rows = exec::map_indexed(alphas.len(), |i| {
            let scenario = SpamScenario::new(alphas[i], z).expect("preset scenario");
            spam_optimal_quality(&scenario)
        });
        for (i, r) in rows.into_iter().enumerate() {
            match r {
                Ok(opt) => table.push(vec![
                    z.into(),
                    alphas[i].into(),
                    opt.q_star.into(),
                    opt.m_star.into(),
                    opt.x_star.into(),
                ]),
                Err(ModelError::NoProfitableSpam) => table.push(vec![
                    z.into(),
                    alphas[i].into(),
                    f64::NAN.into(),
                    0u64.into(),
                    f64::NAN.into(),
                ]),
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok((
        table,
        json!({"z": zs, "alpha": {"from": 1e-2, "to": 1.0, "points": n_alpha, "spacing": "log"}}),
    ))
}
