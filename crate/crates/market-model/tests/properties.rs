//! Property tests for the probability and profit primitives.

use market_model::model::{
    acceptance_prob, acceptance_prob_priced, expected_profit_multi, expected_profit_single,
    selection_probs, BuyerGroup, CostModel, Population, ProductLine,
};
use proptest::prelude::*;

fn weights_strategy(m: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..1.0, m).prop_map(move |raw| {
        let total: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        // force the sum to exactly one, rounding residue and all
        let sum_head: f64 = w[..m - 1].iter().sum();
        w[m - 1] = 1.0 - sum_head;
        w
    })
}

proptest! {
    #[test]
    fn selection_probabilities_sum_to_one(
        m in 1usize..6,
        sigma in 0.0f64..40.0,
        seed_q in proptest::collection::vec(0.0f64..1.0, 6),
        ws in weights_strategy(6),
    ) {
        let qualities = &seed_q[..m];
        let mut weights = ws[..m].to_vec();
        let head: f64 = weights[..m - 1].iter().sum();
        weights[m - 1] = 1.0 - head;
        let probs = selection_probs(qualities, &weights, sigma).unwrap();
        let total: f64 = probs.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12, "sum {total}");
        prop_assert!(probs.iter().all(|p| (0.0..=1.0 + 1e-12).contains(p)));
    }

    #[test]
    fn uniform_weights_recover_the_unweighted_rule(
        m in 2usize..6,
        sigma in 0.0f64..40.0,
        seed_q in proptest::collection::vec(0.01f64..1.0, 6),
    ) {
        let qualities = &seed_q[..m];
        let weights = vec![1.0 / m as f64; m];
        let weighted = selection_probs(qualities, &weights, sigma).unwrap();
        // independent evaluation of the unweighted rule, rescaled the same way
        let q_max = qualities.iter().fold(0.0f64, |a, &b| a.max(b));
        let pows: Vec<f64> = qualities.iter().map(|&q| (q / q_max).powf(sigma)).collect();
        let denom: f64 = pows.iter().sum();
        for (a, b) in weighted.iter().zip(pows.iter().map(|p| p / denom)) {
            prop_assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn unit_price_is_a_special_case_of_priced_acceptance(
        q in 0.0f64..=1.0,
        alpha in 0.0f64..8.0,
    ) {
        let plain = acceptance_prob(q, alpha).unwrap();
        let priced = acceptance_prob_priced(q, 1.0, alpha).unwrap();
        prop_assert_eq!(plain.to_bits(), priced.to_bits());
    }

    #[test]
    fn acceptance_monotone_in_quality(
        alpha in 0.0f64..8.0,
        q in 0.0f64..0.999,
        dq in 1e-6f64..1e-3,
    ) {
        let lo = acceptance_prob(q, alpha).unwrap();
        let hi = acceptance_prob((q + dq).min(1.0), alpha).unwrap();
        prop_assert!(hi >= lo);
    }

    #[test]
    fn identical_variants_only_add_fixed_costs(
        q in 0.0f64..=1.0,
        m in 2usize..5,
        alpha in 0.05f64..4.0,
        sigma in 0.0f64..5.0,
        z in 0.0f64..0.05,
    ) {
        let pop = Population::new(vec![BuyerGroup::new(alpha, sigma, 1.0).unwrap()], 1).unwrap();
        let cost = CostModel::independent(z).unwrap();
        let single = expected_profit_single(q, &pop, &cost).unwrap();
        let line = ProductLine::new(vec![q; m]).unwrap();
        let multi = expected_profit_multi(&line, &pop, &cost).unwrap();
        let expected = single - (m - 1) as f64 * z;
        prop_assert!((multi - expected).abs() < 1e-12, "{multi} vs {expected}");
    }
}

#[test]
fn sharp_selection_concentrates_on_the_best_variant() {
    // well-separated quality grids; sigma = 200 must pick the best almost surely
    let grids: [&[f64]; 3] = [&[0.1, 0.5, 0.9], &[0.3, 0.6], &[0.2, 0.4, 0.6, 0.8]];
    for qualities in grids {
        let m = qualities.len();
        let weights = vec![1.0 / m as f64; m];
        let probs = selection_probs(qualities, &weights, 200.0).unwrap();
        let best = qualities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(probs[best] > 0.99, "{probs:?}");
    }
}
