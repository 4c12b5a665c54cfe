//! Cross-module property tests: stochastic dominance, degeneracy to expected
//! utility, and distribution round trips under randomized parameters.

use proptest::prelude::*;
use smods_cpt::cpt::{subjective_utility_discrete, CptParams, OutcomeLottery};
use smods_cpt::dist::{BoundedDistribution, SupportInterval};

fn lottery_from_raw(raw: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    let mut utilities = Vec::with_capacity(raw.len());
    let mut probabilities = Vec::with_capacity(raw.len());
    for (i, (u, w)) in raw.iter().enumerate() {
        utilities.push(u + i as f64 * 30.0);
        probabilities.push(w / total);
    }
    (utilities, probabilities)
}

proptest! {
    /// Shifting probability mass toward better outcomes never lowers the
    /// subjective utility: the cumulative weighting is built to respect
    /// first-order stochastic dominance.
    #[test]
    fn first_order_stochastic_dominance(
        raw in prop::collection::vec((-10.0f64..10.0, 0.05f64..1.0), 3..9),
        transfers in prop::collection::vec((0usize..8, 0usize..8, 0.0f64..0.4), 1..6),
        alpha in 0.2f64..1.0,
        beta_plus in 0.4f64..1.0,
        beta_minus in 0.4f64..1.0,
        lambda in 1.0f64..3.0,
        reference in -20.0f64..20.0,
    ) {
        let (utilities, dominated) = lottery_from_raw(&raw);
        let n = utilities.len();

        // Move mass upward to build the dominating lottery.
        let mut dominating = dominated.clone();
        for &(from, to, fraction) in &transfers {
            let (from, to) = (from % n, to % n);
            if from >= to {
                continue;
            }
            let moved = dominating[from] * fraction;
            dominating[from] -= moved;
            dominating[to] += moved;
        }

        let build = |probs: &[f64]| {
            let atoms: Vec<(f64, f64)> = utilities
                .iter()
                .zip(probs)
                .filter(|(_, &p)| p > 1e-12)
                .map(|(&u, &p)| (u, p))
                .collect();
            OutcomeLottery::from_pairs(atoms).unwrap()
        };
        let worse = build(&dominated);
        let better = build(&dominating);

        let params = CptParams::new(alpha, beta_plus, beta_minus, lambda).unwrap();
        let u_worse = subjective_utility_discrete(&worse, reference, &params);
        let u_better = subjective_utility_discrete(&better, reference, &params);
        prop_assert!(
            u_better >= u_worse - 1e-12,
            "dominance reversal: {u_better} < {u_worse}"
        );
    }

    /// All-ones parameters reduce the subjective utility to the expectation,
    /// for any static reference at zero.
    #[test]
    fn rational_parameters_are_expected_utility(
        raw in prop::collection::vec((-10.0f64..10.0, 0.05f64..1.0), 1..10),
    ) {
        let (utilities, probabilities) = lottery_from_raw(&raw);
        let atoms: Vec<(f64, f64)> = utilities.into_iter().zip(probabilities).collect();
        let lottery = OutcomeLottery::from_pairs(atoms).unwrap();
        let subjective = subjective_utility_discrete(&lottery, 0.0, &CptParams::rational());
        prop_assert!((subjective - lottery.mean()).abs() < 1e-12);
    }

    /// Quantile is the inverse of the cdf for every continuous kind, in free
    /// parameter mode.
    #[test]
    fn free_mode_cdf_quantile_round_trip(
        lower in -10.0f64..0.0,
        width in 0.1f64..5.0,
        location_offset in -0.5f64..1.5,
        scale_factor in 0.2f64..3.0,
        rate_factor in 0.2f64..4.0,
        q in 0.001f64..0.999,
    ) {
        let support = SupportInterval::new(lower, lower + width).unwrap();
        let location = lower + width * location_offset;
        let scale = width * scale_factor;
        let rate = rate_factor / width;
        let dists = [
            BoundedDistribution::trunc_normal_with(support, location, scale).unwrap(),
            BoundedDistribution::trunc_exp_optimistic_with(support, rate).unwrap(),
            BoundedDistribution::trunc_exp_pessimistic_with(support, rate).unwrap(),
        ];
        for dist in &dists {
            let x = dist.quantile(q).unwrap();
            prop_assert!(support.contains(x));
            let back = dist.quantile(dist.cdf(x)).unwrap();
            prop_assert!((back - x).abs() < 1e-9, "{back} vs {x}");
        }
    }

    /// Atomized lotteries keep their mass on the support and their mean near
    /// the exact one.
    #[test]
    fn atomization_stays_on_support(
        lower in -10.0f64..0.0,
        width in 0.1f64..5.0,
        n in 16usize..512,
    ) {
        let support = SupportInterval::new(lower, lower + width).unwrap();
        for dist in [
            BoundedDistribution::trunc_normal(support).unwrap(),
            BoundedDistribution::trunc_exp_optimistic(support).unwrap(),
            BoundedDistribution::trunc_exp_pessimistic(support).unwrap(),
        ] {
            let lottery = dist.atomize(n).unwrap();
            prop_assert_eq!(lottery.len(), n);
            for atom in lottery.atoms() {
                prop_assert!(support.contains(atom.utility));
            }
            prop_assert!((lottery.mean() - dist.mean()).abs() < width * 0.05);
        }
    }
}
