//! Reconstruction of the two-arm surgical/medical worked example.
//!
//! Only the decision weights of the example are published, so the raw
//! probabilities are recovered by inverting the weighting function on the
//! cumulative weight sums at `gamma = 0.25`. Two separate models come out of
//! it: [`drummond_rd`] reproduces the rank-dependent values and
//! [`drummond_ev`] the expected-value lines. The published expected-value
//! slope (1.55 per unit of lambda) is below the smallest state effect (10) of
//! the rank-dependent model, so no single set of probabilities can reproduce
//! both.

use rdtree_core::oracle::invert_weight;
use rdtree_core::{Branch, ChanceNode, DecisionTree, OutcomeNode, Result, Strategy};

pub const GAMMA: f64 = 0.25;

/// Published cumulative decision weights (good, intermediate, bad).
pub const SURGICAL_WEIGHTS: [f64; 3] = [0.09958885, 0.02977579, 0.87063536];
pub const MEDICAL_WEIGHTS: [f64; 3] = [0.100935727, 0.004176325, 0.894887948];

/// State effects shared by both arms, best first.
pub const EFFECTS: [f64; 3] = [20.0, 15.0, 10.0];

/// Weighted costs: the negated rank-dependent values at `lambda = 0`.
pub const SURGICAL_WEIGHTED_COST: f64 = 1941.27;
pub const MEDICAL_WEIGHTED_COST: f64 = 1748.28;

/// Cost of the two better surgical states; the bad state's cost is solved
/// for so the weighted cost is [`SURGICAL_WEIGHTED_COST`].
pub const SURGICAL_GOOD_COST: f64 = 500.0;

/// Raw state probabilities whose cumulative weights at [`GAMMA`] are
/// `weights`. Each cumulative sum takes its smallest preimage.
pub fn probabilities_from_weights(weights: [f64; 3]) -> Result<[f64; 3]> {
    let first = invert_weight(weights[0], GAMMA)?.p;
    let second = invert_weight(weights[0] + weights[1], GAMMA)?.p;
    Ok([first, second - first, 1.0 - second])
}

fn arm(name: &str, probabilities: [f64; 3], costs: [f64; 3]) -> Strategy {
    let labels = ["good", "intermediate", "bad"];
    let branches = (0..3)
        .map(|i| {
            Branch::labelled(
                probabilities[i],
                labels[i],
                OutcomeNode::new(costs[i], EFFECTS[i]),
            )
        })
        .collect();
    Strategy::new(name, ChanceNode::new(branches))
}

/// Three-state arms reproducing the published decision weights and
/// rank-dependent values. Costs never decrease from good to bad, so the
/// ranking of states is the same at every `lambda >= 0`.
pub fn drummond_rd() -> Result<DecisionTree> {
    let surgical_p = probabilities_from_weights(SURGICAL_WEIGHTS)?;
    let medical_p = probabilities_from_weights(MEDICAL_WEIGHTS)?;
    let w = SURGICAL_WEIGHTS;
    let bad_cost = (SURGICAL_WEIGHTED_COST - SURGICAL_GOOD_COST * (w[0] + w[1])) / w[2];
    let mut tree = DecisionTree::new(
        "surgical vs medical (rank-dependent values)",
        vec![
            arm(
                "Surgical",
                surgical_p,
                [SURGICAL_GOOD_COST, SURGICAL_GOOD_COST, bad_cost],
            ),
            arm("Medical", medical_p, [MEDICAL_WEIGHTED_COST; 3]),
        ],
    );
    tree.effect_units = Some("QALY".into());
    Ok(tree)
}

/// Single-outcome arms on the published expected-value lines
/// `1.55 lambda - 1205` and `1.3 lambda - 1330`.
pub fn drummond_ev() -> DecisionTree {
    let mut tree = DecisionTree::new(
        "surgical vs medical (expected values)",
        vec![
            Strategy::new("Surgical", OutcomeNode::new(1205.0, 1.55)),
            Strategy::new("Medical", OutcomeNode::new(1330.0, 1.3)),
        ],
    );
    tree.effect_units = Some("QALY".into());
    tree
}
