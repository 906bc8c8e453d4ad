//! Seeded random trees shared by the integration tests.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rdtree_core::{Branch, ChanceNode, DecisionTree, Node, OutcomeNode, Strategy};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn probabilities(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // put the rounding residue on the last branch
    let head: f64 = p[..n - 1].iter().sum();
    p[n - 1] = 1.0 - head;
    p
}

pub fn outcome(rng: &mut impl Rng) -> OutcomeNode {
    OutcomeNode::new(rng.random_range(0.0..5000.0), rng.random_range(0.0..20.0))
}

/// A random subtree with depth at most `depth` (an outcome has depth 0).
pub fn node(rng: &mut impl Rng, depth: usize) -> Node {
    if depth == 0 || rng.random_bool(0.3) {
        return outcome(rng).into();
    }
    let n = rng.random_range(2..=3);
    let branches = probabilities(rng, n)
        .into_iter()
        .map(|p| Branch::new(p, node(rng, depth - 1)))
        .collect();
    ChanceNode::new(branches).into()
}

/// Independent strategies, each with its own structure.
pub fn random_tree(rng: &mut impl Rng, strategies: usize, depth: usize) -> DecisionTree {
    let s = (0..strategies)
        .map(|i| Strategy::new(format!("S{i}"), node(rng, depth)))
        .collect();
    DecisionTree::new("random", s)
}

fn reoutcome(rng: &mut impl Rng, skeleton: &Node) -> Node {
    match skeleton {
        Node::Outcome(_) => outcome(rng).into(),
        Node::Chance(c) => ChanceNode::new(
            c.branches
                .iter()
                .map(|b| Branch::new(b.probability, reoutcome(rng, &b.child)))
                .collect(),
        )
        .into(),
    }
}

/// Strategies sharing one probability skeleton with independent outcomes,
/// so their reduced lotteries are aligned state by state.
pub fn aligned_tree(rng: &mut impl Rng, strategies: usize, depth: usize) -> DecisionTree {
    let skeleton = node(rng, depth);
    let s = (0..strategies)
        .map(|i| Strategy::new(format!("S{i}"), reoutcome(rng, &skeleton)))
        .collect();
    DecisionTree::new("aligned", s)
}
