//! Net monetary benefit, the probability weighting function, decision weights
//! and strategy valuation.
//!
//! A [`WeightingSpec`] fixes three things for one evaluation:
//!
//! * `gamma`, the curvature of the weighting function
//!   `w(p) = p^g / (p^g + (1-p)^g)^(1/g)`;
//! * the [`WeightingMode`]: raw probabilities, `w` applied to each probability
//!   on its own, or rank-dependent (cumulative) decision weights;
//! * the [`WeightingLocus`]: once over the reduced lottery, or at every chance
//!   node while folding back. An evaluation uses exactly one locus.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{branch_segment, DecisionTree, Node, ReducedLottery, Strategy};

/// Below this `gamma` the weighting function is not monotone in `p`.
pub const NON_MONOTONE_GAMMA: f64 = 0.28;

/// Relative tolerance used to flag ties between strategy values.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// `lambda * effect - cost`.
#[inline]
pub fn net_benefit(effect: f64, cost: f64, lambda: f64) -> f64 {
    lambda * effect - cost
}

/// The inverse-S probability weighting function.
///
/// `w(0) = 0` and `w(1) = 1` exactly; `gamma = 1` is the identity.
pub fn weight_probability(p: f64, gamma: f64) -> Result<f64> {
    check_probability(p)?;
    check_gamma(gamma)?;
    Ok(weight_unchecked(p, gamma))
}

pub(crate) fn weight_unchecked(p: f64, gamma: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else if p >= 1.0 {
        1.0
    } else if gamma == 1.0 {
        p
    } else {
        let pg = libm::pow(p, gamma);
        let qg = libm::pow(1.0 - p, gamma);
        pg / libm::pow(pg + qg, 1.0 / gamma)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "probability",
            value: p,
            domain: "[0, 1]",
        })
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "gamma",
            value: gamma,
            domain: "(0, 1]",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WeightingMode {
    /// Raw probabilities; valuation is the expected value.
    Identity,
    /// `w(p)` applied to each probability independently, not normalized.
    Direct,
    /// Rank-dependent weights: `w(P(rank <= i)) - w(P(rank < i))` with states
    /// ranked best first.
    #[default]
    Cumulative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WeightingLocus {
    #[default]
    ReducedLottery,
    PerNode,
}

impl WeightingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightingMode::Identity => "identity",
            WeightingMode::Direct => "direct",
            WeightingMode::Cumulative => "cumulative",
        }
    }
}

impl WeightingLocus {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightingLocus::ReducedLottery => "reduced",
            WeightingLocus::PerNode => "per-node",
        }
    }
}

impl fmt::Display for WeightingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for WeightingLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightingMode {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "identity" => Ok(WeightingMode::Identity),
            "direct" => Ok(WeightingMode::Direct),
            "cumulative" => Ok(WeightingMode::Cumulative),
            _ => Err(alloc::format!(
                "unknown mode `{s}` (expected identity, direct or cumulative)"
            )),
        }
    }
}

impl FromStr for WeightingLocus {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "reduced" | "reduced-lottery" | "reduced_lottery" => Ok(WeightingLocus::ReducedLottery),
            "per-node" | "per_node" | "node" => Ok(WeightingLocus::PerNode),
            _ => Err(alloc::format!(
                "unknown locus `{s}` (expected reduced or per-node)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightingSpec {
    gamma: f64,
    mode: WeightingMode,
    locus: WeightingLocus,
}

impl Default for WeightingSpec {
    fn default() -> Self {
        WeightingSpec {
            gamma: 1.0,
            mode: WeightingMode::Cumulative,
            locus: WeightingLocus::ReducedLottery,
        }
    }
}

impl WeightingSpec {
    pub fn new(gamma: f64, mode: WeightingMode, locus: WeightingLocus) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(WeightingSpec { gamma, mode, locus })
    }

    /// Cumulative weights over the reduced lottery.
    pub fn cumulative(gamma: f64) -> Result<Self> {
        Self::new(
            gamma,
            WeightingMode::Cumulative,
            WeightingLocus::ReducedLottery,
        )
    }

    /// Plain expected value.
    pub fn expected_value() -> Self {
        WeightingSpec {
            gamma: 1.0,
            mode: WeightingMode::Identity,
            locus: WeightingLocus::ReducedLottery,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mode(&self) -> WeightingMode {
        self.mode
    }

    pub fn locus(&self) -> WeightingLocus {
        self.locus
    }

    pub fn with_locus(self, locus: WeightingLocus) -> Self {
        WeightingSpec { locus, ..self }
    }

    /// True when `gamma` is low enough for `w` to be non-monotone.
    pub fn non_monotone(&self) -> bool {
        self.gamma < NON_MONOTONE_GAMMA
    }

    /// Decision weights for outcomes with the given probabilities, where
    /// `scores` ranks them (higher is better) for cumulative mode.
    pub(crate) fn weights(&self, probabilities: &[f64], scores: &[f64]) -> Vec<f64> {
        match self.mode {
            WeightingMode::Identity => probabilities.to_vec(),
            WeightingMode::Direct => probabilities
                .iter()
                .map(|&p| weight_unchecked(p, self.gamma))
                .collect(),
            WeightingMode::Cumulative => cumulative_weights(probabilities, scores, self.gamma),
        }
    }
}

fn cumulative_weights(probabilities: &[f64], scores: &[f64], gamma: f64) -> Vec<f64> {
    debug_assert_eq!(probabilities.len(), scores.len());
    let mut order: Vec<usize> = (0..probabilities.len()).collect();
    // stable: ties keep declaration order
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    // the last state carrying mass is pinned at w(1) = 1: w is very steep
    // near 1 for small gamma, so rounding in the running sum must not leak in
    let last = order
        .iter()
        .rposition(|&i| probabilities[i] > 0.0)
        .unwrap_or(order.len().saturating_sub(1));

    let mut weights = vec![0.0; probabilities.len()];
    let mut cum = 0.0;
    let mut prev = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        cum += probabilities[i];
        let upper = if rank >= last {
            1.0
        } else {
            weight_unchecked(cum.min(1.0), gamma)
        };
        weights[i] = upper - prev;
        prev = upper;
    }
    weights
}

/// Decision weights for the states of a reduced lottery, aligned with
/// `lottery.states`. Cumulative mode ranks states by net benefit at `lambda`.
pub fn decision_weights(
    lottery: &ReducedLottery,
    spec: &WeightingSpec,
    lambda: f64,
) -> Result<Vec<f64>> {
    if spec.locus != WeightingLocus::ReducedLottery {
        return Err(Error::LocusMismatch(
            "decision weights over a reduced lottery need the reduced-lottery locus",
        ));
    }
    Ok(lottery_weights(lottery, spec, lambda))
}

fn lottery_weights(lottery: &ReducedLottery, spec: &WeightingSpec, lambda: f64) -> Vec<f64> {
    let probabilities = lottery.probabilities();
    let scores: Vec<f64> = lottery
        .states
        .iter()
        .map(|s| net_benefit(s.effect, s.cost, lambda))
        .collect();
    spec.weights(&probabilities, &scores)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyValuation {
    pub strategy_name: String,
    pub lambda: f64,
    /// Weighted net monetary benefit.
    pub value: f64,
    /// Weighted effect: the coefficient of `lambda` in `value` while the
    /// weights stay fixed.
    pub weighted_effect: f64,
    pub weighted_cost: f64,
    /// One entry per state (reduced locus) or per branch application
    /// (per-node locus, parent before children).
    pub weights_used: Vec<(String, f64)>,
}

impl StrategyValuation {
    pub fn weight_sum(&self) -> f64 {
        self.weights_used.iter().map(|(_, w)| w).sum()
    }
}

/// Values a reduced lottery. Requires the reduced-lottery locus, except in
/// identity mode where the locus is irrelevant.
pub fn value_lottery(
    lottery: &ReducedLottery,
    spec: &WeightingSpec,
    lambda: f64,
) -> Result<StrategyValuation> {
    if spec.locus != WeightingLocus::ReducedLottery && spec.mode != WeightingMode::Identity {
        return Err(Error::LocusMismatch(
            "a reduced lottery cannot be valued with per-node weighting",
        ));
    }
    let weights = lottery_weights(lottery, spec, lambda);
    let mut value = 0.0;
    let mut weighted_effect = 0.0;
    let mut weighted_cost = 0.0;
    let mut weights_used = Vec::with_capacity(weights.len());
    for (s, &w) in lottery.states.iter().zip(&weights) {
        value += w * net_benefit(s.effect, s.cost, lambda);
        weighted_effect += w * s.effect;
        weighted_cost += w * s.cost;
        weights_used.push((s.path_label.clone(), w));
    }
    Ok(StrategyValuation {
        strategy_name: lottery.strategy_name.clone(),
        lambda,
        value,
        weighted_effect,
        weighted_cost,
        weights_used,
    })
}

/// Values a strategy subtree by folding back with weights applied at every
/// chance node. Requires the per-node locus, except in identity mode.
pub fn value_subtree(
    strategy: &Strategy,
    spec: &WeightingSpec,
    lambda: f64,
) -> Result<StrategyValuation> {
    if spec.locus != WeightingLocus::PerNode && spec.mode != WeightingMode::Identity {
        return Err(Error::LocusMismatch(
            "folding a subtree needs the per-node locus",
        ));
    }
    let mut path = Vec::new();
    let fold = fold_node(&strategy.root, spec, lambda, &mut path);
    Ok(StrategyValuation {
        strategy_name: strategy.name.clone(),
        lambda,
        value: fold.value,
        weighted_effect: fold.effect,
        weighted_cost: fold.cost,
        weights_used: fold.weights,
    })
}

struct Fold {
    value: f64,
    effect: f64,
    cost: f64,
    weights: Vec<(String, f64)>,
}

fn fold_node(node: &Node, spec: &WeightingSpec, lambda: f64, path: &mut Vec<String>) -> Fold {
    match node {
        Node::Outcome(o) => Fold {
            value: net_benefit(o.effect, o.cost, lambda),
            effect: o.effect,
            cost: o.cost,
            weights: Vec::new(),
        },
        Node::Chance(c) => {
            let children: Vec<Fold> = c
                .branches
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    path.push(branch_segment(b, i));
                    let f = fold_node(&b.child, spec, lambda, path);
                    path.pop();
                    f
                })
                .collect();
            let probabilities: Vec<f64> = c.branches.iter().map(|b| b.probability).collect();
            let scores: Vec<f64> = children.iter().map(|f| f.value).collect();
            let omega = spec.weights(&probabilities, &scores);

            let mut out = Fold {
                value: 0.0,
                effect: 0.0,
                cost: 0.0,
                weights: Vec::new(),
            };
            for (i, (b, &w)) in c.branches.iter().zip(&omega).enumerate() {
                path.push(branch_segment(b, i));
                out.weights.push((path.join("/"), w));
                path.pop();
            }
            for (child, &w) in children.into_iter().zip(&omega) {
                out.value += w * child.value;
                out.effect += w * child.effect;
                out.cost += w * child.cost;
                out.weights.extend(child.weights);
            }
            out
        }
    }
}

/// Values a strategy under the spec's locus: reduces it first for the
/// reduced-lottery locus, folds it back node by node otherwise.
pub fn value_strategy(
    strategy: &Strategy,
    spec: &WeightingSpec,
    lambda: f64,
) -> Result<StrategyValuation> {
    match spec.locus {
        WeightingLocus::ReducedLottery => value_lottery(&strategy.reduce(), spec, lambda),
        WeightingLocus::PerNode => value_subtree(strategy, spec, lambda),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    /// Index of the chosen strategy in declaration order.
    pub index: usize,
    pub strategy_name: String,
    /// True when another strategy's value ties with the chosen one.
    pub tie: bool,
    pub valuations: Vec<StrategyValuation>,
}

impl Choice {
    pub fn value(&self) -> f64 {
        self.valuations[self.index].value
    }

    pub fn values(&self) -> Vec<f64> {
        self.valuations.iter().map(|v| v.value).collect()
    }
}

/// Picks the strategy with the largest value; the first declared wins ties.
pub fn choose_strategy(tree: &DecisionTree, spec: &WeightingSpec, lambda: f64) -> Result<Choice> {
    tree.check()?;
    let valuations = tree
        .strategies
        .iter()
        .map(|s| value_strategy(s, spec, lambda))
        .collect::<Result<Vec<_>>>()?;
    Ok(pick_best(valuations))
}

pub(crate) fn pick_best(valuations: Vec<StrategyValuation>) -> Choice {
    let values: Vec<f64> = valuations.iter().map(|v| v.value).collect();
    let (index, tie) = argmax(&values);
    Choice {
        index,
        strategy_name: valuations[index].strategy_name.clone(),
        tie,
        valuations,
    }
}

/// First index holding the maximum, and whether any other value ties it.
pub(crate) fn argmax(values: &[f64]) -> (usize, bool) {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    let top = values[best];
    let tol = TIE_TOLERANCE * top.abs().max(1.0);
    let tie = values
        .iter()
        .enumerate()
        .any(|(i, &v)| i != best && (top - v).abs() <= tol);
    (best, tie)
}
