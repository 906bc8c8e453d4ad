//! Decision-tree domain types and the reduction of a strategy to its
//! reduced lottery.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Tolerance on the sum of branch probabilities at a chance node, and on the
/// total probability of a reduced lottery.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeNode {
    /// Cost in currency units. Negative costs (savings) are allowed.
    pub cost: f64,
    /// Health effect, e.g. QALYs or life-years.
    pub effect: f64,
    pub label: Option<String>,
}

impl OutcomeNode {
    pub fn new(cost: f64, effect: f64) -> Self {
        OutcomeNode {
            cost,
            effect,
            label: None,
        }
    }

    pub fn labelled(cost: f64, effect: f64, label: impl Into<String>) -> Self {
        OutcomeNode {
            cost,
            effect,
            label: Some(label.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    pub label: Option<String>,
    pub child: Node,
}

impl Branch {
    pub fn new(probability: f64, child: impl Into<Node>) -> Self {
        Branch {
            probability,
            label: None,
            child: child.into(),
        }
    }

    pub fn labelled(probability: f64, label: impl Into<String>, child: impl Into<Node>) -> Self {
        Branch {
            probability,
            label: Some(label.into()),
            child: child.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChanceNode {
    pub branches: Vec<Branch>,
}

impl ChanceNode {
    pub fn new(branches: Vec<Branch>) -> Self {
        ChanceNode { branches }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Chance(ChanceNode),
    Outcome(OutcomeNode),
}

impl From<ChanceNode> for Node {
    fn from(node: ChanceNode) -> Self {
        Node::Chance(node)
    }
}

impl From<OutcomeNode> for Node {
    fn from(node: OutcomeNode) -> Self {
        Node::Outcome(node)
    }
}

impl Node {
    /// Longest root-to-outcome path, counted in chance layers.
    pub fn depth(&self) -> usize {
        match self {
            Node::Outcome(_) => 0,
            Node::Chance(c) => {
                1 + c
                    .branches
                    .iter()
                    .map(|b| b.child.depth())
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    /// Number of root-to-outcome paths, saturating.
    pub fn path_count(&self) -> u64 {
        match self {
            Node::Outcome(_) => 1,
            Node::Chance(c) => c
                .branches
                .iter()
                .fold(0u64, |acc, b| acc.saturating_add(b.child.path_count())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub name: String,
    pub root: Node,
}

impl Strategy {
    pub fn new(name: impl Into<String>, root: impl Into<Node>) -> Self {
        Strategy {
            name: name.into(),
            root: root.into(),
        }
    }

    /// Collapses the subtree to one state per root-to-outcome path, in
    /// depth-first branch order.
    pub fn reduce(&self) -> ReducedLottery {
        let mut states = Vec::new();
        let mut path = Vec::new();
        collect_states(&self.root, 1.0, &mut path, &mut states);
        ReducedLottery {
            strategy_name: self.name.clone(),
            states,
        }
    }
}

fn collect_states(
    node: &Node,
    probability: f64,
    path: &mut Vec<String>,
    out: &mut Vec<LotteryState>,
) {
    match node {
        Node::Outcome(o) => {
            let mut label = path.join("/");
            if let Some(l) = &o.label {
                if !label.is_empty() {
                    label.push('/');
                }
                label.push_str(l);
            }
            out.push(LotteryState {
                probability,
                cost: o.cost,
                effect: o.effect,
                path_label: label,
            });
        }
        Node::Chance(c) => {
            for (i, b) in c.branches.iter().enumerate() {
                path.push(branch_segment(b, i));
                collect_states(&b.child, probability * b.probability, path, out);
                path.pop();
            }
        }
    }
}

/// Path segment naming a branch: its label, or `#<1-based index>`.
pub(crate) fn branch_segment(branch: &Branch, index: usize) -> String {
    match &branch.label {
        Some(l) => l.clone(),
        None => format!("#{}", index + 1),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub name: String,
    pub effect_units: Option<String>,
    pub currency: Option<String>,
    pub strategies: Vec<Strategy>,
}

impl DecisionTree {
    pub fn new(name: impl Into<String>, strategies: Vec<Strategy>) -> Self {
        DecisionTree {
            name: name.into(),
            effect_units: None,
            currency: None,
            strategies,
        }
    }

    pub fn strategy(&self, name: &str) -> Result<&Strategy> {
        self.strategies
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownStrategy(name.into()))
    }

    pub fn strategy_names(&self) -> Vec<String> {
        self.strategies.iter().map(|s| s.name.clone()).collect()
    }

    /// Validates the tree, turning a non-empty report into an error.
    pub fn check(&self) -> Result<()> {
        let report = validate_tree(self);
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidTree(report))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LotteryState {
    pub probability: f64,
    pub cost: f64,
    pub effect: f64,
    pub path_label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedLottery {
    pub strategy_name: String,
    pub states: Vec<LotteryState>,
}

impl ReducedLottery {
    pub fn probabilities(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.probability).collect()
    }

    pub fn total_probability(&self) -> f64 {
        self.states.iter().map(|s| s.probability).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Slash-separated location, starting with the strategy name.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: &str, message: String) {
        self.violations.push(Violation {
            path: path.into(),
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural and probabilistic invariant of the tree and reports
/// all violations found.
pub fn validate_tree(tree: &DecisionTree) -> ValidationReport {
    let mut report = ValidationReport::default();
    if tree.strategies.is_empty() {
        report.push("", "tree has no strategies".into());
    }
    for (i, s) in tree.strategies.iter().enumerate() {
        if s.name.is_empty() {
            report.push(
                &format!("strategy[{}]", i + 1),
                "strategy name is empty".into(),
            );
        }
        if tree.strategies[..i].iter().any(|o| o.name == s.name) {
            report.push(&s.name, format!("duplicate strategy name `{}`", s.name));
        }
        validate_node(&s.root, &s.name, &mut report);
    }
    report
}

fn validate_node(node: &Node, path: &str, report: &mut ValidationReport) {
    match node {
        Node::Outcome(o) => {
            if !o.cost.is_finite() {
                report.push(path, format!("cost {} is not finite", o.cost));
            }
            if !o.effect.is_finite() {
                report.push(path, format!("effect {} is not finite", o.effect));
            }
        }
        Node::Chance(c) => {
            if c.branches.is_empty() {
                report.push(path, "chance node has no branches".into());
                return;
            }
            let mut sum = 0.0;
            for (i, b) in c.branches.iter().enumerate() {
                let p = b.probability;
                let child_path = format!("{path}/branch[{}]", i + 1);
                if !(0.0..=1.0).contains(&p) {
                    report.push(&child_path, format!("probability out of range: {p}"));
                }
                sum += p;
                validate_node(&b.child, &child_path, report);
            }
            // written so that a NaN sum is reported
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !((sum - 1.0).abs() <= PROBABILITY_SUM_TOLERANCE) {
                report.push(path, format!("probabilities sum to {sum}"));
            }
        }
    }
}

/// Reduces the named strategy to its reduced lottery by the law of total
/// probability: one state per root-to-outcome path, with the product of
/// branch probabilities along the path.
pub fn reduce_strategy(tree: &DecisionTree, strategy_name: &str) -> Result<ReducedLottery> {
    Ok(tree.strategy(strategy_name)?.reduce())
}
