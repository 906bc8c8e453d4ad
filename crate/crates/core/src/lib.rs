//! Decision-tree economic evaluation under risk-neutral and rank-dependent
//! criteria.
//!
//! Trees are a single root decision over named strategies; each strategy is a
//! subtree of chance nodes ending in `(cost, effect)` outcomes. Strategies are
//! valued at a willingness-to-pay threshold `lambda` through net monetary
//! benefit, either by plain expectation or through a probability weighting
//! function applied over the reduced lottery or at every chance node.
//!
//! On top of valuation, [`voi`] provides value-of-information curves (EVPI and
//! its rank-dependent analogue), switch-point search over `lambda` and the
//! compensating threshold that reconciles the two criteria.
//!
//! The crate is `no_std` and only needs `alloc`. File IO, the CLI and CSV
//! emission live in the `rdtree` crate.

#![no_std]

extern crate alloc;

pub mod dsl;
mod error;
pub mod model;
pub mod oracle;
pub mod valuation;
pub mod voi;

pub use error::{Error, Result};
pub use model::{
    reduce_strategy, validate_tree, Branch, ChanceNode, DecisionTree, LotteryState, Node,
    OutcomeNode, ReducedLottery, Strategy, ValidationReport, Violation,
};
pub use valuation::{
    choose_strategy, decision_weights, net_benefit, value_lottery, value_strategy, value_subtree,
    weight_probability, Choice, StrategyValuation, WeightingLocus, WeightingMode, WeightingSpec,
};
pub use voi::{
    classify_scenario, evpi, find_switch_point, harmonize, rdvpi, sweep, table2_epsilon_column,
    Evaluator, HarmonizationResult, LambdaGrid, Scenario, StateCoupling, SwitchOutcome,
    SwitchPoint, VoiCurve, VoiRow,
};
