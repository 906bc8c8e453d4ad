//! Value of perfect information, threshold sweeps, switch points and the
//! compensating threshold.
//!
//! EVPI at threshold `lambda` is
//! `sum_s p(s) max_j NB(j, s) - max_j sum_s p(s) NB(j, s)`; RDVPI keeps the
//! first term under raw probabilities and replaces the second with the best
//! weighted strategy value. Both need states shared by every strategy, which
//! is what [`StateCoupling`] controls.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{DecisionTree, ReducedLottery, PROBABILITY_SUM_TOLERANCE};
use crate::valuation::{
    net_benefit, pick_best, value_lottery, value_subtree, Choice, WeightingLocus, WeightingMode,
    WeightingSpec,
};

/// Absolute tolerance below which two switch points are treated as equal.
pub const SWITCH_TOLERANCE: f64 = 1e-6;

/// Upper bound on the size of an independent joint state space.
pub const MAX_JOINT_STATES: usize = 1_000_000;

/// Upper bound on the number of points in a sweep grid.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// Uniform subdivisions of the interval scanned by the switch-point search,
/// on top of the exact rank-change breakpoints.
const SCAN_SEGMENTS: usize = 512;

/// Grid rows used to compare the two information curves in [`harmonize`].
const CLASSIFY_SEGMENTS: usize = 100;

/// How the states of different strategies are matched for the
/// perfect-information term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StateCoupling {
    /// Every strategy reduces to the same number of states with the same
    /// probabilities, and state `i` is the same state of the world in each.
    #[default]
    Aligned,
    /// Strategies resolve independently; states are the product space.
    Independent,
    /// `Aligned` when the strategies line up, `Independent` otherwise.
    Auto,
}

impl StateCoupling {
    pub fn as_str(self) -> &'static str {
        match self {
            StateCoupling::Aligned => "aligned",
            StateCoupling::Independent => "independent",
            StateCoupling::Auto => "auto",
        }
    }
}

impl fmt::Display for StateCoupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StateCoupling {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "aligned" => Ok(StateCoupling::Aligned),
            "independent" => Ok(StateCoupling::Independent),
            "auto" => Ok(StateCoupling::Auto),
            _ => Err(alloc::format!(
                "unknown coupling `{s}` (expected aligned, independent or auto)"
            )),
        }
    }
}

/// States shared by all strategies, each carrying one `(cost, effect)` per
/// strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub coupling: StateCoupling,
    pub probabilities: Vec<f64>,
    /// `outcomes[s][j]` is `(cost, effect)` of strategy `j` in state `s`.
    pub outcomes: Vec<Vec<(f64, f64)>>,
}

impl StateSpace {
    pub fn build(lotteries: &[ReducedLottery], coupling: StateCoupling) -> Result<Self> {
        match coupling {
            StateCoupling::Aligned => Self::aligned(lotteries),
            StateCoupling::Independent => Self::independent(lotteries),
            StateCoupling::Auto => {
                Self::aligned(lotteries).or_else(|_| Self::independent(lotteries))
            }
        }
    }

    fn aligned(lotteries: &[ReducedLottery]) -> Result<Self> {
        let first = lotteries.first().ok_or(Error::NoStrategies)?;
        for l in &lotteries[1..] {
            if l.states.len() != first.states.len() {
                return Err(Error::StateSpaceMismatch(alloc::format!(
                    "`{}` has {} states but `{}` has {}",
                    first.strategy_name,
                    first.states.len(),
                    l.strategy_name,
                    l.states.len()
                )));
            }
            for (i, (a, b)) in first.states.iter().zip(&l.states).enumerate() {
                if (a.probability - b.probability).abs() > PROBABILITY_SUM_TOLERANCE {
                    return Err(Error::StateSpaceMismatch(alloc::format!(
                        "state {} has probability {} in `{}` but {} in `{}`",
                        i + 1,
                        a.probability,
                        first.strategy_name,
                        b.probability,
                        l.strategy_name
                    )));
                }
            }
        }
        let outcomes = (0..first.states.len())
            .map(|i| {
                lotteries
                    .iter()
                    .map(|l| (l.states[i].cost, l.states[i].effect))
                    .collect()
            })
            .collect();
        Ok(StateSpace {
            coupling: StateCoupling::Aligned,
            probabilities: first.probabilities(),
            outcomes,
        })
    }

    fn independent(lotteries: &[ReducedLottery]) -> Result<Self> {
        if lotteries.is_empty() {
            return Err(Error::NoStrategies);
        }
        let count = lotteries
            .iter()
            .try_fold(1usize, |acc, l| acc.checked_mul(l.states.len()))
            .filter(|&n| n <= MAX_JOINT_STATES)
            .ok_or_else(|| {
                Error::StateSpaceMismatch(alloc::format!(
                    "independent joint state space exceeds {MAX_JOINT_STATES} states"
                ))
            })?;
        let mut probabilities = Vec::with_capacity(count);
        let mut outcomes = Vec::with_capacity(count);
        // odometer over state indices, first strategy slowest
        let mut idx = vec![0usize; lotteries.len()];
        for _ in 0..count {
            let mut p = 1.0;
            let mut row = Vec::with_capacity(lotteries.len());
            for (l, &i) in lotteries.iter().zip(&idx) {
                let s = &l.states[i];
                p *= s.probability;
                row.push((s.cost, s.effect));
            }
            probabilities.push(p);
            outcomes.push(row);
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < lotteries[k].states.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(StateSpace {
            coupling: StateCoupling::Independent,
            probabilities,
            outcomes,
        })
    }

    /// `sum_s p(s) max_j NB(j, s)`: the value of choosing after the state is
    /// revealed.
    pub fn perfect_information_value(&self, lambda: f64) -> f64 {
        self.probabilities
            .iter()
            .zip(&self.outcomes)
            .map(|(&p, row)| {
                let best = row
                    .iter()
                    .map(|&(c, e)| net_benefit(e, c, lambda))
                    .fold(f64::NEG_INFINITY, f64::max);
                p * best
            })
            .sum()
    }
}

/// A validated tree with its reduced lotteries and joint state space, ready
/// for repeated evaluation at many thresholds.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    tree: &'a DecisionTree,
    lotteries: Vec<ReducedLottery>,
    space: StateSpace,
}

impl<'a> Evaluator<'a> {
    pub fn new(tree: &'a DecisionTree, coupling: StateCoupling) -> Result<Self> {
        tree.check()?;
        let lotteries: Vec<ReducedLottery> = tree.strategies.iter().map(|s| s.reduce()).collect();
        let space = StateSpace::build(&lotteries, coupling)?;
        Ok(Evaluator {
            tree,
            lotteries,
            space,
        })
    }

    pub fn tree(&self) -> &DecisionTree {
        self.tree
    }

    pub fn lotteries(&self) -> &[ReducedLottery] {
        &self.lotteries
    }

    pub fn state_space(&self) -> &StateSpace {
        &self.space
    }

    pub fn choose(&self, spec: &WeightingSpec, lambda: f64) -> Result<Choice> {
        let per_node =
            spec.locus() == WeightingLocus::PerNode && spec.mode() != WeightingMode::Identity;
        let valuations = if per_node {
            self.tree
                .strategies
                .iter()
                .map(|s| value_subtree(s, spec, lambda))
                .collect::<Result<Vec<_>>>()?
        } else {
            self.lotteries
                .iter()
                .map(|l| value_lottery(l, &spec.with_locus(WeightingLocus::ReducedLottery), lambda))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(pick_best(valuations))
    }

    pub fn evpi(&self, lambda: f64) -> Result<f64> {
        let best = self
            .choose(&WeightingSpec::expected_value(), lambda)?
            .value();
        Ok(self.space.perfect_information_value(lambda) - best)
    }

    pub fn rdvpi(&self, spec: &WeightingSpec, lambda: f64) -> Result<f64> {
        let best = self.choose(spec, lambda)?.value();
        Ok(self.space.perfect_information_value(lambda) - best)
    }

    /// One sweep row at `lambda`.
    pub fn row(&self, spec: &WeightingSpec, lambda: f64) -> Result<VoiRow> {
        let ev = self.choose(&WeightingSpec::expected_value(), lambda)?;
        let rd = self.choose(spec, lambda)?;
        let first = self.space.perfect_information_value(lambda);
        Ok(VoiRow {
            lambda,
            evpi: first - ev.value(),
            rdvpi: first - rd.value(),
            ev_values: ev.values(),
            choice_ev: ev.index,
            ev_tie: ev.tie,
            rd_values: rd.values(),
            choice_rd: rd.index,
            rd_tie: rd.tie,
        })
    }

    /// Assembles a curve from rows computed elsewhere (e.g. in parallel).
    pub fn curve(&self, spec: WeightingSpec, grid: LambdaGrid, rows: Vec<VoiRow>) -> VoiCurve {
        VoiCurve {
            strategy_names: self.tree.strategy_names(),
            spec,
            grid,
            coupling: self.space.coupling,
            rows,
        }
    }

    pub fn sweep(&self, spec: &WeightingSpec, grid: &LambdaGrid) -> Result<VoiCurve> {
        let rows = grid
            .points()
            .into_iter()
            .map(|l| self.row(spec, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.curve(*spec, *grid, rows))
    }

    pub fn find_switch_point(&self, spec: &WeightingSpec, lo: f64, hi: f64) -> Result<SwitchPoint> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        let mut points = self.breakpoints(spec, lo, hi);
        points.sort_by(f64::total_cmp);
        points.dedup();

        let start = self.choose(spec, lo)?;
        let initial = start.index;
        for pair in points.windows(2) {
            let (mut a, mut b) = (pair[0], pair[1]);
            let end = self.choose(spec, b)?;
            if end.index == initial {
                continue;
            }
            // the chosen set of each linear piece is an interval, so the
            // first change lies in (a, b]
            let mut to = end.index;
            loop {
                let mid = a + 0.5 * (b - a);
                if mid <= a || mid >= b {
                    break;
                }
                let c = self.choose(spec, mid)?;
                if c.index == initial {
                    a = mid;
                } else {
                    b = mid;
                    to = c.index;
                }
            }
            return Ok(SwitchPoint {
                initial,
                outcome: SwitchOutcome::At { lambda: b, to },
                tie: start.tie,
            });
        }

        let end = self.choose(spec, hi)?;
        let next = points.get(1).copied().unwrap_or(hi);
        let extrapolated_crossing = self.extrapolate_crossing(spec, &start, lo, next)?;
        Ok(SwitchPoint {
            initial,
            outcome: SwitchOutcome::Dominant {
                extrapolated_crossing,
            },
            tie: start.tie || end.tie,
        })
    }

    /// Candidate points for the switch search: both ends, a uniform scan and,
    /// for rank-dependent weights over reduced lotteries, every threshold at
    /// which two states of one strategy swap rank. Between consecutive points
    /// from the latter set every strategy value is linear in `lambda`.
    fn breakpoints(&self, spec: &WeightingSpec, lo: f64, hi: f64) -> Vec<f64> {
        let mut points: Vec<f64> = (0..=SCAN_SEGMENTS)
            .map(|k| lo + (hi - lo) * (k as f64) / (SCAN_SEGMENTS as f64))
            .collect();
        points[SCAN_SEGMENTS] = hi;
        if spec.mode() == WeightingMode::Cumulative
            && spec.locus() == WeightingLocus::ReducedLottery
        {
            for l in &self.lotteries {
                for (i, a) in l.states.iter().enumerate() {
                    for b in &l.states[i + 1..] {
                        let de = a.effect - b.effect;
                        if de != 0.0 {
                            let x = (a.cost - b.cost) / de;
                            if x > lo && x < hi {
                                points.push(x);
                            }
                        }
                    }
                }
            }
        }
        points
    }

    /// Extends the first linear piece below `lo` and returns the nearest
    /// threshold at which another strategy would overtake the initial choice.
    fn extrapolate_crossing(
        &self,
        spec: &WeightingSpec,
        start: &Choice,
        lo: f64,
        next: f64,
    ) -> Result<Option<f64>> {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(next > lo) {
            return Ok(None);
        }
        let at_next = self.choose(spec, next)?;
        let i = start.index;
        let mut nearest: Option<f64> = None;
        for k in 0..start.valuations.len() {
            if k == i {
                continue;
            }
            let d0 = start.valuations[k].value - start.valuations[i].value;
            let d1 = at_next.valuations[k].value - at_next.valuations[i].value;
            let slope = (d1 - d0) / (next - lo);
            if slope < 0.0 && d0 < 0.0 {
                let root = lo - d0 / slope;
                if root < lo && nearest.is_none_or(|n| root > n) {
                    nearest = Some(root);
                }
            }
        }
        Ok(nearest)
    }
}

/// EVPI at `lambda`.
pub fn evpi(tree: &DecisionTree, lambda: f64, coupling: StateCoupling) -> Result<f64> {
    Evaluator::new(tree, coupling)?.evpi(lambda)
}

/// RDVPI at `lambda`: raw-probability first term minus the best value under
/// `spec`. Its sign is not constrained.
pub fn rdvpi(
    tree: &DecisionTree,
    spec: &WeightingSpec,
    lambda: f64,
    coupling: StateCoupling,
) -> Result<f64> {
    Evaluator::new(tree, coupling)?.rdvpi(spec, lambda)
}

/// Inclusive grid `min, min + step, ...`, with the last point clamped to
/// `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl LambdaGrid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(Error::InvalidGrid("bounds and step must be finite"));
        }
        if min > max {
            return Err(Error::InvalidGrid("lambda_min exceeds lambda_max"));
        }
        if step <= 0.0 {
            return Err(Error::InvalidGrid("step must be positive"));
        }
        if (max - min) / step >= MAX_GRID_POINTS as f64 {
            return Err(Error::InvalidGrid("too many grid points"));
        }
        Ok(LambdaGrid { min, max, step })
    }

    pub fn points(&self) -> Vec<f64> {
        let mut points = Vec::new();
        let mut k = 0u64;
        loop {
            let x = self.min + (k as f64) * self.step;
            if x >= self.max - 1e-9 * self.step {
                break;
            }
            points.push(x);
            k += 1;
        }
        points.push(self.max);
        points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoiRow {
    pub lambda: f64,
    /// Expected values, one per strategy in declaration order.
    pub ev_values: Vec<f64>,
    pub choice_ev: usize,
    pub ev_tie: bool,
    pub evpi: f64,
    /// Values under the weighting spec.
    pub rd_values: Vec<f64>,
    pub choice_rd: usize,
    pub rd_tie: bool,
    pub rdvpi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoiCurve {
    pub strategy_names: Vec<String>,
    pub spec: WeightingSpec,
    pub grid: LambdaGrid,
    /// The coupling actually used (never `Auto`).
    pub coupling: StateCoupling,
    /// Sorted by `lambda`, ascending.
    pub rows: Vec<VoiRow>,
}

/// Evaluates every grid point.
pub fn sweep(
    tree: &DecisionTree,
    spec: &WeightingSpec,
    grid: &LambdaGrid,
    coupling: StateCoupling,
) -> Result<VoiCurve> {
    Evaluator::new(tree, coupling)?.sweep(spec, grid)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwitchOutcome {
    /// The choice first differs from the initial one at `lambda`, where
    /// strategy `to` is chosen.
    At { lambda: f64, to: usize },
    /// The initial choice holds on the whole interval. The crossing obtained
    /// by extending the first linear piece below the interval, if any, is
    /// kept as a diagnostic.
    Dominant { extrapolated_crossing: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchPoint {
    /// Strategy chosen at the lower end of the interval.
    pub initial: usize,
    pub outcome: SwitchOutcome,
    /// Another strategy ties with the chosen one at an end of the interval.
    pub tie: bool,
}

impl SwitchPoint {
    pub fn lambda(&self) -> Option<f64> {
        match self.outcome {
            SwitchOutcome::At { lambda, .. } => Some(lambda),
            SwitchOutcome::Dominant { .. } => None,
        }
    }

    pub fn is_dominant(&self) -> bool {
        matches!(self.outcome, SwitchOutcome::Dominant { .. })
    }

    /// Strategy chosen just after the switch, or throughout if dominant.
    pub fn final_choice(&self) -> usize {
        match self.outcome {
            SwitchOutcome::At { to, .. } => to,
            SwitchOutcome::Dominant { .. } => self.initial,
        }
    }
}

/// Smallest `lambda` in `[lo, hi]` at which the optimal strategy under
/// `spec` differs from the one at `lo`.
pub fn find_switch_point(
    tree: &DecisionTree,
    spec: &WeightingSpec,
    lo: f64,
    hi: f64,
) -> Result<SwitchPoint> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    // the switch search never touches the perfect-information term
    Evaluator::new(tree, StateCoupling::Auto)
        .or_else(|e| match e {
            Error::StateSpaceMismatch(_) => Evaluator::without_space(tree),
            e => Err(e),
        })?
        .find_switch_point(spec, lo, hi)
}

impl<'a> Evaluator<'a> {
    fn without_space(tree: &'a DecisionTree) -> Result<Self> {
        tree.check()?;
        Ok(Evaluator {
            tree,
            lotteries: tree.strategies.iter().map(|s| s.reduce()).collect(),
            space: StateSpace {
                coupling: StateCoupling::Auto,
                probabilities: Vec::new(),
                outcomes: Vec::new(),
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Weighted switch above the risk-neutral one, RDVPI >= EVPI throughout.
    A,
    /// Weighted switch above the risk-neutral one, RDVPI < EVPI throughout.
    B,
    /// Weighted switch below the risk-neutral one.
    COrD,
    /// Same switch point, or the same strategy throughout.
    Aligned,
    /// Weighted switch above, but RDVPI - EVPI changes sign.
    Indeterminate,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::A => "a",
            Scenario::B => "b",
            Scenario::COrD => "c_or_d",
            Scenario::Aligned => "aligned",
            Scenario::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Switch points reduced to numbers for comparison. A dominant risk-neutral
/// choice counts as switching at `lo`; a dominant weighted choice counts as
/// `lo` when it already agrees with the risk-neutral one, and never
/// (`+inf`) otherwise.
fn effective_thresholds(ev: &SwitchPoint, rd: &SwitchPoint, lo: f64) -> (f64, f64) {
    let ev_hat = ev.lambda().unwrap_or(lo);
    let rd_hat = match rd.outcome {
        SwitchOutcome::At { lambda, .. } => lambda,
        SwitchOutcome::Dominant { .. } if rd.initial == ev.final_choice() => lo,
        SwitchOutcome::Dominant { .. } => f64::INFINITY,
    };
    (ev_hat, rd_hat)
}

/// Classifies the relation between the risk-neutral and weighted decisions
/// by switch-point order and the order of the two information curves.
pub fn classify_scenario(
    curve: &VoiCurve,
    switch_ev: &SwitchPoint,
    switch_rd: &SwitchPoint,
) -> Scenario {
    if switch_ev.is_dominant() && switch_rd.is_dominant() && switch_ev.initial == switch_rd.initial
    {
        return Scenario::Aligned;
    }
    let lo = curve.rows.first().map_or(curve.grid.min, |r| r.lambda);
    let (ev_hat, rd_hat) = effective_thresholds(switch_ev, switch_rd, lo);
    if (rd_hat - ev_hat).abs() <= SWITCH_TOLERANCE {
        return Scenario::Aligned;
    }
    if rd_hat < ev_hat {
        return Scenario::COrD;
    }
    let above = curve.rows.iter().all(|r| r.rdvpi - r.evpi >= -1e-9);
    let below = curve.rows.iter().all(|r| r.rdvpi < r.evpi);
    match (above, below) {
        (true, _) => Scenario::A,
        (false, true) => Scenario::B,
        _ => Scenario::Indeterminate,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonizationResult {
    pub switch_ev: SwitchPoint,
    pub switch_rd: SwitchPoint,
    /// Risk-neutral switch point; the lower end of the interval when the
    /// risk-neutral choice is dominant (see `ev_dominant`).
    pub lambda_hat_ev: f64,
    pub ev_dominant: bool,
    /// Where a dominant risk-neutral choice would have switched had its first
    /// linear piece continued below the interval.
    pub ev_extrapolated_crossing: Option<f64>,
    /// Weighted switch point; `None` when the weighted choice never reaches
    /// the risk-neutral one on the interval.
    pub lambda_hat_rd: Option<f64>,
    pub rd_dominant: bool,
    /// Compensating threshold `lambda_hat_rd - lambda_hat_ev`.
    pub epsilon: Option<f64>,
    /// `epsilon` times the weighted effect of the adopted strategy, with
    /// weights taken at `lambda_hat_rd`.
    pub payment: Option<f64>,
    pub adopted_index: usize,
    pub adopted_strategy: String,
    pub scenario: Scenario,
}

/// Computes both switch points on `[lo, hi]`, the compensating threshold and
/// the compensation payment for adopting the risk-neutral choice.
pub fn harmonize(
    tree: &DecisionTree,
    spec: &WeightingSpec,
    lo: f64,
    hi: f64,
    coupling: StateCoupling,
) -> Result<HarmonizationResult> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let eval = Evaluator::new(tree, coupling)?;
    let switch_ev = eval.find_switch_point(&WeightingSpec::expected_value(), lo, hi)?;
    let switch_rd = eval.find_switch_point(spec, lo, hi)?;
    let (ev_hat, rd_hat) = effective_thresholds(&switch_ev, &switch_rd, lo);

    let adopted_index = switch_ev.final_choice();
    let lambda_hat_rd = rd_hat.is_finite().then_some(rd_hat);
    let epsilon = lambda_hat_rd.map(|rd| {
        let e = rd - ev_hat;
        if e.abs() <= SWITCH_TOLERANCE {
            0.0
        } else {
            e
        }
    });
    let payment = match (epsilon, lambda_hat_rd) {
        (Some(e), Some(at)) => {
            let choice = eval.choose(spec, at)?;
            Some(e * choice.valuations[adopted_index].weighted_effect)
        }
        _ => None,
    };

    let grid = LambdaGrid::new(lo, hi, (hi - lo) / CLASSIFY_SEGMENTS as f64)?;
    let curve = eval.sweep(spec, &grid)?;
    let scenario = classify_scenario(&curve, &switch_ev, &switch_rd);

    Ok(HarmonizationResult {
        lambda_hat_ev: ev_hat,
        ev_dominant: switch_ev.is_dominant(),
        ev_extrapolated_crossing: match switch_ev.outcome {
            SwitchOutcome::Dominant {
                extrapolated_crossing,
            } => extrapolated_crossing,
            SwitchOutcome::At { .. } => None,
        },
        lambda_hat_rd,
        rd_dominant: switch_rd.is_dominant(),
        epsilon,
        payment,
        adopted_index,
        adopted_strategy: tree.strategies[adopted_index].name.clone(),
        scenario,
        switch_ev,
        switch_rd,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonColumn {
    pub values: Vec<f64>,
    /// First grid threshold at which the weighted choice agrees with the
    /// risk-neutral one after having disagreed.
    pub switch_lambda: Option<f64>,
    /// The choices disagree on some row and never agree afterwards.
    pub no_switch: bool,
}

/// Per-row compensating threshold on the sweep grid:
/// `max(0, lambda_k - lambda_switch)`, where `lambda_switch` is the first grid
/// point at which the weighted choice falls back in line with the
/// risk-neutral one. All zeros when the choices always agree or never
/// reconcile.
pub fn table2_epsilon_column(curve: &VoiCurve) -> EpsilonColumn {
    let agree = |r: &VoiRow| r.choice_rd == r.choice_ev;
    let zeros = vec![0.0; curve.rows.len()];
    let Some(first_disagreement) = curve.rows.iter().position(|r| !agree(r)) else {
        return EpsilonColumn {
            values: zeros,
            switch_lambda: None,
            no_switch: false,
        };
    };
    let Some(switch) = curve.rows[first_disagreement..]
        .iter()
        .find(|r| agree(r))
        .map(|r| r.lambda)
    else {
        return EpsilonColumn {
            values: zeros,
            switch_lambda: None,
            no_switch: true,
        };
    };
    EpsilonColumn {
        values: curve
            .rows
            .iter()
            .map(|r| (r.lambda - switch).max(0.0))
            .collect(),
        switch_lambda: Some(switch),
        no_switch: false,
    }
}
