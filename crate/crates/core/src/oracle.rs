//! Brute-force cross-checks, kept independent of the evaluation path.
//!
//! These are used by the test suite and by `rdtree evaluate --check`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{DecisionTree, Node, PROBABILITY_SUM_TOLERANCE};
use crate::valuation::{
    check_gamma, weight_unchecked, WeightingLocus, WeightingMode, WeightingSpec,
};
use crate::voi::{StateCoupling, StateSpace};

/// Largest number of root-to-outcome paths the enumerator will walk.
pub const MAX_PATHS: u64 = 1_000_000;

/// Grid step used by [`invert_weight`] to find monotone pieces of `w`.
const INVERT_SCAN_STEP: f64 = 1e-4;

/// Expected net benefit of a strategy by explicit path enumeration.
///
/// Walks every root-to-outcome path with an explicit stack of branch
/// indices, multiplies probabilities top-down and sums `p * NMB` in
/// depth-first order.
pub fn enumerate_paths_value(tree: &DecisionTree, strategy_name: &str, lambda: f64) -> Result<f64> {
    let strategy = tree.strategy(strategy_name)?;
    let count = strategy.root.path_count();
    if count > MAX_PATHS {
        return Err(Error::TooManyPaths {
            count,
            limit: MAX_PATHS,
        });
    }

    let mut total = 0.0;
    // (node, probability of reaching it, next branch to visit)
    let mut stack: Vec<(&Node, f64, usize)> = Vec::new();
    stack.push((&strategy.root, 1.0, 0));
    while let Some(top) = stack.last_mut() {
        let (node, p, next) = *top;
        match node {
            Node::Outcome(o) => {
                total += p * (lambda * o.effect - o.cost);
                stack.pop();
            }
            Node::Chance(c) => {
                if next < c.branches.len() {
                    top.2 += 1;
                    let b = &c.branches[next];
                    stack.push((&b.child, p * b.probability, 0));
                } else {
                    stack.pop();
                }
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    /// Smallest `p` with `w(p) = target`.
    pub p: f64,
    /// `w` takes the value `target` at more than one `p`.
    pub multiple_preimages: bool,
}

/// Finds the smallest `p` with `w(p, gamma) = target` by bisection.
///
/// For `gamma >= 0.28` the preimage is unique. Below that `w` is not
/// monotone and `multiple_preimages` reports whether other solutions exist.
pub fn invert_weight(target: f64, gamma: f64) -> Result<Inversion> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::Domain {
            what: "target weight",
            value: target,
            domain: "[0, 1]",
        });
    }
    check_gamma(gamma)?;
    if target == 0.0 || target == 1.0 {
        return Ok(Inversion {
            p: target,
            multiple_preimages: false,
        });
    }

    let w = |p: f64| weight_unchecked(p, gamma);
    let steps = libm::ceil(1.0 / INVERT_SCAN_STEP) as usize;
    let grid = |k: usize| {
        if k >= steps {
            1.0
        } else {
            k as f64 * INVERT_SCAN_STEP
        }
    };

    // first grid cell whose upper end reaches the target
    let mut k = 1;
    while w(grid(k)) < target {
        k += 1;
    }
    let (mut lo, mut hi) = (grid(k - 1), grid(k));
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if w(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = if (w(lo) - target).abs() < (w(hi) - target).abs() {
        lo
    } else {
        hi
    };
    let multiple_preimages = (k + 1..=steps).any(|j| w(grid(j)) < target);
    Ok(Inversion {
        p,
        multiple_preimages,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub gamma: f64,
    pub scan_step: f64,
    /// Adjacent grid pairs `(p1, p2, w1, w2)` with `p1 < p2` and `w1 > w2`.
    pub violations: Vec<(f64, f64, f64, f64)>,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Scans `w(., gamma)` over `[0, 1]` at `step` and reports every decreasing
/// adjacent pair.
pub fn scan_monotonicity(gamma: f64, step: f64) -> Result<MonotonicityReport> {
    check_gamma(gamma)?;
    if !(step > 0.0 && step <= 0.01) {
        return Err(Error::Domain {
            what: "scan step",
            value: step,
            domain: "(0, 0.01]",
        });
    }
    let n = libm::ceil(1.0 / step) as usize;
    let p_at = |k: usize| if k >= n { 1.0 } else { k as f64 * step };
    let mut violations = Vec::new();
    let mut prev = (0.0, weight_unchecked(0.0, gamma));
    for k in 1..=n {
        let p = p_at(k);
        let w = weight_unchecked(p, gamma);
        if prev.1 > w {
            violations.push((prev.0, p, prev.1, w));
        }
        prev = (p, w);
    }
    Ok(MonotonicityReport {
        gamma,
        scan_step: step,
        violations,
    })
}

/// EVPI with both terms written out state by state, without the evaluation
/// path's argmax helpers.
pub fn evpi_by_enumeration(
    tree: &DecisionTree,
    lambda: f64,
    coupling: StateCoupling,
) -> Result<f64> {
    tree.check()?;
    let lotteries: Vec<_> = tree.strategies.iter().map(|s| s.reduce()).collect();
    let space = StateSpace::build(&lotteries, coupling)?;
    let nmb = |(c, e): (f64, f64)| lambda * e - c;

    let mut first = 0.0;
    for (p, row) in space.probabilities.iter().zip(&space.outcomes) {
        let mut best = nmb(row[0]);
        for &o in &row[1..] {
            if nmb(o) > best {
                best = nmb(o);
            }
        }
        first += p * best;
    }
    let mut second = f64::NEG_INFINITY;
    for j in 0..tree.strategies.len() {
        let mut ev = 0.0;
        for (p, row) in space.probabilities.iter().zip(&space.outcomes) {
            ev += p * nmb(row[j]);
        }
        if ev > second {
            second = ev;
        }
    }
    Ok(first - second)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Runs the oracle cross-checks on a model at one threshold.
pub fn cross_check(tree: &DecisionTree, spec: &WeightingSpec, lambda: f64) -> Result<Vec<Check>> {
    tree.check()?;
    let mut checks = Vec::new();
    let ev = WeightingSpec::expected_value();

    for s in &tree.strategies {
        let lottery = s.reduce();
        let total = lottery.total_probability();
        checks.push(Check {
            name: alloc::format!("reduced probabilities sum to 1 [{}]", s.name),
            passed: (total - 1.0).abs() <= PROBABILITY_SUM_TOLERANCE,
            detail: alloc::format!("sum = {total}"),
        });

        let reduced = crate::valuation::value_lottery(&lottery, &ev, lambda)?.value;
        let enumerated = enumerate_paths_value(tree, &s.name, lambda)?;
        let folded = crate::valuation::value_subtree(s, &ev, lambda)?.value;
        let tol = 1e-9 * reduced.abs().max(1.0);
        checks.push(Check {
            name: alloc::format!("path enumeration matches reduced EV [{}]", s.name),
            passed: (reduced - enumerated).abs() <= tol,
            detail: alloc::format!("reduced = {reduced}, enumerated = {enumerated}"),
        });
        checks.push(Check {
            name: alloc::format!("node fold-back matches reduced EV [{}]", s.name),
            passed: (reduced - folded).abs() <= tol,
            detail: alloc::format!("reduced = {reduced}, folded = {folded}"),
        });

        if spec.mode() == WeightingMode::Cumulative
            && spec.locus() == WeightingLocus::ReducedLottery
        {
            let w = crate::valuation::decision_weights(&lottery, spec, lambda)?;
            let sum: f64 = w.iter().sum();
            checks.push(Check {
                name: alloc::format!("cumulative weights sum to 1 [{}]", s.name),
                passed: (sum - 1.0).abs() <= 1e-12,
                detail: alloc::format!("sum = {sum}"),
            });
        }
    }

    if let Ok(v) = evpi_by_enumeration(tree, lambda, StateCoupling::Auto) {
        checks.push(Check {
            name: "EVPI is non-negative".into(),
            passed: v >= -1e-9,
            detail: alloc::format!("EVPI = {v}"),
        });
        let fast = crate::voi::evpi(tree, lambda, StateCoupling::Auto)?;
        checks.push(Check {
            name: "EVPI matches state-by-state enumeration".into(),
            passed: (fast - v).abs() <= 1e-9 * v.abs().max(1.0),
            detail: alloc::format!("engine = {fast}, enumerated = {v}"),
        });
    }
    Ok(checks)
}
