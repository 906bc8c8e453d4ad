//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;
use rdtree::csv::render_sweep_csv;
use rdtree::fixtures::{self, drummond_ev, drummond_rd};
use rdtree::parallel::sweep_concurrent;
use rdtree::{run, Env};
use rdtree_core::dsl::{parse_model, serialize_model};
use rdtree_core::oracle::{enumerate_paths_value, scan_monotonicity};
use rdtree_core::{
    decision_weights, harmonize, net_benefit, reduce_strategy, sweep, table2_epsilon_column,
    Branch, ChanceNode, DecisionTree, Evaluator, LambdaGrid, Node, OutcomeNode, Scenario,
    StateCoupling, Strategy, WeightingLocus, WeightingMode, WeightingSpec,
};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        // NaN must fail, so no negated comparison
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    ensure!(elapsed < limit, "took {elapsed:?}, limit {limit:?}");
    Ok(elapsed)
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    repo_root().join("fixtures").join(name)
}

/// Published worked-example rows on the 0..5000 grid.
const GRID_LAMBDAS: [f64; 6] = [0.0, 1000.0, 2000.0, 3000.0, 4000.0, 5000.0];
const PUBLISHED_RD: [[f64; 2]; 6] = [
    [-1941.27, -1748.28],
    [9203.495, 9281.96],
    [20348.26, 20312.2],
    [31493.03, 31342.44],
    [42637.8, 42372.68],
    [53782.56, 53402.92],
];
const PUBLISHED_RD_CHOICE: [&str; 6] = [
    "Medical", "Medical", "Surgical", "Surgical", "Surgical", "Surgical",
];
const PUBLISHED_EV: [[f64; 2]; 6] = [
    [-1205.0, -1330.0],
    [345.0, -30.0],
    [1895.0, 1270.0],
    [3445.0, 2570.0],
    [4995.0, 3870.0],
    [6545.0, 5170.0],
];
const PUBLISHED_EPSILON: [f64; 6] = [0.0, 0.0, 0.0, 1000.0, 2000.0, 3000.0];

fn published_grid() -> LambdaGrid {
    LambdaGrid::new(0.0, 5000.0, 1000.0).unwrap()
}

fn specs_at(gamma: f64) -> Vec<WeightingSpec> {
    let mut v = Vec::new();
    for mode in [
        WeightingMode::Identity,
        WeightingMode::Direct,
        WeightingMode::Cumulative,
    ] {
        for locus in [WeightingLocus::ReducedLottery, WeightingLocus::PerNode] {
            v.push(WeightingSpec::new(gamma, mode, locus).unwrap());
        }
    }
    v
}

/// The 100 trees shared by A1 and A7.
fn a1_trees() -> Vec<DecisionTree> {
    let mut rng = common::rng(0xA1);
    (0..100)
        .map(|_| {
            let n = rng.random_range(2..=4);
            let depth = rng.random_range(1..=4);
            common::aligned_tree(&mut rng, n, depth)
        })
        .collect()
}

fn a1_lambdas() -> Vec<f64> {
    (0..=10).map(|k| 500.0 * k as f64).collect()
}

fn a1() -> Check {
    let start = Instant::now();
    let trees = a1_trees();
    let specs = specs_at(1.0);
    let ev = WeightingSpec::expected_value();
    let mut worst: f64 = 0.0;
    for (t, tree) in trees.iter().enumerate() {
        let eval = ok(Evaluator::new(tree, StateCoupling::Aligned))?;
        for &l in &a1_lambdas() {
            let base = ok(eval.choose(&ev, l))?;
            let evpi = ok(eval.evpi(l))?;
            for spec in &specs {
                let rd = ok(eval.choose(spec, l))?;
                for (a, b) in base.valuations.iter().zip(&rd.valuations) {
                    let d = (a.value - b.value).abs();
                    worst = worst.max(d);
                    ensure!(
                        d <= 1e-9,
                        "tree {t} lambda {l} {}/{}: EV {} vs RD {}",
                        spec.mode(),
                        spec.locus(),
                        a.value,
                        b.value
                    );
                }
                let rdvpi = ok(eval.rdvpi(spec, l))?;
                let d = (rdvpi - evpi).abs();
                worst = worst.max(d);
                ensure!(
                    d <= 1e-9,
                    "tree {t} lambda {l}: RDVPI {rdvpi} vs EVPI {evpi}"
                );
            }
        }
    }
    let elapsed = within_time(start, Duration::from_secs(5))?;
    Ok(format!(
        "100 trees x 11 thresholds x 6 mode/locus, max diff {worst:.1e}, {elapsed:.2?}"
    ))
}

fn a2() -> Check {
    let start = Instant::now();
    let mut rng = common::rng(0xA2);
    let mut worst: f64 = 0.0;
    let mut strategies = 0;
    for t in 0..500 {
        let n = rng.random_range(1..=3);
        let depth = rng.random_range(0..=6);
        let tree = common::random_tree(&mut rng, n, depth);
        let lambda = rng.random_range(0.0..5000.0);
        for s in &tree.strategies {
            let lottery = ok(reduce_strategy(&tree, &s.name))?;
            let reduced: f64 = lottery
                .states
                .iter()
                .map(|st| st.probability * net_benefit(st.effect, st.cost, lambda))
                .sum();
            let enumerated = ok(enumerate_paths_value(&tree, &s.name, lambda))?;
            let d = (reduced - enumerated).abs();
            worst = worst.max(d);
            ensure!(
                d <= 1e-12,
                "tree {t} `{}`: reduced {reduced} vs enumerated {enumerated}",
                s.name
            );
            strategies += 1;
        }
    }
    let elapsed = within_time(start, Duration::from_secs(5))?;
    Ok(format!(
        "500 trees ({strategies} strategies), max diff {worst:.1e}, {elapsed:.2?}"
    ))
}

fn a3() -> Check {
    let mut rng = common::rng(0xA3);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let n = rng.random_range(1..=8);
        let branches = common::probabilities(&mut rng, n)
            .into_iter()
            .map(|p| Branch::new(p, common::outcome(&mut rng)))
            .collect();
        let lottery = Strategy::new("x", ChanceNode::new(branches)).reduce();
        let lambda = rng.random_range(0.0..5000.0);
        for gamma in [0.25, 0.5, 0.75, 1.0] {
            let spec = ok(WeightingSpec::cumulative(gamma))?;
            let sum: f64 = ok(decision_weights(&lottery, &spec, lambda))?.iter().sum();
            worst = worst.max((sum - 1.0).abs());
            ensure!(
                (sum - 1.0).abs() <= 1e-12,
                "lottery {i} gamma {gamma}: sum {sum}"
            );
        }
    }

    let tree = ok(drummond_rd())?;
    let direct = ok(WeightingSpec::new(
        fixtures::GAMMA,
        WeightingMode::Direct,
        WeightingLocus::ReducedLottery,
    ))?;
    let mut sums = Vec::new();
    for s in &tree.strategies {
        let sum: f64 = ok(decision_weights(&s.reduce(), &direct, 1000.0))?
            .iter()
            .sum();
        ensure!(
            (sum - 1.0).abs() > 1e-3,
            "direct weights of `{}` sum to {sum}",
            s.name
        );
        sums.push(format!("{}={sum:.4}", s.name));
    }
    Ok(format!(
        "cumulative sums max |sum-1| {worst:.1e}; direct sums {}",
        sums.join(" ")
    ))
}

/// Agreement to `digits` significant digits.
fn significant(a: f64, b: f64, digits: i32) -> bool {
    let scale = 10f64.powi(b.abs().log10().floor() as i32 - digits + 1);
    (a - b).abs() <= 0.5 * scale
}

fn a4() -> Check {
    let start = Instant::now();
    let tree = ok(drummond_rd())?;
    let spec = ok(WeightingSpec::cumulative(fixtures::GAMMA))?;
    let eval = ok(Evaluator::new(&tree, StateCoupling::Auto))?;

    let at = ok(eval.choose(&spec, 1000.0))?;
    for (v, published) in at
        .valuations
        .iter()
        .zip([fixtures::SURGICAL_WEIGHTS, fixtures::MEDICAL_WEIGHTS])
    {
        for ((label, w), p) in v.weights_used.iter().zip(published) {
            ensure!(
                significant(*w, p, 8),
                "`{}` weight {label} = {w}, published {p}",
                v.strategy_name
            );
        }
    }
    ensure!(
        (at.valuations[0].value - 9203.495).abs() <= 0.01,
        "Surgical value {}",
        at.valuations[0].value
    );
    ensure!(
        (at.valuations[1].value - 9281.96).abs() <= 0.01,
        "Medical value {}",
        at.valuations[1].value
    );

    let curve = ok(eval.sweep(&spec, &published_grid()))?;
    for (k, row) in curve.rows.iter().enumerate() {
        ensure!(
            row.lambda == GRID_LAMBDAS[k],
            "grid point {k} is {}",
            row.lambda
        );
        for j in 0..2 {
            ensure!(
                (row.rd_values[j] - PUBLISHED_RD[k][j]).abs() <= 0.01,
                "lambda {}: {} RD {} vs {}",
                row.lambda,
                curve.strategy_names[j],
                row.rd_values[j],
                PUBLISHED_RD[k][j]
            );
        }
        ensure!(
            curve.strategy_names[row.choice_rd] == PUBLISHED_RD_CHOICE[k],
            "lambda {}: RD choice {}",
            row.lambda,
            curve.strategy_names[row.choice_rd]
        );
    }
    let elapsed = within_time(start, Duration::from_secs(1))?;
    Ok(format!(
        "weights to 8 digits, values {:.3}/{:.3} at 1000, 6 rows within 0.01, {elapsed:.2?}",
        at.valuations[0].value, at.valuations[1].value
    ))
}

fn a5() -> Check {
    let tree = drummond_ev();
    let curve = ok(sweep(
        &tree,
        &ok(WeightingSpec::cumulative(fixtures::GAMMA))?,
        &published_grid(),
        StateCoupling::Auto,
    ))?;
    for (k, row) in curve.rows.iter().enumerate() {
        for j in 0..2 {
            ensure!(
                (row.ev_values[j] - PUBLISHED_EV[k][j]).abs() <= 1e-9,
                "lambda {}: {} EV {} vs {}",
                row.lambda,
                curve.strategy_names[j],
                row.ev_values[j],
                PUBLISHED_EV[k][j]
            );
        }
        ensure!(
            curve.strategy_names[row.choice_ev] == "Surgical",
            "lambda {}: EV choice {}",
            row.lambda,
            curve.strategy_names[row.choice_ev]
        );
    }

    // the rank-dependent fixture cannot also carry the expected-value lines
    let rd = ok(drummond_rd())?;
    let rd_curve = ok(sweep(
        &rd,
        &WeightingSpec::expected_value(),
        &published_grid(),
        StateCoupling::Auto,
    ))?;
    let gap = (rd_curve.rows[1].ev_values[0] - PUBLISHED_EV[1][0]).abs();
    ensure!(
        gap > 1.0,
        "rank-dependent fixture unexpectedly matches the EV rows"
    );
    let readme = std::fs::read_to_string(repo_root().join("README.md")).unwrap_or_default();
    ensure!(
        readme.contains("## Known discrepancy"),
        "README.md lacks the `Known discrepancy` note"
    );
    Ok(format!(
        "6 EV rows exact, choice_ev Surgical throughout; single-fixture gap {gap:.1} documented"
    ))
}

fn a6() -> Check {
    let tree = ok(drummond_rd())?;
    let spec = ok(WeightingSpec::cumulative(fixtures::GAMMA))?;
    let h = ok(harmonize(&tree, &spec, 0.0, 5000.0, StateCoupling::Auto))?;
    let rd = h.lambda_hat_rd.ok_or("no weighted switch point")?;
    ensure!(
        rd > 1000.0 && rd < 2000.0,
        "weighted switch {rd} outside (1000, 2000)"
    );
    ensure!(
        (rd - 1685.13).abs() <= 0.5,
        "weighted switch {rd} not within 0.5 of 1685.13"
    );

    let ev_tree = drummond_ev();
    let ev = ok(rdtree_core::find_switch_point(
        &ev_tree,
        &WeightingSpec::expected_value(),
        0.0,
        5000.0,
    ))?;
    let crossing = match ev.outcome {
        rdtree_core::SwitchOutcome::Dominant {
            extrapolated_crossing: Some(x),
        } => x,
        other => return Err(format!("expected-value search reported {other:?}")),
    };
    ensure!(
        (crossing + 500.0).abs() <= 1e-6,
        "extrapolated crossing {crossing}"
    );

    let curve = ok(sweep(&tree, &spec, &published_grid(), StateCoupling::Auto))?;
    let eps = table2_epsilon_column(&curve);
    ensure!(
        eps.values == PUBLISHED_EPSILON,
        "epsilon column {:?}",
        eps.values
    );
    Ok(format!(
        "weighted switch {rd:.4}, EV dominant (crossing {crossing}), epsilon column {:?}",
        eps.values
    ))
}

fn a7() -> Check {
    let mut min_evpi = f64::INFINITY;
    let mut triples = 0;
    let ev = WeightingSpec::expected_value();
    for (t, tree) in a1_trees().iter().enumerate() {
        let eval = ok(Evaluator::new(tree, StateCoupling::Aligned))?;
        let rows = a1_lambdas()
            .into_iter()
            .map(|l| eval.row(&ev, l))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        for r in &rows {
            min_evpi = min_evpi.min(r.evpi);
            ensure!(
                r.evpi >= -1e-9,
                "tree {t} lambda {}: EVPI {}",
                r.lambda,
                r.evpi
            );
        }
        for w in rows.windows(3) {
            if w[0].choice_ev != w[1].choice_ev || w[1].choice_ev != w[2].choice_ev {
                continue;
            }
            let j = w[0].choice_ev;
            let (a, b, c) = (w[0].ev_values[j], w[1].ev_values[j], w[2].ev_values[j]);
            let mid = 0.5 * (a + c);
            ensure!(
                (b - mid).abs() <= 1e-9 * b.abs().max(mid.abs()).max(1.0),
                "tree {t} at {}: {b} vs interpolated {mid}",
                w[1].lambda
            );
            triples += 1;
        }
    }
    Ok(format!(
        "min EVPI {min_evpi:.3e}, {triples} collinear triples"
    ))
}

fn run_cli(args: &[&str], env: Env) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["rdtree"];
    argv.extend_from_slice(args);
    let code = run(argv, &env, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn a8() -> Check {
    let low = ok(scan_monotonicity(0.25, 1e-4))?;
    ensure!(
        !low.violations.is_empty(),
        "no violation found at gamma 0.25"
    );
    for gamma in [0.61, 1.0] {
        let r = ok(scan_monotonicity(gamma, 1e-4))?;
        ensure!(
            r.violations.is_empty(),
            "{} violations at gamma {gamma}",
            r.violations.len()
        );
    }

    let model = fixture("drummond_rd.rdt");
    let model = model.to_str().unwrap();
    let args = [
        "sweep",
        model,
        "--lambda-min",
        "0",
        "--lambda-max",
        "5000",
        "--step",
        "1000",
        "--gamma",
        "0.25",
    ];
    let (code, out, err) = run_cli(&args, Env { no_warn: false });
    ensure!(code == 0, "sweep exited {code}: {err}");
    ensure!(err.starts_with("warning:"), "no warning on stderr: {err:?}");
    ensure!(!out.contains("warning"), "warning leaked into the CSV");
    let (code, _, err) = run_cli(&args, Env { no_warn: true });
    ensure!(
        code == 0 && err.is_empty(),
        "warning not suppressed: {err:?}"
    );
    let (_, _, err) = run_cli(&args[..8], Env { no_warn: false });
    ensure!(err.is_empty(), "warning at gamma 1: {err:?}");
    Ok(format!(
        "{} violations at gamma 0.25, none at 0.61 and 1; CLI warning emitted and suppressed",
        low.violations.len()
    ))
}

fn label_nodes(node: &mut Node, next: &mut usize) {
    match node {
        Node::Outcome(o) => {
            if next.is_multiple_of(3) {
                o.label = Some(format!("out \"{next}\" \\ é"));
            }
            *next += 1;
        }
        Node::Chance(c) => {
            for b in &mut c.branches {
                if next.is_multiple_of(2) {
                    b.label = Some(format!("b{next}"));
                }
                *next += 1;
                label_nodes(&mut b.child, next);
            }
        }
    }
}

/// (file, line, column, message fragment) of the first error.
const BROKEN: [(&str, usize, usize, &str); 10] = [
    ("missing_arrow.rdt", 4, 18, "unexpected `outcome`"),
    ("unclosed_model_name.rdt", 2, 13, "unexpected `a`"),
    (
        "unterminated_string.rdt",
        2,
        12,
        "unterminated string literal",
    ),
    (
        "probability_out_of_range.rdt",
        4,
        16,
        "probability literal out of range: 1.5",
    ),
    ("missing_effect.rdt", 3, 24, "unexpected `}`"),
    (
        "duplicate_strategy.rdt",
        3,
        12,
        "duplicate strategy name `a`",
    ),
    ("missing_exponent.rdt", 3, 20, "missing exponent digits"),
    ("stray_semicolon.rdt", 3, 21, "unexpected character `;`"),
    ("unclosed_model.rdt", 3, 1, "unexpected end of input"),
    ("empty_chance.rdt", 4, 5, "unexpected `}`"),
];

fn a9() -> Check {
    let rd = ok(drummond_rd())?;
    for (name, built) in [("drummond_rd.rdt", rd), ("drummond_ev.rdt", drummond_ev())] {
        let text = ok(std::fs::read_to_string(fixture(name)))?;
        let parsed = parse_model(&text).map_err(|e| format!("{name}: {e:?}"))?;
        ensure!(parsed == built, "{name} differs from its construction");
        let again = parse_model(&serialize_model(&parsed)).map_err(|e| format!("{e:?}"))?;
        ensure!(again == parsed, "{name} does not round-trip");
        ensure!(
            serialize_model(&parsed) == text,
            "{name} is not in canonical form"
        );
    }

    let mut rng = common::rng(0xA9);
    for i in 0..100 {
        let n = rng.random_range(1..=4);
        let depth = rng.random_range(0..=4);
        let mut tree = common::random_tree(&mut rng, n, depth);
        tree.name = format!("generated \"{i}\"");
        if i % 2 == 0 {
            tree.effect_units = Some("QALY".into());
            tree.currency = Some("EUR".into());
        }
        let mut next = 0;
        for s in &mut tree.strategies {
            label_nodes(&mut s.root, &mut next);
        }
        let first = parse_model(&serialize_model(&tree)).map_err(|e| format!("tree {i}: {e:?}"))?;
        ensure!(first == tree, "tree {i} changed on round trip");
        let second = parse_model(&serialize_model(&first)).map_err(|e| format!("{e:?}"))?;
        ensure!(second == first, "tree {i} is not a fixed point");
    }

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/broken");
    for (file, line, column, fragment) in BROKEN {
        let text = ok(std::fs::read_to_string(dir.join(file)))?;
        let errors = match parse_model(&text) {
            Ok(_) => return Err(format!("{file} parsed")),
            Err(e) => e,
        };
        let e = &errors[0];
        ensure!(
            (e.line, e.column) == (line, column) && e.message.contains(fragment),
            "{file}: got {e}, expected {line}:{column} {fragment}"
        );
    }
    Ok("fixtures and 100 generated trees round-trip; 10 broken files located".into())
}

fn a10() -> Check {
    let tree = ok(drummond_rd())?;
    let spec = ok(WeightingSpec::cumulative(fixtures::GAMMA))?;
    let grid = ok(LambdaGrid::new(0.0, 5000.0, 10.0))?;
    let eval = ok(Evaluator::new(&tree, StateCoupling::Auto))?;
    let first = render_sweep_csv(&ok(eval.sweep(&spec, &grid))?);
    let second = render_sweep_csv(&ok(eval.sweep(&spec, &grid))?);
    ensure!(first == second, "repeated sweeps differ");
    for jobs in [2, 3, 8] {
        let par = render_sweep_csv(&ok(sweep_concurrent(&eval, &spec, &grid, jobs))?);
        ensure!(
            par == first,
            "{jobs}-thread sweep differs from the sequential one"
        );
    }

    let dir = ok(tempfile::tempdir())?;
    let model = fixture("drummond_rd.rdt");
    let mut outputs = Vec::new();
    for (i, jobs) in ["1", "1", "4"].iter().enumerate() {
        let path = dir.path().join(format!("run{i}.csv"));
        let args = [
            "sweep",
            model.to_str().unwrap(),
            "--lambda-min",
            "0",
            "--lambda-max",
            "5000",
            "--step",
            "10",
            "--gamma",
            "0.25",
            "--jobs",
            jobs,
            "--out",
            path.to_str().unwrap(),
        ];
        let (code, _, err) = run_cli(&args, Env { no_warn: true });
        ensure!(code == 0, "CLI sweep exited {code}: {err}");
        outputs.push(ok(std::fs::read(&path))?);
    }
    ensure!(outputs[0] == outputs[1], "CLI runs differ");
    ensure!(outputs[0] == outputs[2], "CLI concurrent run differs");
    ensure!(
        outputs[0] == first.as_bytes(),
        "CLI output differs from the library"
    );
    Ok(format!(
        "{} rows byte-identical across runs and 1-8 threads",
        grid.points().len()
    ))
}

/// Seeded search for one instance of each scenario label.
fn scenarios() -> Check {
    let wanted = [Scenario::A, Scenario::B, Scenario::COrD, Scenario::Aligned];
    let mut found: Vec<Option<u64>> = vec![None; wanted.len()];
    let (lo, hi) = (0.0, 5000.0);
    for seed in 0..2000u64 {
        let mut rng = common::rng(seed);
        let states = rng.random_range(2..=4);
        let p = common::probabilities(&mut rng, states);
        let arm = |rng: &mut rand_chacha::ChaCha8Rng, name: &str| {
            let branches = p
                .iter()
                .map(|&p| {
                    Branch::new(
                        p,
                        OutcomeNode::new(rng.random_range(0.0..5000.0), rng.random_range(0.0..2.0)),
                    )
                })
                .collect();
            Strategy::new(name, ChanceNode::new(branches))
        };
        let tree = DecisionTree::new("scenario", vec![arm(&mut rng, "A"), arm(&mut rng, "B")]);
        let gamma = [0.3, 0.5, 0.7][rng.random_range(0..3)];
        let spec = ok(WeightingSpec::cumulative(gamma))?;
        let h = ok(harmonize(&tree, &spec, lo, hi, StateCoupling::Aligned))?;
        let Some(k) = wanted.iter().position(|&s| s == h.scenario) else {
            continue;
        };
        if found[k].is_some() {
            continue;
        }
        verify_scenario(&tree, &spec, &h, lo, hi).map_err(|e| format!("seed {seed}: {e}"))?;
        found[k] = Some(seed);
        if found.iter().all(Option::is_some) {
            break;
        }
    }
    let mut parts = Vec::new();
    for (s, f) in wanted.iter().zip(&found) {
        ensure!(f.is_some(), "no instance of `{}` in 2000 seeds", s.as_str());
        parts.push(format!("{}@{}", s.as_str(), f.unwrap()));
    }
    Ok(format!("labels found and verified: {}", parts.join(" ")))
}

/// Checks a label against a direct dense-grid reading of the two rules.
fn verify_scenario(
    tree: &DecisionTree,
    spec: &WeightingSpec,
    h: &rdtree_core::HarmonizationResult,
    lo: f64,
    hi: f64,
) -> Result<(), String> {
    let grid = ok(LambdaGrid::new(lo, hi, (hi - lo) / 1000.0))?;
    let curve = ok(sweep(tree, spec, &grid, StateCoupling::Aligned))?;
    let first = |rows: &[rdtree_core::VoiRow], rd: bool| {
        let pick = |r: &rdtree_core::VoiRow| if rd { r.choice_rd } else { r.choice_ev };
        let start = pick(&rows[0]);
        rows.iter().find(|r| pick(r) != start).map(|r| r.lambda)
    };
    let ev_switch = first(&curve.rows, false);
    let rd_switch = first(&curve.rows, true);
    let step = (hi - lo) / 1000.0;
    match h.scenario {
        Scenario::Aligned => {
            let same = curve.rows.iter().all(|r| r.choice_ev == r.choice_rd);
            ensure!(same, "aligned, but the choices differ on the grid");
        }
        Scenario::COrD => {
            let rd = h
                .lambda_hat_rd
                .ok_or("c_or_d without a weighted threshold")?;
            ensure!(
                rd < h.lambda_hat_ev,
                "c_or_d but {rd} >= {}",
                h.lambda_hat_ev
            );
            let ev_at = ev_switch.ok_or("c_or_d but the risk-neutral choice never changes")?;
            match rd_switch {
                Some(g) => ensure!(g < ev_at, "grid switches {g} and {ev_at} out of order"),
                // already at the risk-neutral end choice from the start
                None => {
                    let last = curve.rows.last().unwrap();
                    ensure!(
                        curve.rows[0].choice_rd == last.choice_ev,
                        "weighted choice never matches the risk-neutral end choice"
                    );
                }
            }
        }
        Scenario::A | Scenario::B => {
            let rd = h.lambda_hat_rd.ok_or("no weighted threshold")?;
            ensure!(
                rd > h.lambda_hat_ev,
                "weighted switch {rd} not above {}",
                h.lambda_hat_ev
            );
            if let Some(g) = rd_switch {
                ensure!((g - rd).abs() <= step, "grid switch {g} vs {rd}");
            }
            let above = curve.rows.iter().all(|r| r.rdvpi >= r.evpi - 1e-9);
            let below = curve.rows.iter().all(|r| r.rdvpi < r.evpi);
            ensure!(
                if h.scenario == Scenario::A {
                    above
                } else {
                    below
                },
                "information curves do not match `{}`",
                h.scenario.as_str()
            );
        }
        Scenario::Indeterminate => {}
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, &str, fn() -> Check); 11] = [
        ("A1", "gamma=1 collapse", a1),
        ("A2", "reduction oracle", a2),
        ("A3", "weight algebra", a3),
        ("A4", "rank-dependent table reproduction", a4),
        ("A5", "expected-value table reproduction", a5),
        ("A6", "switch points", a6),
        ("A7", "EVPI non-negativity and linearity", a7),
        ("A8", "non-monotonicity guard", a8),
        ("A9", "DSL round trip and error positions", a9),
        ("A10", "determinism", a10),
        ("S", "scenario labels by seeded search", scenarios),
    ];
    let mut failures = 0;
    for (id, title, f) in criteria {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("{id:<4} PASS  {title}: {detail}"),
            Err(why) => {
                failures += 1;
                println!("{id:<4} FAIL  {title}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
