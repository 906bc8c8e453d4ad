//! The `rdtree` command line.
//!
//! Exit codes: 0 success, 1 invalid model or evaluation failure, 2 parse
//! failure or unreadable file, 3 usage error. Every error line on stderr
//! starts with `error:`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rdtree_core::oracle::cross_check;
use rdtree_core::valuation::NON_MONOTONE_GAMMA;
use rdtree_core::voi::SwitchOutcome;
use rdtree_core::{
    classify_scenario, harmonize, validate_tree, DecisionTree, Error, Evaluator, LambdaGrid,
    StateCoupling, SwitchPoint, WeightingLocus, WeightingMode, WeightingSpec,
};

use crate::csv::{number, render_sweep_csv, render_voi_csv};
use crate::io::{load_model, LoadError};
use crate::parallel::sweep_concurrent;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MODEL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Process environment that affects output.
#[derive(Debug, Clone, Copy, Default)]
pub struct Env {
    /// Suppress the non-monotone weighting warning.
    pub no_warn: bool,
}

#[derive(Parser, Debug)]
#[command(
    name = "rdtree",
    version,
    about = "Rank-dependent valuation of decision trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a model.
    Validate { file: PathBuf },
    /// Value every strategy at one threshold.
    Evaluate {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[command(flatten)]
        weighting: WeightingArgs,
        /// Run the oracle cross-checks as well.
        #[arg(long)]
        check: bool,
    },
    /// Tabulate values, choices and VOI over a threshold grid (CSV).
    Sweep {
        file: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        weighting: WeightingArgs,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// EVPI and RDVPI over a threshold grid (CSV).
    Voi {
        file: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        weighting: WeightingArgs,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Switch points, compensating threshold and payment.
    Harmonize {
        file: PathBuf,
        #[command(flatten)]
        interval: IntervalArgs,
        #[command(flatten)]
        weighting: WeightingArgs,
    },
    /// Label the relation between the two decision rules on a grid.
    Classify {
        file: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        weighting: WeightingArgs,
    },
}

#[derive(Args, Debug)]
struct WeightingArgs {
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value = "cumulative")]
    mode: WeightingMode,
    #[arg(long, default_value = "reduced")]
    locus: WeightingLocus,
    #[arg(long, default_value = "auto")]
    coupling: StateCoupling,
}

#[derive(Args, Debug)]
struct IntervalArgs {
    #[arg(long, allow_negative_numbers = true)]
    lambda_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    lambda_max: f64,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[command(flatten)]
    interval: IntervalArgs,
    #[arg(long)]
    step: f64,
}

/// A failure with its exit code. `lines` are printed after `error: `.
struct Failure {
    code: i32,
    lines: Vec<String>,
}

impl Failure {
    fn new(code: i32, msg: impl Into<String>) -> Self {
        Failure {
            code,
            lines: vec![msg.into()],
        }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, msg)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidTree(report) => Failure {
                code: EXIT_MODEL,
                lines: report
                    .violations
                    .iter()
                    .map(|v| format!("invalid model: {v}"))
                    .collect(),
            },
            Error::Domain { .. } | Error::InvalidInterval { .. } | Error::InvalidGrid(_) => {
                Failure::usage(e.to_string())
            }
            other => Failure::new(EXIT_MODEL, other.to_string()),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { .. } => Failure::new(EXIT_PARSE, e.to_string()),
            LoadError::Parse { path, errors } => Failure {
                code: EXIT_PARSE,
                lines: errors
                    .iter()
                    .map(|err| format!("{}:{err}", path.display()))
                    .collect(),
            },
        }
    }
}

type Outcome = Result<(), Failure>;

/// Runs the command line with `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, env: &Env, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    // clap already prefixes its message with "error:"
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, env, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            for line in &f.lines {
                let _ = writeln!(err, "error: {line}");
            }
            f.code
        }
    }
}

fn dispatch(command: Command, env: &Env, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { file } => validate(&file, out),
        Command::Evaluate {
            file,
            lambda,
            weighting,
            check,
        } => {
            if !lambda.is_finite() {
                return Err(Failure::usage(format!(
                    "--lambda must be finite (got {lambda})"
                )));
            }
            let (spec, coupling) = weighting.resolve(env, err)?;
            let tree = load_valid(&file)?;
            evaluate(&tree, &spec, coupling, lambda, check, out)
        }
        Command::Sweep {
            file,
            grid,
            weighting,
            jobs,
            out: path,
        } => {
            let (spec, coupling) = weighting.resolve(env, err)?;
            let grid = grid.resolve()?;
            let tree = load_valid(&file)?;
            let eval = Evaluator::new(&tree, coupling)?;
            let curve = sweep_concurrent(&eval, &spec, &grid, jobs)?;
            emit(
                &render_sweep_csv(&curve),
                path.as_deref(),
                curve.rows.len(),
                out,
            )
        }
        Command::Voi {
            file,
            grid,
            weighting,
            jobs,
            out: path,
        } => {
            let (spec, coupling) = weighting.resolve(env, err)?;
            let grid = grid.resolve()?;
            let tree = load_valid(&file)?;
            let eval = Evaluator::new(&tree, coupling)?;
            let curve = sweep_concurrent(&eval, &spec, &grid, jobs)?;
            emit(
                &render_voi_csv(&curve),
                path.as_deref(),
                curve.rows.len(),
                out,
            )
        }
        Command::Harmonize {
            file,
            interval,
            weighting,
        } => {
            let (spec, coupling) = weighting.resolve(env, err)?;
            let (lo, hi) = interval.resolve()?;
            let tree = load_valid(&file)?;
            let h = harmonize(&tree, &spec, lo, hi, coupling)?;
            let names = tree.strategy_names();
            let mut s = String::new();
            s += &format!("model: {}\n", tree.name);
            s += &format!("interval: [{}, {}]\n", number(lo), number(hi));
            s += &format!("weighting: {}\n", describe(&spec));
            s += &format!("switch_ev: {}\n", describe_switch(&h.switch_ev, &names));
            s += &format!("switch_rd: {}\n", describe_switch(&h.switch_rd, &names));
            s += &format!("lambda_hat_ev: {}", number(h.lambda_hat_ev));
            if let Some(x) = h.ev_extrapolated_crossing.filter(|_| h.ev_dominant) {
                s += &format!(" (dominant; lines cross at {})", number(x));
            }
            s += "\n";
            s += &format!("lambda_hat_rd: {}\n", opt(h.lambda_hat_rd));
            s += &format!("epsilon: {}\n", opt(h.epsilon));
            s += &format!("adopted_strategy: {}\n", h.adopted_strategy);
            s += &format!("payment: {}\n", opt(h.payment));
            s += &format!("scenario: {}\n", h.scenario.as_str());
            write_out(out, &s)
        }
        Command::Classify {
            file,
            grid,
            weighting,
        } => {
            let (spec, coupling) = weighting.resolve(env, err)?;
            let grid = grid.resolve()?;
            let tree = load_valid(&file)?;
            let eval = Evaluator::new(&tree, coupling)?;
            let curve = eval.sweep(&spec, &grid)?;
            let ev = eval.find_switch_point(&WeightingSpec::expected_value(), grid.min, grid.max);
            let rd = eval.find_switch_point(&spec, grid.min, grid.max);
            let names = tree.strategy_names();
            let (ev, rd) = match (ev, rd) {
                (Ok(ev), Ok(rd)) => (ev, rd),
                // a single-point grid has no interval to search
                (Err(Error::InvalidInterval { .. }), _)
                | (_, Err(Error::InvalidInterval { .. })) => {
                    let at = eval.choose(&WeightingSpec::expected_value(), grid.min)?;
                    let rd_at = eval.choose(&spec, grid.min)?;
                    let still = |i, tie| SwitchPoint {
                        initial: i,
                        outcome: SwitchOutcome::Dominant {
                            extrapolated_crossing: None,
                        },
                        tie,
                    };
                    (still(at.index, at.tie), still(rd_at.index, rd_at.tie))
                }
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            };
            let scenario = classify_scenario(&curve, &ev, &rd);
            let s = format!(
                "switch_ev: {}\nswitch_rd: {}\nscenario: {}\n",
                describe_switch(&ev, &names),
                describe_switch(&rd, &names),
                scenario.as_str()
            );
            write_out(out, &s)
        }
    }
}

impl WeightingArgs {
    fn resolve(
        &self,
        env: &Env,
        err: &mut dyn Write,
    ) -> Result<(WeightingSpec, StateCoupling), Failure> {
        let spec = WeightingSpec::new(self.gamma, self.mode, self.locus)?;
        if spec.non_monotone() && !env.no_warn {
            let _ = writeln!(
                err,
                "warning: gamma {} is below {NON_MONOTONE_GAMMA}; the weighting function is not monotone in p",
                self.gamma
            );
        }
        Ok((spec, self.coupling))
    }
}

impl IntervalArgs {
    fn resolve(&self) -> Result<(f64, f64), Failure> {
        let (lo, hi) = (self.lambda_min, self.lambda_max);
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Failure::usage(format!(
                "--lambda-min must be below --lambda-max (got {lo} and {hi})"
            )));
        }
        Ok((lo, hi))
    }
}

impl GridArgs {
    fn resolve(&self) -> Result<LambdaGrid, Failure> {
        let (lo, hi) = (self.interval.lambda_min, self.interval.lambda_max);
        Ok(LambdaGrid::new(lo, hi, self.step)?)
    }
}

fn load_valid(path: &Path) -> Result<DecisionTree, Failure> {
    let tree = load_model(path)?;
    tree.check()?;
    Ok(tree)
}

fn validate(path: &Path, out: &mut dyn Write) -> Outcome {
    let tree = load_model(path)?;
    let report = validate_tree(&tree);
    if !report.is_valid() {
        return Err(Error::InvalidTree(report).into());
    }
    let states: usize = tree
        .strategies
        .iter()
        .map(|s| s.reduce().states.len())
        .sum();
    write_out(
        out,
        &format!(
            "ok: model \"{}\": {} strategies, {} outcome states\n",
            tree.name,
            tree.strategies.len(),
            states
        ),
    )
}

fn evaluate(
    tree: &DecisionTree,
    spec: &WeightingSpec,
    coupling: StateCoupling,
    lambda: f64,
    check: bool,
    out: &mut dyn Write,
) -> Outcome {
    let ev_spec = WeightingSpec::expected_value();
    // the joint state space is optional here; without it VOI is not reported
    let eval = Evaluator::new(tree, coupling);
    let (ev, rd) = match &eval {
        Ok(e) => (e.choose(&ev_spec, lambda)?, e.choose(spec, lambda)?),
        Err(Error::StateSpaceMismatch(_)) => {
            let e = Evaluator::new(tree, StateCoupling::Independent)?;
            (e.choose(&ev_spec, lambda)?, e.choose(spec, lambda)?)
        }
        Err(e) => return Err(e.clone().into()),
    };

    let mut s = String::new();
    s += &format!("model: {}\n", tree.name);
    s += &format!("lambda: {}\n", number(lambda));
    s += &format!("weighting: {}\n\n", describe(spec));
    let width = tree
        .strategies
        .iter()
        .map(|t| t.name.len())
        .max()
        .unwrap_or(0)
        .max(8);
    s += &format!(
        "{:<width$}  {:>18}  {:>18}\n",
        "strategy", "expected_value", "weighted_value"
    );
    for (a, b) in ev.valuations.iter().zip(&rd.valuations) {
        s += &format!(
            "{:<width$}  {:>18}  {:>18}\n",
            a.strategy_name,
            number(a.value),
            number(b.value)
        );
    }
    s += "\n";
    s += &format!("choice_ev: {}{}\n", ev.strategy_name, tie(ev.tie));
    s += &format!("choice_rd: {}{}\n", rd.strategy_name, tie(rd.tie));
    match &eval {
        Ok(e) => {
            s += &format!("evpi: {}\n", number(e.evpi(lambda)?));
            s += &format!("rdvpi: {}\n", number(e.rdvpi(spec, lambda)?));
            s += &format!("coupling: {}\n", e.state_space().coupling.as_str());
        }
        Err(e) => s += &format!("evpi: n/a ({e})\nrdvpi: n/a\n"),
    }
    s += "\ndecision weights:\n";
    for v in &rd.valuations {
        let ws: Vec<String> = v
            .weights_used
            .iter()
            .map(|(label, w)| {
                // a bare outcome reduces to one unlabelled state
                let label = if label.is_empty() { "outcome" } else { label };
                format!("{label}={w:.8}")
            })
            .collect();
        s += &format!("  {}: ", v.strategy_name);
        if ws.is_empty() {
            s += "no chance nodes\n";
        } else if spec.locus() == WeightingLocus::PerNode {
            // per-node weights are per branch application; their sum means nothing
            s += &format!("{}\n", ws.join(" "));
        } else {
            s += &format!("{} (sum {:.8})\n", ws.join(" "), v.weight_sum());
        }
    }

    let mut failed = 0;
    if check {
        let checks = cross_check(tree, spec, lambda)?;
        s += "\noracle checks:\n";
        for c in &checks {
            let tag = if c.passed { "pass" } else { "FAIL" };
            s += &format!("  {tag}  {} ({})\n", c.name, c.detail);
        }
        failed = checks.iter().filter(|c| !c.passed).count();
        s += &format!(
            "oracle checks: {}/{} passed\n",
            checks.len() - failed,
            checks.len()
        );
    }
    write_out(out, &s)?;
    if failed > 0 {
        return Err(Failure::new(
            EXIT_MODEL,
            format!("{failed} oracle check(s) failed"),
        ));
    }
    Ok(())
}

fn emit(csv: &str, path: Option<&Path>, rows: usize, out: &mut dyn Write) -> Outcome {
    match path {
        None => write_out(out, csv),
        Some(p) => {
            std::fs::write(p, csv).map_err(|e| {
                Failure::new(EXIT_MODEL, format!("cannot write {}: {e}", p.display()))
            })?;
            write_out(out, &format!("wrote {rows} rows to {}\n", p.display()))
        }
    }
}

fn write_out(out: &mut dyn Write, s: &str) -> Outcome {
    out.write_all(s.as_bytes())
        .map_err(|e| Failure::new(EXIT_MODEL, format!("cannot write output: {e}")))
}

fn describe(spec: &WeightingSpec) -> String {
    format!(
        "gamma={} mode={} locus={}",
        spec.gamma(),
        spec.mode(),
        spec.locus()
    )
}

fn describe_switch(sp: &SwitchPoint, names: &[String]) -> String {
    let from = &names[sp.initial];
    let mut s = match sp.outcome {
        SwitchOutcome::At { lambda, to } => {
            format!("{} ({from} -> {})", number(lambda), names[to])
        }
        SwitchOutcome::Dominant { .. } => format!("none ({from} throughout)"),
    };
    if sp.tie {
        s += " [tie at an endpoint]";
    }
    s
}

fn opt(v: Option<f64>) -> String {
    v.map(number).unwrap_or_else(|| "none".into())
}

fn tie(t: bool) -> &'static str {
    if t {
        " (tie)"
    } else {
        ""
    }
}
