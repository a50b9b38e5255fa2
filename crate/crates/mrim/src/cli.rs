//! Command line front end.

use std::ffi::OsString;
use std::hash::{BuildHasher, Hasher};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mrim_core::adaptive::{run_trial, AdaGreedyPolicy, AdaImmPolicy, FixedSchedulePolicy, Policy};
use mrim_core::greedy::{double_greedy_with, global_greedy_with, GreedyOptions, GreedyOutcome, MonteCarloEvaluator};
use mrim_core::mrt::{simulation_count, RoundFactor};
use mrim_core::oracle::{
    exact_rho_mrt, exact_sigma, exact_sigma_b, exhaustive_opt, Candidate, MrtOracle, Problem, SEARCH_CAP,
};
use mrim_core::ris::{mrim_imm, SelectionMode};
use mrim_core::rng::stream;
use mrim_core::saic::{imm_bim, imm_bpim, imm_pim, DelayDist, Objective, SelfActivationProfile};
use mrim_core::{NodeId, SeedSchedule, SpreadEstimate};
use rand::RngCore;
use serde::Serialize;

use crate::edgelist::{read_edge_list, LoadedGraph};
use crate::error::{Failure, Result};
use crate::parallel::{par_estimate_objective, par_estimate_rho, par_run_adaptive, ParMonteCarloEvaluator};
use crate::profile::{parse_delay, parse_profile, parse_q_case, ProfileSpec, QSource};
use crate::report::{GraphInfo, Report, Spread, TraceRecord};
use crate::schedule::{format_schedule, parse_schedule};
use crate::store_io::write_sequence_store;

/// Reports list per-node values only up to this many nodes.
const PER_NODE_LIMIT: usize = 64;
/// Warn when the automatic simulation count exceeds this.
const SIMULATION_WARN: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "mrim", version, about = "Multi-round and self-activation influence maximization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Play a schedule once and print the activations of each round.
    Simulate(SimulateArgs),
    /// Non-adaptive multi-round seed selection.
    Mrim(MrimArgs),
    /// Adaptive multi-round policies averaged over trials.
    Adaptive(AdaptiveArgs),
    /// Boosted and preemptive influence maximization with self-activation.
    Saic(SaicArgs),
    /// Estimate the spread of a given schedule or seed set.
    Eval(EvalArgs),
    /// Exact values and exhaustive optima on small graphs.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Edge list: `u v [p]` per line.
    #[arg(long)]
    pub graph: PathBuf,
    /// Set every `p(u,v)` to `1 / indeg(v)`.
    #[arg(long)]
    pub weighted_cascade: bool,
    /// Master seed; a fresh one is drawn and recorded when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write a JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Skip the console summary.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SaicOptions {
    /// Uniform self-activation probability.
    #[arg(long, conflicts_with = "q_case")]
    pub q: Option<f64>,
    /// Draw q from generator case 0..=4.
    #[arg(long)]
    pub q_case: Option<u8>,
    /// Upper end c of U[0, c] for --q-case.
    #[arg(long)]
    pub q_base: Option<f64>,
    /// Profile file (key = value); flags override it.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Self-activation delay: exp:<rate> or const:<value>.
    #[arg(long)]
    pub delay: Option<String>,
    /// Edge delay: exp:<rate> or const:<value>.
    #[arg(long)]
    pub edge_delay: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Within,
    Cross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MrimAlgo {
    Greedy,
    Imm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvaluatorKind {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoundFactorArg {
    Statement,
    T2,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Schedule file: one line of labels per round, `-` for an empty round.
    #[arg(long)]
    pub schedule: PathBuf,
}

#[derive(Args, Debug)]
pub struct MrimArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "within")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "greedy")]
    pub algo: MrimAlgo,
    #[arg(long)]
    pub rounds: usize,
    /// Seeds per round.
    #[arg(long, visible_alias = "k")]
    pub budget: usize,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub ell: f64,
    /// Simulations per greedy evaluation (default: the guarantee-driven count).
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[arg(long, value_enum, default_value = "mc")]
    pub evaluator: EvaluatorKind,
    /// Lazy (CELF) greedy evaluation.
    #[arg(long)]
    pub lazy: bool,
    /// Reuse one seed for every greedy evaluation.
    #[arg(long)]
    pub common_random_numbers: bool,
    #[arg(long, value_enum, default_value = "statement")]
    pub round_factor: RoundFactorArg,
    /// Simulations for the final spread estimate.
    #[arg(long, default_value_t = 10_000)]
    pub eval_samples: usize,
    /// Write the chosen schedule here.
    #[arg(long)]
    pub write_schedule: Option<PathBuf>,
    /// Dump the RR-sequence store here (imm only).
    #[arg(long)]
    pub dump_store: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AdaptiveArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "imm")]
    pub algo: MrimAlgo,
    #[arg(long)]
    pub rounds: usize,
    #[arg(long, visible_alias = "k")]
    pub budget: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub ell: f64,
    /// Simulations per marginal-gain estimate (greedy).
    #[arg(long, visible_alias = "mc-samples", default_value_t = 1000)]
    pub samples: usize,
    /// Keep RR samples with inactive roots across rounds (imm).
    #[arg(long)]
    pub incremental: bool,
    /// Write per-round trace records (JSON lines) here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SaicProblem {
    Bim,
    Bpim,
    Pim,
}

#[derive(Args, Debug)]
pub struct SaicArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub saic: SaicOptions,
    #[arg(long, value_enum)]
    pub problem: SaicProblem,
    #[arg(long, visible_alias = "k")]
    pub budget: usize,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub ell: f64,
    /// Worlds for the forward estimate of the returned seeds.
    #[arg(long, default_value_t = 10_000)]
    pub eval_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalObjective {
    /// Multi-round spread of `--schedule`.
    Rho,
    /// Boosted spread of `--seeds`.
    SigmaB,
    /// Preemptive credit of `--seeds` as they are.
    Preemptive,
    /// Preemptive credit of `--seeds` when boosted.
    PreemptiveB,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub saic: SaicOptions,
    #[arg(long, value_enum, default_value = "rho")]
    pub objective: EvalObjective,
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Comma separated labels.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long, visible_alias = "mc-samples", default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "mc")]
    pub evaluator: EvaluatorKind,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Exact single-round spread of a seed set.
    Sigma(OracleSeedsArgs),
    /// Exact multi-round spread of a schedule.
    Rho(OracleScheduleArgs),
    /// Exact boosted spread of a seed set.
    SigmaB(OracleSigmaBArgs),
    /// Exhaustive optimum.
    Opt(OracleOptArgs),
}

#[derive(Args, Debug)]
pub struct OracleSeedsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "")]
    pub seeds: String,
}

#[derive(Args, Debug)]
pub struct OracleScheduleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub schedule: PathBuf,
}

#[derive(Args, Debug)]
pub struct OracleSigmaBArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub saic: SaicOptions,
    #[arg(long, default_value = "")]
    pub seeds: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptProblem {
    MrimWithin,
    MrimCross,
    Bim,
    Bpim,
    Pim,
}

#[derive(Args, Debug)]
pub struct OracleOptArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub saic: SaicOptions,
    #[arg(long, value_enum)]
    pub problem: OptProblem,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    #[arg(long, visible_alias = "k")]
    pub budget: usize,
    /// Worlds per candidate for the preemptive problems (shared across candidates).
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {f}");
            f.kind.exit_code()
        }
    }
}

pub fn run(cmd: Command) -> Result<()> {
    let common = match &cmd {
        Command::Simulate(a) => &a.common,
        Command::Mrim(a) => &a.common,
        Command::Adaptive(a) => &a.common,
        Command::Saic(a) => &a.common,
        Command::Eval(a) => &a.common,
        Command::Oracle(OracleCommand::Sigma(a)) => &a.common,
        Command::Oracle(OracleCommand::Rho(a)) => &a.common,
        Command::Oracle(OracleCommand::SigmaB(a)) => &a.common,
        Command::Oracle(OracleCommand::Opt(a)) => &a.common,
    }
    .clone();
    if let Some(t) = common.threads {
        if t == 0 {
            return Err(Failure::usage("--threads must be positive"));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let start = Instant::now();
    let g = read_edge_list(&common.graph, common.weighted_cascade)?;
    let seed = common.seed.unwrap_or_else(fresh_seed);
    let ctx = Ctx {
        g: &g,
        seed,
        info: GraphInfo::of(&g, common.weighted_cascade),
    };
    let mut report = match cmd {
        Command::Simulate(a) => simulate(&ctx, &a)?,
        Command::Mrim(a) => mrim(&ctx, &a)?,
        Command::Adaptive(a) => adaptive(&ctx, &a)?,
        Command::Saic(a) => saic(&ctx, &a)?,
        Command::Eval(a) => eval(&ctx, &a)?,
        Command::Oracle(o) => oracle(&ctx, o)?,
    };
    if g.duplicates > 0 {
        report.warn(format!("{} duplicate edge records ignored", g.duplicates));
    }
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    if let Some(path) = &common.report {
        report.write(path)?;
    }
    if !common.quiet {
        print!("{}", summary(&report));
    }
    Ok(())
}

fn fresh_seed() -> u64 {
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u128(
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0),
    );
    h.finish()
}

struct Ctx<'a> {
    g: &'a LoadedGraph,
    seed: u64,
    info: GraphInfo,
}

// Fixed substreams of the master seed, one per purpose.
const STREAM_SOLVER: u64 = 0;
const STREAM_EVALUATOR: u64 = 1;
const STREAM_ESTIMATE: u64 = 2;
const STREAM_PROFILE: u64 = 3;

impl Ctx<'_> {
    fn report(&self, command: &str, algorithm: &str) -> Report {
        Report::new(command, algorithm, self.seed, self.info.clone())
    }

    fn sub_seed(&self, id: u64) -> u64 {
        stream(self.seed, id).next_u64()
    }

    fn labels(&self, nodes: &[NodeId]) -> Vec<String> {
        self.g.labels_of(nodes)
    }

    fn schedule_labels(&self, sched: &SeedSchedule) -> Vec<Vec<String>> {
        sched.rounds().iter().map(|r| self.labels(r)).collect()
    }

    fn read_schedule(&self, path: &PathBuf) -> Result<SeedSchedule> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let rounds = parse_schedule(&text, self.g).map_err(|f| Failure::input(format!("{}: {}", path.display(), f.message)))?;
        let budget = rounds.iter().map(Vec::len).max().unwrap_or(0);
        Ok(SeedSchedule::from_rounds(rounds, budget)?)
    }

    fn profile(&self, opts: &SaicOptions, report: &mut Report) -> Result<(SelfActivationProfile, DelayDist)> {
        let mut spec = match &opts.profile {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                parse_profile(&text).map_err(|f| Failure::input(format!("{}: {}", path.display(), f.message)))?
            }
            None => ProfileSpec::default(),
        };
        if let Some(q) = opts.q {
            if !(0.0..=1.0).contains(&q) {
                return Err(Failure::usage(format!("--q {q} outside [0,1]")));
            }
            spec.q = QSource::Uniform(q);
        }
        if let Some(c) = opts.q_case {
            spec.q = QSource::Case {
                case: parse_q_case(c)?,
                base: opts.q_base.unwrap_or(1.0),
            };
        } else if let (Some(b), QSource::Case { base, .. }) = (opts.q_base, &mut spec.q) {
            *base = b;
        }
        if let Some(d) = &opts.delay {
            spec.self_delay = parse_delay(d)?;
        }
        if let Some(d) = &opts.edge_delay {
            spec.edge_delay = parse_delay(d)?;
        }
        let profile = spec.materialize(self.g, &mut stream(self.seed, STREAM_PROFILE))?;
        match spec.q {
            QSource::Uniform(q) => report.param("q_uniform", q),
            QSource::Case { case, base } => report.param("q_case", case as u8).param("q_base", base),
        };
        report
            .param("self_delay", delay_text(spec.self_delay))
            .param("edge_delay", delay_text(spec.edge_delay));
        if !spec.overrides.is_empty() {
            report.param("q_overrides", &spec.overrides);
        }
        if self.g.graph.node_count() <= PER_NODE_LIMIT {
            report.set("q", &profile.q);
        }
        Ok((profile, spec.edge_delay))
    }
}

fn delay_text(d: DelayDist) -> String {
    match d {
        DelayDist::Exponential { rate } => format!("exp:{rate}"),
        DelayDist::Constant { value } => format!("const:{value}"),
    }
}

fn spread(e: SpreadEstimate) -> Spread {
    Spread::from(e)
}

fn simulate(ctx: &Ctx, a: &SimulateArgs) -> Result<Report> {
    let sched = ctx.read_schedule(&a.schedule)?;
    let mut r = ctx.report("simulate", "forward");
    r.param("schedule", ctx.schedule_labels(&sched));
    let run = run_trial(
        &ctx.g.graph,
        &mut FixedSchedulePolicy(sched.clone()),
        sched.horizon(),
        sched.budget(),
        0,
        ctx.seed,
    )?;
    r.set("rounds", trace_records(ctx, 0, &run.trace));
    r.set("total_active", run.total_active);
    Ok(r)
}

fn trace_records(ctx: &Ctx, trial: u64, trace: &[mrim_core::adaptive::RoundObservation]) -> Vec<TraceRecord> {
    let mut seen = mrim_core::NodeSet::new(ctx.g.graph.node_count());
    trace
        .iter()
        .map(|obs| {
            let fresh: Vec<NodeId> = obs.reached.iter().copied().filter(|v| !seen.contains(*v)).collect();
            for &v in &fresh {
                seen.insert(v);
            }
            TraceRecord {
                trial,
                round: obs.round + 1,
                seeds: ctx.labels(&obs.seeds),
                newly_activated: ctx.labels(&fresh),
                cumulative: seen.len(),
            }
        })
        .collect()
}

fn mrim(ctx: &Ctx, a: &MrimArgs) -> Result<Report> {
    let g = &ctx.g.graph;
    let n = g.node_count();
    if a.rounds == 0 {
        return Err(Failure::usage("--rounds must be positive"));
    }
    if a.budget == 0 || a.budget > n {
        return Err(mrim_core::Error::InvalidBudget { k: a.budget, n }.into());
    }
    let mode_name = match a.mode {
        Mode::Within => "within",
        Mode::Cross => "cross",
    };
    let algorithm = match (a.algo, a.mode) {
        (MrimAlgo::Greedy, Mode::Within) => "double-greedy",
        (MrimAlgo::Greedy, Mode::Cross) => "global-greedy",
        (MrimAlgo::Imm, _) => "rr-sequence-imm",
    };
    let mut r = ctx.report("mrim", algorithm);
    r.param("mode", mode_name)
        .param("rounds", a.rounds)
        .param("budget", a.budget)
        .param("epsilon", a.epsilon)
        .param("ell", a.ell);
    let schedule = match a.algo {
        MrimAlgo::Greedy => {
            let opts = GreedyOptions { lazy: a.lazy };
            r.param("lazy", a.lazy).param("evaluator", format!("{:?}", a.evaluator).to_lowercase());
            let run = |eval: &mut dyn mrim_core::greedy::SpreadEvaluator| -> mrim_core::Result<GreedyOutcome> {
                match a.mode {
                    Mode::Within => double_greedy_with(g, a.rounds, a.budget, eval, opts),
                    Mode::Cross => global_greedy_with(g, a.rounds, a.budget, eval, opts),
                }
            };
            let out = match a.evaluator {
                EvaluatorKind::Exact => run(&mut MrtOracle::new(g)?)?,
                EvaluatorKind::Mc => {
                    let factor = match a.round_factor {
                        RoundFactorArg::Statement => RoundFactor::Statement,
                        RoundFactorArg::T2 => RoundFactor::TSquared,
                    };
                    let samples = match a.mc_samples {
                        Some(0) => return Err(Failure::usage("--mc-samples must be positive")),
                        Some(s) => s,
                        None => {
                            let s = simulation_count(a.budget, n, a.ell, a.rounds, a.epsilon, factor)?;
                            if s > SIMULATION_WARN {
                                r.warn(format!("automatic simulation count {s} is very large; consider --mc-samples"));
                            }
                            usize::try_from(s).map_err(|_| Failure::usage("simulation count overflows"))?
                        }
                    };
                    r.param("mc_samples", samples)
                        .param("round_factor", format!("{:?}", a.round_factor).to_lowercase())
                        .param("common_random_numbers", a.common_random_numbers);
                    let mut inner = MonteCarloEvaluator::new(samples, ctx.sub_seed(STREAM_EVALUATOR));
                    inner.common_random_numbers = a.common_random_numbers;
                    let mut eval = ParMonteCarloEvaluator(inner);
                    let out = run(&mut eval)?;
                    r.set("evaluations", eval.0.calls());
                    out
                }
            };
            let zero = out.picks.iter().filter(|p| p.zero_gain).count();
            if zero > 0 {
                r.warn(format!("{zero} picks had zero marginal gain"));
            }
            r.set(
                "gains",
                out.picks.iter().map(|p| p.gain).collect::<Vec<_>>(),
            );
            r.set("greedy_value", out.value);
            out.schedule
        }
        MrimAlgo::Imm => {
            let sel = match a.mode {
                Mode::Within => SelectionMode::WithinRound,
                Mode::Cross => SelectionMode::CrossRound,
            };
            let run = mrim_imm(g, a.rounds, a.budget, a.epsilon, a.ell, sel, &mut stream(ctx.seed, STREAM_SOLVER))?;
            r.set("theta", run.phase1.theta)
                .set("lower_bound", run.phase1.lb)
                .set("rr_sequences", run.store.len())
                .set("rr_estimate", run.estimate);
            if let Some(path) = &a.dump_store {
                let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                write_sequence_store(&mut f, &run.store)?;
                f.flush()?;
            }
            run.schedule
        }
    };
    if a.dump_store.is_some() && a.algo != MrimAlgo::Imm {
        r.warn("--dump-store only applies to --algo imm");
    }
    r.set("schedule", ctx.schedule_labels(&schedule));
    let value = match a.evaluator {
        EvaluatorKind::Exact if a.algo == MrimAlgo::Greedy => SpreadEstimate::exact(exact_rho_mrt(g, &schedule)?),
        _ => par_estimate_rho(g, &schedule, a.eval_samples, ctx.sub_seed(STREAM_ESTIMATE))?,
    };
    r.set("spread", spread(value));
    if let Some(path) = &a.write_schedule {
        std::fs::write(path, format_schedule(schedule.rounds(), ctx.g))?;
    }
    Ok(r)
}

fn adaptive(ctx: &Ctx, a: &AdaptiveArgs) -> Result<Report> {
    let g = &ctx.g.graph;
    let n = g.node_count();
    if a.rounds == 0 {
        return Err(Failure::usage("--rounds must be positive"));
    }
    if a.budget == 0 || a.budget > n {
        return Err(mrim_core::Error::InvalidBudget { k: a.budget, n }.into());
    }
    let algorithm = match a.algo {
        MrimAlgo::Greedy => "ada-greedy",
        MrimAlgo::Imm => "ada-imm",
    };
    let mut r = ctx.report("adaptive", algorithm);
    r.param("rounds", a.rounds).param("budget", a.budget).param("trials", a.trials);
    let summary = match a.algo {
        MrimAlgo::Greedy => {
            if a.samples == 0 {
                return Err(Failure::usage("--samples must be positive"));
            }
            r.param("samples", a.samples);
            par_run_adaptive(g, &AdaGreedyPolicy { samples: a.samples }, a.rounds, a.budget, a.trials, ctx.seed)?
        }
        MrimAlgo::Imm => {
            r.param("epsilon", a.epsilon).param("ell", a.ell).param("incremental", a.incremental);
            let mut p = AdaImmPolicy::new(a.epsilon, a.ell);
            p.incremental = a.incremental;
            p.reset();
            par_run_adaptive(g, &p, a.rounds, a.budget, a.trials, ctx.seed)?
        }
    };
    let trials = summary.runs.len() as f64;
    let mean_gains: Vec<f64> = (0..a.rounds)
        .map(|t| summary.runs.iter().map(|run| run.gains[t] as f64).sum::<f64>() / trials)
        .collect();
    r.set("spread", spread(summary.estimate))
        .set("mean_gain_per_round", mean_gains)
        .set(
            "first_trial_schedule",
            summary.runs[0].schedule.iter().map(|s| ctx.labels(s)).collect::<Vec<_>>(),
        );
    if let Some(path) = &a.trace {
        let records: Vec<TraceRecord> = summary
            .runs
            .iter()
            .enumerate()
            .flat_map(|(i, run)| trace_records(ctx, i as u64, &run.trace))
            .collect();
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        crate::report::write_trace(&mut f, &records)?;
        f.flush()?;
    }
    Ok(r)
}

fn saic(ctx: &Ctx, a: &SaicArgs) -> Result<Report> {
    let g = &ctx.g.graph;
    let algorithm = match a.problem {
        SaicProblem::Bim => "imm-bim",
        SaicProblem::Bpim => "imm-bpim",
        SaicProblem::Pim => "imm-pim",
    };
    let mut r = ctx.report("saic", algorithm);
    r.param("budget", a.budget).param("epsilon", a.epsilon).param("ell", a.ell);
    let (profile, edge_delay) = ctx.profile(&a.saic, &mut r)?;
    let mut rng = stream(ctx.seed, STREAM_SOLVER);
    let (seeds, objective) = match a.problem {
        SaicProblem::Bim => {
            let run = imm_bim(g, &profile, a.budget, a.epsilon, a.ell, &mut rng)?;
            r.set("theta", run.phase1.theta)
                .set("lower_bound", run.phase1.lb)
                .set("rr_samples", run.samples)
                .set("covered_by_self_activation", run.covered_external)
                .set("rr_estimate", run.estimate);
            (run.seeds.clone(), Objective::SigmaB(run.seeds))
        }
        SaicProblem::Bpim => {
            let run = imm_bpim(g, &profile, edge_delay, a.budget, a.epsilon, a.ell, &mut rng)?;
            r.set("theta", run.phase1.theta)
                .set("lower_bound", run.phase1.lb)
                .set("prr_samples", run.samples)
                .set("rr_estimate", run.estimate);
            (run.seeds.clone(), Objective::RhoB(run.seeds))
        }
        SaicProblem::Pim => {
            let run = imm_pim(g, &profile, edge_delay, a.budget, a.epsilon, a.ell, &mut rng)?;
            if run.all_zero {
                r.warn("no sample had a self-activated source; seeds are the lowest ids");
            }
            r.set("theta", run.phase1.theta)
                .set("lower_bound", run.phase1.lb)
                .set("prr_samples", run.samples)
                .set("rr_estimate", run.estimate);
            if g.node_count() <= PER_NODE_LIMIT {
                r.set("single_node_estimates", g.nodes().map(|v| run.single_node_estimate(v)).collect::<Vec<_>>());
            }
            (run.seeds.clone(), Objective::Rho(run.seeds))
        }
    };
    r.set("seeds", ctx.labels(&seeds));
    let value = par_estimate_objective(g, &profile, edge_delay, &objective, a.eval_samples, ctx.sub_seed(STREAM_ESTIMATE))?;
    r.set("spread", spread(value));
    Ok(r)
}

fn eval(ctx: &Ctx, a: &EvalArgs) -> Result<Report> {
    let g = &ctx.g.graph;
    if a.samples == 0 {
        return Err(Failure::usage("--samples must be positive"));
    }
    let evaluator = format!("{:?}", a.evaluator).to_lowercase();
    let mut r = ctx.report("eval", &evaluator);
    let value = match a.objective {
        EvalObjective::Rho => {
            let path = a
                .schedule
                .as_ref()
                .ok_or_else(|| Failure::usage("--objective rho needs --schedule"))?;
            let sched = ctx.read_schedule(path)?;
            r.param("objective", "rho").param("schedule", ctx.schedule_labels(&sched));
            match a.evaluator {
                EvaluatorKind::Exact => SpreadEstimate::exact(exact_rho_mrt(g, &sched)?),
                EvaluatorKind::Mc => {
                    r.param("samples", a.samples);
                    if sched.is_empty() {
                        SpreadEstimate::exact(0.0)
                    } else {
                        par_estimate_rho(g, &sched, a.samples, ctx.seed)?
                    }
                }
            }
        }
        obj => {
            let list = a
                .seeds
                .as_ref()
                .ok_or_else(|| Failure::usage("this objective needs --seeds"))?;
            let seeds = ctx.g.nodes_from_list(list)?;
            let (profile, edge_delay) = ctx.profile(&a.saic, &mut r)?;
            let (name, target) = match obj {
                EvalObjective::SigmaB => ("sigma-b", Objective::SigmaB(seeds.clone())),
                EvalObjective::Preemptive => ("preemptive", Objective::Rho(seeds.clone())),
                _ => ("preemptive-b", Objective::RhoB(seeds.clone())),
            };
            r.param("objective", name).param("seeds", ctx.labels(&seeds));
            match (a.evaluator, obj) {
                (EvaluatorKind::Exact, EvalObjective::SigmaB) => SpreadEstimate::exact(exact_sigma_b(g, &profile, &seeds)?),
                (EvaluatorKind::Exact, _) => {
                    return Err(Failure::usage("no exact evaluator for preemptive objectives; use --evaluator mc"))
                }
                _ => {
                    r.param("samples", a.samples);
                    par_estimate_objective(g, &profile, edge_delay, &target, a.samples, ctx.seed)?
                }
            }
        }
    };
    r.set("spread", spread(value));
    Ok(r)
}

fn oracle(ctx: &Ctx, cmd: OracleCommand) -> Result<Report> {
    let g = &ctx.g.graph;
    match cmd {
        OracleCommand::Sigma(a) => {
            let seeds = ctx.g.nodes_from_list(&a.seeds)?;
            let mut r = ctx.report("oracle", "sigma");
            r.param("seeds", ctx.labels(&seeds));
            r.set("value", exact_sigma(g, &seeds)?);
            Ok(r)
        }
        OracleCommand::Rho(a) => {
            let sched = ctx.read_schedule(&a.schedule)?;
            let mut r = ctx.report("oracle", "rho");
            r.param("schedule", ctx.schedule_labels(&sched));
            r.set("value", exact_rho_mrt(g, &sched)?);
            Ok(r)
        }
        OracleCommand::SigmaB(a) => {
            let seeds = ctx.g.nodes_from_list(&a.seeds)?;
            let mut r = ctx.report("oracle", "sigma-b");
            let (profile, _) = ctx.profile(&a.saic, &mut r)?;
            r.param("seeds", ctx.labels(&seeds));
            r.set("value", exact_sigma_b(g, &profile, &seeds)?);
            Ok(r)
        }
        OracleCommand::Opt(a) => oracle_opt(ctx, &a),
    }
}

fn oracle_opt(ctx: &Ctx, a: &OracleOptArgs) -> Result<Report> {
    let g = &ctx.g.graph;
    let n = g.node_count();
    let problem = match a.problem {
        OptProblem::MrimWithin => Problem::MrimWithin,
        OptProblem::MrimCross => Problem::MrimCross,
        OptProblem::Bim => Problem::Bim,
        OptProblem::Bpim => Problem::Bpim,
        OptProblem::Pim => Problem::Pim,
    };
    if a.budget > n {
        return Err(mrim_core::Error::InvalidBudget { k: a.budget, n }.into());
    }
    let mut r = ctx.report("oracle", &format!("opt-{:?}", a.problem).to_lowercase());
    r.param("rounds", a.rounds).param("budget", a.budget);
    let space = problem.space(n, a.rounds, a.budget);
    let opt = match problem {
        Problem::MrimWithin | Problem::MrimCross => {
            if a.rounds == 0 {
                return Err(Failure::usage("--rounds must be positive"));
            }
            let table = MrtOracle::new(g)?;
            exhaustive_opt(space, SEARCH_CAP, |c| match c {
                Candidate::Schedule(s) => Ok(table.rho(s)),
                Candidate::Set(s) => Ok(table.sigma(s)),
            })?
        }
        Problem::Bim => {
            let (profile, _) = ctx.profile(&a.saic, &mut r)?;
            exhaustive_opt(space, SEARCH_CAP, |c| match c {
                Candidate::Set(s) => exact_sigma_b(g, &profile, s),
                Candidate::Schedule(_) => unreachable!("set space"),
            })?
        }
        Problem::Bpim | Problem::Pim => {
            let (profile, edge_delay) = ctx.profile(&a.saic, &mut r)?;
            r.param("samples", a.samples);
            r.warn("preemptive optimum is a Monte Carlo estimate with common worlds");
            let boosted = problem == Problem::Bpim;
            // every candidate sees the same worlds
            let seed = ctx.sub_seed(STREAM_ESTIMATE);
            exhaustive_opt(space, SEARCH_CAP, |c| {
                let Candidate::Set(s) = c else { unreachable!("set space") };
                let target = if boosted { Objective::RhoB(s.clone()) } else { Objective::Rho(s.clone()) };
                Ok(par_estimate_objective(g, &profile, edge_delay, &target, a.samples, seed)?.mean)
            })?
        }
    };
    r.set("value", opt.value).set("candidates", opt.evaluated as u64);
    match &opt.argmax {
        Candidate::Schedule(s) => r.set("schedule", ctx.schedule_labels(s)),
        Candidate::Set(s) => r.set("seeds", ctx.labels(s)),
    };
    Ok(r)
}

/// Two-column console rendering of a report.
pub fn summary(r: &Report) -> String {
    let mut rows: Vec<(String, String)> = vec![
        ("command".into(), r.command.clone()),
        ("algorithm".into(), r.algorithm.clone()),
        ("seed".into(), r.seed.to_string()),
        ("graph".into(), format!("{} nodes, {} edges", r.graph.nodes, r.graph.edges)),
    ];
    for (k, v) in &r.parameters {
        rows.push((k.clone(), compact(v)));
    }
    for (k, v) in &r.result {
        if k == "spread" {
            if let (Some(m), Some(se), Some(s)) = (v["mean"].as_f64(), v["stderr"].as_f64(), v["samples"].as_u64()) {
                let tail = if s == 0 { "exact".to_string() } else { format!("± {se:.4}, {s} samples") };
                rows.push((k.clone(), format!("{m:.4} ({tail})")));
                continue;
            }
        }
        rows.push((k.clone(), compact(v)));
    }
    for w in &r.warnings {
        rows.push(("warning".into(), w.clone()));
    }
    rows.push(("wall time".into(), format!("{} ms", r.wall_time_ms)));
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn compact(v: &impl Serialize) -> String {
    let s = serde_json::to_string(v).unwrap_or_default();
    const MAX: usize = 120;
    match s.char_indices().nth(MAX) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s.trim_matches('"').to_string(),
    }
}
