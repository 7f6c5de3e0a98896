//! Command-line surface. [`run`] takes argv and returns the exit code with
//! whatever would go to stdout and stderr, so the bin stays a thin wrapper.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage error, 3 validation
//! error.

mod document;
mod format;

pub use document::{Block, Cell, Format, Metadata, OutputDocument, JSON_DIGITS, MARKDOWN_DIGITS};
pub use format::{sig, symbolic};

use crate::experiment::{
    build_protocol, evolve_exact, joint_distribution, monte_carlo, Coin, ConfigError, ExperimentError, OutcomeTable,
    Protocol, ProtocolConfig, SpinZ, TimePoint, WBarOutcome, WOutcome,
};
use crate::perspectives::{assign_state, Agent, Body, Conditioning, Herald, PerspectiveError};
use crate::reasoning::{
    consistency_report, enumerate_pathways, evaluate_pathway_with, InferenceRule, Pathway, ReportError, Verdict,
    VerdictKind,
};
use crate::statevec::{Basis, Projector, StateError, Subsystem};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use thiserror::Error;

pub const SEED_ENV: &str = "FRIENDLY_WIGNER_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "friendly-wigner",
    version,
    about = "Extended Wigner's-friend simulator and deduction checker"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Protocol config (TOML). Without it the standard protocol is used.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Fall back to the standard protocol when `--config` does not exist.
    #[arg(long = "default", global = true)]
    pub use_default: bool,
    /// Record the generation time in the metadata.
    #[arg(long, global = true)]
    pub stamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact joint distribution and the unbranched stage states.
    Exact,
    /// Monte Carlo estimate of the joint distribution.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        rounds: u64,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..1025))]
        workers: Option<u64>,
    },
    /// State an agent assigns to the labs at a time.
    Perspectives {
        #[arg(long, value_parser = parse_agent)]
        agent: Agent,
        #[arg(long, value_parser = parse_time)]
        time: TimePoint,
        /// Herald such as `r=tails`, `z=+1/2`, `wbar=okbar`; repeatable.
        #[arg(long = "condition", value_parser = parse_herald)]
        conditions: Vec<Herald>,
        /// Only show the assignment for this subsystem (R, S, Lbar, L).
        #[arg(long, value_parser = parse_subsystem)]
        lab: Option<Subsystem>,
    },
    /// Verdicts for W's deduction pathways.
    Reason {
        #[arg(long, value_parser = parse_pathway, conflicts_with = "all")]
        pathway: Option<Pathway>,
        #[arg(long)]
        all: bool,
        /// Transfer rule used to lift nested statements.
        #[arg(long, value_enum, default_value = "original")]
        rule: RuleArg,
    },
    /// Full consistency report.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Original,
    Improved,
}

impl From<RuleArg> for InferenceRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Original => InferenceRule::Original,
            RuleArg::Improved => InferenceRule::Improved,
        }
    }
}

fn parse_agent(s: &str) -> Result<Agent, String> {
    s.parse()
}

fn parse_time(s: &str) -> Result<TimePoint, String> {
    let s = s.trim();
    TimePoint::ALL
        .into_iter()
        .find(|t| t.as_str().eq_ignore_ascii_case(s))
        .or_else(|| TimePoint::from_alias(s))
        .ok_or_else(|| format!("unknown time `{s}` (expected t0, t1, t2 or t3)"))
}

fn parse_herald(s: &str) -> Result<Herald, String> {
    s.parse()
}

fn parse_subsystem(s: &str) -> Result<Subsystem, String> {
    Subsystem::ALL
        .into_iter()
        .find(|sub| sub.name().eq_ignore_ascii_case(s.trim()))
        .ok_or_else(|| format!("unknown lab `{s}` (expected R, S, Lbar or L)"))
}

fn parse_pathway(s: &str) -> Result<Pathway, String> {
    let valid = enumerate_pathways();
    let listing = || valid.iter().map(|p| format!("  {p}")).collect::<Vec<_>>().join("\n");
    match s.parse::<Pathway>() {
        Ok(p) if valid.contains(&p) => Ok(p),
        Ok(p) => Err(format!(
            "pathway {p} is not one of the 9 valid pathways:\n{}",
            listing()
        )),
        Err(e) => Err(format!("{e}; valid pathways:\n{}", listing())),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(c) => c.into(),
            ExperimentError::ZeroRounds | ExperimentError::ZeroWorkers => CliError::Usage(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<PerspectiveError> for CliError {
    fn from(e: PerspectiveError) -> Self {
        match e {
            PerspectiveError::State(s) => s.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Experiment(e) => e.into(),
            ReportError::Perspective(e) => e.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString>,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let mut text = e.render().to_string();
            if e.use_stderr() && !text.contains("Usage:") {
                text.push('\n');
                text.push_str(&usage_for(&argv));
                text.push('\n');
            }
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli) {
        Ok(doc) => Outcome {
            code: 0,
            stdout: doc.render(),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Usage line of the subcommand named in `argv`, or of the whole program.
fn usage_for(argv: &[std::ffi::OsString]) -> String {
    let mut cmd = <Cli as clap::CommandFactory>::command();
    cmd.build();
    let name = argv
        .iter()
        .skip(1)
        .filter_map(|a| a.to_str())
        .find(|a| cmd.find_subcommand(a).is_some())
        .map(str::to_owned);
    match name.and_then(|n| cmd.find_subcommand_mut(&n).cloned()) {
        Some(mut sub) => sub.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

/// Config named by `--config`, or the standard one. A missing file is an
/// error unless `--default` is given.
pub fn parse_config(path: Option<&std::path::Path>, use_default: bool) -> Result<ProtocolConfig, ConfigError> {
    match path {
        None => Ok(ProtocolConfig::default()),
        Some(p) if use_default && !p.exists() => Ok(ProtocolConfig::default()),
        Some(p) => ProtocolConfig::from_path(p),
    }
}

pub fn config_hash(config: &ProtocolConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(bytes))
}

pub fn execute(cli: &Cli) -> Result<OutputDocument, CliError> {
    let config = parse_config(cli.global.config.as_deref(), cli.global.use_default)?;
    let hash = config_hash(&config);
    let protocol = build_protocol(config)?;
    let (command, seed, blocks) = match &cli.command {
        Command::Exact => ("exact", None, exact_blocks(&protocol)?),
        Command::Simulate { rounds, seed, workers } => {
            let workers = workers.map_or_else(default_workers, |w| w as usize);
            (
                "simulate",
                Some(*seed),
                simulate_blocks(&protocol, *rounds, *seed, workers)?,
            )
        }
        Command::Perspectives {
            agent,
            time,
            conditions,
            lab,
        } => (
            "perspectives",
            None,
            perspective_blocks(&protocol, *agent, *time, conditions, *lab)?,
        ),
        Command::Reason { pathway, rule, .. } => {
            let pathways = match pathway {
                Some(p) => vec![*p],
                None => enumerate_pathways(),
            };
            ("reason", None, reason_blocks(&protocol, &pathways, (*rule).into()))
        }
        Command::Report => ("report", None, report_blocks(&protocol)?),
    };
    let generated_at = cli.global.stamp.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    Ok(OutputDocument {
        format: cli.global.format,
        command,
        metadata: Metadata {
            config_sha256: hash,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            generated_at,
        },
        blocks,
    })
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

const JOINT_COLUMNS: [&str; 4] = ["outcome_wbar", "outcome_w", "probability", "stderr"];

fn exact_joint_block(table: &OutcomeTable) -> Block {
    table.cells().fold(
        Block::table("joint", "Joint distribution of W̄ and W", JOINT_COLUMNS.to_vec()),
        |b, (wb, w, p)| {
            b.row(vec![
                Cell::text(wb.label()),
                Cell::text(w.label()),
                Cell::Prob(p),
                Cell::Empty,
            ])
        },
    )
}

fn marginals_block(table: &OutcomeTable) -> Block {
    let mut b = Block::fields("marginals", "Marginals and conditionals").field("total", Cell::Prob(table.total()));
    for wb in [WBarOutcome::OkBar, WBarOutcome::FailsBar] {
        b = b.field(format!("P(wbar={wb})"), Cell::Prob(table.marginal_wbar(wb)));
    }
    for w in [WOutcome::Ok, WOutcome::Fails] {
        b = b.field(format!("P(w={w})"), Cell::Prob(table.marginal_w(w)));
    }
    for wb in [WBarOutcome::OkBar, WBarOutcome::FailsBar] {
        for w in [WOutcome::Ok, WOutcome::Fails] {
            let c = table.conditional(w, wb).map_or(Cell::Empty, Cell::Prob);
            b = b.field(format!("P(w={w} | wbar={wb})"), c);
        }
    }
    b
}

fn exact_blocks(protocol: &Protocol) -> Result<Vec<Block>, CliError> {
    let tree = evolve_exact(protocol);
    let table = joint_distribution(&tree)?;
    let stages = protocol.stages().iter().fold(
        Block::table(
            "stages",
            "Global state after each unbranched step",
            vec!["step", "time", "state"],
        ),
        |b, s| {
            b.row(vec![
                Cell::text(format!("{:?}", s.step)),
                Cell::text(s.time.as_str()),
                Cell::text(s.state.to_string()),
            ])
        },
    );
    let leaves = tree.leaves().into_iter().fold(
        Block::table("branches", "Branch tree leaves", vec!["path", "probability"]),
        |b, l| b.row(vec![Cell::text(l.path.join("/")), Cell::Prob(l.probability)]),
    );
    Ok(vec![exact_joint_block(&table), marginals_block(&table), stages, leaves])
}

fn simulate_blocks(protocol: &Protocol, rounds: u64, seed: u64, workers: usize) -> Result<Vec<Block>, CliError> {
    let freq = monte_carlo(protocol, rounds, seed, workers)?;
    let exact = joint_distribution(&evolve_exact(protocol))?;
    let std = |e: Option<f64>| e.map_or(Cell::Empty, Cell::Num);
    let mut joint = Block::table(
        "joint",
        "Estimated joint distribution of W̄ and W",
        JOINT_COLUMNS.to_vec(),
    );
    let mut counts = Block::table(
        "counts",
        "Counts against the exact distribution",
        vec!["outcome_wbar", "outcome_w", "count", "exact", "sigmas"],
    );
    for (wb, w, c) in freq.cells() {
        joint = joint.row(vec![
            Cell::text(wb.label()),
            Cell::text(w.label()),
            Cell::Num(c.frequency),
            std(c.stderr),
        ]);
        let e = exact.get(wb, w);
        counts = counts.row(vec![
            Cell::text(wb.label()),
            Cell::text(w.label()),
            Cell::Int(c.count),
            Cell::Prob(e),
            Cell::Num(c.sigmas_from(e, rounds)),
        ]);
    }
    let mut friends = Block::table(
        "friends",
        "Friends' outcomes",
        vec!["variable", "value", "count", "frequency", "stderr"],
    );
    for r in [Coin::Heads, Coin::Tails] {
        let c = freq.r(r);
        friends = friends.row(vec![
            Cell::text("r"),
            Cell::text(r.label()),
            Cell::Int(c.count),
            Cell::Num(c.frequency),
            std(c.stderr),
        ]);
    }
    for z in [SpinZ::Minus, SpinZ::Plus] {
        let c = freq.z(z);
        friends = friends.row(vec![
            Cell::text("z"),
            Cell::text(z.label()),
            Cell::Int(c.count),
            Cell::Num(c.frequency),
            std(c.stderr),
        ]);
    }
    let run = Block::fields("run", "Run")
        .field("rounds", Cell::Int(rounds))
        .field("seed", Cell::Int(seed))
        .field("max_sigmas", Cell::Num(freq.max_sigmas(&exact)));
    Ok(vec![joint, counts, friends, run])
}

/// Bases in which a lab's probabilities are reported: its computational
/// basis and the basis of the agent who measures it.
fn report_bases(protocol: &Protocol, sub: Subsystem) -> Vec<Basis> {
    let outside = match sub {
        Subsystem::R => protocol.coin_basis(),
        Subsystem::S => protocol.f_basis(),
        Subsystem::LBar => protocol.wbar_basis(),
        Subsystem::L => protocol.w_basis(),
    };
    let computational = Basis::computational(sub);
    if outside.names().eq(computational.names()) {
        vec![computational]
    } else {
        vec![computational, outside.clone()]
    }
}

fn perspective_blocks(
    protocol: &Protocol,
    agent: Agent,
    time: TimePoint,
    conditions: &[Herald],
    only: Option<Subsystem>,
) -> Result<Vec<Block>, CliError> {
    let conditioning = Conditioning::new(conditions.iter().copied())?;
    let state = assign_state(protocol, agent, time, &conditioning)?;
    let header = Block::fields("perspective", "Perspective")
        .field("agent", Cell::text(agent.name()))
        .field("time", Cell::text(time.as_str()))
        .field("conditioning", Cell::text(conditioning.to_string()));
    let mut labs = Block::table("labs", "Assigned states", vec!["scope", "kind", "state"]);
    let mut outcomes = Block::table(
        "outcomes",
        "Outcome probabilities",
        vec!["scope", "outcome", "probability"],
    );
    let mut records = Block::table(
        "records",
        "Record superposition",
        vec!["herald", "coin", "amplitude", "claim", "quasi_weight"],
    );
    for a in &state.labs {
        if only.is_some_and(|s| !a.scope.contains(&s)) {
            continue;
        }
        let scope: Vec<_> = a.scope.iter().map(|s| s.name()).collect();
        let scope = scope.join("⊗");
        let text = match &a.body {
            Body::Pure(k) => k.to_string(),
            Body::Mixed(m) => m.to_string(),
            Body::Records(r) => r.state()?.to_string(),
        };
        labs = labs.row(vec![Cell::text(&scope), Cell::text(a.body.kind()), Cell::text(text)]);
        if let [sub] = a.scope[..] {
            for basis in report_bases(protocol, sub) {
                for (name, proj) in basis.outcomes() {
                    let p = a.body.probability(proj)?;
                    outcomes = outcomes.row(vec![Cell::text(&scope), Cell::text(name), Cell::Prob(p)]);
                }
            }
        } else if a.scope == [Subsystem::LBar, Subsystem::L] {
            for wb in [WBarOutcome::OkBar, WBarOutcome::FailsBar] {
                for w in [WOutcome::Ok, WOutcome::Fails] {
                    let proj: Projector = protocol.wbar_projector(wb).tensor(protocol.w_projector(w))?;
                    let p = a.body.probability(&proj)?;
                    outcomes = outcomes.row(vec![Cell::text(&scope), Cell::text(format!("{wb},{w}")), Cell::Prob(p)]);
                }
            }
        }
        if let Body::Records(r) = &a.body {
            for (b, q) in r.branches.iter().zip(r.quasi_weights()) {
                records = records.row(vec![
                    Cell::text(r.herald.label()),
                    Cell::text(b.coin.label()),
                    Cell::Num(b.amplitude),
                    Cell::Prob(b.claim),
                    Cell::Num(q),
                ]);
            }
        }
    }
    let mut blocks = vec![header, labs, outcomes];
    if matches!(&records, Block::Table { rows, .. } if !rows.is_empty()) {
        blocks.push(records);
    }
    Ok(blocks)
}

fn verdict_row(v: &Verdict) -> Vec<Cell> {
    let (claimed, quantum, probability, rule, hop) = match &v.kind {
        VerdictKind::ConsistentPrediction { probability } => (
            Cell::Empty,
            Cell::Empty,
            Cell::Prob(*probability),
            Cell::Empty,
            Cell::Empty,
        ),
        VerdictKind::ContradictionWithQM { claimed, quantum } => (
            Cell::Prob(*claimed),
            Cell::Prob(*quantum),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ),
        VerdictKind::BrokenPremise { rule, hop, .. } => (
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::text(*rule),
            Cell::text(hop),
        ),
    };
    let description = match &v.kind {
        VerdictKind::BrokenPremise { description, .. } => Cell::text(description),
        _ => Cell::Empty,
    };
    vec![
        Cell::text(v.pathway.to_string()),
        Cell::text(v.kind.name()),
        claimed,
        quantum,
        probability,
        rule,
        hop,
        description,
        Cell::Bool(v.improved_admits),
        Cell::Bool(v.artifact_semantics()),
    ]
}

const VERDICT_COLUMNS: [&str; 10] = [
    "pathway",
    "verdict",
    "claimed",
    "quantum",
    "probability",
    "premise_rule",
    "hop",
    "description",
    "improved_admits",
    "artifact_defined",
];

fn reason_blocks(protocol: &Protocol, pathways: &[Pathway], rule: InferenceRule) -> Vec<Block> {
    let verdicts: Vec<_> = pathways
        .iter()
        .map(|p| evaluate_pathway_with(protocol, *p, rule))
        .collect();
    let mut table = Block::table("verdicts", "Pathway verdicts", VERDICT_COLUMNS.to_vec());
    let mut transcript = Block::table("transcripts", "Transcripts", vec!["pathway", "step", "line"]);
    let mut statements = Block::table("statements", "W's nested statements", vec!["pathway", "statement"]);
    for v in &verdicts {
        table = table.row(verdict_row(v));
        for (i, line) in v.transcript.iter().enumerate() {
            transcript = transcript.row(vec![
                Cell::text(v.pathway.to_string()),
                Cell::Int(i as u64 + 1),
                Cell::text(line),
            ]);
        }
        if let Some(s) = &v.statement {
            statements = statements.row(vec![Cell::text(v.pathway.to_string()), Cell::text(s.to_string())]);
        }
    }
    let notes = Block::fields("semantics", "Semantics")
        .field("rule", Cell::text(rule.name()))
        .field(
            "artifact_defined",
            Cell::text("verdicts of pathways the source analysis does not evaluate come from the premise checks R1-R4"),
        );
    vec![table, transcript, statements, notes]
}

fn report_blocks(protocol: &Protocol) -> Result<Vec<Block>, CliError> {
    let r = consistency_report(protocol)?;
    let mut blocks = vec![exact_joint_block(&r.joint), marginals_block(&r.joint)];

    let chain = r.chain.factors.iter().fold(
        Block::table("chain", "Conditional chain", vec!["factor", "value"]),
        |b, f| b.row(vec![Cell::text(f.label), Cell::Prob(f.value)]),
    );
    blocks.push(chain.row(vec![Cell::text("product"), Cell::Prob(r.chain.product)]));

    let mut summary = Block::table("verdicts", "Pathway verdicts", VERDICT_COLUMNS.to_vec());
    for v in &r.verdicts {
        summary = summary.row(verdict_row(v));
    }
    blocks.push(summary);

    let n = &r.non_equal_time;
    let mut net = Block::fields("non_equal_time", "Non-equal-time check")
        .field("herald", Cell::text(n.herald.label()))
        .field("P(z=-1/2 | herald)", Cell::Prob(n.z_heralded[SpinZ::Minus.index()]))
        .field("P(z=+1/2 | herald)", Cell::Prob(n.z_heralded[SpinZ::Plus.index()]))
        .field(
            "excluded_z",
            n.excluded_z.map_or(Cell::Empty, |z| Cell::text(z.label())),
        )
        .field(
            "inferred_coin",
            n.inferred_coin.map_or(Cell::Empty, |c| Cell::text(c.label())),
        );
    net = net
        .field(
            "P(excluded z | premise)",
            n.excluded_given_premise.map_or(Cell::Empty, Cell::Prob),
        )
        .field("contradiction", Cell::Bool(n.contradiction));
    blocks.push(net);

    let e = &r.equal_time;
    let et = Block::fields("equal_time", "Equal-time prediction")
        .field("herald", Cell::text(e.herald.label()))
        .field("P(herald)", Cell::Prob(e.herald_probability))
        .field("wbar_born", Cell::Prob(e.wbar_born))
        .field("prediction", Cell::Prob(e.prediction))
        .field("joint", Cell::Prob(e.joint))
        .field("quantum_conditional", Cell::Prob(r.quantum_conditional))
        .field("printed_reading", r.printed_reading.map_or(Cell::Empty, Cell::Num))
        .field("uses_message_chain", Cell::Bool(e.chain.is_some()));
    blocks.push(et);
    if let Some(chain) = &e.chain {
        let mut t = Block::table(
            "message_chain",
            format!("Message chain given z={}", chain.z.label()),
            vec!["branch", "weight", "effective_probability", "born_probability"],
        );
        for (wb, w, m) in &chain.branches {
            t = t.row(vec![
                Cell::text(wb.label()),
                Cell::Prob(*w),
                Cell::Prob(m.effective_probability),
                Cell::Prob(m.born_probability),
            ]);
        }
        blocks.push(t);
    }
    blocks.push(
        Block::fields("statements", "W's statement at t3")
            .field("nested", Cell::text(r.a_i.to_string()))
            .field("lifted", Cell::text(r.a_ii.to_string()))
            .field("lifted_value", r.a_ii.value().map_or(Cell::Empty, Cell::Prob))
            .field("consistent", Cell::Bool(r.consistent)),
    );
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("friendly-wigner").chain(args.iter().copied()))
    }

    #[test]
    fn exact_csv() {
        let o = run_args(&["exact", "--format", "csv"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let rows: Vec<_> = o.stdout.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "outcome_wbar,outcome_w,probability,stderr");
        assert_eq!(rows[4], "failsbar,fails,0.75,");
    }

    #[test]
    fn zero_rounds_is_usage_error() {
        let o = run_args(&["simulate", "--rounds", "0", "--seed", "1"]);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("Usage"));
    }

    #[test]
    fn bad_pathway_lists_valid_ones() {
        let o = run_args(&["reason", "--pathway", "WBAR:t1,F:t1,FBAR:t1"]);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("WBAR:t3,F:t3,FBAR:t3"));
        assert_eq!(o.stderr.matches("WBAR:t3,F:").count(), 9);
    }

    #[test]
    fn unmodeled_perspective_is_validation_error() {
        let o = run_args(&["perspectives", "--agent", "Fbar", "--time", "t3", "--condition", "w=ok"]);
        assert_eq!(o.code, 3, "{}", o.stdout);
    }

    #[test]
    fn help_goes_to_stdout() {
        let o = run_args(&["--help"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("simulate"));
    }
}
