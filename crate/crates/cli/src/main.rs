mod commands;
mod config;
mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use report::Outcome;

#[derive(Parser, Serialize)]
#[command(name = "schreier", version, about = "Schreier graph construction and analysis")]
struct Cli {
    /// Worker threads (0 = all cores, 1 = sequential).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// File of `key = value` lines used as default flags for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(untagged)]
enum Command {
    /// Build a graph and print it as SGF1.
    #[command(args_override_self = true)]
    Build(BuildArgs),
    /// Full Markov spectrum of a finite graph.
    #[command(args_override_self = true)]
    Spectrum(GraphArgs),
    /// Spectral radius estimate from return probabilities.
    #[command(args_override_self = true)]
    RhoEstimate(RhoEstimateArgs),
    /// Nontrivial spectral radius against the Ramanujan threshold.
    #[command(args_override_self = true)]
    Ramanujan(GraphArgs),
    /// Exact walk counts from a vertex.
    #[command(args_override_self = true)]
    Walks(WalksArgs),
    /// Exhaustive checks of the walk, operator and local-approximation inequalities.
    #[command(subcommand)]
    LemmaCheck(LemmaCheck),
    /// Ball statistics over all points of a finite action.
    #[command(args_override_self = true)]
    BsStats(BsStatsArgs),
    /// Ball distance between two rooted graphs.
    #[command(args_override_self = true)]
    BallDistance(BallDistanceArgs),
    /// Fixed-point densities of words.
    #[command(args_override_self = true)]
    FixDensity(FixDensityArgs),
    /// Cycle counts, girth and density trends.
    #[command(args_override_self = true)]
    Cycles(CyclesArgs),
    /// Invariant random subgroup from an action, with its invariance diagnostic.
    #[command(args_override_self = true)]
    IrsSample(IrsArgs),
    /// Named experiment recipes.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Args, Serialize)]
pub struct BuildArgs {
    /// Builder spec, e.g. `cycle:6` or `fold:a^2,bab^-1;r=4`.
    pub spec: String,
}

#[derive(Args, Serialize)]
pub struct GraphArgs {
    #[arg(long)]
    pub graph: String,
    /// Largest vertex count for dense eigensolves.
    #[arg(long, default_value_t = schreier::spectral::DENSE_LIMIT)]
    pub dense_limit: usize,
}

#[derive(Args, Serialize)]
pub struct RhoEstimateArgs {
    /// Builder spec; `free:` and `fold:` without a radius use the exact cover chain.
    #[arg(long)]
    pub graph: String,
    #[arg(long, default_value_t = 200)]
    pub horizon: usize,
    /// Steps computed in exact arithmetic before switching to log-space floats.
    #[arg(long, default_value_t = 256)]
    pub exact_limit: usize,
}

#[derive(Args, Serialize)]
pub struct WalksArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long, default_value_t = 0)]
    pub from: usize,
    #[arg(long)]
    pub length: usize,
    /// Report the count to this vertex as well.
    #[arg(long)]
    pub to: Option<usize>,
    /// Include the full row of endpoint counts.
    #[arg(long)]
    pub row: bool,
}

/// Group argument: `F<m>` for the free group of rank m, or a builder spec.
#[derive(Args, Serialize)]
pub struct GroupArg {
    #[arg(long, default_value = "F2")]
    pub group: String,
}

#[derive(Subcommand, Serialize)]
#[serde(untagged)]
pub enum LemmaCheck {
    /// |P(x,y,n)| ≤ |P(x,x,n)| ≤ d²|P(x,x,n-2)| for all y and even n.
    #[command(args_override_self = true)]
    Different(DifferentArgs),
    /// Conditioned on returning, every prefix has probability ≥ d^(-2l).
    #[command(args_override_self = true)]
    Returningvsrw(ReturningArgs),
    /// Returning words start with any fixed k-letter word with probability ≥ d^(-2k).
    #[command(args_override_self = true)]
    Triv1(Triv1Args),
    /// Segment distributions of returning words do not depend on the position.
    #[command(args_override_self = true)]
    Triv2(Triv2Args),
    /// Return probability of a product of symmetric steps is bounded by the product of norms.
    #[command(args_override_self = true)]
    Modifiedrw(ModifiedArgs),
    /// Operator norm of a distribution equals that of its restriction to a subgroup.
    #[command(args_override_self = true)]
    Subgroupnorm(SubgroupNormArgs),
    /// Tree-ball frequency against fixed-point densities.
    #[command(args_override_self = true)]
    Lekv(LekvArgs),
}

#[derive(Args, Serialize)]
pub struct DifferentArgs {
    #[command(flatten)]
    pub group: GroupArg,
    #[arg(long, default_value_t = 12)]
    pub max_n: usize,
}

#[derive(Args, Serialize)]
pub struct ReturningArgs {
    #[command(flatten)]
    pub group: GroupArg,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Longest prefix checked.
    #[arg(long, default_value_t = 2)]
    pub max_prefix: usize,
}

#[derive(Args, Serialize)]
pub struct Triv1Args {
    #[command(flatten)]
    pub group: GroupArg,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub max_k: usize,
    /// Largest number of tuples enumerated explicitly.
    #[arg(long, default_value_t = schreier::walks::DEFAULT_ENUMERATION_GUARD)]
    pub guard: u64,
}

#[derive(Args, Serialize)]
pub struct Triv2Args {
    #[command(flatten)]
    pub group: GroupArg,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = schreier::walks::DEFAULT_ENUMERATION_GUARD)]
    pub guard: u64,
}

#[derive(Args, Serialize)]
pub struct ModifiedArgs {
    /// Regular action, as a builder spec.
    #[arg(long, default_value = "s3")]
    pub action: String,
    /// Explicit step supports, each a comma-separated word list; the empty
    /// word `e` is the identity. Without any, random sequences are drawn.
    #[arg(long)]
    pub support: Vec<String>,
    #[arg(long, default_value_t = 20)]
    pub sequences: usize,
    #[arg(long, default_value_t = 4)]
    pub max_length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Args, Serialize)]
pub struct SubgroupNormArgs {
    #[arg(long, default_value = "s3")]
    pub action: String,
    /// Supports to check, each a comma-separated word list. Without any,
    /// `--count` random supports are drawn.
    #[arg(long)]
    pub support: Vec<String>,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Args, Serialize)]
pub struct LekvArgs {
    /// Finite actions (repeatable).
    #[arg(long, required = true)]
    pub action: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub radius: u32,
    /// Words for the per-word bound, comma-separated; default all reduced words of length ≤ 2R.
    #[arg(long)]
    pub words: Option<String>,
}

#[derive(Args, Serialize)]
pub struct BsStatsArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long, default_value_t = 1)]
    pub radius: u32,
}

#[derive(Args, Serialize)]
pub struct BallDistanceArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long, default_value_t = 0)]
    pub root: usize,
    /// Second graph; defaults to the first.
    #[arg(long)]
    pub other: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub other_root: usize,
    #[arg(long, default_value_t = schreier::local::DEFAULT_MAX_RADIUS)]
    pub max_radius: u32,
}

#[derive(Args, Serialize)]
pub struct FixDensityArgs {
    #[arg(long)]
    pub action: String,
    /// Words to evaluate (repeatable); without any, all reduced words up to `--max-len`.
    #[arg(long)]
    pub word: Vec<String>,
    #[arg(long, default_value_t = 2)]
    pub max_len: usize,
}

#[derive(Args, Serialize)]
pub struct CyclesArgs {
    /// Graphs in sequence order (repeatable).
    #[arg(long, required = true)]
    pub graph: Vec<String>,
    #[arg(long, default_value_t = 8)]
    pub max_len: usize,
}

#[derive(Args, Serialize)]
pub struct IrsArgs {
    #[arg(long)]
    pub action: String,
    /// Use the exact uniform-conjugate ensemble instead of sampling.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub radius: u32,
    /// Omit the ensemble itself from the report.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Subcommand, Serialize)]
#[serde(untagged)]
pub enum Experiment {
    /// Sch(F₂/⟨a⟩) against Cay(F₂) at equal horizons.
    #[command(args_override_self = true)]
    KestenAmenable(KestenArgs),
    /// Finite orbit graphs of a uniform-conjugate IRS against Cay(F_m).
    #[command(args_override_self = true)]
    KestenFiniteIrs(FiniteIrsArgs),
    /// Sch(F₄/⟨a,b⟩) against Cay(F₄).
    #[command(args_override_self = true)]
    NonamenableSubgroupCounterexample(KestenArgs),
    /// ρ₀ of random permutation models against the tree value.
    #[command(args_override_self = true)]
    AlonBoppana(RandomSequenceArgs),
    /// ρ₀ verdicts and short-cycle densities, with an LPS graph.
    #[command(args_override_self = true)]
    RamanujanGirth(RamanujanGirthArgs),
}

#[derive(Args, Serialize)]
pub struct KestenArgs {
    #[arg(long, default_value_t = 200)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0.02)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 256)]
    pub exact_limit: usize,
}

#[derive(Args, Serialize)]
pub struct FiniteIrsArgs {
    #[arg(long, default_value = "randperm:m=2,n=200,seed=1")]
    pub action: String,
    #[arg(long, default_value_t = 200)]
    pub horizon: usize,
}

#[derive(Args, Serialize)]
pub struct RandomSequenceArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 1000, 10_000])]
    pub sizes: Vec<usize>,
    /// Seeds 1..=k per size.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    /// Allowed shortfall of the smallest ρ₀ at the largest size below the tree value.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
}

#[derive(Args, Serialize)]
pub struct RamanujanGirthArgs {
    #[command(flatten)]
    pub sequence: RandomSequenceArgs,
    #[arg(long, default_value = "lps:p=17,q=13")]
    pub lps: String,
    #[arg(long, default_value_t = 5)]
    pub max_len: usize,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Build(_) => "build",
            Command::Spectrum(_) => "spectrum",
            Command::RhoEstimate(_) => "rho-estimate",
            Command::Ramanujan(_) => "ramanujan",
            Command::Walks(_) => "walks",
            Command::LemmaCheck(l) => match l {
                LemmaCheck::Different(_) => "lemma-check different",
                LemmaCheck::Returningvsrw(_) => "lemma-check returningvsrw",
                LemmaCheck::Triv1(_) => "lemma-check triv1",
                LemmaCheck::Triv2(_) => "lemma-check triv2",
                LemmaCheck::Modifiedrw(_) => "lemma-check modifiedrw",
                LemmaCheck::Subgroupnorm(_) => "lemma-check subgroupnorm",
                LemmaCheck::Lekv(_) => "lemma-check lekv",
            },
            Command::BsStats(_) => "bs-stats",
            Command::BallDistance(_) => "ball-distance",
            Command::FixDensity(_) => "fix-density",
            Command::Cycles(_) => "cycles",
            Command::IrsSample(_) => "irs-sample",
            Command::Experiment(e) => match e {
                Experiment::KestenAmenable(_) => "experiment kesten-amenable",
                Experiment::KestenFiniteIrs(_) => "experiment kesten-finite-irs",
                Experiment::NonamenableSubgroupCounterexample(_) => "experiment nonamenable-subgroup-counterexample",
                Experiment::AlonBoppana(_) => "experiment alon-boppana",
                Experiment::RamanujanGirth(_) => "experiment ramanujan-girth",
            },
        }
    }

    fn run(&self, threads: usize) -> schreier::Result<Outcome> {
        match self {
            Command::Build(a) => commands::build(a),
            Command::Spectrum(a) => commands::spectrum(a),
            Command::RhoEstimate(a) => commands::rho_estimate(a),
            Command::Ramanujan(a) => commands::ramanujan(a),
            Command::Walks(a) => commands::walks(a),
            Command::LemmaCheck(l) => match l {
                LemmaCheck::Different(a) => commands::different(a),
                LemmaCheck::Returningvsrw(a) => commands::returning_vs_rw(a),
                LemmaCheck::Triv1(a) => commands::triv1(a),
                LemmaCheck::Triv2(a) => commands::triv2(a),
                LemmaCheck::Modifiedrw(a) => commands::modified_rw(a),
                LemmaCheck::Subgroupnorm(a) => commands::subgroup_norm(a),
                LemmaCheck::Lekv(a) => commands::lekv(a),
            },
            Command::BsStats(a) => commands::bs_stats(a),
            Command::BallDistance(a) => commands::ball_distance(a),
            Command::FixDensity(a) => commands::fix_density(a),
            Command::Cycles(a) => commands::cycles(a),
            Command::IrsSample(a) => commands::irs_sample(a, threads),
            Command::Experiment(e) => match e {
                Experiment::KestenAmenable(a) => experiments::kesten_amenable(a),
                Experiment::KestenFiniteIrs(a) => experiments::kesten_finite_irs(a),
                Experiment::NonamenableSubgroupCounterexample(a) => experiments::nonamenable(a),
                Experiment::AlonBoppana(a) => experiments::alon_boppana(a),
                Experiment::RamanujanGirth(a) => experiments::ramanujan_girth(a),
            },
        }
    }
}

fn command_names() -> Vec<String> {
    Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect()
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args_os().collect(), &command_names()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let start = Instant::now();
    let outcome = schreier::exec::with_threads(cli.threads, || {
        let effective = schreier::exec::current_threads();
        (cli.command.run(effective), effective)
    });
    let (outcome, effective) = outcome;
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let text = match &outcome.text {
        Some(t) => t.clone(),
        None => {
            let mut config = serde_json::to_value(&cli).unwrap_or_default();
            config["threads_effective"] = json!(effective);
            let report = report::envelope(
                cli.command.name(),
                config,
                outcome.result,
                outcome.asserted,
                start.elapsed().as_secs_f64(),
            );
            let mut s = serde_json::to_string_pretty(&report).unwrap_or_default();
            s.push('\n');
            s
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if outcome.asserted == Some(false) {
        eprintln!("assertion failed: see `holds` in the report");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
