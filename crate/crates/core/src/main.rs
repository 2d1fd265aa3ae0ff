use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use matchkit::gen::{derive_seed, gen_mixed_corpus};
use matchkit::report::{
    aggregate, audit_witnesses, render_classification, render_construction, render_outcomes,
    render_outcomes_tsv, select_theorems, MarketReport, WitnessAudit,
};
use matchkit::stability::BlockingPair;
use matchkit::witness::{
    blocking_pair_from_quasi_core_violation_m21, domination_from_blocking_pair_m21,
    domination_from_double_quasi_m2m, domination_from_firm_block_m21,
    setwise_domination_from_qw_violation_m2m,
};
use matchkit::{
    gen_corpus, gen_market, matching_count, parse_market, parse_matching, serialize_market,
    AgentId, AgentSet, Caps, Coalition, Error, GenConfig, Market, Mode, Search, Side, Strategy,
};

/// Exhaustive stability analysis of small two-sided matching markets.
#[derive(Parser)]
#[command(name = "matchkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a market file and run the construction-time checks.
    Validate { file: PathBuf },
    /// Membership of one matching in every notion, with witnesses.
    Classify {
        file: PathBuf,
        /// Matching such as "f1:w2 w3; f2:w1"; "-" is the empty matching.
        #[arg(long = "match", value_name = "SPEC")]
        matching: String,
    },
    /// Every stability set of a market.
    Sets {
        file: PathBuf,
        #[arg(long)]
        tsv: bool,
    },
    /// Check the inclusion theorems on market files or a generated corpus.
    Verify(VerifyArgs),
    /// Build a dominating matching (or blocking pair) from a witness.
    Witness(WitnessArgs),
    /// Print a generated market in the file format.
    Gen {
        #[command(flatten)]
        config: GenArgs,
        /// Corpus member to produce; without it the seed is used directly.
        #[arg(long)]
        index: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    files: Vec<PathBuf>,
    /// Check a generated corpus instead of (or on top of) files.
    #[arg(long)]
    gen: bool,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[command(flatten)]
    config: GenArgs,
    /// `all`, `m21`, `m2m` or a comma-separated list of theorem ids.
    #[arg(long, default_value = "all")]
    theorems: String,
    /// Also run every witness construction and report the tally.
    #[arg(long)]
    audit: bool,
    #[arg(long)]
    tsv: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(alias = "many-to-one")]
    M21,
    #[value(alias = "many-to-many")]
    M2m,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Quota,
    Subset,
    /// Alternate quota and subset by corpus index.
    Mixed,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    firms: usize,
    #[arg(long, default_value_t = 3)]
    workers: usize,
    #[arg(long, value_enum, default_value = "m21")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "quota")]
    strategy: StrategyArg,
    /// Quota range, `lo..hi` or a single number.
    #[arg(long, default_value = "1..2")]
    quota: String,
    /// Probability that a partner is acceptable, as `num/den`.
    #[arg(long, default_value = "3/4")]
    accept: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessKind {
    /// Many-to-one: domination from a blocking pair (`--pair`).
    BlockingPair,
    /// Many-to-one: domination from firm hiring out of `--set` (`--firm`).
    FirmBlock,
    /// Many-to-one: blocking pair from a domination (`--via`, `--coalition`, `--worker`).
    QuasiCore,
    /// Many-to-many: setwise domination from worker `--worker` offered `--set`.
    QwViolation,
    /// Many-to-many: domination from a blocking pair (`--pair`) of a matching
    /// quasi-stable on both sides.
    DoubleQuasi,
}

#[derive(Args)]
struct WitnessArgs {
    file: PathBuf,
    #[arg(long = "match", value_name = "SPEC")]
    matching: String,
    #[arg(long, value_enum)]
    kind: WitnessKind,
    /// Firm and worker, as `f1,w1`.
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    firm: Option<String>,
    #[arg(long)]
    worker: Option<String>,
    /// Space-separated labels.
    #[arg(long)]
    set: Option<String>,
    /// The dominating matching.
    #[arg(long)]
    via: Option<String>,
    /// Space-separated labels.
    #[arg(long)]
    coalition: Option<String>,
}

/// Why a command stopped: bad usage (exit 2) or anything else (exit 1).
enum Failure {
    Usage(String),
    Error(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e.to_string())
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Classify { file, matching } => cmd_classify(&file, &matching),
        Command::Sets { file, tsv } => cmd_sets(&file, tsv),
        Command::Verify(args) => cmd_verify(&args),
        Command::Witness(args) => cmd_witness(&args),
        Command::Gen { config, index, out } => cmd_gen(&config, index, out.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path) -> Result<Market, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Error(format!("{}: {e}", path.display())))?;
    parse_market(&text).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn market_name(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn caps() -> Result<Caps, Failure> {
    Ok(Caps::from_env()?)
}

fn cmd_validate(path: &Path) -> CmdResult {
    let market = load(path)?;
    println!(
        "ok: {} market, {} firms, {} workers, {} matchings",
        market.mode().keyword(),
        market.firm_count(),
        market.worker_count(),
        matching_count(&market)
    );
    let all_pi = market
        .agents()
        .all(|a| market.choice_of(a).is_path_independent());
    println!("every choice function is substitutable and consistent");
    println!(
        "path independence: {}",
        if all_pi {
            "holds for every agent"
        } else {
            "FAILS"
        }
    );
    Ok(if all_pi {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_classify(path: &Path, spec: &str) -> CmdResult {
    let market = load(path)?;
    let m = parse_matching(&market, spec)?;
    let search = Search::new(&market, &caps()?)?;
    print!("{}", render_classification(&market, &search.classify(&m)));
    Ok(ExitCode::SUCCESS)
}

fn cmd_sets(path: &Path, tsv: bool) -> CmdResult {
    let report = MarketReport::build(market_name(path), load(path)?, &caps()?)?;
    if tsv {
        print!("{}", report.render_sets_tsv());
    } else {
        print!("{}", report.render_sets());
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_quota(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("quota `{s}` is not `lo..hi` or a number"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once("..") {
        Some((lo, hi)) => Ok((num(lo)?, num(hi.trim_start_matches('='))?)),
        None => {
            let q = num(s)?;
            Ok((q, q))
        }
    }
}

impl GenArgs {
    fn config(&self) -> Result<GenConfig, Failure> {
        let (quota_min, quota_max) = parse_quota(&self.quota)?;
        let acceptability: Ratio<u32> = self
            .accept
            .parse()
            .ok()
            .filter(|r: &Ratio<u32>| *r.denom() != 0)
            .ok_or_else(|| {
                Failure::Usage(format!("acceptability `{}` is not `num/den`", self.accept))
            })?;
        Ok(GenConfig {
            seed: self.seed,
            n_firms: self.firms,
            n_workers: self.workers,
            mode: match self.mode {
                ModeArg::M21 => Mode::ManyToOne,
                ModeArg::M2m => Mode::ManyToMany,
            },
            quota_min,
            quota_max,
            acceptability,
            strategy: match self.strategy {
                StrategyArg::Subset => Strategy::SubsetRejection,
                _ => Strategy::QuotaPriority,
            },
        })
    }
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    if args.files.is_empty() && !args.gen {
        return Err(Failure::Usage("give market files, --gen, or both".into()));
    }
    let theorems = select_theorems(&args.theorems).map_err(|e| Failure::Usage(e.to_string()))?;
    let caps = caps()?;
    let mut markets: Vec<(String, Market)> = Vec::new();
    for path in &args.files {
        markets.push((market_name(path), load(path)?));
    }
    if args.gen {
        let config = args.config.config()?;
        let corpus = match args.config.strategy {
            StrategyArg::Mixed => gen_mixed_corpus(&config, args.count)?,
            _ => gen_corpus(&config, args.count)?,
        };
        markets.extend(
            corpus
                .into_iter()
                .enumerate()
                .map(|(i, m)| (format!("gen#{i}"), m)),
        );
    }
    let mut reports = Vec::with_capacity(markets.len());
    for (name, market) in markets {
        reports.push(MarketReport::build(name, market, &caps)?);
    }
    let outcomes = aggregate(&reports, &theorems);
    if args.tsv {
        print!("{}", render_outcomes_tsv(&outcomes));
    } else {
        print!("{}", render_outcomes(&outcomes));
    }
    let mut failed = outcomes.iter().any(|o| o.status.is_failure());
    if args.audit {
        let mut audit = WitnessAudit::default();
        for r in &reports {
            audit.merge(audit_witnesses(r, &caps)?);
        }
        println!(
            "witness audit: {} constructions, {} verified, {} round trips, {} double-quasi matchings dominated",
            audit.reports, audit.verified, audit.round_trips, audit.double_quasi
        );
        for f in &audit.failures {
            println!("  {f}");
        }
        failed |= !audit.is_clean();
    }
    Ok(if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn agent(market: &Market, label: &str, side: Side) -> Result<AgentId, Failure> {
    market
        .find(label.trim())
        .filter(|a| a.side == side)
        .ok_or_else(|| Error::UnknownAgent(label.trim().to_string()).into())
}

fn required<'a>(value: &'a Option<String>, flag: &str) -> Result<&'a str, Failure> {
    value
        .as_deref()
        .ok_or_else(|| Failure::Usage(format!("this witness kind needs --{flag}")))
}

fn label_set(market: &Market, text: &str, side: Side) -> Result<AgentSet, Failure> {
    text.trim_matches(|c| c == '{' || c == '}')
        .split_whitespace()
        .map(|l| agent(market, l, side).map(|a| a.index))
        .collect()
}

fn parse_pair(market: &Market, text: &str) -> Result<BlockingPair, Failure> {
    let (f, w) = text
        .split_once(',')
        .ok_or_else(|| Failure::Usage(format!("pair `{text}` is not `firm,worker`")))?;
    Ok(BlockingPair {
        firm: agent(market, f, Side::Firm)?.index,
        worker: agent(market, w, Side::Worker)?.index,
    })
}

fn cmd_witness(args: &WitnessArgs) -> CmdResult {
    let market = load(&args.file)?;
    let m = parse_matching(&market, &args.matching)?;
    let report = match args.kind {
        WitnessKind::BlockingPair => domination_from_blocking_pair_m21(
            &market,
            &m,
            parse_pair(&market, required(&args.pair, "pair")?)?,
        )?,
        WitnessKind::DoubleQuasi => domination_from_double_quasi_m2m(
            &market,
            &m,
            parse_pair(&market, required(&args.pair, "pair")?)?,
        )?,
        WitnessKind::FirmBlock => {
            let f = agent(&market, required(&args.firm, "firm")?, Side::Firm)?;
            let t = label_set(&market, required(&args.set, "set")?, Side::Worker)?;
            domination_from_firm_block_m21(&market, &m, f.index, t)?
        }
        WitnessKind::QwViolation => {
            let w = agent(&market, required(&args.worker, "worker")?, Side::Worker)?;
            let k = label_set(&market, required(&args.set, "set")?, Side::Firm)?;
            setwise_domination_from_qw_violation_m2m(&market, &m, w.index, k)?
        }
        WitnessKind::QuasiCore => {
            let w = agent(&market, required(&args.worker, "worker")?, Side::Worker)?;
            let via = parse_matching(&market, required(&args.via, "via")?)?;
            let members: Vec<AgentId> = required(&args.coalition, "coalition")?
                .trim_matches(|c| c == '{' || c == '}')
                .split_whitespace()
                .map(|l| {
                    market
                        .find(l)
                        .ok_or_else(|| Error::UnknownAgent(l.to_string()))
                })
                .collect::<Result<_, _>>()?;
            let s = Coalition::new(&market, members)?;
            let pair = blocking_pair_from_quasi_core_violation_m21(&market, &m, &via, &s, w.index)?;
            println!(
                "blocking pair ({}, {}) with matched worker",
                market.label(AgentId::firm(pair.firm)),
                market.label(AgentId::worker(pair.worker))
            );
            return Ok(ExitCode::SUCCESS);
        }
    };
    print!("{}", render_construction(&market, &report));
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: &GenArgs, index: Option<u64>, out: Option<&Path>) -> CmdResult {
    let mut config = args.config()?;
    if let Some(i) = index {
        config.seed = derive_seed(args.seed, i);
        if matches!(args.strategy, StrategyArg::Mixed) && i % 2 == 1 {
            config.strategy = Strategy::SubsetRejection;
        }
    } else if matches!(args.strategy, StrategyArg::Mixed) {
        return Err(Failure::Usage("--strategy mixed needs --index".into()));
    }
    let market = gen_market(&config)?;
    let text = serialize_market(&market);
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Error(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
