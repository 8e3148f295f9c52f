use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use nftsquat::pipeline::{Pipeline, PipelineConfig, Stage};
use nftsquat::types::U256;
use nftsquat::Error;

/// Find, filter, cluster and measure lookalike NFT collections in a chain snapshot.
///
/// Every option may also be given in a JSON config file under the same
/// kebab-case key; flags override the file.
#[derive(Parser, Debug)]
#[command(name = "nftsquat", version)]
struct Cli {
    /// JSON config file.
    #[arg(long, env = "NFTSQUAT_CONFIG", global = true)]
    config: Option<PathBuf>,

    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// More log output on stderr; repeat for debug.
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,

    /// Only warnings and errors on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Generate the squatting keyword corpus from the seed list.
    GenCorpus,
    /// Match candidate collection names against the corpus.
    Match,
    /// Decode NFT transfer events from raw logs.
    IngestEvents,
    /// Decode marketplace sales from raw logs.
    IngestTrades,
    /// Hash token images into the hash cache.
    HashImages,
    /// Compare token URIs and image hashes with the imitated collection.
    TheftScan,
    /// Apply prefilters and the five-criterion vote.
    Filter,
    /// Group suspicious collections into campaigns.
    Cluster,
    /// Compute profit, victim and supply reports and the summary.
    Report,
    /// Run every stage in order.
    Pipeline,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long, global = true)]
    seeds: Option<PathBuf>,
    #[arg(long, global = true)]
    candidates: Option<PathBuf>,
    #[arg(long, global = true)]
    logs: Option<PathBuf>,
    #[arg(long, global = true)]
    transactions: Option<PathBuf>,
    #[arg(long, global = true)]
    metadata: Option<PathBuf>,
    #[arg(long, global = true)]
    market_map: Option<PathBuf>,
    /// Extra common English words (suppressed as keywords).
    #[arg(long, global = true)]
    english: Option<PathBuf>,
    /// Extra common crypto words (suppressed as keywords).
    #[arg(long, global = true)]
    crypto: Option<PathBuf>,
    /// Extra homoglyph groups, one whitespace-separated group per line.
    #[arg(long, global = true)]
    homoglyphs: Option<PathBuf>,
    /// Extra homophone groups, one whitespace-separated group per line.
    #[arg(long, global = true)]
    homophones: Option<PathBuf>,
    /// Extra combination words.
    #[arg(long, global = true)]
    combination: Option<PathBuf>,
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    case_raising_homoglyphs: Option<bool>,
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    adjacent_key: Option<bool>,
    #[arg(long, global = true)]
    exchanges: Option<PathBuf>,
    #[arg(long, global = true)]
    whitelist: Option<PathBuf>,
    #[arg(long, global = true)]
    labels: Option<PathBuf>,
    #[arg(long, global = true)]
    social: Option<PathBuf>,
    #[arg(long, global = true)]
    images: Option<PathBuf>,
    #[arg(long, global = true)]
    hash_cache: Option<PathBuf>,
    #[arg(long, global = true)]
    usd_table: Option<PathBuf>,
    #[arg(long, global = true)]
    price_drop_fraction: Option<f64>,
    #[arg(long, global = true)]
    price_unrecovered_days: Option<u32>,
    #[arg(long, global = true)]
    transfer_drop_fraction: Option<f64>,
    #[arg(long, global = true)]
    transfer_low_months: Option<u32>,
    #[arg(long, global = true)]
    social_silence_days: Option<u32>,
    #[arg(long, global = true)]
    dhash_threshold: Option<u32>,
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    dhash_inclusive: Option<bool>,
    /// Deposit matching amount bound in wei (exclusive).
    #[arg(long, global = true)]
    max_diff_wei: Option<String>,
    /// Deposit matching block-gap bound (inclusive).
    #[arg(long, global = true)]
    max_blocks: Option<u64>,
    #[arg(long, global = true)]
    top_n: Option<usize>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

macro_rules! set {
    ($($src:expr => $dst:expr),* $(,)?) => {
        $(if let Some(v) = $src { $dst = v.into(); })*
    };
}

impl Overrides {
    fn apply(self, cfg: &mut PipelineConfig) -> Result<(), Error> {
        let o = self;
        set! {
            o.seeds.map(Some) => cfg.seeds,
            o.candidates.map(Some) => cfg.candidates,
            o.logs.map(Some) => cfg.logs,
            o.transactions.map(Some) => cfg.transactions,
            o.metadata.map(Some) => cfg.metadata,
            o.market_map.map(Some) => cfg.market_map,
            o.english.map(Some) => cfg.word_lists.english,
            o.crypto.map(Some) => cfg.word_lists.crypto,
            o.homoglyphs.map(Some) => cfg.word_lists.homoglyphs,
            o.homophones.map(Some) => cfg.word_lists.homophones,
            o.combination.map(Some) => cfg.word_lists.combination,
            o.case_raising_homoglyphs => cfg.mutation.case_raising_homoglyphs,
            o.adjacent_key => cfg.mutation.adjacent_key,
            o.exchanges.map(Some) => cfg.exchanges,
            o.whitelist.map(Some) => cfg.whitelist,
            o.labels.map(Some) => cfg.labels,
            o.social.map(Some) => cfg.social,
            o.images.map(Some) => cfg.images,
            o.hash_cache.map(Some) => cfg.hash_cache,
            o.usd_table.map(Some) => cfg.usd_table,
            o.price_drop_fraction => cfg.thresholds.price_drop_fraction,
            o.price_unrecovered_days => cfg.thresholds.price_unrecovered_days,
            o.transfer_drop_fraction => cfg.thresholds.transfer_drop_fraction,
            o.transfer_low_months => cfg.thresholds.transfer_low_months,
            o.social_silence_days => cfg.thresholds.social_silence_days,
            o.dhash_threshold => cfg.thresholds.dhash_threshold,
            o.dhash_inclusive => cfg.thresholds.dhash_inclusive,
            o.max_blocks => cfg.deposit_bounds.max_blocks,
            o.top_n => cfg.top_n,
            o.out_dir => cfg.out_dir,
        }
        if let Some(s) = o.max_diff_wei {
            cfg.deposit_bounds.max_diff_wei = U256::from_dec_str(&s)
                .map_err(|e| Error::invalid("max-diff-wei", format!("{s:?}: {e:?}")))?;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::invalid("threads", e.to_string()))?;
    }
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::from_file(p)?,
        None => PipelineConfig::default(),
    };
    cli.overrides.apply(&mut cfg)?;
    let pipeline = Pipeline::new(cfg)?;
    let stage = match cli.command {
        Command::GenCorpus => Stage::GenCorpus,
        Command::Match => Stage::Match,
        Command::IngestEvents => Stage::IngestEvents,
        Command::IngestTrades => Stage::IngestTrades,
        Command::HashImages => Stage::HashImages,
        Command::TheftScan => Stage::TheftScan,
        Command::Filter => Stage::Filter,
        Command::Cluster => Stage::Cluster,
        Command::Report => Stage::Report,
        Command::Pipeline => {
            pipeline.run_all()?;
            return Ok(());
        }
    };
    pipeline.run(stage)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => "warn",
        (false, 0) => "info",
        (false, _) => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
