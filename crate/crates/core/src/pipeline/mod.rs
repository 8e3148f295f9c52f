//! File-to-file stages wiring the library into one deterministic batch run.
//!
//! Every stage reads only its declared inputs and writes its outputs into
//! the configured output directory, sorted so that reruns are byte-identical.

mod config;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{self, TheftReport, UsdTable};
use crate::cluster::{self, Campaign, SquatNode};
use crate::error::{Error, Result};
use crate::fpfilter::{self, Exclusion, SocialActivity, SuspicionVerdict, YearMonth};
use crate::imagehash::{self, HashCache};
use crate::ingest::{
    self, CollectionMetadata, ExternalLabel, LabelKind, MarketMap, PlainTransaction, RawLogRecord, TradeRecord,
    TransferEvent,
};
use crate::jsonl;
use crate::matcher::{CandidateCollection, MatchResult, Matcher};
use crate::squatgen::{self, SeedCollection, SquatKeyword, WordLists};
use crate::types::Address;

pub use config::PipelineConfig;
pub use report::{CampaignRow, Summary, TargetRow, TopRow};

pub const CORPUS: &str = "corpus.jsonl";
pub const MATCHES: &str = "matches.jsonl";
pub const TRANSFERS: &str = "transfers.jsonl";
pub const TRADES: &str = "trades.jsonl";
pub const THEFT: &str = "theft.jsonl";
pub const VERDICTS: &str = "verdicts.jsonl";
pub const CAMPAIGNS: &str = "campaigns.jsonl";
pub const DEPOSITS: &str = "deposits.jsonl";
pub const CLUSTER_SUMMARY: &str = "cluster_summary.json";
pub const PROFITS: &str = "profits.jsonl";
pub const VICTIMS: &str = "victims.jsonl";
pub const STATS: &str = "stats.jsonl";
pub const SUMMARY: &str = "summary.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    GenCorpus,
    Match,
    IngestEvents,
    IngestTrades,
    HashImages,
    TheftScan,
    Filter,
    Cluster,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::GenCorpus,
        Stage::Match,
        Stage::IngestEvents,
        Stage::IngestTrades,
        Stage::HashImages,
        Stage::TheftScan,
        Stage::Filter,
        Stage::Cluster,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::GenCorpus => "gen-corpus",
            Stage::Match => "match",
            Stage::IngestEvents => "ingest-events",
            Stage::IngestTrades => "ingest-trades",
            Stage::HashImages => "hash-images",
            Stage::TheftScan => "theft-scan",
            Stage::Filter => "filter",
            Stage::Cluster => "cluster",
            Stage::Report => "report",
        }
    }
}

/// Labels file line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub contract: Address,
    pub source: String,
    pub label: LabelKind,
}

/// Social snapshot file line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocialRecord {
    pub contract: Address,
    #[serde(default)]
    pub post_timestamps: Vec<u64>,
}

/// Reads a one-address-per-line list.
pub fn read_address_list(path: &Path) -> Result<BTreeSet<Address>> {
    jsonl::read_lines(path)?
        .into_iter()
        .map(|(line, s)| {
            s.parse().map_err(|e: Error| Error::Parse { path: path.to_path_buf(), line, message: e.to_string() })
        })
        .collect()
}

fn optional_list(path: Option<&Path>) -> Result<BTreeSet<Address>> {
    path.map_or(Ok(BTreeSet::new()), read_address_list)
}

fn optional_jsonl<T: serde::de::DeserializeOwned>(path: Option<&Path>) -> Result<Vec<T>> {
    path.map_or(Ok(Vec::new()), jsonl::read)
}

fn read_seeds(path: &Path) -> Result<Vec<SeedCollection>> {
    let seeds: Vec<(usize, SeedCollection)> = jsonl::read_numbered(path)?;
    seeds
        .into_iter()
        .map(|(line, s)| {
            s.validate().map_err(|e| Error::Parse { path: path.to_path_buf(), line, message: e.to_string() })?;
            Ok(s)
        })
        .collect()
}

/// One pipeline run over a validated configuration.
pub struct Pipeline {
    cfg: PipelineConfig,
    lists: WordLists,
}

impl Pipeline {
    pub fn new(mut cfg: PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        let mut lists = WordLists::load(&cfg.word_lists)?;
        lists.settings = cfg.mutation;
        std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
        Ok(Pipeline { cfg, lists })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    fn out(&self, name: &str) -> std::path::PathBuf {
        self.cfg.out(name)
    }

    pub fn run(&self, stage: Stage) -> Result<()> {
        log::info!("stage {}", stage.name());
        match stage {
            Stage::GenCorpus => self.gen_corpus(),
            Stage::Match => self.match_candidates(),
            Stage::IngestEvents => self.ingest_events(),
            Stage::IngestTrades => self.ingest_trades(),
            Stage::HashImages => self.hash_images(),
            Stage::TheftScan => self.theft_scan(),
            Stage::Filter => self.filter(),
            Stage::Cluster => self.cluster(),
            Stage::Report => self.report().map(|_| ()),
        }
    }

    /// Every stage in order. Image hashing is skipped when no image
    /// directory is configured.
    pub fn run_all(&self) -> Result<Summary> {
        for stage in Stage::ALL {
            if stage == Stage::Report {
                break;
            }
            if stage == Stage::HashImages && self.cfg.images.is_none() {
                log::info!("no image directory configured; hash-images skipped");
                continue;
            }
            self.run(stage)?;
        }
        log::info!("stage report");
        self.report()
    }

    fn seeds(&self) -> Result<Vec<SeedCollection>> {
        read_seeds(self.cfg.require("seeds", &self.cfg.seeds)?)
    }

    fn metadata(&self) -> Result<BTreeMap<Address, CollectionMetadata>> {
        match &self.cfg.metadata {
            Some(p) => Ok(ingest::load_metadata(p)?.records),
            None => Ok(BTreeMap::new()),
        }
    }

    fn logs(&self) -> Result<Vec<RawLogRecord>> {
        jsonl::read(self.cfg.require("logs", &self.cfg.logs)?)
    }

    pub fn gen_corpus(&self) -> Result<()> {
        let corpus = squatgen::generate_corpus(&self.seeds()?, &self.lists);
        let n = jsonl::write(self.out(CORPUS), &corpus.keywords)?;
        log::info!("{n} keywords, {} seeds skipped", corpus.skipped_seeds.len());
        Ok(())
    }

    pub fn match_candidates(&self) -> Result<()> {
        let corpus: Vec<SquatKeyword> = jsonl::read(self.out(CORPUS))?;
        let covered: BTreeSet<&str> = corpus.iter().map(|k| k.seed_name.as_str()).collect();
        // Only seeds present in the corpus take part, so an empty corpus matches nothing.
        let seeds = self.seeds()?;
        let official: BTreeSet<Address> = seeds.iter().map(|s| s.contract_address).collect();
        let seeds: Vec<SeedCollection> = seeds.into_iter().filter(|s| covered.contains(s.name.as_str())).collect();
        let candidates: Vec<CandidateCollection> =
            jsonl::read(self.cfg.require("candidates", &self.cfg.candidates)?)?;
        let candidates: Vec<CandidateCollection> =
            candidates.into_iter().filter(|c| !official.contains(&c.contract_address)).collect();
        let out = Matcher::new(&corpus, &seeds, &self.lists).match_all(&candidates);
        let n = jsonl::write(self.out(MATCHES), &out.matches)?;
        log::info!("{n} of {} candidates matched, {} skipped", candidates.len(), out.skipped.len());
        Ok(())
    }

    pub fn ingest_events(&self) -> Result<()> {
        let logs = self.logs()?;
        let (events, stats) = ingest::decode_transfers(&logs)?;
        jsonl::write(self.out(TRANSFERS), &events)?;
        log::info!(
            "{} transfer events from {} logs ({} unrelated, {} fungible)",
            stats.events,
            logs.len(),
            stats.skipped_unknown_topic,
            stats.skipped_fungible
        );
        Ok(())
    }

    pub fn ingest_trades(&self) -> Result<()> {
        let logs = self.logs()?;
        let map = MarketMap::load(self.cfg.require("market-map", &self.cfg.market_map)?)?;
        let (trades, stats) = ingest::decode_trades(&logs, &map)?;
        jsonl::write(self.out(TRADES), &trades)?;
        log::info!("{} trades ({} self-trades rejected)", stats.trades, stats.rejected_self_trades);
        Ok(())
    }

    #[cfg(feature = "image-decode")]
    pub fn hash_images(&self) -> Result<()> {
        let dir = self.cfg.require("images", &self.cfg.images)?;
        let records = imagehash::hash_directory(dir)?;
        let mut cache = HashCache::new();
        for r in records {
            cache.entry(r.contract).or_default().insert(r.token_id, r.dhash);
        }
        let n = imagehash::write_hash_cache(self.cfg.hash_cache_path(), &cache)?;
        log::info!("{n} images hashed");
        Ok(())
    }

    #[cfg(not(feature = "image-decode"))]
    pub fn hash_images(&self) -> Result<()> {
        Err(Error::invalid("build", "image decoding is disabled in this build"))
    }

    pub fn theft_scan(&self) -> Result<()> {
        let matches: Vec<MatchResult> = jsonl::read(self.out(MATCHES))?;
        let seeds: BTreeMap<String, SeedCollection> = self.seeds()?.into_iter().map(|s| (s.name.clone(), s)).collect();
        let meta = self.metadata()?;
        let cache_path = self.cfg.hash_cache_path();
        let hashes = if cache_path.exists() {
            imagehash::load_hash_cache(&cache_path)?
        } else {
            log::warn!("{}: no hash cache; image comparison skipped", cache_path.display());
            HashCache::new()
        };
        let threshold = self.cfg.thresholds.dhash();
        let empty = BTreeMap::new();
        let reports: Vec<TheftReport> = matches
            .par_iter()
            .filter_map(|m| {
                let official = meta.get(&seeds.get(&m.seed_name)?.contract_address)?;
                let squat = meta.get(&m.candidate.contract_address)?;
                Some(analytics::theft_scan(
                    official,
                    squat,
                    hashes.get(&official.contract).unwrap_or(&empty),
                    hashes.get(&squat.contract).unwrap_or(&empty),
                    threshold,
                ))
            })
            .collect();
        let n = jsonl::write(self.out(THEFT), &reports)?;
        log::info!("{n} theft reports");
        Ok(())
    }

    pub fn filter(&self) -> Result<()> {
        let matches: Vec<MatchResult> = jsonl::read(self.out(MATCHES))?;
        let transfers: Vec<TransferEvent> = jsonl::read(self.out(TRANSFERS))?;
        let trades: Vec<TradeRecord> = jsonl::read(self.out(TRADES))?;
        let theft: Vec<TheftReport> = jsonl::read(self.out(THEFT))?;
        let seeds: BTreeMap<String, SeedCollection> = self.seeds()?.into_iter().map(|s| (s.name.clone(), s)).collect();
        let meta = self.metadata()?;
        let whitelist = optional_list(self.cfg.whitelist.as_deref())?;

        let mut labels: BTreeMap<Address, Vec<ExternalLabel>> = BTreeMap::new();
        for (c, m) in &meta {
            labels.entry(*c).or_default().extend(m.external_labels.iter().cloned());
        }
        for l in optional_jsonl::<LabelRecord>(self.cfg.labels.as_deref())? {
            labels.entry(l.contract).or_default().push(ExternalLabel { source: l.source, label: l.label });
        }
        let mut posts: BTreeMap<Address, Vec<u64>> = BTreeMap::new();
        for s in optional_jsonl::<SocialRecord>(self.cfg.social.as_deref())? {
            posts.entry(s.contract).or_default().extend(s.post_timestamps);
        }
        let image_hits: BTreeSet<Address> = theft.iter().filter(|t| t.image_hits()).map(|t| t.squat).collect();

        let snapshot_end = transfers
            .iter()
            .map(|t| t.timestamp)
            .chain(trades.iter().map(|t| t.timestamp))
            .max()
            .map(YearMonth::of_timestamp);
        let mut last_activity: BTreeMap<Address, u64> = BTreeMap::new();
        for (c, ts) in transfers.iter().map(|t| (t.contract, t.timestamp)).chain(trades.iter().map(|t| (t.contract, t.timestamp))) {
            let e = last_activity.entry(c).or_default();
            *e = (*e).max(ts);
        }
        let t = &self.cfg.thresholds;
        let mut trades_of: BTreeMap<Address, Vec<&TradeRecord>> = BTreeMap::new();
        for tr in &trades {
            trades_of.entry(tr.contract).or_default().push(tr);
        }
        let mut transfers_of: BTreeMap<Address, Vec<&TransferEvent>> = BTreeMap::new();
        for tf in &transfers {
            transfers_of.entry(tf.contract).or_default().push(tf);
        }

        let verdicts = matches
            .par_iter()
            .map(|m| {
                let c = m.candidate.contract_address;
                let seed = seeds
                    .get(&m.seed_name)
                    .ok_or_else(|| Error::Integrity(format!("match for {c} names unknown seed {:?}", m.seed_name)))?;
                if let Some(ex) = fpfilter::prefilter(m, seed, &whitelist) {
                    return Ok(SuspicionVerdict::excluded(c, ex));
                }
                let floor = fpfilter::daily_floor_series(c, trades_of.get(&c).into_iter().flatten().copied());
                let monthly = fpfilter::monthly_transfer_series(
                    c,
                    transfers_of.get(&c).into_iter().flatten().copied(),
                    snapshot_end,
                );
                let mut post_ts = posts.get(&c).cloned().unwrap_or_default();
                post_ts.sort_unstable();
                let social = SocialActivity {
                    contract: c,
                    post_timestamps: post_ts,
                    last_onchain_activity: last_activity.get(&c).copied().unwrap_or(0),
                };
                let lbl = labels.get(&c).map_or(&[][..], Vec::as_slice);
                fpfilter::evaluate(c, &floor, &monthly, &social, lbl, image_hits.contains(&c), t)
            })
            .collect::<Result<Vec<_>>>()?;
        let n = jsonl::write(self.out(VERDICTS), &verdicts)?;
        let suspicious = verdicts.iter().filter(|v| v.suspicious).count();
        let excluded = verdicts.iter().filter(|v| v.prefilter_exclusion.is_some()).count();
        log::info!("{n} verdicts: {suspicious} suspicious, {excluded} prefiltered");
        Ok(())
    }

    /// Suspicious collections with their match records, in verdict order.
    fn squats(&self) -> Result<Vec<(SuspicionVerdict, MatchResult)>> {
        let verdicts: Vec<SuspicionVerdict> = jsonl::read(self.out(VERDICTS))?;
        let matches: BTreeMap<Address, MatchResult> = jsonl::read::<MatchResult>(self.out(MATCHES))?
            .into_iter()
            .map(|m| (m.candidate.contract_address, m))
            .collect();
        verdicts
            .into_iter()
            .filter(|v| v.suspicious)
            .map(|v| {
                let m = matches
                    .get(&v.contract)
                    .cloned()
                    .ok_or_else(|| Error::Integrity(format!("verdict for {} has no match record", v.contract)))?;
                Ok((v, m))
            })
            .collect()
    }

    fn official_links(&self, meta: &BTreeMap<Address, CollectionMetadata>) -> Result<Vec<String>> {
        let seeds: BTreeSet<Address> = self.seeds()?.iter().map(|s| s.contract_address).collect();
        Ok(meta
            .values()
            .filter(|m| m.official_flag || seeds.contains(&m.contract))
            .filter_map(|m| m.external_link.clone())
            .collect())
    }

    pub fn cluster(&self) -> Result<()> {
        let squats = self.squats()?;
        let meta = self.metadata()?;
        let nodes: Vec<SquatNode> = squats
            .iter()
            .map(|(_, m)| SquatNode {
                contract: m.candidate.contract_address,
                creator: m.candidate.creator,
                external_link: meta.get(&m.candidate.contract_address).and_then(|x| x.external_link.clone()),
            })
            .collect();
        let txs: Vec<PlainTransaction> = optional_jsonl(self.cfg.transactions.as_deref())?;
        let exchanges = optional_list(self.cfg.exchanges.as_deref())?;
        let out = cluster::cluster(&nodes, &self.official_links(&meta)?, &txs, &exchanges, self.cfg.deposit_bounds)?;
        jsonl::write(self.out(CAMPAIGNS), &out.campaigns)?;
        jsonl::write(self.out(DEPOSITS), &out.deposits)?;
        jsonl::write_document(self.out(CLUSTER_SUMMARY), &out.summary)?;
        log::info!(
            "{} campaigns over {} collections, {} singletons",
            out.summary.campaigns,
            out.summary.clustered_collections,
            out.summary.singletons
        );
        Ok(())
    }

    pub fn report(&self) -> Result<Summary> {
        let squats = self.squats()?;
        let campaigns: Vec<Campaign> = jsonl::read(self.out(CAMPAIGNS))?;
        let transfers: Vec<TransferEvent> = jsonl::read(self.out(TRANSFERS))?;
        let trades: Vec<TradeRecord> = jsonl::read(self.out(TRADES))?;
        let theft: Vec<TheftReport> = jsonl::read(self.out(THEFT))?;
        let verdicts: Vec<SuspicionVerdict> = jsonl::read(self.out(VERDICTS))?;
        let meta = self.metadata()?;
        let usd = self.cfg.usd_table.as_deref().map(UsdTable::load).transpose()?;

        let contracts: BTreeSet<Address> = squats.iter().map(|(v, _)| v.contract).collect();
        let creator_of: BTreeMap<Address, Address> =
            squats.iter().map(|(_, m)| (m.candidate.contract_address, m.candidate.creator)).collect();
        let mut scammers: BTreeMap<Address, BTreeSet<Address>> =
            creator_of.iter().map(|(&c, &k)| (c, BTreeSet::from([k]))).collect();
        for camp in &campaigns {
            for m in &camp.members {
                scammers.entry(*m).or_default().extend(camp.creators.iter().copied());
            }
        }

        let (profits, warnings) = analytics::profits(&contracts, &transfers, &trades, &meta, usd.as_ref());
        for w in &warnings {
            log::warn!("{w}");
        }
        let victims = analytics::victims(&contracts, &transfers, &trades, &scammers);
        let stats = analytics::stats(&contracts, &transfers, &trades, &meta)?;
        jsonl::write(self.out(PROFITS), &profits)?;
        jsonl::write(self.out(VICTIMS), &victims)?;
        jsonl::write(self.out(STATS), &stats)?;

        let prefiltered: BTreeMap<Exclusion, usize> =
            verdicts.iter().filter_map(|v| v.prefilter_exclusion).fold(BTreeMap::new(), |mut acc, e| {
                *acc.entry(e).or_default() += 1;
                acc
            });
        let summary = report::summarize(report::Inputs {
            verdicts: &verdicts,
            squats: &squats,
            campaigns: &campaigns,
            profits: &profits,
            victims: &victims,
            theft: &theft,
            meta: &meta,
            prefiltered,
            top_n: self.cfg.top_n,
        });
        jsonl::write_document(self.out(SUMMARY), &summary)?;
        log::info!(
            "{} squat collections, {} campaigns, {} victims, {} wei total profit",
            summary.squat_collections,
            summary.campaigns,
            summary.victims_distinct,
            summary.total_profit_wei
        );
        Ok(summary)
    }
}
