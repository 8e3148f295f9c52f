use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::analytics::{ChannelClass, ProfitReport, TheftReport, VictimReport};
use crate::cluster::{Archetype, Campaign};
use crate::fpfilter::{Exclusion, SuspicionVerdict};
use crate::ingest::CollectionMetadata;
use crate::matcher::MatchResult;
use crate::squatgen::Tactic;
use crate::types::{dec_u256, format_ether, Address, U256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetRow {
    pub seed: String,
    pub squats: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopRow {
    pub contract: Address,
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignRow {
    pub id: String,
    pub size: usize,
    pub archetype: Archetype,
    pub creators: usize,
    pub external_links: usize,
    pub targets: BTreeSet<String>,
}

/// Aggregate document written at the end of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub matched_candidates: usize,
    pub prefiltered: BTreeMap<Exclusion, usize>,
    pub squat_collections: usize,
    pub squat_contracts: Vec<Address>,
    pub targets: usize,
    pub squats_by_tactic: BTreeMap<Tactic, usize>,
    pub campaigns: usize,
    pub campaign_archetypes: BTreeMap<Archetype, usize>,
    pub clustered_collections: usize,
    /// Sum of per-collection victim counts.
    pub victims_total: usize,
    /// Distinct victim addresses across all collections.
    pub victims_distinct: usize,
    #[serde(with = "dec_u256")]
    pub mint_fee_wei: U256,
    #[serde(with = "dec_u256")]
    pub creator_earnings_wei: U256,
    #[serde(with = "dec_u256")]
    pub total_profit_wei: U256,
    pub total_profit_eth: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_profit_usd: Option<f64>,
    pub profitable_collections: usize,
    pub channel_classes: BTreeMap<ChannelClass, usize>,
    pub uri_theft_pairs: usize,
    pub image_exact_pairs: usize,
    pub image_similar_pairs: usize,
    pub uri_reuse_collections: usize,
    pub top_targets: Vec<TargetRow>,
    pub top_profit: Vec<TopRow>,
    pub top_victims: Vec<TopRow>,
    pub top_campaigns: Vec<CampaignRow>,
}

pub(super) struct Inputs<'a> {
    pub verdicts: &'a [SuspicionVerdict],
    pub squats: &'a [(SuspicionVerdict, MatchResult)],
    pub campaigns: &'a [Campaign],
    pub profits: &'a [ProfitReport],
    pub victims: &'a [VictimReport],
    pub theft: &'a [TheftReport],
    pub meta: &'a BTreeMap<Address, CollectionMetadata>,
    pub prefiltered: BTreeMap<Exclusion, usize>,
    pub top_n: usize,
}

fn count<K: Ord>(items: impl IntoIterator<Item = K>) -> BTreeMap<K, usize> {
    let mut out = BTreeMap::new();
    for k in items {
        *out.entry(k).or_default() += 1;
    }
    out
}

pub(super) fn summarize(i: Inputs<'_>) -> Summary {
    let squat_set: BTreeSet<Address> = i.squats.iter().map(|(v, _)| v.contract).collect();
    let seed_of: BTreeMap<Address, &str> =
        i.squats.iter().map(|(_, m)| (m.candidate.contract_address, m.seed_name.as_str())).collect();
    let name_of = |c: &Address| -> String {
        i.squats
            .iter()
            .find(|(_, m)| m.candidate.contract_address == *c)
            .map(|(_, m)| m.candidate.name.clone())
            .or_else(|| i.meta.get(c).map(|m| m.name.clone()))
            .unwrap_or_default()
    };

    let mut targets: Vec<TargetRow> = count(i.squats.iter().map(|(_, m)| m.seed_name.clone()))
        .into_iter()
        .map(|(seed, squats)| TargetRow { seed, squats })
        .collect();
    let target_count = targets.len();
    targets.sort_by(|a, b| b.squats.cmp(&a.squats).then_with(|| a.seed.cmp(&b.seed)));
    targets.truncate(i.top_n);

    let mint_fee_wei = i.profits.iter().fold(U256::zero(), |acc, p| acc + p.mint_fee_wei);
    let creator_earnings_wei = i.profits.iter().fold(U256::zero(), |acc, p| acc + p.creator_earnings_wei);
    let total_profit_wei = mint_fee_wei + creator_earnings_wei;
    let total_profit_usd = if i.profits.iter().any(|p| p.total_usd.is_some()) {
        i.profits.iter().map(|p| p.total_usd).sum::<Option<f64>>()
    } else {
        None
    };

    let mut top_profit: Vec<&ProfitReport> = i.profits.iter().filter(|p| p.profitable).collect();
    top_profit.sort_by(|a, b| b.total_wei.cmp(&a.total_wei).then_with(|| a.contract.cmp(&b.contract)));
    let top_profit = top_profit
        .into_iter()
        .take(i.top_n)
        .map(|p| TopRow { contract: p.contract, name: name_of(&p.contract), value: format_ether(p.total_wei) })
        .collect();

    let mut top_victims: Vec<&VictimReport> = i.victims.iter().filter(|v| v.victim_count > 0).collect();
    top_victims.sort_by(|a, b| b.victim_count.cmp(&a.victim_count).then_with(|| a.contract.cmp(&b.contract)));
    let top_victims = top_victims
        .into_iter()
        .take(i.top_n)
        .map(|v| TopRow { contract: v.contract, name: name_of(&v.contract), value: v.victim_count.to_string() })
        .collect();

    let distinct: BTreeSet<Address> =
        i.victims.iter().flat_map(|v| v.minter_victims.union(&v.buyer_victims).copied()).collect();

    let theft: Vec<&TheftReport> = i.theft.iter().filter(|t| squat_set.contains(&t.squat)).collect();

    Summary {
        matched_candidates: i.verdicts.len(),
        prefiltered: i.prefiltered,
        squat_collections: squat_set.len(),
        squat_contracts: squat_set.iter().copied().collect(),
        targets: target_count,
        squats_by_tactic: count(i.squats.iter().map(|(_, m)| m.tactic)),
        campaigns: i.campaigns.len(),
        campaign_archetypes: count(i.campaigns.iter().map(|c| c.archetype)),
        clustered_collections: i.campaigns.iter().map(|c| c.members.len()).sum(),
        victims_total: i.victims.iter().map(|v| v.victim_count).sum(),
        victims_distinct: distinct.len(),
        mint_fee_wei,
        creator_earnings_wei,
        total_profit_wei,
        total_profit_eth: format_ether(total_profit_wei),
        total_profit_usd,
        profitable_collections: i.profits.iter().filter(|p| p.profitable).count(),
        channel_classes: count(i.profits.iter().map(ProfitReport::class)),
        uri_theft_pairs: theft.iter().map(|t| t.uri_theft_pairs.len()).sum(),
        image_exact_pairs: theft.iter().map(|t| t.image_exact_pairs.len()).sum(),
        image_similar_pairs: theft.iter().map(|t| t.image_similar_pairs.len()).sum(),
        uri_reuse_collections: theft.iter().filter(|t| t.uri_reuse).count(),
        top_targets: targets,
        top_profit,
        top_victims,
        top_campaigns: i
            .campaigns
            .iter()
            .take(i.top_n)
            .map(|c| CampaignRow {
                id: c.id.clone(),
                size: c.members.len(),
                archetype: c.archetype,
                creators: c.creators.len(),
                external_links: c.external_links.len(),
                targets: c.members.iter().filter_map(|m| seed_of.get(m).map(|s| s.to_string())).collect(),
            })
            .collect(),
    }
}
