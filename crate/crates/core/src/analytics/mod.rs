//! Per-collection measures: mint fees, creator earnings, victims, supply,
//! activity span, and content theft against the imitated collection.

mod usd;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagehash::{near_duplicates, DHash64, DistanceThreshold, ImagePair};
use crate::ingest::{CollectionMetadata, TradeRecord, TransferEvent, TransferKind};
use crate::types::{dec_u256, Address, Hash32, TokenId, U256};

pub use usd::UsdTable;

fn by_contract<'a, T, I>(items: I, key: impl Fn(&T) -> Address) -> BTreeMap<Address, Vec<&'a T>>
where
    I: IntoIterator<Item = &'a T>,
    T: 'a,
{
    let mut out: BTreeMap<Address, Vec<&T>> = BTreeMap::new();
    for it in items {
        out.entry(key(it)).or_default().push(it);
    }
    out
}

/// ETH paid in transactions that mint at least one token, counted once per
/// transaction and contract.
pub fn mint_fees<'a>(transfers: impl IntoIterator<Item = &'a TransferEvent>) -> BTreeMap<Address, U256> {
    let mut seen: BTreeSet<(Address, Hash32)> = BTreeSet::new();
    let mut out: BTreeMap<Address, U256> = BTreeMap::new();
    for t in transfers {
        if t.kind != TransferKind::Mint {
            continue;
        }
        let fee = out.entry(t.contract).or_default();
        if seen.insert((t.contract, t.tx_hash)) {
            *fee += t.tx_value_wei;
        }
    }
    out
}

/// Royalty on one sale, rounded down to the wei.
pub fn royalty(price_wei: U256, bps: u32) -> U256 {
    price_wei * U256::from(bps) / U256::from(10_000u32)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Earnings {
    pub by_contract: BTreeMap<Address, U256>,
    pub warnings: Vec<String>,
}

pub fn creator_earnings<'a>(
    trades: impl IntoIterator<Item = &'a TradeRecord>,
    meta: &BTreeMap<Address, CollectionMetadata>,
) -> Earnings {
    let mut out = Earnings::default();
    let mut warned = BTreeSet::new();
    for t in trades {
        let bps = match meta.get(&t.contract) {
            Some(m) => m.royalty_bps,
            None => {
                if warned.insert(t.contract) {
                    let w = format!("{}: no metadata; royalty taken as 0", t.contract);
                    log::warn!("{w}");
                    out.warnings.push(w);
                }
                0
            }
        };
        *out.by_contract.entry(t.contract).or_default() += royalty(t.price_wei, bps);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProfitChannel {
    MintFees,
    CreatorEarnings,
}

/// Which revenue sources a collection drew on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChannelClass {
    MintOnly,
    EarningsOnly,
    Both,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitReport {
    pub contract: Address,
    #[serde(with = "dec_u256")]
    pub mint_fee_wei: U256,
    #[serde(with = "dec_u256")]
    pub creator_earnings_wei: U256,
    #[serde(with = "dec_u256")]
    pub total_wei: U256,
    pub profitable: bool,
    pub profit_channels: BTreeSet<ProfitChannel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_usd: Option<f64>,
}

impl ProfitReport {
    pub fn new(contract: Address, mint_fee_wei: U256, creator_earnings_wei: U256) -> Self {
        let mut profit_channels = BTreeSet::new();
        if !mint_fee_wei.is_zero() {
            profit_channels.insert(ProfitChannel::MintFees);
        }
        if !creator_earnings_wei.is_zero() {
            profit_channels.insert(ProfitChannel::CreatorEarnings);
        }
        let total_wei = mint_fee_wei + creator_earnings_wei;
        ProfitReport {
            contract,
            mint_fee_wei,
            creator_earnings_wei,
            total_wei,
            profitable: !total_wei.is_zero(),
            profit_channels,
            total_usd: None,
        }
    }

    pub fn class(&self) -> ChannelClass {
        match (self.profit_channels.contains(&ProfitChannel::MintFees), self.profit_channels.contains(&ProfitChannel::CreatorEarnings)) {
            (true, true) => ChannelClass::Both,
            (true, false) => ChannelClass::MintOnly,
            (false, true) => ChannelClass::EarningsOnly,
            (false, false) => ChannelClass::Neither,
        }
    }
}

/// Profit per listed contract. With a USD table, each mint payment and
/// royalty is converted at the rate of its own day.
pub fn profits(
    contracts: &BTreeSet<Address>,
    transfers: &[TransferEvent],
    trades: &[TradeRecord],
    meta: &BTreeMap<Address, CollectionMetadata>,
    usd: Option<&UsdTable>,
) -> (Vec<ProfitReport>, Vec<String>) {
    let transfers: Vec<&TransferEvent> = transfers.iter().filter(|t| contracts.contains(&t.contract)).collect();
    let trades: Vec<&TradeRecord> = trades.iter().filter(|t| contracts.contains(&t.contract)).collect();
    let fees = mint_fees(transfers.iter().copied());
    let earnings = creator_earnings(trades.iter().copied(), meta);
    let mut warnings = earnings.warnings;

    let mut usd_totals: BTreeMap<Address, Option<f64>> = BTreeMap::new();
    if let Some(table) = usd {
        let mut seen = BTreeSet::new();
        let mut add = |c: Address, wei: U256, ts: u64, warnings: &mut Vec<String>| {
            let slot = usd_totals.entry(c).or_insert(Some(0.0));
            match (slot.as_mut(), table.to_usd(wei, ts)) {
                (Some(acc), Some(v)) => *acc += v,
                (Some(_), None) => {
                    warnings.push(format!("{c}: no USD rate on or before timestamp {ts}"));
                    *slot = None;
                }
                (None, _) => {}
            }
        };
        for t in &transfers {
            if t.kind == TransferKind::Mint && seen.insert((t.contract, t.tx_hash)) && !t.tx_value_wei.is_zero() {
                add(t.contract, t.tx_value_wei, t.timestamp, &mut warnings);
            }
        }
        for t in &trades {
            let bps = meta.get(&t.contract).map_or(0, |m| m.royalty_bps);
            let r = royalty(t.price_wei, bps);
            if !r.is_zero() {
                add(t.contract, r, t.timestamp, &mut warnings);
            }
        }
    }

    let reports = contracts
        .iter()
        .map(|&c| {
            let mut r = ProfitReport::new(
                c,
                fees.get(&c).copied().unwrap_or_default(),
                earnings.by_contract.get(&c).copied().unwrap_or_default(),
            );
            if usd.is_some() {
                r.total_usd = usd_totals.get(&c).copied().unwrap_or(Some(0.0));
            }
            r
        })
        .collect();
    (reports, warnings)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VictimReport {
    pub contract: Address,
    pub minter_victims: BTreeSet<Address>,
    pub buyer_victims: BTreeSet<Address>,
    pub victim_count: usize,
}

/// Paid minters and secondary buyers of each listed contract, excluding the
/// addresses in that contract's scammer set.
pub fn victims(
    contracts: &BTreeSet<Address>,
    transfers: &[TransferEvent],
    trades: &[TradeRecord],
    scammers: &BTreeMap<Address, BTreeSet<Address>>,
) -> Vec<VictimReport> {
    let tx = by_contract(transfers.iter().filter(|t| contracts.contains(&t.contract)), |t| t.contract);
    let tr = by_contract(trades.iter().filter(|t| contracts.contains(&t.contract)), |t| t.contract);
    let empty = BTreeSet::new();
    contracts
        .par_iter()
        .map(|&c| {
            let excluded = scammers.get(&c).unwrap_or(&empty);
            let minter_victims: BTreeSet<Address> = tx
                .get(&c)
                .into_iter()
                .flatten()
                .filter(|t| t.kind == TransferKind::Mint && !t.tx_value_wei.is_zero())
                .map(|t| t.to)
                .filter(|a| !excluded.contains(a))
                .collect();
            let buyer_victims: BTreeSet<Address> = tr
                .get(&c)
                .into_iter()
                .flatten()
                .map(|t| t.buyer)
                .filter(|a| !excluded.contains(a))
                .collect();
            let victim_count = minter_victims.union(&buyer_victims).count();
            VictimReport { contract: c, minter_victims, buyer_victims, victim_count }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionStats {
    pub contract: Address,
    #[serde(with = "dec_u256")]
    pub total_supply: U256,
    pub trade_count: usize,
    pub active_seconds: u64,
    pub distinct_uri_count: usize,
    pub token_count: usize,
}

pub fn stats(
    contracts: &BTreeSet<Address>,
    transfers: &[TransferEvent],
    trades: &[TradeRecord],
    meta: &BTreeMap<Address, CollectionMetadata>,
) -> Result<Vec<CollectionStats>> {
    let tx = by_contract(transfers.iter().filter(|t| contracts.contains(&t.contract)), |t| t.contract);
    let tr = by_contract(trades.iter().filter(|t| contracts.contains(&t.contract)), |t| t.contract);
    contracts
        .par_iter()
        .map(|&c| {
            let mut minted = U256::zero();
            let mut burned = U256::zero();
            for t in tx.get(&c).into_iter().flatten() {
                match t.kind {
                    TransferKind::Mint => minted += t.amount,
                    TransferKind::Burn => burned += t.amount,
                    TransferKind::Swap => {}
                }
            }
            if burned > minted {
                return Err(Error::Integrity(format!("{c}: burned {burned} exceeds minted {minted}")));
            }
            let sales = tr.get(&c).map_or(&[][..], Vec::as_slice);
            let first = sales.iter().map(|t| t.timestamp).min();
            let last = sales.iter().map(|t| t.timestamp).max();
            let active_seconds = match (first, last) {
                (Some(a), Some(b)) => b - a,
                _ => 0,
            };
            let (distinct_uri_count, token_count) = meta.get(&c).map_or((0, 0), |m| {
                (m.token_uris.values().collect::<BTreeSet<_>>().len(), m.token_uris.len())
            });
            Ok(CollectionStats {
                contract: c,
                total_supply: minted - burned,
                trade_count: sales.len(),
                active_seconds,
                distinct_uri_count,
                token_count,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheftReport {
    pub squat: Address,
    pub official: Address,
    /// (official token, squat token) pairs with byte-equal URIs.
    pub uri_theft_pairs: Vec<(TokenId, TokenId)>,
    pub image_exact_pairs: Vec<ImagePair>,
    pub image_similar_pairs: Vec<ImagePair>,
    pub uri_reuse: bool,
}

impl TheftReport {
    pub fn image_hits(&self) -> bool {
        !self.image_exact_pairs.is_empty() || !self.image_similar_pairs.is_empty()
    }
}

pub fn theft_scan(
    official: &CollectionMetadata,
    squat: &CollectionMetadata,
    official_hashes: &BTreeMap<TokenId, DHash64>,
    squat_hashes: &BTreeMap<TokenId, DHash64>,
    threshold: DistanceThreshold,
) -> TheftReport {
    let mut by_uri: BTreeMap<&str, Vec<TokenId>> = BTreeMap::new();
    for (&tok, uri) in &official.token_uris {
        by_uri.entry(uri.as_str()).or_default().push(tok);
    }
    let mut uri_theft_pairs: Vec<(TokenId, TokenId)> = squat
        .token_uris
        .iter()
        .flat_map(|(&s, uri)| by_uri.get(uri.as_str()).into_iter().flatten().map(move |&o| (o, s)))
        .collect();
    uri_theft_pairs.sort();
    let images = near_duplicates(official_hashes, squat_hashes, threshold);
    let distinct = squat.token_uris.values().collect::<BTreeSet<_>>().len();
    TheftReport {
        squat: squat.contract,
        official: official.contract,
        uri_theft_pairs,
        image_exact_pairs: images.exact,
        image_similar_pairs: images.similar,
        uri_reuse: distinct < squat.token_uris.len(),
    }
}
