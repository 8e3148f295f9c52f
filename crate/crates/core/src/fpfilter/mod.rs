//! Prefilters and the five-criterion majority vote applied to matched lookalikes.

mod series;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagehash::DistanceThreshold;
use crate::ingest::ExternalLabel;
use crate::matcher::MatchResult;
use crate::squatgen::SeedCollection;
use crate::types::{Address, U256};

pub use series::{
    daily_floor_series, monthly_transfer_series, utc_day, DailyFloorSeries, FloorPoint, MonthCount,
    MonthlyTransferSeries, SocialActivity, YearMonth,
};

/// Number of satisfied criteria needed for a suspicious verdict.
pub const MAJORITY: u8 = 4;

const PPM: u64 = 1_000_000;
const DAY_SECS: u64 = 86_400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct FilterThresholds {
    pub price_drop_fraction: f64,
    pub price_unrecovered_days: u32,
    pub transfer_drop_fraction: f64,
    pub transfer_low_months: u32,
    pub social_silence_days: u32,
    pub dhash_threshold: u32,
    /// Count a Hamming distance equal to `dhash_threshold` as similar.
    pub dhash_inclusive: bool,
}

impl Default for FilterThresholds {
    fn default() -> Self {
        FilterThresholds {
            price_drop_fraction: 0.9,
            price_unrecovered_days: 30,
            transfer_drop_fraction: 0.9,
            transfer_low_months: 2,
            social_silence_days: 30,
            dhash_threshold: 5,
            dhash_inclusive: false,
        }
    }
}

impl FilterThresholds {
    pub fn validate(&self) -> Result<()> {
        for (name, f) in [
            ("price-drop-fraction", self.price_drop_fraction),
            ("transfer-drop-fraction", self.transfer_drop_fraction),
        ] {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::invalid("thresholds", format!("{name} {f} must lie in (0, 1]")));
            }
        }
        for (name, n) in [
            ("price-unrecovered-days", self.price_unrecovered_days),
            ("transfer-low-months", self.transfer_low_months),
            ("social-silence-days", self.social_silence_days),
        ] {
            if n == 0 {
                return Err(Error::invalid("thresholds", format!("{name} must be at least 1")));
            }
        }
        self.dhash().validate()
    }

    pub fn dhash(&self) -> DistanceThreshold {
        DistanceThreshold { max: self.dhash_threshold, inclusive: self.dhash_inclusive }
    }

    /// Share of the peak that survives the drop, in parts per million.
    fn keep_ppm(fraction: f64) -> u64 {
        PPM - (fraction * PPM as f64).round() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Exclusion {
    DerivativeWhitelist,
    DeployedBeforeOfficial,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criteria {
    pub price_collapse: bool,
    pub transfer_collapse: bool,
    pub social_silence: bool,
    pub external_malicious: bool,
    pub image_similarity: bool,
}

impl Criteria {
    pub fn count(&self) -> u8 {
        [
            self.price_collapse,
            self.transfer_collapse,
            self.social_silence,
            self.external_malicious,
            self.image_similarity,
        ]
        .iter()
        .filter(|&&b| b)
        .count() as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuspicionVerdict {
    pub contract: Address,
    pub criteria: Criteria,
    pub satisfied_count: u8,
    pub suspicious: bool,
    pub prefilter_exclusion: Option<Exclusion>,
}

impl SuspicionVerdict {
    pub fn from_criteria(contract: Address, criteria: Criteria) -> Self {
        let satisfied_count = criteria.count();
        SuspicionVerdict {
            contract,
            criteria,
            satisfied_count,
            suspicious: satisfied_count >= MAJORITY,
            prefilter_exclusion: None,
        }
    }

    /// Verdict for a candidate removed before evaluation.
    pub fn excluded(contract: Address, exclusion: Exclusion) -> Self {
        SuspicionVerdict {
            contract,
            criteria: Criteria::default(),
            satisfied_count: 0,
            suspicious: false,
            prefilter_exclusion: Some(exclusion),
        }
    }
}

/// Checks the whitelist first, then deployment order against the matched seed.
pub fn prefilter(m: &MatchResult, official: &SeedCollection, whitelist: &BTreeSet<Address>) -> Option<Exclusion> {
    let cand = &m.candidate;
    if whitelist.contains(&cand.contract_address) {
        return Some(Exclusion::DerivativeWhitelist);
    }
    match cand.deploy_block {
        Some(b) if b < official.deploy_block => Some(Exclusion::DeployedBeforeOfficial),
        Some(_) => None,
        None => {
            log::warn!(
                "{} ({:?}) has no deploy block; deployment-order prefilter skipped",
                cand.contract_address,
                cand.name
            );
            None
        }
    }
}

fn below(value: U256, peak: U256, keep_ppm: u64) -> bool {
    value.full_mul(PPM.into()) < peak.full_mul(keep_ppm.into())
}

fn above(value: U256, peak: U256, keep_ppm: u64) -> bool {
    value.full_mul(PPM.into()) > peak.full_mul(keep_ppm.into())
}

/// Some day falls below the kept share of the running peak and no day within
/// the following window rises above that bound again.
pub fn price_collapse(series: &DailyFloorSeries, t: &FilterThresholds) -> bool {
    let keep = FilterThresholds::keep_ppm(t.price_drop_fraction);
    let window = i64::from(t.price_unrecovered_days);
    let pts = &series.points;
    let mut peak = U256::zero();
    for (i, p) in pts.iter().enumerate() {
        peak = peak.max(p.floor_price_wei);
        if !below(p.floor_price_wei, peak, keep) {
            continue;
        }
        let recovered = pts[i + 1..]
            .iter()
            .take_while(|q| (q.day - p.day).num_days() <= window)
            .any(|q| above(q.floor_price_wei, peak, keep));
        if !recovered {
            return true;
        }
    }
    false
}

/// Some month falls below the kept share of the running peak and stays below
/// for the configured number of consecutive observed months.
pub fn transfer_collapse(series: &MonthlyTransferSeries, t: &FilterThresholds) -> bool {
    let keep = FilterThresholds::keep_ppm(t.transfer_drop_fraction);
    let need = t.transfer_low_months as usize;
    let pts = &series.points;
    let mut peak = 0u64;
    for (i, p) in pts.iter().enumerate() {
        peak = peak.max(p.count);
        let is_low = |c: u64| (c as u128) * (PPM as u128) < (peak as u128) * (keep as u128);
        if !is_low(p.count) {
            continue;
        }
        let mut month = p.month;
        let mut run = 1;
        for q in &pts[i + 1..] {
            if run == need {
                break;
            }
            if q.month != month.next() || !is_low(q.count) {
                break;
            }
            month = q.month;
            run += 1;
        }
        if run >= need {
            return true;
        }
    }
    false
}

/// No post in the window that opens right after the last on-chain activity.
pub fn social_silence(social: &SocialActivity, t: &FilterThresholds) -> bool {
    let start = social.last_onchain_activity;
    let end = start.saturating_add(u64::from(t.social_silence_days) * DAY_SECS);
    !social.post_timestamps.iter().any(|&ts| ts > start && ts <= end)
}

pub fn evaluate(
    contract: Address,
    floor: &DailyFloorSeries,
    transfers: &MonthlyTransferSeries,
    social: &SocialActivity,
    labels: &[ExternalLabel],
    image_hits: bool,
    t: &FilterThresholds,
) -> Result<SuspicionVerdict> {
    floor.validate()?;
    transfers.validate()?;
    social.validate()?;
    let criteria = Criteria {
        price_collapse: price_collapse(floor, t),
        transfer_collapse: transfer_collapse(transfers, t),
        social_silence: social_silence(social, t),
        external_malicious: labels.iter().any(|l| l.label.is_malicious()),
        image_similarity: image_hits,
    };
    Ok(SuspicionVerdict::from_criteria(contract, criteria))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::LabelKind;
    use crate::matcher::{CandidateCollection, MatchKind};
    use crate::squatgen::Tactic;
    use crate::types::{ether, milli_ether, TokenStandard};
    use chrono::{Days, NaiveDate};
    use proptest::prelude::*;

    const C: Address = Address([7; 20]);

    fn day0() -> NaiveDate {
        NaiveDate::from_ymd_opt(2022, 3, 1).unwrap()
    }

    fn floors(points: &[(u64, U256)]) -> DailyFloorSeries {
        DailyFloorSeries {
            contract: C,
            points: points
                .iter()
                .map(|&(d, p)| FloorPoint { day: day0() + Days::new(d), floor_price_wei: p })
                .collect(),
        }
    }

    fn months(counts: &[(u32, u64)]) -> MonthlyTransferSeries {
        MonthlyTransferSeries {
            contract: C,
            points: counts
                .iter()
                .map(|&(m, count)| MonthCount { month: YearMonth::new(2022, m).unwrap(), count })
                .collect(),
        }
    }

    #[test]
    fn forty_days_at_five_percent_collapses() {
        let mut pts = vec![(0, ether() * 10)];
        pts.extend((1..=40).map(|d| (d, milli_ether(500))));
        assert!(price_collapse(&floors(&pts), &FilterThresholds::default()));
    }

    #[test]
    fn exactly_ninety_percent_is_not_a_collapse() {
        let t = FilterThresholds::default();
        assert!(!price_collapse(&floors(&[(0, 1000.into()), (1, 100.into())]), &t));
        assert!(price_collapse(&floors(&[(0, 1000.into()), (1, 99.into())]), &t));
    }

    #[test]
    fn recovery_window_is_thirty_days() {
        let t = FilterThresholds::default();
        let rebound_on_30 = floors(&[(0, 1000.into()), (1, 50.into()), (31, 500.into())]);
        assert!(!price_collapse(&rebound_on_30, &t));
        let rebound_on_32 = floors(&[(0, 1000.into()), (1, 50.into()), (32, 500.into())]);
        assert!(price_collapse(&rebound_on_32, &t));
        // Touching the bound is not a recovery.
        let at_bound = floors(&[(0, 1000.into()), (1, 50.into()), (5, 100.into())]);
        assert!(price_collapse(&at_bound, &t));
    }

    #[test]
    fn later_pump_does_not_erase_collapse() {
        let s = floors(&[(0, 1000.into()), (1, 10.into()), (60, 5000.into())]);
        assert!(price_collapse(&s, &FilterThresholds::default()));
        assert!(!price_collapse(&floors(&[]), &FilterThresholds::default()));
    }

    #[test]
    fn transfer_collapse_needs_two_low_months() {
        let t = FilterThresholds::default();
        assert!(transfer_collapse(&months(&[(1, 100), (2, 9), (3, 0)]), &t));
        assert!(!transfer_collapse(&months(&[(1, 100), (2, 9), (3, 50)]), &t));
        assert!(!transfer_collapse(&months(&[(1, 100), (2, 9)]), &t));
        assert!(!transfer_collapse(&months(&[(1, 100), (2, 10), (3, 10)]), &t));
        // Non-consecutive months do not form a run.
        assert!(!transfer_collapse(&months(&[(1, 100), (2, 5), (4, 5)]), &t));
    }

    #[test]
    fn silence_window() {
        let t = FilterThresholds::default();
        let mut s = SocialActivity { contract: C, post_timestamps: vec![], last_onchain_activity: 1000 };
        assert!(social_silence(&s, &t));
        s.post_timestamps = vec![1000];
        assert!(social_silence(&s, &t));
        s.post_timestamps = vec![1000 + 30 * DAY_SECS];
        assert!(!social_silence(&s, &t));
        s.post_timestamps = vec![1001 + 30 * DAY_SECS];
        assert!(social_silence(&s, &t));
    }

    fn verdict_with(n: usize) -> SuspicionVerdict {
        let flags: Vec<bool> = (0..5).map(|i| i < n).collect();
        SuspicionVerdict::from_criteria(
            C,
            Criteria {
                price_collapse: flags[0],
                transfer_collapse: flags[1],
                social_silence: flags[2],
                external_malicious: flags[3],
                image_similarity: flags[4],
            },
        )
    }

    #[test]
    fn majority_boundary() {
        let suspicious: Vec<bool> = (0..=5).map(|n| verdict_with(n).suspicious).collect();
        assert_eq!(suspicious, vec![false, false, false, false, true, true]);
    }

    #[test]
    fn empty_price_series_with_four_others() {
        let social = SocialActivity { contract: C, post_timestamps: vec![], last_onchain_activity: 0 };
        let labels = [ExternalLabel { source: "etherscan".into(), label: LabelKind::Phishing }];
        let v = evaluate(C, &floors(&[]), &months(&[(1, 100), (2, 0), (3, 0)]), &social, &labels, true, &FilterThresholds::default())
            .unwrap();
        assert!(!v.criteria.price_collapse);
        assert_eq!(v.satisfied_count, 4);
        assert!(v.suspicious);
    }

    #[test]
    fn clean_label_is_not_malicious() {
        let social = SocialActivity { contract: C, post_timestamps: vec![5], last_onchain_activity: 0 };
        let labels = [ExternalLabel { source: "x".into(), label: LabelKind::Clean }];
        let v = evaluate(C, &floors(&[]), &months(&[]), &social, &labels, false, &FilterThresholds::default()).unwrap();
        assert_eq!(v.satisfied_count, 0);
    }

    #[test]
    fn evaluate_rejects_unordered_input() {
        let social = SocialActivity { contract: C, post_timestamps: vec![], last_onchain_activity: 0 };
        let bad = floors(&[(3, 1.into()), (1, 1.into())]);
        assert!(evaluate(C, &bad, &months(&[]), &social, &[], false, &FilterThresholds::default()).is_err());
    }

    fn matched(contract: Address, deploy_block: Option<u64>) -> (MatchResult, SeedCollection) {
        let m = MatchResult {
            candidate: CandidateCollection {
                contract_address: contract,
                name: "Space Doodles".into(),
                standard: TokenStandard::Erc721,
                deploy_block,
                creator: Address::from_low_u64(1),
            },
            seed_name: "Doodles".into(),
            tactic: Tactic::CombinationSquatting,
            matched_keyword: "Doodles".into(),
            match_kind: MatchKind::Partial,
            secondary_tactics: vec![],
            secondary_seeds: vec![],
        };
        let seed = SeedCollection {
            rank: 1,
            name: "Doodles".into(),
            contract_address: Address::from_low_u64(2),
            deploy_block: 200,
            market_cap_wei: U256::zero(),
        };
        (m, seed)
    }

    #[test]
    fn prefilter_cases() {
        let c = Address::from_low_u64(10);
        let wl = BTreeSet::from([c]);
        let (m, seed) = matched(c, Some(300));
        assert_eq!(prefilter(&m, &seed, &wl), Some(Exclusion::DerivativeWhitelist));
        assert_eq!(prefilter(&m, &seed, &BTreeSet::new()), None);
        let (m, seed) = matched(c, Some(100));
        assert_eq!(prefilter(&m, &seed, &BTreeSet::new()), Some(Exclusion::DeployedBeforeOfficial));
        let (m, seed) = matched(c, None);
        assert_eq!(prefilter(&m, &seed, &BTreeSet::new()), None);
    }

    #[test]
    fn thresholds_validate() {
        assert!(FilterThresholds::default().validate().is_ok());
        let bad = FilterThresholds { price_drop_fraction: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = FilterThresholds { transfer_low_months: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let json = r#"{"price-drop-fraction":0.5,"dhash-inclusive":true}"#;
        let t: FilterThresholds = serde_json::from_str(json).unwrap();
        assert_eq!((t.price_drop_fraction, t.price_unrecovered_days, t.dhash().inclusive), (0.5, 30, true));
    }

    proptest! {
        #[test]
        fn turning_a_criterion_on_never_clears_suspicion(bits in 0u8..32, extra in 0usize..5) {
            let mk = |b: u8| Criteria {
                price_collapse: b & 1 != 0,
                transfer_collapse: b & 2 != 0,
                social_silence: b & 4 != 0,
                external_malicious: b & 8 != 0,
                image_similarity: b & 16 != 0,
            };
            let before = SuspicionVerdict::from_criteria(C, mk(bits));
            let after = SuspicionVerdict::from_criteria(C, mk(bits | (1 << extra)));
            prop_assert!(!before.suspicious || after.suspicious);
        }

        #[test]
        fn drop_boundary_scales(peak in 1u64..1_000_000_000) {
            let t = FilterThresholds::default();
            let p = U256::from(peak) * 10;
            prop_assert!(!price_collapse(&floors(&[(0, p), (1, U256::from(peak))]), &t));
            prop_assert!(price_collapse(&floors(&[(0, p), (1, U256::from(peak - 1))]), &t));
        }
    }
}
