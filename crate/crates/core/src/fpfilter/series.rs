use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ingest::{TradeRecord, TransferEvent};
use crate::types::{dec_u256, Address, U256};

/// UTC calendar date of a Unix timestamp.
pub fn utc_day(ts: u64) -> NaiveDate {
    DateTime::from_timestamp(ts as i64, 0).expect("timestamp in range").date_naive()
}

/// A calendar month, serialized as `YYYY-MM`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::invalid("month", format!("{year}-{month}: month out of range")));
        }
        Ok(YearMonth { year, month })
    }

    pub fn of_timestamp(ts: u64) -> Self {
        let d = utc_day(ts);
        YearMonth { year: d.year(), month: d.month() }
    }

    pub fn next(self) -> Self {
        if self.month == 12 {
            YearMonth { year: self.year + 1, month: 1 }
        } else {
            YearMonth { year: self.year, month: self.month + 1 }
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl fmt::Debug for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("month", format!("{s:?} is not YYYY-MM"));
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        YearMonth::new(y.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?)
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorPoint {
    pub day: NaiveDate,
    #[serde(with = "dec_u256")]
    pub floor_price_wei: U256,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyFloorSeries {
    pub contract: Address,
    pub points: Vec<FloorPoint>,
}

impl DailyFloorSeries {
    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.points.windows(2).find(|w| w[0].day >= w[1].day) {
            return Err(Error::invalid(
                "floor series",
                format!("{}: day {} does not follow {}", self.contract, w[1].day, w[0].day),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonthCount {
    pub month: YearMonth,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonthlyTransferSeries {
    pub contract: Address,
    pub points: Vec<MonthCount>,
}

impl MonthlyTransferSeries {
    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.points.windows(2).find(|w| w[0].month >= w[1].month) {
            return Err(Error::invalid(
                "transfer series",
                format!("{}: month {} does not follow {}", self.contract, w[1].month, w[0].month),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocialActivity {
    pub contract: Address,
    pub post_timestamps: Vec<u64>,
    pub last_onchain_activity: u64,
}

impl SocialActivity {
    pub fn validate(&self) -> Result<()> {
        if self.post_timestamps.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("social activity", format!("{}: post timestamps not sorted", self.contract)));
        }
        Ok(())
    }
}

/// Daily floor = cheapest sale of that UTC day. Days without sales get no point.
pub fn daily_floor_series<'a>(contract: Address, trades: impl IntoIterator<Item = &'a TradeRecord>) -> DailyFloorSeries {
    let mut by_day: BTreeMap<NaiveDate, U256> = BTreeMap::new();
    for t in trades.into_iter().filter(|t| t.contract == contract) {
        by_day
            .entry(utc_day(t.timestamp))
            .and_modify(|p| *p = (*p).min(t.price_wei))
            .or_insert(t.price_wei);
    }
    DailyFloorSeries {
        contract,
        points: by_day.into_iter().map(|(day, floor_price_wei)| FloorPoint { day, floor_price_wei }).collect(),
    }
}

/// Transfer events per month, with zero-filled gaps from the first active
/// month through `through` (or the last active month if that is later).
pub fn monthly_transfer_series<'a>(
    contract: Address,
    transfers: impl IntoIterator<Item = &'a TransferEvent>,
    through: Option<YearMonth>,
) -> MonthlyTransferSeries {
    let mut counts: BTreeMap<YearMonth, u64> = BTreeMap::new();
    for t in transfers.into_iter().filter(|t| t.contract == contract) {
        *counts.entry(YearMonth::of_timestamp(t.timestamp)).or_default() += 1;
    }
    let mut points = Vec::new();
    if let (Some(&first), Some(&last)) = (counts.keys().next(), counts.keys().next_back()) {
        let end = through.map_or(last, |t| t.max(last));
        let mut m = first;
        loop {
            points.push(MonthCount { month: m, count: counts.get(&m).copied().unwrap_or(0) });
            if m == end {
                break;
            }
            m = m.next();
        }
    }
    MonthlyTransferSeries { contract, points }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Marketplace, TransferKind};
    use crate::types::{Hash32, TokenId, TokenStandard};

    const DAY: u64 = 86_400;

    fn trade(contract: Address, ts: u64, price: u64) -> TradeRecord {
        TradeRecord {
            marketplace: Marketplace::OpenSea,
            tx_hash: Hash32::from_low_u64(ts),
            log_index: 0,
            seller: Address::from_low_u64(1),
            buyer: Address::from_low_u64(2),
            contract,
            token_id: TokenId::new(1),
            price_wei: price.into(),
            block: ts,
            timestamp: ts,
        }
    }

    fn transfer(contract: Address, ts: u64) -> TransferEvent {
        TransferEvent {
            standard: TokenStandard::Erc721,
            contract,
            from: Address::ZERO,
            to: Address::from_low_u64(3),
            token_id: TokenId::new(1),
            amount: U256::one(),
            kind: TransferKind::Mint,
            block: ts,
            timestamp: ts,
            tx_hash: Hash32::from_low_u64(ts),
            log_index: 0,
            batch_index: None,
            tx_value_wei: U256::zero(),
        }
    }

    #[test]
    fn month_text_round_trip() {
        let m: YearMonth = "2022-12".parse().unwrap();
        assert_eq!(m.next().to_string(), "2023-01");
        assert!("2022-13".parse::<YearMonth>().is_err());
        assert_eq!(YearMonth::of_timestamp(1_650_000_000).to_string(), "2022-04");
    }

    #[test]
    fn floor_is_daily_minimum() {
        let c = Address::from_low_u64(9);
        let other = Address::from_low_u64(8);
        let trades = [trade(c, 10, 50), trade(c, 20, 30), trade(c, DAY + 5, 70), trade(other, 30, 1)];
        let s = daily_floor_series(c, &trades);
        let prices: Vec<u64> = s.points.iter().map(|p| p.floor_price_wei.as_u64()).collect();
        assert_eq!(prices, vec![30, 70]);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn months_are_zero_filled_through_snapshot_end() {
        let c = Address::from_low_u64(9);
        let jan = 1_641_000_000; // 2022-01-01
        let mar = jan + 60 * DAY;
        let s = monthly_transfer_series(c, &[transfer(c, jan), transfer(c, jan + 1), transfer(c, mar)], Some("2022-05".parse().unwrap()));
        let counts: Vec<(String, u64)> = s.points.iter().map(|p| (p.month.to_string(), p.count)).collect();
        assert_eq!(
            counts,
            vec![("2022-01".into(), 2), ("2022-02".into(), 0), ("2022-03".into(), 1), ("2022-04".into(), 0), ("2022-05".into(), 0)]
        );
        assert!(monthly_transfer_series(c, &[], None).points.is_empty());
    }

    #[test]
    fn unordered_series_rejected() {
        let c = Address::from_low_u64(1);
        let d = utc_day(0);
        let s = DailyFloorSeries {
            contract: c,
            points: vec![FloorPoint { day: d, floor_price_wei: 1.into() }, FloorPoint { day: d, floor_price_wei: 2.into() }],
        };
        assert!(s.validate().is_err());
    }
}
