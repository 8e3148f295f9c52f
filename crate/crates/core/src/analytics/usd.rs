use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fpfilter::utc_day;
use crate::types::U256;

/// Daily exchange rates, expressed as wei per US dollar.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UsdTable {
    rates: BTreeMap<NaiveDate, U256>,
}

#[derive(Deserialize)]
struct Row {
    date: NaiveDate,
    wei_per_usd: String,
}

fn as_f64(v: U256) -> f64 {
    v.to_string().parse().unwrap_or(f64::INFINITY)
}

impl UsdTable {
    pub fn from_rates(rates: impl IntoIterator<Item = (NaiveDate, U256)>) -> Self {
        UsdTable { rates: rates.into_iter().collect() }
    }

    /// Reads a `date,wei_per_usd` CSV with a header row.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::invalid("usd table", format!("{}: {e}", path.display())))?;
        let mut rates = BTreeMap::new();
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let line = i + 2;
            let parse_err = |message: String| Error::Parse { path: path.to_path_buf(), line, message };
            let row = row.map_err(|e| parse_err(e.to_string()))?;
            let rate = U256::from_dec_str(row.wei_per_usd.trim()).map_err(|e| parse_err(format!("{e:?}")))?;
            if rate.is_zero() {
                return Err(parse_err("wei_per_usd must be positive".into()));
            }
            rates.insert(row.date, rate);
        }
        Ok(UsdTable { rates })
    }

    /// Converts at the latest rate dated on or before the timestamp's day.
    pub fn to_usd(&self, wei: U256, timestamp: u64) -> Option<f64> {
        let (_, rate) = self.rates.range(..=utc_day(timestamp)).next_back()?;
        Some(as_f64(wei) / as_f64(*rate))
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }
}
