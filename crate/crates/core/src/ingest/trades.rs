//! Marketplace sale decoding driven by a declarative layout file.
//!
//! Each entry names a marketplace contract, the sale event (by canonical
//! signature or explicit topic-0) and where every trade field lives in the log:
//!
//! ```json
//! {"markets": [{
//!   "marketplace": "LooksRare",
//!   "address": "0x59728544b08ab483533076417fbbb2fd0b17ce3a",
//!   "event": "TakerAsk(bytes32,uint256,address,address,address,address,address,uint256,uint256,uint256)",
//!   "fields": {
//!     "seller": {"topic": 1}, "buyer": {"topic": 2},
//!     "collection": {"data": 3}, "token_id": {"data": 4}, "price": {"data": 6}
//!   }
//! }]}
//! ```

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::abi;
use super::RawLogRecord;
use crate::error::{Error, Result};
use crate::types::{dec_u256, Address, Hash32, TokenId, U256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Marketplace {
    OpenSea,
    LooksRare,
    X2Y2,
    Blur,
    CryptoPunks,
}

/// Where a trade field is read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSource {
    /// Indexed parameter, `topics[n]`.
    Topic(usize),
    /// The n-th 32-byte word of the data section.
    Data(usize),
    /// The address of the emitting contract.
    Emitter,
    /// A fixed value (an address, or a decimal integer).
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeFields {
    pub seller: FieldSource,
    pub buyer: FieldSource,
    pub collection: FieldSource,
    pub token_id: FieldSource,
    pub price: FieldSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarketLayout {
    pub marketplace: Marketplace,
    pub address: Address,
    /// Canonical event signature; its Keccak hash is the topic-0.
    #[serde(default)]
    pub event: Option<String>,
    /// Explicit topic-0, used when no signature is given.
    #[serde(default)]
    pub topic0: Option<Hash32>,
    pub fields: TradeFields,
}

impl MarketLayout {
    pub fn topic(&self) -> Result<Hash32> {
        match (&self.event, self.topic0) {
            (Some(sig), None) => Ok(abi::event_topic(sig)),
            (None, Some(t)) => Ok(t),
            (Some(sig), Some(t)) if abi::event_topic(sig) == t => Ok(t),
            (Some(sig), Some(_)) => Err(Error::invalid("market map", format!("topic0 does not match {sig}"))),
            (None, None) => Err(Error::invalid(
                "market map",
                format!("{:?} entry needs an event signature or topic0", self.marketplace),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MarketMap {
    pub markets: Vec<MarketLayout>,
}

impl MarketMap {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let map: MarketMap = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        for m in &map.markets {
            m.topic()?;
        }
        Ok(map)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub marketplace: Marketplace,
    pub tx_hash: Hash32,
    pub log_index: u64,
    pub seller: Address,
    pub buyer: Address,
    pub contract: Address,
    pub token_id: TokenId,
    #[serde(with = "dec_u256")]
    pub price_wei: U256,
    pub block: u64,
    pub timestamp: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TradeStats {
    pub trades: usize,
    /// Logs not emitted by a configured marketplace event.
    pub skipped: usize,
    /// Decoded sales whose buyer equals the seller.
    pub rejected_self_trades: usize,
}

fn field_word(log: &RawLogRecord, src: &FieldSource) -> std::result::Result<[u8; 32], String> {
    match src {
        FieldSource::Topic(n) => log
            .topics
            .get(*n)
            .map(|t| t.0)
            .ok_or_else(|| format!("topic {n} missing ({} topics)", log.topics.len())),
        FieldSource::Data(n) => abi::word(&log.data.0, *n).map_err(|e| e.to_string()),
        FieldSource::Emitter => Ok(log.contract.to_word()),
        FieldSource::Const(v) => {
            if let Ok(a) = v.parse::<Address>() {
                Ok(a.to_word())
            } else {
                U256::from_dec_str(v)
                    .map(|n| Hash32::from_u256(n).0)
                    .map_err(|_| format!("constant {v:?} is neither an address nor an integer"))
            }
        }
    }
}

/// Decodes sale logs using a prepared layout index.
#[derive(Debug)]
pub struct TradeDecoder<'a> {
    index: HashMap<(Address, Hash32), &'a MarketLayout>,
    pub stats: TradeStats,
}

impl<'a> TradeDecoder<'a> {
    pub fn new(map: &'a MarketMap) -> Result<Self> {
        let mut index = HashMap::new();
        for m in &map.markets {
            index.insert((m.address, m.topic()?), m);
        }
        Ok(TradeDecoder {
            index,
            stats: TradeStats::default(),
        })
    }

    pub fn decode(&mut self, log: &RawLogRecord) -> Result<Option<TradeRecord>> {
        log.validate()?;
        let Some(layout) = self.index.get(&(log.contract, log.topics[0])) else {
            self.stats.skipped += 1;
            return Ok(None);
        };
        let err = |field: &str, msg: String| Error::Decode {
            tx_hash: log.tx_hash.to_string(),
            log_index: log.log_index,
            message: format!("{:?} {field}: {msg}", layout.marketplace),
        };
        let get = |field: &str, src: &FieldSource| field_word(log, src).map_err(|m| err(field, m));
        let f = &layout.fields;
        let seller = Address::from_word(&get("seller", &f.seller)?);
        let buyer = Address::from_word(&get("buyer", &f.buyer)?);
        let contract = Address::from_word(&get("collection", &f.collection)?);
        let token_id = TokenId(U256::from_big_endian(&get("token_id", &f.token_id)?));
        let price_wei = U256::from_big_endian(&get("price", &f.price)?);
        if buyer == seller {
            log::warn!("tx {} log {}: buyer equals seller; trade dropped", log.tx_hash, log.log_index);
            self.stats.rejected_self_trades += 1;
            return Ok(None);
        }
        self.stats.trades += 1;
        Ok(Some(TradeRecord {
            marketplace: layout.marketplace,
            tx_hash: log.tx_hash,
            log_index: log.log_index,
            seller,
            buyer,
            contract,
            token_id,
            price_wei,
            block: log.block,
            timestamp: log.timestamp,
        }))
    }
}

/// Decodes every sale in a log set, ordered by (block, log index).
pub fn decode_trades<'a>(
    logs: impl IntoIterator<Item = &'a RawLogRecord>,
    map: &MarketMap,
) -> Result<(Vec<TradeRecord>, TradeStats)> {
    let mut decoder = TradeDecoder::new(map)?;
    let mut out = Vec::new();
    for log in logs {
        if let Some(t) = decoder.decode(log)? {
            out.push(t);
        }
    }
    out.sort_by_key(|t| (t.block, t.log_index));
    Ok((out, decoder.stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::HexBytes;

    const TAKER_ASK: &str =
        "TakerAsk(bytes32,uint256,address,address,address,address,address,uint256,uint256,uint256)";
    const PUNK_BOUGHT: &str = "PunkBought(uint256,uint256,address,address)";

    fn looksrare() -> Address {
        "0x59728544b08ab483533076417fbbb2fd0b17ce3a".parse().unwrap()
    }

    fn punks() -> Address {
        "0xb47e3cd837ddf8e4c57f05d70ab865de6e193bbb".parse().unwrap()
    }

    fn map() -> MarketMap {
        serde_json::from_value(serde_json::json!({"markets": [
            {"marketplace": "LooksRare", "address": looksrare(), "event": TAKER_ASK,
             "fields": {"seller": {"topic": 1}, "buyer": {"topic": 2}, "collection": {"data": 3},
                        "token_id": {"data": 4}, "price": {"data": 6}}},
            {"marketplace": "CryptoPunks", "address": punks(), "event": PUNK_BOUGHT,
             "fields": {"seller": {"topic": 2}, "buyer": {"topic": 3}, "collection": "emitter",
                        "token_id": {"topic": 1}, "price": {"data": 0}}}
        ]}))
        .unwrap()
    }

    fn w(n: u64) -> [u8; 32] {
        Hash32::from_low_u64(n).0
    }

    fn taker_ask(price: u64, seller: u64, buyer: u64) -> RawLogRecord {
        let data: Vec<u8> = [w(0x01), w(5), w(0xee), w(0xc0), w(42), w(1), Hash32::from_u256(U256::from(price)).0].concat();
        RawLogRecord {
            tx_hash: Hash32::from_low_u64(9),
            log_index: 1,
            contract: looksrare(),
            topics: vec![
                abi::event_topic(TAKER_ASK),
                Hash32(Address::from_low_u64(seller).to_word()),
                Hash32(Address::from_low_u64(buyer).to_word()),
                Hash32(Address::from_low_u64(0x5a).to_word()),
            ],
            data: HexBytes(data),
            block: 100,
            timestamp: 5000,
            tx_value_wei: U256::zero(),
        }
    }

    #[test]
    fn taker_ask_decodes_price_and_parties() {
        let (trades, stats) = decode_trades([&taker_ask(1_000_000, 0xa, 0xb)], &map()).unwrap();
        assert_eq!(stats.trades, 1);
        let t = &trades[0];
        assert_eq!(t.marketplace, Marketplace::LooksRare);
        assert_eq!(t.price_wei, U256::from(1_000_000u64));
        assert_eq!((t.seller, t.buyer), (Address::from_low_u64(0xa), Address::from_low_u64(0xb)));
        assert_eq!(t.contract, Address::from_low_u64(0xc0));
        assert_eq!(t.token_id, TokenId::new(42));
    }

    #[test]
    fn zero_price_is_accepted() {
        let (trades, _) = decode_trades([&taker_ask(0, 0xa, 0xb)], &map()).unwrap();
        assert_eq!(trades[0].price_wei, U256::zero());
    }

    #[test]
    fn unknown_contract_is_skipped() {
        let mut l = taker_ask(1, 0xa, 0xb);
        l.contract = Address::from_low_u64(0xdead);
        let (trades, stats) = decode_trades([&l], &map()).unwrap();
        assert!(trades.is_empty());
        assert_eq!(stats.skipped, 1);
    }

    #[test]
    fn self_trade_is_rejected() {
        let (trades, stats) = decode_trades([&taker_ask(1, 0xa, 0xa)], &map()).unwrap();
        assert!(trades.is_empty());
        assert_eq!(stats.rejected_self_trades, 1);
    }

    #[test]
    fn short_data_is_a_decode_error() {
        let mut l = taker_ask(1, 0xa, 0xb);
        l.data.0.truncate(64);
        assert!(matches!(decode_trades([&l], &map()), Err(Error::Decode { .. })));
    }

    #[test]
    fn punk_bought_uses_emitter_as_collection() {
        let l = RawLogRecord {
            tx_hash: Hash32::from_low_u64(1),
            log_index: 0,
            contract: punks(),
            topics: vec![
                abi::event_topic(PUNK_BOUGHT),
                Hash32::from_low_u64(3100),
                Hash32(Address::from_low_u64(1).to_word()),
                Hash32(Address::from_low_u64(2).to_word()),
            ],
            data: HexBytes(w(77).to_vec()),
            block: 1,
            timestamp: 1,
            tx_value_wei: U256::zero(),
        };
        let (trades, _) = decode_trades([&l], &map()).unwrap();
        assert_eq!(trades[0].contract, punks());
        assert_eq!(trades[0].token_id, TokenId::new(3100));
        assert_eq!(trades[0].price_wei, U256::from(77));
    }

    #[test]
    fn layout_needs_a_topic() {
        let mut m = map();
        m.markets[0].event = None;
        assert!(TradeDecoder::new(&m).is_err());
    }
}
