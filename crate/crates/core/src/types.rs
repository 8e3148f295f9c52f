//! Chain primitives shared by every stage: addresses, 32-byte words, and
//! 256-bit integers serialized as decimal strings.

use std::fmt;
use std::str::FromStr;

pub use primitive_types::U256;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Wei per ether.
pub fn ether() -> U256 {
    U256::exp10(18)
}

/// Wei amount for a decimal number of milli-ether, handy for fixtures.
pub fn milli_ether(m: u64) -> U256 {
    U256::from(m) * U256::exp10(15)
}

/// Formats a wei amount as ether with up to 18 fractional digits, trailing zeros trimmed.
pub fn format_ether(wei: U256) -> String {
    let (int, frac) = wei.div_mod(ether());
    if frac.is_zero() {
        return int.to_string();
    }
    let frac = format!("{:0>18}", frac.to_string());
    format!("{}.{}", int, frac.trim_end_matches('0'))
}

fn parse_hex_fixed<const N: usize>(s: &str, what: &'static str) -> Result<[u8; N], Error> {
    let body = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .ok_or_else(|| Error::invalid(what, format!("{s:?} lacks 0x prefix")))?;
    if body.len() != N * 2 {
        return Err(Error::invalid(
            what,
            format!("{s:?} must have exactly {} hex digits", N * 2),
        ));
    }
    let mut out = [0u8; N];
    hex::decode_to_slice(body, &mut out).map_err(|e| Error::invalid(what, format!("{s:?}: {e}")))?;
    Ok(out)
}

/// A 20-byte account or contract address. Displays as lowercase `0x` hex.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Address(pub [u8; 20]);

impl Address {
    pub const ZERO: Address = Address([0u8; 20]);

    /// The conventional burn sink `0x000000000000000000000000000000000000dEaD`.
    pub const DEAD: Address = Address([
        0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0xde, 0xad,
    ]);

    pub fn is_zero(&self) -> bool {
        self.0 == [0u8; 20]
    }

    /// Takes the low 20 bytes of an ABI word.
    pub fn from_word(word: &[u8; 32]) -> Self {
        let mut out = [0u8; 20];
        out.copy_from_slice(&word[12..]);
        Address(out)
    }

    pub fn to_word(self) -> [u8; 32] {
        let mut w = [0u8; 32];
        w[12..].copy_from_slice(&self.0);
        w
    }

    /// Deterministic fixture address whose last bytes carry `n`.
    pub fn from_low_u64(n: u64) -> Self {
        let mut out = [0u8; 20];
        out[12..].copy_from_slice(&n.to_be_bytes());
        Address(out)
    }
}

impl FromStr for Address {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        parse_hex_fixed::<20>(s.trim(), "address").map(Address)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A 32-byte word: transaction hashes and log topics.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Hash32(pub [u8; 32]);

impl Hash32 {
    pub fn from_u256(v: U256) -> Self {
        let mut out = [0u8; 32];
        v.to_big_endian(&mut out);
        Hash32(out)
    }

    pub fn to_u256(self) -> U256 {
        U256::from_big_endian(&self.0)
    }

    /// Deterministic fixture hash whose last bytes carry `n`.
    pub fn from_low_u64(n: u64) -> Self {
        Self::from_u256(U256::from(n))
    }
}

impl FromStr for Hash32 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        parse_hex_fixed::<32>(s.trim(), "32-byte hash").map(Hash32)
    }
}

impl fmt::Display for Hash32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Debug for Hash32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! hex_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = <std::borrow::Cow<'de, str>>::deserialize(d)?;
                s.parse().map_err(de::Error::custom)
            }
        }
    };
}

hex_serde!(Address);
hex_serde!(Hash32);

/// Hex-encoded byte string (`0x`-prefixed), used for raw log data.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct HexBytes(pub Vec<u8>);

impl fmt::Debug for HexBytes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(&self.0))
    }
}

impl Serialize for HexBytes {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("0x{}", hex::encode(&self.0)))
    }
}

impl<'de> Deserialize<'de> for HexBytes {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <std::borrow::Cow<'de, str>>::deserialize(d)?;
        let body = s
            .strip_prefix("0x")
            .ok_or_else(|| de::Error::custom("hex bytes lack 0x prefix"))?;
        hex::decode(body).map(HexBytes).map_err(de::Error::custom)
    }
}

/// Serde adapter for `U256` as a decimal string.
pub mod dec_u256 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &U256, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<U256, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr<'a> {
            Str(std::borrow::Cow<'a, str>),
            Num(u64),
        }
        match Repr::deserialize(d)? {
            Repr::Str(s) => U256::from_dec_str(&s).map_err(|e| de::Error::custom(format!("{s:?}: {e:?}"))),
            Repr::Num(n) => Ok(U256::from(n)),
        }
    }
}

/// NFT token standard of a contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TokenStandard {
    #[serde(rename = "ERC721")]
    Erc721,
    #[serde(rename = "ERC1155")]
    Erc1155,
}

/// Token identifier, a 256-bit integer carried as a decimal string.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TokenId(pub U256);

impl TokenId {
    pub fn new(n: u64) -> Self {
        TokenId(U256::from(n))
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for TokenId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        U256::from_dec_str(s.trim())
            .map(TokenId)
            .map_err(|e| Error::invalid("token id", format!("{s:?}: {e:?}")))
    }
}

hex_serde!(TokenId);
