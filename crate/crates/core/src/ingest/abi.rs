//! Minimal ABI word access for event payloads.

use sha3::{Digest, Keccak256};

use crate::types::{Hash32, U256};

/// Keccak-256 of a canonical event signature, i.e. its topic-0.
pub fn event_topic(signature: &str) -> Hash32 {
    let digest = Keccak256::digest(signature.as_bytes());
    let mut out = [0u8; 32];
    out.copy_from_slice(&digest);
    Hash32(out)
}

/// Payload access errors; callers attach the log provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum AbiError {
    OutOfBounds { word: usize, len: usize },
    BadOffset(U256),
    LengthMismatch { ids: usize, values: usize },
    Misaligned(usize),
}

impl std::fmt::Display for AbiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AbiError::OutOfBounds { word, len } => {
                write!(f, "word {word} out of bounds for {len}-byte data")
            }
            AbiError::BadOffset(o) => write!(f, "dynamic offset {o} is not a valid position"),
            AbiError::LengthMismatch { ids, values } => {
                write!(f, "batch has {ids} ids but {values} values")
            }
            AbiError::Misaligned(len) => write!(f, "data length {len} is not a multiple of 32"),
        }
    }
}

pub(crate) fn check_aligned(data: &[u8]) -> Result<(), AbiError> {
    if data.len().is_multiple_of(32) {
        Ok(())
    } else {
        Err(AbiError::Misaligned(data.len()))
    }
}

pub(crate) fn word(data: &[u8], index: usize) -> Result<[u8; 32], AbiError> {
    let start = index.checked_mul(32).ok_or(AbiError::OutOfBounds { word: index, len: data.len() })?;
    let slice = data
        .get(start..start + 32)
        .ok_or(AbiError::OutOfBounds { word: index, len: data.len() })?;
    let mut out = [0u8; 32];
    out.copy_from_slice(slice);
    Ok(out)
}

pub(crate) fn uint(data: &[u8], index: usize) -> Result<U256, AbiError> {
    word(data, index).map(|w| U256::from_big_endian(&w))
}

fn small(value: U256) -> Result<usize, AbiError> {
    if value > U256::from(u32::MAX) {
        return Err(AbiError::BadOffset(value));
    }
    Ok(value.as_usize())
}

/// Decodes a `uint256[]` whose head word sits at `head_index`.
pub(crate) fn uint_array(data: &[u8], head_index: usize) -> Result<Vec<U256>, AbiError> {
    let offset = uint(data, head_index)?;
    let offset_bytes = small(offset)?;
    if offset_bytes % 32 != 0 {
        return Err(AbiError::BadOffset(offset));
    }
    let len_index = offset_bytes / 32;
    let len = small(uint(data, len_index)?)?;
    (0..len).map(|i| uint(data, len_index + 1 + i)).collect()
}

/// Decodes the `(uint256[] ids, uint256[] values)` payload of a batch transfer.
pub(crate) fn id_value_arrays(data: &[u8]) -> Result<Vec<(U256, U256)>, AbiError> {
    let ids = uint_array(data, 0)?;
    let values = uint_array(data, 1)?;
    if ids.len() != values.len() {
        return Err(AbiError::LengthMismatch {
            ids: ids.len(),
            values: values.len(),
        });
    }
    Ok(ids.into_iter().zip(values).collect())
}
