//! Difference hashing of token images and Hamming comparison between an
//! official collection and a lookalike.
//!
//! The hash is the 9×8 horizontal-gradient variant: the image is resampled to
//! 9 columns by 8 rows with area-weighted averaging, and bit `r * 8 + c` is set
//! when cell `(r, c)` is strictly darker than cell `(r, c + 1)`.

mod cache;
#[cfg(feature = "image-decode")]
mod decode;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::types::TokenId;

pub use cache::{load_hash_cache, write_hash_cache, HashCache, HashRecord};
#[cfg(feature = "image-decode")]
pub use decode::{decode_file, hash_directory, luminance};

/// Row-major 8-bit luminance image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image", format!("zero dimension {width}x{height}")));
        }
        if pixels.len() as u64 != width as u64 * height as u64 {
            return Err(Error::invalid(
                "image",
                format!("{width}x{height} image needs {} pixels, got {}", width as u64 * height as u64, pixels.len()),
            ));
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> u8) -> Result<Self> {
        let pixels = (0..height).flat_map(|y| (0..width).map(move |x| (x, y))).map(|(x, y)| f(x, y)).collect();
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }
}

/// 64-bit difference hash. Serializes as 16 lowercase hex digits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DHash64(pub u64);

impl fmt::Display for DHash64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl fmt::Debug for DHash64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DHash64({self})")
    }
}

impl FromStr for DHash64 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() != 16 {
            return Err(Error::invalid("dhash", format!("{s:?} must be 16 hex digits")));
        }
        u64::from_str_radix(s, 16)
            .map(DHash64)
            .map_err(|e| Error::invalid("dhash", format!("{s:?}: {e}")))
    }
}

impl Serialize for DHash64 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DHash64 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

const COLS: u64 = 9;
const ROWS: u64 = 8;

/// Overlap lengths of source pixels with target cells along one axis.
///
/// Coordinates are scaled so that a source pixel spans `cells` units and a
/// target cell spans `len` units; every overlap is then an integer.
fn axis_weights(len: u64, cells: u64) -> Vec<Vec<(usize, u64)>> {
    (0..cells)
        .map(|c| {
            let lo = c * len;
            let hi = (c + 1) * len;
            let first = lo / cells;
            let last = hi.div_ceil(cells);
            (first..last)
                .filter_map(|p| {
                    let overlap = hi.min((p + 1) * cells).saturating_sub(lo.max(p * cells));
                    (overlap > 0).then_some((p as usize, overlap))
                })
                .collect()
        })
        .collect()
}

/// Area-weighted 9×8 cell sums. All cells cover the same area, so comparing
/// sums is the same as comparing averages.
fn cell_sums(img: &GrayImage) -> [[u128; COLS as usize]; ROWS as usize] {
    let w = img.width as usize;
    let xs = axis_weights(img.width as u64, COLS);
    let ys = axis_weights(img.height as u64, ROWS);
    let mut out = [[0u128; COLS as usize]; ROWS as usize];
    for (r, row_weights) in ys.iter().enumerate() {
        for &(y, wy) in row_weights {
            let line = &img.pixels[y * w..(y + 1) * w];
            for (c, col_weights) in xs.iter().enumerate() {
                let h: u64 = col_weights.iter().map(|&(x, wx)| line[x] as u64 * wx).sum();
                out[r][c] += h as u128 * wy as u128;
            }
        }
    }
    out
}

pub fn dhash(img: &GrayImage) -> DHash64 {
    let cells = cell_sums(img);
    let mut bits = 0u64;
    for r in 0..ROWS as usize {
        for c in 0..8 {
            if cells[r][c] < cells[r][c + 1] {
                bits |= 1 << (r * 8 + c);
            }
        }
    }
    DHash64(bits)
}

pub fn hamming(a: DHash64, b: DHash64) -> u32 {
    (a.0 ^ b.0).count_ones()
}

/// Upper bound on Hamming distance for two images to count as similar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DistanceThreshold {
    pub max: u32,
    /// Admit distance equal to `max` as well.
    #[serde(default)]
    pub inclusive: bool,
}

impl Default for DistanceThreshold {
    fn default() -> Self {
        DistanceThreshold { max: 5, inclusive: false }
    }
}

impl DistanceThreshold {
    pub fn strict(max: u32) -> Self {
        DistanceThreshold { max, inclusive: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max > 64 {
            return Err(Error::invalid("dhash threshold", format!("{} exceeds 64", self.max)));
        }
        Ok(())
    }

    pub fn admits(&self, distance: u32) -> bool {
        if self.inclusive {
            distance <= self.max
        } else {
            distance < self.max
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ImagePair {
    pub official: TokenId,
    pub squat: TokenId,
    pub distance: u32,
}

/// Cross pairs within the threshold, split into identical and merely similar hashes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearDuplicates {
    pub exact: Vec<ImagePair>,
    pub similar: Vec<ImagePair>,
}

impl NearDuplicates {
    pub fn is_empty(&self) -> bool {
        self.exact.is_empty() && self.similar.is_empty()
    }

    /// Swaps the roles of the two sides, keeping the output sorted.
    pub fn transpose(&self) -> NearDuplicates {
        let flip = |v: &[ImagePair]| {
            let mut out: Vec<ImagePair> = v
                .iter()
                .map(|p| ImagePair { official: p.squat, squat: p.official, distance: p.distance })
                .collect();
            out.sort();
            out
        };
        NearDuplicates { exact: flip(&self.exact), similar: flip(&self.similar) }
    }
}

pub fn near_duplicates(
    official: &BTreeMap<TokenId, DHash64>,
    squat: &BTreeMap<TokenId, DHash64>,
    threshold: DistanceThreshold,
) -> NearDuplicates {
    let mut out = NearDuplicates::default();
    for (&o, &ho) in official {
        for (&s, &hs) in squat {
            let distance = hamming(ho, hs);
            if !threshold.admits(distance) {
                continue;
            }
            let pair = ImagePair { official: o, squat: s, distance };
            if distance == 0 {
                out.exact.push(pair);
            } else {
                out.similar.push(pair);
            }
        }
    }
    out
}

/// Hashes many images in parallel, preserving input order.
pub fn dhash_all(images: &[GrayImage]) -> Vec<DHash64> {
    images.par_iter().map(dhash).collect()
}
