//! PNG/JPEG decoding into luminance images, kept at the edge of the crate.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{dhash, GrayImage, HashRecord};
use crate::error::{Error, Result};
use crate::types::{Address, TokenId};

/// Integer-rounded `0.299 R + 0.587 G + 0.114 B`.
pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

pub fn decode_file(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let img = image::open(path)
        .map_err(|e| Error::invalid("image", format!("{}: {e}", path.display())))?
        .to_rgb8();
    let (w, h) = img.dimensions();
    let pixels = img.pixels().map(|p| luminance(p[0], p[1], p[2])).collect();
    GrayImage::new(w, h, pixels)
}

fn list(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        out.push(entry.map_err(|e| Error::io(dir, e))?.path());
    }
    out.sort();
    Ok(out)
}

/// Hashes every image under `root/<contract>/<token_id>.<ext>`.
///
/// Entries whose names do not parse as a contract address or token id are
/// skipped with a warning. Output is sorted by (contract, token).
pub fn hash_directory(root: impl AsRef<Path>) -> Result<Vec<HashRecord>> {
    let root = root.as_ref();
    let mut jobs = Vec::new();
    for sub in list(root)? {
        if !sub.is_dir() {
            continue;
        }
        let Some(contract) = sub.file_name().and_then(|n| n.to_str()).and_then(|n| n.parse::<Address>().ok()) else {
            log::warn!("skipping {}: directory name is not an address", sub.display());
            continue;
        };
        for file in list(&sub)? {
            let Some(token) = file.file_stem().and_then(|n| n.to_str()).and_then(|n| n.parse::<TokenId>().ok()) else {
                log::warn!("skipping {}: file stem is not a token id", file.display());
                continue;
            };
            jobs.push((contract, token, file));
        }
    }
    let mut out = jobs
        .par_iter()
        .map(|(contract, token_id, file)| {
            Ok(HashRecord { contract: *contract, token_id: *token_id, dhash: dhash(&decode_file(file)?) })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}
