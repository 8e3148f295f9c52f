use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cluster::DepositBounds;
use crate::error::{Error, Result};
use crate::fpfilter::FilterThresholds;
use crate::squatgen::{MutationSettings, WordListPaths};

/// Every input path, threshold and output location of a run.
///
/// Relative paths in a config file are resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seeds: Option<PathBuf>,
    #[serde(default)]
    pub candidates: Option<PathBuf>,
    #[serde(default)]
    pub logs: Option<PathBuf>,
    #[serde(default)]
    pub transactions: Option<PathBuf>,
    #[serde(default)]
    pub metadata: Option<PathBuf>,
    #[serde(default)]
    pub market_map: Option<PathBuf>,
    #[serde(default)]
    pub word_lists: WordListPaths,
    #[serde(default)]
    pub mutation: MutationSettings,
    #[serde(default)]
    pub exchanges: Option<PathBuf>,
    #[serde(default)]
    pub whitelist: Option<PathBuf>,
    #[serde(default)]
    pub labels: Option<PathBuf>,
    #[serde(default)]
    pub social: Option<PathBuf>,
    /// Directory of `<contract>/<token_id>.<ext>` images.
    #[serde(default)]
    pub images: Option<PathBuf>,
    /// Hash cache read by theft-scan and written by hash-images.
    /// Defaults to `hashes.jsonl` in the output directory.
    #[serde(default)]
    pub hash_cache: Option<PathBuf>,
    #[serde(default)]
    pub usd_table: Option<PathBuf>,
    #[serde(default)]
    pub thresholds: FilterThresholds,
    #[serde(default)]
    pub deposit_bounds: DepositBounds,
    #[serde(default = "default_top_n")]
    pub top_n: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

fn default_top_n() -> usize {
    10
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for PipelineConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config is valid")
    }
}

impl PipelineConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: PipelineConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_against(base);
        Ok(cfg)
    }

    fn inputs_mut(&mut self) -> Vec<&mut Option<PathBuf>> {
        vec![
            &mut self.seeds,
            &mut self.candidates,
            &mut self.logs,
            &mut self.transactions,
            &mut self.metadata,
            &mut self.market_map,
            &mut self.word_lists.english,
            &mut self.word_lists.crypto,
            &mut self.word_lists.homoglyphs,
            &mut self.word_lists.homophones,
            &mut self.word_lists.combination,
            &mut self.exchanges,
            &mut self.whitelist,
            &mut self.labels,
            &mut self.social,
            &mut self.images,
            &mut self.usd_table,
        ]
    }

    /// Makes every relative path relative to `base` instead.
    pub fn resolve_against(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in self.inputs_mut().into_iter().flatten() {
            fix(p);
        }
        if let Some(p) = self.hash_cache.as_mut() {
            fix(p);
        }
        fix(&mut self.out_dir);
    }

    /// Checks thresholds and that every configured input exists.
    pub fn validate(&mut self) -> Result<()> {
        self.thresholds.validate()?;
        for p in self.inputs_mut().into_iter().flatten() {
            if !p.exists() {
                return Err(Error::io(
                    p.clone(),
                    std::io::Error::new(std::io::ErrorKind::NotFound, "configured input does not exist"),
                ));
            }
        }
        Ok(())
    }

    pub fn hash_cache_path(&self) -> PathBuf {
        self.hash_cache.clone().unwrap_or_else(|| self.out("hashes.jsonl"))
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// The configured path for `key`, or a validation error naming the key.
    pub fn require<'a>(&self, key: &'static str, p: &'a Option<PathBuf>) -> Result<&'a Path> {
        p.as_deref()
            .ok_or_else(|| Error::invalid("config", format!("`{key}` is required for this stage but not set")))
    }
}
