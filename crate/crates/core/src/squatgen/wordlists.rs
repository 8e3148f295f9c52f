use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::jsonl;

const ENGLISH: &str = include_str!("../../data/english.txt");
const CRYPTO: &str = include_str!("../../data/crypto.txt");
const HOMOGLYPHS: &str = include_str!("../../data/homoglyphs.txt");
const HOMOPHONES: &str = include_str!("../../data/homophones.txt");
const COMBINATION: &str = include_str!("../../data/combination.txt");

/// Generation switches that are not word data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MutationSettings {
    /// Also emit homoglyph variants with every other character upper-cased
    /// (`Azuki` -> `AZUKl`).
    pub case_raising_homoglyphs: bool,
    /// Emit QWERTY adjacent-key substitutions under misspelling.
    pub adjacent_key: bool,
}

impl Default for MutationSettings {
    fn default() -> Self {
        MutationSettings {
            case_raising_homoglyphs: true,
            adjacent_key: false,
        }
    }
}

/// Optional user files that extend the built-in lists.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct WordListPaths {
    pub english: Option<PathBuf>,
    pub crypto: Option<PathBuf>,
    pub homoglyphs: Option<PathBuf>,
    pub homophones: Option<PathBuf>,
    pub combination: Option<PathBuf>,
}

/// Word data driving generation, suppression and classification.
///
/// All lookups are case-folded. The homoglyph relation is stored symmetric and
/// homophone groups never pair a word with itself.
#[derive(Debug, Clone)]
pub struct WordLists {
    english: HashSet<String>,
    crypto: HashSet<String>,
    homoglyphs: BTreeMap<String, BTreeSet<String>>,
    /// Same relation restricted to lower-case glyphs, used when matching.
    folded_homoglyphs: BTreeMap<String, BTreeSet<String>>,
    homophones: BTreeMap<String, BTreeSet<String>>,
    combination_keywords: Vec<String>,
    pub settings: MutationSettings,
}

fn entries(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(jsonl::strip_comment).filter(|l| !l.is_empty())
}

impl WordLists {
    /// The lists shipped with the crate.
    pub fn builtin() -> Self {
        let mut lists = WordLists {
            english: HashSet::new(),
            crypto: HashSet::new(),
            homoglyphs: BTreeMap::new(),
            folded_homoglyphs: BTreeMap::new(),
            homophones: BTreeMap::new(),
            combination_keywords: Vec::new(),
            settings: MutationSettings::default(),
        };
        lists.add_english(entries(ENGLISH));
        lists.add_crypto(entries(CRYPTO));
        lists.add_homoglyph_groups(entries(HOMOGLYPHS));
        lists.add_homophone_groups(entries(HOMOPHONES));
        lists.add_combination_keywords(entries(COMBINATION));
        lists
    }

    /// An empty set of lists; useful for tests that want exact control.
    pub fn empty() -> Self {
        WordLists {
            english: HashSet::new(),
            crypto: HashSet::new(),
            homoglyphs: BTreeMap::new(),
            folded_homoglyphs: BTreeMap::new(),
            homophones: BTreeMap::new(),
            combination_keywords: Vec::new(),
            settings: MutationSettings::default(),
        }
    }

    /// Built-in lists extended with the entries of any provided files.
    pub fn load(paths: &WordListPaths) -> Result<Self> {
        let mut lists = Self::builtin();
        let read = |p: &Option<PathBuf>| -> Result<Vec<String>> {
            match p {
                Some(p) => Ok(jsonl::read_lines(p)?.into_iter().map(|(_, s)| s).collect()),
                None => Ok(Vec::new()),
            }
        };
        let english = read(&paths.english)?;
        lists.add_english(english.iter().map(String::as_str));
        let crypto = read(&paths.crypto)?;
        lists.add_crypto(crypto.iter().map(String::as_str));
        let glyphs = read(&paths.homoglyphs)?;
        lists.add_homoglyph_groups(glyphs.iter().map(String::as_str));
        let phones = read(&paths.homophones)?;
        lists.add_homophone_groups(phones.iter().map(String::as_str));
        let combos = read(&paths.combination)?;
        lists.add_combination_keywords(combos.iter().map(String::as_str));
        Ok(lists)
    }

    pub fn add_english<'a>(&mut self, words: impl IntoIterator<Item = &'a str>) {
        self.english.extend(words.into_iter().map(|w| w.trim().to_lowercase()));
    }

    pub fn add_crypto<'a>(&mut self, words: impl IntoIterator<Item = &'a str>) {
        self.crypto.extend(words.into_iter().map(|w| w.trim().to_lowercase()));
    }

    /// Each group is a whitespace-separated list of mutually confusable glyphs.
    pub fn add_homoglyph_groups<'a>(&mut self, groups: impl IntoIterator<Item = &'a str>) {
        for group in groups {
            let members: Vec<&str> = group.split_whitespace().collect();
            for a in &members {
                for b in &members {
                    if a != b {
                        self.add_homoglyph_pair(a, b);
                    }
                }
            }
        }
    }

    fn add_homoglyph_pair(&mut self, a: &str, b: &str) {
        self.homoglyphs
            .entry(a.to_string())
            .or_default()
            .insert(b.to_string());
        self.homoglyphs
            .entry(b.to_string())
            .or_default()
            .insert(a.to_string());
        let (fa, fb) = (a.to_lowercase(), b.to_lowercase());
        if fa != fb {
            self.folded_homoglyphs.entry(fa.clone()).or_default().insert(fb.clone());
            self.folded_homoglyphs.entry(fb).or_default().insert(fa);
        }
    }

    /// Each group is a whitespace-separated list of words pronounced alike.
    pub fn add_homophone_groups<'a>(&mut self, groups: impl IntoIterator<Item = &'a str>) {
        for group in groups {
            let members: Vec<String> = group.split_whitespace().map(str::to_lowercase).collect();
            for a in &members {
                for b in &members {
                    if a != b {
                        self.homophones.entry(a.clone()).or_default().insert(b.clone());
                    }
                }
            }
        }
    }

    pub fn add_combination_keywords<'a>(&mut self, words: impl IntoIterator<Item = &'a str>) {
        for w in words {
            let w = w.trim();
            if !w.is_empty() && !self.combination_keywords.iter().any(|k| k == w) {
                self.combination_keywords.push(w.to_string());
            }
        }
    }

    /// True if the whole text, case-folded, is a common English or crypto word.
    pub fn is_common_word(&self, text: &str) -> bool {
        let folded = text.trim().to_lowercase();
        self.english.contains(&folded) || self.crypto.contains(&folded)
    }

    pub fn homoglyph_table(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.homoglyphs
    }

    pub(crate) fn folded_homoglyph_table(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.folded_homoglyphs
    }

    /// Homophone partners of a word (case-folded lookup).
    pub fn homophones_of(&self, word: &str) -> Option<&BTreeSet<String>> {
        self.homophones.get(&word.to_lowercase())
    }

    /// Distinct unordered homophone pairs.
    pub fn homophone_pairs(&self) -> BTreeSet<(String, String)> {
        self.homophones
            .iter()
            .flat_map(|(a, bs)| {
                bs.iter()
                    .map(move |b| if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) })
            })
            .collect()
    }

    pub fn combination_keywords(&self) -> &[String] {
        &self.combination_keywords
    }
}
