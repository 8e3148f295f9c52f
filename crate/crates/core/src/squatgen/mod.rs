//! Cybersquatting keyword corpus generation.
//!
//! Seed names are canonicalised the way a domain permutation tool would see
//! them (special characters become separators), mutated by exactly one rule,
//! and filtered against common-word lists so that generic words such as
//! `Metaverse` never become squat keywords.

mod mutate;
mod wordlists;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{dec_u256, Address, U256};

pub(crate) use mutate::{adjacent_keys, homoglyph_swaps, homophone_swaps, vowel_swaps};
pub use wordlists::{MutationSettings, WordListPaths, WordLists};

/// An official, top-ranked collection used as a squatting target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedCollection {
    pub rank: u32,
    pub name: String,
    pub contract_address: Address,
    pub deploy_block: u64,
    #[serde(with = "dec_u256")]
    pub market_cap_wei: U256,
}

impl SeedCollection {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::invalid("seed", format!("empty name for {}", self.contract_address)));
        }
        if self.rank == 0 {
            return Err(Error::invalid("seed", format!("rank must be >= 1 for {:?}", self.name)));
        }
        Ok(())
    }
}

/// Naming tactic that turns an official name into a squat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tactic {
    IdenticalName,
    CombinationSquatting,
    CharacterInsertion,
    CharacterOmission,
    CaseSubstitution,
    MisspellingSubstitution,
    Homoglyph,
    Homophone,
}

impl Tactic {
    pub const ALL: [Tactic; 8] = [
        Tactic::IdenticalName,
        Tactic::CombinationSquatting,
        Tactic::CharacterInsertion,
        Tactic::CharacterOmission,
        Tactic::CaseSubstitution,
        Tactic::MisspellingSubstitution,
        Tactic::Homoglyph,
        Tactic::Homophone,
    ];

    /// The six single-character/word mutation rules.
    pub const MUTATIONS: [Tactic; 6] = [
        Tactic::CharacterInsertion,
        Tactic::CharacterOmission,
        Tactic::CaseSubstitution,
        Tactic::MisspellingSubstitution,
        Tactic::Homoglyph,
        Tactic::Homophone,
    ];

    /// Classification priority; higher wins when several tactics explain a name.
    pub fn priority(self) -> u8 {
        match self {
            Tactic::IdenticalName => 7,
            Tactic::CaseSubstitution => 6,
            Tactic::Homophone => 5,
            Tactic::Homoglyph => 4,
            Tactic::MisspellingSubstitution => 3,
            Tactic::CharacterInsertion => 2,
            Tactic::CharacterOmission => 1,
            Tactic::CombinationSquatting => 0,
        }
    }

    pub fn is_mutation(self) -> bool {
        Self::MUTATIONS.contains(&self)
    }
}

/// A generated name variant and the rule that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquatKeyword {
    pub text: String,
    pub tactic: Tactic,
    pub seed_name: String,
    pub rule_detail: String,
}

/// Domain-like form of a name: anything outside `[A-Za-z0-9 ]` becomes a
/// space, runs of spaces collapse, the result is trimmed, and spaces turn into dots.
pub fn preprocess_name(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(".")
}

/// Inverse of [`preprocess_name`]: dots back to single spaces.
pub fn restore_name(domain_like: &str) -> String {
    domain_like.replace('.', " ")
}

/// Canonical spaced form used as the mutation base.
pub fn canonical_name(name: &str) -> String {
    restore_name(&preprocess_name(name))
}

/// All single-rule variants of `name` under one mutation tactic.
///
/// Identity results are dropped and the output is deduplicated, keeping the
/// first rule that produced each text.
pub fn mutate(name: &str, tactic: Tactic, lists: &WordLists) -> Result<Vec<SquatKeyword>> {
    let raw = match tactic {
        Tactic::CharacterInsertion => mutate::insertions(name),
        Tactic::CharacterOmission => mutate::omissions(name),
        Tactic::CaseSubstitution => mutate::case_flips(name),
        Tactic::MisspellingSubstitution => {
            let mut v = mutate::vowel_swaps(name);
            if lists.settings.adjacent_key {
                v.extend(mutate::adjacent_keys(name));
            }
            v
        }
        Tactic::Homoglyph => mutate::homoglyph_swaps(
            name,
            lists.homoglyph_table(),
            lists.settings.case_raising_homoglyphs,
        ),
        Tactic::Homophone => mutate::homophone_swaps(name, |w| {
            lists.homophones_of(w).map(|s| s.iter().cloned().collect())
        }),
        Tactic::IdenticalName | Tactic::CombinationSquatting => {
            return Err(Error::invalid(
                "tactic",
                format!("{tactic:?} is not a single-rule mutation"),
            ))
        }
    };
    let mut seen = std::collections::HashSet::new();
    Ok(raw
        .into_iter()
        .filter(|(text, _)| text != name && seen.insert(text.clone()))
        .map(|(text, rule_detail)| SquatKeyword {
            text,
            tactic,
            seed_name: name.to_string(),
            rule_detail,
        })
        .collect())
}

/// Combination variants: every keyword prepended and appended, with and
/// without a separating space.
pub fn combinations(name: &str, lists: &WordLists) -> Vec<SquatKeyword> {
    let mut out = Vec::new();
    for kw in lists.combination_keywords() {
        for (text, detail) in [
            (format!("{kw} {name}"), format!("prefix '{kw} '")),
            (format!("{kw}{name}"), format!("prefix '{kw}'")),
            (format!("{name} {kw}"), format!("suffix ' {kw}'")),
            (format!("{name}{kw}"), format!("suffix '{kw}'")),
        ] {
            out.push(SquatKeyword {
                text,
                tactic: Tactic::CombinationSquatting,
                seed_name: name.to_string(),
                rule_detail: detail,
            });
        }
    }
    out
}

/// Keeps one collection per case-folded name, the one with the highest market cap.
pub fn dedup_seeds(seeds: &[SeedCollection]) -> Vec<SeedCollection> {
    let mut best: HashMap<String, &SeedCollection> = HashMap::new();
    for s in seeds {
        let key = s.name.trim().to_lowercase();
        match best.get(&key) {
            Some(cur)
                if (cur.market_cap_wei, std::cmp::Reverse(cur.rank))
                    >= (s.market_cap_wei, std::cmp::Reverse(s.rank)) => {}
            _ => {
                best.insert(key, s);
            }
        }
    }
    let mut out: Vec<SeedCollection> = best.into_values().cloned().collect();
    out.sort_by(|a, b| a.rank.cmp(&b.rank).then_with(|| a.name.cmp(&b.name)));
    out
}

/// Generated corpus plus the seeds that had to be skipped.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub keywords: Vec<SquatKeyword>,
    pub skipped_seeds: Vec<String>,
}

fn seed_keywords(seed: &SeedCollection, lists: &WordLists) -> Option<Vec<SquatKeyword>> {
    let base = canonical_name(&seed.name);
    if base.is_empty() {
        return None;
    }
    let mut all = vec![SquatKeyword {
        text: seed.name.clone(),
        tactic: Tactic::IdenticalName,
        seed_name: seed.name.clone(),
        rule_detail: "identical".to_string(),
    }];
    all.extend(combinations(&base, lists));
    for tactic in Tactic::MUTATIONS {
        all.extend(mutate(&base, tactic, lists).expect("mutation tactic"));
    }

    // One keyword per text: the highest-priority tactic wins.
    let mut by_text: BTreeMap<String, SquatKeyword> = BTreeMap::new();
    for mut kw in all {
        if kw.tactic != Tactic::IdenticalName && kw.text == seed.name {
            continue;
        }
        if lists.is_common_word(&kw.text) {
            continue;
        }
        kw.seed_name = seed.name.clone();
        match by_text.get(&kw.text) {
            Some(cur) if cur.tactic.priority() >= kw.tactic.priority() => {}
            _ => {
                by_text.insert(kw.text.clone(), kw);
            }
        }
    }
    let mut out: Vec<SquatKeyword> = by_text.into_values().collect();
    out.sort_by(|a, b| a.tactic.cmp(&b.tactic).then_with(|| a.text.cmp(&b.text)));
    Some(out)
}

/// Builds the keyword corpus for a seed list.
///
/// Output is ordered by (seed rank, tactic, text) and is a pure function of
/// the inputs; seeds are processed in parallel and merged in rank order.
pub fn generate_corpus(seeds: &[SeedCollection], lists: &WordLists) -> Corpus {
    let seeds = dedup_seeds(seeds);
    let per_seed: Vec<(String, Option<Vec<SquatKeyword>>)> = seeds
        .par_iter()
        .map(|s| (s.name.clone(), seed_keywords(s, lists)))
        .collect();
    let mut corpus = Corpus::default();
    for (name, kws) in per_seed {
        match kws {
            Some(k) => corpus.keywords.extend(k),
            None => {
                log::warn!("seed {name:?} is empty after preprocessing; skipped");
                corpus.skipped_seeds.push(name);
            }
        }
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn seed(rank: u32, name: &str) -> SeedCollection {
        SeedCollection {
            rank,
            name: name.to_string(),
            contract_address: Address::from_low_u64(rank as u64),
            deploy_block: 100,
            market_cap_wei: U256::from(1000 - rank),
        }
    }

    fn has(corpus: &[SquatKeyword], text: &str, tactic: Tactic) -> bool {
        corpus.iter().any(|k| k.text == text && k.tactic == tactic)
    }

    #[test]
    fn preprocess_examples() {
        assert_eq!(preprocess_name("Murakami.Flowers"), "Murakami.Flowers");
        assert_eq!(preprocess_name("Azuki"), "Azuki");
        assert_eq!(preprocess_name("Lives of Asuna"), "Lives.of.Asuna");
        assert_eq!(preprocess_name("  CloneX -- (RTFKT)  "), "CloneX.RTFKT");
        assert_eq!(preprocess_name("!!!"), "");
        assert_eq!(restore_name(&preprocess_name("Lives of Asuna")), "Lives of Asuna");
    }

    #[test]
    fn corpus_contains_paper_examples() {
        let lists = WordLists::builtin();
        let c = generate_corpus(&[seed(1, "Moonbirds"), seed(2, "Doodles")], &lists).keywords;
        assert!(has(&c, "Moonbhirds", Tactic::CharacterInsertion));
        assert!(has(&c, "Doodle", Tactic::CharacterOmission));
        assert!(has(&c, "Moonbirds", Tactic::IdenticalName));
        assert!(has(&c, "Doodles NFT", Tactic::CombinationSquatting));
    }

    #[test]
    fn common_words_are_suppressed() {
        let lists = WordLists::builtin();
        let c = generate_corpus(&[seed(1, "Metaverse HQ"), seed(2, "Metaverses")], &lists).keywords;
        assert!(!c.iter().any(|k| k.text.eq_ignore_ascii_case("metaverse")));
        assert!(c.iter().all(|k| !lists.is_common_word(&k.text)));
        // The omission that would have produced it is otherwise active.
        assert!(has(&c, "Metavrses", Tactic::CharacterOmission));
    }

    #[test]
    fn single_char_seed_has_no_omission() {
        let lists = WordLists::empty();
        let c = generate_corpus(&[seed(1, "X")], &lists).keywords;
        assert!(!c.iter().any(|k| k.tactic == Tactic::CharacterOmission));
        assert!(c.iter().all(|k| !k.text.is_empty()));
    }

    #[test]
    fn empty_seed_list_is_empty_corpus() {
        let c = generate_corpus(&[], &WordLists::builtin());
        assert!(c.keywords.is_empty());
    }

    #[test]
    fn special_only_seed_is_skipped() {
        let c = generate_corpus(&[seed(1, "???"), seed(2, "Azuki")], &WordLists::builtin());
        assert_eq!(c.skipped_seeds, vec!["???".to_string()]);
        assert!(c.keywords.iter().all(|k| k.seed_name == "Azuki"));
    }

    #[test]
    fn mutate_examples() {
        let lists = WordLists::builtin();
        let texts = |name, t| -> Vec<String> {
            mutate(name, t, &lists).unwrap().into_iter().map(|k| k.text).collect()
        };
        assert!(texts("Milady Maker", Tactic::CaseSubstitution).contains(&"MIlady Maker".into()));
        assert!(texts("Azuki", Tactic::Homoglyph).contains(&"AZUKl".into()));
        assert!(texts("Bored Ape Yacht Club", Tactic::Homophone).contains(&"Board Ape Yacht Club".into()));
        let mut ab = texts("ab", Tactic::CharacterOmission);
        ab.sort();
        assert_eq!(ab, vec!["a", "b"]);
        assert!(texts("Milady Maker", Tactic::MisspellingSubstitution).contains(&"Malady Maker".into()));
        assert!(mutate("Azuki", Tactic::IdenticalName, &lists).is_err());
        assert!(mutate("Azuki", Tactic::CombinationSquatting, &lists).is_err());
    }

    #[test]
    fn case_raising_can_be_disabled() {
        let mut lists = WordLists::builtin();
        lists.settings.case_raising_homoglyphs = false;
        let v: Vec<String> = mutate("Azuki", Tactic::Homoglyph, &lists)
            .unwrap()
            .into_iter()
            .map(|k| k.text)
            .collect();
        assert!(v.contains(&"Azukl".to_string()));
        assert!(!v.contains(&"AZUKl".to_string()));
    }

    #[test]
    fn adjacent_key_reports_as_misspelling() {
        let mut lists = WordLists::builtin();
        lists.settings.adjacent_key = true;
        let v = mutate("Azuki", Tactic::MisspellingSubstitution, &lists).unwrap();
        let hit = v.iter().find(|k| k.text == "Azuji").unwrap();
        assert!(hit.rule_detail.starts_with("adjacent-key"));
        lists.settings.adjacent_key = false;
        let v = mutate("Azuki", Tactic::MisspellingSubstitution, &lists).unwrap();
        assert!(!v.iter().any(|k| k.text == "Azuji"));
    }

    #[test]
    fn seeds_dedup_keeps_highest_market_cap() {
        let mut a = seed(52, "Decentraland");
        a.market_cap_wei = U256::from(900);
        let mut b = seed(372, "Decentraland");
        b.market_cap_wei = U256::from(100);
        let out = dedup_seeds(&[b, a.clone()]);
        assert_eq!(out, vec![a]);
    }

    #[test]
    fn output_sorted_and_unique() {
        let lists = WordLists::builtin();
        let seeds = [seed(2, "Doodles"), seed(1, "Azuki")];
        let c = generate_corpus(&seeds, &lists).keywords;
        let first_doodles = c.iter().position(|k| k.seed_name == "Doodles").unwrap();
        assert!(c[..first_doodles].iter().all(|k| k.seed_name == "Azuki"));
        let mut keys: Vec<_> = c.iter().map(|k| (&k.text, &k.seed_name)).collect();
        let n = keys.len();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), n);
        assert_eq!(c, generate_corpus(&seeds, &lists).keywords);
    }

    #[test]
    fn seed_validation() {
        let mut s = seed(1, "  ");
        assert!(s.validate().is_err());
        s.name = "Ok".into();
        s.rank = 0;
        assert!(s.validate().is_err());
    }
}
