//! Name matching and tactic classification.
//!
//! Candidates are compared with seeds "ignoring cases and special characters":
//! everything is first reduced by [`normalize`]. Only the identical-name and
//! case-substitution tests look at the raw strings, since normalisation erases
//! exactly the difference they detect.

mod levenshtein;

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::squatgen::{
    adjacent_keys, homoglyph_swaps, homophone_swaps, vowel_swaps, SeedCollection, SquatKeyword,
    Tactic, WordLists,
};
use crate::types::{Address, TokenStandard};

pub use levenshtein::levenshtein;

/// A deployed collection whose name is checked against the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateCollection {
    pub contract_address: Address,
    pub name: String,
    pub standard: TokenStandard,
    #[serde(default)]
    pub deploy_block: Option<u64>,
    pub creator: Address,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchKind {
    Exact,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub candidate: CandidateCollection,
    pub seed_name: String,
    pub tactic: Tactic,
    pub matched_keyword: String,
    pub match_kind: MatchKind,
    pub secondary_tactics: Vec<Tactic>,
    /// Other seeds the candidate also matched, best rank first.
    #[serde(default)]
    pub secondary_seeds: Vec<String>,
}

/// Outcome of [`classify_pair`]: the winning tactic plus every lower-priority
/// tactic that also explains the pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub tactic: Tactic,
    pub secondary: Vec<Tactic>,
}

/// Case-folds and drops every character that is not a letter or digit.
pub fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

fn char_removed_equals(longer: &[char], shorter: &[char], removed_ok: impl Fn(char) -> bool) -> bool {
    if longer.len() != shorter.len() + 1 {
        return false;
    }
    let split = longer.iter().zip(shorter).take_while(|(a, b)| a == b).count();
    removed_ok(longer[split]) && longer[split + 1..] == shorter[split..]
}

/// Classifier for one seed name, with its substitution variants computed once.
#[derive(Debug, Clone)]
pub struct PairClassifier {
    raw: String,
    normalized: String,
    chars: Vec<char>,
    homophones: HashSet<String>,
    homoglyphs: HashSet<String>,
    misspellings: HashSet<String>,
}

impl PairClassifier {
    pub fn new(seed_name: &str, lists: &WordLists) -> Self {
        let normalized = normalize(seed_name);
        let set = |variants: Vec<(String, String)>| variants.iter().map(|(v, _)| normalize(v)).collect();
        let homophones = homophone_swaps(&seed_name.to_lowercase(), |w| {
            lists.homophones_of(&normalize(w)).map(|s| s.iter().cloned().collect())
        });
        let mut misspellings = vowel_swaps(&normalized);
        if lists.settings.adjacent_key {
            misspellings.extend(adjacent_keys(&normalized));
        }
        PairClassifier {
            raw: seed_name.to_string(),
            chars: normalized.chars().collect(),
            homophones: set(homophones),
            homoglyphs: set(homoglyph_swaps(&normalized, lists.folded_homoglyph_table(), false)),
            misspellings: set(misspellings),
            normalized,
        }
    }

    /// Classifies how `candidate_name` imitates the seed, or `None` for no match.
    ///
    /// Priority: raw equality, then cosmetic difference (equal once normalised,
    /// reported as case substitution), then single-rule mutations in the order
    /// homophone, homoglyph, misspelling, insertion, omission, and finally the
    /// normalised seed appearing as a proper substring (combination).
    pub fn classify(&self, candidate_name: &str) -> Option<Classification> {
        let ns = &self.normalized;
        let nc = normalize(candidate_name);
        let mut tactics = Vec::new();
        if self.raw == candidate_name {
            tactics.push(Tactic::IdenticalName);
        } else if !nc.is_empty() && *ns == nc {
            tactics.push(Tactic::CaseSubstitution);
        }
        if !nc.is_empty() && !ns.is_empty() && *ns != nc {
            for (set, t) in [
                (&self.homophones, Tactic::Homophone),
                (&self.homoglyphs, Tactic::Homoglyph),
                (&self.misspellings, Tactic::MisspellingSubstitution),
            ] {
                if set.contains(&nc) {
                    tactics.push(t);
                }
            }
            let c: Vec<char> = nc.chars().collect();
            if char_removed_equals(&c, &self.chars, |ch| ch.is_ascii_lowercase()) {
                tactics.push(Tactic::CharacterInsertion);
            }
            if char_removed_equals(&self.chars, &c, |_| true) {
                tactics.push(Tactic::CharacterOmission);
            }
            if nc.len() > ns.len() && nc.contains(ns.as_str()) {
                tactics.push(Tactic::CombinationSquatting);
            }
        }
        let mut it = tactics.into_iter();
        let tactic = it.next()?;
        Some(Classification {
            tactic,
            secondary: it.collect(),
        })
    }
}

/// One-off form of [`PairClassifier::classify`].
pub fn classify_pair(seed_name: &str, candidate_name: &str, lists: &WordLists) -> Option<Classification> {
    PairClassifier::new(seed_name, lists).classify(candidate_name)
}

#[derive(Debug)]
struct SeedEntry {
    seed: SeedCollection,
    normalized: String,
    classifier: PairClassifier,
}

#[derive(Debug)]
struct KeywordEntry {
    seed: usize,
    tactic: Tactic,
    text: String,
}

/// Read-only index over a corpus, built once and shared across threads.
#[derive(Debug)]
pub struct Matcher {
    seeds: Vec<SeedEntry>,
    exact: HashMap<String, Vec<KeywordEntry>>,
    /// Normalised mutation keywords for the partial-match pass.
    mutations: Vec<(String, KeywordEntry)>,
}

/// Matches plus the candidates that could not be matched at all.
#[derive(Debug, Default)]
pub struct MatchOutput {
    pub matches: Vec<MatchResult>,
    pub skipped: Vec<Address>,
}

impl Matcher {
    pub fn new(corpus: &[SquatKeyword], seeds: &[SeedCollection], lists: &WordLists) -> Self {
        let mut seed_entries: Vec<SeedEntry> = seeds
            .iter()
            .map(|s| SeedEntry {
                seed: s.clone(),
                normalized: normalize(&s.name),
                classifier: PairClassifier::new(&s.name, lists),
            })
            .collect();
        seed_entries.sort_by(|a, b| a.seed.rank.cmp(&b.seed.rank).then_with(|| a.seed.name.cmp(&b.seed.name)));
        let by_name: HashMap<&str, usize> = seed_entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.seed.name.as_str(), i))
            .rev()
            .collect();

        let mut exact: HashMap<String, Vec<KeywordEntry>> = HashMap::new();
        let mut mutations = Vec::new();
        for kw in corpus {
            let Some(&seed) = by_name.get(kw.seed_name.as_str()) else {
                log::warn!("keyword {:?} refers to unknown seed {:?}", kw.text, kw.seed_name);
                continue;
            };
            let norm = normalize(&kw.text);
            if norm.is_empty() {
                continue;
            }
            if kw.tactic.is_mutation() {
                mutations.push((
                    norm.clone(),
                    KeywordEntry {
                        seed,
                        tactic: kw.tactic,
                        text: kw.text.clone(),
                    },
                ));
            }
            exact.entry(norm).or_default().push(KeywordEntry {
                seed,
                tactic: kw.tactic,
                text: kw.text.clone(),
            });
        }
        mutations.sort_by(|(na, a), (nb, b)| {
            (na, a.seed, a.tactic, &a.text).cmp(&(nb, b.seed, b.tactic, &b.text))
        });
        mutations.dedup_by(|(na, a), (nb, b)| na == nb && a.seed == b.seed && a.tactic == b.tactic && a.text == b.text);
        Matcher {
            seeds: seed_entries,
            exact,
            mutations,
        }
    }

    fn result(
        &self,
        cand: &CandidateCollection,
        seed: usize,
        keyword: &str,
        fallback: Tactic,
        forced_secondary: Option<Tactic>,
        others: Vec<usize>,
    ) -> MatchResult {
        let seed_name = &self.seeds[seed].seed.name;
        let (tactic, secondary) = match (forced_secondary, self.seeds[seed].classifier.classify(&cand.name)) {
            (None, Some(c)) => (c.tactic, c.secondary),
            (None, None) => (fallback, Vec::new()),
            (Some(mutation), _) => (Tactic::CombinationSquatting, vec![mutation]),
        };
        let match_kind = if tactic == Tactic::CombinationSquatting {
            MatchKind::Partial
        } else if forced_secondary.is_none() && normalize(keyword) == normalize(&cand.name) {
            MatchKind::Exact
        } else {
            MatchKind::Partial
        };
        let mut others = others;
        others.sort_unstable();
        others.dedup();
        MatchResult {
            candidate: cand.clone(),
            seed_name: seed_name.clone(),
            tactic,
            matched_keyword: keyword.to_string(),
            match_kind,
            secondary_tactics: secondary,
            secondary_seeds: others
                .into_iter()
                .filter(|&o| o != seed)
                .map(|o| self.seeds[o].seed.name.clone())
                .collect(),
        }
    }

    /// Matches one candidate; `Err` only when its normalised name is empty.
    pub fn match_candidate(&self, cand: &CandidateCollection) -> Result<Option<MatchResult>> {
        let norm = normalize(&cand.name);
        if norm.is_empty() {
            return Err(Error::invalid(
                "candidate",
                format!("{} has an empty normalized name", cand.contract_address),
            ));
        }

        // (a) exact hit on a normalised keyword
        if let Some(hits) = self.exact.get(&norm) {
            let best = hits
                .iter()
                .min_by(|a, b| {
                    a.seed
                        .cmp(&b.seed)
                        .then(b.tactic.priority().cmp(&a.tactic.priority()))
                        .then(a.text.cmp(&b.text))
                })
                .expect("non-empty bucket");
            let others = hits.iter().map(|h| h.seed).collect();
            return Ok(Some(self.result(cand, best.seed, &best.text, best.tactic, None, others)));
        }

        // (b) seed name embedded in the candidate
        let seeds: Vec<usize> = self
            .seeds
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.normalized.is_empty() && norm.len() > s.normalized.len() && norm.contains(&s.normalized))
            .map(|(i, _)| i)
            .collect();
        if let Some(&best) = seeds.first() {
            let keyword = self.seeds[best].seed.name.clone();
            return Ok(Some(self.result(cand, best, &keyword, Tactic::CombinationSquatting, None, seeds)));
        }

        // (c) mutation keyword embedded in a candidate longer than its seed
        let hits: Vec<&KeywordEntry> = self
            .mutations
            .iter()
            .filter(|(k, e)| {
                norm.len() > k.len() && norm.len() > self.seeds[e.seed].normalized.len() && norm.contains(k.as_str())
            })
            .map(|(_, e)| e)
            .collect();
        let best = hits
            .iter()
            .min_by(|a, b| {
                a.seed
                    .cmp(&b.seed)
                    .then(b.tactic.priority().cmp(&a.tactic.priority()))
                    .then(b.text.len().cmp(&a.text.len()))
                    .then(a.text.cmp(&b.text))
            });
        Ok(best.map(|b| {
            let others = hits.iter().map(|h| h.seed).collect();
            self.result(cand, b.seed, &b.text, Tactic::CombinationSquatting, Some(b.tactic), others)
        }))
    }

    /// Matches every candidate in parallel; output keeps the input order.
    pub fn match_all(&self, candidates: &[CandidateCollection]) -> MatchOutput {
        let results: Vec<_> = candidates.par_iter().map(|c| (c, self.match_candidate(c))).collect();
        let mut out = MatchOutput::default();
        for (cand, res) in results {
            match res {
                Ok(Some(m)) => out.matches.push(m),
                Ok(None) => {}
                Err(e) => {
                    log::warn!("skipping candidate: {e}");
                    out.skipped.push(cand.contract_address);
                }
            }
        }
        out
    }
}

/// Convenience wrapper building a [`Matcher`] and matching every candidate.
pub fn match_all(
    candidates: &[CandidateCollection],
    corpus: &[SquatKeyword],
    seeds: &[SeedCollection],
    lists: &WordLists,
) -> MatchOutput {
    Matcher::new(corpus, seeds, lists).match_all(candidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squatgen::{generate_corpus, mutate};
    use crate::types::U256;
    use proptest::prelude::*;

    fn lists() -> WordLists {
        WordLists::builtin()
    }

    fn tactic(seed: &str, cand: &str) -> Option<Tactic> {
        classify_pair(seed, cand, &lists()).map(|c| c.tactic)
    }

    fn seed(rank: u32, name: &str) -> SeedCollection {
        SeedCollection {
            rank,
            name: name.into(),
            contract_address: Address::from_low_u64(rank as u64),
            deploy_block: 1,
            market_cap_wei: U256::from(100 - rank),
        }
    }

    fn cand(n: u64, name: &str) -> CandidateCollection {
        CandidateCollection {
            contract_address: Address::from_low_u64(1000 + n),
            name: name.into(),
            standard: TokenStandard::Erc721,
            deploy_block: Some(5000),
            creator: Address::from_low_u64(9),
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("The Lives of Asuna"), "thelivesofasuna");
        assert_eq!(normalize("azuki"), "azuki");
        assert_eq!(normalize("M!F#E$R"), "mfer");
        assert_eq!(normalize("!!"), "");
    }

    #[test]
    fn classify_examples() {
        assert_eq!(tactic("Milady Maker", "Malady Maker"), Some(Tactic::MisspellingSubstitution));
        assert_eq!(tactic("Lives of Asuna", "The Lives of Asuna"), Some(Tactic::CombinationSquatting));
        assert_eq!(tactic("mfer", "mfer chicks"), Some(Tactic::CombinationSquatting));
        assert_eq!(tactic("Azuki", "Azuki"), Some(Tactic::IdenticalName));
        assert_eq!(tactic("Azuki", "Azuki2"), Some(Tactic::CombinationSquatting));
        assert_eq!(tactic("Azuki", "Ahzuki"), Some(Tactic::CharacterInsertion));
        assert_eq!(tactic("Azuki", "AZUKl"), Some(Tactic::Homoglyph));
        assert_eq!(tactic("Milady Maker", "MIlady Maker"), Some(Tactic::CaseSubstitution));
        assert_eq!(tactic("Bored Ape Yacht Club", "Board Ape Yacht Club"), Some(Tactic::Homophone));
        assert_eq!(tactic("CryptoDads", "CryptoCars"), None);
        assert_eq!(tactic("y00ts Yacht Club", "r00ts Yacht Club"), None);
    }

    #[test]
    fn secondary_tactics_are_reported() {
        // Appending a letter is both an insertion and a combination.
        let c = classify_pair("Doodles", "Doodlesz", &lists()).unwrap();
        assert_eq!(c.tactic, Tactic::CharacterInsertion);
        assert_eq!(c.secondary, vec![Tactic::CombinationSquatting]);
    }

    #[test]
    fn punctuation_only_difference_is_cosmetic() {
        assert_eq!(tactic("Bored Ape Yacht Club", "Bored-Ape Yacht Club"), Some(Tactic::CaseSubstitution));
        assert_eq!(tactic("Azuki", "!!!"), None);
    }

    #[test]
    fn match_all_examples() {
        let l = lists();
        let seeds = vec![seed(1, "Azuki"), seed(2, "CryptoDads")];
        let corpus = generate_corpus(&seeds, &l).keywords;
        let cands = vec![cand(1, "Azuki NFT"), cand(2, "CryptoCars"), cand(3, "Azuki"), cand(4, "***")];
        let out = match_all(&cands, &corpus, &seeds, &l);
        assert_eq!(out.skipped, vec![cands[3].contract_address]);
        assert_eq!(out.matches.len(), 2);
        let nft = &out.matches[0];
        assert_eq!((nft.tactic, nft.match_kind), (Tactic::CombinationSquatting, MatchKind::Partial));
        let ident = &out.matches[1];
        assert_eq!((ident.tactic, ident.match_kind), (Tactic::IdenticalName, MatchKind::Exact));
        assert_eq!(ident.seed_name, "Azuki");
    }

    #[test]
    fn mutation_keyword_substring_is_combination_with_secondary() {
        let l = lists();
        let seeds = vec![seed(1, "Doodles")];
        let corpus = generate_corpus(&seeds, &l).keywords;
        let out = match_all(&[cand(1, "Doodle Frens")], &corpus, &seeds, &l);
        let m = &out.matches[0];
        assert_eq!(m.tactic, Tactic::CombinationSquatting);
        assert_eq!(m.secondary_tactics, vec![Tactic::CharacterOmission]);
        assert_eq!(m.match_kind, MatchKind::Partial);
    }

    #[test]
    fn embedded_mutation_needs_extra_length() {
        let l = lists();
        let seeds = vec![seed(1, "y00ts Yacht Club")];
        let corpus = generate_corpus(&seeds, &l).keywords;
        let out = match_all(&[cand(1, "r00ts Yacht Club"), cand(2, "r00ts Yacht Club DAO")], &corpus, &seeds, &l);
        assert_eq!(out.matches.len(), 1);
        assert_eq!(out.matches[0].candidate.name, "r00ts Yacht Club DAO");
    }

    #[test]
    fn classifier_agrees_with_one_off_form() {
        let l = lists();
        let c = PairClassifier::new("Bored Ape Yacht Club", &l);
        for cand in ["Board Ape Yacht Club", "Bored Ape Yacht Club", "Bored Ape", "B0red Ape Yacht Club"] {
            assert_eq!(c.classify(cand), classify_pair("Bored Ape Yacht Club", cand, &l));
        }
    }

    #[test]
    fn multi_seed_collision_keeps_best_rank() {
        let l = lists();
        let seeds = vec![seed(3, "Ape"), seed(1, "Bored Ape")];
        let corpus = generate_corpus(&seeds, &l).keywords;
        let out = match_all(&[cand(1, "Bored Ape Gang")], &corpus, &seeds, &l);
        let m = &out.matches[0];
        assert_eq!(m.seed_name, "Bored Ape");
        assert_eq!(m.secondary_seeds, vec!["Ape".to_string()]);
    }

    #[test]
    fn identical_requires_raw_equality() {
        let l = lists();
        let seeds = vec![seed(1, "Azuki")];
        let corpus = generate_corpus(&seeds, &l).keywords;
        let out = match_all(&[cand(1, "azuki")], &corpus, &seeds, &l);
        assert_eq!(out.matches[0].tactic, Tactic::CaseSubstitution);
    }

    #[test]
    fn classification_independent_of_corpus_order() {
        let l = lists();
        let seeds = vec![seed(1, "Azuki"), seed(2, "Doodles")];
        let mut corpus = generate_corpus(&seeds, &l).keywords;
        let cands = vec![cand(1, "Ahzuki"), cand(2, "Doodle"), cand(3, "The Doodles")];
        let a = match_all(&cands, &corpus, &seeds, &l).matches;
        corpus.reverse();
        let b = match_all(&cands, &corpus, &seeds, &l).matches;
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn combination_never_for_shorter_candidates(seed in "[A-Za-z ]{1,12}", cand in "[A-Za-z ]{1,12}") {
            if let Some(c) = classify_pair(&seed, &cand, &lists()) {
                if normalize(&cand).len() < normalize(&seed).len() {
                    prop_assert_ne!(c.tactic, Tactic::CombinationSquatting);
                    prop_assert!(!c.secondary.contains(&Tactic::CombinationSquatting));
                }
            }
        }

        #[test]
        fn mutations_classify_at_or_above_their_priority(name in "[A-Za-z0-9]{1,6}( [A-Za-z0-9]{1,6}){0,2}") {
            let l = lists();
            for t in Tactic::MUTATIONS {
                for kw in mutate(&name, t, &l).unwrap() {
                    let c = classify_pair(&name, &kw.text, &l);
                    prop_assert!(c.is_some(), "{:?} {:?} -> no match", t, kw.text);
                    prop_assert!(c.unwrap().tactic.priority() >= t.priority());
                }
            }
        }

        #[test]
        fn insertion_and_omission_are_dual(name in "[a-z]{1,10}") {
            let l = lists();
            for ins in mutate(&name, Tactic::CharacterInsertion, &l).unwrap() {
                let back: Vec<String> = mutate(&ins.text, Tactic::CharacterOmission, &l)
                    .unwrap().into_iter().map(|k| k.text).collect();
                prop_assert!(back.contains(&name));
            }
        }
    }
}
