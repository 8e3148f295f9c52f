//! Single-edit mutation rules. Each generator returns `(variant, rule_detail)`
//! pairs; duplicates and identity results are left for the caller to drop.

use std::collections::{BTreeMap, BTreeSet};

const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

const QWERTY_ROWS: [&str; 4] = ["1234567890", "qwertyuiop", "asdfghjkl", "zxcvbnm"];

pub(crate) type Variant = (String, String);

pub(crate) fn insertions(name: &str) -> Vec<Variant> {
    let chars: Vec<char> = name.chars().collect();
    let mut out = Vec::with_capacity(26 * (chars.len() + 1));
    for pos in 0..=chars.len() {
        for letter in 'a'..='z' {
            let mut v: String = chars[..pos].iter().collect();
            v.push(letter);
            v.extend(&chars[pos..]);
            out.push((v, format!("insert '{letter}' at {pos}")));
        }
    }
    out
}

pub(crate) fn omissions(name: &str) -> Vec<Variant> {
    let chars: Vec<char> = name.chars().collect();
    (0..chars.len())
        .filter_map(|pos| {
            let v: String = chars[..pos].iter().chain(&chars[pos + 1..]).collect();
            (!v.trim().is_empty()).then(|| (v, format!("omit '{}' at {pos}", chars[pos])))
        })
        .collect()
}

/// The opposite-case form of `c`, if it is a single character that maps back.
fn flip_case(c: char) -> Option<char> {
    let mut flipped: Vec<char> = if c.is_lowercase() {
        c.to_uppercase().collect()
    } else if c.is_uppercase() {
        c.to_lowercase().collect()
    } else {
        return None;
    };
    if flipped.len() != 1 {
        return None;
    }
    let f = flipped.pop()?;
    if f == c {
        return None;
    }
    let back: Vec<char> = if f.is_lowercase() {
        f.to_uppercase().collect()
    } else {
        f.to_lowercase().collect()
    };
    (back == [c]).then_some(f)
}

pub(crate) fn case_flips(name: &str) -> Vec<Variant> {
    let chars: Vec<char> = name.chars().collect();
    chars
        .iter()
        .enumerate()
        .filter_map(|(pos, &c)| {
            let f = flip_case(c)?;
            let mut v = chars.clone();
            v[pos] = f;
            Some((v.into_iter().collect(), format!("case '{c}'->'{f}' at {pos}")))
        })
        .collect()
}

pub(crate) fn vowel_swaps(name: &str) -> Vec<Variant> {
    let chars: Vec<char> = name.chars().collect();
    let mut out = Vec::new();
    for (pos, &c) in chars.iter().enumerate() {
        let lower = c.to_ascii_lowercase();
        if !VOWELS.contains(&lower) {
            continue;
        }
        for &other in VOWELS.iter().filter(|&&v| v != lower) {
            let repl = if c.is_ascii_uppercase() {
                other.to_ascii_uppercase()
            } else {
                other
            };
            let mut v = chars.clone();
            v[pos] = repl;
            out.push((v.into_iter().collect(), format!("vowel '{c}'->'{repl}' at {pos}")));
        }
    }
    out
}

fn qwerty_neighbours(c: char) -> Vec<char> {
    let rows: Vec<Vec<char>> = QWERTY_ROWS.iter().map(|r| r.chars().collect()).collect();
    for (r, row) in rows.iter().enumerate() {
        if let Some(col) = row.iter().position(|&k| k == c) {
            let mut out = Vec::new();
            if col > 0 {
                out.push(row[col - 1]);
            }
            if col + 1 < row.len() {
                out.push(row[col + 1]);
            }
            for adj in [r.wrapping_sub(1), r + 1] {
                if let Some(other) = rows.get(adj) {
                    for dc in [col.wrapping_sub(1), col, col + 1] {
                        if let Some(&k) = other.get(dc) {
                            out.push(k);
                        }
                    }
                }
            }
            return out;
        }
    }
    Vec::new()
}

pub(crate) fn adjacent_keys(name: &str) -> Vec<Variant> {
    let chars: Vec<char> = name.chars().collect();
    let mut out = Vec::new();
    for (pos, &c) in chars.iter().enumerate() {
        let lower = c.to_ascii_lowercase();
        for k in qwerty_neighbours(lower) {
            let repl = if c.is_ascii_uppercase() { k.to_ascii_uppercase() } else { k };
            let mut v = chars.clone();
            v[pos] = repl;
            out.push((v.into_iter().collect(), format!("adjacent-key '{c}'->'{repl}' at {pos}")));
        }
    }
    out
}

/// Replaces one occurrence of a table key with each of its confusables.
/// With `case_raising`, also emits the form where every character outside the
/// substituted glyph is upper-cased.
pub(crate) fn homoglyph_swaps(
    name: &str,
    table: &BTreeMap<String, BTreeSet<String>>,
    case_raising: bool,
) -> Vec<Variant> {
    let chars: Vec<char> = name.chars().collect();
    let mut out = Vec::new();
    for pos in 0..chars.len() {
        for (key, glyphs) in table {
            let key_chars: Vec<char> = key.chars().collect();
            if !chars[pos..].starts_with(&key_chars) {
                continue;
            }
            let head: String = chars[..pos].iter().collect();
            let tail: String = chars[pos + key_chars.len()..].iter().collect();
            for glyph in glyphs {
                let detail = format!("glyph '{key}'->'{glyph}' at {pos}");
                out.push((format!("{head}{glyph}{tail}"), detail.clone()));
                if case_raising {
                    let raised = format!("{}{glyph}{}", head.to_uppercase(), tail.to_uppercase());
                    out.push((raised, format!("{detail} case-raised")));
                }
            }
        }
    }
    out
}

fn match_capitalization(template: &str, word: &str) -> String {
    let has_lower = template.chars().any(char::is_lowercase);
    let mut tc = template.chars();
    if !has_lower && template.chars().any(char::is_uppercase) {
        word.to_uppercase()
    } else if tc.next().is_some_and(char::is_uppercase) {
        let mut wc = word.chars();
        match wc.next() {
            Some(f) => f.to_uppercase().chain(wc).collect(),
            None => String::new(),
        }
    } else {
        word.to_string()
    }
}

/// Replaces one whitespace-delimited word with each of its homophones.
pub(crate) fn homophone_swaps(
    name: &str,
    partners: impl Fn(&str) -> Option<Vec<String>>,
) -> Vec<Variant> {
    let mut out = Vec::new();
    let mut offset = 0;
    for (idx, word) in name.split_whitespace().enumerate() {
        let start = offset + name[offset..].find(word).unwrap_or(0);
        let end = start + word.len();
        offset = end;
        let Some(alts) = partners(word) else { continue };
        for alt in alts {
            let replaced = match_capitalization(word, &alt);
            let v = format!("{}{}{}", &name[..start], replaced, &name[end..]);
            out.push((v, format!("word {idx} '{word}'->'{replaced}'")));
        }
    }
    out
}
