//! Data tables that drive generation: keyboard adjacency, visual
//! confusables and homophones. Each loads from a small tab-separated file
//! and ships with a built-in default.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::domain::{check_label, content_lines, is_ldh_char};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResourceError {
    #[error("line {line}: expected two tab-separated fields")]
    MissingField { line: usize },
    #[error("line {line}: {text:?} is not made of LDH characters")]
    NotLdh { line: usize, text: String },
    #[error("line {line}: {text:?} maps to itself")]
    SelfMapping { line: usize, text: String },
    #[error("line {line}: homophone group needs at least two distinct words")]
    SmallGroup { line: usize },
}

/// Symmetric key adjacency for one keyboard layout.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyboardLayout {
    adjacency: BTreeMap<char, BTreeSet<char>>,
}

// dnstwist-style QWERTY neighbourhoods, digits row included.
const QWERTY: &[(char, &str)] = &[
    ('1', "2q"),
    ('2', "3wq1"),
    ('3', "4ew2"),
    ('4', "5re3"),
    ('5', "6tr4"),
    ('6', "7yt5"),
    ('7', "8uy6"),
    ('8', "9iu7"),
    ('9', "0oi8"),
    ('0', "po9"),
    ('q', "12wa"),
    ('w', "3esaq2"),
    ('e', "4rdsw3"),
    ('r', "5tfde4"),
    ('t', "6ygfr5"),
    ('y', "7uhgt6"),
    ('u', "8ijhy7"),
    ('i', "9okju8"),
    ('o', "0plki9"),
    ('p', "lo0"),
    ('a', "qwsz"),
    ('s', "edxzaw"),
    ('d', "rfcxse"),
    ('f', "tgvcdr"),
    ('g', "yhbvft"),
    ('h', "ujnbgy"),
    ('j', "ikmnhu"),
    ('k', "olmji"),
    ('l', "kop"),
    ('z', "asx"),
    ('x', "zsdc"),
    ('c', "xdfv"),
    ('v', "cfgb"),
    ('b', "vghn"),
    ('n', "bhjm"),
    ('m', "njk"),
];

impl KeyboardLayout {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn qwerty() -> Self {
        let mut layout = Self::default();
        for (key, neighbours) in QWERTY {
            for n in neighbours.chars() {
                layout.add_pair(*key, n);
            }
        }
        layout
    }

    /// Record `a` and `b` as neighbours in both directions.
    pub fn add_pair(&mut self, a: char, b: char) {
        if a == b {
            return;
        }
        self.adjacency.entry(a).or_default().insert(b);
        self.adjacency.entry(b).or_default().insert(a);
    }

    /// Parse lines of the form `a<TAB>qwsz`. Pairs are symmetrized.
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut layout = Self::default();
        for (line, row) in content_lines(text) {
            let (key, neighbours) = split_pair(line, row)?;
            let mut keys = key.chars();
            let key = match (keys.next(), keys.next()) {
                (Some(k), None) if is_ldh_char(k) => k,
                _ => {
                    return Err(ResourceError::NotLdh {
                        line,
                        text: key.to_string(),
                    })
                }
            };
            for n in neighbours.chars() {
                if !is_ldh_char(n) {
                    return Err(ResourceError::NotLdh {
                        line,
                        text: neighbours.to_string(),
                    });
                }
                layout.add_pair(key, n);
            }
        }
        Ok(layout)
    }

    pub fn neighbours(&self, c: char) -> impl Iterator<Item = char> + '_ {
        self.adjacency.get(&c).into_iter().flatten().copied()
    }

    pub fn is_adjacent(&self, a: char, b: char) -> bool {
        self.adjacency.get(&a).is_some_and(|set| set.contains(&b))
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = char> + '_ {
        self.adjacency.keys().copied()
    }
}

/// Visually confusable character sequences, `source -> replacement`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfusableMap {
    rules: Vec<(String, String)>,
}

impl ConfusableMap {
    pub fn builtin() -> Self {
        ConfusableMap {
            rules: vec![
                ("l".into(), "i".into()),
                ("w".into(), "vv".into()),
                ("rn".into(), "m".into()),
            ],
        }
    }

    pub fn from_rules<I, S>(rules: I) -> Result<Self, ResourceError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut map = ConfusableMap::default();
        for (idx, (src, dst)) in rules.into_iter().enumerate() {
            map.push(idx + 1, src.into(), dst.into())?;
        }
        Ok(map)
    }

    fn push(&mut self, line: usize, src: String, dst: String) -> Result<(), ResourceError> {
        for side in [&src, &dst] {
            if side.is_empty() || !side.chars().all(is_ldh_char) {
                return Err(ResourceError::NotLdh {
                    line,
                    text: side.clone(),
                });
            }
        }
        if src == dst {
            return Err(ResourceError::SelfMapping { line, text: src });
        }
        if !self.rules.iter().any(|(s, d)| *s == src && *d == dst) {
            self.rules.push((src, dst));
        }
        Ok(())
    }

    /// Parse lines of the form `w<TAB>vv`.
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut map = ConfusableMap::default();
        for (line, row) in content_lines(text) {
            let (src, dst) = split_pair(line, row)?;
            map.push(line, src.to_string(), dst.to_string())?;
        }
        Ok(map)
    }

    pub fn rules(&self) -> &[(String, String)] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Groups of words that sound alike.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HomophoneDictionary {
    groups: Vec<Vec<String>>,
    // word -> every other word sharing a group with it, in first-seen order
    siblings: BTreeMap<String, Vec<String>>,
    longest: usize,
}

impl HomophoneDictionary {
    pub fn builtin() -> Self {
        Self::from_groups([vec!["ate", "eight"], vec!["for", "four", "4"]])
            .expect("built-in homophones are valid")
    }

    pub fn from_groups<I, G, S>(groups: I) -> Result<Self, ResourceError>
    where
        I: IntoIterator<Item = G>,
        G: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut dict = HomophoneDictionary::default();
        for (idx, group) in groups.into_iter().enumerate() {
            dict.push(idx + 1, group.into_iter().map(Into::into).collect())?;
        }
        Ok(dict)
    }

    fn push(&mut self, line: usize, words: Vec<String>) -> Result<(), ResourceError> {
        let mut group: Vec<String> = Vec::new();
        for word in words {
            let word = word.to_ascii_lowercase();
            if check_label(&word).is_err() {
                return Err(ResourceError::NotLdh { line, text: word });
            }
            if !group.contains(&word) {
                group.push(word);
            }
        }
        if group.len() < 2 {
            return Err(ResourceError::SmallGroup { line });
        }
        for word in &group {
            self.longest = self.longest.max(word.len());
            let entry = self.siblings.entry(word.clone()).or_default();
            for other in &group {
                if other != word && !entry.contains(other) {
                    entry.push(other.clone());
                }
            }
        }
        self.groups.push(group);
        Ok(())
    }

    /// Parse lines of tab-separated group members, e.g. `ate<TAB>eight`.
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut dict = HomophoneDictionary::default();
        for (line, row) in content_lines(text) {
            let words: Vec<String> = row
                .split('\t')
                .map(str::trim)
                .filter(|w| !w.is_empty())
                .map(String::from)
                .collect();
            if words.len() < 2 {
                return Err(ResourceError::MissingField { line });
            }
            dict.push(line, words)?;
        }
        Ok(dict)
    }

    pub fn groups(&self) -> &[Vec<String>] {
        &self.groups
    }

    pub fn siblings(&self, word: &str) -> &[String] {
        self.siblings.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, word: &str) -> bool {
        self.siblings.contains_key(word)
    }

    pub fn longest_word(&self) -> usize {
        self.longest
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

fn split_pair(line: usize, row: &str) -> Result<(&str, &str), ResourceError> {
    match row.split_once('\t') {
        Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => Ok((a.trim(), b.trim())),
        _ => Err(ResourceError::MissingField { line }),
    }
}
