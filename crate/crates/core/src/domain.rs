//! Domain name parsing, validation and rendering.
//!
//! Every other module consumes and produces [`Domain`] values, so the LDH
//! guarantees are enforced once here: labels are lowercase ASCII letters,
//! digits and hyphens, 1 to 63 bytes, never starting or ending with a
//! hyphen, and the rendered name is at most 253 bytes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub const MAX_LABEL_LEN: usize = 63;
pub const MAX_DOMAIN_LEN: usize = 253;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("empty input")]
    Empty,
    #[error("empty label in {0:?}")]
    EmptyLabel(String),
    #[error("illegal character {ch:?} in label {label:?}")]
    IllegalChar { label: String, ch: char },
    #[error("label {0:?} starts or ends with a hyphen")]
    HyphenEdge(String),
    #[error("label {0:?} is longer than 63 bytes")]
    LabelTooLong(String),
    #[error("domain is {0} bytes, longer than 253")]
    DomainTooLong(usize),
    #[error("{0:?} has no label in front of its top-level domain")]
    MissingName(String),
}

/// Check one label against the LDH rule. The label must already be lowercase.
pub fn check_label(text: &str) -> Result<(), DomainError> {
    if text.is_empty() {
        return Err(DomainError::EmptyLabel(text.to_string()));
    }
    if text.len() > MAX_LABEL_LEN {
        return Err(DomainError::LabelTooLong(text.to_string()));
    }
    if let Some(ch) = text.chars().find(|&c| !is_ldh_char(c)) {
        return Err(DomainError::IllegalChar {
            label: text.to_string(),
            ch,
        });
    }
    if text.starts_with('-') || text.ends_with('-') {
        return Err(DomainError::HyphenEdge(text.to_string()));
    }
    Ok(())
}

/// Lowercase letter, digit or hyphen.
pub fn is_ldh_char(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-'
}

pub fn is_ldh_byte(b: u8) -> bool {
    is_ldh_char(b as char)
}

/// A single LDH label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(String);

impl Label {
    pub fn new(text: &str) -> Result<Self, DomainError> {
        let lower = text.to_ascii_lowercase();
        check_label(&lower)?;
        Ok(Label(lower))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Label {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::new(s)
    }
}

/// The public suffix of a domain. Usually a single label (`com`), but may
/// span several (`co.uk`) when a [`SuffixList`] says so.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Suffix(String);

impl Suffix {
    pub fn new(text: &str) -> Result<Self, DomainError> {
        let lower = text.trim_end_matches('.').to_ascii_lowercase();
        if lower.is_empty() {
            return Err(DomainError::Empty);
        }
        for part in lower.split('.') {
            check_label(part)?;
        }
        Ok(Suffix(lower))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<Label> for Suffix {
    fn from(label: Label) -> Self {
        Suffix(label.0)
    }
}

impl fmt::Display for Suffix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Suffix {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suffix::new(s)
    }
}

/// Multi-label public suffixes that should be kept together as the TLD.
///
/// Without a list the rightmost label is the TLD.
#[derive(Debug, Clone, Default)]
pub struct SuffixList {
    suffixes: BTreeSet<String>,
}

impl SuffixList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, suffix: Suffix) {
        self.suffixes.insert(suffix.0);
    }

    /// One suffix per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, DomainListError> {
        let mut list = SuffixList::new();
        for (idx, line) in content_lines(text) {
            let suffix =
                Suffix::new(line).map_err(|source| DomainListError { line: idx, source })?;
            list.insert(suffix);
        }
        Ok(list)
    }

    pub fn contains(&self, suffix: &str) -> bool {
        self.suffixes.contains(suffix)
    }

    pub fn len(&self) -> usize {
        self.suffixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.suffixes.is_empty()
    }
}

/// A validated, normalized domain name.
///
/// `labels` holds everything left of the TLD, including a leading `www`
/// when the input had one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Domain {
    labels: Vec<Label>,
    tld: Suffix,
    original_had_www: bool,
}

impl Domain {
    /// Build a domain from already-separated parts and check the whole-name
    /// invariants.
    pub fn from_parts(labels: Vec<Label>, tld: Suffix) -> Result<Self, DomainError> {
        if labels.is_empty() {
            return Err(DomainError::MissingName(tld.to_string()));
        }
        let len = labels.iter().map(|l| l.len() + 1).sum::<usize>() + tld.0.len();
        if len > MAX_DOMAIN_LEN {
            return Err(DomainError::DomainTooLong(len));
        }
        let original_had_www = labels[0].as_str() == "www";
        Ok(Domain {
            labels,
            tld,
            original_had_www,
        })
    }

    /// Build a domain from a dotted name portion (`www.example`) and a TLD.
    pub fn from_name(name: &str, tld: &Suffix) -> Result<Self, DomainError> {
        let labels = name
            .split('.')
            .map(|part| {
                check_label(part)?;
                Ok(Label(part.to_string()))
            })
            .collect::<Result<Vec<_>, DomainError>>()?;
        Domain::from_parts(labels, tld.clone())
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn tld(&self) -> &Suffix {
        &self.tld
    }

    pub fn original_had_www(&self) -> bool {
        self.original_had_www
    }

    /// The dotted portion left of the TLD, e.g. `www.example`.
    pub fn name(&self) -> String {
        let parts: Vec<&str> = self.labels.iter().map(Label::as_str).collect();
        parts.join(".")
    }

    /// Same domain under a different TLD.
    pub fn with_tld(&self, tld: Suffix) -> Result<Self, DomainError> {
        Domain::from_parts(self.labels.clone(), tld)
    }

    pub fn render(&self) -> String {
        render(self)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for label in &self.labels {
            write!(f, "{label}.")?;
        }
        write!(f, "{}", self.tld)
    }
}

impl FromStr for Domain {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_domain(s)
    }
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Parse with the last label as the TLD.
pub fn parse_domain(raw: &str) -> Result<Domain, DomainError> {
    parse_domain_with(raw, None)
}

/// Parse, keeping the longest matching multi-label suffix from `suffixes`
/// together as the TLD.
pub fn parse_domain_with(raw: &str, suffixes: Option<&SuffixList>) -> Result<Domain, DomainError> {
    let trimmed = raw.trim();
    let trimmed = trimmed.strip_suffix('.').unwrap_or(trimmed);
    if trimmed.is_empty() {
        return Err(DomainError::Empty);
    }
    if trimmed.len() > MAX_DOMAIN_LEN {
        return Err(DomainError::DomainTooLong(trimmed.len()));
    }
    let lower = trimmed.to_ascii_lowercase();
    let parts: Vec<&str> = lower.split('.').collect();
    for part in &parts {
        check_label(part)?;
    }
    if parts.len() < 2 {
        return Err(DomainError::MissingName(lower));
    }

    // Longest listed suffix that still leaves one label in front of it.
    let mut split = parts.len() - 1;
    if let Some(list) = suffixes {
        for start in 1..parts.len() - 1 {
            if list.contains(&parts[start..].join(".")) {
                split = start;
                break;
            }
        }
    }

    let labels = parts[..split]
        .iter()
        .map(|p| Label(p.to_string()))
        .collect();
    let tld = Suffix(parts[split..].join("."));
    Domain::from_parts(labels, tld)
}

pub fn render(d: &Domain) -> String {
    d.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {source}")]
pub struct DomainListError {
    pub line: usize,
    #[source]
    pub source: DomainError,
}

/// Non-blank, non-comment lines with their 1-based line numbers.
pub fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(idx, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((idx + 1, line))
        }
    })
}

/// Parse a domain-list file: one domain per line, `#` comments and blank
/// lines ignored.
pub fn parse_domain_list(
    text: &str,
    suffixes: Option<&SuffixList>,
) -> Result<Vec<Domain>, DomainListError> {
    content_lines(text)
        .map(|(line, raw)| {
            parse_domain_with(raw, suffixes).map_err(|source| DomainListError { line, source })
        })
        .collect()
}
