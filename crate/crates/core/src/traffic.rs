//! Typo detection from visit logs with the conditional probability model.
//!
//! A visit to `d1` followed by the same client, within a short window,
//! visiting `d2` that is one edit away and more popular, is evidence that
//! `d1` was a typo for `d2`. The probability of that correction over all
//! visits to `d1` separates typo domains (`eba.com -> ebay.com`, 90%) from
//! lexically similar but unrelated pairs (`nhl.com -> nfl.com`, 0.08%).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::domain::{content_lines, parse_domain, Domain, DomainError};
use crate::metrics::damerau_levenshtein;

pub const DEFAULT_WINDOW_SECS: f64 = 33.0;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_MIN_SUPPORT: u64 = 10;
pub const LOG_HEADER: &str = "ts,client,domain,kind";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrafficError {
    #[error("unrecognized log header {0:?}, expected \"ts,client,domain,kind\"")]
    FatalFormat(String),
    #[error("rank file line {line}: {reason}")]
    BadRank { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VisitKind {
    Dns,
    Http,
}

impl FromStr for VisitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dns" => Ok(VisitKind::Dns),
            "http" => Ok(VisitKind::Http),
            other => Err(format!("unknown kind {other:?}")),
        }
    }
}

impl fmt::Display for VisitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VisitKind::Dns => "dns",
            VisitKind::Http => "http",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrafficEvent {
    pub timestamp: f64,
    pub client: String,
    pub domain: Domain,
    pub kind: VisitKind,
}

/// A log line that could not be turned into an event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedLog {
    pub events: Vec<TrafficEvent>,
    pub skipped: Vec<SkippedLine>,
}

fn parse_event(line: &str) -> Result<TrafficEvent, String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    let [ts, client, domain, kind] = fields[..] else {
        return Err(format!("expected 4 fields, found {}", fields.len()));
    };
    let timestamp: f64 = ts.parse().map_err(|_| format!("bad timestamp {ts:?}"))?;
    if !timestamp.is_finite() {
        return Err(format!("non-finite timestamp {ts:?}"));
    }
    if client.is_empty() {
        return Err("empty client".to_string());
    }
    let domain = parse_domain(domain).map_err(|e: DomainError| e.to_string())?;
    let kind = kind.parse()?;
    Ok(TrafficEvent {
        timestamp,
        client: client.to_string(),
        domain,
        kind,
    })
}

/// Parse a `ts,client,domain,kind` log. Bad lines are collected with
/// their line numbers and skipped; only a wrong header is fatal.
pub fn parse_log(text: &str) -> Result<ParsedLog, TrafficError> {
    let mut lines = content_lines(text);
    let mut log = ParsedLog::default();
    let Some((_, header)) = lines.next() else {
        return Ok(log);
    };
    let normalized: String = header
        .split(',')
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(",");
    if !normalized.eq_ignore_ascii_case(LOG_HEADER) {
        return Err(TrafficError::FatalFormat(header.to_string()));
    }
    for (line, raw) in lines {
        match parse_event(raw) {
            Ok(event) => log.events.push(event),
            Err(reason) => log.skipped.push(SkippedLine { line, reason }),
        }
    }
    Ok(log)
}

/// Popularity ranks; lower is more popular. Unranked domains count as
/// less popular than every ranked one.
#[derive(Debug, Clone, Default)]
pub struct Ranking {
    ranks: HashMap<Domain, u64>,
}

impl Ranking {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, domain: Domain, rank: u64) {
        self.ranks.insert(domain, rank);
    }

    pub fn get(&self, domain: &Domain) -> Option<u64> {
        self.ranks.get(domain).copied()
    }

    /// Whether `a` is strictly more popular than `b`.
    pub fn more_popular(&self, a: &Domain, b: &Domain) -> bool {
        match (self.get(a), self.get(b)) {
            (Some(ra), Some(rb)) => ra < rb,
            (Some(_), None) => true,
            _ => false,
        }
    }

    /// Parse `domain,rank` lines. A leading `domain,rank` header is allowed.
    pub fn parse(text: &str) -> Result<Self, TrafficError> {
        let mut ranking = Ranking::new();
        for (idx, (line, row)) in content_lines(text).enumerate() {
            let bad = |reason: String| TrafficError::BadRank { line, reason };
            let (domain, rank) = row
                .split_once(',')
                .ok_or_else(|| bad("expected domain,rank".to_string()))?;
            if idx == 0 && domain.trim() == "domain" && rank.trim() == "rank" {
                continue;
            }
            let domain = parse_domain(domain).map_err(|e| bad(e.to_string()))?;
            let rank = rank
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad rank {rank:?}")))?;
            ranking.insert(domain, rank);
        }
        Ok(ranking)
    }
}

impl FromIterator<(Domain, u64)> for Ranking {
    fn from_iter<I: IntoIterator<Item = (Domain, u64)>>(iter: I) -> Self {
        Ranking {
            ranks: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairStat {
    pub d1: Domain,
    pub d2: Domain,
    pub pair_count: u64,
    pub d1_total: u64,
}

impl PairStat {
    pub fn probability(&self) -> f64 {
        if self.d1_total == 0 {
            0.0
        } else {
            self.pair_count as f64 / self.d1_total as f64
        }
    }
}

/// Pair counts and visit totals; merging two is associative and
/// commutative, so client partitions can be counted independently.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairCounts {
    pub pairs: BTreeMap<(Domain, Domain), u64>,
    pub totals: BTreeMap<Domain, u64>,
}

impl PairCounts {
    pub fn merge(mut self, other: PairCounts) -> PairCounts {
        for (k, v) in other.pairs {
            *self.pairs.entry(k).or_default() += v;
        }
        for (k, v) in other.totals {
            *self.totals.entry(k).or_default() += v;
        }
        self
    }

    /// Pair statistics ordered by `(d1, d2)`.
    pub fn into_stats(self) -> Vec<PairStat> {
        let totals = self.totals;
        self.pairs
            .into_iter()
            .map(|((d1, d2), pair_count)| {
                let d1_total = totals.get(&d1).copied().unwrap_or(0);
                PairStat {
                    d1,
                    d2,
                    pair_count,
                    d1_total,
                }
            })
            .collect()
    }
}

/// Count corrections within one client's visits. `visits` must be sorted
/// by time (stable for ties).
pub fn count_client(visits: &[&TrafficEvent], window: f64, ranking: &Ranking) -> PairCounts {
    let mut counts = PairCounts::default();
    let rendered: Vec<String> = visits.iter().map(|e| e.domain.render()).collect();
    for (i, e1) in visits.iter().enumerate() {
        *counts.totals.entry(e1.domain.clone()).or_default() += 1;
        for (j, e2) in visits.iter().enumerate().skip(i + 1) {
            let gap = e2.timestamp - e1.timestamp;
            if gap > window {
                break;
            }
            if gap <= 0.0 {
                continue;
            }
            if ranking.more_popular(&e2.domain, &e1.domain)
                && damerau_levenshtein(&rendered[i], &rendered[j]).value() == 1
            {
                *counts
                    .pairs
                    .entry((e1.domain.clone(), e2.domain.clone()))
                    .or_default() += 1;
                // Only the earliest qualifying follow-up counts.
                break;
            }
        }
    }
    counts
}

/// Build `(d1, d2)` pair statistics from a visit log.
///
/// For each visit, the earliest later visit by the same client within
/// `window` seconds to a strictly more popular domain at edit distance one
/// counts once. `d1_total` counts every visit to `d1` across all clients.
pub fn extract_pairs(events: &[TrafficEvent], window: f64, ranking: &Ranking) -> Vec<PairStat> {
    let mut by_client: BTreeMap<&str, Vec<&TrafficEvent>> = BTreeMap::new();
    for event in events {
        by_client.entry(&event.client).or_default().push(event);
    }
    by_client
        .into_values()
        .map(|mut visits| {
            visits.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
            count_client(&visits, window, ranking)
        })
        .fold(PairCounts::default(), PairCounts::merge)
        .into_stats()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypoVerdict {
    pub typo: Domain,
    pub target: Domain,
    pub probability: f64,
    pub support: u64,
}

/// Pairs whose correction probability reaches `threshold` with at least
/// `min_support` visits to the typo domain, most probable first.
pub fn flag_typos(stats: &[PairStat], threshold: f64, min_support: u64) -> Vec<TypoVerdict> {
    let mut verdicts: Vec<TypoVerdict> = stats
        .iter()
        .filter(|s| s.d1_total >= min_support && s.probability() >= threshold)
        .map(|s| TypoVerdict {
            typo: s.d1.clone(),
            target: s.d2.clone(),
            probability: s.probability(),
            support: s.pair_count,
        })
        .collect();
    verdicts.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then_with(|| a.typo.cmp(&b.typo))
            .then_with(|| a.target.cmp(&b.target))
    });
    verdicts
}

/// `typo,target,probability,support` line for a verdict.
pub fn format_verdict(v: &TypoVerdict) -> String {
    format!("{},{},{},{}", v.typo, v.target, v.probability, v.support)
}
