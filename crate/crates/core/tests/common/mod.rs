#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use typoscope::domain::{parse_domain_list, Domain};
use typoscope::traffic::{TrafficEvent, VisitKind};

pub fn dom(s: &str) -> Domain {
    typoscope::parse_domain(s).unwrap()
}

pub fn corpus() -> Vec<Domain> {
    parse_domain_list(include_str!("../data/corpus.txt"), None).unwrap()
}

/// LDH check written from the rule, independent of the library's parser.
pub fn ldh_label(label: &[u8]) -> bool {
    !label.is_empty()
        && label.len() <= 63
        && label
            .iter()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || *b == b'-')
        && label[0] != b'-'
        && label[label.len() - 1] != b'-'
}

pub fn ldh_name(name: &[u8]) -> bool {
    name.split(|&b| b == b'.').all(ldh_label)
}

/// Shortest edit sequence (insert, delete, substitute, swap adjacent)
/// from `source` to every string reachable within `max_depth` edits,
/// exploring strings over `symbols` up to `max_len` long.
pub fn edit_graph(
    source: &[u8],
    symbols: &[u8],
    max_len: usize,
    max_depth: usize,
) -> HashMap<Vec<u8>, usize> {
    let mut dist = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(source.to_vec(), 0);
    queue.push_back(source.to_vec());
    while let Some(s) = queue.pop_front() {
        let d = dist[&s];
        if d == max_depth {
            continue;
        }
        let mut next = Vec::new();
        for i in 0..s.len() {
            let mut t = s.clone();
            t.remove(i);
            next.push(t);
            for &c in symbols {
                if c != s[i] {
                    let mut t = s.clone();
                    t[i] = c;
                    next.push(t);
                }
            }
            if i + 1 < s.len() {
                let mut t = s.clone();
                t.swap(i, i + 1);
                next.push(t);
            }
        }
        if s.len() < max_len {
            for i in 0..=s.len() {
                for &c in symbols {
                    let mut t = s.clone();
                    t.insert(i, c);
                    next.push(t);
                }
            }
        }
        for t in next {
            if !dist.contains_key(&t) {
                dist.insert(t.clone(), d + 1);
                queue.push_back(t);
            }
        }
    }
    dist
}

/// Every string over `symbols` of length at most `max_len`.
pub fn all_strings(symbols: &[u8], max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s: &Vec<u8>| {
                symbols.iter().map(move |&c| {
                    let mut t = s.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Random LDH label of the given length.
pub fn random_label(rng: &mut ChaCha8Rng, len: usize) -> String {
    const CHARS: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789-";
    loop {
        let s: Vec<u8> = (0..len)
            .map(|_| CHARS[rng.gen_range(0..CHARS.len())])
            .collect();
        if ldh_label(&s) {
            return String::from_utf8(s).unwrap();
        }
    }
}

pub fn event(ts: f64, client: &str, domain: &str) -> TrafficEvent {
    TrafficEvent {
        timestamp: ts,
        client: client.to_string(),
        domain: dom(domain),
        kind: VisitKind::Dns,
    }
}

/// A log of exactly `total` visits in which each visit to `typo` is
/// followed, with probability `p`, by a visit to `target` a few seconds
/// later. The remaining lines are unrelated browsing. Returns the log with
/// the number of typo visits and planted corrections.
pub fn planted_log(
    rng: &mut ChaCha8Rng,
    typo: &str,
    target: &str,
    p: f64,
    total: usize,
) -> (Vec<TrafficEvent>, u64, u64) {
    const OTHER: [&str; 4] = ["news.com", "mail.com", "shop.com", "video.com"];
    let mut events = Vec::with_capacity(total);
    let (mut typo_visits, mut corrections) = (0, 0);
    let mut session = 0;
    while events.len() < total {
        let client = format!("client{}", session % 500);
        let start = session as f64 * 1000.0;
        session += 1;
        if rng.gen_bool(0.9) {
            events.push(event(start, &client, typo));
            typo_visits += 1;
            if events.len() < total && rng.gen_bool(p) {
                events.push(event(start + rng.gen_range(1.0..20.0), &client, target));
                corrections += 1;
            }
        } else {
            let other = OTHER[rng.gen_range(0..OTHER.len())];
            events.push(event(start + 500.0, &client, other));
        }
    }
    (events, typo_visits, corrections)
}
