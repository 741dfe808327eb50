//! Look-alike, bit-error, sound-alike and TLD variants.

use crate::domain::{is_ldh_byte, Domain, Suffix};
use crate::resources::{ConfusableMap, HomophoneDictionary};

use super::collector::Collector;
use super::{Candidate, TypoModel};

/// Replace one occurrence of a confusable sequence (`l -> i`, `w -> vv`).
pub fn homograph(d: &Domain, map: &ConfusableMap) -> Vec<Candidate> {
    let mut c = Collector::new(d, TypoModel::Homograph);
    homograph_into(&mut c, map);
    c.finish().candidates
}

pub(crate) fn homograph_into(c: &mut Collector, map: &ConfusableMap) {
    let name = c.name.clone();
    for (src, dst) in map.rules() {
        // Overlapping matches count separately; sources never contain dots.
        let mut from = 0;
        while let Some(off) = name[from..].find(src.as_str()) {
            let at = from + off;
            let edited = format!("{}{dst}{}", &name[..at], &name[at + src.len()..]);
            c.offer(&edited, || {
                format!("replace '{src}' with look-alike '{dst}' at {at}")
            });
            from = at + 1;
        }
    }
}

/// Flip each bit of each name character, keeping flips that land on
/// another legal character.
pub fn bitsquat(d: &Domain) -> Vec<Candidate> {
    let mut c = Collector::new(d, TypoModel::Bitsquat);
    bitsquat_into(&mut c);
    c.finish().candidates
}

pub(crate) fn bitsquat_into(c: &mut Collector) {
    let name = c.name.clone().into_bytes();
    for (i, &b) in name.iter().enumerate() {
        if b == b'.' {
            continue;
        }
        let mut flips: Vec<u8> = (0..8).map(|bit| b ^ (1 << bit)).collect();
        flips.sort_unstable();
        for flipped in flips {
            if flipped.to_ascii_lowercase() == b {
                // Case flip: the name normalizes back to the source.
                c.reject_identical();
                continue;
            }
            if !is_ldh_byte(flipped) {
                c.reject_invalid();
                continue;
            }
            let mut edited = name.clone();
            edited[i] = flipped;
            let edited = String::from_utf8(edited).expect("ascii");
            c.offer(&edited, || {
                format!(
                    "flip bit 0x{:02x} of '{}' at {i} giving '{}'",
                    b ^ flipped,
                    b as char,
                    flipped as char
                )
            });
        }
    }
}

/// Replace one dictionary word of the name by each of its homophones.
///
/// Each label is split greedily from the left, longest dictionary word
/// first; characters that start no word are skipped.
pub fn soundsquat(d: &Domain, dict: &HomophoneDictionary) -> Vec<Candidate> {
    let mut c = Collector::new(d, TypoModel::Soundsquat);
    soundsquat_into(&mut c, dict);
    c.finish().candidates
}

/// Byte ranges of the greedy longest-match tokens of `name`.
pub(crate) fn tokenize(name: &str, dict: &HomophoneDictionary) -> Vec<(usize, usize)> {
    let mut tokens = Vec::new();
    let mut offset = 0;
    for label in name.split('.') {
        let mut i = 0;
        while i < label.len() {
            let longest = dict.longest_word().min(label.len() - i);
            match (1..=longest)
                .rev()
                .find(|&len| dict.contains(&label[i..i + len]))
            {
                Some(len) => {
                    tokens.push((offset + i, offset + i + len));
                    i += len;
                }
                None => i += 1,
            }
        }
        offset += label.len() + 1;
    }
    tokens
}

pub(crate) fn soundsquat_into(c: &mut Collector, dict: &HomophoneDictionary) {
    let name = c.name.clone();
    for (start, end) in tokenize(&name, dict) {
        let word = &name[start..end];
        for sibling in dict.siblings(word) {
            let edited = format!("{}{sibling}{}", &name[..start], &name[end..]);
            c.offer(&edited, || {
                format!("replace '{word}' with homophone '{sibling}' at {start}")
            });
        }
    }
}

/// Same name under each listed TLD other than the current one.
pub fn tld_swap(d: &Domain, tlds: &[Suffix]) -> Vec<Candidate> {
    let mut c = Collector::new(d, TypoModel::TldSwap);
    tld_swap_into(&mut c, tlds);
    c.finish().candidates
}

pub(crate) fn tld_swap_into(c: &mut Collector, tlds: &[Suffix]) {
    let name = c.name.clone();
    let current = c.source.tld().clone();
    for tld in tlds {
        if *tld == current {
            continue;
        }
        c.offer_with_tld(&name, Some(tld), || format!("swap tld {current} for {tld}"));
    }
}
