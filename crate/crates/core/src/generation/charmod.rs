//! Brute-force character modification: replace (inplace), remove
//! (deflate) or add (inflate) one or more characters using every letter
//! of an alphabet instead of keyboard neighbours.
//!
//! A k-character edit chooses k distinct positions and applies the
//! scheme's single edit at each. Inplace positions are the non-dot
//! characters of the name; deflate positions include the dots; inflate
//! positions are slots in the edited name, so an insertion can land at
//! either end of any label. k-mod results that a shorter edit sequence
//! also reaches (Damerau-Levenshtein distance below k) are dropped.

use crate::domain::Domain;
use crate::metrics::damerau_levenshtein;

use super::collector::Collector;
use super::{Alphabet, Candidate, GenerationError, Scheme, TypoModel};

pub fn one_mod_inplace(d: &Domain, alphabet: &Alphabet) -> Vec<Candidate> {
    run(d, TypoModel::ModInplace, 1, Scheme::Inplace, alphabet)
}

/// Delete any one character of the name, dots included.
pub fn one_mod_deflate(d: &Domain) -> Vec<Candidate> {
    run(
        d,
        TypoModel::ModDeflate,
        1,
        Scheme::Deflate,
        &Alphabet::default(),
    )
}

pub fn one_mod_inflate(d: &Domain, alphabet: &Alphabet) -> Vec<Candidate> {
    run(d, TypoModel::ModInflate, 1, Scheme::Inflate, alphabet)
}

/// k-character modification for k in {2, 3}.
pub fn k_mod(
    d: &Domain,
    k: u8,
    scheme: Scheme,
    alphabet: &Alphabet,
) -> Result<Vec<Candidate>, GenerationError> {
    let model = TypoModel::kmod(k, scheme)?;
    Ok(run(d, model, k as usize, scheme, alphabet))
}

fn run(
    d: &Domain,
    model: TypoModel,
    k: usize,
    scheme: Scheme,
    alphabet: &Alphabet,
) -> Vec<Candidate> {
    let mut c = Collector::new(d, model);
    scheme_into(&mut c, k, scheme, alphabet);
    c.finish().candidates
}

pub(crate) fn scheme_into(c: &mut Collector, k: usize, scheme: Scheme, alphabet: &Alphabet) {
    if k > 1 {
        c.require_distance(k);
    }
    let name = c.name.clone().into_bytes();
    match scheme {
        Scheme::Inplace => {
            let positions: Vec<usize> = (0..name.len()).filter(|&i| name[i] != b'.').collect();
            let mut work = name.clone();
            let mut edits = Vec::with_capacity(k);
            inplace(c, &name, &mut work, &positions, 0, k, alphabet, &mut edits);
        }
        Scheme::Deflate => {
            for combo in Combinations::new(name.len(), k) {
                let edited: Vec<u8> = name
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !combo.contains(i))
                    .map(|(_, &b)| b)
                    .collect();
                let edited = String::from_utf8(edited).expect("ascii");
                c.offer(&edited, || {
                    describe(
                        combo
                            .iter()
                            .map(|&i| format!("delete '{}' at {i}", name[i] as char)),
                    )
                });
            }
        }
        Scheme::Inflate => {
            let len = name.len() + k;
            let mut chars = vec![0u8; k];
            for combo in Combinations::new(len, k) {
                inflate(c, &name, &combo, &mut chars, 0, alphabet);
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn inplace(
    c: &mut Collector,
    original: &[u8],
    work: &mut Vec<u8>,
    positions: &[usize],
    start: usize,
    remaining: usize,
    alphabet: &Alphabet,
    edits: &mut Vec<(usize, u8)>,
) {
    if remaining == 0 {
        let edited = String::from_utf8(work.clone()).expect("ascii");
        c.offer(&edited, || {
            describe(edits.iter().map(|&(i, r)| {
                format!(
                    "replace '{}' with '{}' at {i}",
                    original[i] as char, r as char
                )
            }))
        });
        return;
    }
    // Leave room for the remaining positions.
    for slot in start..positions.len().saturating_sub(remaining - 1) {
        let pos = positions[slot];
        for &r in alphabet.bytes() {
            if r == original[pos] {
                continue;
            }
            work[pos] = r;
            edits.push((pos, r));
            inplace(
                c,
                original,
                work,
                positions,
                slot + 1,
                remaining - 1,
                alphabet,
                edits,
            );
            edits.pop();
        }
        work[pos] = original[pos];
    }
}

fn inflate(
    c: &mut Collector,
    original: &[u8],
    slots: &[usize],
    chars: &mut Vec<u8>,
    depth: usize,
    alphabet: &Alphabet,
) {
    if depth == slots.len() {
        let mut edited = Vec::with_capacity(original.len() + slots.len());
        let mut src = original.iter();
        let mut ins = chars.iter();
        for i in 0..original.len() + slots.len() {
            if slots.contains(&i) {
                edited.push(*ins.next().expect("one char per slot"));
            } else {
                edited.push(*src.next().expect("remaining source"));
            }
        }
        let edited = String::from_utf8(edited).expect("ascii");
        c.offer(&edited, || {
            describe(
                slots
                    .iter()
                    .zip(chars.iter())
                    .map(|(i, &b)| format!("insert '{}' at {i}", b as char)),
            )
        });
        return;
    }
    for &b in alphabet.bytes() {
        chars[depth] = b;
        inflate(c, original, slots, chars, depth + 1, alphabet);
    }
}

fn describe(parts: impl Iterator<Item = String>) -> String {
    parts.collect::<Vec<_>>().join(" then ")
}

/// Increasing k-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Whether `suspect` is among the outputs of `KMod(k, scheme)` for `source`,
/// decided without enumerating them: the edit positions are read off the
/// two names and only the alphabet and distance constraints are checked.
pub fn kmod_contains(
    source: &Domain,
    suspect: &Domain,
    k: u8,
    scheme: Scheme,
    alphabet: &Alphabet,
) -> Result<bool, GenerationError> {
    TypoModel::kmod(k, scheme)?;
    Ok(scheme_contains(
        source, suspect, k as usize, scheme, alphabet,
    ))
}

pub(crate) fn scheme_contains(
    source: &Domain,
    suspect: &Domain,
    k: usize,
    scheme: Scheme,
    alphabet: &Alphabet,
) -> bool {
    if source.tld() != suspect.tld() {
        return false;
    }
    let s = source.name().into_bytes();
    let t = suspect.name().into_bytes();
    let structural = match scheme {
        Scheme::Inplace => {
            s.len() == t.len() && {
                let mut diffs = 0;
                let mut ok = true;
                for (&a, &b) in s.iter().zip(&t) {
                    if a == b {
                        continue;
                    }
                    if a == b'.' || b == b'.' || !alphabet.contains(b) {
                        ok = false;
                        break;
                    }
                    diffs += 1;
                }
                ok && diffs == k
            }
        }
        Scheme::Deflate => t.len() + k == s.len() && is_subsequence(&t, &s),
        Scheme::Inflate => s.len() + k == t.len() && embeds_with_alphabet(&s, &t, alphabet),
    };
    structural && damerau_levenshtein(&source.render(), &suspect.render()).value() >= k.max(1)
}

fn is_subsequence(short: &[u8], long: &[u8]) -> bool {
    let mut it = long.iter();
    short.iter().all(|b| it.any(|x| x == b))
}

/// Can `long` be produced from `short` by inserting alphabet characters?
fn embeds_with_alphabet(short: &[u8], long: &[u8], alphabet: &Alphabet) -> bool {
    // reach[i]: short[..i] embeds into the prefix of `long` scanned so far
    let mut reach = vec![false; short.len() + 1];
    reach[0] = true;
    for &b in long {
        let insertable = alphabet.contains(b);
        for i in (0..=short.len()).rev() {
            let matched = i > 0 && reach[i - 1] && short[i - 1] == b;
            reach[i] = (reach[i] && insertable) || matched;
        }
    }
    reach[short.len()]
}
