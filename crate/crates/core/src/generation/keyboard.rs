//! The five keyboard-typo models: missing dot, omission, permutation,
//! substitution and duplication.

use crate::domain::Domain;
use crate::resources::KeyboardLayout;

use super::collector::Collector;
use super::{Candidate, GenerationError, TypoModel};

/// `www.example.com -> wwwexample.com`. Domains without a leading `www`
/// get one fused onto their first label, since the habit of typing `www`
/// is what the model captures.
pub fn missing_dot(d: &Domain) -> Vec<Candidate> {
    let mut c = Collector::new(d, TypoModel::MissingDot);
    missing_dot_into(&mut c);
    c.finish().candidates
}

pub(crate) fn missing_dot_into(c: &mut Collector) {
    let name = c.name.clone();
    if c.source.original_had_www() {
        if c.source.labels().len() >= 2 {
            let fused = name.replacen('.', "", 1);
            c.offer(&fused, || "drop dot after www".to_string());
        }
    } else {
        let fused = format!("www{name}");
        c.offer(&fused, || "fuse www onto first label".to_string());
    }
}

/// Delete one character of the name. Deletions that would empty a label
/// are dropped as invalid.
pub fn character_omission(d: &Domain) -> Result<Vec<Candidate>, GenerationError> {
    let mut c = Collector::new(d, TypoModel::Omission);
    omission_into(&mut c)?;
    Ok(c.finish().candidates)
}

pub(crate) fn omission_into(c: &mut Collector) -> Result<(), GenerationError> {
    let name = c.name.clone();
    let chars = name.bytes().filter(|&b| b != b'.').count();
    if chars < 2 {
        return Err(GenerationError::NameTooShort {
            domain: c.source.render(),
            model: TypoModel::Omission,
        });
    }
    let bytes = name.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'.' {
            continue;
        }
        let edited = format!("{}{}", &name[..i], &name[i + 1..]);
        c.offer(&edited, || format!("omit '{}' at {i}", b as char));
    }
    Ok(())
}

/// Swap two adjacent characters within a label.
pub fn character_permutation(d: &Domain) -> Vec<Candidate> {
    let mut c = Collector::new(d, TypoModel::Permutation);
    permutation_into(&mut c);
    c.finish().candidates
}

pub(crate) fn permutation_into(c: &mut Collector) {
    let name = c.name.clone();
    let bytes = name.as_bytes();
    for i in 0..bytes.len().saturating_sub(1) {
        let (x, y) = (bytes[i], bytes[i + 1]);
        if x == b'.' || y == b'.' {
            continue;
        }
        if x == y {
            c.reject_identical();
            continue;
        }
        let mut edited = bytes.to_vec();
        edited.swap(i, i + 1);
        let edited = String::from_utf8(edited).expect("ascii");
        c.offer(&edited, || {
            format!("swap '{}' and '{}' at {i}", x as char, y as char)
        });
    }
}

/// Replace one character by each of its keyboard neighbours.
pub fn character_substitution(d: &Domain, layout: &KeyboardLayout) -> Vec<Candidate> {
    let mut c = Collector::new(d, TypoModel::Substitution);
    substitution_into(&mut c, layout);
    c.finish().candidates
}

pub(crate) fn substitution_into(c: &mut Collector, layout: &KeyboardLayout) {
    let name = c.name.clone();
    for (i, b) in name.bytes().enumerate() {
        if b == b'.' {
            continue;
        }
        for n in layout.neighbours(b as char) {
            let edited = format!("{}{n}{}", &name[..i], &name[i + 1..]);
            c.offer(&edited, || {
                format!("replace '{}' with adjacent '{n}' at {i}", b as char)
            });
        }
    }
}

/// Type one character twice.
pub fn character_duplication(d: &Domain) -> Vec<Candidate> {
    let mut c = Collector::new(d, TypoModel::Duplication);
    duplication_into(&mut c);
    c.finish().candidates
}

pub(crate) fn duplication_into(c: &mut Collector) {
    let name = c.name.clone();
    for (i, b) in name.bytes().enumerate() {
        if b == b'.' {
            continue;
        }
        let edited = format!("{}{}", &name[..=i], &name[i..]);
        c.offer(&edited, || format!("double '{}' at {i}", b as char));
    }
}
