//! Attribute a suspicious domain to the generation models that could have
//! produced it from a target.
//!
//! Attribution is by regeneration and membership: a model is named only
//! if its output for the target contains the suspect. The k-mod models are
//! checked with [`kmod_contains`](crate::generation::kmod_contains), which
//! decides the same membership without enumerating millions of strings.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::Domain;
use crate::generation::{generate_model, GenerationConfig, Scheme, TypoModel};
use crate::metrics::{damerau_levenshtein, EditDistance};

/// Largest distance considered by [`scan`]; k-mod stops at three edits.
pub const MAX_SCAN_DISTANCE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Attribution {
    pub suspect: Domain,
    pub target: Domain,
    pub models: BTreeSet<TypoModel>,
    pub distance: EditDistance,
}

/// Every candidate of one target, keyed by rendered domain.
#[derive(Debug, Clone)]
pub struct TargetIndex {
    target: Domain,
    rendered: String,
    members: HashMap<String, BTreeSet<TypoModel>>,
    kmods: Vec<(usize, Scheme)>,
}

impl TargetIndex {
    pub fn build(target: &Domain, config: &GenerationConfig) -> Self {
        let mut members: HashMap<String, BTreeSet<TypoModel>> = HashMap::new();
        let mut kmods = Vec::new();
        for &model in &config.models {
            if let TypoModel::KMod { k, scheme } = model {
                kmods.push((k as usize, scheme));
                continue;
            }
            // A name too short for a model simply has no candidates under it.
            let Ok(output) = generate_model(target, model, config) else {
                continue;
            };
            for cand in output.candidates {
                members
                    .entry(cand.domain.render())
                    .or_default()
                    .insert(model);
            }
        }
        TargetIndex {
            target: target.clone(),
            rendered: target.render(),
            members,
            kmods,
        }
    }

    pub fn target(&self) -> &Domain {
        &self.target
    }

    pub fn attribute(&self, suspect: &Domain, config: &GenerationConfig) -> Attribution {
        let rendered = suspect.render();
        let distance = damerau_levenshtein(&rendered, &self.rendered);
        let mut models = self.members.get(&rendered).cloned().unwrap_or_default();
        for &(k, scheme) in &self.kmods {
            // k-mod outputs sit at distance exactly k.
            if distance.value() == k
                && crate::generation::kmod_contains(
                    &self.target,
                    suspect,
                    k as u8,
                    scheme,
                    &config.alphabet,
                )
                .unwrap_or(false)
            {
                models.insert(TypoModel::KMod { k: k as u8, scheme });
            }
        }
        Attribution {
            suspect: suspect.clone(),
            target: self.target.clone(),
            models,
            distance,
        }
    }
}

/// Which models in `config.models` produce `suspect` from `target`.
pub fn classify_candidate(
    suspect: &Domain,
    target: &Domain,
    config: &GenerationConfig,
) -> Attribution {
    TargetIndex::build(target, config).attribute(suspect, config)
}

/// Attribute each suspect against every target within
/// [`MAX_SCAN_DISTANCE`]. Results are grouped by suspect in input order,
/// then sorted by distance and target order. Exact matches are skipped.
pub fn scan(
    suspects: &[Domain],
    targets: &[Domain],
    config: &GenerationConfig,
) -> Vec<Attribution> {
    let indexes: Vec<TargetIndex> = targets
        .par_iter()
        .map(|t| TargetIndex::build(t, config))
        .collect();
    suspects
        .par_iter()
        .map(|suspect| {
            let rendered = suspect.render();
            let mut found: Vec<(usize, Attribution)> = indexes
                .iter()
                .enumerate()
                .filter_map(|(order, index)| {
                    let d = damerau_levenshtein(&rendered, &index.rendered).value();
                    (d > 0 && d <= MAX_SCAN_DISTANCE)
                        .then(|| (order, index.attribute(suspect, config)))
                })
                .collect();
            found.sort_by_key(|(order, a)| (a.distance, *order));
            found.into_iter().map(|(_, a)| a).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
