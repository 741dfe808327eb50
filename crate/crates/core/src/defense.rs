//! Defensive registration planning and DNS blacklist export.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::domain::{content_lines, Domain};
use crate::generation::{Candidate, TypoModel};
use crate::metrics::damerau_levenshtein;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DefenseError {
    #[error("weights line {line}: {reason}")]
    BadWeight { line: usize, reason: String },
    #[error("{model} weight {weight} is not a non-negative number")]
    InvalidWeight { model: String, weight: f64 },
    #[error("at least one model weight must be positive")]
    NoPositiveWeight,
    #[error("unknown blacklist format {0:?}")]
    UnknownFormat(String),
}

/// Per-model weights, keyed by [`TypoModel::kind_name`] so one `KMod`
/// weight covers every k and scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelWeights {
    weights: BTreeMap<&'static str, f64>,
}

const KINDS: [TypoModel; 13] = [
    TypoModel::MissingDot,
    TypoModel::Omission,
    TypoModel::Permutation,
    TypoModel::Substitution,
    TypoModel::Duplication,
    TypoModel::ModInplace,
    TypoModel::ModDeflate,
    TypoModel::ModInflate,
    TypoModel::KMod {
        k: 2,
        scheme: crate::generation::Scheme::Inplace,
    },
    TypoModel::Homograph,
    TypoModel::Bitsquat,
    TypoModel::Soundsquat,
    TypoModel::TldSwap,
];

impl Default for ModelWeights {
    /// 1.0 for every single-edit model, 0.1 for k-mod: nearly all squats
    /// seen in the wild are one edit from their target.
    fn default() -> Self {
        let weights = KINDS
            .iter()
            .map(|m| (m.kind_name(), if m.is_kmod() { 0.1 } else { 1.0 }))
            .collect();
        ModelWeights { weights }
    }
}

impl ModelWeights {
    /// Build from explicit weights; unlisted models get zero.
    pub fn from_pairs<I: IntoIterator<Item = (TypoModel, f64)>>(
        pairs: I,
    ) -> Result<Self, DefenseError> {
        let mut weights: BTreeMap<&'static str, f64> =
            KINDS.iter().map(|m| (m.kind_name(), 0.0)).collect();
        for (model, w) in pairs {
            if !w.is_finite() || w < 0.0 {
                return Err(DefenseError::InvalidWeight {
                    model: model.to_string(),
                    weight: w,
                });
            }
            weights.insert(model.kind_name(), w);
        }
        let weights = ModelWeights { weights };
        weights.check()?;
        Ok(weights)
    }

    fn check(&self) -> Result<(), DefenseError> {
        if self.weights.values().any(|&w| w > 0.0) {
            Ok(())
        } else {
            Err(DefenseError::NoPositiveWeight)
        }
    }

    pub fn get(&self, model: TypoModel) -> f64 {
        self.weights.get(model.kind_name()).copied().unwrap_or(0.0)
    }

    /// Multiply every weight by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        ModelWeights {
            weights: self.weights.iter().map(|(k, w)| (*k, w * factor)).collect(),
        }
    }

    /// Parse `model,weight` lines over the defaults. `KMod` (or any
    /// `KMod(k,scheme)` spelling) sets the shared k-mod weight.
    pub fn parse(text: &str) -> Result<Self, DefenseError> {
        let mut weights = ModelWeights::default();
        for (line, row) in content_lines(text) {
            let bad = |reason: String| DefenseError::BadWeight { line, reason };
            let (model, weight) = row
                .split_once(',')
                .ok_or_else(|| bad("expected model,weight".to_string()))?;
            let model = model.trim();
            if model.eq_ignore_ascii_case("model") {
                continue;
            }
            let model = if model.eq_ignore_ascii_case("kmod") {
                KINDS[8]
            } else {
                TypoModel::from_str(model).map_err(|e| bad(e.to_string()))?
            };
            let w: f64 = weight
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad weight {weight:?}")))?;
            if !w.is_finite() || w < 0.0 {
                return Err(bad(format!("weight {w} must be non-negative")));
            }
            weights.weights.insert(model.kind_name(), w);
        }
        weights.check()?;
        Ok(weights)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pick {
    pub candidate: Candidate,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegistrationPlan {
    pub target: Domain,
    pub picks: Vec<Pick>,
    pub budget: usize,
}

/// Rank candidates by `weight(model) / distance(candidate, target)` and
/// keep the top `budget`. Ties go to the lexicographically smaller domain.
pub fn rank_and_plan(
    target: &Domain,
    candidates: &[Candidate],
    weights: &ModelWeights,
    budget: usize,
) -> RegistrationPlan {
    let rendered_target = target.render();
    let mut scored: Vec<(f64, String, &Candidate)> = candidates
        .iter()
        .map(|c| {
            let rendered = c.domain.render();
            let distance = damerau_levenshtein(&rendered, &rendered_target)
                .value()
                .max(1);
            (weights.get(c.model) / distance as f64, rendered, c)
        })
        .collect();
    scored.sort_by(|a, b| match b.0.total_cmp(&a.0) {
        Ordering::Equal => a.1.cmp(&b.1),
        other => other,
    });
    let picks = scored
        .into_iter()
        .take(budget)
        .map(|(score, _, c)| Pick {
            candidate: c.clone(),
            score,
        })
        .collect();
    RegistrationPlan {
        target: target.clone(),
        picks,
        budget,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlacklistFormat {
    Hosts,
    Rpz,
}

impl FromStr for BlacklistFormat {
    type Err = DefenseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hosts" => Ok(BlacklistFormat::Hosts),
            "rpz" => Ok(BlacklistFormat::Rpz),
            other => Err(DefenseError::UnknownFormat(other.to_string())),
        }
    }
}

/// Fixed RPZ preamble. The serial is constant so output is reproducible.
pub const RPZ_HEADER: &str = "\
$TTL 300
@ IN SOA localhost. hostmaster.localhost. ( 1 3600 600 86400 300 )
@ IN NS localhost.
";

pub fn export_blacklist(candidates: &[Candidate], format: BlacklistFormat) -> String {
    export_domains(candidates.iter().map(|c| &c.domain), format)
}

/// Sorted, deduplicated blocklist. `hosts` maps each name to 0.0.0.0;
/// `rpz` emits a response-policy zone answering NXDOMAIN (`CNAME .`).
pub fn export_domains<'a, I>(domains: I, format: BlacklistFormat) -> String
where
    I: IntoIterator<Item = &'a Domain>,
{
    let names: BTreeSet<String> = domains.into_iter().map(Domain::render).collect();
    let mut out = String::new();
    match format {
        BlacklistFormat::Hosts => {
            for name in &names {
                writeln!(out, "0.0.0.0 {name}").expect("write to string");
            }
        }
        BlacklistFormat::Rpz => {
            out.push_str(RPZ_HEADER);
            for name in &names {
                writeln!(out, "{name} CNAME .").expect("write to string");
            }
        }
    }
    out
}
