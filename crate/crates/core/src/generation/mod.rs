//! Candidate generation under every typo model.
//!
//! Each model edits the name portion of a domain (the labels left of the
//! TLD, dots held fixed) except where noted: `ModDeflate` may also delete
//! a dot, and `TldSwap` replaces only the TLD. Every produced string is
//! revalidated as a [`Domain`]; invalid, identical and duplicate outputs
//! are dropped and counted in a [`ModelReport`].

mod advanced;
mod charmod;
mod collector;
mod keyboard;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::domain::{is_ldh_byte, Domain, Suffix};
use crate::resources::{ConfusableMap, HomophoneDictionary, KeyboardLayout};

pub use advanced::{bitsquat, homograph, soundsquat, tld_swap};
pub use charmod::{k_mod, kmod_contains, one_mod_deflate, one_mod_inflate, one_mod_inplace};
pub use keyboard::{
    character_duplication, character_omission, character_permutation, character_substitution,
    missing_dot,
};

use collector::Collector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerationError {
    #[error("{domain}: name too short for {model}")]
    NameTooShort { domain: String, model: TypoModel },
    #[error("k must be 2 or 3, got {0}")]
    BadK(u8),
    #[error("alphabet must be a non-empty set of LDH characters, got {0:?}")]
    BadAlphabet(String),
    #[error("unknown model {0:?}")]
    UnknownModel(String),
}

/// Edit scheme for the multi-character modification models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Inplace,
    Inflate,
    Deflate,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Inplace, Scheme::Inflate, Scheme::Deflate];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Inplace => "inplace",
            Scheme::Inflate => "inflate",
            Scheme::Deflate => "deflate",
        }
    }
}

impl FromStr for Scheme {
    type Err = GenerationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "inplace" => Ok(Scheme::Inplace),
            "inflate" => Ok(Scheme::Inflate),
            "deflate" => Ok(Scheme::Deflate),
            _ => Err(GenerationError::UnknownModel(s.to_string())),
        }
    }
}

/// The generation strategies. Declaration order is the order in which
/// [`generate_all`] emits candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypoModel {
    MissingDot,
    Omission,
    Permutation,
    Substitution,
    Duplication,
    ModInplace,
    ModDeflate,
    ModInflate,
    KMod { k: u8, scheme: Scheme },
    Homograph,
    Bitsquat,
    Soundsquat,
    TldSwap,
}

impl TypoModel {
    /// The twelve single-edit models.
    pub const SINGLE_EDIT: [TypoModel; 12] = [
        TypoModel::MissingDot,
        TypoModel::Omission,
        TypoModel::Permutation,
        TypoModel::Substitution,
        TypoModel::Duplication,
        TypoModel::ModInplace,
        TypoModel::ModDeflate,
        TypoModel::ModInflate,
        TypoModel::Homograph,
        TypoModel::Bitsquat,
        TypoModel::Soundsquat,
        TypoModel::TldSwap,
    ];

    pub fn kmod(k: u8, scheme: Scheme) -> Result<Self, GenerationError> {
        if !(2..=3).contains(&k) {
            return Err(GenerationError::BadK(k));
        }
        Ok(TypoModel::KMod { k, scheme })
    }

    /// Every `KMod` variant with k in {2, 3}.
    pub fn all_kmod() -> impl Iterator<Item = TypoModel> {
        [2u8, 3].into_iter().flat_map(|k| {
            Scheme::ALL
                .into_iter()
                .map(move |scheme| TypoModel::KMod { k, scheme })
        })
    }

    /// Every model, in declaration order.
    pub fn all() -> Vec<TypoModel> {
        let mut models: BTreeSet<TypoModel> = TypoModel::SINGLE_EDIT.into_iter().collect();
        models.extend(TypoModel::all_kmod());
        models.into_iter().collect()
    }

    pub fn is_kmod(self) -> bool {
        matches!(self, TypoModel::KMod { .. })
    }

    /// Name used for weights files and CLI flags, ignoring k-mod parameters.
    pub fn kind_name(self) -> &'static str {
        match self {
            TypoModel::MissingDot => "MissingDot",
            TypoModel::Omission => "Omission",
            TypoModel::Permutation => "Permutation",
            TypoModel::Substitution => "Substitution",
            TypoModel::Duplication => "Duplication",
            TypoModel::ModInplace => "ModInplace",
            TypoModel::ModDeflate => "ModDeflate",
            TypoModel::ModInflate => "ModInflate",
            TypoModel::KMod { .. } => "KMod",
            TypoModel::Homograph => "Homograph",
            TypoModel::Bitsquat => "Bitsquat",
            TypoModel::Soundsquat => "Soundsquat",
            TypoModel::TldSwap => "TldSwap",
        }
    }
}

impl fmt::Display for TypoModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypoModel::KMod { k, scheme } => write!(f, "KMod({k},{})", scheme.as_str()),
            other => f.write_str(other.kind_name()),
        }
    }
}

impl Serialize for TypoModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for TypoModel {
    type Err = GenerationError;

    /// Accepts the display form (`MissingDot`, `KMod(2,inplace)`) and the
    /// kebab-case flag form (`missing-dot`, `kmod2-inplace`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || GenerationError::UnknownModel(s.to_string());
        let key: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        let model = match key.as_str() {
            "missingdot" => TypoModel::MissingDot,
            "omission" => TypoModel::Omission,
            "permutation" => TypoModel::Permutation,
            "substitution" => TypoModel::Substitution,
            "duplication" => TypoModel::Duplication,
            "modinplace" | "1modinplace" => TypoModel::ModInplace,
            "moddeflate" | "1moddeflate" => TypoModel::ModDeflate,
            "modinflate" | "1modinflate" => TypoModel::ModInflate,
            "homograph" => TypoModel::Homograph,
            "bitsquat" => TypoModel::Bitsquat,
            "soundsquat" => TypoModel::Soundsquat,
            "tldswap" => TypoModel::TldSwap,
            _ => {
                // kmod(2,inplace) / kmod2inplace / 2modinplace
                let compact: String = key
                    .chars()
                    .filter(|c| !matches!(c, '(' | ')' | ','))
                    .collect();
                let rest = match compact.strip_prefix("kmod") {
                    Some(rest) => rest.to_string(),
                    None if compact.get(1..4) == Some("mod") => {
                        format!("{}{}", &compact[..1], &compact[4..])
                    }
                    None => return Err(unknown()),
                };
                if rest.len() < 2 || !rest.is_char_boundary(1) {
                    return Err(unknown());
                }
                let k: u8 = rest[..1].parse().map_err(|_| unknown())?;
                let scheme: Scheme = rest[1..].parse().map_err(|_| unknown())?;
                TypoModel::kmod(k, scheme)?
            }
        };
        Ok(model)
    }
}

/// Parse a comma-separated model list. Group names expand to several
/// models: `keyboard` (missing dot through duplication), `charmod` (the
/// three 1-mod schemes), `advanced`, `kmod`, `single` and `all`.
pub fn parse_model_set(spec: &str) -> Result<BTreeSet<TypoModel>, GenerationError> {
    let mut set = BTreeSet::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.to_ascii_lowercase().as_str() {
            "keyboard" => set.extend(TypoModel::SINGLE_EDIT[..5].iter().copied()),
            "charmod" => set.extend(TypoModel::SINGLE_EDIT[5..8].iter().copied()),
            "advanced" => set.extend(TypoModel::SINGLE_EDIT[8..].iter().copied()),
            "kmod" => set.extend(TypoModel::all_kmod()),
            "single" => set.extend(TypoModel::SINGLE_EDIT),
            "all" => set.extend(TypoModel::all()),
            _ => {
                set.insert(item.parse()?);
            }
        }
    }
    Ok(set)
}

/// Replacement/insertion characters for the brute-force models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet(Vec<u8>);

pub const DEFAULT_ALPHABET: &str = "abcdefghijklmnopqrstuvwxyz0123456789-";

impl Alphabet {
    /// Characters are lowercased and deduplicated, first occurrence wins.
    pub fn new(chars: &str) -> Result<Self, GenerationError> {
        let mut bytes = Vec::new();
        for b in chars.to_ascii_lowercase().bytes() {
            if !is_ldh_byte(b) {
                return Err(GenerationError::BadAlphabet(chars.to_string()));
            }
            if !bytes.contains(&b) {
                bytes.push(b);
            }
        }
        if bytes.is_empty() {
            return Err(GenerationError::BadAlphabet(chars.to_string()));
        }
        Ok(Alphabet(bytes))
    }

    pub fn bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn contains(&self, b: u8) -> bool {
        self.0.contains(&b)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet(DEFAULT_ALPHABET.as_bytes().to_vec())
    }
}

impl FromStr for Alphabet {
    type Err = GenerationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Alphabet::new(s)
    }
}

/// TLDs used by `TldSwap` when none are configured.
pub fn default_swap_tlds() -> Vec<Suffix> {
    ["net", "org", "biz"]
        .into_iter()
        .map(|t| Suffix::new(t).expect("static tld"))
        .collect()
}

/// A generated variant of `source`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub domain: Domain,
    pub model: TypoModel,
    pub edit_description: String,
    pub source: Domain,
}

/// Counters for one model run.
///
/// `raw` counts every attempted edit; the drop counters partition the
/// attempts that did not become a candidate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    pub model: Option<TypoModel>,
    pub raw: usize,
    /// Edits that reproduce the source (equal-character swaps, case flips).
    pub identical: usize,
    /// Edits that break the LDH rule.
    pub invalid: usize,
    /// k-mod edits reachable with fewer than k edits.
    pub shortcut: usize,
    /// Repeats within this model.
    pub duplicate: usize,
    /// Candidates this model produced.
    pub emitted: usize,
    /// Candidates already claimed by an earlier model in [`generate_all`].
    pub overlap: usize,
}

impl ModelReport {
    pub(crate) fn new(model: TypoModel) -> Self {
        ModelReport {
            model: Some(model),
            ..Default::default()
        }
    }
}

/// Output of one model over one domain.
#[derive(Debug, Clone, Default)]
pub struct ModelOutput {
    pub candidates: Vec<Candidate>,
    pub report: ModelReport,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GenerationReport {
    pub models: Vec<ModelReport>,
}

impl GenerationReport {
    pub fn raw(&self) -> usize {
        self.models.iter().map(|m| m.raw).sum()
    }

    pub fn invalid(&self) -> usize {
        self.models.iter().map(|m| m.invalid).sum()
    }

    pub fn overlap(&self) -> usize {
        self.models.iter().map(|m| m.overlap).sum()
    }

    pub fn emitted(&self) -> usize {
        self.models.iter().map(|m| m.emitted - m.overlap).sum()
    }

    pub fn get(&self, model: TypoModel) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.model == Some(model))
    }
}

/// Model selection plus the data each model needs.
#[derive(Debug, Clone)]
pub struct GenerationConfig {
    pub models: BTreeSet<TypoModel>,
    pub layout: KeyboardLayout,
    pub confusables: ConfusableMap,
    pub homophones: HomophoneDictionary,
    pub alphabet: Alphabet,
    pub tlds: Vec<Suffix>,
}

impl Default for GenerationConfig {
    /// All single-edit models with the built-in data. k-mod is opt-in: its
    /// output grows with the cube of the alphabet.
    fn default() -> Self {
        GenerationConfig {
            models: TypoModel::SINGLE_EDIT.into_iter().collect(),
            layout: KeyboardLayout::qwerty(),
            confusables: ConfusableMap::builtin(),
            homophones: HomophoneDictionary::builtin(),
            alphabet: Alphabet::default(),
            tlds: default_swap_tlds(),
        }
    }
}

impl GenerationConfig {
    pub fn with_models<I: IntoIterator<Item = TypoModel>>(mut self, models: I) -> Self {
        self.models = models.into_iter().collect();
        self
    }
}

/// Run a single model.
pub fn generate_model(
    d: &Domain,
    model: TypoModel,
    config: &GenerationConfig,
) -> Result<ModelOutput, GenerationError> {
    let mut c = Collector::new(d, model);
    match model {
        TypoModel::MissingDot => keyboard::missing_dot_into(&mut c),
        TypoModel::Omission => keyboard::omission_into(&mut c)?,
        TypoModel::Permutation => keyboard::permutation_into(&mut c),
        TypoModel::Substitution => keyboard::substitution_into(&mut c, &config.layout),
        TypoModel::Duplication => keyboard::duplication_into(&mut c),
        TypoModel::ModInplace => charmod::scheme_into(&mut c, 1, Scheme::Inplace, &config.alphabet),
        TypoModel::ModDeflate => charmod::scheme_into(&mut c, 1, Scheme::Deflate, &config.alphabet),
        TypoModel::ModInflate => charmod::scheme_into(&mut c, 1, Scheme::Inflate, &config.alphabet),
        TypoModel::KMod { k, scheme } => {
            if !(2..=3).contains(&k) {
                return Err(GenerationError::BadK(k));
            }
            charmod::scheme_into(&mut c, k as usize, scheme, &config.alphabet)
        }
        TypoModel::Homograph => advanced::homograph_into(&mut c, &config.confusables),
        TypoModel::Bitsquat => advanced::bitsquat_into(&mut c),
        TypoModel::Soundsquat => advanced::soundsquat_into(&mut c, &config.homophones),
        TypoModel::TldSwap => advanced::tld_swap_into(&mut c, &config.tlds),
    }
    Ok(c.finish())
}

/// Union of every configured model, deduplicated by rendered domain.
///
/// The first model (in [`TypoModel`] order) to produce a domain owns it;
/// later producers are appended to its edit description and counted as
/// `overlap` in their report. Models run in parallel but the merge order is
/// fixed, so the output is deterministic. A model the name is too short
/// for contributes nothing.
pub fn generate_all(
    d: &Domain,
    config: &GenerationConfig,
) -> Result<(Vec<Candidate>, GenerationReport), GenerationError> {
    let models: Vec<TypoModel> = config.models.iter().copied().collect();
    let outputs = models
        .par_iter()
        .map(|&m| match generate_model(d, m, config) {
            Err(GenerationError::NameTooShort { .. }) => Ok(ModelOutput {
                candidates: Vec::new(),
                report: ModelReport::new(m),
            }),
            other => other,
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut merged: Vec<Candidate> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut report = GenerationReport::default();
    for mut output in outputs {
        for cand in output.candidates {
            let key = cand.domain.render();
            match index.get(&key) {
                Some(&i) => {
                    let owner = &mut merged[i];
                    owner
                        .edit_description
                        .push_str(&format!("; also {}: {}", cand.model, cand.edit_description));
                    output.report.overlap += 1;
                }
                None => {
                    index.insert(key, merged.len());
                    merged.push(cand);
                }
            }
        }
        report.models.push(output.report);
    }
    Ok((merged, report))
}
